"""Experiment execution: validated configs in, CSV/JSON artifacts out.

Sampling experiments are decomposed into fixed-size tasks; task t draws from
the substream keyed by (seed, t), so the emitted multiset of samples depends
only on (config, seed), not on the worker count. Rows are written in task
order, which makes re-runs byte-identical.
"""

import json
import os
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import artifacts, order_stats, stats
from .background import BackgroundSpec
from .edge_limits import (HalfWell, LimitFamily, Regime, SquaredGamma,
                          SquaredZero, finite_to_limit_distance,
                          gumbel_limit_cdf, gumbel_statistic,
                          sample_halfwell_topk, sample_limit_topk)
from .exceptions import ConfigInvalid
from .finite_gas import (GasParams, estimate_log_partition,
                         sample_gas_gaussian_conditional,
                         sample_gas_gibbs_ensemble, sample_gas_rejection)
from .schema import CONFIG_SCHEMA
from .streams import substream

TASK_CHUNK = 25_000


def package_version():
    """git-describe when available, package version otherwise."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             capture_output=True, text=True, timeout=5,
                             cwd=os.path.dirname(os.path.abspath(__file__)))
        if out.returncode == 0 and out.stdout.strip():
            return f"jellium1d-{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    try:
        from importlib.metadata import version
        return f"jellium1d-{version('artifact')}"
    except Exception:
        return "jellium1d-unversioned"


# ---------------------------------------------------------------------------
# config parsing and validation

def _invalid(message, pointer):
    return ConfigInvalid(message, pointer=pointer)


def parse_background(obj, pointer="/params/background"):
    try:
        return BackgroundSpec.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise _invalid(str(exc), pointer) from exc


def parse_gas(obj, pointer="/params/gas"):
    try:
        return GasParams(int(obj["n"]), float(obj["beta"]), float(obj["alpha"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise _invalid(str(exc), pointer) from exc


def parse_family(obj, pointer="/params/family"):
    variant = obj.get("variant")
    beta = float(obj["beta"])
    try:
        if variant == "half_well":
            return LimitFamily(HalfWell(float(obj["lambda"])), beta)
        if variant == "squared_zero":
            return LimitFamily(SquaredZero(float(obj["lambda"])), beta)
        if variant == "squared_gamma":
            return LimitFamily(SquaredGamma(float(obj["gamma"])), beta)
    except KeyError as exc:
        raise _invalid(f"family variant {variant!r} is missing {exc}", pointer) from exc
    except ValueError as exc:
        raise _invalid(str(exc), pointer) from exc
    raise _invalid(f"unknown family variant {variant!r}", pointer + "/variant")


def parse_regime(obj, pointer="/params/regime"):
    try:
        kwargs = {"name": obj["name"], "beta": float(obj["beta"])}
        if "lambda" in obj:
            kwargs["lam"] = float(obj["lambda"])
        if "gamma" in obj:
            kwargs["gamma"] = float(obj["gamma"])
        if "charge_rate" in obj:
            kwargs["charge_rate"] = float(obj["charge_rate"])
        return Regime(**kwargs)
    except (KeyError, TypeError, ValueError) as exc:
        raise _invalid(str(exc), pointer) from exc


def _json_pointer(error):
    return "/" + "/".join(str(p) for p in error.absolute_path)


def validate_config(config):
    """Schema plus admissibility validation; raises ConfigInvalid, returns
    diagnostics (including a dry-run cost estimate) when valid."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        raise _invalid(first.message, _json_pointer(first))

    experiment = config["experiment"]
    params = config["params"]
    notes = []
    if "gas" in params:
        gas = parse_gas(params["gas"])
        if not gas.admissible:
            raise _invalid(
                f"the gas exists if and only if alpha > n - 1; "
                f"got alpha={gas.alpha}, n={gas.n}", "/params/gas/alpha")
    if "background" in params:
        bg = parse_background(params["background"])
        if "gas" in params:
            from .finite_gas import _check_gas
            try:
                _check_gas(bg, parse_gas(params["gas"]))
            except ValueError as exc:
                raise _invalid(str(exc), "/params/background") from exc
    if "family" in params:
        parse_family(params["family"])
    if "left" in params:
        parse_family(params["left"]["family"], "/params/left/family")
        parse_family(params["right"]["family"], "/params/right/family")
    if "regime" in params:
        parse_regime(params["regime"])
    if experiment == "RenyiCheck":
        gas = parse_gas(params["gas"])
        if params["k"] > gas.n:
            raise _invalid(f"k={params['k']} exceeds n={gas.n}", "/params/k")
        bg = parse_background(params["background"])
        if bg.support()[1] > 0:
            raise _invalid("background support must lie inside (-inf, 0]",
                           "/params/background")
    if experiment == "SampleLimit" or experiment == "TailScan":
        fam = parse_family(params["family"])
        k = params.get("k", 1)
        depth = params.get("depth_m", 8)
        if depth < k:
            raise _invalid(f"depth_m={depth} below k={k}", "/params/depth_m")
    notes.append(f"estimated component draws: {cost_estimate(config):.2e}")
    return notes


def cost_estimate(config):
    """Crude dry-run cost in component draws, for budgeting."""
    params = config["params"]
    n_samples = params.get("n_samples", 1)
    if config["experiment"] in ("SampleGas", "RenyiCheck", "PartitionEstimate"):
        n = params["gas"]["n"]
        return float(n_samples) * n * 4
    if config["experiment"] in ("SampleLimit", "TailScan", "DominanceCheck"):
        depth = params.get("depth_m", 8)
        return float(n_samples) * depth * 8
    if config["experiment"] == "ConvergenceTable":
        return float(n_samples) * sum(params["n_list"]) * 80
    return float(n_samples) * 64


# ---------------------------------------------------------------------------
# task helpers

def _task_counts(n_samples, chunk=TASK_CHUNK):
    full, rest = divmod(int(n_samples), chunk)
    return [chunk] * full + ([rest] if rest else [])


def _run_tasks(worker, arglist, parallelism):
    if parallelism <= 1 or len(arglist) <= 1:
        return [worker(a) for a in arglist]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(worker, arglist))


def _gas_task(args):
    gas_obj, bg_obj, method, seed, task_id, count, opts = args
    gas = parse_gas(gas_obj)
    bg = parse_background(bg_obj)
    rng = substream(seed, task_id)
    if method == "rejection":
        samples, rate = sample_gas_rejection(
            bg, gas, rng, size=count, max_attempts=opts.get("max_attempts", 10**7))
        return samples, {"acceptance_rate": rate}
    if method == "gibbs":
        samples = sample_gas_gibbs_ensemble(bg, gas, rng, size=count,
                                            sweeps=opts.get("sweeps", 64))
        return samples, {"sweeps": opts.get("sweeps", 64)}
    if method == "gaussian":
        a, b = opts["interval"]
        samples, rate = sample_gas_gaussian_conditional(
            a, b, gas, rng, size=count, max_attempts=opts.get("max_attempts", 10**7))
        return samples, {"acceptance_rate": rate}
    raise _invalid(f"unknown method {method!r}", "/params/method")


def _limit_task(args):
    fam_obj, k, depth_m, method, sweeps, seed, task_id, count = args
    family = parse_family(fam_obj)
    rng = substream(seed, task_id)
    vals = sample_limit_topk(family, k, depth_m, rng, size=count,
                             method=method, sweeps=sweeps)
    return vals


# ---------------------------------------------------------------------------
# experiments

def _exp_sample_gas(params, seed, parallelism, out):
    method = params.get("method", "rejection")
    opts = {k: params[k] for k in ("max_attempts", "sweeps", "interval") if k in params}
    if method == "gaussian" and "interval" not in opts:
        raise _invalid("gaussian method needs the containment interval",
                       "/params/interval")
    counts = _task_counts(params["n_samples"])
    args = [(params["gas"], params["background"], method, seed, t, c, opts)
            for t, c in enumerate(counts)]
    results = _run_tasks(_gas_task, args, parallelism)
    samples = np.vstack([r[0] for r in results])
    artifacts.write_configurations_csv(out / "samples.csv", samples)
    sidecar = {"n_samples": int(samples.shape[0]), "method": method, "tasks": len(counts)}
    rates = [r[1].get("acceptance_rate") for r in results if "acceptance_rate" in r[1]]
    if rates:
        sidecar["acceptance_rate"] = float(np.mean(rates))
    if results and "sweeps" in results[0][1]:
        sidecar["sweeps"] = results[0][1]["sweeps"]
    artifacts.write_json(out / "samples.json", sidecar)
    return ["samples.csv", "samples.json"], sidecar


def _exp_sample_limit(params, seed, parallelism, out):
    counts = _task_counts(params["n_samples"])
    args = [(params["family"], params["k"], params["depth_m"],
             params.get("method", "auto"), params.get("sweeps", 64), seed, t, c)
            for t, c in enumerate(counts)]
    results = _run_tasks(_limit_task, args, parallelism)
    vals = np.vstack(results)
    artifacts.write_topk_csv(out / "topk.csv", vals, params["depth_m"])
    sidecar = {"n_samples": int(vals.shape[0]), "depth_m": params["depth_m"],
               "method": params.get("method", "auto")}
    artifacts.write_json(out / "topk.json", sidecar)
    return ["topk.csv", "topk.json"], sidecar


def _exp_renyi_check(params, seed, parallelism, out):
    gas = parse_gas(params["gas"])
    bg = parse_background(params["background"])
    spec = order_stats.ConditionalSpec(gas, bg, int(params["k"]))
    confidence = params.get("confidence", 0.99)
    n_samples = params["n_samples"]
    rng = substream(seed, 0)
    renyi = order_stats.sample_renyi_topk(spec, rng, size=n_samples)
    direct, report = order_stats.sample_conditional_direct(
        spec, rng, size=n_samples,
        max_attempts=params.get("max_attempts", 10**7))
    rows = []
    all_below = True
    for j in range(spec.k):
        p = stats.EmpiricalDistribution.from_samples(renyi[:, j])
        q = stats.EmpiricalDistribution.from_samples(direct[:, j])
        ks = stats.ks_statistic(p, q)
        band = stats.two_sample_band(p.count, q.count, confidence)
        all_below = all_below and ks < band
        rows.append({"coordinate": j + 1, "ks": ks, "band": band})
    verdict = {
        "verdict": "pass" if all_below else "fail",
        "coordinates": rows,
        "confidence": confidence,
        "direct_report": report.to_dict(),
    }
    artifacts.write_topk_csv(out / "renyi.csv", renyi, spec.k)
    artifacts.write_topk_csv(out / "direct.csv", direct, spec.k)
    artifacts.write_json(out / "verdict.json", verdict)
    return ["renyi.csv", "direct.csv", "verdict.json"], verdict


def _exp_tail_scan(params, seed, parallelism, out):
    family = parse_family(params["family"])
    rng = substream(seed, 0)
    depth = params.get("depth_m", 8)
    if isinstance(family.variant, HalfWell):
        vals = sample_halfwell_topk(family.variant.lam, family.beta, 1, rng,
                                    size=params["n_samples"])
    else:
        vals = sample_limit_topk(family, 1, depth, rng, size=params["n_samples"],
                                 method=params.get("method", "auto"),
                                 sweeps=params.get("sweeps", 64))
    emp = stats.EmpiricalDistribution.from_samples(vals[:, 0])
    window = tuple(params.get("survival_window", (1e-4, 1e-1)))
    fit = stats.tail_exponent_fit(emp, params["gamma_hypothesis"], window=window)
    result = {
        "gamma_hypothesis": fit.gamma_hypothesis,
        "fitted_coefficient": fit.fitted_coefficient,
        "fit_window": list(fit.fit_window),
        "r_squared": fit.r_squared,
        "residual_max_abs": float(np.max(np.abs(fit.residuals))),
        "n_samples": int(emp.count),
    }
    artifacts.write_json(out / "tailfit.json", result)
    artifacts.write_ecdf_csv(out / "ecdf.csv", emp)
    return ["tailfit.json", "ecdf.csv"], result


def _population(obj, seed, task_id, n_samples):
    family = parse_family(obj["family"], "/params/left/family")
    rng = substream(seed, task_id)
    vals = sample_limit_topk(family, obj["k"], obj["depth_m"], rng,
                             size=n_samples, method=obj.get("method", "auto"),
                             sweeps=obj.get("sweeps", 64))
    return stats.EmpiricalDistribution.from_samples(vals[:, obj["k"] - 1])


def _exp_dominance(params, seed, parallelism, out):
    n_samples = params["n_samples"]
    p = _population(params["left"], seed, 0, n_samples)
    q = _population(params["right"], seed, 1, n_samples)
    verdict = stats.dominance_check(p, q, params.get("confidence", 0.99))
    result = {"verdict": verdict.value,
              "confidence": params.get("confidence", 0.99),
              "n_samples": int(n_samples)}
    artifacts.write_json(out / "dominance.json", result)
    return ["dominance.json"], result


def _exp_gumbel(params, seed, parallelism, out):
    rng = substream(seed, 0)
    emp = gumbel_statistic(params["chi"], rng, params["n_samples"])
    ks = stats.ks_distance_to_cdf(emp, gumbel_limit_cdf)
    result = {"chi": params["chi"], "ks_to_shifted_gumbel": ks,
              "n_samples": int(params["n_samples"])}
    artifacts.write_json(out / "gumbel.json", result)
    artifacts.write_ecdf_csv(out / "ecdf.csv", emp)
    return ["gumbel.json", "ecdf.csv"], result


def _exp_convergence(params, seed, parallelism, out):
    regime = parse_regime(params["regime"])
    rng = substream(seed, 0)
    rows = finite_to_limit_distance(
        regime, int(params["k"]), list(params["n_list"]), int(params["n_samples"]),
        rng, sweeps=params.get("sweeps", 64),
        limit_depth=params.get("limit_depth", 128))
    result = {"regime": params["regime"], "rows": rows}
    artifacts.write_json(out / "convergence.json", result)
    return ["convergence.json"], result


def _exp_partition(params, seed, parallelism, out):
    gas = parse_gas(params["gas"])
    bg = parse_background(params["background"])
    rng = substream(seed, 0)
    log_z, stderr = estimate_log_partition(bg, gas, rng, samples=params["n_samples"])
    result = {"log_partition": log_z, "std_error": stderr,
              "n_samples": int(params["n_samples"])}
    artifacts.write_json(out / "partition.json", result)
    return ["partition.json"], result


_EXPERIMENTS = {
    "SampleGas": _exp_sample_gas,
    "SampleLimit": _exp_sample_limit,
    "RenyiCheck": _exp_renyi_check,
    "TailScan": _exp_tail_scan,
    "DominanceCheck": _exp_dominance,
    "GumbelCheck": _exp_gumbel,
    "ConvergenceTable": _exp_convergence,
    "PartitionEstimate": _exp_partition,
}


def resolve_output_dir(config):
    out = Path(config.get("output_dir", "jellium1d-out"))
    root = os.environ.get("JELLIUM1D_OUTPUT_ROOT")
    if root and not out.is_absolute():
        out = Path(root) / out
    return out


def run_config(config):
    """Validate, execute, and write artifacts plus a manifest; returns the
    manifest dict."""
    validate_config(config)
    out = resolve_output_dir(config)
    out.mkdir(parents=True, exist_ok=True)
    seed = int(config["seed"])
    parallelism = int(config.get("parallelism", 1))
    started = time.time()
    files, summary = _EXPERIMENTS[config["experiment"]](
        config["params"], seed, parallelism, out)
    manifest = {
        "experiment": config["experiment"],
        "config": config,
        "seed": seed,
        "parallelism": parallelism,
        "version": package_version(),
        "wall_time_s": time.time() - started,
        "artifacts": files,
        "summary": summary,
    }
    artifacts.write_json(out / "manifest.json", manifest)
    return manifest
