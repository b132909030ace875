"""Command-line batch front-end.

Subcommands: ``run <config.json>``, ``validate <config.json>``, ``schema``.
Exit codes: 0 ok, 2 invalid config, 3 inadmissible gas, 4 sampling budget
exhausted, 5 internal error. Identical config and seed give byte-identical
CSV bodies; set JELLIUM1D_OUTPUT_ROOT to redirect relative output dirs.
"""

import argparse
import json
import sys
import traceback

from .exceptions import ConfigInvalid, InadmissibleGas, MaxAttemptsExceeded
from .experiments import cost_estimate, run_config, validate_config
from .schema import CONFIG_SCHEMA

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INADMISSIBLE = 3
EXIT_BUDGET = 4
EXIT_INTERNAL = 5


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="jellium1d",
        description="Samplers and statistical checks for the 1D jellium "
                    "and its edge point processes.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_val = sub.add_parser("validate", help="validate a config without running")
    p_val.add_argument("config", help="path to a JSON experiment config")
    sub.add_parser("schema", help="print the config JSON schema")
    args = parser.parse_args(argv)

    try:
        if args.command == "schema":
            json.dump(CONFIG_SCHEMA, sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
            return EXIT_OK
        config = _load(args.config)
        if args.command == "validate":
            notes = validate_config(config)
            print("ok")
            for note in notes:
                print(note)
            return EXIT_OK
        manifest = run_config(config)
        print(json.dumps({"status": "ok",
                          "artifacts": manifest["artifacts"],
                          "wall_time_s": manifest["wall_time_s"]}, indent=2))
        return EXIT_OK
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InadmissibleGas as exc:
        print(f"inadmissible gas: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except MaxAttemptsExceeded as exc:
        print(f"sampling budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
