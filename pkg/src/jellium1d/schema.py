"""JSON schema for experiment configurations.

One document validates the whole config; per-experiment parameter shapes are
attached with if/then clauses so validation errors carry a JSON pointer into
the offending field.
"""

_BACKGROUND = {
    "type": "object",
    "required": ["variant", "alpha", "params"],
    "additionalProperties": False,
    "properties": {
        "variant": {"enum": ["uniform_interval", "gamma_family", "fixed_density"]},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "params": {"type": "object"},
    },
}

_GAS = {
    "type": "object",
    "required": ["n", "beta", "alpha"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
    },
}

_FAMILY = {
    "type": "object",
    "required": ["variant", "beta"],
    "additionalProperties": False,
    "properties": {
        "variant": {"enum": ["half_well", "squared_zero", "squared_gamma"]},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "lambda": {"type": "number", "exclusiveMinimum": 0},
        "gamma": {"type": "number", "exclusiveMinimum": 1},
    },
}

_POPULATION = {
    "type": "object",
    "required": ["family", "k", "depth_m"],
    "additionalProperties": False,
    "properties": {
        "family": _FAMILY,
        "k": {"type": "integer", "minimum": 1},
        "depth_m": {"type": "integer", "minimum": 1},
        "method": {"enum": ["auto", "rejection", "gibbs"]},
        "sweeps": {"type": "integer", "minimum": 1},
    },
}

_SAMPLES = {"type": "integer", "minimum": 1}

PARAM_SCHEMAS = {
    "SampleGas": {
        "type": "object",
        "required": ["gas", "background", "n_samples"],
        "additionalProperties": False,
        "properties": {
            "gas": _GAS,
            "background": _BACKGROUND,
            "n_samples": _SAMPLES,
            "method": {"enum": ["rejection", "gibbs", "gaussian"]},
            "max_attempts": {"type": "integer", "minimum": 1},
            "sweeps": {"type": "integer", "minimum": 1},
            "interval": {"type": "array", "items": {"type": "number"},
                         "minItems": 2, "maxItems": 2},
        },
    },
    "SampleLimit": {
        "type": "object",
        "required": ["family", "k", "depth_m", "n_samples"],
        "additionalProperties": False,
        "properties": {
            "family": _FAMILY,
            "k": {"type": "integer", "minimum": 1},
            "depth_m": {"type": "integer", "minimum": 1},
            "n_samples": _SAMPLES,
            "method": {"enum": ["auto", "rejection", "gibbs"]},
            "sweeps": {"type": "integer", "minimum": 1},
        },
    },
    "RenyiCheck": {
        "type": "object",
        "required": ["gas", "background", "k", "n_samples"],
        "additionalProperties": False,
        "properties": {
            "gas": _GAS,
            "background": _BACKGROUND,
            "k": {"type": "integer", "minimum": 0},
            "n_samples": _SAMPLES,
            "max_attempts": {"type": "integer", "minimum": 1},
            "confidence": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        },
    },
    "TailScan": {
        "type": "object",
        "required": ["family", "n_samples", "gamma_hypothesis"],
        "additionalProperties": False,
        "properties": {
            "family": _FAMILY,
            "n_samples": _SAMPLES,
            "gamma_hypothesis": {"type": "number", "exclusiveMinimum": 0},
            "survival_window": {"type": "array", "items": {"type": "number"},
                                "minItems": 2, "maxItems": 2},
            "depth_m": {"type": "integer", "minimum": 2},
            "method": {"enum": ["auto", "rejection", "gibbs"]},
            "sweeps": {"type": "integer", "minimum": 1},
        },
    },
    "DominanceCheck": {
        "type": "object",
        "required": ["left", "right", "n_samples"],
        "additionalProperties": False,
        "properties": {
            "left": _POPULATION,
            "right": _POPULATION,
            "n_samples": _SAMPLES,
            "confidence": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        },
    },
    "GumbelCheck": {
        "type": "object",
        "required": ["chi", "n_samples"],
        "additionalProperties": False,
        "properties": {
            "chi": {"type": "number", "exclusiveMinimum": 0},
            "n_samples": _SAMPLES,
        },
    },
    "ConvergenceTable": {
        "type": "object",
        "required": ["regime", "k", "n_list", "n_samples"],
        "additionalProperties": False,
        "properties": {
            "regime": {
                "type": "object",
                "required": ["name", "beta"],
                "additionalProperties": False,
                "properties": {
                    "name": {"enum": ["asymptotically_neutral", "nonneutral",
                                      "fixed_background"]},
                    "beta": {"type": "number", "exclusiveMinimum": 0},
                    "lambda": {"type": "number", "exclusiveMinimum": 0},
                    "gamma": {"type": "number", "exclusiveMinimum": 1},
                    "charge_rate": {"type": "number", "exclusiveMinimum": 1},
                    "rho": _BACKGROUND["properties"]["params"],
                },
            },
            "k": {"type": "integer", "minimum": 1},
            "n_list": {"type": "array", "items": {"type": "integer", "minimum": 1},
                       "minItems": 1},
            "n_samples": _SAMPLES,
            "sweeps": {"type": "integer", "minimum": 1},
            "limit_depth": {"type": "integer", "minimum": 1},
        },
    },
    "PartitionEstimate": {
        "type": "object",
        "required": ["gas", "background", "n_samples"],
        "additionalProperties": False,
        "properties": {
            "gas": _GAS,
            "background": _BACKGROUND,
            "n_samples": _SAMPLES,
        },
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "jellium1d experiment configuration",
    "type": "object",
    "required": ["experiment", "seed", "params"],
    "additionalProperties": False,
    "properties": {
        "experiment": {"enum": sorted(PARAM_SCHEMAS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "params": {"type": "object"},
        "output_dir": {"type": "string"},
        "parallelism": {"type": "integer", "minimum": 1},
    },
    "allOf": [
        {"if": {"properties": {"experiment": {"const": name}}, "required": ["experiment"]},
         "then": {"properties": {"params": schema}}}
        for name, schema in sorted(PARAM_SCHEMAS.items())
    ],
}
