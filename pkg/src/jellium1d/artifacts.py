"""CSV and JSON artifact emission.

CSV is RFC-4180 (CRLF rows), '.' decimal separator, floats at 17 significant
digits so a re-run with the same seed is byte-identical.
"""

import csv
import json

import numpy as np


def fmt_float(x):
    return format(float(x), ".17g")


def write_configurations_csv(path, samples):
    """Rows sample_id,k,x for an array of descending configurations (S, n)."""
    samples = np.asarray(samples)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "k", "x"])
        for sid in range(samples.shape[0]):
            for k in range(samples.shape[1]):
                w.writerow([sid, k + 1, fmt_float(samples[sid, k])])


def write_topk_csv(path, samples, depth_m):
    """Rows sample_id,j,x,depth_m for an array of top-k samples (S, k)."""
    samples = np.asarray(samples)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "j", "x", "depth_m"])
        for sid in range(samples.shape[0]):
            for j in range(samples.shape[1]):
                w.writerow([sid, j + 1, fmt_float(samples[sid, j]), depth_m])


def write_ecdf_csv(path, emp):
    """Rows x,F of the empirical CDF evaluated at its own sample points."""
    n = emp.count
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "F"])
        for i, x in enumerate(emp.samples):
            w.writerow([fmt_float(x), fmt_float((i + 1) / n)])


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
