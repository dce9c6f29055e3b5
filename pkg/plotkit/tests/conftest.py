"""Synthetic run directory built straight from the documented schema;
no solver code is involved."""

import csv
import json

import numpy as np
import pytest


@pytest.fixture
def run_dir(tmp_path):
    times = np.linspace(0.0, 4.0, 21)
    n = len(times)
    sigma = 0.5
    grad = 0.8 * np.maximum(times, 0.3) ** (-sigma)
    header = ["t", "M", "E", "P", "I", "H", "H_alt", "moment_inertia",
              "morawetz", "entropy_residual_norm", "boundary_rho"]
    with open(tmp_path / "diagnostics.csv", "w", newline="") as fh:
        fh.write("# qhdlab-v1 diagnostics\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, t in enumerate(times):
            writer.writerow([t, 1.25 + 1e-14 * i, 1.07 + 1e-8 * np.sin(i),
                             1e-13 * i, 2.0, 3.0, 3.0, 0.3, 0.5,
                             float("nan") if i in (0, n - 1) else 1e-5,
                             1e-16])

    x = np.linspace(-6.0, 6.0, 128, endpoint=False)
    lam = np.exp(-x**2)
    with open(tmp_path / "fields_0000.csv", "w", newline="") as fh:
        fh.write("# qhdlab-v1 fields\n# t = 0\n")
        writer = csv.writer(fh)
        writer.writerow(["x", "sqrt_rho", "Lambda", "rho", "J", "e", "lambda"])
        for i in range(len(x)):
            sr = abs(x[i]) * np.exp(-x[i] ** 2 / 2)
            writer.writerow([x[i], sr, 0.0, sr**2, 0.0, 0.1, lam[i]])

    summary = {
        "schema": "qhdlab-v1",
        "status": "ok",
        "config": {"params": {"gamma": 2.0}},
        "field_snapshots": {"0": "fields_0000.csv"},
        "conservation": {"mass_drift": 1e-14, "energy_drift": 1e-8,
                         "momentum_drift": 1e-13},
        "decay": {
            "gamma": 2.0,
            "sigma": sigma,
            "window": [0.8, 4.0],
            "inconclusive": False,
            "boundary_time": None,
            "kinetic_ratio_end": 0.95,
            "kinetic_monotone": True,
            "quantities": {
                "grad_sqrt_rho_l2": {"fitted": -0.52, "target": -0.5,
                                     "stderr": 0.01, "verdict": "pass",
                                     "intercept": float(np.log(0.8))},
                "pressure_integral": {"fitted": -1.1, "target": -1.0,
                                      "stderr": 0.02, "verdict": "pass",
                                      "intercept": 0.0},
            },
            "series": {
                "times": times.tolist(),
                "grad_sqrt_rho_l2": grad.tolist(),
                "pressure_integral": (0.5 * np.maximum(times, 0.3) ** (-1.0)).tolist(),
                "kinetic_ratio": np.linspace(0.0, 0.95, n).tolist(),
            },
        },
        "lambda_measure": {
            "t0": {"density_csv_ref": "fields_0000.csv",
                   "atoms": [{"x": 0.0, "w": -1.0, "flag": None},
                             {"x": 3.5, "w": -0.02, "flag": "unreliable"}]},
            "final": {"density_csv_ref": None, "atoms": []},
        },
    }
    (tmp_path / "summary.json").write_text(json.dumps(summary, indent=2))
    return tmp_path
