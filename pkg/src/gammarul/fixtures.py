"""Bundled synthetic fleets used by the examples, the CLI demos and the tests.

``laser``
    15 units, measured every 250 h up to 4000 h, threshold 10, drawn from
    ``GP(0.031 t, 15.35)``.  Increments are then rescaled by one common
    factor so the fleet-average degradation rate equals ``alpha / beta``
    exactly; reliability and MTTF estimates depend almost entirely on that
    average, so the fixture reproduces the calibration point without
    depending on the luck of one draw.
``wheel``
    11 units, measured every 50 kkm up to 600 kkm, threshold 60 mm, drawn
    from a heterogeneous process ``GP(alpha t, beta_i)`` whose three fastest
    units cross the threshold before the last measurement.

The CSV files in ``gammarul/data`` were written by :func:`write_bundled`
and are what :func:`load_fixture` reads.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .data import DegradationDataset, MeasurementGrid, read_long_csv, write_long_csv
from .specfun import RngStream

LASER = {"alpha": 0.031, "beta": 15.35, "n": 15, "m": 16, "spacing": 250.0, "threshold": 10.0, "seed": 1998}

# Mean wear rates (mm/kkm); units 5, 9 and 11 are the fast ones.
WHEEL_RATES = [0.062, 0.071, 0.055, 0.083, 0.1145, 0.066, 0.078, 0.059, 0.1073, 0.088, 0.1425]
WHEEL = {"alpha": 1.2, "n": 11, "m": 12, "spacing": 50.0, "threshold": 60.0, "seed": 2011}

FIXTURES = {"laser": LASER, "wheel": WHEEL}


def laser_like(alpha=LASER["alpha"], beta=LASER["beta"], n=LASER["n"], m=LASER["m"],
               spacing=LASER["spacing"], seed=LASER["seed"], calibrate=True) -> DegradationDataset:
    grid = MeasurementGrid.regular(spacing, m)
    rng = RngStream(seed)
    y = rng.generator.standard_gamma(alpha * spacing, size=(n, m)) / beta
    if calibrate:
        y *= (alpha * spacing / beta) / y.mean()
    return DegradationDataset(grid, y)


def wheel_betas(alpha=WHEEL["alpha"]) -> np.ndarray:
    return alpha / np.asarray(WHEEL_RATES)


def wheel_like(alpha=WHEEL["alpha"], seed=WHEEL["seed"]) -> DegradationDataset:
    grid = MeasurementGrid.regular(WHEEL["spacing"], WHEEL["m"])
    betas = wheel_betas(alpha)
    rng = RngStream(seed)
    y = rng.generator.standard_gamma(alpha * WHEEL["spacing"], size=(betas.size, grid.m)) / betas[:, None]
    return DegradationDataset(grid, y)


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    return Path(str(resources.files("gammarul") / "data" / f"{name}_synthetic.csv"))


def load_fixture(name: str) -> DegradationDataset:
    return read_long_csv(fixture_path(name))


def write_bundled(directory: str | Path) -> None:
    d = Path(directory)
    write_long_csv(laser_like(), d / "laser_synthetic.csv", digits=4)
    write_long_csv(wheel_like(), d / "wheel_synthetic.csv", digits=3)
