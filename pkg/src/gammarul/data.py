"""Degradation measurements, increments and sufficient statistics."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ShapeError, ValidationError

__all__ = [
    "MeasurementGrid",
    "DegradationDataset",
    "SufficientStats",
    "increments_from_paths",
    "sufficient_stats",
    "read_long_csv",
    "write_long_csv",
]


@dataclass(frozen=True)
class MeasurementGrid:
    """Strictly increasing measurement epochs ``T_1 < ... < T_m`` (with ``T_0 = 0``)."""

    epochs: np.ndarray

    def __post_init__(self):
        epochs = np.asarray(self.epochs, dtype=float).reshape(-1)
        if epochs.size == 0:
            raise ShapeError("a measurement grid needs at least one epoch")
        if not np.all(np.isfinite(epochs)) or epochs[0] <= 0:
            raise ValidationError("epochs must be positive and finite")
        if np.any(np.diff(epochs) <= 0):
            raise ValidationError("epochs must be strictly increasing")
        epochs.setflags(write=False)
        object.__setattr__(self, "epochs", epochs)

    @classmethod
    def regular(cls, spacing: float, m: int) -> MeasurementGrid:
        return cls(spacing * np.arange(1, m + 1))

    @classmethod
    def from_lags(cls, lags: Sequence[float]) -> MeasurementGrid:
        return cls(np.cumsum(np.asarray(lags, dtype=float)))

    @property
    def m(self) -> int:
        return int(self.epochs.size)

    @property
    def lags(self) -> np.ndarray:
        return np.diff(self.epochs, prepend=0.0)

    @property
    def t_end(self) -> float:
        return float(self.epochs[-1])

    @property
    def tbar(self) -> float:
        """Mean lag ``T_m / m``."""
        return self.t_end / self.m

    @property
    def equal_spacing(self) -> bool:
        lags = self.lags
        return bool(np.max(np.abs(lags - lags[0])) <= 1e-9 * lags[0])

    @property
    def spacing(self) -> float | None:
        """Common lag ``l`` when equally spaced, otherwise ``None``."""
        return float(self.lags[0]) if self.equal_spacing else None

    def truncate(self, m: int) -> MeasurementGrid:
        return MeasurementGrid(self.epochs[:m])

    def same_pattern(self, other: MeasurementGrid) -> bool:
        return self.m == other.m and bool(np.allclose(self.lags, other.lags, rtol=1e-9, atol=0))


@dataclass(frozen=True)
class DegradationDataset:
    """Rectangular panel of ``n`` units measured on a common grid.

    ``increments[i, j]`` is the degradation gained by unit ``i`` between
    epochs ``j-1`` and ``j``; ``cumulative`` holds the running sums.
    """

    grid: MeasurementGrid
    increments: np.ndarray
    unit_ids: tuple = field(default=())

    def __post_init__(self):
        y = np.array(self.increments, dtype=float, ndmin=2)
        if y.ndim != 2:
            raise ShapeError("increments must be an n x m matrix")
        if y.shape[1] != self.grid.m:
            raise ShapeError(f"increments have {y.shape[1]} columns but the grid has {self.grid.m} epochs")
        bad = np.argwhere(~(y > 0) | ~np.isfinite(y))
        if bad.size:
            i, j = bad[0]
            raise ValidationError(
                f"increment of unit index {i} at epoch {self.grid.epochs[j]:g} is {y[i, j]!r}; "
                "gamma increments must be strictly positive"
            )
        y.setflags(write=False)
        object.__setattr__(self, "increments", y)
        ids = tuple(self.unit_ids) if self.unit_ids else tuple(str(i + 1) for i in range(y.shape[0]))
        if len(ids) != y.shape[0]:
            raise ShapeError("one unit id per row is required")
        object.__setattr__(self, "unit_ids", ids)

    @property
    def n(self) -> int:
        return int(self.increments.shape[0])

    @property
    def m(self) -> int:
        return self.grid.m

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.increments, axis=1)

    def truncate(self, m: int) -> DegradationDataset:
        """First ``m`` epochs only."""
        if not 1 <= m <= self.m:
            raise ShapeError(f"cannot truncate a {self.m}-epoch dataset to {m} epochs")
        return DegradationDataset(self.grid.truncate(m), self.increments[:, :m], self.unit_ids)

    def subset(self, units: Sequence[int]) -> DegradationDataset:
        units = list(units)
        return DegradationDataset(self.grid, self.increments[units], tuple(self.unit_ids[i] for i in units))


def increments_from_paths(paths, grid: MeasurementGrid, unit_ids: Sequence | None = None) -> DegradationDataset:
    """Difference cumulative degradation paths (``Y_i0 = 0``) into increments."""
    Y = np.array(paths, dtype=float, ndmin=2)
    if Y.shape[1] != grid.m:
        raise ShapeError(f"paths have {Y.shape[1]} values per unit but the grid has {grid.m} epochs")
    y = np.diff(Y, axis=1, prepend=0.0)
    ids = list(unit_ids) if unit_ids is not None else [str(i + 1) for i in range(Y.shape[0])]
    bad = np.argwhere(~(y > 0))
    if bad.size:
        i, j = bad[0]
        raise ValidationError(
            f"path of unit {ids[i]} is not strictly increasing at epoch {grid.epochs[j]:g} "
            f"(increment {y[i, j]:g})"
        )
    return DegradationDataset(grid, y, tuple(ids))


@dataclass(frozen=True)
class SufficientStats:
    ybar_a: float
    weighted_gmean: float
    per_unit_means: np.ndarray
    pooled_gmean: float
    log_weighted_gmean: float
    log_pooled_gmean: float


def sufficient_stats(data: DegradationDataset) -> SufficientStats:
    """Arithmetic mean, lag-weighted and pooled geometric means of the increments."""
    y = data.increments
    logy = np.log(y)
    lags = data.grid.lags
    log_wg = float(np.sum(logy * lags) / (data.n * data.grid.t_end))
    log_pg = float(np.mean(logy))
    return SufficientStats(
        ybar_a=float(np.mean(y)),
        weighted_gmean=float(np.exp(log_wg)),
        per_unit_means=y.mean(axis=1),
        pooled_gmean=float(np.exp(log_pg)),
        log_weighted_gmean=log_wg,
        log_pooled_gmean=log_pg,
    )


def read_long_csv(path: str | Path) -> DegradationDataset:
    """Read ``unit_id,time,value`` rows of cumulative degradation.

    Every unit must be measured at the same epochs.  Errors name the
    offending line number.
    """
    rows: dict[str, dict[float, float]] = {}
    order: list[str] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["unit_id", "time", "value"]:
            raise ValidationError(f"{path}: line 1: expected header 'unit_id,time,value'")
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) < 3:
                raise ValidationError(f"{path}: line {lineno}: expected 3 fields, got {len(rec)}")
            uid = rec[0].strip()
            try:
                t, v = float(rec[1]), float(rec[2])
            except ValueError:
                raise ValidationError(f"{path}: line {lineno}: non-numeric time or value") from None
            if not (np.isfinite(t) and np.isfinite(v)):
                raise ValidationError(f"{path}: line {lineno}: non-finite time or value")
            if uid not in rows:
                rows[uid] = {}
                order.append(uid)
            if t in rows[uid]:
                raise ValidationError(f"{path}: line {lineno}: duplicate time {t:g} for unit {uid}")
            rows[uid][t] = v
    if not order:
        raise ValidationError(f"{path}: no data rows")
    epochs = sorted(rows[order[0]])
    for uid in order:
        if sorted(rows[uid]) != epochs:
            raise ShapeError(f"{path}: unit {uid} is not measured at the same epochs as unit {order[0]}")
    grid = MeasurementGrid(np.array(epochs))
    paths = [[rows[uid][t] for t in epochs] for uid in order]
    return increments_from_paths(paths, grid, order)


def write_long_csv(data: DegradationDataset, path: str | Path, digits: int = 6) -> None:
    Y = data.cumulative
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["unit_id", "time", "value"])
        for i, uid in enumerate(data.unit_ids):
            for j, t in enumerate(data.grid.epochs):
                w.writerow([uid, f"{t:g}", f"{Y[i, j]:.{digits}f}"])
