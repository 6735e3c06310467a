"""Surrogate panels that selectively destroy or preserve correlation structure.

Six kinds: free and day-restricted circular rotations, sign and magnitude
reshuffles, and the deterministic sign-only / magnitude-only panels.  All
randomized kinds draw from one counter-based stream per row (stream id = row
index), so results are reproducible and independent of evaluation order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .panel import ReturnPanel, decompose, standardize

__all__ = [
    "KINDS",
    "SurrogateSpec",
    "rotate_free",
    "rotate_daily",
    "shuffle_signs",
    "shuffle_magnitudes",
    "signs_only",
    "magnitudes_only",
    "apply_surrogate",
]

KINDS = (
    "rotate_free",
    "rotate_daily",
    "shuffle_signs",
    "shuffle_magnitudes",
    "signs_only",
    "magnitudes_only",
)


@dataclass
class SurrogateSpec:
    """Which randomization to apply and with which seed.

    ``seed`` is ignored by the two deterministic kinds but kept so every spec
    round-trips through config files unchanged.
    """

    kind: str
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown surrogate kind {self.kind!r}; choose one of {KINDS}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        self.seed = int(self.seed)

    def to_dict(self):
        return {"kind": self.kind, "seed": self.seed}


def _row_rng(seed, row):
    """Independent deterministic stream for one row: Philox keyed (seed, row)."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, row], dtype=np.uint64)))


def rotate_free(r: ReturnPanel, seed) -> ReturnPanel:
    """Cyclically shift each row by an independent uniform offset in [0, T).

    Rotation preserves each row's value multiset and (up to wrap-around) its
    autocorrelation, but decouples the rows from each other.
    """
    t = r.t_length
    rows = np.empty_like(r.returns)
    for i in range(r.n_assets):
        offset = int(_row_rng(seed, i).integers(0, t))
        rows[i] = np.roll(r.returns[i], offset)
    return ReturnPanel(
        assets=list(r.assets),
        returns=rows,
        standardized=r.standardized,
        bars_per_day=r.bars_per_day,
        dt_seconds=r.dt_seconds,
    )


def rotate_daily(r: ReturnPanel, seed) -> ReturnPanel:
    """Like rotate_free but offsets are whole trading days.

    Day-periodic structure (shared intraday activity patterns) survives this
    rotation.  A trailing partial day is trimmed with a warning; the trimmed
    panel is no longer exactly standardized, so the flag is cleared in that
    case and the caller should re-standardize.
    """
    bpd = r.bars_per_day
    if bpd <= 0:
        raise ValueError("bars_per_day must be positive")
    t = r.t_length
    returns = r.returns
    standardized = r.standardized
    if t % bpd:
        keep = (t // bpd) * bpd
        warnings.warn(f"trimming trailing partial day: {t - keep} of {t} bars dropped")
        returns = returns[:, :keep]
        t = keep
        standardized = False
    n_days = t // bpd
    rows = np.empty((r.n_assets, t))
    for i in range(r.n_assets):
        offset = int(_row_rng(seed, i).integers(0, n_days)) * bpd
        rows[i] = np.roll(returns[i], offset)
    return ReturnPanel(
        assets=list(r.assets),
        returns=rows,
        standardized=standardized,
        bars_per_day=bpd,
        dt_seconds=r.dt_seconds,
    )


def shuffle_signs(r: ReturnPanel, seed) -> ReturnPanel:
    """Permute each row's sign sequence; magnitudes stay in place.

    Zero returns carry sign 0 and take part in the permutation like any other
    value.  The output is generally no longer standardized.
    """
    sm = decompose(r)
    rows = np.empty_like(r.returns)
    for i in range(r.n_assets):
        perm = _row_rng(seed, i).permutation(r.t_length)
        rows[i] = sm.signs[i][perm] * sm.magnitudes[i]
    return ReturnPanel(
        assets=list(r.assets),
        returns=rows,
        standardized=False,
        bars_per_day=r.bars_per_day,
        dt_seconds=r.dt_seconds,
    )


def shuffle_magnitudes(r: ReturnPanel, seed) -> ReturnPanel:
    """Permute each row's magnitude sequence; signs stay in place."""
    sm = decompose(r)
    rows = np.empty_like(r.returns)
    for i in range(r.n_assets):
        perm = _row_rng(seed, i).permutation(r.t_length)
        rows[i] = sm.signs[i] * sm.magnitudes[i][perm]
    return ReturnPanel(
        assets=list(r.assets),
        returns=rows,
        standardized=False,
        bars_per_day=r.bars_per_day,
        dt_seconds=r.dt_seconds,
    )


def _replace_rows(r: ReturnPanel, rows: np.ndarray, what: str) -> ReturnPanel:
    """Standardize replacement rows, dropping zero-variance ones with a warning."""
    variances = rows.var(axis=1)
    keep = variances > 0.0
    for name in [a for a, k in zip(r.assets, keep) if not k]:
        warnings.warn(f"asset {name} has constant {what}; dropped")
    if not keep.any():
        raise ValueError(f"every asset has a constant {what} series")
    panel = ReturnPanel(
        assets=[a for a, k in zip(r.assets, keep) if k],
        returns=rows[keep],
        standardized=False,
        bars_per_day=r.bars_per_day,
        dt_seconds=r.dt_seconds,
    )
    return standardize(panel)


def signs_only(r: ReturnPanel) -> ReturnPanel:
    """Replace each row by its standardized sign series (deterministic)."""
    return _replace_rows(r, np.sign(r.returns), "sign")


def magnitudes_only(r: ReturnPanel) -> ReturnPanel:
    """Replace each row by its standardized magnitude series (deterministic)."""
    return _replace_rows(r, np.abs(r.returns), "magnitude")


def apply_surrogate(r: ReturnPanel, spec: SurrogateSpec) -> ReturnPanel:
    """Dispatch on spec.kind; the single entry point used by the CLI."""
    if spec.kind == "rotate_free":
        return rotate_free(r, spec.seed)
    if spec.kind == "rotate_daily":
        return rotate_daily(r, spec.seed)
    if spec.kind == "shuffle_signs":
        return shuffle_signs(r, spec.seed)
    if spec.kind == "shuffle_magnitudes":
        return shuffle_magnitudes(r, spec.seed)
    if spec.kind == "signs_only":
        return signs_only(r)
    return magnitudes_only(r)
