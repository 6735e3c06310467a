"""Multifractal Detrended Fluctuation Analysis of a single series.

Pipeline: profile -> segment-wise polynomial detrending (segments taken from
both ends of the series) -> q-th order fluctuation functions F_q(n) ->
generalized Hurst exponents h(q) -> Legendre singularity spectrum f(alpha).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MfdfaConfig",
    "FluctuationSurface",
    "SingularitySpectrum",
    "default_q_grid",
    "default_scales",
    "profile",
    "segment_variances",
    "fluctuation",
    "fluctuation_surface",
    "hurst_exponents",
    "singularity_spectrum",
    "analyze",
    "average_spectra",
    "binomial_cascade",
]

F_TOL = 1e-6
ALPHA_TOL = 1e-6


def default_q_grid() -> np.ndarray:
    """Moment orders -4..4 in steps of 0.2, with q = 0 exactly representable."""
    return np.arange(-20, 21) * 0.2


def default_scales(n_length: int, min_scale: int = 16, n_scales: int = 20) -> np.ndarray:
    """Geometrically spaced integer segment lengths from min_scale to n_length/20."""
    max_scale = n_length // 20
    if max_scale <= min_scale:
        raise ValueError(
            f"series of length {n_length} too short for scales up to length/20 "
            f"with min scale {min_scale}"
        )
    grid = np.unique(np.rint(np.geomspace(min_scale, max_scale, n_scales)).astype(int))
    return grid


@dataclass
class MfdfaConfig:
    """Moment grid, detrending order, segment scales and the h(q) fit window.

    ``scale_grid`` may be None, in which case default_scales(len(series)) is
    used at analysis time.  ``fit_range`` is an inclusive (lo, hi) interval in
    scale units; None fits over every scale.
    """

    q_grid: np.ndarray = field(default_factory=default_q_grid)
    detrend_order: int = 2
    scale_grid: np.ndarray = None
    fit_range: tuple = None

    def __post_init__(self):
        q = np.array(self.q_grid, dtype=float)
        if q.ndim != 1 or q.size < 5:
            raise ValueError("q_grid must be a 1-D array of at least 5 moments")
        if (np.diff(q) <= 0).any():
            raise ValueError("q_grid must be strictly increasing")
        small = (np.abs(q) < 0.1) & (q != 0.0)
        if small.any():
            raise ValueError(
                "q values in (-0.1, 0.1) other than exactly 0 are not allowed "
                "(the generalized mean is ill-conditioned there)"
            )
        if self.detrend_order < 1:
            raise ValueError("detrend_order must be a positive integer")
        if self.scale_grid is not None:
            s = np.array(self.scale_grid, dtype=int)
            if s.ndim != 1 or s.size < 2:
                raise ValueError("scale_grid must be a 1-D array of segment lengths")
            if (np.diff(s) <= 0).any():
                raise ValueError("scales must be strictly increasing")
            if s[0] < self.detrend_order + 2:
                raise ValueError(
                    f"minimum scale {s[0]} must be >= detrend_order + 2 "
                    f"= {self.detrend_order + 2} for an over-determined fit"
                )
            self.scale_grid = s
        self.q_grid = q
        if self.fit_range is not None:
            lo, hi = self.fit_range
            if not lo < hi:
                raise ValueError("fit_range must be an increasing (lo, hi) pair")
            self.fit_range = (float(lo), float(hi))

    def resolved_scales(self, n_length: int) -> np.ndarray:
        scales = self.scale_grid if self.scale_grid is not None else default_scales(n_length)
        if scales[-1] > n_length // 4:
            raise ValueError(
                f"largest scale {scales[-1]} exceeds length/4 = {n_length // 4}; "
                "fewer than 4 segments give meaningless statistics"
            )
        return scales


@dataclass
class FluctuationSurface:
    """F_q(n) over the (q, scale) grid, with the per-q fit filled in later.

    values[iq, iscale] > 0 everywhere; rows are non-decreasing in q for fixed
    scale (generalized-mean monotonicity).  ``h`` and ``fit_residual`` are set
    by hurst_exponents.
    """

    q_grid: np.ndarray
    scales: np.ndarray
    values: np.ndarray
    h: np.ndarray = None
    fit_residual: np.ndarray = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.q_grid), len(self.scales)):
            raise ValueError("surface shape must be (len(q_grid), len(scales))")
        if not np.isfinite(v).all() or (v <= 0).any():
            raise ValueError("fluctuation surface must be finite and positive")
        if (np.diff(v, axis=0) < -1e-9 * v[:-1]).any():
            raise ValueError("F_q(n) must be non-decreasing in q for each scale")
        self.values = v

    def to_dict(self):
        return {
            "q_grid": self.q_grid.tolist(),
            "scales": self.scales.tolist(),
            "values": self.values.tolist(),
            "h": None if self.h is None else self.h.tolist(),
            "fit_residual": None if self.fit_residual is None else self.fit_residual.tolist(),
        }


@dataclass
class SingularitySpectrum:
    """Sampled q, h(q), alpha(q), f(alpha(q)) with the spectrum width.

    ``alpha_monotone`` and ``f_within_bound`` record whether alpha was
    non-increasing in q and f stayed at or below 1, each within tolerance.
    An exact Legendre spectrum satisfies both; small violations are fit noise
    (a locally rising h(q) estimate), reported as warnings rather than errors
    so noisy series still produce a usable diagnostic result.
    """

    q: np.ndarray
    h: np.ndarray
    alpha: np.ndarray
    f: np.ndarray
    width: float
    alpha_monotone: bool = True
    f_within_bound: bool = True

    def __post_init__(self):
        n = len(self.q)
        if not (len(self.h) == len(self.alpha) == len(self.f) == n):
            raise ValueError("q, h, alpha, f must have equal length")
        if abs(self.width - (self.alpha.max() - self.alpha.min())) > 1e-12:
            raise ValueError("width must equal max(alpha) - min(alpha)")

    def to_dict(self):
        return {
            "q": self.q.tolist(),
            "h": self.h.tolist(),
            "alpha": self.alpha.tolist(),
            "f": self.f.tolist(),
            "width": self.width,
            "alpha_monotone": self.alpha_monotone,
            "f_within_bound": self.f_within_bound,
        }


def profile(x) -> np.ndarray:
    """Cumulative sum of the mean-subtracted series (Y in the DFA literature)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("input must be a 1-D series of at least 2 points")
    if not np.isfinite(x).all():
        raise ValueError("input contains non-finite values")
    y = np.cumsum(x - x.mean())
    tol = 1e-8 * x.size * max(x.std(), 1e-300)
    if abs(y[-1]) > tol:
        raise ValueError("profile does not return to zero; numerical failure")
    return y


def segment_variances(y, n: int, l: int = 2) -> np.ndarray:
    """Detrended variances of all length-n segments, from both ends.

    The profile is cut into M = floor(len(y)/n) non-overlapping segments
    starting at the beginning and another M starting at the end, so a trailing
    remainder is never ignored entirely.  In each segment an order-l
    polynomial is removed and the variance uses divisor n.
    Returns the 2M variances, forward segments first.
    """
    y = np.asarray(y, dtype=float)
    if l < 1:
        raise ValueError("detrend order must be >= 1")
    if n <= l + 1:
        raise ValueError(
            f"scale {n} with detrend order {l} is under-determined; need n >= {l + 2}"
        )
    if n > y.size // 4:
        raise ValueError(f"scale {n} too large for series of length {y.size}; need >= 4 segments")
    m = y.size // n
    fwd = y[: m * n].reshape(m, n)
    bwd = y[y.size - m * n :].reshape(m, n)
    segments = np.vstack([fwd, bwd])

    # Detrend on centered coordinates for conditioning at large n.
    t = np.linspace(-1.0, 1.0, n)
    design = np.vander(t, l + 1, increasing=True)
    coef, _, _, _ = np.linalg.lstsq(design, segments.T, rcond=None)
    resid = segments - (design @ coef).T
    return (resid**2).mean(axis=1)


def fluctuation(variances, q: float) -> float:
    """q-th order fluctuation function of one scale's segment variances.

    The generalized mean {(1/2M) sum [F^2]^(q/2)}^(1/q); at q = 0 the
    logarithmic-mean limit exp{(1/4M) sum ln F^2} is used.
    """
    v = np.asarray(variances, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("variances must be a non-empty 1-D array")
    if (v < 0).any():
        raise ValueError("variances must be non-negative")
    if not (v > 0).any():
        raise ValueError("all segment variances are zero")
    if q <= 0 and (v == 0).any():
        raise ValueError(
            "zero segment variance makes the q <= 0 moment diverge; "
            "raise the minimum scale so every segment has signal"
        )
    if q == 0:
        return float(np.exp(0.5 * np.mean(np.log(v))))
    return float(np.mean(v ** (q / 2.0)) ** (1.0 / q))


def fluctuation_surface(x, cfg: MfdfaConfig = None) -> FluctuationSurface:
    """F_q(n) over the full (q, scale) grid for one series."""
    if cfg is None:
        cfg = MfdfaConfig()
    x = np.asarray(x, dtype=float)
    scales = cfg.resolved_scales(x.size)
    y = profile(x)
    values = np.empty((cfg.q_grid.size, scales.size))
    for j, n in enumerate(scales):
        v = segment_variances(y, int(n), cfg.detrend_order)
        for i, q in enumerate(cfg.q_grid):
            values[i, j] = fluctuation(v, float(q))
    return FluctuationSurface(q_grid=cfg.q_grid.copy(), scales=scales.copy(), values=values)


def hurst_exponents(surface: FluctuationSurface, cfg: MfdfaConfig = None) -> np.ndarray:
    """Per-q slope of ln F_q(n) vs ln n over the fit range; fills surface.h.

    The RMS of the fit residuals is stored alongside as a scaling-quality
    diagnostic: large values mean F_q(n) is not a clean power law there.
    """
    if cfg is None:
        cfg = MfdfaConfig()
    scales = surface.scales
    if cfg.fit_range is None:
        mask = np.ones(scales.size, dtype=bool)
    else:
        lo, hi = cfg.fit_range
        mask = (scales >= lo) & (scales <= hi)
    if mask.sum() < 5:
        raise ValueError("fit range must contain at least 5 scales")
    if not np.isfinite(surface.values).all():
        raise ValueError("fluctuation surface contains non-finite entries")
    ln_n = np.log(scales[mask].astype(float))
    h = np.empty(surface.q_grid.size)
    resid = np.empty(surface.q_grid.size)
    for i in range(surface.q_grid.size):
        ln_f = np.log(surface.values[i, mask])
        slope, intercept = np.polyfit(ln_n, ln_f, 1)
        h[i] = slope
        resid[i] = np.sqrt(np.mean((ln_f - (slope * ln_n + intercept)) ** 2))
    surface.h = h
    surface.fit_residual = resid
    return h


def singularity_spectrum(h, q_grid) -> SingularitySpectrum:
    """Legendre spectrum: alpha = h + q h'(q), f = q (alpha - h) + 1.

    h'(q) uses central finite differences, one-sided at the grid ends.
    """
    h = np.asarray(h, dtype=float)
    q = np.asarray(q_grid, dtype=float)
    if h.size != q.size:
        raise ValueError("h and q_grid must have equal length")
    if h.size < 5:
        raise ValueError("need h on at least 5 q points")
    dh = np.gradient(h, q)
    alpha = h + q * dh
    f = q * (alpha - h) + 1.0
    monotone = bool((np.diff(alpha) <= ALPHA_TOL).all())
    if not monotone:
        warnings.warn(
            "alpha(q) is not monotone non-increasing; the h(q) fit is noisy "
            "in part of the q range"
        )
    f_ok = bool((f <= 1.0 + F_TOL).all())
    if not f_ok:
        warnings.warn(
            f"f(alpha) exceeds 1 by up to {f.max() - 1.0:.2e}; the h(q) fit "
            "rises with q somewhere (fit noise)"
        )
    return SingularitySpectrum(
        q=q.copy(),
        h=h.copy(),
        alpha=alpha,
        f=f,
        width=float(alpha.max() - alpha.min()),
        alpha_monotone=monotone,
        f_within_bound=f_ok,
    )


def analyze(x, cfg: MfdfaConfig = None):
    """End-to-end MFDFA of one series: (FluctuationSurface, SingularitySpectrum)."""
    if cfg is None:
        cfg = MfdfaConfig()
    surface = fluctuation_surface(x, cfg)
    h = hurst_exponents(surface, cfg)
    return surface, singularity_spectrum(h, cfg.q_grid)


def average_spectra(spectra) -> SingularitySpectrum:
    """Average several singularity spectra parametrically at fixed q.

    alpha and f are averaged point by point over the shared q grid (not by
    resampling f as a function of alpha), so each moment order contributes one
    averaged (alpha, f) point.
    """
    spectra = list(spectra)
    if not spectra:
        raise ValueError("need at least one spectrum to average")
    q = spectra[0].q
    for s in spectra[1:]:
        if s.q.shape != q.shape or not np.allclose(s.q, q):
            raise ValueError("all spectra must share the same q grid")
    h = np.mean([s.h for s in spectra], axis=0)
    alpha = np.mean([s.alpha for s in spectra], axis=0)
    f = np.mean([s.f for s in spectra], axis=0)
    return SingularitySpectrum(
        q=q.copy(),
        h=h,
        alpha=alpha,
        f=f,
        width=float(alpha.max() - alpha.min()),
        alpha_monotone=bool((np.diff(alpha) <= ALPHA_TOL).all()),
        f_within_bound=bool((f <= 1.0 + F_TOL).all()),
    )


def binomial_cascade(p: float, n_levels: int) -> np.ndarray:
    """Deterministic binomial measure of length 2**n_levels.

    Entry k is p**(number of 1-bits of k) * (1-p)**(number of 0-bits); a
    standard multifractal benchmark whose h(q) is known in closed form:
    h(q) = 1/q - log2(p**q + (1-p)**q)/q.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    k = np.arange(2**n_levels, dtype=np.int64)
    bits = np.zeros(k.size, dtype=np.int64)
    for b in range(n_levels):
        bits += (k >> b) & 1
    return p**bits * (1.0 - p) ** (n_levels - bits)
