"""Correlation matrices, their eigenspectra, Marchenko-Pastur bounds, and the
distribution of matrix elements."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .panel import ReturnPanel, standardize

__all__ = [
    "CorrelationMatrix",
    "EigenSpectrum",
    "MpBounds",
    "ElementDistribution",
    "correlation_matrix",
    "eigendecompose",
    "mp_bounds",
    "overlap_fraction",
    "element_distribution",
    "windowed_element_distribution",
]

SYM_TOL = 1e-12
DIAG_TOL = 1e-10
RANGE_TOL = 1e-10
TRACE_TOL = 1e-8
ORTHO_TOL = 1e-8


@dataclass
class CorrelationMatrix:
    """Symmetric N x N Pearson correlation matrix with unit diagonal."""

    values: np.ndarray
    n_series: int
    t_length: int

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"correlation matrix must be square, got shape {v.shape}")
        if v.shape[0] != self.n_series:
            raise ValueError("n_series does not match matrix dimension")
        if np.abs(v - v.T).max() >= SYM_TOL:
            raise ValueError("matrix is not symmetric within 1e-12")
        if np.abs(np.diag(v) - 1.0).max() >= DIAG_TOL:
            raise ValueError("diagonal entries must equal 1 within 1e-10")
        if v.min() < -1.0 - RANGE_TOL or v.max() > 1.0 + RANGE_TOL:
            raise ValueError("entries must lie in [-1, 1]")
        if abs(np.trace(v) - self.n_series) >= TRACE_TOL:
            raise ValueError("trace must equal N within 1e-8")
        if self.t_length < 2:
            raise ValueError("t_length must be at least 2")
        v.setflags(write=False)
        self.values = v

    @property
    def q(self):
        """Aspect ratio Q = T/N of the underlying data matrix."""
        return self.t_length / self.n_series

    def to_dict(self):
        return {
            "n_series": self.n_series,
            "t_length": self.t_length,
            "values_row_major": self.values.tolist(),
        }


@dataclass
class EigenSpectrum:
    """Descending eigenvalues with orthonormal eigenvectors (column i is x_i).

    The sign of each eigenvector is fixed so its largest-|component| entry is
    positive, making derived portfolio series reproducible.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_q: float

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=float)
        vecs = np.array(self.eigenvectors, dtype=float)
        n = vals.size
        if vecs.shape != (n, n):
            raise ValueError("eigenvector matrix must be N x N")
        if (np.diff(vals) > 0).any():
            raise ValueError("eigenvalues must be sorted in descending order")
        gram = vecs.T @ vecs
        if np.abs(gram - np.eye(n)).max() >= ORTHO_TOL:
            raise ValueError("eigenvectors are not orthonormal within 1e-8")
        lead = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(n)]
        if (lead < 0).any():
            raise ValueError("sign convention violated: leading component must be positive")
        if not self.source_q > 0:
            raise ValueError("source_q must be positive")
        vals.setflags(write=False)
        vecs.setflags(write=False)
        self.eigenvalues = vals
        self.eigenvectors = vecs
        self.source_q = float(self.source_q)

    @property
    def n_series(self):
        return self.eigenvalues.size

    def to_dict(self):
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors_row_major": self.eigenvectors.tolist(),
            "source_q": self.source_q,
        }


@dataclass
class MpBounds:
    """Support edges 1 + 1/Q +/- 2/sqrt(Q) of the random (Wishart) eigenvalue bulk."""

    q: float
    lambda_min: float
    lambda_max: float

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError(f"Q must be positive, got {self.q}")
        lo = 1.0 + 1.0 / self.q - 2.0 / math.sqrt(self.q)
        hi = 1.0 + 1.0 / self.q + 2.0 / math.sqrt(self.q)
        if abs(self.lambda_min - lo) > 1e-12 or abs(self.lambda_max - hi) > 1e-12:
            raise ValueError("bounds do not match the closed form for this Q")
        if self.lambda_min > self.lambda_max:
            raise ValueError("lambda_min exceeds lambda_max")

    @property
    def width(self):
        return self.lambda_max - self.lambda_min

    def to_dict(self):
        return {"q": self.q, "lambda_min": self.lambda_min, "lambda_max": self.lambda_max}


@dataclass
class ElementDistribution:
    """Histogram of off-diagonal correlation entries with a moment Gaussian fit.

    ``tail_deviation`` is the (empirical - fit) density at the bin holding the
    99th percentile of the entries, in units of the per-bin residual standard
    deviation. ``degenerate`` flags a zero-width distribution (fit undefined).
    """

    bin_edges: np.ndarray
    densities: np.ndarray
    gaussian_mu: float
    gaussian_sigma: float
    tail_deviation: float
    degenerate: bool
    n_entries: int

    def to_dict(self):
        return {
            "bin_edges": self.bin_edges.tolist(),
            "densities": self.densities.tolist(),
            "gaussian_mu": self.gaussian_mu,
            "gaussian_sigma": self.gaussian_sigma,
            "tail_deviation": self.tail_deviation,
            "degenerate": self.degenerate,
            "n_entries": self.n_entries,
        }


def correlation_matrix(r: ReturnPanel) -> CorrelationMatrix:
    """Pearson correlation matrix C = (1/T) M M^T of a standardized panel."""
    if not r.standardized:
        raise ValueError("correlation_matrix requires a standardized panel; call standardize() first")
    m = r.returns
    c = (m @ m.T) / r.t_length
    c = 0.5 * (c + c.T)
    # Normalizing by the realized row scales pins the diagonal at exactly 1;
    # for standardized rows this changes entries only at rounding level.
    d = np.sqrt(np.diag(c))
    c = c / np.outer(d, d)
    np.fill_diagonal(c, 1.0)
    return CorrelationMatrix(values=c, n_series=r.n_assets, t_length=r.t_length)


def eigendecompose(c: CorrelationMatrix) -> EigenSpectrum:
    """Full eigensystem of C, eigenvalues descending, signs fixed."""
    vals, vecs = np.linalg.eigh(c.values)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    n = vals.size
    lead = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(n)]
    vecs[:, lead < 0] *= -1.0
    spectrum = EigenSpectrum(eigenvalues=vals, eigenvectors=vecs, source_q=c.t_length / c.n_series)
    recon = (vecs * vals) @ vecs.T
    if np.abs(recon - c.values).max() >= 1e-8:
        raise ValueError("eigendecomposition failed to reconstruct the matrix within 1e-8")
    if abs(vals.sum() - n) >= TRACE_TOL:
        raise ValueError("eigenvalue sum does not conserve the trace within 1e-8")
    return spectrum


def mp_bounds(q: float) -> MpBounds:
    """Closed-form bulk edges for aspect ratio Q = T/N."""
    if not q > 0:
        raise ValueError(f"Q must be positive, got {q}")
    q = float(q)
    return MpBounds(
        q=q,
        lambda_min=1.0 + 1.0 / q - 2.0 / math.sqrt(q),
        lambda_max=1.0 + 1.0 / q + 2.0 / math.sqrt(q),
    )


def overlap_fraction(s: EigenSpectrum, b: MpBounds) -> float:
    """Fraction of eigenvalues inside [lambda_min, lambda_max]."""
    inside = (s.eigenvalues >= b.lambda_min) & (s.eigenvalues <= b.lambda_max)
    return float(inside.mean())


def _distribution_from_entries(entries: np.ndarray, n_bins: int) -> ElementDistribution:
    if n_bins < 10:
        raise ValueError(f"need at least 10 bins, got {n_bins}")
    densities, edges = np.histogram(entries, bins=n_bins, density=True)
    mu = float(entries.mean())
    sigma = float(entries.std())
    if sigma == 0.0:
        return ElementDistribution(
            bin_edges=edges,
            densities=densities,
            gaussian_mu=mu,
            gaussian_sigma=0.0,
            tail_deviation=float("nan"),
            degenerate=True,
            n_entries=entries.size,
        )
    centers = 0.5 * (edges[:-1] + edges[1:])
    fit = np.exp(-0.5 * ((centers - mu) / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))
    resid = densities - fit
    sigma_resid = float(resid.std())
    p99 = float(np.quantile(entries, 0.99))
    idx = int(np.clip(np.searchsorted(edges, p99, side="right") - 1, 0, n_bins - 1))
    tail = float(resid[idx] / sigma_resid) if sigma_resid > 0 else 0.0
    return ElementDistribution(
        bin_edges=edges,
        densities=densities,
        gaussian_mu=mu,
        gaussian_sigma=sigma,
        tail_deviation=tail,
        degenerate=False,
        n_entries=entries.size,
    )


def element_distribution(c: CorrelationMatrix, n_bins: int = 50) -> ElementDistribution:
    """Unit-area histogram of the off-diagonal entries, each pair counted once."""
    if c.n_series < 3:
        raise ValueError("need at least 3 series for a meaningful element distribution")
    entries = c.values[np.triu_indices(c.n_series, k=1)]
    return _distribution_from_entries(entries, n_bins)


def windowed_element_distribution(
    r: ReturnPanel, q_target: float, n_bins: int = 50
) -> ElementDistribution:
    """Pooled off-diagonal entries from non-overlapping windows of length ~q_target*N.

    Each window is standardized on its own before its correlation matrix is
    built, so short-window sampling noise enters exactly as it would for a
    panel recorded at that aspect ratio.
    """
    if not q_target > 0:
        raise ValueError("q_target must be positive")
    n = r.n_assets
    window = int(round(q_target * n))
    if window < 2:
        raise ValueError(f"window length {window} is too short")
    n_windows = r.t_length // window
    if n_windows < 1:
        raise ValueError(
            f"panel of length {r.t_length} holds no full window of length {window} "
            f"(q_target={q_target}, N={n})"
        )
    pooled = []
    iu = np.triu_indices(n, k=1)
    for w in range(n_windows):
        chunk = ReturnPanel(
            assets=r.assets,
            returns=r.returns[:, w * window : (w + 1) * window],
            standardized=False,
            bars_per_day=r.bars_per_day,
            dt_seconds=r.dt_seconds,
        )
        c = correlation_matrix(standardize(chunk))
        pooled.append(c.values[iu])
    if n < 3:
        raise ValueError("need at least 3 series for a meaningful element distribution")
    return _distribution_from_entries(np.concatenate(pooled), n_bins)
