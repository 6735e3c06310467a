"""Eigensignals (principal-portfolio return series) and iterative removal of
collective modes by least-squares regression."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .panel import ReturnPanel, standardize
from .spectrum import EigenSpectrum, correlation_matrix, eigendecompose

__all__ = [
    "Eigensignal",
    "ResidualPanel",
    "eigensignals",
    "portfolio_return",
    "remove_mode",
    "remove_modes_iterative",
]

RISK_TOL = 1e-8
RESIDUAL_VAR_TOL = 1e-14
ORTHO_TOL = 1e-8


@dataclass
class Eigensignal:
    """Return series of the portfolio weighted by eigenvector x_i.

    ``index`` is the 1-based eigenvalue rank (1 = largest, the market mode).
    Population variance of the series equals the eigenvalue: holding this
    portfolio realizes exactly lambda_i of risk.
    """

    index: int
    series: np.ndarray
    eigenvalue: float

    def __post_init__(self):
        s = np.array(self.series, dtype=float)
        if s.ndim != 1:
            raise ValueError("eigensignal series must be one-dimensional")
        if self.index < 1:
            raise ValueError("eigensignal index is 1-based and must be >= 1")
        var = s.var()
        lam = float(self.eigenvalue)
        if lam > 1e-10:
            if abs(var - lam) / lam >= RISK_TOL:
                raise ValueError(
                    f"risk identity violated for mode {self.index}: "
                    f"var={var!r} vs eigenvalue={lam!r}"
                )
        elif var >= 1e-8:
            raise ValueError(f"mode {self.index} has near-zero eigenvalue but variance {var!r}")
        s.setflags(write=False)
        self.series = s
        self.eigenvalue = lam


@dataclass
class ResidualPanel:
    """Standardized residuals after one or more mode-removal passes.

    ``removed_modes`` lists the 1-based rank removed at each pass; ``alphas``
    and ``betas`` hold one coefficient array per pass, aligned with
    ``pass_assets`` (the asset list at the start of that pass).  Assets whose
    residual variance collapses to zero are dropped and recorded in
    ``dropped_assets``.
    """

    panel: ReturnPanel
    removed_modes: list
    alphas: list
    betas: list
    pass_assets: list
    dropped_assets: list

    def __post_init__(self):
        n_pass = len(self.removed_modes)
        if not (len(self.alphas) == len(self.betas) == len(self.pass_assets) == n_pass):
            raise ValueError("per-pass bookkeeping lists must have equal length")

    def to_dict(self):
        passes = []
        for m, a, b, names in zip(self.removed_modes, self.alphas, self.betas, self.pass_assets):
            passes.append(
                {
                    "mode": m,
                    "assets": list(names),
                    "alphas": np.asarray(a).tolist(),
                    "betas": np.asarray(b).tolist(),
                }
            )
        return {
            "removed_modes": list(self.removed_modes),
            "passes": passes,
            "dropped_assets": list(self.dropped_assets),
            "assets": list(self.panel.assets),
        }


def portfolio_return(r: ReturnPanel, weights) -> np.ndarray:
    """Return series of the portfolio with the given per-asset weights."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (r.n_assets,):
        raise ValueError(f"weights must have length {r.n_assets}, got shape {w.shape}")
    return w @ r.returns


def eigensignals(r: ReturnPanel, s: EigenSpectrum, indices) -> list:
    """Eigensignals z_i(j) = sum_k x_i^(k) g_k(j) for the requested 1-based ranks."""
    if not r.standardized:
        raise ValueError("eigensignals require a standardized panel")
    if s.n_series != r.n_assets:
        raise ValueError(
            f"spectrum is for {s.n_series} series but panel has {r.n_assets} assets"
        )
    out = []
    for i in indices:
        if not 1 <= i <= s.n_series:
            raise ValueError(f"mode index {i} outside 1..{s.n_series}")
        z = portfolio_return(r, s.eigenvectors[:, i - 1])
        out.append(Eigensignal(index=int(i), series=z, eigenvalue=float(s.eigenvalues[i - 1])))
    return out


def _regress_out(r: ReturnPanel, z: Eigensignal):
    """OLS of each asset row on (1, z); returns re-standardized residual panel
    plus the per-asset coefficients and the names of dropped assets."""
    series = z.series
    if series.shape != (r.t_length,):
        raise ValueError(
            f"eigensignal length {series.size} does not match panel length {r.t_length}"
        )
    z_var = series.var()
    if z_var < RESIDUAL_VAR_TOL:
        raise ValueError("zero-variance regressor: cannot remove a degenerate mode")
    z_mean = series.mean()
    zc = series - z_mean
    m = r.returns
    betas = (m @ zc) / (zc @ zc)
    alphas = m.mean(axis=1) - betas * z_mean
    resid = m - alphas[:, None] - betas[:, None] * series[None, :]

    res_var = resid.var(axis=1)
    keep = res_var >= RESIDUAL_VAR_TOL
    for name in np.asarray(r.assets)[~keep]:
        warnings.warn(f"asset {name} perfectly explained by removed mode; dropped")
    if not keep.any():
        raise ValueError("all assets perfectly explained by the removed mode")

    kept = resid[keep]
    dots = np.abs(kept @ series) / (r.t_length * np.sqrt(res_var[keep]) * np.sqrt(z_var))
    if dots.max() >= ORTHO_TOL:
        raise ValueError("residuals are not orthogonal to the removed mode within 1e-8")

    out = ReturnPanel(
        assets=[a for a, k in zip(r.assets, keep) if k],
        returns=kept / np.sqrt(res_var[keep])[:, None],
        standardized=True,
        bars_per_day=r.bars_per_day,
        dt_seconds=r.dt_seconds,
    )
    dropped = [a for a, k in zip(r.assets, keep) if not k]
    return out, alphas, betas, dropped


def remove_mode(r: ReturnPanel, z: Eigensignal) -> ResidualPanel:
    """Remove one eigensignal from every asset by OLS with intercept.

    Each row becomes the residual of g_k = alpha_k + beta_k z + eps_k,
    re-standardized so later correlation matrices keep unit diagonal.
    """
    out, alphas, betas, dropped = _regress_out(r, z)
    return ResidualPanel(
        panel=out,
        removed_modes=[z.index],
        alphas=[alphas],
        betas=[betas],
        pass_assets=[list(r.assets)],
        dropped_assets=dropped,
    )


def remove_modes_iterative(r: ReturnPanel, count: int, from_original: bool = False) -> ResidualPanel:
    """Run `count` removal passes, re-diagonalizing the residuals each time.

    By default each pass removes the *current* residual matrix's top mode
    (sequential reading of repeated removal).  With ``from_original=True`` the
    regressors are the original panel's eigensignals z_1..z_count instead.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    current = r if r.standardized else standardize(r)
    removed, alphas, betas, pass_assets, dropped = [], [], [], [], []

    if from_original:
        spec0 = eigendecompose(correlation_matrix(current))
        regressors = eigensignals(current, spec0, range(1, count + 1))

    for p in range(count):
        if from_original:
            z = regressors[p]
        else:
            spec = eigendecompose(correlation_matrix(current))
            (z,) = eigensignals(current, spec, [1])
            # Sequential passes always strip the current top mode; label it
            # with the pass rank so the record reads "modes 1..count removed".
            z = Eigensignal(index=p + 1, series=z.series, eigenvalue=z.eigenvalue)
        pass_assets.append(list(current.assets))
        current, a, b, d = _regress_out(current, z)
        removed.append(z.index)
        alphas.append(a)
        betas.append(b)
        dropped.extend(d)

    return ResidualPanel(
        panel=current,
        removed_modes=removed,
        alphas=alphas,
        betas=betas,
        pass_assets=pass_assets,
        dropped_assets=dropped,
    )
