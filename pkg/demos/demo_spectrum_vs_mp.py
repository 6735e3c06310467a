"""Eigenvalue spectra of correlation matrices against the Marchenko-Pastur law.

Two synthetic markets with the same shape ratio Q = T/N:

  * an uncoupled one, whose spectrum should sit almost entirely inside the
    MP bulk [lambda_min, lambda_max], and
  * a one-factor market, where a single collective mode escapes far above
    lambda_max while the rest of the spectrum stays bulk-like.

Run:  python3 demos/demo_spectrum_vs_mp.py [--plot]
"""

import sys

import numpy as np

from xcorr.spectrum import correlation_matrix, eigendecompose, mp_bounds, overlap_fraction
from xcorr.synth import MarketModel, expected_lambda1, generate


def text_histogram(values, edges, width=50):
    counts, _ = np.histogram(values, bins=edges)
    peak = max(counts.max(), 1)
    lines = []
    for lo, hi, c in zip(edges[:-1], edges[1:], counts):
        bar = "#" * int(round(width * c / peak))
        lines.append(f"  {lo:6.2f} .. {hi:6.2f} | {bar} {c}")
    return "\n".join(lines)


def describe(name, panel, bounds):
    spectrum = eigendecompose(correlation_matrix(panel))
    lam = spectrum.eigenvalues
    print(f"\n== {name} (N={panel.n_assets}, T={panel.t_length}, Q={panel.t_length / panel.n_assets:.1f}) ==")
    print(f"MP bulk: [{bounds.lambda_min:.4f}, {bounds.lambda_max:.4f}]")
    print(f"largest eigenvalues: {np.array2string(lam[:5], precision=3)}")
    print(f"fraction of spectrum inside the bulk: {overlap_fraction(spectrum, bounds):.3f}")
    edges = np.linspace(0.0, max(bounds.lambda_max * 1.5, lam[0] * 1.05), 24)
    print(text_histogram(lam, edges))
    return lam


def main(plot=False):
    n, t = 100, 4000
    bounds = mp_bounds(t / n)

    null_panel = generate(MarketModel(n_assets=n, t_length=t, bars_per_day=100, seed=0))
    lam_null = describe("uncoupled market", null_panel, bounds)

    factor = MarketModel(n_assets=n, t_length=t, bars_per_day=100,
                         market_loading=0.4685, seed=0)
    factor_panel = generate(factor)
    lam_factor = describe("one-factor market", factor_panel, bounds)
    print(f"\npredicted market eigenvalue: {expected_lambda1(factor):.2f}"
          f"  measured: {lam_factor[0]:.2f}")

    if plot:
        try:
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not installed; skipping the figure")
            return
        grid = np.linspace(bounds.lambda_min + 1e-9, bounds.lambda_max - 1e-9, 400)
        q = t / n
        rho = q / (2 * np.pi) * np.sqrt(
            (bounds.lambda_max - grid) * (grid - bounds.lambda_min)) / grid
        fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
        for ax, lam, title in zip(axes, (lam_null, lam_factor),
                                  ("uncoupled", "one factor")):
            ax.hist(lam, bins=40, density=True, alpha=0.6, label="eigenvalues")
            ax.plot(grid, rho, "k-", label="MP density")
            ax.set_title(title)
            ax.set_xlabel("eigenvalue")
            ax.legend()
        axes[0].set_ylabel("density")
        fig.tight_layout()
        fig.savefig("spectrum_vs_mp.png", dpi=120)
        print("wrote spectrum_vs_mp.png")


if __name__ == "__main__":
    main(plot="--plot" in sys.argv[1:])
