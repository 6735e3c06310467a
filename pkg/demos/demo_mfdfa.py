"""MFDFA on a monofractal control and a multifractal cascade.

White noise is the monofractal control: h(q) should sit flat at 1/2 and the
singularity spectrum collapses toward a point.  A binomial multiplicative
cascade is exactly multifractal, with the closed form

    h(q) = 1/q - log2(p^q + (1-p)^q) / q,    width = log2((1-p)/p)

so the estimator can be checked against analytic values.

Run:  python3 demos/demo_mfdfa.py
"""

import numpy as np

from xcorr.mfdfa import analyze, binomial_cascade


def analytic_h(q, p):
    q = np.asarray(q, dtype=float)
    out = np.empty_like(q)
    nz = q != 0
    out[nz] = 1.0 / q[nz] - np.log2(p ** q[nz] + (1 - p) ** q[nz]) / q[nz]
    out[~nz] = -0.5 * (np.log2(p) + np.log2(1 - p))  # q -> 0 limit
    return out


def report(name, surface, spectrum, h_true=None):
    print(f"\n== {name} ==")
    print(f"{'q':>6}{'h(q)':>9}" + ("" if h_true is None else f"{'analytic':>10}"))
    for q in (-4.0, -2.0, 0.0, 2.0, 4.0):
        i = int(np.argmin(np.abs(surface.q_grid - q)))
        row = f"{q:>6.1f}{surface.h[i]:>9.3f}"
        if h_true is not None:
            row += f"{h_true[i]:>10.3f}"
        print(row)
    apex = spectrum.alpha[int(np.argmax(spectrum.f))]
    print(f"spectrum width: {spectrum.width:.3f}   apex alpha: {apex:.3f}   "
          f"f max: {spectrum.f.max():.3f}")
    print(f"alpha monotone: {spectrum.alpha_monotone}   "
          f"f within bound: {spectrum.f_within_bound}")


def main():
    rng = np.random.Generator(np.random.Philox(key=np.array([5, 0], dtype=np.uint64)))
    surface, spectrum = analyze(rng.standard_normal(32768))
    report("white noise (expect h = 0.5, near-zero width)", surface, spectrum)

    p = 0.3
    surface, spectrum = analyze(binomial_cascade(p, 15))
    report(f"binomial cascade p={p} (expect width {np.log2((1 - p) / p):.3f})",
           surface, spectrum, analytic_h(surface.q_grid, p))


if __name__ == "__main__":
    main()
