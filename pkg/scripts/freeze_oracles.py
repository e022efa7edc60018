"""Independent reference values for the test suite.

Each value is computed here without importing latticetopo: defining
integrals, truncated or damped direct series, and mpmath where a series is
analytically continued. The output is written to tests/frozen_values.py;
rerun after changing a reference point:

    python3 scripts/freeze_oracles.py
"""
from __future__ import annotations

import os
import time

import mpmath as mp
import numpy as np
from scipy import integrate, special

mp.mp.dps = 30
SQRT3 = np.sqrt(3.0)
OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "frozen_values.py")


def richardson(eps, values):
    """Polynomial extrapolation to eps = 0 (values analytic in eps)."""
    eps = np.asarray(eps, dtype=float)
    return complex(np.linalg.solve(np.vander(eps, len(eps), increasing=True), np.asarray(values))[0])


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------


def e1_quadrature(z: complex) -> complex:
    # E1(z) = int_1^inf e^{-z t}/t dt, Re z > 0
    f_re = integrate.quad(lambda t: (np.exp(-z * t) / t).real, 1, np.inf, epsabs=1e-15, epsrel=1e-13, limit=400)[0]
    f_im = integrate.quad(lambda t: (np.exp(-z * t) / t).imag, 1, np.inf, epsabs=1e-15, epsrel=1e-13, limit=400)[0]
    return complex(f_re, f_im)


def erf_taylor(z: complex, terms: int = 60) -> complex:
    acc, term = 0j, complex(z)
    for n in range(terms):
        acc += term / (2 * n + 1)
        term *= -z * z / (n + 1)
    return 2 / np.sqrt(np.pi) * acc


def lerch_abel(z: complex, a: float) -> complex:
    # Phi(z r, 1, a) summed directly for r = 1 - h, extrapolated h -> 0
    hs = [0.02 / 2**i for i in range(6)]
    vals = []
    for h in hs:
        r = 1 - h
        n = np.arange(int(np.ceil(42 / h)))
        vals.append(np.sum((z * r) ** n / (n + a)))
    return richardson(hs, vals)


# ---------------------------------------------------------------------------
# Green's function and 1D lattice sums
# ---------------------------------------------------------------------------


def e1_imag_axis(y):
    # principal-branch E1(+-i y), y > 0, through the sine and cosine integrals
    si, ci = special.sici(y)
    return -ci + 1j * (si - np.pi / 2), -ci - 1j * (si - np.pi / 2)


def green_sici(r, alpha):
    k = 2 * np.pi * alpha
    ep, em = e1_imag_axis(k * r)
    near = 1 / (2 * np.pi**2 * r**2) - 1j * k / (4 * np.pi**2 * r) * (np.exp(1j * k * r) * ep - np.exp(-1j * k * r) * em)
    return near, k * np.exp(1j * k * r) / (2 * np.pi * r)


def scaled_exp1(w):
    # e^w E1(w): scipy's complex exp1 for |w| <= 40, asymptotic series beyond
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    small = np.abs(w) <= 40
    out[small] = np.exp(w[small]) * special.exp1(w[small])
    wb = w[~small]
    term, acc = 1 / wb, 1 / wb
    for m in range(1, 25):
        term = -term * m / wb
        acc = acc + term
    out[~small] = acc
    return out


def bracket_exp1(r, k):
    # E1-bracket part of G for complex k
    x = 1j * k * r
    return -1j * k / (4 * np.pi**2 * r) * (scaled_exp1(x) - scaled_exp1(-x))


def s1_direct(beta, delta, n_max=10**6):
    n = np.arange(-n_max, n_max + 1)
    part = np.sum(np.exp(-2j * np.pi * beta * n) / (2 * np.pi**2 * (n + delta) ** 2))
    # remaining |n| > N terms: |sum| <= 2 / (2 pi^2 N)
    return complex(part)


def s2_direct(alpha, beta, delta, n_max=2 * 10**6):
    n = np.arange(-n_max, n_max + 1)
    r = np.abs(n + delta)
    k = 2 * np.pi * alpha
    ep, em = e1_imag_axis(k * r)
    bracket = -1j * k / (4 * np.pi**2 * r) * (np.exp(1j * k * r) * ep - np.exp(-1j * k * r) * em)
    return complex(np.sum(bracket * np.exp(-2j * np.pi * beta * n)))


def far_damped(alpha, beta, delta, eps_seq):
    # sum_n alpha e^{2 pi i alpha |n + delta|}/|n + delta| e^{-2 pi i beta n - eps |n|}, extrapolated
    n_max = int(45 / min(eps_seq))
    n = np.arange(-n_max, n_max + 1)
    if delta is None:
        n = n[n != 0]
        r = np.abs(n).astype(float)
    else:
        r = np.abs(n + delta)
    terms = alpha * np.exp(2j * np.pi * alpha * r) / r * np.exp(-2j * np.pi * beta * n)
    return richardson(eps_seq, [np.sum(terms * np.exp(-e * np.abs(n))) for e in eps_seq])


def s_full_direct(alpha, beta, delta):
    # S+ (delta given) or S0 (delta None) at real alpha: near part summed absolutely, far part damped
    eps = [0.04 / 2**i for i in range(7)]
    n_max = 2 * 10**5
    n = np.arange(-n_max, n_max + 1)
    if delta is None:
        n = n[n != 0]
        r = np.abs(n).astype(float)
    else:
        r = np.abs(n + delta)
    near, _ = green_sici(r, alpha)
    return complex(np.sum(near * np.exp(-2j * np.pi * beta * n))) + far_damped(alpha, beta, delta, eps)


def s_complex_alpha(alpha, beta, delta, n_max=2 * 10**5):
    """S+ or S0 for complex alpha: near part directly, far part by mpmath's continued Lerch function."""
    k = 2 * np.pi * alpha
    n = np.arange(-n_max, n_max + 1)
    if delta is None:
        n = n[n != 0]
        r = np.abs(n).astype(float)
    else:
        r = np.abs(n + delta)
    near = np.sum((1 / (2 * np.pi**2 * r**2) + bracket_exp1(r, k)) * np.exp(-2j * np.pi * beta * n))
    al = mp.mpc(alpha)
    zr = mp.exp(2j * mp.pi * (al - beta))  # n >= 0 (or n >= 1) direction
    zl = mp.exp(2j * mp.pi * (al + beta))
    if delta is None:
        far = al * (zr * mp.lerchphi(zr, 1, 1) + zl * mp.lerchphi(zl, 1, 1))
    else:
        d = mp.mpf(delta)
        far = al * (mp.exp(2j * mp.pi * al * d) * mp.lerchphi(zr, 1, d)
                    + mp.exp(2j * mp.pi * al * (1 - d)) * mp.exp(2j * mp.pi * beta) * mp.lerchphi(zl, 1, 1 - d))
    return complex(near) + complex(far)


def bands_1d(alpha_a, alpha_b, kappa_a, kappa_b, delta, beta):
    """Both bands from a 2x2 eigensolve with oracle sums, evaluated at alpha_bar."""
    s = alpha_a + alpha_b
    al = s / 2 - 1j * np.pi * (kappa_a + kappa_b) * s**2 / 4
    sp = s_complex_alpha(al, beta, delta)
    sm = s_complex_alpha(al, -beta, delta)
    s0 = s_complex_alpha(al, beta, None)
    ka, kb = kappa_a, kappa_b
    g = np.sqrt(ka * kb)
    # H = [[alpha_A - kA (2 pi i al^2 + S0), -g S+], [-g S-, alpha_B - kB (2 pi i al^2 + S0)]]
    h = np.array([[alpha_a - ka * (2j * np.pi * al**2 + s0), -g * sp],
                  [-g * sm, alpha_b - kb * (2j * np.pi * al**2 + s0)]])
    ev = np.linalg.eigvals(h)
    return sorted(ev, key=lambda z: z.real, reverse=True), (sp, sm, s0)


# ---------------------------------------------------------------------------
# 2D lattice sums
# ---------------------------------------------------------------------------

A1 = np.array([SQRT3 / 2, -0.5])
A2 = np.array([-SQRT3 / 2, -0.5])
B1 = np.array([1 / SQRT3, 1.0])
B2 = np.array([1 / SQRT3, -1.0])
DELTA_VEC = np.array([-1 / SQRT3, 0.0])


def s2d_damped(alpha, u, v, offset):
    """Gaussian-damped real-space sum of G(|R + offset d|) e^{-2 pi i beta.R}, eps -> 0."""
    beta = u * B1 + v * B2
    gs = np.array([[i, j] for i in range(-6, 7) for j in range(-6, 7)]) @ np.stack([B1, B2])
    dist = np.min(np.abs(np.linalg.norm(gs + beta, axis=1) - alpha))
    eps = np.array([(np.pi * dist / r) ** 2 for r in (5, 6, 7, 8, 9, 10)])
    r_max = np.sqrt(40 / eps.min())
    m = int(r_max / (SQRT3 / 2)) + 2
    i, j = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1), indexing="ij")
    R = i.ravel()[:, None] * A1 + j.ravel()[:, None] * A2
    Rn = np.linalg.norm(R, axis=1)
    keep = Rn < r_max
    if offset == 0:
        keep &= Rn > 0
    R, Rn = R[keep], Rn[keep]
    r = np.linalg.norm(R + offset * DELTA_VEC, axis=1)
    ph = np.exp(-2j * np.pi * (R @ beta))
    near, far = green_sici(r, alpha)
    base = np.sum(near * ph)
    return richardson(eps, [base + np.sum(far * ph * np.exp(-e * Rn**2)) for e in eps])


def main():
    t0 = time.time()
    vals = {}
    vals["E1_1"] = e1_quadrature(1.0)
    for z in (0.5 + 2j, 3 - 4j, 0.01 + 0.02j):
        vals[f"E1_{z}"] = e1_quadrature(z)
    # quad loses accuracy once e^{-z t} is tiny; mpmath covers large |z| and the cut
    for z in (25 + 1j, 10j, -3 + 0.1j, -3 - 0.1j, 60 + 80j):
        vals[f"E1_{z}"] = complex(mp.e1(z))
    vals["erfc_1"] = 1 - erf_taylor(1.0)
    vals["erfc_(1+1j)"] = 1 - erf_taylor(1 + 1j)
    vals["theta3_0_0.1"] = 1 + 2 * 0.1 + 2 * 0.1**4 + 2 * 0.1**9
    vals["theta3_(0.3+0.2j)_0.4"] = complex(mp.jtheta(3, 0.3 + 0.2j, 0.4))
    vals["theta2_(0.3+0.2j)_0.4"] = complex(mp.jtheta(2, 0.3 + 0.2j, 0.4))
    vals["theta3_1.1_0.95"] = complex(mp.jtheta(3, 1.1, 0.95))
    z03 = np.exp(2j * np.pi * 0.3)
    vals["lerch_abel_0.3_1.5"] = lerch_abel(z03, 1.5)
    vals["lerch_mp_0.3_1.5"] = complex(mp.lerchphi(z03, 1, 1.5))
    vals["lerch_s2_0.5j_0.7"] = complex(mp.lerchphi(0.5j, 2, 0.7))
    z02 = np.exp(2j * np.pi * 0.2)
    vals["lerch_ds0_0.2_1.7"] = complex(mp.diff(lambda s: mp.lerchphi(z02, s, 1.7), 0))
    for z, a in ((np.exp(1.5 + 0.7j), 0.2), (np.exp(2.27 - 2.0j), 0.8), (-3.0 + 0.5j, 1.3)):
        vals[f"lerch1_{complex(z):.6f}_{a}"] = complex(mp.lerchphi(z, 1, a))
    near, far = green_sici(1.0, 2.4)
    vals["G_1_2.4"] = complex(near + far)
    vals["s1_0.25_0.2"] = s1_direct(0.25, 0.2)
    vals["s2_2.4_0.25_0.2"] = s2_direct(2.4, 0.25, 0.2)
    vals["s3_2.4_0.25_0.2"] = far_damped(2.4, 0.25, 0.2, [0.04 / 2**i for i in range(7)])
    vals["S+_2.4_0.25_0.2"] = s_full_direct(2.4, 0.25, 0.2)
    vals["S+_2.4_-0.25_0.2"] = s_full_direct(2.4, -0.25, 0.2)
    vals["S0_2.4_0.25"] = s_full_direct(2.4, 0.25, None)
    vals["S+_cplx_0.25_0.2"] = s_complex_alpha(2.4 - 0.3j, 0.25, 0.2)
    vals["S0_cplx_0.25"] = s_complex_alpha(2.4 - 0.3j, 0.25, None)
    (ap, am), _ = bands_1d(2.4, 2.4, 0.01, 0.01, 0.2, 0.25)
    vals["bands1d_0.2_0.25_plus"], vals["bands1d_0.2_0.25_minus"] = complex(ap), complex(am)
    (ap, am), _ = bands_1d(2.45, 2.4, 0.012, 0.01, 0.3, 0.1)
    vals["bands1d_asym_plus"], vals["bands1d_asym_minus"] = complex(ap), complex(am)
    vals["S2d+_2.4_0.2_0.1"] = s2d_damped(2.4, 0.2, 0.1, 1)
    vals["S2d0_2.4_0.2_0.1"] = s2d_damped(2.4, 0.2, 0.1, 0)
    vals["S2d-_2.4_0.2_0.1"] = s2d_damped(2.4, 0.2, 0.1, -1)

    lines = [
        '"""Reference values written by scripts/freeze_oracles.py; do not edit by hand."""',
        "",
        "FROZEN = {",
    ]
    lines += [f"    {k!r}: {complex(v)!r}," for k, v in vals.items()]
    lines += ["}", ""]
    with open(OUT, "w") as fh:
        fh.write("\n".join(lines))
    print(f"wrote {len(vals)} values to {os.path.normpath(OUT)} in {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
