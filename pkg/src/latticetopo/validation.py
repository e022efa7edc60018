"""Invariant suite behind `latticetopo validate`.

Each check returns a CheckResult; the suite stops at nothing, so a failing
check never hides the ones after it. Informational diagnostics are reported
with passed=None and do not affect the exit status.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bloch import FixedPoint, LatticeParams, alpha_bar, band_grid, bands, h_vectors
from .diracedge import (
    dirac_params_1d,
    dirac_params_2d,
    directional_fermi_velocity,
    edge_state_1d,
    localized_count_1d,
)
from .latsum1d import light_line_distance_1d, oracle_extrapolated_1d, s0_1d, s_pm_1d
from .latsum2d import (
    HONEYCOMB,
    ewald_realspace,
    ewald_reciprocal,
    oracle_direct_2d,
    s0_2d,
    s_pm_2d,
)
from .topology import chern_analytic, chern_numeric, winding_number

__all__ = ["CheckResult", "CHECKS", "run_checks", "BETA_SET_2D", "CHERN_POINTS"]

DEFAULT_1D = LatticeParams()
DEFAULT_2D = LatticeParams(dim=2)

# generic momenta in reduced coordinates, away from K, K' and M
BETA_SET_2D = [(0.1, 0.2), (0.3, 0.05), (0.25, 0.4), (0.45, 0.1), (0.05, 0.35), (0.2, 0.15)]
# (kappa_b, phi) samples of the Haldane phase diagram, each at least 1e-3 from a phase boundary
CHERN_POINTS = [(0.009, 1.2), (0.009, -1.2), (0.011, 2.0), (0.011, -2.0), (0.006, 1.0), (0.015, np.pi / 2)]
# at least 0.064 from the light circles |beta + G| = 2.4, where the damped sum is cheap
ORACLE_BETAS_2D = [(0.3, 0.3), (0.1, 0.2), (0.3, 0.15), (0.45, 0.45)]
SUBRADIANCE_FACTOR = 3.0  # pilot: the lower band's decay drops 3.95x at delta = 0.2
STABLE_ETAS = (0.1, 0.2, 0.3)
LITERAL_ETAS = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class CheckResult:
    module: str
    name: str
    passed: bool | None
    detail: str
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return {True: "PASS", False: "FAIL", None: "INFO"}[self.passed]


def _rng():
    return np.random.default_rng(20240611)


# ---------------------------------------------------------------------------
# latsum1d
# ---------------------------------------------------------------------------


def check_inversion_1d():
    rng = _rng()
    worst = 0.0
    for _ in range(50):
        a = rng.uniform(0.3, 2.8) + 1j * rng.uniform(-0.3, 0.0)
        b = rng.uniform(-0.5, 0.5)
        d = rng.uniform(0.05, 0.95)
        if light_line_distance_1d(a, b) < 1e-3:
            continue
        worst = max(worst, abs(s_pm_1d(a, b, d, 1) - s_pm_1d(a, -b, d, -1)))
    return worst < 1e-12, f"max |S+(b) - S-(-b)| = {worst:.3g}"


def check_periodicity_1d():
    rng = _rng()
    worst = 0.0
    for _ in range(20):
        a = rng.uniform(0.3, 2.8) + 1j * rng.uniform(-0.3, 0.0)
        b = rng.uniform(-0.5, 0.5)
        d = rng.uniform(0.05, 0.95)
        for sgn in (1, -1):
            worst = max(worst, abs(s_pm_1d(a, b + 1, d, sgn) - s_pm_1d(a, b, d, sgn)))
    return worst < 1e-12, f"max |S(b+1) - S(b)| = {worst:.3g}"


# every (alpha, +-beta) pair sits at least 0.07 from a light line
ORACLE_ALPHAS_1D = (0.35, 0.9, 1.9, 2.1, 2.4)
ORACLE_BETAS_1D = (-0.27, -0.23, 0.21, 0.27, 0.47)
ORACLE_DELTAS_1D = (0.1, 0.3, 0.5, 0.7, 0.9)


def oracle_grid_1d():
    """Worst absolute mismatch of S+, S-, S0 against the extrapolated oracle on the 5x5x5 grid."""
    worst, where = 0.0, None
    for a in ORACLE_ALPHAS_1D:
        for b in ORACLE_BETAS_1D:
            ref0 = oracle_extrapolated_1d(a, b, None)
            err0 = abs(s0_1d(a, b) - ref0) / max(1.0, abs(ref0))
            if err0 > worst:
                worst, where = err0, (a, b, None)
            for d in ORACLE_DELTAS_1D:
                for sgn in (1, -1):
                    ref = oracle_extrapolated_1d(a, sgn * b, d)
                    err = abs(s_pm_1d(a, b, d, sgn) - ref) / max(1.0, abs(ref))
                    if err > worst:
                        worst, where = err, (a, b, d)
    return worst, where


def check_oracle_1d():
    worst, where = oracle_grid_1d()
    return worst < 1e-6, f"max combined error {worst:.3g} at (alpha, beta, delta) = {where}"


def light_line_jump_1d(alpha: float = 2.4, h: float = 1e-3):
    """(jump of Im S0 across |beta| = alpha mod 1, Im variation over h on the subradiant side)."""
    b_ll = alpha - np.floor(alpha)
    inside = s0_1d(alpha, b_ll - h).imag
    outside = s0_1d(alpha, b_ll + h).imag
    further = s0_1d(alpha, b_ll + 2 * h).imag
    return abs(outside - inside), abs(further - outside)


def check_light_line_1d():
    jump, var = light_line_jump_1d()
    return jump > 10 * var, f"jump {jump:.4g} vs local variation {var:.3g}"


# ---------------------------------------------------------------------------
# latsum2d
# ---------------------------------------------------------------------------


def eta_spread_2d(etas, alpha=None):
    """Max relative spread of S+, S-, S0 across etas over BETA_SET_2D."""
    alpha = alpha_bar(DEFAULT_2D) if alpha is None else alpha
    betas = HONEYCOMB.to_cartesian(*np.array(BETA_SET_2D).T)
    worst = 0.0
    for fn in (lambda e: s_pm_2d(alpha, betas, 1, e), lambda e: s_pm_2d(alpha, betas, -1, e),
               lambda e: s0_2d(alpha, betas, e)):
        vals = np.array([fn(e) for e in etas])
        spread = np.max(np.abs(vals - vals[0]), axis=0) / np.abs(vals[0])
        worst = max(worst, float(np.max(spread)))
    return worst


def check_eta_stable():
    w = eta_spread_2d(STABLE_ETAS)
    return w < 1e-8, f"relative spread over eta {STABLE_ETAS}: {w:.3g}"


def check_eta_literal():
    w = eta_spread_2d(LITERAL_ETAS)
    return w < 1e-8, f"relative spread over eta {LITERAL_ETAS}: {w:.3g}"


def shell_ratios(alpha=None, beta=None, offset: int = 1, eta=None, max_shells: int = 14):
    """Successive shell increments of both Ewald parts, from shell 1 upwards."""
    alpha = alpha_bar(DEFAULT_2D) if alpha is None else alpha
    beta = HONEYCOMB.to_cartesian(0.13, 0.31) if beta is None else beta
    rs = np.array([ewald_realspace(alpha, beta, offset, eta, shells=n).value for n in range(1, max_shells)])
    rc = np.array([ewald_reciprocal(alpha, beta, offset, eta, shells=n).value for n in range(1, max_shells)])
    return np.abs(np.diff(rs)), np.abs(np.diff(rc)), abs(rs[-1] + rc[-1])


def _shell_worst(incs, scale, first_shell=4):
    # increments[i] is the contribution of shell i + 2; compare shells >= first_shell
    # while they are above the rounding floor
    worst = 0.0
    for i in range(first_shell - 2, len(incs) - 1):
        if incs[i] < 1e-13 * scale or incs[i + 1] < 1e-13 * scale:
            break
        worst = max(worst, incs[i + 1] / incs[i])
    return worst


def check_shell_convergence():
    worst = 0.0
    for offset in (0, 1):
        rs, rc, scale = shell_ratios(offset=offset)
        worst = max(worst, _shell_worst(rs, scale), _shell_worst(rc, scale))
    return worst < 0.1, f"max shell-to-shell contribution ratio (shells >= 4): {worst:.3g}"


def check_reflection_inversion_2d():
    a = alpha_bar(DEFAULT_2D)
    refl = inv = 0.0
    for u, v in BETA_SET_2D[:3]:
        b = HONEYCOMB.to_cartesian(u, v)
        bt = HONEYCOMB.to_cartesian(v, u)
        for sgn in (1, -1):
            refl = max(refl, abs(s_pm_2d(a, b, sgn) - s_pm_2d(a, bt, sgn)))
            inv = max(inv, abs(s_pm_2d(a, b, sgn) - s_pm_2d(a, -b, -sgn)))
    return max(refl, inv) < 1e-10, f"reflection {refl:.3g}, inversion {inv:.3g}"


def check_oracle_2d():
    a = 2.4
    worst = 0.0
    for u, v in ORACLE_BETAS_2D:
        b = HONEYCOMB.to_cartesian(u, v)
        for offset, fn in ((1, lambda: s_pm_2d(a, b, 1)), (0, lambda: s0_2d(a, b))):
            ref = oracle_direct_2d(a, b, offset)
            worst = max(worst, abs(fn() - ref) / max(1.0, abs(ref)))
    return worst < 1e-4, f"max combined error vs damped direct sum at alpha=2.4: {worst:.3g}"


# ---------------------------------------------------------------------------
# bloch
# ---------------------------------------------------------------------------


def subradiance_ratio_1d(params: LatticeParams = DEFAULT_1D, n: int = 200):
    """max |Im alpha| inside and outside the folded light cone |beta| < frac(Re alpha_bar).

    Returns {'both': (sup, sub), 'plus': (...), 'minus': (...)}. At alpha = 2.4 every
    beta keeps open diffraction orders; crossing |beta| = 0.4 closes one of them.
    """
    pts = band_grid(params, n)
    b_ll = alpha_bar(params).real % 1.0
    out = {}
    for key, get in (("plus", lambda p: abs(p.alpha_plus.imag)), ("minus", lambda p: abs(p.alpha_minus.imag)),
                     ("both", lambda p: max(abs(p.alpha_plus.imag), abs(p.alpha_minus.imag)))):
        sup = max(get(p) for p in pts if abs(p.beta) < b_ll)
        sub = max(get(p) for p in pts if abs(p.beta) >= b_ll)
        out[key] = (sup, sub)
    return out


def check_subradiance():
    r = subradiance_ratio_1d()
    sup, sub = r["both"]
    best = max(r["plus"][0] / r["plus"][1], r["minus"][0] / r["minus"][1])
    ok = sub < sup and best >= SUBRADIANCE_FACTOR
    return ok, (f"max |Im alpha| superradiant {sup:.4g} > subradiant {sub:.4g}; "
                f"largest per-band drop {best:.3g}x (need {SUBRADIANCE_FACTOR}x)")


def check_gap_closure_2d():
    p = bands(DEFAULT_2D, HONEYCOMB.K)
    g = bands(DEFAULT_2D, np.zeros(2))
    scale = abs(g.alpha_plus - g.alpha_minus) + abs(g.alpha_plus)
    gap = abs(p.alpha_plus - p.alpha_minus)
    return gap < 1e-8 * scale, f"|alpha+ - alpha-|(K) = {gap:.3g}, band scale {scale:.4g}"


def check_haldane_gap():
    out = []
    ok = True
    for phi in (np.pi / 2, 1.0, -2.0):
        p = DEFAULT_2D.replace(t2=5e-3, phi=phi)
        bp = bands(p, HONEYCOMB.K)
        gap = (bp.alpha_plus - bp.alpha_minus).real
        need = 2 * abs(3 * np.sqrt(3) * p.t2 * np.sin(phi)) - 1e-6
        ok &= abs(gap) >= need
        out.append(f"phi={phi:.3g}: {abs(gap):.6g} >= {need:.6g}")
    return ok, "; ".join(out)


def check_fixed_point():
    p = DEFAULT_1D
    worst = 0.0
    for b in (0.1, 0.45):
        lin = bands(p, b)
        fp = bands(p, b, refine=FixedPoint())
        worst = max(worst, abs(fp.alpha_plus - lin.alpha_plus), abs(fp.alpha_minus - lin.alpha_minus))
    bound = 10 * p.kappa_a * abs(alpha_bar(p))
    return worst < bound, f"max |refined - linearized| = {worst:.3g} < {bound:.3g}"


# ---------------------------------------------------------------------------
# topology
# ---------------------------------------------------------------------------


def check_winding_samples():
    out = []
    ok = True
    for d in (0.2, 0.8):
        nus = [winding_number(DEFAULT_1D.replace(delta=d), n).nu for n in (2000, 4000, 8000)]
        ok &= len(set(nus)) == 1
        out.append(f"delta={d}: {nus}")
    return ok, "; ".join(out)


def check_winding_jump():
    lo = winding_number(DEFAULT_1D.replace(delta=0.48)).nu
    hi = winding_number(DEFAULT_1D.replace(delta=0.52)).nu
    return abs(hi - lo) == 1, f"nu(0.48) = {lo}, nu(0.52) = {hi}"


def chern_cross_check(grid_n: int = 24):
    """Worst |numeric - analytic| over CHERN_POINTS and the analytic values."""
    worst, cs = 0.0, []
    for kb, phi in CHERN_POINTS:
        p = DEFAULT_2D.replace(kappa_b=kb, t2=5e-3, phi=phi)
        c = chern_analytic(p).c_analytic
        worst = max(worst, abs(chern_numeric(p, grid_n) - c))
        cs.append(c)
    return worst, cs


def check_chern():
    worst, cs = chern_cross_check()
    return worst < 1e-3, f"max |numeric - analytic| = {worst:.3g}; C = {cs}"


def min_r_ratio():
    r5 = winding_min_r(0.5)
    r4 = winding_min_r(0.4)
    return r5, r4


def winding_min_r(delta: float, n_samples: int = 2000) -> float:
    betas = 0.5 - np.arange(n_samples) / n_samples
    h = h_vectors(DEFAULT_1D.replace(delta=delta), betas)
    return float(np.min(np.abs(h[1] + 1j * h[2])))


def check_min_r():
    r5, r4 = min_r_ratio()
    return r5 < 1e-3 * r4, f"min|r|(0.5) = {r5:.3g}, min|r|(0.4) = {r4:.4g}"


# ---------------------------------------------------------------------------
# diracedge
# ---------------------------------------------------------------------------


def bulk_edge_1d(alpha_eval=None):
    """(localized solution count, |delta nu|) for the default domain wall."""
    st = edge_state_1d(DEFAULT_1D, alpha_eval=alpha_eval)
    nu_left = winding_number(DEFAULT_1D.replace(delta=0.48)).nu
    nu_right = winding_number(DEFAULT_1D.replace(delta=0.52)).nu
    return localized_count_1d(st), abs(nu_right - nu_left)


def check_bulk_edge():
    n, dnu = bulk_edge_1d()
    return n == dnu == 1, f"localized solutions {n}, |delta nu| = {dnu} (evaluated at alpha_bar)"


def info_bulk_edge_real():
    n, dnu = bulk_edge_1d(alpha_eval=2.4)
    return None, f"at real alpha_eval = 2.4: localized solutions {n}, |delta nu| = {dnu}"


def check_vf_stability():
    worst = 0.0
    for d in (0.3, 0.5, 0.7):
        dp = dirac_params_1d(DEFAULT_1D.replace(delta=d))
        worst = max(worst, abs(dp.v_f - dp.v_f_order2) / abs(dp.v_f))
    return worst < 1e-7, f"max relative order-2 vs order-4 difference {worst:.3g}"


def check_isotropy():
    d2 = dirac_params_2d(DEFAULT_2D)
    v = directional_fermi_velocity(DEFAULT_2D, np.radians([30.0, 90.0, 150.0]))
    spread = float(np.max(np.abs(v - d2.v_f)) / abs(d2.v_f))
    return spread < 1e-6, f"max relative deviation from v_F(q_x) = {spread:.3g}"


def check_k_kprime():
    d2 = dirac_params_2d(DEFAULT_2D)
    dv = abs(d2.v_f - d2.v_f_kprime)
    flip = abs(d2.jacobian_k[0, 1] + d2.jacobian_kprime[0, 1]) / abs(d2.v_f)
    return dv < 1e-8 and flip < 1e-6, f"|v_F(K) - v_F(K')| = {dv:.3g}; sigma_x coefficient sum / v_F = {flip:.3g}"


CHECKS: list[tuple[str, str, Callable]] = [
    ("latsum1d", "inversion S+(b) = S-(-b)", check_inversion_1d),
    ("latsum1d", "periodicity b -> b + 1", check_periodicity_1d),
    ("latsum1d", "oracle agreement 5x5x5", check_oracle_1d),
    ("latsum1d", "light-line Im discontinuity of S0", check_light_line_1d),
    ("latsum2d", "eta independence over {0.5, 1, 2}", check_eta_literal),
    ("latsum2d", "eta independence (stable window)", check_eta_stable),
    ("latsum2d", "exponential shell convergence", check_shell_convergence),
    ("latsum2d", "reflection and inversion", check_reflection_inversion_2d),
    ("latsum2d", "oracle agreement at 4 momenta", check_oracle_2d),
    ("bloch", "1D subradiance", check_subradiance),
    ("bloch", "gap closure at K (t2 = 0)", check_gap_closure_2d),
    ("bloch", "Haldane gap at K", check_haldane_gap),
    ("bloch", "fixed-point refinement O(kappa)", check_fixed_point),
    ("topology", "winding stable in n_samples", check_winding_samples),
    ("topology", "winding jumps by 1 across delta = 0.5", check_winding_jump),
    ("topology", "Chern numeric vs analytic", check_chern),
    ("topology", "min |r| collapses at delta = 0.5", check_min_r),
    ("diracedge", "bulk-edge correspondence (1D)", check_bulk_edge),
    ("diracedge", "bulk-edge at real evaluation energy", info_bulk_edge_real),
    ("diracedge", "v_F Richardson stability", check_vf_stability),
    ("diracedge", "Fermi-velocity isotropy", check_isotropy),
    ("diracedge", "K vs K' consistency", check_k_kprime),
]

def run_checks(only: str | None = None, report=None) -> list[CheckResult]:
    """Run the suite (or one module or check); report(result) is called after each check."""
    out = []
    for module, name, fn in CHECKS:
        if only and only not in (module, name):
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(module, name, None if passed is None else bool(passed), detail, time.perf_counter() - t0)
        out.append(res)
        if report is not None:
            report(res)
    return out
