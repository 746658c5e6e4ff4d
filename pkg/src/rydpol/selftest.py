"""Quick end-to-end self-test on small grids: one line per check."""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import checks, manybody, regimes, schroedinger
from .params import (SystemParams, char_energy, char_momentum, params_for_strength,
                     polariton_mass, validate_interaction)
from .potential import ReducedPotential

MASS_FACTOR_ENV = "RYDPOL_SELFTEST_MASS_FACTOR"


def _check_weak():
    devs = [checks.weak_law_deviation(r, b)[2] for r in (0.05, 0.1) for b in ("repulsive", "attractive")]
    return max(devs) < 0.05, f"max deviation {max(devs):.3%} (limit 5%)"


def _check_strong():
    c = checks.strong_repulsion_coefficient(8.0)
    return abs(c / checks.STRONG_REPULSION_COEFF - 1) < 0.1, f"coefficient {c:.4f} vs 0.7 (limit 10%)"


def _check_zero_crossing():
    sc = schroedinger.scan_scattering_length(np.geomspace(0.05, 8, 80), "repulsive")
    ok = len(sc.zero_crossings) == 1 and not sc.divergences
    return ok, f"{len(sc.zero_crossings)} sign change(s), {len(sc.divergences)} divergence(s)"


def _check_bound_counts():
    n05 = len(schroedinger.bound_states_frozen(ReducedPotential.attractive(0.5)))
    n5 = len(schroedinger.bound_states_frozen(ReducedPotential.attractive(5.0)))
    e = schroedinger.bound_states_frozen(ReducedPotential.attractive(0.1))[0]
    shallow = -((math.pi / 3) ** 2) * 0.1**4
    ok = n05 == 1 and n5 == 2 and abs(e / shallow - 1) < 0.1
    return ok, f"counts {n05} (0.5), {n5} (5); shallow level {e:.4e} vs {shallow:.4e}"


def _check_delta(mass_factor):
    p = SystemParams(g=1.0, omega=1.0, delta=1.0, c=1.0, c6=-1.0)
    m_code = polariton_mass(p) * mass_factor
    m_ref = checks.mass_oracle(p)
    worst = 0.0
    for gc in (-0.05, 0.05):
        a = checks.narrow_well_contact(gc, m_code)
        expected = -2 / (m_ref * gc)
        worst = max(worst, abs(a / expected - 1))
        g_back = manybody.pseudo_coupling(a, m_code).g1d
        a2 = checks.narrow_well_contact(g_back, m_code)
        worst = max(worst, abs(a2 / a - 1))
    return worst < 0.01, f"max deviation {worst:.3%} (limit 1%)"


def _check_three_term():
    rng = np.random.default_rng(7)
    worst = 0.0
    for p in checks.random_lossless_params(rng, 5):
        K = rng.uniform(-0.5, 0.5) * char_momentum(p)
        w = rng.uniform(-0.5, 0.5) * char_energy(p)
        res, f = checks.three_term_residual(p, K, w)
        sat = regimes.chibar_full(p, w)
        worst = max(worst, res, abs(f.chibar / sat - 1))
    return worst < 1e-6, f"max residual {worst:.2e} (limit 1e-6)"


def _check_low_energy_convergence():
    p = SystemParams(g=3.0, omega=1.0, delta=2.0)
    e1 = max(checks.low_energy_errors(p, 0.01))
    e2 = max(checks.low_energy_errors(p, 0.005))
    return e2 < e1 and e1 / e2 > 1.8, f"errors {e1:.2e} -> {e2:.2e} on halving the margin"


def _check_far_detuned():
    p = SystemParams(g=3.0, omega=0.01, delta=1.0)
    e = max(checks.far_detuned_errors(p, 0.005, 0.005))
    return e < 0.005, f"max error {e:.3%} at margin 0.01 (limit 0.5%)"


def _check_solvers():
    worst, uni = 0.0, 0.0
    for r in (0.5, 1.0, 5.0):
        for sg in (1, -1):
            for k in (0.05, 0.3, 2.0):
                d, u = checks.phase_mismatch(r, sg, k)
                worst, uni = max(worst, d), max(uni, u)
    return worst < 1e-3 and uni < 1e-6, f"max phase difference {worst:.2e} rad, ||S|-1| {uni:.1e}"


def _check_adiabatic():
    ratios, _, _ = checks.adiabatic_improvement(SystemParams(g=3.0, omega=0.04, delta=1.0), 0.2, 0.1)
    return min(ratios) >= 3, "improvement factors " + ", ".join(f"{r:.2f}" for r in ratios)


def _check_zero_crossing_chi():
    p = SystemParams(g=2.0, omega=1.3, delta=1.3)
    chi = abs(regimes.chibar_full(p, 0.0))
    quad = []
    for om, d, c6, s in ((2.0, 1.0, 1.0, -1), (0.5, -1.0, 1.0, -1), (0.5, 1.0, 1.0, 1), (2.0, -1.0, 1.0, 1)):
        quad.append(validate_interaction(SystemParams(g=2.0, omega=om, delta=d, c6=c6), 0.0).s == s)
    return chi < 1e-12 and all(quad), f"|chibar| = {chi:.1e}, quadrants {sum(quad)}/4"


def _check_zeta():
    p = SystemParams(g=20.0, omega=0.5, delta=1.0)
    zs = [regimes.coeffs_exact(p, a * char_momentum(p), b * char_energy(p)).zeta
          for a in (-0.1, 0.05, 0.1) for b in (-0.1, 0.0, 0.1)]
    q = SystemParams(g=20.0, omega=0.05, delta=1.0)
    scan = [regimes.coeffs_exact(q, *regimes.from_reduced(q, k, 0.01)).zeta for k in (0.2, 0.5, 0.8, 0.95)]
    mono = all(b > a for a, b in zip(scan, scan[1:]))
    return max(zs) < 1e-2 and mono, f"max low-energy zeta {max(zs):.1e}; far-detuned scan monotone: {mono}"


def _check_group_velocity():
    p = params_for_strength(checks.far_detuned_template(), 0.5)
    ratio, n = checks.deepest_branch_velocity(p, 0.0)
    return ratio is not None and ratio > 1, f"xi/lambda=0.5 branch {n}: (d omega/dK)/v_g = {ratio:.4f}" if ratio is not None else "no branch"


def _check_refinement():
    g = schroedinger.DEFAULT_GRID
    rp = ReducedPotential.attractive(1.0)
    a1 = schroedinger.scattering_length(rp, g).a_reduced
    a2 = schroedinger.scattering_length(rp, g.halved()).a_reduced
    e1 = schroedinger.bound_states_frozen(rp, g)[0]
    e2 = schroedinger.bound_states_frozen(rp, g.halved())[0]
    d = max(abs(a2 / a1 - 1), abs(e2 / e1 - 1))
    return d < 1e-4, f"max relative change {d:.1e} on halving the step"


def run_checks(mass_factor=1.0):
    cases = [
        ("weak-coupling law", _check_weak),
        ("strong-repulsion law", _check_strong),
        ("single zero crossing", _check_zero_crossing),
        ("bound-state counts", _check_bound_counts),
        ("delta-potential oracle", lambda: _check_delta(mass_factor)),
        ("three-term pair propagator", _check_three_term),
        ("low-energy convergence", _check_low_energy_convergence),
        ("far-detuned coefficients", _check_far_detuned),
        ("ODE vs T-matrix", _check_solvers),
        ("adiabatic elimination", _check_adiabatic),
        ("chibar zero crossing and sign", _check_zero_crossing_chi),
        ("second-pole strength", _check_zeta),
        ("bound-branch group velocity", _check_group_velocity),
        ("grid refinement", _check_refinement),
    ]
    out = []
    for name, fn in cases:
        try:
            ok, msg = fn()
        except Exception as exc:  # report, don't abort the remaining checks
            ok, msg = False, f"error: {exc}"
        out.append((name, bool(ok), msg))
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="rydpol self-test")
    ap.add_argument("--mass-factor", type=float,
                    default=float(os.environ.get(MASS_FACTOR_ENV, "1.0")),
                    help="multiply the mass formula (mutation check)")
    args = ap.parse_args(argv)
    results = run_checks(args.mass_factor)
    for name, ok, msg in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {msg}")
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
