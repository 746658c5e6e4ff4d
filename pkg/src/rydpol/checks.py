"""Reusable numerical checks shared by the self-test and the test-suite.

Each function computes a measured quantity; callers compare it against a
threshold. Keeping the measurement here means the CLI self-test and the
pytest acceptance suite exercise exactly the same code paths.
"""
from __future__ import annotations

import math

import numpy as np

from . import regimes, schroedinger, tmatrix
from .params import SystemParams, char_energy, char_momentum
from .polariton_modes import chi_exact, fit_three_term, pair_poles
from .potential import ReducedPotential

STRONG_REPULSION_COEFF = 0.7
WEAK_COEFF = 3 / math.pi


def weak_law_deviation(ratio, branch):
    """Relative deviation of a/lambda_bar from -+(3/pi) lambda_bar/xi."""
    rp = ReducedPotential.repulsive(ratio) if branch == "repulsive" else ReducedPotential.attractive(ratio)
    a = schroedinger.scattering_length(rp).a_over_lambda
    expected = (-1 if branch == "repulsive" else 1) * WEAK_COEFF / ratio
    return a, expected, abs(a / expected - 1)


def strong_repulsion_coefficient(ratio, grid=schroedinger.DEFAULT_GRID):
    """a / (alpha m C6)^(1/4); in reduced units (alpha m C6)^(1/4) / xi = strength^(1/4)."""
    rp = ReducedPotential.repulsive(ratio)
    a = schroedinger.scattering_length(rp, grid).a_reduced
    return a / rp.strength**0.25


def narrow_well_contact(g_contact, m, width=None, grid=None):
    """Scattering length of a narrow Gaussian well of integrated strength
    ``g_contact`` for a particle pair of mass ``m`` (physical units).

    -psi''/m + V psi = 0 becomes -psi'' + m V psi = 0. The finite-width
    correction is of order m |g| width, so the default width shrinks with
    the coupling.
    """
    if width is None:
        width = min(0.002, 2e-4 / abs(m * g_contact))
    grid = grid or schroedinger.Grid(h=width / 50, u_max=max(40 * width, 0.05))
    norm = g_contact / (width * math.sqrt(2 * math.pi))

    def W(u):
        return m * norm * np.exp(-0.5 * (np.asarray(u) / width) ** 2)

    return schroedinger.scattering_length(W, grid).a_reduced


def random_lossless_params(rng, n):
    """Parameter sets with g >= 1.5 Omega and |delta| kept away from Omega."""
    out = []
    while len(out) < n:
        omega = 1.0
        g = rng.uniform(1.5, 6.0)
        d = rng.choice([-1, 1]) * math.exp(rng.uniform(math.log(0.15), math.log(6.0)))
        if 0.7 < abs(d) < 1.4:
            continue
        p = SystemParams(g=g, omega=omega, delta=d, c=rng.uniform(0.5, 2.0), c6=1.0)
        chi0 = regimes.chibar_full(p, 0.0)
        # choose |C6| so that xi = 1 and the potential is regular
        out.append(p.replace(c6=-np.sign(chi0) / abs(chi0)))
    return out


def three_term_residual(p: SystemParams, K, omega, n_q=80):
    """max |chi - fit| / (|chi| + |chibar|) on |q| xi <= 10, away from poles."""
    f = fit_three_term(p, K, omega)
    xi = abs(p.c6 * f.chibar) ** (1 / 6)
    q = np.linspace(0.0, 10.0 / xi, n_q)
    for xp in pair_poles(p, K, omega):
        if np.isreal(xp) and xp >= 0:
            q = q[np.abs(q - math.sqrt(xp)) > 0.02 * max(math.sqrt(xp), 1e-3 / xi)]
    chi = chi_exact(p, q, K, omega, eta=0.0)
    model = f.model(p, q)
    return float(np.max(np.abs(model - chi) / (np.abs(chi) + abs(f.chibar)))), f


def low_energy_errors(p: SystemParams, margin, direction=(1.0, 1.0)):
    """Relative errors of (chibar, alpha, wbar) of the low-energy forms at a
    point with |K|/q_c and |omega|/omega_c set by ``margin``; wbar is
    measured in units of omega_c."""
    K = direction[0] * margin * char_momentum(p)
    w = direction[1] * margin * char_energy(p)
    ex = regimes.coeffs_exact(p, K, w)
    lo = regimes.coeffs_low_energy(p, K, w)
    return (abs(lo.chibar / ex.chibar - 1), abs(lo.alpha / ex.alpha - 1),
            abs(lo.wbar - ex.wbar) / char_energy(p))


def far_detuned_errors(p: SystemParams, kappa, x):
    """Relative errors of (chibar, alpha, wbar) of the far-detuned forms;
    wbar is measured in units of 2 Omega^2 / |Delta|."""
    K, w = regimes.from_reduced(p, kappa, x)
    ex = regimes.coeffs_exact(p, K, w)
    fd = regimes.coeffs_far_detuned(p, K, w)
    scale = 2 * p.omega**2 / abs(p.delta)
    return (abs(fd.chibar / ex.chibar - 1), abs(fd.alpha / ex.alpha - 1),
            abs(fd.wbar - ex.wbar) / scale)


def phase_mismatch(ratio, sigma, k, grid=schroedinger.DEFAULT_GRID):
    rp = ReducedPotential(ratio * ratio, -1, sigma)
    po = schroedinger.phase_shift(rp, k, grid)
    sol = tmatrix.solve_t(rp, k * k)
    pt = tmatrix.onshell_phase(sol)
    d = (pt - po + math.pi / 2) % math.pi - math.pi / 2
    return abs(d), abs(abs(tmatrix.smatrix(sol)) - 1)


def adiabatic_improvement(template: SystemParams, kappa, x, r_coarse=0.04, r_fine=0.02):
    """Ratios err(coarse)/err(fine) for (alpha m, chibar, wbar m)."""
    d1 = regimes.adiabatic_discrepancy(template.replace(omega=r_coarse * abs(template.delta)), kappa, x)
    d2 = regimes.adiabatic_discrepancy(template.replace(omega=r_fine * abs(template.delta)), kappa, x)
    return tuple(a / b if b > 0 else math.inf for a, b in zip(d1, d2)), d1, d2


def far_detuned_template():
    """Far-detuned reference system used by the spectrum studies."""
    return SystemParams(g=10.0, omega=0.05, delta=1.0, c=1.0, c6=-1.0)


def deepest_branch_velocity(p: SystemParams, K=0.0):
    """(ratio of d omega/dK to v_g, branch index) for the lowest branch at K, or (None, None)."""
    from .params import group_velocity

    states = schroedinger.self_consistent_spectrum(p, K)
    if not states:
        return None, None
    n = states[0].n
    v = schroedinger.branch_group_velocity(p, K, n)
    if v is None:
        return None, n
    return v / group_velocity(p), n


def mass_oracle(p: SystemParams):
    """Independent evaluation of the relative-motion mass."""
    return (p.g**2 + p.omega**2) ** 3 / (2 * p.c**2 * p.g**2 * p.delta * p.omega**2)

