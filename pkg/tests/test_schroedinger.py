import math

import numpy as np
import pytest
from scipy import integrate
from scipy.linalg import eigh_tridiagonal

from rydpol.checks import far_detuned_template, narrow_well_contact
from rydpol.manybody import pseudo_coupling
from rydpol.params import SystemParams, char_energy, derive_scales, params_for_strength, polariton_mass
from rydpol.potential import ReducedPotential
from rydpol.schroedinger import (DEFAULT_GRID, ConvergenceError, Grid, SelfConsistentProblem,
                                 bound_state_energy, bound_states_frozen, continued_a1d_weak,
                                 continuum_edge, count_bound, phase_shift, scan_scattering_length,
                                 scattering_length, self_consistent_spectrum, solve_radial)


# ---------------------------------------------------------------- oracles

def fd_levels(w, h=4e-3, L=40.0):
    """Even bound states of -psi'' + W psi from a dense tridiagonal matrix
    on cell centres (Neumann at 0 via a mirrored ghost point, Dirichlet at L)."""
    u = (np.arange(int(L / h)) + 0.5) * h
    d = 2.0 / h**2 + w(u)
    d[0] -= 1.0 / h**2
    e = -np.ones(len(u) - 1) / h**2
    vals, vecs = eigh_tridiagonal(d, e, select="v", select_range=(w(0.0) - 1, 0.0))
    return vals, vecs


def ivp_scattering_length(w, U=300.0):
    """Zero-energy solution by adaptive Runge-Kutta; a = u - psi/psi' far out,
    with the leading u^-6 tail contribution removed analytically."""
    sol = integrate.solve_ivp(lambda u, y: [y[1], w(u) * y[0]], (0, U), [1.0, 0.0],
                              method="DOP853", rtol=1e-12, atol=1e-14)
    psi, dpsi = sol.y[:, -1]
    return U - psi / dpsi


# ---------------------------------------------------------------- scattering length

@pytest.mark.parametrize("ratio, branch", [(0.1, "repulsive"), (0.1, "attractive")])
def test_weak_coupling_law(ratio, branch):
    rp = ReducedPotential.repulsive(ratio) if branch == "repulsive" else ReducedPotential.attractive(ratio)
    a = scattering_length(rp).a_over_lambda
    expected = (-1 if branch == "repulsive" else 1) * 3 / math.pi / ratio
    assert a == pytest.approx(expected, rel=0.05)


@pytest.mark.parametrize("rp", [ReducedPotential.repulsive(0.5), ReducedPotential.repulsive(3.0),
                                ReducedPotential.attractive(2.0), ReducedPotential.attractive(0.7)])
def test_scattering_length_against_ivp(rp):
    a = scattering_length(rp).a_reduced
    assert a == pytest.approx(ivp_scattering_length(rp), rel=2e-5)




def test_grid_halving():
    for rp in (ReducedPotential.repulsive(2.0), ReducedPotential.attractive(0.5)):
        a1 = scattering_length(rp, Grid()).a_reduced
        a2 = scattering_length(rp, Grid().halved()).a_reduced
        assert abs(a2 / a1 - 1) < 1e-4


def test_contact_convention():
    # a = -2 hbar^2 / (m g) for a narrow well of integrated strength g
    for g, m in [(0.4, 1.0), (-0.3, 2.5), (2.0, 0.7)]:
        a = narrow_well_contact(g, m)
        assert a == pytest.approx(-2 / (m * g), rel=1e-2)
        assert pseudo_coupling(a, m).g1d == pytest.approx(g, rel=1e-2)


def test_unconverged_matching_radius():
    with pytest.raises(ConvergenceError):
        scattering_length(ReducedPotential.attractive(2.0), Grid(h=1e-3, u_max=1.2))


def test_radial_solution_normalised():
    sol = solve_radial(ReducedPotential.attractive(1.0))
    assert np.max(np.abs(sol.psi)) == pytest.approx(1.0)
    assert (sol.psi[1] - sol.psi[0]) / DEFAULT_GRID.h == pytest.approx(0.0, abs=1e-3)


# ---------------------------------------------------------------- phase shifts

def test_free_phase_is_zero():
    k = np.array([0.05, 0.5, 2.0])
    # only the integrator's truncation error remains
    assert np.max(np.abs(phase_shift(lambda u: 0.0 * u, k))) < 1e-7


def test_low_k_limit():
    for rp in (ReducedPotential.repulsive(1.0), ReducedPotential.attractive(0.5)):
        a = scattering_length(rp).a_reduced
        k = 1e-3
        phi = phase_shift(rp, k, Grid(h=1e-3, u_max=200))
        assert k * math.tan(phi) == pytest.approx(1 / a, rel=0.02)


def test_born_limit_and_odd_in_sign():
    S = 1e-3
    for k in (0.2, 1.0):
        plus = phase_shift(ReducedPotential(S, -1, -1), k)
        minus = phase_shift(ReducedPotential(S, -1, 1), k)
        # first Born: phi = -(1/k) int_0^inf W cos^2(ku) du
        born, _ = integrate.quad(lambda u: ReducedPotential(S, -1, -1)(u) * math.cos(k * u) ** 2, 0, np.inf,
                                 limit=400)
        assert plus == pytest.approx(-born / k, rel=0.02)
        assert abs(plus + minus) < 0.02 * abs(plus)


def test_phase_continuous_in_k():
    k = np.linspace(0.05, 3.0, 60)
    phi = phase_shift(ReducedPotential.attractive(3.0), k)
    assert np.max(np.abs(np.diff(phi))) < 0.5


# ---------------------------------------------------------------- bound states

@pytest.mark.parametrize("ratio", [0.5, 1.7, 5.0])
def test_bound_states_against_fd(ratio):
    rp = ReducedPotential.attractive(ratio)
    got = bound_states_frozen(rp)
    vals, vecs = fd_levels(rp)
    vals = vals[vals < -1e-3]
    assert len(got) == len(vals)
    assert np.allclose(got, vals, rtol=2e-4, atol=1e-5)
    for n in range(len(vals)):
        v = vecs[:, n]
        v = v[np.abs(v) > 1e-8 * np.max(np.abs(v))]
        assert np.count_nonzero(np.diff(np.sign(v))) == n


def test_counts_pinned():
    assert len(bound_states_frozen(ReducedPotential.attractive(0.5))) == 1
    assert len(bound_states_frozen(ReducedPotential.attractive(5.0))) == 2
    # reduced energies at strength 25, checked against the dense FD oracle
    assert bound_states_frozen(ReducedPotential.attractive(5.0)) == pytest.approx([-22.6938, -8.7531], abs=2e-3)


def test_shallow_state():
    eps = bound_states_frozen(ReducedPotential.attractive(0.1))
    assert len(eps) == 1
    assert eps[0] == pytest.approx(-(math.pi / 3) ** 2 * 0.1**4, rel=0.1)


def test_node_theorem_on_strength_grid():
    prev = 0
    for r in np.linspace(0.2, 8.0, 40):
        rp = ReducedPotential.attractive(r)
        psi = solve_radial(rp).psi
        nodes = np.count_nonzero(np.diff(np.sign(psi[np.abs(psi) > 0])))
        n = len(bound_states_frozen(rp))
        assert n == nodes
        assert n >= prev
        prev = n
        assert count_bound(rp) == n


def test_levels_ordered():
    eps = bound_states_frozen(ReducedPotential.attractive(8.0))
    assert len(eps) == 4 and np.all(np.diff(eps) > 0)
    assert bound_state_energy(ReducedPotential.attractive(8.0), 9) is None


def test_repulsive_has_no_bound_states():
    assert bound_states_frozen(ReducedPotential.repulsive(5.0)) == []


# ---------------------------------------------------------------- scans

def test_attractive_scan_resonances():
    r = np.geomspace(0.05, 8, 150)
    sc = scan_scattering_length(r, "attractive")
    assert np.all(sc.converged)
    jumps = np.flatnonzero(np.diff(sc.n_bound)) + 1
    assert len(sc.divergences) == sc.n_bound[-1] - 1 == len(jumps)
    for (i0, i1), j in zip(sc.divergences, jumps):
        assert abs(i1 - j) <= 1


def test_repulsive_scan_single_zero():
    sc = scan_scattering_length(np.geomspace(0.05, 8, 150), "repulsive")
    assert len(sc.zero_crossings) == 1 and not sc.divergences
    assert np.count_nonzero(np.diff(np.sign(sc.a_over_lambda))) == 1


def test_scan_threads_deterministic():
    r = np.geomspace(0.1, 6, 24)
    a = scan_scattering_length(r, "attractive", threads=1)
    b = scan_scattering_length(r, "attractive", threads=4)
    assert np.array_equal(a.a_over_lambda, b.a_over_lambda)


# ---------------------------------------------------------------- self-consistent spectrum

def test_self_consistent_far_detuned():
    p = params_for_strength(far_detuned_template(), 0.5)
    wc = char_energy(p)
    for K in (0.0, 0.5 * 2 * p.g**2 / p.c / p.delta * 0.2):
        states = self_consistent_spectrum(p, K)
        assert [s.n for s in states] == [0]
        s = states[0]
        assert s.residual < 1e-8 * wc
        assert s.omega < continuum_edge(p, K)
        # independent residual: rebuild the frozen problem at the solution
        prob = SelfConsistentProblem(p, K)
        assert abs(prob.residual(s.omega, 0)) < 1e-6 * abs(s.eps)


def test_self_consistent_low_energy():
    tmpl = SystemParams(g=3.0, omega=1.0, delta=3.0, c6=-1.0)
    p = params_for_strength(tmpl, 0.7, regime="LowEnergy")
    states = self_consistent_spectrum(p, 0.0, regime="LowEnergy")
    assert len(states) == 1
    s = states[0]
    sc = derive_scales(p, 0.0, s.omega, "LowEnergy")
    frozen = bound_states_frozen(ReducedPotential.attractive(sc.strength))[0]
    assert frozen == pytest.approx(s.eps, rel=1e-8)
    assert s.omega * polariton_mass(p) * sc.xi**2 == pytest.approx(s.eps, rel=1e-6)


def test_self_consistent_rejects_losses():
    with pytest.raises(ValueError, match="gamma=0"):
        self_consistent_spectrum(far_detuned_template().replace(gamma=0.01), 0.0)


# ---------------------------------------------------------------- lossy continuation

def test_continued_a1d_lossless_matches_weak_law():
    p = params_for_strength(SystemParams(g=3.0, omega=2.0, delta=1.0, c6=1.0), 0.3, regime="LowEnergy")
    sc = derive_scales(p, regime="LowEnergy")
    res = continued_a1d_weak(p, regime="LowEnergy")
    assert res.value.imag == 0
    assert res.value.real == pytest.approx(-3 / math.pi * sc.lambda_bar**2 / sc.xi, rel=1e-12)


def test_continued_a1d_losses():
    p = params_for_strength(far_detuned_template(), 0.3)
    ref = continued_a1d_weak(p).value
    vals = [continued_a1d_weak(p.replace(gamma=g)).value for g in (1e-1, 1e-3, 1e-6)]
    assert all(v.imag != 0 for v in vals)
    diffs = [abs(abs(v) - abs(ref)) for v in vals]
    assert diffs[0] > diffs[1] > diffs[2] and diffs[2] < 1e-5 * abs(ref)
