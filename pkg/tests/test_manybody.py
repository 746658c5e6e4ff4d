import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydpol.checks import narrow_well_contact
from rydpol.manybody import (Crossover, DivergentCouplingError, collision_phase, crossover_label,
                             diluteness, pseudo_coupling)
from rydpol.schroedinger import scan_scattering_length


def test_pseudo_coupling_example():
    pp = pseudo_coupling(-9.55, 4.0)
    assert pp.g1d == pytest.approx(0.0523560209, rel=1e-9)
    assert pseudo_coupling(1.0, 2.0).g1d < 0


def test_pseudo_coupling_errors():
    with pytest.raises(DivergentCouplingError):
        pseudo_coupling(0.0, 1.0)
    with pytest.raises(ValueError):
        pseudo_coupling(1.0, 0.0)


nz = st.floats(-1e3, 1e3).filter(lambda x: abs(x) > 1e-3)


@given(a=nz, m=nz)
def test_pseudo_coupling_identity(a, m):
    assert pseudo_coupling(a, m).g1d * a == pytest.approx(-2 / m, rel=1e-14)


def test_pseudo_coupling_round_trip_with_solver():
    # V1D(a) = g delta(r) solved back for a
    for a, m in [(-3.0, 1.0), (5.0, 0.5)]:
        g = pseudo_coupling(a, m).g1d
        assert narrow_well_contact(g, m) == pytest.approx(a, rel=1e-2)


def test_diluteness():
    assert diluteness(0.0, 1.0).ratio == 0 and diluteness(0.0, 1.0).valid
    assert diluteness(0.05, 1.0).valid
    assert not diluteness(2.0, 1.0).valid
    pp = pseudo_coupling(-1.0, 1.0, density=2.0, r0=1.0)
    assert pp.diluteness == 2.0 and not pp.valid


def test_crossover_labels():
    assert crossover_label(-1) is Crossover.LIEB_LINIGER
    assert crossover_label(1) is Crossover.SUPER_TONKS
    assert crossover_label(0) is Crossover.CROSSING


def test_collision_phase_examples():
    assert collision_phase(1.0, 1.0, 0.0).phi == math.pi / 2
    assert collision_phase(1.0, 1.0, 0.0).optimal
    assert collision_phase(1.0, 1.0, 1e9).phi == pytest.approx(math.pi, abs=1e-8)
    with pytest.raises(ValueError):
        collision_phase(1.0, 0.0, 1.0)


@given(x=st.lists(st.floats(-1e4, 1e4), min_size=2, max_size=20, unique=True))
def test_collision_phase_monotone(x):
    x = sorted(x)
    phis = [collision_phase(1.0, 1.0, a).phi for a in x]
    assert all(0 < p < math.pi for p in phis)
    assert all(b >= a for a, b in zip(phis, phis[1:]))


def test_zero_crossing_gives_optimal_phase():
    sc = scan_scattering_length(np.geomspace(0.5, 2.0, 40), "repulsive")
    (i0, i1), = sc.zero_crossings
    # interpolate a between the bracketing points to the crossing
    a0, a1 = sc.a_over_lambda[i0], sc.a_over_lambda[i1]
    a_star = a0 + (a1 - a0) * (0 - a0) / (a1 - a0)
    cp = collision_phase(0.3, 1.0, a_star)
    assert cp.optimal and cp.phi == pytest.approx(math.pi / 2)
