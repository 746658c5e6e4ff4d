"""Low-energy many-body parameters built from the two-body scattering length."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .params import DEFAULT_THRESHOLD


class DivergentCouplingError(ValueError):
    pass


@dataclass(frozen=True)
class PseudoPotential:
    a1d: float
    g1d: float
    m: float
    diluteness: float | None = None

    @property
    def valid(self):
        return self.diluteness is None or self.diluteness <= DEFAULT_THRESHOLD


def pseudo_coupling(a1d, m, density=None, r0=None, hbar=1.0) -> PseudoPotential:
    """Contact coupling g = -2 hbar^2 / (m a) of the 1D pseudo-potential g delta(r)."""
    if m == 0:
        raise ValueError("mass must be nonzero")
    if a1d == 0:
        raise DivergentCouplingError("a1d = 0: coupling diverges (zero crossing, hard-core limit)")
    dil = None
    if density is not None and r0 is not None:
        dil = diluteness(density, r0).ratio
    return PseudoPotential(a1d, -2 * hbar**2 / (m * a1d), m, dil)


@dataclass(frozen=True)
class Diluteness:
    ratio: float
    valid: bool


def diluteness(density, r0, threshold=DEFAULT_THRESHOLD) -> Diluteness:
    if density < 0 or r0 <= 0:
        raise ValueError("need density >= 0 and r0 > 0")
    ratio = density * r0
    return Diluteness(ratio, ratio <= threshold)


class Crossover(str, enum.Enum):
    LIEB_LINIGER = "LiebLiniger"
    SUPER_TONKS = "SuperTonks"
    CROSSING = "crossing"


def crossover_label(a1d) -> Crossover:
    if a1d < 0:
        return Crossover.LIEB_LINIGER
    if a1d > 0:
        return Crossover.SUPER_TONKS
    return Crossover.CROSSING


@dataclass(frozen=True)
class CollisionPhase:
    phi: float
    optimal: bool  # pi/2 point where the scattering length vanishes


def collision_phase(d_omega, v_g, a1d, tol=1e-12) -> CollisionPhase:
    """phi with cot(phi) = -a1d * d_omega / v_g, on the branch (0, pi)."""
    if v_g <= 0:
        raise ValueError("group velocity must be positive")
    x = -a1d * d_omega / v_g
    # arccot on (0, pi): continuous through x = 0
    phi = math.pi / 2 - math.atan(x)
    return CollisionPhase(phi, abs(x) <= tol)
