"""Van der Waals interaction, its saturated effective form and the
dimensionless well/barrier used by the relative-motion solvers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .params import DerivedScales, SingularPointError, SystemParams


class SingularConfigurationError(ValueError):
    pass


def v_bare(c6, r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("van der Waals potential is infinite at r = 0")
    return c6 / r**6


def v_eff(p: SystemParams | float, chibar, r, pole_tol: float = 1e-9):
    """Saturated potential V / (1 - chibar V), finite limit -1/chibar at r = 0.

    ``p`` may be a SystemParams or the bare coefficient C6 itself.
    """
    c6 = p.c6 if isinstance(p, SystemParams) else float(p)
    r = np.asarray(r, dtype=float)
    r6 = r**6
    den = r6 - chibar * c6
    if chibar == 0:
        if np.any(r == 0):
            raise ValueError("pure van der Waals potential is infinite at r = 0")
        return c6 / r6
    if np.real(chibar * c6) > 0:
        xi6 = abs(chibar * c6)
        if np.any(np.abs(den) <= pole_tol * xi6):
            raise SingularConfigurationError(
                "effective potential pole at r = xi (sign(chibar C6) = +1, see validate_interaction)")
    return c6 / den


@dataclass(frozen=True)
class ReducedPotential:
    """W(u) = sigma * s * strength / (u^6 - s), u = r / xi.

    strength = (xi / lambda_bar)^2, s = sign(chibar C6), sigma = sign(alpha m chibar).
    The reduced equation is -psi'' + W psi = eps psi with eps = m xi^2 wbar.
    ``xi`` and ``m`` are carried along when built from physical parameters.
    """

    strength: float
    s: int = -1
    sigma: int = 1
    xi: float | None = None
    m: float | None = None

    def __post_init__(self):
        if self.s not in (-1, 1) or self.sigma not in (-1, 1):
            raise ValueError("s and sigma must be +-1")
        if self.strength < 0:
            raise ValueError("strength must be non-negative")

    @classmethod
    def attractive(cls, ratio):
        """Attractive well for xi / lambda_bar = ``ratio``."""
        return cls(ratio**2, -1, 1)

    @classmethod
    def repulsive(cls, ratio):
        return cls(ratio**2, -1, -1)

    @property
    def ratio(self):
        """xi / lambda_bar."""
        return float(np.sqrt(self.strength))

    @property
    def tail(self):
        """Coefficient of the u^-6 tail."""
        return self.sigma * self.s * self.strength

    @property
    def depth(self):
        """W(0)."""
        return -self.sigma * self.strength

    @property
    def regular(self):
        return self.s == -1

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return self.sigma * self.s * self.strength / (u**6 - self.s)

    def require_regular(self):
        if self.s != -1:
            raise SingularConfigurationError(
                "singular configuration: sign(chibar C6) = +1 puts a pole in the potential at r = xi")

    # reduced <-> physical energy
    def energy_to_reduced(self, wbar):
        return self.m * self.xi**2 * wbar

    def energy_from_reduced(self, eps):
        return eps / (self.m * self.xi**2)


def reduce(scales: DerivedScales, coeffs=None) -> ReducedPotential:
    """Package the effective potential at one (K, omega) into reduced units."""
    chibar = scales.chibar if coeffs is None else coeffs.chibar
    alpha = scales.alpha if coeffs is None else coeffs.alpha
    if np.iscomplexobj(scales.m) or np.iscomplexobj(chibar) or np.iscomplexobj(alpha):
        raise ValueError("reduced potential needs gamma = 0")
    if chibar == 0:
        raise SingularPointError("on interaction zero-crossing: chibar = 0")
    s = int(np.sign(chibar * scales.c6))
    sigma = int(np.sign(alpha * scales.m * chibar))
    rp = ReducedPotential(float(scales.strength**2), s, sigma, xi=scales.xi, m=float(scales.m))
    rp.require_regular()
    return rp


def _unit_well_transform(k):
    """Fourier transform of 1/(1+u^6), summed over its upper half-plane poles."""
    k = np.abs(np.asarray(k, dtype=float))
    return np.pi / 3 * (np.exp(-k) + 2 * np.exp(-k / 2) * np.sin(np.sqrt(3) / 2 * k + np.pi / 6))


def v_eff_fourier(reduced: ReducedPotential, k):
    """Fourier transform int W(u) exp(iku) du over the real line (exact)."""
    reduced.require_regular()
    return reduced.depth * _unit_well_transform(k)


def v_eff_fourier_quad(reduced: ReducedPotential, k, tol=1e-10):
    """Same transform by adaptive oscillatory quadrature (finite core plus Fourier tail).

    Slow; kept as an independent check of ``v_eff_fourier``.
    """
    reduced.require_regular()
    U = 40.0
    out = []
    for kk in np.atleast_1d(np.abs(np.asarray(k, dtype=float))):
        core, err = integrate.quad(lambda u: float(reduced(u)) * np.cos(kk * u), 0, U,
                                   epsabs=tol * max(reduced.strength, 1e-300), epsrel=0, limit=1000)
        if kk == 0:
            tail, _ = integrate.quad(reduced, U, np.inf)
        else:
            tail, _ = integrate.quad(reduced, U, np.inf, weight="cos", wvar=kk)
        if err > 10 * tol * max(reduced.strength, 1e-300):
            raise RuntimeError(f"Fourier quadrature did not converge at k={kk}: error estimate {err:.2e}")
        out.append(2 * (core + tail))
    out = np.array(out)
    return out[0] if np.ndim(k) == 0 else out

