"""Closed-form coefficients of the effective relative-motion theory.

Two asymptotic regimes (low energy/momentum, far detuned), the saturation
susceptibility valid at any energy, and the adiabatic-elimination reduction.
Everything here accepts complex detuning, so gamma > 0 simply propagates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import (DEFAULT_THRESHOLD, RegimeLabel, RegimeReport, SingularPointError,
                     SystemParams, classify_regime, group_velocity, polariton_mass)
from .polariton_modes import fit_three_term, zeta_from


def _real_if_lossless(p, z):
    return float(np.real(z)) if p.gamma == 0 else complex(z)


def to_reduced(p: SystemParams, K, omega):
    """(cK Delta / 2g^2, omega Delta / 2 Omega^2), the natural far-detuned variables."""
    D = p.Delta
    return (_real_if_lossless(p, p.c * K * D / (2 * p.g**2)),
            _real_if_lossless(p, omega * D / (2 * p.omega**2)))


def from_reduced(p: SystemParams, kappa, x):
    """Inverse of ``to_reduced`` using the real detuning."""
    return 2 * p.g**2 * kappa / (p.c * p.delta), 2 * p.omega**2 * x / p.delta


def chibar_full(p: SystemParams, omega):
    """Saturation susceptibility: large relative-momentum limit of the pair propagator."""
    D, O2 = p.Delta, p.omega**2
    den = omega * (D - omega / 2) + 2 * O2
    if den == 0:
        raise SingularPointError("chibar pole: omega (Delta - omega/2) + 2 Omega^2 = 0")
    if D - omega == 0:
        raise SingularPointError("chibar pole: Delta - omega = 0")
    return _real_if_lossless(p, (D - omega / 2 - O2 / (D - omega)) / den)


@dataclass
class RegimeCoefficients:
    chibar: complex
    alpha: complex
    wbar: complex
    alpha_B: complex
    wbar_B: complex
    zeta: float
    regime: RegimeLabel
    valid: bool
    report: RegimeReport | None = None
    flags: tuple = field(default_factory=tuple)


def coeffs_low_energy(p: SystemParams, K=0.0, omega=0.0, threshold=DEFAULT_THRESHOLD) -> RegimeCoefficients:
    D, O2, g2 = p.Delta, p.omega**2, p.g**2
    rep = classify_regime(p, K, omega, threshold)
    alpha = g2**2 / (g2 + O2) ** 2
    wbar = omega - group_velocity(p) * K
    chibar = D / (2 * O2) - 1 / (2 * D)
    det = omega - p.c * K
    flags = []
    aB = -det**2 * O2**3 / (4 * D**2 * (g2 + O2) ** 3)
    if det == 0:
        wB = np.inf
        flags.append("omega = cK: second pole at infinity, zeta set to 0")
    else:
        wB = 4 * O2 * g2**2 / (g2 + O2) ** 3 * D**2 / det
    conv = lambda z: _real_if_lossless(p, z)
    wB_out = wB if wB is np.inf else conv(wB)
    zeta = zeta_from(wbar, alpha, wB, aB)
    return RegimeCoefficients(conv(chibar), alpha, wbar, conv(aB), wB_out, zeta,
                              RegimeLabel.LOW_ENERGY, rep.label.admits(RegimeLabel.LOW_ENERGY),
                              rep, tuple(flags))


def coeffs_far_detuned(p: SystemParams, K=0.0, omega=0.0, threshold=DEFAULT_THRESHOLD) -> RegimeCoefficients:
    D, O2, g2 = p.Delta, p.omega**2, p.g**2
    rep = classify_regime(p, K, omega, threshold)
    x = omega * D / (2 * O2)
    kap = p.c * K * D / (2 * g2)
    if kap == 1:
        raise SingularPointError("far-detuned coefficients singular at cK Delta / 2g^2 = 1")
    if x == -1:
        raise SingularPointError("far-detuned coefficients singular at omega Delta / 2 Omega^2 = -1")
    alpha = (1 - kap) / (1 + x) ** 2
    wbar = 2 * O2 / D * (x / (1 + x) - (1 + 2 * x) / (1 + x) * kap + kap**2)
    chibar = 1 / (omega + 2 * O2 / D)
    shift = 1 + p.c * K / (2 * D)
    det = omega - p.c * K
    flags = []
    aB = -O2**3 * shift * det**2 / (4 * D**2 * (g2 + O2) ** 3 * (1 - kap) ** 2)
    if det == 0:
        wB = np.inf
        flags.append("omega = cK: second pole at infinity, zeta set to 0")
    else:
        wB = -shift**2 * (1 - kap) * 4 * O2 * g2**2 / (g2 + O2) ** 3 * D**2 / (p.c * K - omega)
    conv = lambda z: _real_if_lossless(p, z)
    zeta = zeta_from(wbar, alpha, wB, aB)
    return RegimeCoefficients(conv(chibar), conv(alpha), conv(wbar), conv(aB),
                              wB if wB is np.inf else conv(wB), zeta,
                              RegimeLabel.FAR_DETUNED, rep.label.admits(RegimeLabel.FAR_DETUNED),
                              rep, tuple(flags))


def coeffs_exact(p: SystemParams, K=0.0, omega=0.0, threshold=DEFAULT_THRESHOLD) -> RegimeCoefficients:
    """Coefficients read off the exact pair propagator (valid everywhere)."""
    f = fit_three_term(p, K, omega)
    rep = classify_regime(p, K, omega, threshold)
    flags = []
    if f.ill_conditioned:
        flags.append(f"ill-conditioned fit (cond {f.condition:.2e})")
    if f.complex_poles:
        flags.append("complex pole pair")
    z = zeta_from(f.wbar, f.alpha, f.wbar_B, f.alpha_B)
    return RegimeCoefficients(f.chibar, f.alpha, f.wbar, f.alpha_B, f.wbar_B, z,
                              rep.label, True, rep, tuple(flags))


def coefficients(p: SystemParams, K=0.0, omega=0.0, regime=RegimeLabel.FAR_DETUNED,
                 threshold=DEFAULT_THRESHOLD) -> RegimeCoefficients:
    """Dispatch on a regime label; "Both" uses the far-detuned forms, "exact" the fit."""
    if isinstance(regime, str) and regime.lower() == "exact":
        return coeffs_exact(p, K, omega, threshold)
    lab = RegimeLabel.parse(regime)
    if lab is RegimeLabel.LOW_ENERGY:
        return coeffs_low_energy(p, K, omega, threshold)
    if lab in (RegimeLabel.FAR_DETUNED, RegimeLabel.BOTH):
        return coeffs_far_detuned(p, K, omega, threshold)
    raise ValueError("no closed-form coefficients outside both regimes; use regime='exact'")


def efield_ratio(p: SystemParams, K=0.0, omega=0.0, regime=RegimeLabel.LOW_ENERGY):
    """Photon pair amplitude psi_ee relative to the relative wavefunction psi."""
    lab = RegimeLabel.parse(regime)
    O2, g2 = p.omega**2, p.g**2
    if lab is RegimeLabel.LOW_ENERGY:
        return O2 / g2
    if lab in (RegimeLabel.FAR_DETUNED, RegimeLabel.BOTH):
        den = g2 - p.c * K * p.Delta / 2
        if den == 0:
            raise SingularPointError("electric-field relation singular at g^2 = cK Delta / 2")
        return _real_if_lossless(p, (O2 + omega * p.Delta / 2) / den)
    raise ValueError("no electric-field relation outside both regimes")


# ---------------------------------------------------------------- adiabatic elimination

@dataclass
class AdiabaticCoefficients:
    alpha_m: complex  # alpha * m / hbar^2
    chibar: complex
    wbar_m: complex  # wbar * m / hbar
    K: float
    omega: float


def coeffs_adiabatic(p: SystemParams, K=0.0, omega=0.0) -> AdiabaticCoefficients:
    """Four-component wavefunction equations with the p-level eliminated,
    reduced to a single equation for the even photon-Rydberg amplitude."""
    D, O2, g2, c = p.Delta, p.omega**2, p.g**2, p.c
    sat = omega + 2 * O2 / D
    if sat == 0:
        raise SingularPointError("adiabatic coefficients singular: factor (omega + 2 Omega^2/Delta) = 0")
    photon = omega - c * K + 2 * g2 / D
    if photon == 0:
        raise SingularPointError("adiabatic coefficients singular: factor (omega - cK + 2 g^2/Delta) = 0")
    G = (O2 + g2) / D
    alpha_m = g2 * O2 / (c**2 * D**2) * (2 * (omega + G) - c * K) / sat**2
    chibar = 1 / sat
    wbar_m = ((c * K - 2 * (omega + G)) ** 2
              * (2 * omega * G + omega * (omega - c * K) - 2 * O2 / D * c * K)
              / (4 * c**2 * sat * photon))
    conv = lambda z: _real_if_lossless(p, z)
    return AdiabaticCoefficients(conv(alpha_m), conv(chibar), conv(wbar_m), float(K), float(omega))


def adiabatic_discrepancy(p: SystemParams, kappa, x):
    """Relative differences (alpha m, chibar, wbar m) between the adiabatic
    forms and the exact diagrammatic coefficients at reduced point (kappa, x).

    The wbar m difference is normalised by max(|wbar m|, |m| 2 Omega^2/|Delta|)
    so the origin, where both vanish, stays well defined.
    """
    K, w = from_reduced(p, kappa, x)
    ad = coeffs_adiabatic(p, K, w)
    ex = coeffs_exact(p, K, w)
    m = polariton_mass(p)
    am = ex.alpha * m
    wm = ex.wbar * m
    d_am = abs(ad.alpha_m - am) / abs(am)
    d_chi = abs(ad.chibar - ex.chibar) / abs(ex.chibar)
    d_wm = abs(ad.wbar_m - wm) / max(abs(wm), abs(m) * 2 * p.omega**2 / abs(p.Delta))
    return d_am, d_chi, d_wm


def zeta_map(p: SystemParams, kappas, xs, method="exact"):
    """zeta on a (kappa, x) grid in reduced far-detuned variables; shape (len(kappas), len(xs))."""
    out = np.empty((len(kappas), len(xs)))
    for i, kap in enumerate(kappas):
        for j, x in enumerate(xs):
            K, w = from_reduced(p, kap, x)
            if method == "exact":
                out[i, j] = coeffs_exact(p, K, w).zeta
            else:
                out[i, j] = coefficients(p, K, w, method).zeta
    return out
