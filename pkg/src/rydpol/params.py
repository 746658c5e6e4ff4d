"""Physical parameters, characteristic scales and regime classification.

Units: hbar = 1, every energy is an angular frequency, lengths are whatever
unit the user picks for c and C6.
"""
from __future__ import annotations

import dataclasses
import enum
import math
import os
from dataclasses import dataclass, field

import numpy as np

DEFAULT_THRESHOLD = 0.1
CONFIG_ENV = "RYDPOL_CONFIG"

# config-file key -> SystemParams field
CONFIG_KEYS = {
    "g": "g",
    "omega_rabi": "omega",
    "delta": "delta",
    "gamma": "gamma",
    "c": "c",
    "c6": "c6",
}


class ParameterError(ValueError):
    pass


class SingularPointError(ValueError):
    """A closed-form expression hit a vanishing denominator."""


@dataclass(frozen=True)
class SystemParams:
    """Coupling g, control Rabi frequency omega, detuning delta, p-level
    half-width gamma, light speed c and van der Waals coefficient c6."""

    g: float
    omega: float
    delta: float
    gamma: float = 0.0
    c: float = 1.0
    c6: float = 1.0

    def __post_init__(self):
        for name in ("g", "omega", "delta", "gamma", "c", "c6"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v!r}")
        if self.g <= 0:
            raise ParameterError("g must be positive")
        if self.omega <= 0:
            raise ParameterError("omega_rabi must be positive")
        if self.c <= 0:
            raise ParameterError("c must be positive")
        if self.gamma < 0:
            raise ParameterError("gamma must be non-negative")
        if self.delta == 0:
            raise ParameterError("delta must be nonzero")
        if self.c6 == 0:
            raise ParameterError("c6 must be nonzero")

    @property
    def Delta(self):
        """Complex detuning delta - i gamma (a plain float when gamma = 0)."""
        if self.gamma == 0:
            return float(self.delta)
        return complex(self.delta, -self.gamma)

    @property
    def lossless(self):
        return self.gamma == 0

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    def as_config(self):
        return {k: getattr(self, f) for k, f in CONFIG_KEYS.items()}


def group_velocity(p: SystemParams) -> float:
    return p.omega**2 / (p.omega**2 + p.g**2) * p.c


def char_energy(p: SystemParams) -> float:
    D = abs(p.Delta)
    return min(D, 2 * p.omega**2 / D)


def char_momentum(p: SystemParams) -> float:
    return char_energy(p) / group_velocity(p)


def polariton_mass(p: SystemParams):
    """Mass of the relative motion; signed like delta, complex if gamma > 0."""
    g2, o2 = p.g**2, p.omega**2
    return (g2 + o2) ** 3 / (2 * p.c**2 * g2 * p.Delta * o2)


# ---------------------------------------------------------------- regimes

class RegimeLabel(str, enum.Enum):
    LOW_ENERGY = "LowEnergy"
    FAR_DETUNED = "FarDetuned"
    BOTH = "Both"
    OUTSIDE = "Outside"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).replace("-", "").replace("_", "").lower()
        for lab in cls:
            if lab.value.lower() == key:
                return lab
        raise ValueError(f"unknown regime {text!r}")

    def admits(self, other: "RegimeLabel") -> bool:
        if self is RegimeLabel.BOTH:
            return other in (RegimeLabel.LOW_ENERGY, RegimeLabel.FAR_DETUNED, RegimeLabel.BOTH)
        return self is other


@dataclass(frozen=True)
class RegimeReport:
    label: RegimeLabel
    omega_over_wc: float
    K_over_qc: float
    rabi_over_detuning: float
    omega_over_detuning: float
    threshold: float

    @property
    def low_energy_margin(self):
        return max(self.omega_over_wc, self.K_over_qc)

    @property
    def far_detuned_margin(self):
        return max(self.rabi_over_detuning, self.omega_over_detuning)

    def margin(self, label):
        label = RegimeLabel.parse(label)
        if label is RegimeLabel.LOW_ENERGY:
            return self.low_energy_margin
        if label is RegimeLabel.FAR_DETUNED:
            return self.far_detuned_margin
        raise ValueError("margin is defined per regime")


def classify_regime(p: SystemParams, K, omega, threshold: float = DEFAULT_THRESHOLD) -> RegimeReport:
    D = abs(p.Delta)
    r_w = abs(omega) / char_energy(p)
    r_k = abs(K) / char_momentum(p)
    r_o = p.omega / D
    r_wd = abs(omega) / D
    low = r_w <= threshold and r_k <= threshold
    far = r_o <= threshold and r_wd <= threshold
    if low and far:
        lab = RegimeLabel.BOTH
    elif low:
        lab = RegimeLabel.LOW_ENERGY
    elif far:
        lab = RegimeLabel.FAR_DETUNED
    else:
        lab = RegimeLabel.OUTSIDE
    return RegimeReport(lab, r_w, r_k, r_o, r_wd, threshold)


# ---------------------------------------------------------------- scales

@dataclass(frozen=True)
class DerivedScales:
    v_g: float
    omega_c: float
    q_c: float
    m: complex
    xi: float
    lambda_bar: float
    strength: float
    kappa_xi: float | None
    r0: float
    chibar: complex
    alpha: complex
    c6: float
    K: float
    omega: float
    regime: RegimeLabel
    in_window: bool
    warnings: tuple = field(default_factory=tuple)

    @property
    def interaction_sign(self):
        """sign(chibar * C6); only meaningful for real chibar."""
        return int(np.sign(np.real(self.chibar) * self.c6))


def derive_scales(p: SystemParams, K=0.0, omega=0.0, regime=RegimeLabel.FAR_DETUNED,
                  threshold: float = DEFAULT_THRESHOLD) -> DerivedScales:
    """All characteristic scales at (K, omega) using the coefficients of ``regime``.

    ``regime`` may also be ``"exact"`` to take chibar and alpha from the exact
    pair-propagator fit.
    """
    from . import regimes  # local import to avoid a cycle

    coeffs = regimes.coefficients(p, K, omega, regime, threshold=threshold)
    report = classify_regime(p, K, omega, threshold)
    chibar, alpha = coeffs.chibar, coeffs.alpha
    if chibar == 0:
        raise SingularPointError("on interaction zero-crossing: chibar(omega) = 0, blockade radius undefined")
    m = polariton_mass(p)
    am = alpha * m
    if am == 0:
        raise SingularPointError("alpha * m = 0, de Broglie length undefined")
    xi = abs(p.c6 * chibar) ** (1 / 6)
    lam = math.sqrt(abs(chibar / am))
    kxi = None if p.gamma == 0 else 2 * xi * abs(p.Delta) / (lam * p.gamma)
    r0 = max(xi, abs(am * p.c6) ** 0.25)
    warns = []
    in_window = True
    lab = coeffs.regime
    if lab in (RegimeLabel.LOW_ENERGY, RegimeLabel.FAR_DETUNED) and not report.label.admits(lab):
        in_window = False
        warns.append(f"(K, omega) outside the {lab.value} window")
    return DerivedScales(
        v_g=group_velocity(p), omega_c=char_energy(p), q_c=char_momentum(p), m=m,
        xi=xi, lambda_bar=lam, strength=xi / lam, kappa_xi=kxi, r0=r0,
        chibar=chibar, alpha=alpha, c6=p.c6, K=float(K), omega=float(omega),
        regime=lab, in_window=in_window, warnings=tuple(warns))


# ---------------------------------------------------------------- interaction sign

@dataclass(frozen=True)
class SingularityReport:
    s: int
    chibar: float
    regular: bool
    message: str


def validate_interaction(p: SystemParams, omega=0.0) -> SingularityReport:
    """Sign of chibar(omega) C6 using the exact saturation susceptibility."""
    from .regimes import chibar_full

    if p.gamma != 0:
        raise ParameterError("the interaction sign test needs gamma = 0")
    chi = float(np.real(chibar_full(p, omega)))
    s = int(np.sign(chi * p.c6))
    if s == 0:
        return SingularityReport(0, chi, False, "chibar vanishes: pure van der Waals interaction")
    if s > 0:
        return SingularityReport(s, chi, False, "effective potential has a pole at r = xi")
    return SingularityReport(s, chi, True, "effective potential bounded")


def params_for_strength(template: SystemParams, strength: float, K=0.0, omega=0.0,
                        regime=RegimeLabel.FAR_DETUNED) -> SystemParams:
    """Copy of ``template`` with |C6| chosen so xi/lambda_bar = ``strength`` at (K, omega).

    The sign of C6 is set to make sign(chibar C6) = -1 (regular potential).
    """
    from . import regimes

    co = regimes.coefficients(template, K, omega, regime)
    lam = math.sqrt(abs(co.chibar / (co.alpha * polariton_mass(template))))
    xi = strength * lam
    c6 = -np.sign(np.real(co.chibar)) * xi**6 / abs(co.chibar)
    return template.replace(c6=float(c6))


# ---------------------------------------------------------------- config files

def parse_config_text(text: str, source: str = "<string>") -> SystemParams:
    vals = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, val = (t.strip() for t in line.split("=", 1))
        key = key.lower()
        if key not in CONFIG_KEYS:
            raise ParameterError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            vals[CONFIG_KEYS[key]] = float(val)
        except ValueError:
            raise ParameterError(f"{source}:{lineno}: key {key!r} has non-numeric value {val!r}") from None
    missing = [k for k in ("g", "omega_rabi", "delta") if CONFIG_KEYS[k] not in vals]
    if missing:
        raise ParameterError(f"{source}: missing key(s) {', '.join(missing)}")
    try:
        return SystemParams(**vals)
    except ParameterError as exc:
        raise ParameterError(f"{source}: {exc}") from None


def load_config(path=None) -> SystemParams:
    """Read a key=value parameter file; falls back to $RYDPOL_CONFIG."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
        if not path:
            raise ParameterError(f"no config file given and ${CONFIG_ENV} is unset")
    with open(path) as fh:
        return parse_config_text(fh.read(), str(path))


def format_config(p: SystemParams) -> str:
    return "".join(f"{k} = {v!r}\n" for k, v in p.as_config().items())
