"""Relative-motion problem -psi'' + W(u) psi = eps psi in reduced units.

Even-parity solutions only. Zero-energy scattering length, phase shifts,
bound states (node counting plus bisection), the self-consistent spectrum
where the potential itself depends on the pair energy, and strength scans.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import _kernels
from .params import (DEFAULT_THRESHOLD, RegimeLabel, SystemParams, char_energy, group_velocity,
                     polariton_mass)
from .potential import ReducedPotential, SingularConfigurationError
from .regimes import coefficients, from_reduced, to_reduced


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid:
    h: float = 1e-3
    u_max: float = 30.0

    @property
    def n(self):
        return int(round(self.u_max / self.h)) + 1

    def points(self):
        return np.arange(self.n) * self.h

    def halved(self):
        return Grid(self.h / 2, self.u_max)


DEFAULT_GRID = Grid()


def _sample(potential, grid: Grid):
    """Grid, potential values and u^-6 tail coefficient for a potential."""
    if isinstance(potential, ReducedPotential):
        potential.require_regular()
        tail = potential.tail
    else:
        tail = None
    u = grid.points()
    w = np.ascontiguousarray(np.broadcast_to(potential(u), u.shape), dtype=float)
    if tail is None:
        tail = float(w[-1] * u[-1] ** 6)
    return u, w, tail


@dataclass
class RadialSolution:
    u: np.ndarray
    psi: np.ndarray
    log_derivative: float
    energy: float
    match_index: int


def solve_radial(potential, energy=0.0, grid: Grid = DEFAULT_GRID) -> RadialSolution:
    """Outward even solution at a given reduced energy, normalised to max |psi| = 1."""
    u, w, _ = _sample(potential, grid)
    f = w - energy
    psi = _kernels.integrate_even(w, energy, grid.h)
    i = len(u) - 2
    d = _kernels.derivative(psi, f, grid.h, i)
    scale = np.max(np.abs(psi))
    return RadialSolution(u, psi / scale, d / psi[i], float(energy), i)


# ---------------------------------------------------------------- scattering length

@dataclass
class ScatteringResult:
    a_reduced: float  # a / xi
    a_over_lambda: float | None  # a / lambda_bar (needs a ReducedPotential)
    a_length: float | None  # a in physical length units (needs xi)
    n_bound: int
    error_estimate: float
    slope: float = 1.0  # B in psi ~ A + B u, with psi(0) = 1
    offset: float = 0.0  # A
    resonant: bool = False


def _affine_intercept(psi, f, u, h, i, tail):
    # intercept of the asymptote psi ~ (u - a), corrected for the u^-6 tail
    d = _kernels.derivative(psi, f, h, i)
    if d == 0:
        return math.inf
    a = u[i] - psi[i] / d
    return (a + tail / (3 * u[i] ** 3)) / (1 + tail / (2 * u[i] ** 4))


def scattering_length(potential, grid: Grid = DEFAULT_GRID, rtol: float = 1e-3) -> ScatteringResult:
    """Zero-energy even-channel scattering length.

    psi ~ (u - a) at large u. Convention: a contact potential g delta(u) in
    -psi'' + W psi = 0 gives a = -2/g (physical a = -2 hbar^2/(m g)).
    The intercept is read at u_max/2 and u_max, corrected for the van der
    Waals tail and Richardson-extrapolated in the matching radius.
    """
    u, w, tail = _sample(potential, grid)
    h = grid.h
    psi = _kernels.integrate_even(w, 0.0, h)
    i2 = len(u) - 2
    i1 = i2 // 2
    a2 = _affine_intercept(psi, w, u, h, i2, tail)
    a1 = _affine_intercept(psi, w, u, h, i1, tail)
    if not (math.isfinite(a1) and math.isfinite(a2)):
        raise ConvergenceError("zero-energy solution has vanishing slope at the matching radius")
    u1, u2 = u[i1], u[i2]
    # leftover error ~ u^-5
    a = (u2**5 * a2 - u1**5 * a1) / (u2**5 - u1**5)
    err = abs(a2 - a1)
    # near a resonance a itself is ill-defined but 1/a converges
    if err > rtol * max(abs(a), 1.0) and abs(1 / a2 - 1 / a1) > rtol:
        raise ConvergenceError(
            f"scattering length not converged in u_max={grid.u_max}: estimates {a1:.6g}, {a2:.6g}")
    nb = int(_kernels.count_below(w, 0.0, h))
    slope = _kernels.derivative(psi, w, h, i2)
    offset = psi[i2] - u2 * slope
    ratio = potential.ratio if isinstance(potential, ReducedPotential) else None
    xi = potential.xi if isinstance(potential, ReducedPotential) else None
    return ScatteringResult(
        a_reduced=float(a),
        a_over_lambda=None if ratio is None else float(a * ratio),
        a_length=None if xi is None else float(a * xi),
        n_bound=nb,
        error_estimate=float(err),
        slope=float(slope),
        offset=float(offset),
        resonant=abs(a) > grid.u_max,
    )


# ---------------------------------------------------------------- phase shifts

def _wrap(phi):
    return (phi + math.pi / 2) % math.pi - math.pi / 2


def phase_shift(potential, k, grid: Grid = DEFAULT_GRID):
    """Even-channel phase shift: psi ~ cos(k u + phi) at large u, phi in [-pi/2, pi/2).

    With this convention k tan(phi) -> 1/a as k -> 0. ``k`` may be an array;
    the result is then made continuous in k by unwrapping.
    """
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(ks <= 0):
        raise ValueError("phase_shift needs k > 0")
    u, w, _ = _sample(potential, grid)
    h = grid.h
    i = len(u) - 2
    out = np.empty(len(ks))
    for j, kk in enumerate(ks):
        e = kk * kk
        psi = _kernels.integrate_even(w, e, h)
        d = _kernels.derivative(psi, w - e, h, i)
        if not (np.isfinite(psi[i]) and np.isfinite(d)):
            raise ConvergenceError(f"matching failed at k={kk}")
        out[j] = _wrap(math.atan2(-d / kk, psi[i]) - kk * u[i])
    if np.ndim(k) == 0:
        return float(out[0])
    return np.unwrap(out, period=math.pi)


# ---------------------------------------------------------------- bound states

@dataclass
class BoundState:
    n: int
    eps: float  # reduced energy
    omega: float | None = None
    K: float | None = None
    group_velocity: float | None = None
    x: float | None = None  # omega Delta / 2 Omega^2
    residual: float | None = None
    strength: float | None = None


def count_bound(potential, energy=0.0, grid: Grid = DEFAULT_GRID) -> int:
    """Number of even bound states strictly below ``energy``."""
    _, w, _ = _sample(potential, grid)
    return int(_kernels.count_below(w, float(energy), grid.h))


def _level(w, h, n, lo, hi, tol):
    # bisection on the state count for the n-th level in (lo, hi)
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if _kernels.count_below(w, mid, h) > n:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def bound_states_frozen(potential, grid: Grid = DEFAULT_GRID, tol: float = 1e-13) -> list:
    """All even bound states (reduced energies, ascending) of a fixed potential."""
    _, w, _ = _sample(potential, grid)
    h = grid.h
    total = int(_kernels.count_below(w, 0.0, h))
    wmin = float(min(np.min(w), 0.0))
    return [_level(w, h, n, wmin, 0.0, tol) for n in range(total)]


def bound_state_energy(potential, n, grid: Grid = DEFAULT_GRID, tol: float = 1e-13):
    _, w, _ = _sample(potential, grid)
    h = grid.h
    if _kernels.count_below(w, 0.0, h) <= n:
        return None
    return _level(w, h, n, float(min(np.min(w), 0.0)), 0.0, tol)


# ---------------------------------------------------------------- self-consistent spectrum

class SelfConsistentProblem:
    """Bound-state condition m xi(omega)^2 wbar(K, omega) = eps_n(omega) at fixed K.

    The potential strength, its sign bookkeeping and the mass-weighted
    relative energy are all re-evaluated from the regime coefficients at
    every trial omega.
    """

    def __init__(self, p: SystemParams, K, regime=RegimeLabel.FAR_DETUNED, grid: Grid = DEFAULT_GRID,
                 threshold=DEFAULT_THRESHOLD):
        if p.gamma != 0:
            raise ValueError("bound-state search requires gamma=0")
        self.p = p
        self.K = float(K)
        self.regime = RegimeLabel.parse(regime)
        if self.regime not in (RegimeLabel.LOW_ENERGY, RegimeLabel.FAR_DETUNED, RegimeLabel.BOTH):
            raise ValueError("self-consistent spectrum needs the low-energy or far-detuned regime")
        self.grid = grid
        self.threshold = threshold
        self.m = polariton_mass(p)
        self._u = grid.points()
        self._shape = 1.0 / (self._u**6 + 1.0)

    def state(self, omega):
        """(lhs, w) where lhs = m xi^2 wbar and w is the sampled reduced potential."""
        co = coefficients(self.p, self.K, omega, self.regime, self.threshold)
        chibar, alpha, wbar = co.chibar, co.alpha, co.wbar
        if chibar * self.p.c6 >= 0:
            raise SingularConfigurationError("sign(chibar C6) = +1 at this omega")
        xi2 = abs(self.p.c6 * chibar) ** (1 / 3)
        S = abs(alpha * self.m) * xi2 / abs(chibar)
        sigma = np.sign(alpha * self.m * chibar)
        lhs = self.m * xi2 * wbar
        return lhs, -sigma * S * self._shape, S, sigma

    def count(self, omega):
        """Number of frozen levels below the left-hand side at this omega."""
        lhs, w, _, sigma = self.state(omega)
        if sigma < 0:
            return 0
        return int(_kernels.count_below(w, lhs, self.grid.h))

    def residual(self, omega, n):
        """lhs - eps_n in reduced units (None if level n does not exist)."""
        lhs, w, _, _ = self.state(omega)
        h = self.grid.h
        if _kernels.count_below(w, 0.0, h) <= n:
            return None
        return lhs - _level(w, h, n, float(np.min(w)), 0.0, 1e-14)

    def _coordinate(self, s_max):
        """Map t -> omega on an interval (t_lo, t_edge) covering all possible
        bound states; t_edge is the continuum edge wbar = 0. Returns None if
        no bound state can exist at this K."""
        p = self.p
        if self.regime is RegimeLabel.LOW_ENERGY:
            edge = group_velocity(p) * self.K
            co = coefficients(p, self.K, edge, self.regime, self.threshold)
            xi2 = abs(p.c6 * co.chibar) ** (1 / 3)
            _, _, S, _ = self.state(edge)
            span = S / abs(self.m * xi2)  # eps >= -S
            sgn = 1.0 if np.real(self.m) > 0 else -1.0
            return (lambda t: edge + sgn * t), -span, 0.0
        kap, _ = to_reduced(p, self.K, 0.0)
        if kap >= 1:
            return None
        x_edge = kap / (1 - kap)

        def omega_of(t):
            return from_reduced(p, kap, math.expm1(t))[1]

        def strength(t):
            return self.state(omega_of(t))[2]

        t_edge = math.log1p(x_edge)
        if strength(t_edge) >= s_max:
            return None
        # the reduced strength grows like (1+x)^(-4/3) toward x = -1
        t_lo = optimize.brentq(lambda t: math.log(strength(t) / s_max), -25.0, t_edge, xtol=1e-12)
        return omega_of, t_lo, t_edge

    def solve(self, n_scan=240, s_max=1e4, rtol=1e-8):
        """All self-consistent levels at this K, ordered by n."""
        p = self.p
        coord = self._coordinate(s_max)
        if coord is None:
            return []
        omega_of, t_lo, t_edge = coord
        ts = np.linspace(t_lo, t_edge, n_scan)
        ts[-1] = t_edge - 1e-13 * max(1.0, abs(t_edge), t_edge - t_lo)
        counts = [self.count(omega_of(t)) for t in ts]
        wc = char_energy(p)
        out = []
        for j in range(len(ts) - 1):
            ca, cb = counts[j], counts[j + 1]
            if ca == cb:
                continue
            for n in range(min(ca, cb), max(ca, cb)):
                t_n = self._bisect(omega_of, ts[j], ts[j + 1], n, ca > n)
                w_n = omega_of(t_n)
                lhs, wpot, S, _ = self.state(w_n)
                eps = _level(wpot, self.grid.h, n, float(np.min(wpot)), 0.0, 1e-14)
                co = coefficients(p, self.K, w_n, self.regime, self.threshold)
                xi2 = abs(p.c6 * co.chibar) ** (1 / 3)
                res = abs(co.wbar - eps / (self.m * xi2))
                if res > rtol * wc:
                    raise ConvergenceError(
                        f"self-consistency residual {res:.3e} exceeds {rtol:g} omega_c at K={self.K}, n={n}")
                out.append(BoundState(n=n, eps=eps, omega=float(w_n), K=self.K,
                                      x=to_reduced(p, 0.0, w_n)[1], residual=float(res),
                                      strength=float(S)))
        out.sort(key=lambda b: b.n)
        return out

    def _bisect(self, omega_of, a, b, n, above_at_a):
        # locate where count crosses n -> n+1 between t = a and t = b
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if (self.count(omega_of(mid)) > n) == above_at_a:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)


def self_consistent_spectrum(p: SystemParams, K, regime=RegimeLabel.FAR_DETUNED,
                             grid: Grid = DEFAULT_GRID, n_scan=240, s_max=1e4):
    """Self-consistent bound states at total momentum K (list, ordered by n)."""
    return SelfConsistentProblem(p, K, regime, grid).solve(n_scan=n_scan, s_max=s_max)


def continuum_edge(p: SystemParams, K, regime=RegimeLabel.FAR_DETUNED):
    """Pair energy where wbar(K, omega) = 0."""
    lab = RegimeLabel.parse(regime)
    if lab is RegimeLabel.LOW_ENERGY:
        return group_velocity(p) * K
    kap, _ = to_reduced(p, K, 0.0)
    return from_reduced(p, kap, kap / (1 - kap))[1]


def branch_group_velocity(p: SystemParams, K, n, regime=RegimeLabel.FAR_DETUNED,
                          grid: Grid = DEFAULT_GRID, dK=None):
    """d omega_n / dK by central differences (None if the branch is missing nearby)."""
    if dK is None:
        dK = 1e-3 * 2 * p.g**2 / (p.c * abs(p.delta))
    vals = []
    for KK in (K - dK, K + dK):
        states = [b for b in self_consistent_spectrum(p, KK, regime, grid) if b.n == n]
        if not states:
            return None
        vals.append(states[0].omega)
    return (vals[1] - vals[0]) / (2 * dK)


# ---------------------------------------------------------------- scans

@dataclass
class ScanResult:
    ratio: np.ndarray  # xi / lambda_bar
    a_over_lambda: np.ndarray
    n_bound: np.ndarray
    converged: np.ndarray
    divergences: list  # index pairs (i-1, i) bracketing a pole of a
    zero_crossings: list  # index pairs bracketing a zero of a
    branch: str
    errors: dict = field(default_factory=dict)

    @property
    def resonance_flag(self):
        flag = np.zeros(len(self.ratio), dtype=bool)
        for _, i in self.divergences:
            flag[i] = True
        return flag


def _scan_point(args):
    ratio, branch, grid = args
    rp = ReducedPotential.attractive(ratio) if branch == "attractive" else ReducedPotential.repulsive(ratio)
    res = scattering_length(rp, grid)
    return res.a_over_lambda, res.n_bound, res.slope, res.offset


def scan_scattering_length(ratios, branch="attractive", grid: Grid = DEFAULT_GRID, threads=1) -> ScanResult:
    """a/lambda_bar and bound-state count over a grid of xi/lambda_bar."""
    if branch not in ("attractive", "repulsive"):
        raise ValueError("branch must be 'attractive' or 'repulsive'")
    ratios = np.asarray(ratios, dtype=float)
    if np.any(ratios <= 0):
        raise ValueError("strength grid must be positive")
    jobs = [(r, branch, grid) for r in ratios]

    def safe(job):
        try:
            return _scan_point(job), None
        except (ConvergenceError, FloatingPointError) as exc:
            return (np.nan, -1, np.nan, np.nan), str(exc)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(safe, jobs))
        # the thread pool preserves order
    else:
        results = [safe(j) for j in jobs]
    a = np.array([r[0][0] for r in results], dtype=float)
    nb = np.array([r[0][1] for r in results], dtype=int)
    errors = {i: r[1] for i, r in enumerate(results) if r[1] is not None}
    slope = np.array([r[0][2] for r in results], dtype=float)
    offset = np.array([r[0][3] for r in results], dtype=float)
    ok = np.isfinite(a)
    # psi ~ A + B u with a = -A/B: a pole of a is a zero of the slope B,
    # a zero of a is a zero of the offset A
    div, zc = [], []
    idx = np.flatnonzero(ok)
    for i0, i1 in zip(idx[:-1], idx[1:]):
        if np.sign(slope[i0]) != np.sign(slope[i1]):
            div.append((int(i0), int(i1)))
        if np.sign(offset[i0]) != np.sign(offset[i1]):
            zc.append((int(i0), int(i1)))
    return ScanResult(ratios, a, nb, ok, div, zc, branch, errors)


# ---------------------------------------------------------------- lossy continuation

@dataclass
class ContinuedA1D:
    value: complex
    principal_branch: bool
    near_branch_cut: bool


def continued_a1d_weak(p: SystemParams, omega=0.0, K=0.0, regime=RegimeLabel.FAR_DETUNED) -> ContinuedA1D:
    """Weak-coupling a = (3/pi) chibar (-chibar C6)^(-1/6) / (alpha m), continued to complex detuning.

    For Re chibar > 0 this equals (3/pi) (-chibar^5/C6)^(1/6) / (alpha m); the
    form used here also keeps the sign of chibar, so the lossless limit gives
    the weak-coupling law on both branches.
    """
    co = coefficients(p, K, omega, regime)
    chibar = complex(co.chibar)
    am = complex(co.alpha) * complex(polariton_mass(p))
    base = -chibar * p.c6
    root = base ** (-1 / 6)  # principal branch
    near_cut = abs(abs(np.angle(base)) - math.pi) < 1e-6
    val = 3 / math.pi * chibar * root / am
    if p.gamma == 0 and not near_cut:
        val = complex(val.real, 0.0) if abs(val.imag) <= 1e-12 * abs(val) else val
    return ContinuedA1D(val, True, near_cut)
