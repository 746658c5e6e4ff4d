"""Momentum-space ladder resummation for the even channel, in reduced units.

T(k) = W_e(k, k0) + (1/pi) int_0^L W_e(k, q) T(q) / (k0^2 - q^2 + i0) dq

with W_e(k, q) = [W^(k - q) + W^(k + q)] / 2 the even-projected transform of
the saturated potential. The on-shell pole is handled by subtracting the
integrand at q = k0 and adding the principal-value integral analytically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .potential import ReducedPotential, v_eff_fourier
from .schroedinger import ConvergenceError


class UnitarityError(RuntimeError):
    pass


@dataclass
class TMatrixSolution:
    reduced: ReducedPotential
    k_on: float
    q: np.ndarray  # quadrature nodes
    w: np.ndarray  # quadrature weights
    T: np.ndarray  # half-shell T(q_j, k_on)
    T_on: complex
    cutoff: float
    n_per_segment: int
    residual: float
    condition: float
    near_singular: bool
    refinement_change: float

    def kernel(self, k, q):
        return even_kernel(self.reduced, k, q)

    def half_shell(self, k):
        """Nystrom interpolation of T(k, k_on) at arbitrary momenta."""
        k = np.atleast_1d(np.asarray(k, dtype=float))
        k0 = self.k_on
        D = k0**2 - self.q**2
        L = _pv_log(k0, self.cutoff)
        Wkq = self.kernel(k[:, None], self.q[None, :])
        Wk0 = self.kernel(k, k0)
        out = (Wk0 + (Wkq * (self.w / D)) @ self.T / math.pi
               - Wk0 * self.T_on * (np.sum(self.w / D) - L) / math.pi
               - 1j * Wk0 * self.T_on / (2 * k0))
        return out


def even_kernel(reduced, k, q):
    return 0.5 * (v_eff_fourier(reduced, k - q) + v_eff_fourier(reduced, k + q))


def _pv_log(k0, cutoff):
    return math.log((cutoff + k0) / (cutoff - k0)) / (2 * k0)


def _nodes(k0, cutoff, n):
    mid = max(cutoff / 4, 3 * k0)
    edges = [0.0, k0, 2 * k0, mid, cutoff]
    x, w = np.polynomial.legendre.leggauss(n)
    qs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        qs.append(0.5 * (b - a) * x + 0.5 * (b + a))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(qs), np.concatenate(ws)


def _system(reduced, k0, cutoff, n):
    q, w = _nodes(k0, cutoff, n)
    D = k0**2 - q**2
    L = _pv_log(k0, cutoff)
    pts = np.append(q, k0)
    Wpq = even_kernel(reduced, pts[:, None], q[None, :])
    Wp0 = even_kernel(reduced, pts, k0)
    N = len(q)
    A = np.eye(N + 1, dtype=complex)
    A[:, :N] -= Wpq * (w / D) / math.pi
    A[:, N] += Wp0 * (np.sum(w / D) - L) / math.pi + 1j * Wp0 / (2 * k0)
    b = Wp0.astype(complex)
    return q, w, A, b


def _solve_once(reduced, k0, cutoff, n):
    q, w, A, b = _system(reduced, k0, cutoff, n)
    lu, piv = linalg.lu_factor(A)
    x = linalg.lu_solve((lu, piv), b)
    nb = np.linalg.norm(b)
    res = np.linalg.norm(A @ x - b) / nb if nb > 0 else float(np.linalg.norm(A @ x))
    rcond = linalg.lapack.zgecon(lu, np.linalg.norm(A, 1), norm="1")[0]
    cond = 1 / rcond if rcond > 0 else np.inf
    return q, w, x, res, cond


def solve_t(reduced: ReducedPotential, energy, n_per_segment=64, cutoff=40.0,
            refine_tol=1e-4, residual_tol=1e-10, cond_limit=1e10) -> TMatrixSolution:
    """Solve the half-shell T-matrix at reduced energy ``energy`` = k_on^2 > 0.

    The solve is repeated with twice the nodes; a relative change of the
    on-shell element above ``refine_tol`` raises ConvergenceError.
    """
    reduced.require_regular()
    if energy <= 0:
        raise ValueError("T-matrix solve needs a positive (scattering) energy")
    k0 = math.sqrt(energy)
    if 3 * k0 >= cutoff:
        raise ConvergenceError("momentum cutoff too small for this energy")
    q, w, x, res, cond = _solve_once(reduced, k0, cutoff, 2 * n_per_segment)
    _, _, xc, _, _ = _solve_once(reduced, k0, cutoff, n_per_segment)
    T_on = complex(x[-1])
    scale = max(abs(T_on), 1e-300)
    change = 0.0 if T_on == 0 and xc[-1] == 0 else abs(xc[-1] - T_on) / scale
    if change > refine_tol:
        raise ConvergenceError(f"on-shell T changed by {change:.2e} on grid doubling (grid too coarse)")
    if res > residual_tol:
        raise ConvergenceError(f"linear-system residual {res:.2e} above {residual_tol:g}")
    return TMatrixSolution(reduced, k0, q, w, x[:-1], T_on, cutoff, 2 * n_per_segment,
                           float(res), float(cond), bool(cond > cond_limit), float(change))


def offshell_matrix(reduced: ReducedPotential, energy, n_per_segment=64, cutoff=40.0):
    """T(p_i, p_j) on the node set plus the on-shell point (last index)."""
    k0 = math.sqrt(energy)
    q, w, A, _ = _system(reduced, k0, cutoff, n_per_segment)
    pts = np.append(q, k0)
    B = even_kernel(reduced, pts[:, None], pts[None, :]).astype(complex)
    return pts, np.linalg.solve(A, B)


def smatrix(sol: TMatrixSolution) -> complex:
    return 1 - 1j * sol.T_on / sol.k_on


def onshell_phase(sol: TMatrixSolution, unitarity_tol=1e-6) -> float:
    """Even-channel phase shift with psi ~ cos(k u + phi), phi in [-pi/2, pi/2)."""
    S = smatrix(sol)
    if abs(abs(S) - 1) > unitarity_tol:
        raise UnitarityError(f"|S| - 1 = {abs(S) - 1:.2e}; quadrature or pole handling failed")
    phi = 0.5 * np.angle(S)
    return float((phi + math.pi / 2) % math.pi - math.pi / 2)


# ---------------------------------------------------------------- wavefunctions

@dataclass
class WaveFunctions:
    u: np.ndarray
    psi: np.ndarray  # relative (polariton) wavefunction
    psi_ss: np.ndarray  # two-Rydberg amplitude
    source: np.ndarray  # W psi
    mask: np.ndarray  # True where psi is reliable (W not negligible)


def _fine_q(cutoff, width=0.25, order=12):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.arange(0.0, cutoff + 1e-12, width)
    a, b = edges[:-1, None], edges[1:, None]
    q = (0.5 * (b - a) * x + 0.5 * (b + a)).ravel()
    wq = (0.5 * (b - a) * w).ravel()
    return q, wq


def source_density(sol: TMatrixSolution, u):
    """(W psi)(u) = (1/pi) int_0^inf cos(q u) T(q, k_on) dq."""
    q, wq = _fine_q(sol.cutoff)
    Tq = sol.half_shell(q)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return (np.cos(np.outer(u, q)) * wq) @ Tq / math.pi


def wavefunction_from_t(sol: TMatrixSolution, u, mask_tol=1e-8) -> WaveFunctions:
    """psi and psi_ss on a reduced grid u = r / xi.

    W psi = (bare interaction) psi_ss, and psi = (1 - chibar V) psi_ss with
    chibar V = s / u^6 in reduced units.
    """
    rp = sol.reduced
    u = np.atleast_1d(np.asarray(u, dtype=float))
    src = source_density(sol, u)
    W = rp(u)
    mask = np.abs(W) > mask_tol * rp.strength
    psi = np.full(u.shape, np.nan + 0j)
    psi[mask] = src[mask] / W[mask]
    psi_ss = src * u**6 / rp.tail
    return WaveFunctions(u, psi, psi_ss, src, mask)


def scattered_wave(sol: TMatrixSolution, u, u_source=12.0, n_source=800):
    """psi(u) = cos(k u) + int G(u - u') (W psi)(u') du' with the outgoing
    1D Green's function; usable far outside the potential."""
    k = sol.k_on
    x, w = np.polynomial.legendre.leggauss(n_source)
    up = 0.5 * u_source * (x + 1)
    wp = 0.5 * u_source * w
    src = source_density(sol, up)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    G = (np.exp(1j * k * np.abs(u[:, None] - up[None, :]))
         + np.exp(1j * k * np.abs(u[:, None] + up[None, :]))) / (2j * k)
    return np.cos(k * u) + (G * wp) @ src
