"""Single-polariton modes and the exact two-polariton pair propagator.

Basis order is (e, p, s): photon, intermediate p-level, Rydberg s-level.
Mode order is (dark, upper, lower), i.e. alpha = 0, +1, -1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .params import SystemParams, char_energy, polariton_mass

DARK, UPPER, LOWER = 0, 1, 2
_S = 2  # index of the Rydberg component


class OnShellError(ValueError):
    pass


def hamiltonian(p: SystemParams, q):
    """Stack of 3x3 single-particle matrices, shape (len(q), 3, 3)."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    dt = float if p.gamma == 0 else complex
    H = np.zeros(q.shape + (3, 3), dtype=dt)
    H[..., 0, 0] = p.c * q
    H[..., 0, 1] = H[..., 1, 0] = p.g
    H[..., 1, 1] = p.Delta
    H[..., 1, 2] = H[..., 2, 1] = p.omega
    return H


@dataclass
class ModeDecomposition:
    q: np.ndarray
    energies: np.ndarray  # (n, 3) in mode order (dark, upper, lower)
    U: np.ndarray  # (n, 3, 3): U[alpha, basis], mode amplitudes from (e, p, s)
    Ubar: np.ndarray  # (n, 3, 3): inverse of U
    degenerate: np.ndarray  # (n,) bool

    def s_weights(self):
        """Rydberg weights Ubar[s, alpha] * U[alpha, s], shape (n, 3)."""
        return self.Ubar[..., _S, :] * self.U[..., :, _S]

    def residual(self, p: SystemParams):
        """max_alpha ||H u - eps u|| / ||H|| over the stack."""
        H = hamiltonian(p, self.q)
        V = self.Ubar
        r = H @ V - V * self.energies[..., None, :]
        return np.max(np.linalg.norm(r, axis=-2), axis=-1) / np.linalg.norm(H, axis=(-2, -1))


def single_particle_modes(p: SystemParams, q, degeneracy_tol: float = 1e-10) -> ModeDecomposition:
    q = np.atleast_1d(np.asarray(q, dtype=float))
    H = hamiltonian(p, q)
    if p.gamma == 0:
        e, V = np.linalg.eigh(H)  # ascending: lower, dark, upper
        order = [1, 2, 0]
        e = e[..., order]
        V = V[..., order]
        U = np.swapaxes(V, -1, -2)
    else:
        e, V = np.linalg.eig(H)
        idx = np.argsort(e.real, axis=-1)[..., [1, 2, 0]]
        e = np.take_along_axis(e, idx, axis=-1)
        V = np.take_along_axis(V, idx[..., None, :], axis=-1)
        U = np.linalg.inv(V)
    scale = np.maximum(np.abs(e).max(axis=-1), 1e-300)
    gaps = np.min(np.abs(e[..., [0, 0, 1]] - e[..., [1, 2, 2]]), axis=-1)
    return ModeDecomposition(q, e, U, V, gaps < degeneracy_tol * scale)


def mode_scan(p: SystemParams, qs):
    """Energies along a momentum scan with labels carried by eigenvector overlap.

    For gamma = 0 the sorted labelling is already continuous; with losses the
    real parts of two branches can cross, so each step is matched to the
    previous one by maximal overlap.
    """
    md = single_particle_modes(p, qs)
    if p.gamma == 0:
        return md.energies
    e = md.energies.copy()
    V = md.Ubar.copy()
    for i in range(1, len(e)):
        ov = np.abs(np.conj(V[i - 1]).T @ V[i])
        perm = np.argmax(ov, axis=1)
        if len(set(perm)) == 3:
            e[i] = e[i][perm]
            V[i] = V[i][:, perm]
    return e


def dark_energy(p: SystemParams, q):
    return single_particle_modes(p, q).energies[..., DARK]


def default_eta(p: SystemParams) -> float:
    return 1e-6 * char_energy(p)


def chi_exact(p: SystemParams, q, K, omega, eta=None):
    """Exact pair propagator: the nine-term sum over mode pairs.

    ``eta`` is the +i0 regulator; ``None`` selects 1e-6 * omega_c.
    """
    if eta is None:
        eta = default_eta(p)
    qa = np.atleast_1d(np.asarray(q, dtype=float))
    m1 = single_particle_modes(p, K / 2 + qa)
    m2 = single_particle_modes(p, K / 2 - qa)
    w1, w2 = m1.s_weights(), m2.s_weights()
    den = omega - m1.energies[:, :, None] - m2.energies[:, None, :] + 1j * eta
    if eta == 0:
        scale = max(abs(omega), char_energy(p))
        if np.any(np.abs(den) < 1e-13 * scale):
            raise OnShellError("on-shell singularity; supply eta>0")
    out = np.sum(w1[:, :, None] * w2[:, None, :] / den, axis=(1, 2))
    return out[0] if np.ndim(q) == 0 else out


# ---------------------------------------------------------------- pole structure

def _inverse_dispersion(p: SystemParams, z):
    """Momentum of a single-particle state with energy z."""
    Q = z * z - p.Delta * z - p.omega**2
    return (z - p.g**2 * z / Q) / p.c


def pair_poles(p: SystemParams, K, omega):
    """Positions x = q^2 of the pair-propagator poles, dark-dark pole first.

    Two particles with energies z1 + z2 = omega and momenta summing to K.
    Writing z = omega/2 +- t, the condition is a polynomial even in t, so at
    most two values of t^2 (one when omega = cK).
    """
    D, O2, g2 = p.Delta, p.omega**2, p.g**2
    lam = (omega - p.c * K) / g2
    t = Polynomial([0, 1])
    z1, z2 = omega / 2 + t, omega / 2 - t
    Q1 = z1 * z1 - D * z1 - O2
    Q2 = z2 * z2 - D * z2 - O2
    poly = z1 * Q2 + z2 * Q1 - lam * Q1 * Q2
    even = np.asarray(poly.coef[0::2], dtype=complex)
    tol = 1e-14 * np.max(np.abs(even))
    while len(even) > 1 and abs(even[-1]) <= tol:
        even = even[:-1]
    if len(even) < 2:
        return []
    ys = Polynomial(even).roots()
    ys = sorted(ys, key=abs)
    out = []
    for y in ys:
        tt = np.sqrt(complex(y))
        a, b = omega / 2 + tt, omega / 2 - tt
        qq = (_inverse_dispersion(p, a) - _inverse_dispersion(p, b)) / 2
        x = qq * qq
        if p.gamma == 0 and abs(x.imag) <= 1e-12 * max(abs(x), 1e-300):
            x = x.real
        out.append(x)
    return out


@dataclass
class PairPropagatorFit:
    chibar: complex
    alpha: complex
    wbar: complex
    alpha_B: complex
    wbar_B: complex
    residual: float
    K: float
    omega: float
    n_poles: int
    condition: float
    ill_conditioned: bool
    complex_poles: bool
    x_grid: np.ndarray

    def model(self, p: SystemParams, q):
        """Three-term form evaluated at momenta q."""
        m = polariton_mass(p)
        x = np.asarray(q, dtype=float) ** 2
        out = self.chibar + self.alpha * m / (m * self.wbar - x)
        if self.n_poles > 1:
            out = out + self.alpha_B * m / (m * self.wbar_B - x)
        return out


def default_fit_grid(x_pole, m, omega_c):
    X = max(abs(x_pole), 1e-4 * abs(m) * omega_c) if x_pole is not None else abs(m) * omega_c
    return np.concatenate([np.linspace(0.0, 3.0, 41) * X, np.geomspace(1e-3, 1e5, 80) * X]), X


def fit_three_term(p: SystemParams, K, omega, qgrid=None, cond_limit: float = 1e10) -> PairPropagatorFit:
    """Extract (chibar, alpha, wbar, alpha_B, wbar_B) from the exact propagator.

    Pole positions come from ``pair_poles``; the constant and the two residues
    from linear least squares in x = q^2. A momentum-independent default grid
    (spanning from well inside the first pole to far beyond it, which pins the
    constant) is always included; ``qgrid`` adds extra points.
    """
    m = polariton_mass(p)
    poles = pair_poles(p, K, omega)
    if not poles:
        raise ValueError("pair propagator has no finite poles at this (K, omega)")
    xs, X = default_fit_grid(poles[0], m, char_energy(p))
    if qgrid is not None:
        xs = np.concatenate([xs, np.asarray(qgrid, dtype=float) ** 2])
    xs = np.unique(xs)
    for xp in poles:
        xs = xs[np.abs(xs - xp) > 0.03 * X]
    if len(xs) < 12:
        raise ValueError("fit grid needs at least 12 distinct q^2 values away from the poles")
    chi = chi_exact(p, np.sqrt(xs), K, omega, eta=0.0)
    cols = [np.ones_like(xs)] + [1.0 / (xp - xs) for xp in poles]
    A = np.column_stack(cols).astype(complex)
    colscale = np.max(np.abs(A), axis=0)
    As = A / colscale
    co, *_ = np.linalg.lstsq(As, chi, rcond=None)
    co = co / colscale
    cond = float(np.linalg.cond(As))
    fitted = A @ co
    resid = float(np.max(np.abs(fitted - chi) / (np.abs(chi) + abs(co[0]))))
    lossless = p.gamma == 0 and all(np.isreal(xp) for xp in poles)
    conv = (lambda z: float(np.real(z))) if lossless else complex
    mm = m if lossless else complex(m)
    aB, wB = (co[2] / m, poles[1] / mm) if len(poles) > 1 else (0.0, np.inf)
    return PairPropagatorFit(
        chibar=conv(co[0]), alpha=conv(co[1] / m), wbar=conv(poles[0] / mm),
        alpha_B=conv(aB) if len(poles) > 1 else 0.0, wbar_B=conv(wB) if len(poles) > 1 else np.inf,
        residual=resid, K=float(K), omega=float(omega), n_poles=len(poles), condition=cond,
        ill_conditioned=cond > cond_limit,
        complex_poles=any(np.iscomplexobj(xp) and abs(np.imag(xp)) > 0 for xp in poles),
        x_grid=xs)


def zeta_from(wbar, alpha, wbar_B, alpha_B):
    """sqrt|wbar alpha_B^2 / (wbar_B alpha^2)|, set to 0 where it has a 0/0 or x/inf form."""
    if wbar == 0 or alpha_B == 0 or not np.isfinite(wbar_B):
        return 0.0
    return float(np.sqrt(abs(wbar * alpha_B**2 / (wbar_B * alpha**2))))


def zeta_exact(p: SystemParams, K, omega) -> float:
    f = fit_three_term(p, K, omega)
    return zeta_from(f.wbar, f.alpha, f.wbar_B, f.alpha_B)
