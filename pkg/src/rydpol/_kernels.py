"""Numerov kernels for psi'' = f psi on a uniform grid starting at u = 0.

Every kernel exists twice: the plain Python source (``*_py``) and a numba
compiled copy (``*_jit``). The public names point at one of the two depending
on the environment flag read in ``_accel``.
"""
import math

import numpy as np

from ._accel import JIT_DISABLED, compile_kernel

_BIG = 1e150


def _numerov_even(f, h, psi):
    # even start: psi(0) = 1, psi'(0) = 0, f symmetric about u = 0
    n = f.shape[0]
    c = h * h / 12.0
    psi[0] = 1.0
    psi[1] = (1.0 + 5.0 * c * f[0]) / (1.0 - c * f[1])
    for i in range(1, n - 1):
        psi[i + 1] = (2.0 * psi[i] * (1.0 + 5.0 * c * f[i])
                      - psi[i - 1] * (1.0 - c * f[i - 1])) / (1.0 - c * f[i + 1])
        if abs(psi[i + 1]) > _BIG:
            for j in range(i + 2):
                psi[j] /= _BIG
    return psi


def _count_below(w, e, h):
    """Number of even bound states with energy below ``e``.

    Nodes of the outward solution on [0, u_{n-2}], plus one if the solution
    at u_{n-2} is heading for a zero beyond the grid (checked against the
    decaying exponential exp(-sqrt(-e) u)).
    """
    n = w.shape[0]
    c = h * h / 12.0
    f0 = w[0] - e
    f1 = w[1] - e
    p0 = 1.0
    p1 = (1.0 + 5.0 * c * f0) / (1.0 - c * f1)
    nodes = 0
    if p1 * p0 < 0.0:
        nodes += 1
    for i in range(1, n - 2):
        f2 = w[i + 1] - e
        p2 = (2.0 * p1 * (1.0 + 5.0 * c * f1) - p0 * (1.0 - c * f0)) / (1.0 - c * f2)
        if p2 * p1 < 0.0 or (p2 == 0.0 and p1 != 0.0):
            nodes += 1
        if abs(p2) > _BIG:
            p1 /= _BIG
            p2 /= _BIG
        p0, p1 = p1, p2
        f0, f1 = f1, f2
    # p1 is psi_{n-2}, p0 is psi_{n-3}; one more step for psi_{n-1}
    f2 = w[n - 1] - e
    p2 = (2.0 * p1 * (1.0 + 5.0 * c * f1) - p0 * (1.0 - c * f0)) / (1.0 - c * f2)
    d = ((1.0 - 2.0 * c * f2) * p2 - (1.0 - 2.0 * c * f0) * p0) / (2.0 * h)
    kap = math.sqrt(-e) if e < 0.0 else 0.0
    if p1 * (d + kap * p1) < 0.0:
        nodes += 1
    return nodes


numerov_even_py = _numerov_even
count_below_py = _count_below
numerov_even_jit = compile_kernel(_numerov_even)
count_below_jit = compile_kernel(_count_below)

if JIT_DISABLED:
    numerov_even = numerov_even_py
    count_below = count_below_py
else:
    numerov_even = numerov_even_jit
    count_below = count_below_jit


def integrate_even(w, e, h):
    """Outward even solution of -psi'' + w psi = e psi, sampled on the grid of ``w``."""
    f = np.ascontiguousarray(w - e, dtype=np.float64)
    psi = np.empty_like(f)
    numerov_even(f, float(h), psi)
    return psi


def derivative(psi, f, h, i):
    """Fourth-order derivative of a Numerov solution at interior index ``i``."""
    c = h * h / 6.0
    return ((1.0 - c * f[i + 1]) * psi[i + 1] - (1.0 - c * f[i - 1]) * psi[i - 1]) / (2.0 * h)
