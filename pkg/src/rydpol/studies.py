"""Named batch studies: each turns parameters plus grids into a table."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import manybody, regimes, schroedinger, tmatrix
from .params import RegimeLabel, SystemParams, classify_regime, params_for_strength
from .polariton_modes import chi_exact, fit_three_term
from .potential import ReducedPotential

TOL_DEFAULTS = {
    "h": 1e-3,
    "u_max": 30.0,
    "threshold": 0.1,
    "n_nodes": 64,
    "cutoff": 40.0,
    "s_max": 1e4,
    "n_scan": 240,
    "dk": 0.1,
}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int
    log: bool = False

    @classmethod
    def parse(cls, text):
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
            raise UsageError(f"bad grid {text!r}; expected min:max:count[:log]")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"bad grid {text!r}; expected min:max:count[:log]") from None
        log = len(parts) == 4 and parts[3] == "log"
        if count < 1:
            raise UsageError(f"empty grid {text!r}")
        if log and (lo <= 0 or hi <= 0):
            raise UsageError(f"log grid needs positive bounds: {text!r}")
        return cls(lo, hi, count, log)

    def values(self):
        if self.count == 1:
            return np.array([self.lo])
        if self.log:
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def __str__(self):
        return f"{self.lo!r}:{self.hi!r}:{self.count}" + (":log" if self.log else "")


@dataclass
class Context:
    params: SystemParams
    grids: list
    tol: dict
    threads: int = 1
    branch: str = "attractive"
    strengths: tuple | None = None
    regime: str = "auto"
    point: tuple = (0.0, 0.0)

    @property
    def grid(self):
        return schroedinger.Grid(self.tol["h"], self.tol["u_max"])

    def axis(self, i, default=None):
        if i < len(self.grids):
            return self.grids[i].values()
        if default is None:
            raise UsageError(f"study needs at least {i + 1} --grid option(s)")
        return np.asarray(default, dtype=float)


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)
    status: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def failure_fraction(self):
        if not self.status:
            return 0.0
        return sum(s.startswith("failed") for s in self.status) / len(self.status)


def _pmap(fn, items, threads):
    """Order-preserving map, optionally over a thread pool."""
    items = list(items)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _guard(fn, width):
    def run(arg):
        try:
            rows = fn(arg)
            return rows, None
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            return [tuple(arg) + (math.nan,) * (width - len(arg))], f"failed: {exc}"
    return run


def _collect(table, results):
    for rows, err in results:
        for r in rows:
            table.rows.append(r)
            table.status.append(err or "ok")
    return table


def _need_lossless(ctx, what):
    if ctx.params.gamma != 0:
        raise UsageError(f"{what} requires gamma=0")


# ---------------------------------------------------------------- studies

def study_coeffs(ctx: Context) -> Table:
    p = ctx.params
    kappas = ctx.axis(0)
    xs = ctx.axis(1, [0.0])
    cols = ["kappa", "x", "K", "omega", "regime", "chibar", "alpha", "wbar", "alpha_B",
            "wbar_B", "zeta", "valid"]

    def point(arg):
        kap, x = arg
        K, w = regimes.from_reduced(p, kap, x)
        lab = ctx.regime
        if lab == "auto":
            rep = classify_regime(p, K, w, ctx.tol["threshold"])
            lab = "exact" if rep.label is RegimeLabel.OUTSIDE else rep.label.value
        co = regimes.coefficients(p, K, w, lab, ctx.tol["threshold"])
        name = "exact" if lab == "exact" else co.regime.value
        return [(kap, x, K, w, name, co.chibar, co.alpha, co.wbar, co.alpha_B, co.wbar_B,
                 co.zeta, int(bool(co.valid)))]

    items = [(k, x) for k in kappas for x in xs]
    return _collect(Table(cols), _pmap(_guard(point, len(cols)), items, ctx.threads))


def study_zeta_map(ctx: Context) -> Table:
    p = ctx.params
    kappas, xs = ctx.axis(0), ctx.axis(1, [0.0])
    cols = ["kappa", "x", "zeta", "zeta_far_detuned"]

    def point(arg):
        kap, x = arg
        K, w = regimes.from_reduced(p, kap, x)
        z = regimes.coeffs_exact(p, K, w).zeta
        try:
            zf = regimes.coeffs_far_detuned(p, K, w).zeta
        except ArithmeticError:
            zf = math.inf
        return [(kap, x, z, zf)]

    items = [(k, x) for k in kappas for x in xs]
    return _collect(Table(cols), _pmap(_guard(point, len(cols)), items, ctx.threads))


def study_scan_a1d(ctx: Context) -> Table:
    ratios = ctx.axis(0)
    if len(ratios) < 2:
        raise UsageError("scan-a1d needs a grid with count >= 2")
    res = schroedinger.scan_scattering_length(ratios, ctx.branch, ctx.grid, ctx.threads)
    t = Table(["strength", "a1d_over_lambda", "n_bound", "resonance_flag"])
    flags = res.resonance_flag
    for i, r in enumerate(ratios):
        t.rows.append((r, res.a_over_lambda[i], int(res.n_bound[i]), int(flags[i])))
        t.status.append("ok" if res.converged[i] else f"failed: {res.errors.get(i, 'no result')}")
    t.meta.update(branch=ctx.branch,
                  divergences=[[float(ratios[i]), float(ratios[j])] for i, j in res.divergences],
                  zero_crossings=[[float(ratios[i]), float(ratios[j])] for i, j in res.zero_crossings])
    return t


def study_spectrum(ctx: Context) -> Table:
    if ctx.params.gamma != 0:
        raise UsageError("bound-state search requires gamma=0")
    p = ctx.params
    regime = RegimeLabel.FAR_DETUNED if ctx.regime in ("auto", "exact") else RegimeLabel.parse(ctx.regime)
    if ctx.strengths:
        p = params_for_strength(p, ctx.strengths[0], regime=regime)
    kappas = ctx.axis(0)
    if len(kappas) < 2:
        raise UsageError("spectrum needs a grid with count >= 2")
    cols = ["kappa", "x_n", "branch", "x_edge", "residual_over_wc"]
    wc = min(abs(p.delta), 2 * p.omega**2 / abs(p.delta))

    def point(kap):
        K, _ = regimes.from_reduced(p, kap, 0.0)
        edge = regimes.to_reduced(p, 0.0, schroedinger.continuum_edge(p, K, regime))[1]
        states = schroedinger.self_consistent_spectrum(
            p, K, regime, ctx.grid, n_scan=int(ctx.tol["n_scan"]), s_max=ctx.tol["s_max"])
        if not states:
            return [(kap, math.nan, -1, edge, 0.0)]
        return [(kap, b.x, b.n, edge, b.residual / wc) for b in states]

    def run(kap):
        try:
            rows = point(kap)
            return rows, ("no bound state" if rows[0][2] == -1 else None)
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            return [(kap, math.nan, -1, math.nan, math.nan)], f"failed: {exc}"

    t = _collect(Table(cols), _pmap(run, kappas, ctx.threads))
    t.meta.update(c6=p.c6, regime=regime.value)
    return t


def study_tmatrix_check(ctx: Context) -> Table:
    _need_lossless(ctx, "tmatrix-check")
    ks = ctx.axis(0)
    cols = ["strength", "sigma", "k", "phi_ode", "phi_tmatrix", "abs_diff", "abs_s_minus_1"]
    sigmas = {"attractive": [1], "repulsive": [-1], "both": [1, -1]}[ctx.branch]
    items = [(s, sg, k) for s in (ctx.strengths or (0.5, 1.0, 5.0)) for sg in sigmas for k in ks]

    def point(arg):
        s, sg, k = arg
        rp = ReducedPotential(s * s, -1, sg)
        po = schroedinger.phase_shift(rp, k, ctx.grid)
        sol = tmatrix.solve_t(rp, k * k, int(ctx.tol["n_nodes"]), ctx.tol["cutoff"])
        pt = tmatrix.onshell_phase(sol)
        d = abs((pt - po + math.pi / 2) % math.pi - math.pi / 2)
        return [(s, sg, k, po, pt, d, abs(abs(tmatrix.smatrix(sol)) - 1))]

    return _collect(Table(cols), _pmap(_guard(point, len(cols)), items, ctx.threads))


def study_adiabatic_check(ctx: Context) -> Table:
    ratios = ctx.axis(0)
    kap, x = ctx.point
    cols = ["rabi_over_detuning", "d_alpha_m", "d_chibar", "d_wbar_m"]

    def point(r):
        p = ctx.params.replace(omega=float(r) * abs(ctx.params.delta), gamma=0.0)
        return [(r,) + tuple(regimes.adiabatic_discrepancy(p, kap, x))]

    t = _collect(Table(cols), _pmap(_guard(lambda a: point(a[0]), len(cols)),
                                    [(r,) for r in ratios], ctx.threads))
    t.meta.update(kappa=kap, x=x)
    return t


def study_chi(ctx: Context) -> Table:
    p = ctx.params
    kap, x = ctx.point
    K, w = regimes.from_reduced(p, kap, x)
    qxi = ctx.axis(0)
    xi = abs(p.c6 * regimes.chibar_full(p, w)) ** (1 / 6)
    chi = chi_exact(p, qxi / xi, K, w)
    t = Table(["q_xi", "q", "re_chi", "im_chi"])
    for a, b, c in zip(qxi, qxi / xi, chi):
        t.rows.append((a, b, float(np.real(c)), float(np.imag(c))))
        t.status.append("ok")
    f = fit_three_term(p, K, w, qgrid=qxi / xi)
    t.meta.update(K=K, omega=w, fit=dict(
        chibar=_jsonable(f.chibar), alpha=_jsonable(f.alpha), wbar=_jsonable(f.wbar),
        alpha_B=_jsonable(f.alpha_B), wbar_B=_jsonable(f.wbar_B), residual=f.residual,
        n_poles=f.n_poles, ill_conditioned=f.ill_conditioned))
    return t


def study_potential(ctx: Context) -> Table:
    us = ctx.axis(0)
    s = (ctx.strengths or (1.0,))[0]
    rp = ReducedPotential.attractive(s) if ctx.branch != "repulsive" else ReducedPotential.repulsive(s)
    t = Table(["u", "W"])
    for u, wv in zip(us, rp(us)):
        t.rows.append((u, float(wv)))
        t.status.append("ok")
    t.meta.update(strength=s, sigma=rp.sigma)
    return t


def study_manybody(ctx: Context) -> Table:
    ratios = ctx.axis(0)
    branch = "repulsive" if ctx.branch == "repulsive" else "attractive"
    res = schroedinger.scan_scattering_length(ratios, branch, ctx.grid, ctx.threads)
    dk = ctx.tol["dk"]
    t = Table(["strength", "a1d_over_lambda", "g1d_reduced", "label", "phi"])
    for i, r in enumerate(ratios):
        a = res.a_over_lambda[i]
        if not res.converged[i]:
            t.rows.append((r, math.nan, math.nan, "", math.nan))
            t.status.append(f"failed: {res.errors.get(i)}")
            continue
        g = manybody.pseudo_coupling(a, 1.0).g1d if a != 0 else math.inf
        ph = manybody.collision_phase(dk, 1.0, a).phi
        t.rows.append((r, a, g, manybody.crossover_label(a).value, ph))
        t.status.append("ok")
    t.meta.update(branch=branch, dk_lambda=dk,
                  units="a1d and g1d in units of lambda_bar and hbar^2/(m lambda_bar)")
    return t


STUDIES = {
    "coeffs": study_coeffs,
    "zeta-map": study_zeta_map,
    "scan-a1d": study_scan_a1d,
    "spectrum": study_spectrum,
    "tmatrix-check": study_tmatrix_check,
    "adiabatic-check": study_adiabatic_check,
    "chi": study_chi,
    "potential": study_potential,
    "manybody": study_manybody,
}


def _jsonable(z):
    if isinstance(z, complex) or np.iscomplexobj(z):
        return [float(np.real(z)), float(np.imag(z))]
    return float(z)


def run(name, ctx: Context) -> Table:
    if name not in STUDIES:
        raise UsageError(f"unknown study {name!r}; choose from {', '.join(STUDIES)}")
    return STUDIES[name](ctx)
