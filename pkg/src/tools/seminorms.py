"""
Seminorms of Hermite-Gaussian test functions

    p_norm     sup_z |f(z)| (1+|z|)^k exp(-phi_nu(|Im z|))
    R_seminorm sup_{x,alpha} (1+|x|)^m |D^a f(x)| exp(psi_nu*(|a|)) / a!
    G_norm     sup_{x,|a|<=m,beta} |x^b D^a f(x)| exp(psi_nu*(|b|)) / |b|!
    N_norm     max_{|a|<=m} sup_{x,k} (1+|x|)^k |D^a f(x)| exp(psi_nu*(k)) / k!
    q_norm     sup_{x,|a|<=m} |D^a f(x)| exp(phi_nu*(|x|))
    calN_norm  sup_z |f(z)| (1+|z|)^k exp(-(psi_nu*)*(ln(1+|Im z|)))

Every sup is taken in log-space on an axis-aligned box grid that grows
until the boundary is negligible, then zoomed around each shell's argmax.
Shell sequences (over |alpha|, |beta| or k) carry a geometric tail bound.
"""

import threading
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline
from scipy.special import gamma, gammaln, xlogy

from src.models.schemas import SeminormValue, SupSearchConfig
from src.tools.conjugate import conjugate_function, conjugate_profile, exp_conjugate, psi_weight
from src.tools.functions import (
    TestFunction,
    derivatives_at,
    evaluate,
    log_multi_factorial,
    multi_indices,
    shell,
)
from src.tools.weights import WeightFamily, WeightFunction
from src.utils.config import settings
from src.utils.errors import (
    ConfigError,
    ConvexityRequiredError,
    NotConvergedError,
    WeightTooWeakError,
)
from src.utils.logger import logger

LOG_BOUNDARY = float(np.log(1e-9))
LOG_TAIL = float(np.log(1e-6))
MAX_GRID_DIMENSION = 2

# (S, P) log values per shell and point, plus the inner index achieving each
LogTable = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

_cache_lock = threading.Lock()


def sphere_area(n: int) -> float:
    """s_n(1) = 2 pi^(n/2) / Gamma(n/2)"""
    if n < 1:
        raise ConfigError(f"sphere_area needs n >= 1, got {n}")
    return float(2.0 * np.pi ** (n / 2) / gamma(n / 2))


# ============================================================
# MEMOIZED CONJUGATES
# ============================================================

@dataclass(frozen=True)
class _RadialMemo:
    r_max: float
    spline: CubicSpline


def _member(family: WeightFamily, nu: int) -> WeightFunction:
    try:
        return family[nu]
    except IndexError as exc:
        raise ConfigError(str(exc)) from exc


def psi_star_orders(family: WeightFamily, nu: int) -> np.ndarray:
    """psi_nu*(k) for k = 0..alpha_cap"""
    key = ("psi_star_orders", nu)
    with _cache_lock:
        cached = family.cache.get(key)
    if cached is not None:
        return cached
    ks = np.arange(settings.alpha_cap + 1, dtype=float)
    values = exp_conjugate(_member(family, nu), ks)
    with _cache_lock:
        return family.cache.setdefault(key, values)


def _radial_source(family: WeightFamily, nu: int, kind: str) -> Callable[[np.ndarray], np.ndarray]:
    phi = _member(family, nu)
    if kind == "phi_star":
        return lambda r: conjugate_profile(phi, phi.convex_flag, r)
    if kind == "psi_star_star":
        psi = psi_weight(phi)
        # psi* is convex whatever psi is
        return lambda t: conjugate_profile(conjugate_function(psi, psi.convex_flag), True, t)
    raise ConfigError(f"unknown radial conjugate {kind!r}")


def radial_conjugate(family: WeightFamily, nu: int, kind: str, r) -> np.ndarray:
    """
    phi_nu*(r) or (psi_nu*)*(r) from a cubic interpolant on 0 plus a geometric grid

    The interpolant is rebuilt over a wider range when r leaves it. The build
    runs outside the lock; a concurrent build reaching further wins.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ConfigError("radial conjugates are defined for r >= 0")
    top = float(np.max(r)) if r.size else 0.0
    key = (kind, nu)
    with _cache_lock:
        memo = family.cache.get(key)
    if memo is None or top > memo.r_max:
        r_max = max(2.0 * top, 1.0 if memo is None else 2.0 * memo.r_max)
        nodes = np.concatenate([[0.0], np.geomspace(1e-3, r_max, settings.radial_nodes - 1)])
        values = _radial_source(family, nu, kind)(nodes)
        built = _RadialMemo(r_max, CubicSpline(nodes, values))
        with _cache_lock:
            current = family.cache.get(key)
            if current is None or current.r_max < built.r_max:
                family.cache[key] = built
                logger.debug(f"{family.label}: radial {kind} for nu={nu} rebuilt up to r={r_max:g}")
            else:
                built = current
        memo = built
    return memo.spline(r)


# ============================================================
# BOX SEARCH
# ============================================================

@dataclass
class _Search:
    log_shells: np.ndarray
    points: np.ndarray
    which: np.ndarray
    half_width: float
    box_converged: bool


def _box(dim: int, half_width: float, points: int) -> tuple[np.ndarray, np.ndarray]:
    axis = np.linspace(-half_width, half_width, points)
    mesh = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    on_edge = np.any(np.abs(mesh) >= half_width, axis=1)
    return mesh, on_edge


def _zoom_offsets(dim: int, step: float) -> np.ndarray:
    count = 9 if dim <= 2 else 5
    axis = np.linspace(-step, step, count)
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)


def _search(log_table: LogTable, dim: int, cfg: SupSearchConfig, label: str,
            detect_weak_weight: bool = False) -> _Search:
    half_width = cfg.half_width
    prev_edge: Optional[float] = None
    growing = 0
    box_converged = False
    for expansion in range(cfg.max_expansions + 1):
        pts, on_edge = _box(dim, half_width, cfg.grid_points)
        table, which = log_table(pts)
        overall = float(np.max(table))
        if np.isneginf(overall):
            box_converged = True
            break
        edge = float(np.max(table[:, on_edge]))
        if edge < overall + LOG_BOUNDARY:
            box_converged = True
            break
        if detect_weak_weight and prev_edge is not None and edge > prev_edge:
            growing += 1
            if growing >= 2:
                raise WeightTooWeakError(
                    f"{label}: objective keeps growing at the box boundary (X = {half_width:g})"
                )
        else:
            growing = 0
        prev_edge = edge
        if expansion < cfg.max_expansions:
            half_width *= cfg.growth_factor
    if not box_converged:
        logger.warning(f"{label}: boundary still above 1e-9 of the sup at X = {half_width:g}")

    shells = table.shape[0]
    rows = np.arange(shells)
    arg = np.argmax(table, axis=1)
    best = table[rows, arg]
    best_pts = pts[arg].copy()
    best_which = which[rows, arg].copy()

    step = 2.0 * half_width / (cfg.grid_points - 1)
    for _ in range(cfg.refine_rounds):
        offsets = _zoom_offsets(dim, step)
        local = (best_pts[:, None, :] + offsets[None, :, :]).reshape(-1, dim)
        t, w = log_table(local)
        j = np.argmax(t, axis=1)
        cand = t[rows, j]
        better = cand > best
        best = np.where(better, cand, best)
        best_pts[better] = local[j[better]]
        best_which[better] = w[rows, j][better]
        step /= 4.0
    return _Search(best, best_pts, best_which, half_width, box_converged)


def _tail(log_shells: np.ndarray, label: str) -> tuple[float, Optional[float]]:
    """Geometric tail from the last three shells; log of the bound and the ratio"""
    if len(log_shells) < 3:
        return float("-inf"), None
    with np.errstate(invalid="ignore"):
        steps = np.diff(log_shells[-3:])
    steps = np.where(np.isnan(steps), -np.inf, steps)
    log_ratio = float(np.max(steps))
    if log_ratio >= 0:
        raise NotConvergedError(
            f"{label}: shell ratio {np.exp(log_ratio):.4g} >= 1 at truncation {len(log_shells) - 1}"
        )
    ratio = float(np.exp(log_ratio))
    return float(log_shells[-1] + log_ratio - np.log1p(-ratio)), ratio


def _finish(name: str, search: _Search, labels: Optional[Sequence[Sequence]] = None,
            truncation: Optional[int] = None, shells_are_orders: bool = True) -> SeminormValue:
    log_value = float(np.max(search.log_shells))
    if np.isneginf(log_value):
        return _zero(name, truncation)
    k = int(np.argmax(search.log_shells))
    log_tail, ratio = (float("-inf"), None)
    if truncation is not None:
        log_tail, ratio = _tail(search.log_shells, name)
    index = None
    if labels is not None:
        index = [int(a) for a in labels[k][int(search.which[k])]]
    converged = search.box_converged and log_tail <= log_value + LOG_TAIL
    with np.errstate(over="ignore"):
        value = float(np.exp(log_value))
        tail = float(np.exp(log_tail))
    return SeminormValue(
        name=name,
        value=value,
        log_value=log_value,
        argmax_point=[float(v) for v in search.points[k]],
        argmax_index=index,
        argmax_k=k if shells_are_orders else None,
        truncation=truncation,
        tail_bound=tail,
        shell_ratio=ratio,
        box_half_width=search.half_width,
        converged=bool(converged),
    )


def _zero(name: str, truncation: Optional[int] = None) -> SeminormValue:
    return SeminormValue(name=name, value=0.0, log_value=float("-inf"), truncation=truncation, converged=True)


def _check(f: TestFunction, budget: Optional[int] = None) -> None:
    if f.n > MAX_GRID_DIMENSION:
        raise ConfigError(f"grid seminorms support n <= {MAX_GRID_DIMENSION}, got n = {f.n}")
    if budget is not None and not 0 <= budget <= settings.alpha_cap:
        raise ConfigError(f"truncation budget {budget} outside 0..alpha_cap = {settings.alpha_cap}")


def _log_abs(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


def _log_derivatives(f: TestFunction, alphas: list) -> Callable[[np.ndarray], np.ndarray]:
    return lambda pts: _log_abs(derivatives_at(f, pts, alphas))


def _best_derivative(f: TestFunction, m: int) -> tuple[list, Callable]:
    """max_{|alpha| <= m} log|D^alpha f| per point, with the maximizing alpha"""
    alphas = multi_indices(f.n, m)
    log_d = _log_derivatives(f, alphas)

    def best(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        table = log_d(pts)
        return np.max(table, axis=0), np.argmax(table, axis=0)

    return alphas, best


def _radius(pts: np.ndarray) -> np.ndarray:
    return np.linalg.norm(pts, axis=1)


# ============================================================
# SEMINORMS OVER C^n
# ============================================================

def _complex_sup(f: TestFunction, k: int, log_weight: Callable[[np.ndarray], np.ndarray],
                 name: str, cfg: Optional[SupSearchConfig]) -> SeminormValue:
    _check(f)
    if f.is_zero():
        return _zero(name)
    n = f.n
    cfg = cfg or SupSearchConfig.for_dimension(2 * n)

    def table(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = pts[:, :n] + 1j * pts[:, n:]
        log_f = _log_abs(evaluate(f, z))
        y_norm = _radius(pts[:, n:])
        vals = log_f + k * np.log1p(_radius(pts)) - log_weight(y_norm)
        return vals[None, :], np.zeros((1, len(pts)), dtype=int)

    return _finish(name, _search(table, 2 * n, cfg, name, detect_weak_weight=True), shells_are_orders=False)


def p_norm(f: TestFunction, family: WeightFamily, nu: int, k: int,
           cfg: Optional[SupSearchConfig] = None) -> SeminormValue:
    """p_{nu,k}(f); argmax_point is (x, y) with z = x + i y"""
    phi = _member(family, nu)
    return _complex_sup(f, k, phi, f"p[nu={nu},k={k}]", cfg)


def calN_norm(f: TestFunction, family: WeightFamily, nu: int, k: int,
              cfg: Optional[SupSearchConfig] = None) -> SeminormValue:
    """Like p_norm with weight exp((psi_nu*)*(ln(1+|y|)))"""
    _member(family, nu)

    def log_weight(y_norm: np.ndarray) -> np.ndarray:
        return radial_conjugate(family, nu, "psi_star_star", np.log1p(y_norm))

    return _complex_sup(f, k, log_weight, f"calN[nu={nu},k={k}]", cfg)


# ============================================================
# SEMINORMS OVER R^n
# ============================================================

def R_seminorm(f: TestFunction, family: WeightFamily, m: int, nu: int, alpha_budget: Optional[int] = None,
               cfg: Optional[SupSearchConfig] = None) -> SeminormValue:
    """R_{m,nu}(f); shells are |alpha| = 0..alpha_budget"""
    budget = settings.alpha_budget if alpha_budget is None else alpha_budget
    _check(f, budget)
    name = f"R[m={m},nu={nu}]"
    psi_star = psi_star_orders(family, nu)
    if f.is_zero():
        return _zero(name, budget)
    n = f.n
    cfg = cfg or SupSearchConfig.for_dimension(n)
    alphas = multi_indices(n, budget)
    log_d = _log_derivatives(f, alphas)
    orders = np.array([sum(a) for a in alphas])
    offsets = np.array([-log_multi_factorial(a) + psi_star[sum(a)] for a in alphas])
    starts = np.searchsorted(orders, np.arange(budget + 2))

    def table(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        full = log_d(pts) + offsets[:, None] + m * np.log1p(_radius(pts))[None, :]
        out = np.empty((budget + 1, len(pts)))
        which = np.empty((budget + 1, len(pts)), dtype=int)
        for s in range(budget + 1):
            block = full[starts[s]:starts[s + 1]]
            out[s] = np.max(block, axis=0)
            which[s] = np.argmax(block, axis=0)
        return out, which

    labels = [shell(n, s) for s in range(budget + 1)]
    return _finish(name, _search(table, n, cfg, name), labels, budget)


def G_norm(f: TestFunction, family: WeightFamily, m: int, nu: int, beta_budget: Optional[int] = None,
           cfg: Optional[SupSearchConfig] = None) -> SeminormValue:
    """||f||_{m,psi_nu*}; shells are |beta|, argmax_index is the maximizing beta"""
    budget = settings.beta_budget if beta_budget is None else beta_budget
    _check(f, budget)
    name = f"G[m={m},nu={nu}]"
    psi_star = psi_star_orders(family, nu)
    if f.is_zero():
        return _zero(name, budget)
    n = f.n
    cfg = cfg or SupSearchConfig.for_dimension(n)
    _, best = _best_derivative(f, m)
    labels = [shell(n, s) for s in range(budget + 1)]
    betas = [np.array(b, dtype=float) for b in labels]

    def table(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        log_d, _ = best(pts)
        abs_x = np.abs(pts)
        out = np.empty((budget + 1, len(pts)))
        which = np.empty((budget + 1, len(pts)), dtype=int)
        for s, beta in enumerate(betas):
            log_xb = np.zeros((len(beta), len(pts)))
            for j in range(n):
                log_xb += xlogy(beta[:, j][:, None], abs_x[:, j][None, :])
            block = log_xb + log_d[None, :] - gammaln(s + 1) + psi_star[s]
            out[s] = np.max(block, axis=0)
            which[s] = np.argmax(block, axis=0)
        return out, which

    return _finish(name, _search(table, n, cfg, name), labels, budget)


def N_norm(f: TestFunction, family: WeightFamily, nu: int, m: int, k_budget: Optional[int] = None,
           cfg: Optional[SupSearchConfig] = None) -> SeminormValue:
    """N_{nu,m}(f); shells are k = 0..k_budget, argmax_index is the maximizing alpha"""
    budget = settings.k_budget if k_budget is None else k_budget
    _check(f, budget)
    name = f"N[nu={nu},m={m}]"
    psi_star = psi_star_orders(family, nu)
    if f.is_zero():
        return _zero(name, budget)
    n = f.n
    cfg = cfg or SupSearchConfig.for_dimension(n)
    alphas, best = _best_derivative(f, m)
    ks = np.arange(budget + 1)
    offsets = psi_star[: budget + 1] - gammaln(ks + 1)

    def table(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        log_d, arg = best(pts)
        log_r = np.log1p(_radius(pts))
        out = ks[:, None] * log_r[None, :] + log_d[None, :] + offsets[:, None]
        return out, np.broadcast_to(arg, out.shape)

    labels = [alphas] * (budget + 1)
    return _finish(name, _search(table, n, cfg, name), labels, budget)


def q_norm(f: TestFunction, family: WeightFamily, m: int, nu: int,
           cfg: Optional[SupSearchConfig] = None) -> SeminormValue:
    """q_{m,nu}(f) with the ordinary conjugate phi_nu*"""
    phi = _member(family, nu)
    if not phi.convex_flag:
        raise ConvexityRequiredError(f"q_norm needs a convex phi_{nu}, got {phi.label}")
    _check(f)
    name = f"q[m={m},nu={nu}]"
    if f.is_zero():
        return _zero(name)
    n = f.n
    cfg = cfg or SupSearchConfig.for_dimension(n)
    alphas, best = _best_derivative(f, m)

    def table(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        log_d, arg = best(pts)
        vals = log_d + radial_conjugate(family, nu, "phi_star", _radius(pts))
        return vals[None, :], arg[None, :]

    return _finish(name, _search(table, n, cfg, name, detect_weak_weight=True), [alphas], shells_are_orders=False)


# ============================================================
# SWEEPS
# ============================================================

def sweep_frame(parameter: str, params: Sequence, values: Sequence[SeminormValue]) -> pd.DataFrame:
    """(parameter, value) rows for plotting"""
    return pd.DataFrame({
        parameter: list(params),
        "name": [v.name for v in values],
        "value": [v.value for v in values],
        "log_value": [v.log_value for v in values],
        "tail_bound": [v.tail_bound for v in values],
        "converged": [v.converged for v in values],
    })
