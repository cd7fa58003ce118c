"""
Young conjugates g*(x) = sup_{y >= 0} (x y - g(y)) and the conjugate inequalities

Two engines:
- grid engine: discrete Legendre transform of samples (lower convex hull,
  then slopes merged against the hull edges), with an O(N*M) oracle
- adaptive engine: bracket doubling plus ternary search (convex g) or
  coarse scan plus golden section (general g), vectorized over x
"""

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.special import gammaln, xlogy

from src.models.schemas import MarginProfile, SeriesReport
from src.tools.weights import (
    WeightFamily,
    WeightFunction,
    check_condition,
    check_superlinear,
    default_grid,
    exp_substitute,
    grows_through_tail,
    relative_margin,
)
from src.utils.config import settings
from src.utils.errors import (
    ConfigError,
    ConvexityRequiredError,
    HypothesisViolatedError,
    NoDecayError,
    OverflowGuardError,
    UnboundedWitnessError,
)
from src.utils.logger import logger

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
SWEEP_WINDOW = 8


# ============================================================
# TYPES
# ============================================================

@dataclass(frozen=True)
class GridFunction:
    """Samples of a real function on a strictly increasing grid in [0, inf)"""
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape:
            raise ValueError("xs and ys must be 1-D arrays of equal length")
        if len(xs) < 2:
            raise ValueError("a GridFunction needs at least 2 samples")
        if xs[0] < 0 or np.any(np.diff(xs) <= 0):
            raise ValueError("xs must be strictly increasing with xs[0] >= 0")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def sample(cls, g: Callable, xs: Sequence[float]) -> "GridFunction":
        xs = np.asarray(xs, dtype=float)
        return cls(xs, np.asarray(g(xs), dtype=float))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.xs, "y": self.ys})

    def to_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    @classmethod
    def read_csv(cls, path: Union[str, Path]) -> "GridFunction":
        frame = pd.read_csv(path, float_precision="round_trip")
        return cls(frame["x"].to_numpy(), frame["y"].to_numpy())


@dataclass(frozen=True)
class ConjugateResult:
    """g* at each slope with the winning source index"""
    slopes: np.ndarray
    values: np.ndarray
    argmax_index: np.ndarray
    source_xs: np.ndarray

    @property
    def argmax_x(self) -> np.ndarray:
        return self.source_xs[self.argmax_index]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"slope": self.slopes, "value": self.values, "argmax_x": self.argmax_x})

    def to_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


# ============================================================
# GRID ENGINE
# ============================================================

def _lower_hull(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Indices of the lower convex envelope (monotone chain, collinear points dropped)"""
    hull: list[int] = []
    for j in range(len(xs)):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (xs[a] - xs[o]) * (ys[j] - ys[o]) - (ys[a] - ys[o]) * (xs[j] - xs[o])
            if cross > 0:
                break
            hull.pop()
        hull.append(j)
    return np.asarray(hull, dtype=int)


def _legendre_sweep(xs: np.ndarray, ys: np.ndarray, slopes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    max_j (s xs[j] - ys[j]) for every s, ties to the smallest j

    The hull edges locate a window of source indices whose values can lie
    within rounding of the maximum (collinear runs included); the window is
    then scanned exactly as the brute-force oracle scans the whole grid.
    """
    hull = _lower_hull(xs, ys)
    last = len(hull) - 1
    if last == 0:
        j = int(hull[0])
        return slopes * xs[j] - ys[j], np.full(len(slopes), j)
    edges = np.diff(ys[hull]) / np.diff(xs[hull])
    scale = np.max(np.abs(ys)) + np.abs(slopes) * np.max(np.abs(xs))
    delta = 16.0 * np.finfo(float).eps * scale / np.min(np.diff(xs))
    lo = hull[np.clip(np.searchsorted(edges, slopes - delta, side="left") - 1, 0, last)]
    hi = hull[np.clip(np.searchsorted(edges, slopes + delta, side="right") + 1, 0, last)]

    values = np.empty(len(slopes))
    idx = np.empty(len(slopes), dtype=int)
    narrow = hi - lo < SWEEP_WINDOW
    if np.any(narrow):
        # rows ascend in source index; the clamp only repeats hi
        cand = np.minimum(lo[narrow] + np.arange(SWEEP_WINDOW)[:, None], hi[narrow])
        vals = slopes[narrow][None, :] * xs[cand] - ys[cand]
        best = np.argmax(vals, axis=0)
        cols = np.arange(cand.shape[1])
        values[narrow] = vals[best, cols]
        idx[narrow] = cand[best, cols]
    for i in np.flatnonzero(~narrow):
        seg = slopes[i] * xs[lo[i]:hi[i] + 1] - ys[lo[i]:hi[i] + 1]
        j = int(np.argmax(seg))
        values[i] = seg[j]
        idx[i] = lo[i] + j
    return values, idx


def _check_slopes(slopes) -> np.ndarray:
    slopes = np.asarray(slopes, dtype=float)
    if slopes.ndim != 1 or len(slopes) == 0:
        raise ConfigError("slopes must be a nonempty 1-D array")
    if np.any(np.diff(slopes) <= 0):
        raise ConfigError("slopes must be strictly increasing")
    return slopes


def conjugate_grid(g: GridFunction, slopes) -> ConjugateResult:
    """Discrete Legendre transform of the samples at the given slopes"""
    slopes = _check_slopes(slopes)
    values, idx = _legendre_sweep(g.xs, g.ys, slopes)
    return ConjugateResult(slopes=slopes, values=values, argmax_index=idx, source_xs=g.xs)


def conjugate_brute_force(g: GridFunction, slopes, block: int = 256) -> ConjugateResult:
    """O(N*M) oracle; ties go to the smallest source index"""
    slopes = _check_slopes(slopes)
    values = np.empty(len(slopes))
    idx = np.empty(len(slopes), dtype=int)
    for start in range(0, len(slopes), block):
        s = slopes[start:start + block]
        table = np.outer(s, g.xs) - g.ys
        j = np.argmax(table, axis=1)
        idx[start:start + block] = j
        values[start:start + block] = table[np.arange(len(s)), j]
    return ConjugateResult(slopes=slopes, values=values, argmax_index=idx, source_xs=g.xs)


def biconjugate(g: GridFunction, slopes, xs_out) -> GridFunction:
    """(g*)* on xs_out, the second transform running over the slopes >= 0"""
    star = conjugate_grid(g, slopes)
    keep = star.slopes >= 0
    if not np.any(keep):
        raise ConfigError("biconjugate needs at least one slope >= 0")
    xs_out = np.asarray(xs_out, dtype=float)
    values, _ = _legendre_sweep(star.slopes[keep], star.values[keep], xs_out)
    return GridFunction(xs_out, values)


# ============================================================
# ADAPTIVE ENGINE
# ============================================================

def _objective(g: Callable, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        v = x * y - np.asarray(g(y), dtype=float)
    return np.where(np.isnan(v), -np.inf, v)


def _bracket(g: Callable, xs: np.ndarray, y_hi: float) -> np.ndarray:
    """Double y_hi per point until x y - g(y) drops over the last octave"""
    cap = 2.0 ** settings.bracket_cap_log2
    hi = np.full(xs.shape, max(float(y_hi), 1.0))
    pending = np.ones(xs.shape, dtype=bool)
    while True:
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            return hi
        up = _objective(g, xs[idx], hi[idx])
        down = _objective(g, xs[idx], hi[idx] / 2)
        done = (up < down) | np.isneginf(up)
        pending[idx[done]] = False
        grow = idx[~done]
        if grow.size and np.any(hi[grow] * 2 > cap):
            worst = xs[grow][np.argmax(hi[grow])]
            raise NoDecayError(f"x y - g(y) still increasing at y = 2^{settings.bracket_cap_log2} for x = {worst:g}")
        hi[grow] *= 2


def _ternary(g: Callable, xs: np.ndarray, hi: np.ndarray, tol: float) -> np.ndarray:
    lo = np.zeros_like(hi)
    for _ in range(settings.max_search_iterations):
        width = hi - lo
        open_ = width > tol * np.maximum(1.0, hi)
        if not np.any(open_):
            break
        m1 = lo + width / 3
        m2 = hi - width / 3
        right = _objective(g, xs, m1) < _objective(g, xs, m2)
        lo = np.where(open_ & right, m1, lo)
        hi = np.where(open_ & ~right, m2, hi)
    best = _objective(g, xs, np.zeros_like(xs))
    for y in (lo, hi, (lo + hi) / 2):
        best = np.maximum(best, _objective(g, xs, y))
    return best


def _scan_golden(g: Callable, xs: np.ndarray, hi: np.ndarray, tol: float, block: int = 256) -> np.ndarray:
    q = settings.coarse_scan_points
    t = np.linspace(0.0, 1.0, q)
    a = np.empty_like(hi)
    b = np.empty_like(hi)
    best = np.empty_like(hi)
    for start in range(0, len(xs), block):
        sl = slice(start, start + block)
        ys = hi[sl, None] * t[None, :]
        table = _objective(g, xs[sl, None], ys)
        j = np.argmax(table, axis=1)
        step = hi[sl] / (q - 1)
        a[sl] = np.maximum(0.0, (j - 1) * step)
        b[sl] = np.minimum(hi[sl], (j + 1) * step)
        best[sl] = table[np.arange(len(j)), j]

    for _ in range(settings.max_search_iterations):
        width = b - a
        open_ = width > tol * np.maximum(1.0, b)
        if not np.any(open_):
            break
        c = b - GOLDEN * width
        d = a + GOLDEN * width
        right = _objective(g, xs, c) < _objective(g, xs, d)
        a = np.where(open_ & right, c, a)
        b = np.where(open_ & ~right, d, b)
    for y in (a, b, (a + b) / 2):
        best = np.maximum(best, _objective(g, xs, y))
    return best


def conjugate_profile(g: Callable, convex_flag: bool, xs, y_hi: float = 1.0,
                      tol: Optional[float] = None) -> np.ndarray:
    """g* at every entry of xs (any shape); g must accept numpy arrays"""
    xs = np.asarray(xs, dtype=float)
    shape = xs.shape
    flat = xs.ravel()
    tol = settings.adaptive_tol if tol is None else tol
    hi = _bracket(g, flat, y_hi)
    if convex_flag:
        out = _ternary(g, flat, hi, tol)
    else:
        out = _scan_golden(g, flat, hi, tol)
    return out.reshape(shape)


def conjugate_adaptive(g: Callable, convex_flag: bool, x: float, y_hi: float = 1.0,
                       tol: Optional[float] = None) -> float:
    """g*(x) for a single x >= 0"""
    if x < 0:
        raise ConfigError(f"conjugate_adaptive expects x >= 0, got {x}")
    return float(conjugate_profile(g, convex_flag, np.array([float(x)]), y_hi, tol)[0])


def conjugate_function(g: Callable, convex_flag: bool) -> Callable[[np.ndarray], np.ndarray]:
    """s -> g*(s) as a vectorized callable, for two-stage conjugation"""
    return lambda s: conjugate_profile(g, convex_flag, s)


def _shape_convex(g: WeightFunction) -> bool:
    # convex nondecreasing g makes g(e^y) convex
    return g.convex_flag and g.nondecreasing_flag


def psi_weight(g: WeightFunction) -> WeightFunction:
    """g[e] carrying the convexity that composition with exp preserves"""
    return replace(exp_substitute(g), convex_flag=_shape_convex(g))


def exp_conjugate(g: WeightFunction, xs) -> np.ndarray:
    """(g[e])*(x)"""
    return conjugate_profile(psi_weight(g), _shape_convex(g), xs)


# ============================================================
# PROFILE HELPERS
# ============================================================

def _tol(eps: Optional[float]) -> float:
    return settings.eps_check if eps is None else eps


def _profile(name: str, xs: np.ndarray, lhs: np.ndarray, rhs: np.ndarray,
             constants: Optional[dict] = None, ys: Optional[np.ndarray] = None,
             eps: Optional[float] = None) -> MarginProfile:
    margins = relative_margin(lhs, rhs)
    worst = float(np.nanmin(margins)) if margins.size else 0.0
    passed = bool(worst >= -_tol(eps))
    if not passed:
        j = int(np.nanargmin(margins))
        logger.warning(f"{name}: margin {worst:.3g} at x = {np.ravel(xs)[j]:g}")
    return MarginProfile(
        name=name,
        xs=np.ravel(xs).tolist(),
        ys=[] if ys is None else np.ravel(ys).tolist(),
        margins=np.ravel(margins).tolist(),
        min_margin=worst,
        constants=constants or {},
        passed=passed,
    )


def _divergence_profile(name: str, xs: np.ndarray, ratio: np.ndarray,
                        constants: Optional[dict] = None, eps: Optional[float] = None) -> MarginProfile:
    """Finite-grid divergence proxy: tail nondecreasing and last value above the midpoint"""
    k = max(2, int(np.ceil(0.1 * len(ratio))))
    tail = ratio[-k:]
    slack = _tol(eps) * (1 + np.abs(tail[1:]))
    increasing = bool(np.all(np.diff(tail) >= -slack))
    mid = float(ratio[len(ratio) // 2])
    growth = float(ratio[-1] - mid)
    return MarginProfile(
        name=name,
        xs=xs.tolist(),
        margins=ratio.tolist(),
        min_margin=growth,
        constants={**(constants or {}), "last": float(ratio[-1]), "midpoint": mid},
        passed=increasing and growth > 0,
        message="finite-grid proxy for divergence",
    )


def _require_superlinear(g: WeightFunction, what: str, eps: Optional[float] = None) -> None:
    report = check_superlinear(g, eps=eps)
    if not report.passed:
        raise HypothesisViolatedError(f"{what}: {g.label or 'weight'} fails the superlinear proxy ({report.message})")


def _positive(x_grid) -> np.ndarray:
    xs = np.asarray(x_grid, dtype=float)
    return xs[xs > 0]


# ============================================================
# LEMMAS
# ============================================================

def lemma1_margin(g: WeightFunction, a: float, b: float, x_grid, eps: Optional[float] = None) -> MarginProfile:
    """(g[e])*(x) <= x ln(x/a) - x + b whenever g(x) >= a x - b"""
    if a <= 0:
        raise ConfigError("lemma1 needs a > 0")
    grid = np.asarray(x_grid, dtype=float)
    hyp = relative_margin(a * grid - b, g(grid))
    if np.any(hyp < -_tol(eps)):
        j = int(np.argmin(hyp))
        raise HypothesisViolatedError(f"g(x) < a x - b at x = {grid[j]:g}")
    xs = _positive(grid)
    bound = xlogy(xs, xs / a) - xs + b
    return _profile("lemma1", xs, exp_conjugate(g, xs), bound, {"a": a, "b": b}, eps=eps)


def corollary1_bound(g: WeightFunction, M: float, x_grid, eps: Optional[float] = None) -> float:
    """Grid witness A_M with (g[e])*(x) <= x ln(x/M) - x + A_M"""
    if M <= 0:
        raise ConfigError("corollary1 needs M > 0")
    _require_superlinear(g, "corollary1", eps)
    xs = np.asarray(x_grid, dtype=float)
    xs = xs[xs >= 0]
    d = exp_conjugate(g, xs) - xlogy(xs, xs / M) + xs
    if grows_through_tail(d):
        raise UnboundedWitnessError(f"corollary1: witness still grows at x = {xs[-1]:g} for M = {M:g}")
    return float(np.max(d))


def remark1_series(g: WeightFunction, b: float, j_max: int, n: int = 1) -> SeriesReport:
    """
    Partial sums of sum_k C(k+n-1, n-1) exp((g[e])*(k)) / (b^k k!)

    The binomial counts the multi-indices with |alpha| = k, so n > 1 gives
    the series over Z_+^n grouped by shells.
    """
    if j_max < 10:
        raise ConfigError("remark1 needs j_max >= 10")
    if b <= 0:
        raise ConfigError("remark1 needs b > 0")
    k = np.arange(j_max + 1, dtype=float)
    log_mult = gammaln(k + n) - gammaln(k + 1) - gammaln(n)
    raw = exp_conjugate(g, k) + log_mult
    if np.any(raw > 700):
        j = int(np.argmax(raw > 700))
        raise OverflowGuardError(f"remark1: log-term {raw[j]:.1f} exceeds 700 at k = {j}")
    log_terms = raw - k * np.log(b) - gammaln(k + 1)
    log_partial = np.logaddexp.accumulate(log_terms)
    small = log_terms < np.log(1e-12) + log_partial
    small[0] = False
    converged_at = int(np.argmax(small)) if np.any(small) else None
    return SeriesReport(
        dimension=n,
        log_terms=log_terms.tolist(),
        partial_sums=np.exp(log_partial).tolist(),
        converged=bool(small[-1]),
        converged_at=converged_at,
    )


def _xy_axes(xy_grid) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(xy_grid, tuple) and len(xy_grid) == 2:
        return np.asarray(xy_grid[0], dtype=float), np.asarray(xy_grid[1], dtype=float)
    axis = np.asarray(xy_grid, dtype=float)
    return axis, axis


def lemma2_constant(u: WeightFunction, v: WeightFunction, tau: float, C: float,
                    xy_grid, eps: Optional[float] = None) -> tuple[float, MarginProfile]:
    """
    v*(x+y) <= u*(x) + u*(y) + tau (x+y) + A  given  2u(x) <= v(x+tau) + C

    A = max(C, 2 inf u - inf v) with the infima taken on the grid.
    """
    _require_superlinear(u, "lemma2", eps)
    _require_superlinear(v, "lemma2", eps)
    xs, ys = _xy_axes(xy_grid)
    axis = np.union1d(xs, ys)
    hyp = relative_margin(2.0 * u(axis), v(axis + tau) + C)
    if np.any(hyp < -_tol(eps)):
        j = int(np.argmin(hyp))
        raise HypothesisViolatedError(f"lemma2: 2u(x) > v(x+tau) + C at x = {axis[j]:g}")

    A = float(max(C, 2.0 * np.min(u(axis)) - np.min(v(axis))))
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    u_x = conjugate_profile(u, u.convex_flag, gx)
    u_y = conjugate_profile(u, u.convex_flag, gy)
    v_s = conjugate_profile(v, v.convex_flag, gx + gy)
    profile = _profile("lemma2", gx, v_s, u_x + u_y + tau * (gx + gy) + A,
                       {"A": A, "C": C, "tau": tau}, ys=gy, eps=eps)
    return A, profile


def lemma3_gap(u: WeightFunction, v: WeightFunction, sigma: float, gamma: float, x_grid,
               weight_grid=None, eps: Optional[float] = None) -> MarginProfile:
    """(u[e])*(x) >= (v[e])*(x) + x ln(sigma) - gamma  given  u(sigma x) <= v(x) + gamma"""
    if sigma <= 1:
        raise ConfigError("lemma3 needs sigma > 1")
    wgrid = default_grid() if weight_grid is None else np.asarray(weight_grid, dtype=float)
    hyp = relative_margin(u(sigma * wgrid), v(wgrid) + gamma)
    if np.any(hyp < -_tol(eps)):
        j = int(np.argmin(hyp))
        raise HypothesisViolatedError(f"lemma3: u(sigma x) > v(x) + gamma at x = {wgrid[j]:g}")
    xs = np.asarray(x_grid, dtype=float)
    xs = xs[xs >= 0]
    lhs = exp_conjugate(v, xs) + xs * np.log(sigma) - gamma
    return _profile("lemma3", xs, lhs, exp_conjugate(u, xs), {"sigma": sigma, "gamma": gamma}, eps=eps)


def family_gap(family: WeightFamily, k: int, x_grid, eps: Optional[float] = None) -> MarginProfile:
    """psi_k*(x) - psi_{k+1}*(x) >= x ln 2 - a_k with a_k the i3 witness"""
    report = check_condition(family, "i3", k, eps=eps)
    a_k = report.constants["a_m"]
    profile = lemma3_gap(family[k], family[k + 1], 2.0, a_k, x_grid, eps=eps)
    return profile.model_copy(update={"name": f"family_gap[k={k}]"})


def lemma5_gap_growth(g: WeightFunction, delta: float, x_grid, eps: Optional[float] = None) -> MarginProfile:
    """[g*((1+delta)x) - g*(x)]/x with the divergence proxy"""
    if delta <= 0:
        raise ConfigError("lemma5 needs delta > 0")
    _require_superlinear(g, "lemma5", eps)
    xs = _positive(x_grid)
    ratio = (conjugate_profile(g, g.convex_flag, (1 + delta) * xs)
             - conjugate_profile(g, g.convex_flag, xs)) / xs
    return _divergence_profile("lemma5", xs, ratio, {"delta": delta}, eps)


def dilation_conjugate_margin(family: WeightFamily, j: int, x_grid, eps: Optional[float] = None) -> MarginProfile:
    """phi_{j+1}*(xi) <= phi_j*(xi/2) + a_j"""
    a_j = check_condition(family, "i3", j, eps=eps).constants["a_m"]
    xs = np.asarray(x_grid, dtype=float)
    xs = xs[xs >= 0]
    phi, nxt = family[j], family[j + 1]
    lhs = conjugate_profile(nxt, nxt.convex_flag, xs)
    rhs = conjugate_profile(phi, phi.convex_flag, xs / 2) + a_j
    return _profile(f"dilation[j={j}]", xs, lhs, rhs, {"a_j": a_j}, eps=eps)


def conjugate_gap_divergence(family: WeightFamily, j: int, x_grid, eps: Optional[float] = None) -> MarginProfile:
    """(phi_j*(xi) - phi_{j+1}*(xi)) / xi grows without bound (grid proxy)"""
    xs = _positive(x_grid)
    phi, nxt = family[j], family[j + 1]
    ratio = (conjugate_profile(phi, phi.convex_flag, xs)
             - conjugate_profile(nxt, nxt.convex_flag, xs)) / xs
    return _divergence_profile(f"gap_divergence[j={j}]", xs, ratio, eps=eps)


def lemma67_sandwich(u: WeightFunction, t_grid, eps: Optional[float] = None) -> MarginProfile:
    """
    S(t) = (u[e])*(t) + (u*[e])*(t) against t ln t - t

    Upper side must hold pointwise; the largest gap on the grid is the
    K witness of the lower side.
    """
    if not u.convex_flag:
        raise ConvexityRequiredError(f"lemma67 needs a convex weight, got {u.label or 'u'}")
    _require_superlinear(u, "lemma67", eps)
    ts = _positive(t_grid)
    u_star = conjugate_function(u, True)
    def inner(y):
        return u_star(np.exp(y))

    # u* is convex and nondecreasing on [0, inf), so u*(e^y) is convex
    S = exp_conjugate(u, ts) + conjugate_profile(inner, True, ts)
    bound = xlogy(ts, ts) - ts
    K = float(np.max(bound - S))
    return _profile("lemma67", ts, S, bound, {"K_witness": K}, eps=eps)


def _psi(family: WeightFamily, k: int) -> WeightFunction:
    return psi_weight(family[k])


def ineq7_shift(family: WeightFamily, k: int, A: float, x_grid, eps: Optional[float] = None) -> MarginProfile:
    """(psi_k*)*(x) + A x <= (psi_{k+1}*)*(x) + C(k, A)"""
    report = check_condition(family, "i2", k, params={"A": [A]}, eps=eps)
    if not report.passed:
        raise HypothesisViolatedError(f"ineq7: i2 fails for k={k}, A={A:g}")
    C = next(iter(report.constants.values()))
    xs = np.asarray(x_grid, dtype=float)
    xs = xs[xs >= 0]
    psi_k, psi_next = _psi(family, k), _psi(family, k + 1)
    bi_k = conjugate_profile(conjugate_function(psi_k, psi_k.convex_flag), True, xs)
    bi_next = conjugate_profile(conjugate_function(psi_next, psi_next.convex_flag), True, xs)
    return _profile(f"ineq7[k={k}]", xs, bi_k + A * xs, bi_next + C, {"A": A, "C": C}, eps=eps)


def ineq16_subadd(family: WeightFamily, k: int, xy_grid, h: float = 2.0,
                  eps: Optional[float] = None) -> tuple[float, MarginProfile]:
    """psi_{k+1}*(x+y) <= psi_k*(x) + psi_k*(y) + b_k (x+y) + A_k, b_k = ln h_k"""
    report = check_condition(family, "i5", k, params={"h": h}, eps=eps)
    if not report.passed:
        raise HypothesisViolatedError(f"ineq16: i5 fails for k={k}")
    l_k = report.constants["l_m"]
    A_k, profile = lemma2_constant(_psi(family, k), _psi(family, k + 1), float(np.log(h)), l_k, xy_grid, eps)
    return A_k, profile.model_copy(update={"name": f"ineq16[k={k}]"})
