"""Weight functions, weight families and the witnessed conditions i1..i5"""

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from src.models.schemas import FamilyConditionReport
from src.utils.config import settings
from src.utils.errors import ConfigError, UnboundedWitnessError
from src.utils.logger import logger


# ============================================================
# TYPES
# ============================================================

@dataclass(frozen=True)
class WeightFunction:
    """
    A weight on [0, inf) with declared shape flags

    The evaluator must accept numpy arrays; overflow to inf is allowed
    and treated as "larger than anything" by the conjugate code.
    """
    evaluator: Callable[[np.ndarray], np.ndarray]
    convex_flag: bool = True
    nondecreasing_flag: bool = True
    label: str = ""

    def __call__(self, x) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class WeightFamily:
    """Sequence phi_1, ..., phi_{m_max} (1-based) plus witnessed constants"""
    members: tuple[WeightFunction, ...]
    label: str = ""
    witnessed_constants: dict = field(default_factory=dict, compare=False)
    # memo for radial conjugate interpolants, filled by the seminorm code
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def m_max(self) -> int:
        return len(self.members)

    def __getitem__(self, m: int) -> WeightFunction:
        if not 1 <= m <= self.m_max:
            raise IndexError(f"family {self.label!r} has members 1..{self.m_max}, asked for {m}")
        return self.members[m - 1]

    def psi(self, m: int) -> WeightFunction:
        """psi_m = phi_m[e]"""
        return exp_substitute(self[m])

    def witness(self, condition: str, m: int) -> Optional[float]:
        return self.witnessed_constants.get((condition, m))


# ============================================================
# CONSTRUCTORS
# ============================================================

def make_power_family(p: float, base: float, m_max: int) -> WeightFamily:
    """phi_m(x) = (base^m x)^p"""
    if p <= 1:
        raise ConfigError(f"power family needs p > 1 (growth must be superlinear), got p={p}")
    if base <= 1:
        raise ConfigError(f"power family needs base > 1, got base={base}")
    if m_max < 1:
        raise ConfigError(f"m_max must be >= 1, got {m_max}")

    def member(m: int) -> WeightFunction:
        scale = float(base) ** m
        return WeightFunction(
            evaluator=lambda x: (scale * x) ** p,
            convex_flag=True,
            nondecreasing_flag=True,
            label=f"({base:g}^{m} x)^{p:g}",
        )

    return WeightFamily(
        members=tuple(member(m) for m in range(1, m_max + 1)),
        label=f"power(p={p:g}, base={base:g})",
    )


def make_linear_family(slope: float, m_max: int) -> WeightFamily:
    """phi_m(x) = slope * x for every m (fails i1)"""
    if slope <= 0:
        raise ConfigError(f"slope must be > 0, got {slope}")
    member = WeightFunction(
        evaluator=lambda x: slope * x,
        convex_flag=True,
        nondecreasing_flag=True,
        label=f"{slope:g} x",
    )
    return WeightFamily(members=(member,) * m_max, label=f"linear(slope={slope:g})")


def make_table_family(grid: Sequence[float], values: Sequence[Sequence[float]]) -> WeightFamily:
    """Piecewise-linear members with linear extrapolation past the last node"""
    xs = np.asarray(grid, dtype=float)
    if xs.ndim != 1 or len(xs) < 2 or np.any(np.diff(xs) <= 0) or xs[0] < 0:
        raise ConfigError("table grid must be strictly increasing in [0, inf) with >= 2 nodes")

    def member(m: int, row: Sequence[float]) -> WeightFunction:
        ys = np.asarray(row, dtype=float)
        if ys.shape != xs.shape or not np.all(np.isfinite(ys)):
            raise ConfigError(f"table row {m} must hold {len(xs)} finite values")
        slopes = np.diff(ys) / np.diff(xs)
        tail_slope = slopes[-1]

        def evaluate(x: np.ndarray) -> np.ndarray:
            inner = np.interp(x, xs, ys)
            return np.where(x > xs[-1], ys[-1] + tail_slope * (x - xs[-1]), inner)

        return WeightFunction(
            evaluator=evaluate,
            convex_flag=bool(np.all(np.diff(slopes) >= -1e-12 * (1 + np.abs(slopes[1:])))),
            nondecreasing_flag=bool(np.all(slopes >= 0)),
            label=f"table[{m}]",
        )

    return WeightFamily(
        members=tuple(member(m, row) for m, row in enumerate(values, start=1)),
        label="table",
    )


def exp_substitute(g: WeightFunction) -> WeightFunction:
    """g[e](x) = g(e^x); only the monotonicity flag carries over"""
    return WeightFunction(
        evaluator=lambda x: g(np.exp(x)),
        convex_flag=False,
        nondecreasing_flag=g.nondecreasing_flag,
        label=f"{g.label}[e]",
    )


def default_grid() -> np.ndarray:
    """x = 0 followed by geometric points on [grid_lo, grid_hi]"""
    return np.concatenate(
        [[0.0], np.geomspace(settings.grid_lo, settings.grid_hi, settings.grid_points)]
    )


# ============================================================
# MARGIN HELPERS
# ============================================================

def relative_margin(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """(rhs - lhs) / (1 + max(|lhs|, |rhs|)) for the inequality lhs <= rhs"""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    with np.errstate(invalid="ignore"):
        scale = 1.0 + np.maximum(np.abs(lhs), np.abs(rhs))
        return (rhs - lhs) / scale


def grows_through_tail(values: np.ndarray) -> bool:
    """True if the sequence increases strictly over its last tenth"""
    values = np.asarray(values, dtype=float)
    k = max(2, int(np.ceil(0.1 * len(values))))
    tail = values[-k:]
    if not np.all(np.isfinite(tail)):
        return bool(np.any(np.isposinf(tail)))
    return bool(np.all(np.diff(tail) > 0))


# ============================================================
# CONDITIONS
# ============================================================

def _witness(name: str, d: np.ndarray, grid: np.ndarray, label: str) -> tuple[float, int]:
    if grows_through_tail(d):
        raise UnboundedWitnessError(
            f"{label}: witness expression for {name} still grows at x={grid[-1]:g}; condition likely false"
        )
    idx = int(np.nanargmax(d))
    return float(d[idx]), idx


def check_superlinear(
    g: WeightFunction,
    grid: Optional[np.ndarray] = None,
    threshold: Optional[float] = None,
    index: int = 1,
    eps: Optional[float] = None,
) -> FamilyConditionReport:
    """Finite-grid proxy for i1: g(x)/x at the right end above a threshold"""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    threshold = settings.i1_threshold if threshold is None else threshold
    x_end = float(grid[-1])
    if x_end <= 0:
        raise ConfigError("i1 proxy needs a grid reaching past 0")
    ratio = float(g(x_end)) / x_end
    margin = (ratio - threshold) / (1.0 + threshold)
    eps = settings.eps_check if eps is None else eps
    return FamilyConditionReport(
        condition="i1",
        index=index,
        grid_size=len(grid),
        grid_lo=float(grid[0]),
        grid_hi=x_end,
        constants={"ratio": ratio, "threshold": threshold},
        min_margin=margin,
        eps_check=eps,
        proxy=True,
        passed=bool(margin >= -eps),
        argmax_x=x_end,
        message=f"{g.label}: phi(x)/x = {ratio:.6g} at x = {x_end:g}",
    )


def check_condition(
    family: WeightFamily,
    which: str,
    m: int,
    grid: Optional[np.ndarray] = None,
    params: Optional[dict] = None,
    eps: Optional[float] = None,
) -> FamilyConditionReport:
    """
    Witness one of i1..i5 at index m on a grid

    params:
        A         -- list of A values for i2 (default [1.0])
        sigma     -- candidate sigma_m for i4 (default 2)
        h         -- candidate h_m for i5 (default 2)
        candidate -- check a given constant instead of witnessing one
        threshold -- i1 proxy threshold
    """
    params = params or {}
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0 or np.any(grid < 0):
        raise ConfigError("condition grid must be a nonempty set of points in [0, inf)")
    if which == "i1":
        return check_superlinear(family[m], grid, params.get("threshold"), index=m, eps=eps)
    if which not in ("i2", "i3", "i4", "i5"):
        raise ConfigError(f"unknown condition {which!r}")
    if m + 1 > family.m_max:
        raise ConfigError(f"{which} at m={m} needs m+1 <= m_max = {family.m_max}")

    phi, phi_next = family[m], family[m + 1]
    candidate = params.get("candidate")
    label = f"{family.label} {which} m={m}"

    # (name, lhs, rhs without the constant)
    cases: list[tuple[str, np.ndarray, np.ndarray]] = []
    if which == "i2":
        for a in params.get("A", [1.0]):
            cases.append((f"C(m,A={a:g})", phi(grid) + a * np.log1p(grid), phi_next(grid)))
    elif which == "i3":
        cases.append(("a_m", phi(2.0 * grid), phi_next(grid)))
    elif which == "i4":
        sigma = float(params.get("sigma", 2.0))
        cases.append(("gamma_m", phi(sigma * grid), phi_next(grid)))
    else:
        h = float(params.get("h", 2.0))
        cases.append(("l_m", 2.0 * phi(grid), phi_next(h * grid)))

    constants: dict[str, float] = {}
    worst, argmax_x = np.inf, None
    for name, lhs, rhs in cases:
        const, idx = _witness(name, lhs - rhs, grid, label)
        if candidate is not None:
            const = float(candidate)
        constants[name] = const
        margins = relative_margin(lhs, rhs + const)
        j = int(np.nanargmin(margins))
        if margins[j] < worst:
            worst, argmax_x = float(margins[j]), float(grid[idx])

    if which == "i4":
        constants["sigma_m"] = float(params.get("sigma", 2.0))
    if which == "i5":
        constants["h_m"] = float(params.get("h", 2.0))

    eps = settings.eps_check if eps is None else eps
    report = FamilyConditionReport(
        condition=which,
        index=m,
        grid_size=len(grid),
        grid_lo=float(grid[0]),
        grid_hi=float(grid[-1]),
        constants=constants,
        min_margin=worst,
        eps_check=eps,
        passed=bool(worst >= -eps),
        argmax_x=argmax_x,
    )
    logger.debug(f"{label}: {report.describe()}")
    return report


def family_conditions(family: WeightFamily, m: int, grid: Optional[np.ndarray] = None,
                      eps: Optional[float] = None) -> list[FamilyConditionReport]:
    """i1..i5 at index m with the default candidates sigma_m = h_m = 2"""
    reports = [check_condition(family, "i1", m, grid, eps=eps)]
    if m + 1 <= family.m_max:
        reports += [check_condition(family, c, m, grid, eps=eps) for c in ("i2", "i3", "i4", "i5")]
    return reports


def record_witnesses(family: WeightFamily, reports: Iterable[FamilyConditionReport]) -> WeightFamily:
    """Copy of the family with the constants of the passing i2..i5 reports recorded"""
    constants = dict(family.witnessed_constants)
    for report in reports:
        if report.condition == "i1" or not report.passed:
            continue
        key = next(k for k in report.constants if k not in ("sigma_m", "h_m"))
        constants[(report.condition, report.index)] = report.constants[key]
    return replace(family, witnessed_constants=constants, cache={})


def with_witnesses(family: WeightFamily, indices: Optional[Iterable[int]] = None,
                   grid: Optional[np.ndarray] = None, eps: Optional[float] = None) -> WeightFamily:
    """Copy of the family with grid witnesses for i2 (A=1), i3, i4, i5 recorded where they hold"""
    indices = range(1, family.m_max) if indices is None else indices
    reports = [r for m in indices for r in family_conditions(family, m, grid, eps)]
    return record_witnesses(family, reports)
