"""Job kinds: each handler turns one scenario job into a JobReport plus plot data"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import pandas as pd

from src.agents.theorem_verifier import (
    extension_certificates,
    extension_errors,
    factorial_split_check,
    imaginary_radius,
    sample_complex_points,
    stirling_check,
    verify_embeddings,
    verify_lemma4,
    verify_prop_H,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
    verify_theorem4,
)
from src.models.schemas import (
    BudgetSpec,
    ContourSpec,
    FamilySpec,
    FourierSpec,
    JobReport,
    JobSpec,
    MarginProfile,
    VerificationReport,
)
from src.tools.conjugate import (
    conjugate_gap_divergence,
    conjugate_profile,
    corollary1_bound,
    dilation_conjugate_margin,
    family_gap,
    ineq7_shift,
    ineq16_subadd,
    lemma1_margin,
    lemma2_constant,
    lemma3_gap,
    lemma5_gap_growth,
    lemma67_sandwich,
    psi_weight,
    remark1_series,
)
from src.tools.fourier import (
    fourier_closed_form,
    fourier_derivative_exchange,
    fourier_numeric,
    grid_error,
    inverse_fourier,
)
from src.tools.functions import (
    TestFunction,
    cauchy_derivatives,
    contour_samples,
    derivative_closed_form,
    evaluate,
    multi_factorial,
    multi_indices,
)
from src.tools.seminorms import R_seminorm
from src.tools.weights import (
    WeightFamily,
    WeightFunction,
    check_condition,
    family_conditions,
    make_linear_family,
    make_power_family,
    make_table_family,
    record_witnesses,
    relative_margin,
    with_witnesses,
)
from src.utils.config import settings
from src.utils.errors import ConfigError
from src.utils.report_generator import profile_frame, seminorm_frame


@dataclass
class JobContext:
    job: JobSpec
    index: int
    family: Optional[WeightFamily]
    function: Optional[TestFunction]
    budgets: BudgetSpec
    rng: np.random.Generator
    eps_check: float = field(default_factory=lambda: settings.eps_check)

    @property
    def params(self) -> dict:
        return self.job.params

    def param(self, name: str, default=None):
        return self.job.params.get(name, default)

    def require_family(self) -> WeightFamily:
        if self.family is None:
            raise ConfigError(f"job '{self.job.id}' ({self.job.kind}) needs a family")
        return self.family

    def require_function(self) -> TestFunction:
        if self.function is None:
            raise ConfigError(f"job '{self.job.id}' ({self.job.kind}) needs a function")
        return self.function


@dataclass
class JobOutcome:
    report: JobReport
    plots: dict[str, pd.DataFrame] = field(default_factory=dict)


def build_family(spec: FamilySpec, eps: Optional[float] = None) -> WeightFamily:
    """Fresh family instance (own memo cache) from its scenario entry"""
    if spec.kind == "power":
        family = make_power_family(spec.p, spec.base, spec.m_max)
    elif spec.kind == "linear":
        family = make_linear_family(spec.slope, spec.m_max)
    else:
        family = make_table_family(spec.grid, spec.values)
    return with_witnesses(family, eps=eps) if spec.witness else family


# ============================================================
# HELPERS
# ============================================================

def _grid(ctx: JobContext, lo: float, hi: float, count: int, prefix: str = "x") -> np.ndarray:
    lo = float(ctx.param(f"{prefix}_lo", lo))
    hi = float(ctx.param(f"{prefix}_hi", hi))
    count = int(ctx.param(f"{prefix}_count", count))
    if ctx.param(f"{prefix}_spacing", "linear") == "geometric":
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def _outcome(ctx: JobContext, passed: bool, message: str = "", constant: Optional[float] = None,
             margin: Optional[float] = None, details: Optional[dict] = None,
             plots: Optional[dict] = None) -> JobOutcome:
    job = ctx.job
    report = JobReport(
        job_id=job.id,
        kind=job.kind,
        family=job.family,
        function=job.function,
        params=job.params,
        passed=bool(passed),
        message=message or ("pass" if passed else "failed"),
        constant=constant,
        margin=margin,
        details=details or {},
    )
    return JobOutcome(report, plots or {})


def _from_profile(ctx: JobContext, profile: MarginProfile, constant: Optional[float] = None,
                  extra: Optional[dict] = None) -> JobOutcome:
    details = profile.model_dump(mode="json", exclude={"xs", "ys", "margins"})
    details.update(extra or {})
    message = profile.message or f"{profile.name}: min margin {profile.min_margin:.3g}"
    return _outcome(ctx, profile.passed, message, constant, profile.min_margin, details,
                    {ctx.job.id: profile_frame(profile)})


def _from_verification(ctx: JobContext, report: VerificationReport) -> JobOutcome:
    details = report.model_dump(mode="json", exclude={"seminorms"})
    plots = {}
    if report.seminorms:
        plots[ctx.job.id] = seminorm_frame(report.seminorms)
    return _outcome(ctx, report.passed, report.message, report.minimal_constant, report.margin, details, plots)


def _member(ctx: JobContext, key: str = "m") -> WeightFunction:
    return ctx.require_family()[int(ctx.param(key, 1))]


# ============================================================
# WEIGHT AND CONJUGATE JOBS
# ============================================================

def run_condition(ctx: JobContext) -> JobOutcome:
    """One condition at index m, or with which = all every condition plus the witnesses they record"""
    family = ctx.require_family()
    which = ctx.param("which", "i1")
    m = int(ctx.param("m", 1))
    if which == "all":
        reports = family_conditions(family, m, eps=ctx.eps_check)
        witnessed = record_witnesses(family, reports).witnessed_constants
        passed = all(r.passed for r in reports)
        failing = [r.condition for r in reports if not r.passed]
        return _outcome(
            ctx, passed, "; ".join(r.describe() for r in reports),
            margin=min(r.min_margin for r in reports),
            details={
                "reports": [r.model_dump(mode="json") for r in reports],
                "witnessed": {f"{c}_{k}": v for (c, k), v in sorted(witnessed.items())},
                "failing": failing,
            },
        )
    report = check_condition(family, which, m, params=ctx.params, eps=ctx.eps_check)
    constant = next(iter(report.constants.values()), None)
    return _outcome(ctx, report.passed, report.describe(), constant, report.min_margin,
                    report.model_dump(mode="json"))


def run_conjugate_curve(ctx: JobContext) -> JobOutcome:
    """Curve of phi_m* or psi_m* plus a Fenchel-Young check on a (x, y) grid"""
    g = _member(ctx)
    if ctx.param("substitute", True):
        g = psi_weight(g)
    xs = _grid(ctx, 0.0, 50.0, 201)
    values = conjugate_profile(g, g.convex_flag, xs)
    ys = _grid(ctx, 0.0, 5.0, 101, prefix="y")
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    margins = relative_margin(gx * gy, g(gy) + values[:, None])
    worst = float(np.min(margins))
    passed = bool(np.all(np.isfinite(values)) and worst >= -ctx.eps_check)
    return _outcome(
        ctx, passed, f"{g.label}: Fenchel-Young min margin {worst:.3g}", margin=worst,
        plots={ctx.job.id: pd.DataFrame({"x": xs, "conjugate": values})},
    )


def run_lemma1(ctx: JobContext) -> JobOutcome:
    profile = lemma1_margin(_member(ctx), float(ctx.param("a", 1.0)), float(ctx.param("b", 1.0)),
                            _grid(ctx, 0.0, 200.0, 401), ctx.eps_check)
    return _from_profile(ctx, profile)


def run_corollary1(ctx: JobContext) -> JobOutcome:
    M = float(ctx.param("M", 2.0))
    A = corollary1_bound(_member(ctx), M, _grid(ctx, 0.0, 200.0, 401), ctx.eps_check)
    return _outcome(ctx, bool(np.isfinite(A)), f"A_M = {A:.6g} for M = {M:g}", A, details={"M": M, "A_M": A})


def run_remark1(ctx: JobContext) -> JobOutcome:
    series = remark1_series(_member(ctx), float(ctx.param("b", 1.0)),
                            int(ctx.param("j_max", ctx.budgets.series_terms)), int(ctx.param("n", 1)))
    total = series.partial_sums[-1]
    frame = pd.DataFrame({"k": np.arange(len(series.log_terms)), "log_term": series.log_terms,
                          "partial_sum": series.partial_sums})
    return _outcome(ctx, series.converged, f"sum = {total:.6g}, converged at {series.converged_at}",
                    total, details=series.model_dump(mode="json", exclude={"log_terms", "partial_sums"}),
                    plots={ctx.job.id: frame})


def run_lemma2(ctx: JobContext) -> JobOutcome:
    family = ctx.require_family()
    m = int(ctx.param("m", 1))
    A, profile = lemma2_constant(family[m], family[m + 1], float(ctx.param("tau", 1.0)),
                                 float(ctx.param("C", 0.0)), _grid(ctx, 0.0, 20.0, 41), ctx.eps_check)
    return _from_profile(ctx, profile, A)


def run_lemma3(ctx: JobContext) -> JobOutcome:
    family = ctx.require_family()
    m = int(ctx.param("m", 1))
    profile = lemma3_gap(family[m], family[m + 1], float(ctx.param("sigma", 2.0)),
                         float(ctx.param("gamma", 0.0)), _grid(ctx, 0.0, 200.0, 401), eps=ctx.eps_check)
    return _from_profile(ctx, profile)


def run_family_gap(ctx: JobContext) -> JobOutcome:
    profile = family_gap(ctx.require_family(), int(ctx.param("k", 1)), _grid(ctx, 0.0, 200.0, 401), ctx.eps_check)
    return _from_profile(ctx, profile)


def run_lemma5(ctx: JobContext) -> JobOutcome:
    profile = lemma5_gap_growth(_member(ctx), float(ctx.param("delta", 0.5)), _grid(ctx, 0.0, 200.0, 401),
                                ctx.eps_check)
    return _from_profile(ctx, profile)


def run_lemma67(ctx: JobContext) -> JobOutcome:
    """Family member m, or u(x) = x^p when the job names no family"""
    if ctx.family is None:
        p = float(ctx.param("p", 2.0))
        u = WeightFunction(lambda x: x ** p, label=f"x^{p:g}")
    else:
        u = _member(ctx)
    profile = lemma67_sandwich(u, _grid(ctx, 0.01, 100.0, 400, prefix="t"), ctx.eps_check)
    return _from_profile(ctx, profile, profile.constants["K_witness"])


def run_ineq7(ctx: JobContext) -> JobOutcome:
    profile = ineq7_shift(ctx.require_family(), int(ctx.param("k", 1)), float(ctx.param("A", 1.0)),
                          _grid(ctx, 0.0, 15.0, 151), ctx.eps_check)
    return _from_profile(ctx, profile, profile.constants["C"])


def run_ineq16(ctx: JobContext) -> JobOutcome:
    A, profile = ineq16_subadd(ctx.require_family(), int(ctx.param("k", 1)), _grid(ctx, 0.0, 60.0, 61),
                               float(ctx.param("h", 2.0)), ctx.eps_check)
    return _from_profile(ctx, profile, A)


def run_dilation(ctx: JobContext) -> JobOutcome:
    family = ctx.require_family()
    j = int(ctx.param("j", 1))
    xs = _grid(ctx, 0.0, 500.0, 501)
    margin = dilation_conjugate_margin(family, j, xs, ctx.eps_check)
    divergence = conjugate_gap_divergence(family, j, xs, ctx.eps_check)
    outcome = _from_profile(ctx, margin, margin.constants["a_j"],
                            {"divergence_passed": divergence.passed, "divergence_growth": divergence.min_margin})
    outcome.report.passed = margin.passed and divergence.passed
    outcome.plots[f"{ctx.job.id}_divergence"] = profile_frame(divergence)
    return outcome


# ============================================================
# FUNCTION JOBS
# ============================================================

def _centers(ctx: JobContext, n: int) -> list[np.ndarray]:
    if "centers" in ctx.params:
        return [np.asarray(c, dtype=float) for c in ctx.param("centers")]
    return [np.zeros(n), ctx.rng.uniform(-1.0, 1.0, size=n)]


def run_cauchy(ctx: JobContext) -> JobOutcome:
    """Contour derivatives against closed forms, and against each other across radii"""
    f = ctx.require_function()
    alphas = multi_indices(f.n, int(ctx.param("alpha_max", 12)))
    radii = [float(r) for r in ctx.param("radii", [0.5, 1.0, 2.0])]
    nodes = int(ctx.param("nodes", settings.cauchy_nodes))
    closed = {a: derivative_closed_form(f, a) for a in alphas}
    worst, worst_radius = 0.0, 0.0
    for center in _centers(ctx, f.n):
        exact = {a: complex(evaluate(closed[a], center.astype(complex))) for a in alphas}
        values, floors = {}, {}
        for radius in radii:
            spec = ContourSpec(center=center.tolist(), radius=radius, nodes=nodes)
            peak = float(np.max(np.abs(contour_samples(f, spec))))
            values[radius] = cauchy_derivatives(f, spec, alphas)
            # roundoff floor of the trapezoid sums at this radius
            floors[radius] = {a: 1e-13 * multi_factorial(a) * radius ** (-sum(a)) * peak for a in alphas}
            for a in alphas:
                err = abs(values[radius][a] - exact[a])
                worst = max(worst, err / (1e-9 * abs(exact[a]) + floors[radius][a]))
        lo, hi = min(radii), max(radii)
        for a in alphas:
            gap = abs(values[lo][a] - values[hi][a])
            worst_radius = max(worst_radius, gap / (1e-9 * abs(exact[a]) + floors[lo][a] + floors[hi][a]))
    passed = worst <= 1.0 and worst_radius <= 1.0
    return _outcome(ctx, passed, f"worst scaled error {worst:.3g}, radius gap {worst_radius:.3g}",
                    margin=1.0 - max(worst, worst_radius),
                    details={"scaled_error": worst, "radius_gap": worst_radius,
                             "alphas": len(alphas), "radii": radii})


def run_taylor(ctx: JobContext) -> JobOutcome:
    """
    Taylor extension against direct evaluation at random complex points; with a
    family, each point also carries the tail majorant from R_{m,nu}(f)
    """
    f = ctx.require_function()
    alpha_max = int(ctx.param("alpha_max", settings.alpha_cap))
    x, y = sample_complex_points(f.n, int(ctx.param("points", 50)), ctx.rng, im_radius=imaginary_radius(f))
    details: dict = {"imaginary_radius": imaginary_radius(f)}
    columns: dict = {}
    if ctx.family is None:
        errors = extension_errors(f, x, y, alpha_max)
        checks = {"extension": bool(np.max(errors) <= 1e-8)}
    else:
        m, nu = int(ctx.param("m", 0)), int(ctx.param("nu", 1))
        r_value = R_seminorm(f, ctx.family, m, nu, ctx.budgets.alpha_budget)
        cert = extension_certificates(f, x, y, ctx.family, m, nu, r_value, alpha_max)
        errors = cert.relative_errors
        checks = {"extension": bool(np.max(errors) <= 1e-8), "tail_majorant": cert.majorant_holds(),
                  "R_converged": r_value.converged}
        details.update({"R": r_value.value, "tail_bound_max": float(np.max(cert.tail_bounds)), "m": m, "nu": nu})
        columns = {"absolute_error": cert.absolute_errors, "tail_bound": cert.tail_bounds}
    worst = float(np.max(errors))
    if f.is_real():
        z = x + 1j * y
        sym = np.abs(evaluate(f, np.conj(z)) - np.conj(evaluate(f, z))) / np.maximum(np.abs(evaluate(f, z)), 1e-300)
        checks["conjugation_symmetry"] = bool(np.max(sym) <= 1e-12)
    frame = pd.DataFrame({**{f"x{j + 1}": x[:, j] for j in range(f.n)},
                          **{f"y{j + 1}": y[:, j] for j in range(f.n)}, "relative_error": errors, **columns})
    return _outcome(ctx, all(checks.values()), f"max relative error {worst:.3g}", margin=1e-8 - worst,
                    details={"checks": checks, "max_error": worst, **details},
                    plots={ctx.job.id: frame})


def run_fourier(ctx: JobContext) -> JobOutcome:
    f = ctx.require_function()
    spec = FourierSpec(half_width=float(ctx.param("half_width", settings.fourier_box)),
                       samples=int(ctx.param("samples", settings.fourier_samples)))
    closed = fourier_closed_form(f)
    grid = fourier_numeric(f, spec)
    forward = grid_error(grid, closed)
    round_trip = grid_error(inverse_fourier(grid, spec), f)
    exchange = max(fourier_derivative_exchange(f, j, spec) for j in range(f.n))
    checks = {"forward": forward <= 1e-8, "round_trip": round_trip <= 1e-8, "derivative_exchange": exchange <= 1e-8}
    if f.is_real():
        mask = grid.inner_mask(spec.half_width / 2)
        values = grid.values[mask]
        peak = float(np.max(np.abs(values)))
        # parity of the closed form decides which part must vanish
        parities = {sum(a) % 2 for b in f.blocks for a, c in b.coeffs.items() if c != 0}
        if parities == {0}:
            checks["parity"] = bool(np.max(np.abs(values.imag)) <= 1e-10 * max(peak, 1.0))
        elif parities == {1}:
            checks["parity"] = bool(np.max(np.abs(values.real)) <= 1e-10 * max(peak, 1.0))
    plots = {ctx.job.id: grid.to_frame()} if f.n == 1 else {}
    return _outcome(ctx, all(checks.values()),
                    f"forward {forward:.3g}, round trip {round_trip:.3g}, exchange {exchange:.3g}",
                    margin=1e-8 - max(forward, round_trip, exchange),
                    details={"checks": checks, "forward_error": forward, "round_trip_error": round_trip,
                             "exchange_error": exchange}, plots=plots)


# ============================================================
# THEOREM JOBS
# ============================================================

def _common(ctx: JobContext) -> dict:
    return {"function_id": ctx.job.function or "", "family_id": ctx.job.family or "", "eps": ctx.eps_check}


def run_stirling(ctx: JobContext) -> JobOutcome:
    return _from_verification(ctx, stirling_check(int(ctx.param("j_max", 50))))


def run_factorial_split(ctx: JobContext) -> JobOutcome:
    return _from_verification(ctx, factorial_split_check(int(ctx.param("m_max", 30)), int(ctx.param("n", 2)),
                                                     ctx.eps_check))


def run_theorem1(ctx: JobContext) -> JobOutcome:
    report = verify_theorem1(ctx.require_function(), ctx.require_family(), int(ctx.param("m", 0)),
                             int(ctx.param("nu", 1)), alpha_budget=ctx.budgets.alpha_budget, **_common(ctx))
    return _from_verification(ctx, report)


def run_theorem2(ctx: JobContext) -> JobOutcome:
    report = verify_theorem2(ctx.require_function(), ctx.require_family(), int(ctx.param("m", 0)),
                             int(ctx.param("nu", 2)), rng=ctx.rng, points=int(ctx.param("points", 50)),
                             alpha_budget=ctx.budgets.alpha_budget, **_common(ctx))
    return _from_verification(ctx, report)


def run_theorem3(ctx: JobContext) -> JobOutcome:
    report = verify_theorem3(ctx.require_function(), ctx.require_family(), int(ctx.param("m", 0)),
                             int(ctx.param("nu", 2)), rng=ctx.rng, beta_budget=ctx.budgets.beta_budget,
                             **_common(ctx))
    return _from_verification(ctx, report)


def run_theorem4(ctx: JobContext) -> JobOutcome:
    report = verify_theorem4(ctx.require_function(), ctx.require_family(), int(ctx.param("m", 0)),
                             int(ctx.param("nu", 1)), beta_budget=ctx.budgets.beta_budget,
                             k_budget=ctx.budgets.k_budget, **_common(ctx))
    return _from_verification(ctx, report)


def run_prop_h(ctx: JobContext) -> JobOutcome:
    report = verify_prop_H(ctx.require_function(), ctx.require_family(), int(ctx.param("k", 0)),
                           int(ctx.param("nu", 1)), **_common(ctx))
    return _from_verification(ctx, report)


def run_lemma4(ctx: JobContext) -> JobOutcome:
    report = verify_lemma4(ctx.require_function(), ctx.require_family(), int(ctx.param("m", 0)),
                           int(ctx.param("nu", 1)), beta_budget=ctx.budgets.beta_budget,
                           k_budget=ctx.budgets.k_budget, **_common(ctx))
    return _from_verification(ctx, report)


def run_embeddings(ctx: JobContext) -> JobOutcome:
    report = verify_embeddings(ctx.require_function(), ctx.require_family(), int(ctx.param("nu", 1)),
                               int(ctx.param("k", 0)), int(ctx.param("m", 0)), **_common(ctx))
    return _from_verification(ctx, report)


JOB_HANDLERS: dict[str, Callable[[JobContext], JobOutcome]] = {
    "condition": run_condition,
    "conjugate_curve": run_conjugate_curve,
    "lemma1": run_lemma1,
    "corollary1": run_corollary1,
    "remark1": run_remark1,
    "lemma2": run_lemma2,
    "lemma3": run_lemma3,
    "family_gap": run_family_gap,
    "lemma5": run_lemma5,
    "lemma67": run_lemma67,
    "ineq7": run_ineq7,
    "ineq16": run_ineq16,
    "dilation": run_dilation,
    "cauchy": run_cauchy,
    "taylor": run_taylor,
    "fourier": run_fourier,
    "stirling": run_stirling,
    "factorial_split": run_factorial_split,
    "theorem1": run_theorem1,
    "theorem2": run_theorem2,
    "theorem3": run_theorem3,
    "theorem4": run_theorem4,
    "prop_h": run_prop_h,
    "lemma4": run_lemma4,
    "embeddings": run_embeddings,
}
