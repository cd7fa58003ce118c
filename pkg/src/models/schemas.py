from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from src.utils.config import settings


# ============================================================
# NUMERICAL CONFIGS
# ============================================================

class SupSearchConfig(BaseModel):
    """Box grid used by every seminorm sup"""
    half_width: float = Field(..., gt=0, description="Initial box half-width X")
    grid_points: int = Field(..., ge=33, description="Points per axis, odd so 0 is on the grid")
    refine_rounds: int = Field(default=4, ge=1)
    growth_factor: float = Field(default=1.5, gt=1.0)
    max_expansions: int = Field(default=8, ge=1)

    @field_validator('grid_points')
    @classmethod
    def grid_must_be_odd(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError('grid_points must be odd so that x=0 is a node')
        return v

    @classmethod
    def for_dimension(cls, n: int, scale: float = 1.0) -> "SupSearchConfig":
        """Settings defaults for a search over R^n; the per-axis count shrinks with n"""
        points = {1: settings.sup_grid_points_1d, 2: settings.sup_grid_points_2d}.get(n, settings.sup_grid_points_nd)
        points = int(round(points * scale))
        points += 1 - points % 2
        return cls(
            half_width=settings.sup_box_half_width,
            grid_points=max(33, points),
            refine_rounds=settings.sup_refine_rounds,
            growth_factor=settings.sup_growth_factor,
            max_expansions=settings.sup_max_expansions,
        )


class ContourSpec(BaseModel):
    """Polycircle L_R(x) with Q trapezoid nodes per circle"""
    center: list[float]
    radius: float = Field(..., gt=0)
    nodes: int = Field(default=128, ge=8)

    @field_validator('nodes')
    @classmethod
    def nodes_power_of_two(cls, v: int) -> int:
        if v & (v - 1):
            raise ValueError('nodes must be a power of two')
        return v


class FourierSpec(BaseModel):
    """Sampling box [-L, L)^n with M samples per axis"""
    half_width: float = Field(default=12.0, gt=0)
    samples: int = Field(default=256, ge=8)
    convention: Literal["forward-unnormalized"] = "forward-unnormalized"

    @field_validator('samples')
    @classmethod
    def samples_power_of_two(cls, v: int) -> int:
        if v & (v - 1):
            raise ValueError('samples must be a power of two')
        return v


# ============================================================
# RESULTS
# ============================================================

class FamilyConditionReport(BaseModel):
    """Witness for one of the conditions i1..i5 at index m"""
    condition: Literal["i1", "i2", "i3", "i4", "i5"]
    index: int = Field(..., ge=1)
    grid_size: int
    grid_lo: float
    grid_hi: float
    constants: dict[str, float] = {}
    min_margin: float
    eps_check: float
    proxy: bool = False
    passed: bool
    argmax_x: Optional[float] = None
    message: str = ""

    def describe(self) -> str:
        consts = ", ".join(f"{k}={v:.6g}" for k, v in self.constants.items())
        label = " (proxy)" if self.proxy else ""
        status = "pass" if self.passed else "FAIL"
        return f"{self.condition}{label} m={self.index}: {consts} margin={self.min_margin:.3g} {status}"


class MarginProfile(BaseModel):
    """Pointwise margin of an inequality on a grid"""
    name: str
    xs: list[float]
    ys: list[float] = []  # second coordinate for profiles over a 2-D grid
    margins: list[float]
    min_margin: float
    constants: dict[str, float] = {}
    passed: bool
    message: str = ""


class SeriesReport(BaseModel):
    """Partial sums of a log-space series"""
    dimension: int = 1
    log_terms: list[float]
    partial_sums: list[float]
    converged: bool
    converged_at: Optional[int] = None


class SeminormValue(BaseModel):
    """A computed sup with its witness and truncation certificate"""
    name: str
    value: float = Field(..., ge=0)
    log_value: float
    argmax_point: list[float] = []
    argmax_index: Optional[list[int]] = None
    argmax_k: Optional[int] = None
    truncation: Optional[int] = None
    tail_bound: float = 0.0
    shell_ratio: Optional[float] = None
    box_half_width: float = 0.0
    converged: bool


class VerificationReport(BaseModel):
    """One proved inequality checked with its minimal grid-feasible constant"""
    theorem_id: str
    function_id: str = ""
    family_id: str = ""
    indices: dict[str, int] = {}
    left_value: float = 0.0
    right_value: float = 0.0
    log_left: float = float("-inf")
    log_right: float = float("-inf")
    minimal_constant: float = 0.0
    log_constant: float = float("-inf")
    margin: float = 0.0
    truncation: dict[str, Optional[float]] = {}
    checks: dict[str, bool] = {}
    constants: dict[str, float] = {}
    seminorms: dict[str, SeminormValue] = {}
    passed: bool
    message: str = ""

    def describe(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (f"{self.theorem_id} [{self.function_id or '-'} / {self.family_id or '-'}] "
                f"C={self.minimal_constant:.6g} (log {self.log_constant:.4g}) {status}")


class JobReport(BaseModel):
    """What a job writes to report_<job>.json"""
    job_id: str
    kind: str
    family: Optional[str] = None
    function: Optional[str] = None
    params: dict[str, Any] = {}
    passed: bool
    message: str = ""
    constant: Optional[float] = None
    margin: Optional[float] = None
    details: dict[str, Any] = {}


# ============================================================
# SCENARIO FILE
# ============================================================

class _FamilyBase(BaseModel):
    witness: bool = Field(default=False, description="Record the i2..i5 grid witnesses when the family is built")


class PowerFamilySpec(_FamilyBase):
    kind: Literal["power"]
    p: float = Field(..., gt=1.0, description="Exponent, superlinear growth needs p > 1")
    base: float = Field(..., gt=1.0)
    m_max: int = Field(default=12, ge=1)


class TableFamilySpec(_FamilyBase):
    kind: Literal["table"]
    grid: list[float] = Field(..., min_length=2)
    values: list[list[float]] = Field(..., min_length=1, description="One row per m = 1..m_max")

    @model_validator(mode="after")
    def rows_match_grid(self) -> "TableFamilySpec":
        for i, row in enumerate(self.values):
            if len(row) != len(self.grid):
                raise ValueError(f"values[{i}] has {len(row)} entries, grid has {len(self.grid)}")
        return self


class LinearFamilySpec(_FamilyBase):
    kind: Literal["linear"]
    slope: float = Field(default=1.0, gt=0)
    m_max: int = Field(default=12, ge=1)


FamilySpec = Annotated[
    Union[PowerFamilySpec, TableFamilySpec, LinearFamilySpec],
    Field(discriminator="kind"),
]


class TermSpec(BaseModel):
    """c_alpha z^alpha"""
    alpha: list[int]
    re: float = 0.0
    im: float = 0.0

    @field_validator('alpha')
    @classmethod
    def nonnegative(cls, v: list[int]) -> list[int]:
        if any(a < 0 for a in v):
            raise ValueError('multi-index entries must be >= 0')
        return v


class BlockSpec(BaseModel):
    """p(z) exp(-sum a_j z_j^2)"""
    terms: list[TermSpec] = Field(..., min_length=1)
    decay: list[float] = Field(..., min_length=1)

    @field_validator('decay')
    @classmethod
    def positive_decay(cls, v: list[float]) -> list[float]:
        if any(a <= 0 for a in v):
            raise ValueError('every decay a_j must be > 0')
        return v


class FunctionSpec(BlockSpec):
    """A Hermite-Gaussian, optionally plus further blocks"""
    n: int = Field(..., ge=1)
    plus: list[BlockSpec] = []

    @model_validator(mode="after")
    def dimensions_agree(self) -> "FunctionSpec":
        for block in [self, *self.plus]:
            if len(block.decay) != self.n:
                raise ValueError(f"decay has {len(block.decay)} entries, n = {self.n}")
            for term in block.terms:
                if len(term.alpha) != self.n:
                    raise ValueError(f"alpha {term.alpha} does not have n = {self.n} entries")
        return self


JobKind = Literal[
    "condition", "conjugate_curve", "lemma1", "corollary1", "remark1", "lemma2",
    "lemma3", "family_gap", "lemma5", "lemma67", "ineq7", "ineq16", "dilation",
    "cauchy", "taylor", "fourier", "stirling", "factorial_split",
    "theorem1", "theorem2", "theorem3", "theorem4", "prop_h", "lemma4", "embeddings",
]


class JobSpec(BaseModel):
    id: str = Field(..., min_length=1)
    kind: JobKind
    family: Optional[str] = None
    function: Optional[str] = None
    battery: bool = Field(default=False, description="Run once per function of the scenario battery")
    params: dict[str, Any] = {}


class BudgetSpec(BaseModel):
    alpha_budget: int = Field(default_factory=lambda: settings.alpha_budget, ge=1)
    beta_budget: int = Field(default_factory=lambda: settings.beta_budget, ge=1)
    k_budget: int = Field(default_factory=lambda: settings.k_budget, ge=1)
    series_terms: int = Field(default_factory=lambda: settings.series_terms, ge=10)

    @field_validator('alpha_budget', 'beta_budget', 'k_budget')
    @classmethod
    def within_cap(cls, v: int) -> int:
        if v > settings.alpha_cap:
            raise ValueError(f'budget {v} exceeds alpha_cap {settings.alpha_cap}')
        return v

    def scaled(self, factor: float) -> "BudgetSpec":
        """Multiply truncation budgets, clamped at alpha_cap"""
        cap = settings.alpha_cap
        return BudgetSpec(
            alpha_budget=min(cap, max(1, int(round(self.alpha_budget * factor)))),
            beta_budget=min(cap, max(1, int(round(self.beta_budget * factor)))),
            k_budget=min(cap, max(1, int(round(self.k_budget * factor)))),
            series_terms=max(10, int(round(self.series_terms * factor))),
        )


class ToleranceSpec(BaseModel):
    eps_check: float = Field(default_factory=lambda: settings.eps_check, gt=0)


class Scenario(BaseModel):
    """Declarative description of a verification run"""
    schema_version: Literal[1]
    families: dict[str, FamilySpec] = {}
    functions: dict[str, FunctionSpec] = {}
    battery: list[str] = Field(default=[], description="Functions a battery job runs over; empty means all")
    jobs: list[JobSpec] = Field(..., min_length=1)
    output_dir: Optional[str] = None
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)
    budgets: BudgetSpec = Field(default_factory=BudgetSpec)

    @model_validator(mode="after")
    def references_resolve(self) -> "Scenario":
        for i, name in enumerate(self.battery):
            if name not in self.functions:
                raise ValueError(f"battery[{i}]: unknown function '{name}'")
        self.jobs = self._expand_batteries()
        seen: set[str] = set()
        for i, job in enumerate(self.jobs):
            if job.id in seen:
                raise ValueError(f"jobs[{i}].id: duplicate job id '{job.id}'")
            seen.add(job.id)
            if job.family is not None and job.family not in self.families:
                raise ValueError(f"jobs[{i}].family: unknown family '{job.family}'")
            if job.function is not None and job.function not in self.functions:
                raise ValueError(f"jobs[{i}].function: unknown function '{job.function}'")
        return self

    def _expand_batteries(self) -> list[JobSpec]:
        """One job per battery function for every battery job, ids suffixed with the function"""
        names = self.battery or list(self.functions)
        jobs: list[JobSpec] = []
        for i, job in enumerate(self.jobs):
            if not job.battery:
                jobs.append(job)
                continue
            if job.function is not None:
                raise ValueError(f"jobs[{i}].function: a battery job names no function")
            if not names:
                raise ValueError(f"jobs[{i}].battery: the scenario declares no functions")
            jobs.extend(
                job.model_copy(update={"id": f"{job.id}_{name}", "function": name, "battery": False})
                for name in names
            )
        return jobs
