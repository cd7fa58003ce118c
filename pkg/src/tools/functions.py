"""
Hermite-Gaussian test functions f(z) = sum_a c_a z^a exp(-sum_j a_j z_j^2)

Exact derivatives, Cauchy-contour differentiation on a polycircle and
Taylor extension from R^n into C^n.
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
from scipy import fft as sfft
from scipy.special import comb, eval_hermite, gammaln, logsumexp, perm

from src.models.schemas import BlockSpec, ContourSpec, FunctionSpec, TermSpec
from src.utils.config import settings
from src.utils.errors import (
    CoefficientOverflowError,
    ConfigError,
    NotConvergedError,
    QuadratureUnconvergedError,
)

MultiIndex = tuple[int, ...]


# ============================================================
# MULTI-INDICES
# ============================================================

@lru_cache(maxsize=None)
def shell(n: int, k: int) -> tuple[MultiIndex, ...]:
    """All alpha in Z_+^n with |alpha| = k, lexicographically descending"""
    if n == 1:
        return ((k,),)
    out = []
    for first in range(k, -1, -1):
        out.extend((first,) + rest for rest in shell(n - 1, k - first))
    return tuple(out)


def multi_indices(n: int, max_order: int, min_order: int = 0) -> list[MultiIndex]:
    """Graded lexicographic order: by |alpha|, then descending lex"""
    return [a for k in range(min_order, max_order + 1) for a in shell(n, k)]


def log_multi_factorial(alpha: Sequence[int]) -> float:
    """log(alpha!); exact integers up to |alpha| = 20, log-Gamma beyond"""
    if sum(alpha) <= 20:
        return math.log(math.prod(math.factorial(a) for a in alpha))
    return float(sum(gammaln(a + 1) for a in alpha))


def multi_factorial(alpha: Sequence[int]) -> float:
    if sum(alpha) <= 20:
        return float(math.prod(math.factorial(a) for a in alpha))
    return float(np.exp(log_multi_factorial(alpha)))


# ============================================================
# TYPES
# ============================================================

@dataclass(frozen=True)
class HermiteGaussian:
    """sum_a c_a z^a exp(-sum_j a_j z_j^2), entire on C^n"""
    n: int
    coeffs: dict
    decay: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension n must be >= 1")
        decay = tuple(float(a) for a in self.decay)
        if len(decay) != self.n or any(a <= 0 for a in decay):
            raise ValueError(f"decay must hold {self.n} positive entries, got {self.decay}")
        if not self.coeffs:
            raise ValueError("coeffs must be nonempty")
        coeffs = {}
        for alpha, c in self.coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n or any(a < 0 for a in alpha):
                raise ValueError(f"multi-index {alpha} does not live in Z_+^{self.n}")
            coeffs[alpha] = coeffs.get(alpha, 0j) + complex(c)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "decay", decay)

    @classmethod
    def gaussian(cls, decay: Sequence[float], c: complex = 1.0) -> "HermiteGaussian":
        n = len(decay)
        return cls(n, {(0,) * n: c}, tuple(decay))

    @property
    def blocks(self) -> tuple["HermiteGaussian", ...]:
        return (self,)

    @property
    def degree(self) -> int:
        return max(sum(a) for a in self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs.values())

    def is_real(self) -> bool:
        return all(c.imag == 0 for c in self.coeffs.values())

    def scaled(self, c: complex) -> "HermiteGaussian":
        return HermiteGaussian(self.n, {a: c * v for a, v in self.coeffs.items()}, self.decay)

    def __add__(self, other: "TestFunction") -> "GaussianSum":
        return GaussianSum(self.blocks + other.blocks)

    def __call__(self, z) -> np.ndarray:
        return evaluate(self, z)

    def to_config(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"alpha": list(a), "re": c.real, "im": c.imag} for a, c in self.coeffs.items()],
            "decay": list(self.decay),
        }


@dataclass(frozen=True)
class GaussianSum:
    """Finite sum of Hermite-Gaussian blocks with possibly different decays"""
    blocks: tuple

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("a GaussianSum needs at least one block")
        if len({b.n for b in self.blocks}) != 1:
            raise ValueError("all blocks must share the dimension n")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def n(self) -> int:
        return self.blocks[0].n

    @property
    def decay(self) -> tuple:
        """Coordinate-wise weakest decay over the blocks"""
        return tuple(min(b.decay[j] for b in self.blocks) for j in range(self.n))

    @property
    def degree(self) -> int:
        return max(b.degree for b in self.blocks)

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks)

    def is_real(self) -> bool:
        return all(b.is_real() for b in self.blocks)

    def scaled(self, c: complex) -> "GaussianSum":
        return GaussianSum(tuple(b.scaled(c) for b in self.blocks))

    def __add__(self, other: "TestFunction") -> "GaussianSum":
        return GaussianSum(self.blocks + other.blocks)

    def __call__(self, z) -> np.ndarray:
        return evaluate(self, z)

    def to_config(self) -> dict:
        first, *rest = [b.to_config() for b in self.blocks]
        first["plus"] = [{"terms": r["terms"], "decay": r["decay"]} for r in rest]
        return first


TestFunction = Union[HermiteGaussian, GaussianSum]


def _rebuild(f: TestFunction, blocks: list[HermiteGaussian]) -> TestFunction:
    return blocks[0] if isinstance(f, HermiteGaussian) else GaussianSum(tuple(blocks))


def _block_from_spec(n: int, block: BlockSpec) -> HermiteGaussian:
    coeffs = {tuple(t.alpha): complex(t.re, t.im) for t in block.terms}
    return HermiteGaussian(n, coeffs, tuple(block.decay))


def function_from_spec(spec: Union[FunctionSpec, dict]) -> TestFunction:
    """Scenario entry {n, terms: [{alpha, re, im}], decay, plus: [...]} to a test function"""
    if isinstance(spec, dict):
        spec = FunctionSpec(**spec)
    head = _block_from_spec(spec.n, spec)
    if not spec.plus:
        return head
    return GaussianSum((head, *(_block_from_spec(spec.n, b) for b in spec.plus)))


def function_to_spec(f: TestFunction) -> FunctionSpec:
    cfg = f.to_config()
    return FunctionSpec(
        n=cfg["n"],
        terms=[TermSpec(**t) for t in cfg["terms"]],
        decay=cfg["decay"],
        plus=[BlockSpec(terms=[TermSpec(**t) for t in p["terms"]], decay=p["decay"]) for p in cfg.get("plus", [])],
    )


# ============================================================
# EVALUATION
# ============================================================

def _points(z, n: int) -> tuple[np.ndarray, tuple]:
    z = np.asarray(z, dtype=complex)
    if n == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        # scalars and arrays of scalars are points on the line
        z = z[..., None]
    if z.shape[-1] != n:
        raise ConfigError(f"points must have last axis of length n = {n}, got shape {z.shape}")
    lead = z.shape[:-1]
    return z.reshape(-1, n), lead


def _monomials(Z: np.ndarray, alphas: Sequence[MultiIndex]) -> np.ndarray:
    """z^alpha for every point (rows) and alpha (columns), by repeated products"""
    top = max(max(a) for a in alphas)
    powers = np.ones((Z.shape[1], top + 1, Z.shape[0]), dtype=Z.dtype)
    for d in range(1, top + 1):
        powers[:, d] = powers[:, d - 1] * Z.T
    out = np.ones((Z.shape[0], len(alphas)), dtype=Z.dtype)
    for col, alpha in enumerate(alphas):
        for j, a in enumerate(alpha):
            if a:
                out[:, col] *= powers[j, a]
    return out


def _eval_block(b: HermiteGaussian, Z: np.ndarray) -> np.ndarray:
    alphas = list(b.coeffs)
    coeffs = np.array([b.coeffs[a] for a in alphas])
    poly = _monomials(Z, alphas) @ coeffs
    with np.errstate(over="ignore", invalid="ignore"):
        return poly * np.exp(-(Z ** 2) @ np.asarray(b.decay))


def evaluate(f: TestFunction, z) -> np.ndarray:
    """f at complex points z of shape (..., n); scalar in, scalar out for n = 1"""
    Z, lead = _points(z, f.n)
    out = sum(_eval_block(b, Z) for b in f.blocks)
    out = np.asarray(out).reshape(lead)
    return out[()] if out.ndim == 0 else out


# ============================================================
# EXACT DERIVATIVES
# ============================================================

def _differentiate_block(b: HermiteGaussian, alpha: MultiIndex) -> HermiteGaussian:
    poly = dict(b.coeffs)
    for j, times in enumerate(alpha):
        a_j = b.decay[j]
        for _ in range(times):
            nxt: dict = defaultdict(complex)
            for gamma, c in poly.items():
                if c == 0:
                    continue
                if gamma[j]:
                    lower = gamma[:j] + (gamma[j] - 1,) + gamma[j + 1:]
                    nxt[lower] += gamma[j] * c
                upper = gamma[:j] + (gamma[j] + 1,) + gamma[j + 1:]
                nxt[upper] += -2.0 * a_j * c
            poly = {g: c for g, c in nxt.items() if c != 0} or {(0,) * b.n: 0j}
            biggest = max(abs(c) for c in poly.values())
            if not np.isfinite(biggest) or biggest > 1e300:
                raise CoefficientOverflowError(
                    f"derivative {alpha} has coefficients beyond 1e300; use the log-space seminorm path"
                )
    return HermiteGaussian(b.n, poly, b.decay)


def derivative_closed_form(f: TestFunction, alpha: Sequence[int], alpha_cap: Optional[int] = None) -> TestFunction:
    """D^alpha f via D_j(p G) = (d_j p - 2 a_j z_j p) G"""
    alpha = tuple(int(a) for a in alpha)
    cap = settings.alpha_cap if alpha_cap is None else alpha_cap
    if len(alpha) != f.n:
        raise ConfigError(f"alpha {alpha} does not match n = {f.n}")
    if sum(alpha) > cap:
        raise ConfigError(f"|alpha| = {sum(alpha)} exceeds alpha_cap = {cap}")
    return _rebuild(f, [_differentiate_block(b, alpha) for b in f.blocks])


def multiply_coordinate(f: TestFunction, j: int, c: complex = 1.0) -> TestFunction:
    """c z_j f"""
    blocks = []
    for b in f.blocks:
        coeffs = {}
        for gamma, v in b.coeffs.items():
            up = gamma[:j] + (gamma[j] + 1,) + gamma[j + 1:]
            coeffs[up] = c * v
        blocks.append(HermiteGaussian(b.n, coeffs, b.decay))
    return _rebuild(f, blocks)


# ============================================================
# DERIVATIVE VALUES ON R^n
# ============================================================

def _gaussian_derivatives_1d(c: float, order: int, x: np.ndarray) -> np.ndarray:
    """D^k exp(-c x^2) = (-sqrt c)^k H_k(sqrt c x) exp(-c x^2), k = 0..order"""
    k = np.arange(order + 1)[:, None]
    root = np.sqrt(c)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        return (-root) ** k * eval_hermite(k, root * x[None, :]) * np.exp(-c * x ** 2)[None, :]


def _monomial_gaussian_derivatives_1d(g: int, c: float, order: int, x: np.ndarray) -> np.ndarray:
    """D^a [x^g exp(-c x^2)] for a = 0..order by the Leibniz rule"""
    G = _gaussian_derivatives_1d(c, order, x)
    out = np.zeros_like(G)
    for a in range(order + 1):
        for i in range(min(a, g) + 1):
            out[a] += comb(a, i, exact=True) * perm(g, i, exact=True) * x ** (g - i) * G[a - i]
    return out


def derivatives_at(f: TestFunction, points, alphas: Sequence[MultiIndex]) -> np.ndarray:
    """
    D^alpha f at real points, shape (len(alphas), n_points)

    Each block factorizes over coordinates, so only 1-D Hermite tables are needed.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if f.n == 1 and X.shape[-1] != 1:
        X = X.reshape(-1, 1)
    if X.shape[1] != f.n:
        raise ConfigError(f"points must have n = {f.n} columns")
    alphas = [tuple(a) for a in alphas]
    order = max(max(a) for a in alphas)
    out = np.zeros((len(alphas), X.shape[0]), dtype=complex)
    for b in f.blocks:
        tables: dict = {}
        for gamma, c in b.coeffs.items():
            if c == 0:
                continue
            for j, g in enumerate(gamma):
                if (j, g) not in tables:
                    tables[(j, g)] = _monomial_gaussian_derivatives_1d(g, b.decay[j], order, X[:, j])
            for row, alpha in enumerate(alphas):
                prod = np.full(X.shape[0], c, dtype=complex)
                for j, (g, a) in enumerate(zip(gamma, alpha)):
                    prod *= tables[(j, g)][a]
                out[row] += prod
    return out


# ============================================================
# CAUCHY CONTOUR DIFFERENTIATION
# ============================================================

def contour_samples(f: TestFunction, spec: ContourSpec, nodes: Optional[int] = None) -> np.ndarray:
    """f on the polycircle |zeta_j - x_j| = R, shape (Q,)*n"""
    n = f.n
    if len(spec.center) != n:
        raise ConfigError(f"contour center has {len(spec.center)} entries, n = {n}")
    q = spec.nodes if nodes is None else nodes
    circle = spec.radius * np.exp(2j * np.pi * np.arange(q) / q)
    axes = [spec.center[j] + circle for j in range(n)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return evaluate(f, mesh.reshape(-1, n)).reshape((q,) * n)


def _cauchy_from_samples(F: np.ndarray, alpha: MultiIndex, radius: float) -> complex:
    q = F.shape[0]
    coef = sfft.fftn(F)[alpha] / q ** F.ndim
    return complex(multi_factorial(alpha) * radius ** (-sum(alpha)) * coef)


def cauchy_derivative(f: TestFunction, spec: ContourSpec, alpha: Sequence[int],
                      check_convergence: bool = True, tol: float = 1e-9) -> complex:
    """
    D^alpha f(x) = alpha!/(2 pi i)^n closed-integral of f(zeta) prod (zeta_j - x_j)^(-alpha_j - 1)

    Trapezoid rule on each circle; the node sums are exactly one n-D FFT.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != f.n:
        raise ConfigError(f"alpha {alpha} does not match n = {f.n}")
    if sum(alpha) > settings.alpha_cap:
        raise ConfigError(f"|alpha| = {sum(alpha)} exceeds alpha_cap")
    if spec.nodes < 4 * max(8, sum(alpha)):
        raise ConfigError(f"need Q >= 4 max(8, |alpha|) = {4 * max(8, sum(alpha))} nodes, got {spec.nodes}")

    F = contour_samples(f, spec)
    value = _cauchy_from_samples(F, alpha, spec.radius)
    if check_convergence:
        F2 = contour_samples(f, spec, nodes=2 * spec.nodes)
        refined = _cauchy_from_samples(F2, alpha, spec.radius)
        floor = multi_factorial(alpha) * spec.radius ** (-sum(alpha)) * float(np.max(np.abs(F2))) * 1e-6
        scale = max(abs(refined), floor)
        if abs(value - refined) > 10 * tol * scale:
            raise QuadratureUnconvergedError(
                f"doubling Q changed D^{alpha} f by {abs(value - refined):.3g} (scale {scale:.3g})"
            )
    return value


def cauchy_derivatives(f: TestFunction, spec: ContourSpec, alphas: Sequence[MultiIndex]) -> dict:
    """D^alpha f(x) for many alpha from one pair of contour FFTs (Q and 2Q), with the same check"""
    alphas = [tuple(int(a) for a in alpha) for alpha in alphas]
    top = max(sum(a) for a in alphas)
    if top > settings.alpha_cap:
        raise ConfigError(f"|alpha| = {top} exceeds alpha_cap")
    if spec.nodes < 4 * max(8, top):
        raise ConfigError(f"need Q >= {4 * max(8, top)} nodes, got {spec.nodes}")
    coarse = sfft.fftn(contour_samples(f, spec)) / spec.nodes ** f.n
    F2 = contour_samples(f, spec, nodes=2 * spec.nodes)
    fine = sfft.fftn(F2) / (2 * spec.nodes) ** f.n
    peak = float(np.max(np.abs(F2)))
    out = {}
    for alpha in alphas:
        scale = multi_factorial(alpha) * spec.radius ** (-sum(alpha))
        value = complex(scale * coarse[alpha])
        refined = complex(scale * fine[alpha])
        if abs(value - refined) > 1e-8 * max(abs(refined), scale * peak * 1e-6):
            raise QuadratureUnconvergedError(f"doubling Q changed D^{alpha} f by {abs(value - refined):.3g}")
        out[alpha] = value
    return out


# ============================================================
# TAYLOR EXTENSION
# ============================================================

@dataclass(frozen=True)
class TaylorExtension:
    """
    Truncated Taylor sum at x + i y

    magnitude is sum |term|, the scale of the summation rounding; tail_bound is
    the majorant of the discarded orders when R_{m,nu}(f) is supplied.
    """
    value: complex
    last_shell: float
    magnitude: float
    tail_bound: Optional[float] = None


def taylor_expansion(f: TestFunction, x, y, alpha_max: int, r_log_value: Optional[float] = None,
                     psi_star=None, m: int = 0) -> TaylorExtension:
    """sum_{|alpha| <= alpha_max} D^alpha f(x)/alpha! (i y)^alpha, with its certificates"""
    if alpha_max > settings.alpha_cap:
        raise ConfigError(f"alpha_max = {alpha_max} exceeds alpha_cap")
    if r_log_value is not None and psi_star is None:
        raise ConfigError("a tail bound needs psi_star alongside the R seminorm")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    alphas = multi_indices(f.n, alpha_max)
    values = derivatives_at(f, x[None, :], alphas)[:, 0]
    iy = 1j * y
    shells = np.zeros(alpha_max + 1, dtype=complex)
    magnitude = 0.0
    for value, alpha in zip(values, alphas):
        term = value / multi_factorial(alpha)
        for j, a in enumerate(alpha):
            if a:
                term *= iy[j] ** a
        shells[sum(alpha)] += term
        magnitude += abs(term)
    total = complex(np.sum(shells))
    last = float(np.max(np.abs(shells[-2:])))
    if np.any(y != 0) and last > 1e-8 * abs(total):
        raise NotConvergedError(
            f"last Taylor shell {last:.3g} vs partial sum {abs(total):.3g} at alpha_max = {alpha_max}"
        )
    tail = None
    if r_log_value is not None:
        tail = taylor_tail_bound(r_log_value, psi_star, m, x, y, alpha_max, f.n)
    return TaylorExtension(total, last, magnitude, tail)


def taylor_extend(f: TestFunction, x, y, alpha_max: int) -> complex:
    """sum_{|alpha| <= alpha_max} D^alpha f(x)/alpha! (i y)^alpha"""
    return taylor_expansion(f, x, y, alpha_max).value


def taylor_tail_bound(r_log_value: float, psi_star, m: int, x, y, alpha_max: int,
                      n: int, extra_terms: int = 200) -> float:
    """
    Geometric majorant of the discarded Taylor tail

    R_{m,nu}(f) (1+|x|)^(-m) sum_{k > alpha_max} C(k+n-1, n-1) |y|_inf^k exp(-psi_nu*(k)),
    with psi_star a vectorized callable k -> psi_nu*(k).
    """
    y_inf = float(np.max(np.abs(np.atleast_1d(y))))
    if y_inf == 0:
        return 0.0
    k = np.arange(alpha_max + 1, alpha_max + 1 + extra_terms, dtype=float)
    log_mult = gammaln(k + n) - gammaln(k + 1) - gammaln(n)
    log_terms = log_mult + k * np.log(y_inf) - np.asarray(psi_star(k), dtype=float)
    x_norm = float(np.linalg.norm(np.atleast_1d(x)))
    return float(np.exp(r_log_value - m * np.log1p(x_norm) + logsumexp(log_terms)))
