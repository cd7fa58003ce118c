"""
Fourier transform f^(x) = int f(xi) exp(-i <x, xi>) d xi and its inverse
(2 pi)^(-n) int g(x) exp(i <x, xi>) dx

Closed form on Hermite-Gaussian blocks, FFT quadrature on a box for n <= 3.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
import pandas as pd
from scipy import fft as sfft

from src.models.schemas import FourierSpec
from src.tools.functions import (
    GaussianSum,
    HermiteGaussian,
    TestFunction,
    derivative_closed_form,
    evaluate,
    multiply_coordinate,
)
from src.utils.errors import BoxTooSmallError, ConfigError
from src.utils.logger import logger

BOUNDARY_THRESHOLD = 1e-14
MAX_NUMERIC_DIMENSION = 3


@dataclass(frozen=True)
class FourierGrid:
    """Values on the tensor grid axis^n; the same 1-D axis is used for every coordinate"""
    axis: np.ndarray
    values: np.ndarray
    half_width: float

    @property
    def n(self) -> int:
        return self.values.ndim

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*([self.axis] * self.n), indexing="ij")
        return np.stack(mesh, axis=-1)

    def inner_mask(self, radius: float) -> np.ndarray:
        return np.linalg.norm(self.points(), axis=-1) <= radius

    def __add__(self, other: "FourierGrid") -> "FourierGrid":
        if not np.array_equal(self.axis, other.axis):
            raise ConfigError("grids live on different axes")
        return FourierGrid(self.axis, self.values + other.values, self.half_width)

    def to_frame(self) -> pd.DataFrame:
        pts = self.points().reshape(-1, self.n)
        frame = pd.DataFrame(pts, columns=[f"x{j + 1}" for j in range(self.n)])
        flat = self.values.reshape(-1)
        frame["re"] = flat.real
        frame["im"] = flat.imag
        return frame

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)


# ============================================================
# CLOSED FORM
# ============================================================

def _merge(blocks: list[HermiteGaussian]) -> dict:
    """Group blocks with equal decay into one coefficient dict"""
    grouped: dict = {}
    for b in blocks:
        coeffs = grouped.setdefault(b.decay, {})
        for alpha, c in b.coeffs.items():
            coeffs[alpha] = coeffs.get(alpha, 0j) + c
    return grouped


def _as_function(n: int, grouped: dict) -> TestFunction:
    blocks = [HermiteGaussian(n, coeffs, decay) for decay, coeffs in grouped.items()]
    return blocks[0] if len(blocks) == 1 else GaussianSum(tuple(blocks))


def _transform_block(b: HermiteGaussian) -> list[HermiteGaussian]:
    a = np.asarray(b.decay)
    prefactor = float(np.prod(np.sqrt(np.pi / a)))
    gaussian = HermiteGaussian.gaussian(tuple(1.0 / (4.0 * a)), prefactor)
    out = []
    for alpha, c in b.coeffs.items():
        if c == 0:
            continue
        # xi^alpha under the integral becomes i^|alpha| D^alpha on the transform
        term = derivative_closed_form(gaussian, alpha).scaled(c * 1j ** sum(alpha))
        out.extend(term.blocks)
    return out or [HermiteGaussian(b.n, {(0,) * b.n: 0j}, tuple(1.0 / (4.0 * a)))]


def fourier_closed_form(f: TestFunction) -> TestFunction:
    """Exact transform; Gaussian decay a maps to 1/(4a) with prefactor prod sqrt(pi/a)"""
    blocks = [t for b in f.blocks for t in _transform_block(b)]
    return _as_function(f.n, _merge(blocks))


def inverse_fourier_closed_form(g: TestFunction) -> TestFunction:
    """F^-1 g(xi) = (2 pi)^(-n) g^(-xi)"""
    transformed = fourier_closed_form(g)
    scale = (2.0 * np.pi) ** (-g.n)
    blocks = [
        HermiteGaussian(b.n, {a: c * scale * (-1) ** sum(a) for a, c in b.coeffs.items()}, b.decay)
        for b in transformed.blocks
    ]
    return _as_function(g.n, _merge(blocks))


# ============================================================
# FFT QUADRATURE
# ============================================================

def _check_dimension(n: int) -> None:
    if not 1 <= n <= MAX_NUMERIC_DIMENSION:
        raise ConfigError(f"numeric transforms support n in 1..{MAX_NUMERIC_DIMENSION}, got n = {n}")


def sample_axis(spec: FourierSpec) -> np.ndarray:
    """xi_k = (k - M/2) 2L/M, zero-centred"""
    m = spec.samples
    return (np.arange(m) - m // 2) * (2.0 * spec.half_width / m)


def dual_axis(spec: FourierSpec) -> np.ndarray:
    """x_p = (p - M/2) pi/L"""
    m = spec.samples
    return (np.arange(m) - m // 2) * (np.pi / spec.half_width)


def _alternating(n: int, m: int) -> np.ndarray:
    """prod_j (-1)^(k_j) on the tensor grid"""
    sign = (-1.0) ** np.arange(m)
    out = np.ones((m,) * n)
    for j in range(n):
        shape = [1] * n
        shape[j] = m
        out = out * sign.reshape(shape)
    return out


def _check_boundary(values: np.ndarray, label: str) -> None:
    peak = float(np.max(np.abs(values)))
    if peak == 0:
        return
    edge = 0.0
    for j in range(values.ndim):
        edge = max(edge, float(np.max(np.abs(np.take(values, [0, -1], axis=j)))))
    if edge >= BOUNDARY_THRESHOLD * peak:
        raise BoxTooSmallError(
            f"{label}: boundary samples reach {edge / peak:.3g} of the peak, widen the box"
        )


def _sample(f: Union[TestFunction, Callable, np.ndarray], axis: np.ndarray, n: int) -> np.ndarray:
    if isinstance(f, np.ndarray):
        if f.shape != (len(axis),) * n:
            raise ConfigError(f"sample array has shape {f.shape}, expected {(len(axis),) * n}")
        return f.astype(complex)
    mesh = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1)
    values = evaluate(f, mesh.reshape(-1, n)) if hasattr(f, "blocks") else f(mesh.reshape(-1, n))
    return np.asarray(values, dtype=complex).reshape((len(axis),) * n)


def fourier_numeric(f: Union[TestFunction, Callable], spec: Optional[FourierSpec] = None,
                    n: Optional[int] = None) -> FourierGrid:
    """
    Trapezoid rule on [-L, L)^n evaluated by one n-D FFT

    f^(x_p) = dxi^n (-1)^p (-1)^(nM/2) fftn((-1)^k f(xi_k))[p]
    """
    spec = spec or FourierSpec()
    n = getattr(f, "n", n)
    if n is None:
        raise ConfigError("pass n for a plain callable")
    _check_dimension(n)
    m = spec.samples
    xi = sample_axis(spec)
    samples = _sample(f, xi, n)
    _check_boundary(samples, "forward transform")

    sign = _alternating(n, m)
    step = 2.0 * spec.half_width / m
    phase = (-1.0) ** (n * (m // 2))
    values = step ** n * phase * sign * sfft.fftn(sign * samples)
    logger.debug(f"forward FFT n={n} M={m} L={spec.half_width:g}")
    return FourierGrid(dual_axis(spec), values, spec.half_width)


def inverse_fourier(g: Union[FourierGrid, TestFunction, Callable], spec: Optional[FourierSpec] = None,
                    n: Optional[int] = None) -> FourierGrid:
    """
    (2 pi)^(-n) int g(x) exp(i <x, xi>) dx on the dual grid, returned on the sample axis

    g is either a grid produced by fourier_numeric or a function sampled at x_p.
    """
    spec = spec or FourierSpec()
    m = spec.samples
    if isinstance(g, FourierGrid):
        if len(g.axis) != m or not np.isclose(g.half_width, spec.half_width):
            raise ConfigError("grid does not match the Fourier spec")
        n = g.n
        samples = g.values
    else:
        n = getattr(g, "n", n)
        if n is None:
            raise ConfigError("pass n for a plain callable")
        samples = _sample(g, dual_axis(spec), n)
    _check_dimension(n)
    _check_boundary(samples, "inverse transform")

    sign = _alternating(n, m)
    step = np.pi / spec.half_width
    phase = (-1.0) ** (n * (m // 2))
    values = (step / (2.0 * np.pi)) ** n * m ** n * phase * sign * sfft.ifftn(sign * samples)
    return FourierGrid(sample_axis(spec), values, spec.half_width)


def grid_error(grid: FourierGrid, reference: TestFunction, radius: Optional[float] = None,
               floor: float = 1e-6) -> float:
    """Max |num - ref| / max(|ref|, floor max|ref|) over the ball of the given radius"""
    radius = grid.half_width / 2 if radius is None else radius
    mask = grid.inner_mask(radius)
    ref = np.asarray(evaluate(reference, grid.points()[mask]))
    num = grid.values[mask]
    peak = float(np.max(np.abs(ref))) if ref.size else 0.0
    if peak == 0:
        return float(np.max(np.abs(num))) if num.size else 0.0
    denom = np.maximum(np.abs(ref), floor * peak)
    return float(np.max(np.abs(num - ref) / denom))


def fourier_derivative_exchange(f: TestFunction, j: int, spec: Optional[FourierSpec] = None) -> float:
    """
    Transform of (-i xi_j) f against d/dx_j of the transform

    Returns the worst relative mismatch between the FFT of the left side and
    the closed-form right side on the inner half-box.
    """
    spec = spec or FourierSpec()
    lhs = fourier_numeric(multiply_coordinate(f, j, -1j), spec)
    alpha = tuple(1 if i == j else 0 for i in range(f.n))
    rhs = derivative_closed_form(fourier_closed_form(f), alpha)
    return grid_error(lhs, rhs)
