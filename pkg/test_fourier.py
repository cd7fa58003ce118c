"""Fourier transform: closed form on Hermite-Gaussians against FFT quadrature"""

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.models.schemas import FourierSpec
from src.tools.fourier import (
    dual_axis,
    fourier_closed_form,
    fourier_derivative_exchange,
    fourier_numeric,
    grid_error,
    inverse_fourier,
    inverse_fourier_closed_form,
    sample_axis,
)
from src.tools.functions import HermiteGaussian, evaluate
from src.utils.errors import BoxTooSmallError, ConfigError

SPEC = FourierSpec(half_width=12.0, samples=256)


def battery() -> dict:
    return {
        "gauss_half": HermiteGaussian.gaussian([0.5]),
        "gauss1": HermiteGaussian.gaussian([1.0]),
        "gauss2": HermiteGaussian.gaussian([2.0]),
        "hermite1": HermiteGaussian(1, {(1,): 1.0}, (1.0,)),
        "gauss2d": HermiteGaussian.gaussian([1.0, 1.0]),
        "mixture": HermiteGaussian.gaussian([1.0]) + HermiteGaussian.gaussian([2.0], 0.5),
    }


BATTERY = battery()


# ============================================================
# CLOSED FORM
# ============================================================

def test_standard_gaussian_maps_to_scaled_gaussian():
    """e^{-xi^2/2} -> sqrt(2 pi) e^{-x^2/2} at 101 points"""
    f_hat = fourier_closed_form(BATTERY["gauss_half"])
    xs = np.linspace(-5.0, 5.0, 101)
    np.testing.assert_allclose(f_hat(xs), np.sqrt(2 * np.pi) * np.exp(-xs ** 2 / 2), rtol=1e-13)


def test_closed_form_of_first_hermite_function():
    """xi e^{-xi^2} -> -i (sqrt(pi)/2) x e^{-x^2/4}"""
    f_hat = fourier_closed_form(BATTERY["hermite1"])
    xs = np.linspace(-4.0, 4.0, 17)
    expected = -1j * np.sqrt(np.pi) / 2 * xs * np.exp(-xs ** 2 / 4)
    np.testing.assert_allclose(f_hat(xs), expected, rtol=1e-13, atol=1e-15)


def test_closed_form_in_two_dimensions():
    f_hat = fourier_closed_form(BATTERY["gauss2d"])
    assert f_hat.decay == (0.25, 0.25)
    assert complex(evaluate(f_hat, np.array([0.0, 0.0]))) == pytest.approx(np.pi)


def test_mixture_keeps_two_decays():
    f_hat = fourier_closed_form(BATTERY["mixture"])
    assert sorted(b.decay for b in f_hat.blocks) == [(0.125,), (0.25,)]


@pytest.mark.parametrize("name", sorted(BATTERY))
def test_closed_form_inverse_round_trip(name):
    f = BATTERY[name]
    back = inverse_fourier_closed_form(fourier_closed_form(f))
    axis = np.linspace(-2.0, 2.0, 5)
    pts = axis[:, None] if f.n == 1 else np.stack(np.meshgrid(axis, axis), axis=-1).reshape(-1, 2)
    np.testing.assert_allclose(evaluate(back, pts), evaluate(f, pts), rtol=1e-12, atol=1e-14)


# ============================================================
# FFT QUADRATURE
# ============================================================

def test_axes_are_zero_centred():
    xi = sample_axis(SPEC)
    x = dual_axis(SPEC)
    assert xi[128] == 0.0 and x[128] == 0.0
    assert xi[1] - xi[0] == pytest.approx(24.0 / 256)
    assert x[1] - x[0] == pytest.approx(np.pi / 12.0)


@pytest.mark.parametrize("name", sorted(BATTERY))
def test_numeric_transform_matches_closed_form(name):
    f = BATTERY[name]
    grid = fourier_numeric(f, SPEC)
    assert grid_error(grid, fourier_closed_form(f)) <= 1e-8


@pytest.mark.parametrize("name", sorted(BATTERY))
def test_numeric_round_trip(name):
    f = BATTERY[name]
    back = inverse_fourier(fourier_numeric(f, SPEC), SPEC)
    assert grid_error(back, f) <= 1e-8


@pytest.mark.parametrize("name", ["gauss1", "hermite1", "gauss2d"])
def test_derivative_exchange(name):
    f = BATTERY[name]
    assert max(fourier_derivative_exchange(f, j, SPEC) for j in range(f.n)) <= 1e-8


def test_inverse_from_closed_form_function():
    f = BATTERY["gauss1"]
    back = inverse_fourier(fourier_closed_form(f), SPEC)
    assert grid_error(back, f) <= 1e-8


def test_plain_callable_needs_dimension():
    with pytest.raises(ConfigError):
        fourier_numeric(lambda p: np.exp(-p[:, 0] ** 2), SPEC)
    grid = fourier_numeric(lambda p: np.exp(-p[:, 0] ** 2), SPEC, n=1)
    assert grid_error(grid, fourier_closed_form(BATTERY["gauss1"])) <= 1e-8


def test_box_too_small():
    wide = HermiteGaussian.gaussian([0.01])
    with pytest.raises(BoxTooSmallError):
        fourier_numeric(wide, SPEC)


def test_dimension_limit():
    with pytest.raises(ConfigError):
        fourier_numeric(HermiteGaussian.gaussian([1.0] * 4), FourierSpec(half_width=6.0, samples=8))


def test_grids_add_linearly():
    f, g = BATTERY["gauss1"], BATTERY["gauss2"]
    total = fourier_numeric(f, SPEC) + fourier_numeric(g, SPEC)
    direct = fourier_numeric(f + g, SPEC)
    np.testing.assert_allclose(total.values, direct.values, rtol=1e-12, atol=1e-15)
    frame = direct.to_frame()
    assert list(frame.columns) == ["x1", "re", "im"]
    assert len(frame) == 256


@hsettings(max_examples=20, deadline=None)
@given(a=st.floats(min_value=0.3, max_value=3.0))
def test_gaussian_transform_at_origin(a):
    """f^(0) = sqrt(pi/a), numerically and in closed form"""
    f = HermiteGaussian.gaussian([a])
    assert complex(fourier_closed_form(f)(0.0)) == pytest.approx(np.sqrt(np.pi / a), rel=1e-13)
    grid = fourier_numeric(f, SPEC)
    assert grid.values[128] == pytest.approx(np.sqrt(np.pi / a), rel=1e-10)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
