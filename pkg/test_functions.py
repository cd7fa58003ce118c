"""Hermite-Gaussian test functions: evaluation, derivatives, contour quadrature, Taylor extension"""

import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st
from pydantic import ValidationError

from src.models.schemas import ContourSpec
from src.tools.conjugate import exp_conjugate
from src.tools.functions import (
    GaussianSum,
    HermiteGaussian,
    cauchy_derivative,
    cauchy_derivatives,
    contour_samples,
    derivative_closed_form,
    derivatives_at,
    evaluate,
    function_from_spec,
    function_to_spec,
    log_multi_factorial,
    multi_factorial,
    multi_indices,
    multiply_coordinate,
    shell,
    taylor_expansion,
    taylor_extend,
    taylor_tail_bound,
)
from src.tools.seminorms import R_seminorm
from src.tools.weights import make_power_family
from src.utils.errors import (
    CoefficientOverflowError,
    ConfigError,
    NotConvergedError,
    QuadratureUnconvergedError,
)


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


def center_for(f) -> np.ndarray:
    return np.array([0.3, -0.2][: f.n])


# ============================================================
# MULTI-INDICES
# ============================================================

def test_shell_and_graded_order():
    assert shell(2, 2) == ((2, 0), (1, 1), (0, 2))
    assert multi_indices(2, 1) == [(0, 0), (1, 0), (0, 1)]
    assert len(multi_indices(2, 12)) == 91
    assert multi_indices(1, 3, min_order=2) == [(2,), (3,)]


def test_multi_factorials():
    assert multi_factorial((3, 2)) == 12.0
    expected = math.log(math.factorial(15) * math.factorial(10))
    assert log_multi_factorial((15, 10)) == pytest.approx(expected, rel=1e-12)
    assert multi_factorial((15, 10)) == pytest.approx(math.factorial(15) * math.factorial(10), rel=1e-12)


# ============================================================
# TYPES AND EVALUATION
# ============================================================

def test_block_validation():
    with pytest.raises(ValueError):
        HermiteGaussian(1, {(0,): 1.0}, (0.0,))
    with pytest.raises(ValueError):
        HermiteGaussian(2, {(0, 0): 1.0}, (1.0,))
    with pytest.raises(ValueError):
        HermiteGaussian(1, {(0, 1): 1.0}, (1.0,))
    with pytest.raises(ValueError):
        HermiteGaussian(1, {}, (1.0,))


def test_evaluate_gaussian():
    f = BATTERY["gauss1"]
    assert complex(f(0.5)) == pytest.approx(np.exp(-0.25))
    assert complex(f(1j)) == pytest.approx(np.e)
    values = evaluate(BATTERY["gauss2d"], np.array([[0.0, 0.0], [1.0, 1.0]]))
    np.testing.assert_allclose(values, [1.0, np.exp(-2.0)])
    with pytest.raises(ConfigError):
        evaluate(BATTERY["gauss2d"], np.array([1.0, 2.0, 3.0]))


def test_evaluate_one_dimensional_arrays():
    """For n = 1 a flat array is a batch of points, not one point"""
    xs = np.linspace(-2.0, 2.0, 17)
    values = BATTERY["gauss1"](xs)
    assert values.shape == (17,)
    np.testing.assert_allclose(values, np.exp(-xs ** 2), rtol=1e-14)
    grid = np.stack([xs, xs + 0.5j])
    assert evaluate(BATTERY["hermite1"], grid).shape == (2, 17)
    np.testing.assert_allclose(evaluate(BATTERY["mixture"], xs), np.exp(-xs ** 2) + 0.5 * np.exp(-2.0 * xs ** 2))
    assert evaluate(BATTERY["gauss1"], np.array([0.5])).shape == ()


def test_gaussian_sum():
    mix = BATTERY["mixture"]
    assert isinstance(mix, GaussianSum)
    assert mix.n == 1
    assert mix.decay == (1.0,)
    assert mix.is_real()
    assert complex(mix(0.0)) == pytest.approx(1.5)
    assert complex(mix.scaled(2.0)(0.0)) == pytest.approx(3.0)
    assert not mix.scaled(1j).is_real()
    with pytest.raises(ValueError):
        GaussianSum((BATTERY["gauss1"], BATTERY["gauss2d"]))


def test_function_from_spec():
    spec = {
        "n": 1,
        "terms": [{"alpha": [0], "re": 1.0}],
        "decay": [1.0],
        "plus": [{"terms": [{"alpha": [0], "re": 0.5}], "decay": [2.0]}],
    }
    f = function_from_spec(spec)
    assert isinstance(f, GaussianSum)
    xs = np.linspace(-2.0, 2.0, 9)
    np.testing.assert_allclose(f(xs), BATTERY["mixture"](xs))
    again = function_from_spec(function_to_spec(f))
    np.testing.assert_allclose(again(xs), f(xs))
    with pytest.raises(ValidationError):
        function_from_spec({"n": 1, "terms": [{"alpha": [0], "re": 1.0}]})


@hsettings(max_examples=50, deadline=None)
@given(
    a=st.floats(min_value=0.2, max_value=3.0),
    x=st.floats(min_value=-2.0, max_value=2.0),
    y=st.floats(min_value=-2.0, max_value=2.0),
)
def test_real_functions_commute_with_conjugation(a, x, y):
    f = HermiteGaussian(1, {(0,): 1.0, (2,): -0.5}, (a,))
    z = complex(x, y)
    assert complex(f(np.conj(z))) == pytest.approx(np.conj(complex(f(z))), rel=1e-12, abs=1e-300)


# ============================================================
# EXACT DERIVATIVES
# ============================================================

def test_derivative_closed_form_of_gaussian():
    f = BATTERY["gauss1"]
    d1 = derivative_closed_form(f, (1,))
    assert d1.coeffs == {(1,): -2.0 + 0j}
    d2 = derivative_closed_form(f, (2,))
    xs = np.linspace(-2.0, 2.0, 9)
    np.testing.assert_allclose(d2(xs), (4 * xs ** 2 - 2) * np.exp(-xs ** 2), atol=1e-14)


def test_derivative_argument_errors():
    with pytest.raises(ConfigError):
        derivative_closed_form(BATTERY["gauss1"], (1, 0))
    with pytest.raises(ConfigError):
        derivative_closed_form(BATTERY["gauss1"], (61,))
    with pytest.raises(ConfigError):
        derivative_closed_form(BATTERY["gauss1"], (5,), alpha_cap=4)
    with pytest.raises(CoefficientOverflowError):
        derivative_closed_form(HermiteGaussian.gaussian([1e6]), (60,))


def test_multiply_coordinate():
    xs = np.linspace(-1.0, 1.0, 5)
    g = multiply_coordinate(BATTERY["gauss1"], 0, 2.0)
    np.testing.assert_allclose(g(xs), 2 * xs * np.exp(-xs ** 2))


@pytest.mark.parametrize("name", sorted(BATTERY))
def test_derivative_tables_match_closed_forms(name):
    f = BATTERY[name]
    alphas = multi_indices(f.n, 12)
    axis = np.linspace(-2.0, 2.0, 9)
    points = axis[:, None] if f.n == 1 else np.stack(np.meshgrid(axis, axis), axis=-1).reshape(-1, 2)
    table = derivatives_at(f, points, alphas)
    for row, alpha in zip(table, alphas):
        ref = derivative_closed_form(f, alpha)(points.astype(complex))
        scale = max(np.max(np.abs(ref)), 1.0)
        np.testing.assert_allclose(row, ref, rtol=1e-9, atol=1e-11 * scale)


# ============================================================
# CAUCHY QUADRATURE
# ============================================================

@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("name", sorted(BATTERY))
def test_cauchy_derivatives_match_closed_forms(name, radius):
    f = BATTERY[name]
    center = center_for(f)
    spec = ContourSpec(center=center.tolist(), radius=radius, nodes=128)
    peak = float(np.max(np.abs(contour_samples(f, spec))))
    alphas = multi_indices(f.n, 12)
    values = cauchy_derivatives(f, spec, alphas)
    for alpha in alphas:
        exact = complex(evaluate(derivative_closed_form(f, alpha), center.astype(complex)))
        floor = 1e-13 * multi_factorial(alpha) * radius ** (-sum(alpha)) * peak
        assert abs(values[alpha] - exact) <= 1e-9 * abs(exact) + floor


def test_single_cauchy_derivative():
    f = BATTERY["gauss1"]
    spec = ContourSpec(center=[0.0], radius=1.0, nodes=64)
    # D^4 e^{-z^2} at 0 is 12
    assert cauchy_derivative(f, spec, (4,)) == pytest.approx(12.0, rel=1e-10)
    with pytest.raises(ConfigError):
        cauchy_derivative(f, ContourSpec(center=[0.0], radius=1.0, nodes=32), (12,))
    with pytest.raises(ConfigError):
        cauchy_derivative(f, ContourSpec(center=[0.0, 0.0], radius=1.0, nodes=64), (2,))


def test_quadrature_check_catches_aliasing():
    """A wide contour with few nodes aliases high Taylor coefficients"""
    f = BATTERY["gauss1"]
    with pytest.raises(QuadratureUnconvergedError):
        cauchy_derivative(f, ContourSpec(center=[0.0], radius=6.0, nodes=32), (8,))


def test_contour_spec_validation():
    with pytest.raises(ValidationError):
        ContourSpec(center=[0.0], radius=1.0, nodes=48)
    with pytest.raises(ValidationError):
        ContourSpec(center=[0.0], radius=0.0, nodes=64)


# ============================================================
# TAYLOR EXTENSION
# ============================================================

def test_taylor_extension_reproduces_entire_function():
    f = BATTERY["gauss1"]
    value = taylor_extend(f, 0.3, 1.5, 60)
    direct = complex(f(0.3 + 1.5j))
    assert abs(value - direct) <= 1e-8 * abs(direct)
    two = BATTERY["gauss2d"]
    value = taylor_extend(two, [0.3, -0.2], [1.0, 0.5], 60)
    direct = complex(evaluate(two, np.array([0.3 + 1.0j, -0.2 + 0.5j])))
    assert abs(value - direct) <= 1e-8 * abs(direct)


def test_taylor_extension_on_real_axis():
    f = BATTERY["hermite1"]
    assert taylor_extend(f, 0.7, 0.0, 0) == pytest.approx(complex(f(0.7)))


def test_taylor_extension_detects_truncation():
    with pytest.raises(NotConvergedError):
        taylor_extend(BATTERY["gauss1"], 0.3, 2.0, 5)
    with pytest.raises(ConfigError):
        taylor_extend(BATTERY["gauss1"], 0.3, 1.0, 61)


def test_taylor_tail_bound():
    def psi_star(k):
        return k * np.log1p(k)

    assert taylor_tail_bound(0.0, psi_star, 0, 0.0, 0.0, 10, 1) == 0.0
    coarse = taylor_tail_bound(0.0, psi_star, 0, 0.0, 1.5, 10, 1)
    fine = taylor_tail_bound(0.0, psi_star, 0, 0.0, 1.5, 30, 1)
    assert 0.0 < fine < coarse
    assert taylor_tail_bound(0.0, psi_star, 2, 3.0, 1.5, 10, 1) < coarse


def test_taylor_expansion_tail_bound_covers_the_error():
    """R_{0,1}(f) e^(-psi_1*(k)) majorizes the orders dropped at alpha_max"""
    f = BATTERY["gauss1"]
    family = make_power_family(2.0, 2.0, 6)
    r_value = R_seminorm(f, family, 0, 1)
    assert r_value.converged
    r_log = float(np.log(r_value.value + r_value.tail_bound))
    ks = np.arange(1.0, 400.0)
    table = exp_conjugate(family[1], ks)

    def psi_star(k):
        return np.interp(k, ks, table)

    direct = complex(f(0.3 + 0.5j))
    bounds = []
    for alpha_max in (20, 30):
        ext = taylor_expansion(f, 0.3, 0.5, alpha_max, r_log, psi_star)
        assert ext.value == taylor_extend(f, 0.3, 0.5, alpha_max)
        assert abs(ext.value - direct) <= ext.tail_bound
        assert ext.magnitude >= abs(ext.value)
        bounds.append(ext.tail_bound)
    assert 0.0 < bounds[1] < bounds[0]
    assert taylor_expansion(f, 0.3, 0.5, 20).tail_bound is None
    with pytest.raises(ConfigError):
        taylor_expansion(f, 0.3, 0.5, 20, r_log)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
