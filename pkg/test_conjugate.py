"""Young conjugates: grid engine, adaptive engine and the conjugate lemmas"""

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.tools.conjugate import (
    GridFunction,
    biconjugate,
    conjugate_adaptive,
    conjugate_brute_force,
    conjugate_grid,
    conjugate_profile,
    corollary1_bound,
    dilation_conjugate_margin,
    conjugate_gap_divergence,
    exp_conjugate,
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
from src.tools.weights import WeightFunction, make_linear_family, make_power_family, make_table_family
from src.utils.errors import (
    ConfigError,
    ConvexityRequiredError,
    HypothesisViolatedError,
    NoDecayError,
)


@pytest.fixture
def power():
    return make_power_family(2.0, 2.0, 6)


def square():
    return WeightFunction(lambda x: x ** 2, label="x^2")


# ============================================================
# GRID ENGINE
# ============================================================

@hsettings(max_examples=200, deadline=None)
@given(
    data=st.lists(
        st.tuples(st.integers(0, 4000), st.integers(-10_000, 10_000)),
        min_size=2, max_size=300, unique_by=lambda t: t[0],
    ),
    slopes=st.lists(st.integers(-400, 400), min_size=1, max_size=200, unique=True),
)
def test_grid_engine_matches_brute_force(data, slopes):
    """Exact arithmetic (integer samples, quarter slopes) makes both engines agree bit for bit"""
    data = sorted(data)
    g = GridFunction(np.array([x for x, _ in data], dtype=float), np.array([y for _, y in data], dtype=float))
    s = np.sort(np.array(slopes, dtype=float)) / 4.0
    fast = conjugate_grid(g, s)
    slow = conjugate_brute_force(g, s)
    np.testing.assert_array_equal(fast.values, slow.values)


def test_grid_engine_on_large_smooth_grid():
    xs = np.linspace(0.0, 3.0, 4096)
    g = GridFunction.sample(lambda x: np.exp(x) - 1.0, xs)
    slopes = np.linspace(-1.0, 25.0, 4096)
    np.testing.assert_allclose(conjugate_grid(g, slopes).values, conjugate_brute_force(g, slopes).values,
                               rtol=0, atol=1e-12)


def test_grid_engine_on_collinear_runs():
    """Slopes equal to a flat run's edge slope tie along the run; both engines pick the same index"""
    xs = np.linspace(0.0, 3.0, 3001)
    g = GridFunction.sample(lambda x: 0.7 * np.abs(x - 1.0), xs)
    slopes = np.linspace(-0.7, 0.7, 15)
    fast = conjugate_grid(g, slopes)
    slow = conjugate_brute_force(g, slopes)
    np.testing.assert_array_equal(fast.values, slow.values)
    np.testing.assert_array_equal(fast.argmax_index, slow.argmax_index)


def test_grid_engine_on_table_member():
    member = make_table_family([0.0, 1.0, 2.0, 4.0], [[0.0, 0.5, 1.5, 5.5]])[1]
    xs = np.linspace(0.0, 6.0, 1201)
    g = GridFunction.sample(member, xs)
    slopes = np.array([-1.0, 0.0, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0])
    fast = conjugate_grid(g, slopes)
    slow = conjugate_brute_force(g, slopes)
    np.testing.assert_array_equal(fast.values, slow.values)
    np.testing.assert_array_equal(fast.argmax_index, slow.argmax_index)


def test_grid_function_validation():
    with pytest.raises(ValueError):
        GridFunction(np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        GridFunction(np.array([-1.0, 1.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        GridFunction(np.array([0.0, 1.0]), np.array([1.0, np.inf]))
    with pytest.raises(ConfigError):
        conjugate_grid(GridFunction(np.array([0.0, 1.0]), np.array([0.0, 1.0])), [2.0, 1.0])


@pytest.mark.parametrize("n", [65, 129, 257])
def test_biconjugate_error_is_second_order(n):
    """|(g*)* - g| <= h^2/4 + ds^2/16 for g = x^2 off the sample nodes"""
    xs = np.linspace(0.0, 2.0, n)
    h = xs[1] - xs[0]
    slopes = np.linspace(0.0, 4.0, n)
    ds = slopes[1] - slopes[0]
    g = GridFunction.sample(lambda x: x ** 2, xs)
    out = np.linspace(0.1, 1.9, 37) + h / 3
    bi = biconjugate(g, slopes, out)
    err = np.max(np.abs(bi.ys - out ** 2))
    assert err <= h ** 2 / 4 + ds ** 2 / 16 + 1e-13


def test_grid_result_csv_round_trip(tmp_path):
    g = GridFunction.sample(np.exp, np.linspace(0.0, 1.0, 11))
    path = tmp_path / "g.csv"
    g.to_csv(path)
    back = GridFunction.read_csv(path)
    np.testing.assert_array_equal(back.xs, g.xs)
    np.testing.assert_array_equal(back.ys, g.ys)
    frame = conjugate_grid(g, [0.0, 1.0, 2.0]).to_frame()
    assert list(frame.columns) == ["slope", "value", "argmax_x"]


# ============================================================
# ADAPTIVE ENGINE
# ============================================================

def test_exponential_conjugate_closed_form():
    """(e^{2y})*(6) = 3 ln 3 - 3"""
    value = conjugate_adaptive(lambda y: np.exp(2.0 * y), True, 6.0)
    assert value == pytest.approx(3.0 * np.log(3.0) - 3.0, abs=1e-8)


def test_exponential_conjugate_below_unit_slope():
    """(e^y)* = -1 on [0, 1]"""
    values = conjugate_profile(np.exp, True, np.linspace(0.0, 1.0, 11))
    np.testing.assert_allclose(values, -1.0, rtol=0, atol=1e-12)


def test_nonconvex_path_agrees_with_convex_path():
    xs = np.array([0.5, 3.0, 10.0, 40.0])
    convex = conjugate_profile(lambda y: y ** 2, True, xs)
    scanned = conjugate_profile(lambda y: y ** 2, False, xs)
    np.testing.assert_allclose(scanned, xs ** 2 / 4, rtol=1e-9)
    np.testing.assert_allclose(convex, xs ** 2 / 4, rtol=1e-9)


def test_no_decay_for_linear_weight():
    with pytest.raises(NoDecayError):
        conjugate_adaptive(lambda y: y, True, 2.0)
    with pytest.raises(ConfigError):
        conjugate_adaptive(lambda y: y ** 2, True, -1.0)


def test_power_family_conjugates(power):
    """psi_1* = -4 up to 8; phi_1*(r) = r^2/16"""
    np.testing.assert_allclose(exp_conjugate(power[1], [0.0, 1.0, 4.0, 8.0]), -4.0, rtol=1e-9)
    rs = np.array([0.0, 1.0, 8.0, 100.0])
    phi = power[1]
    np.testing.assert_allclose(conjugate_profile(phi, phi.convex_flag, rs), rs ** 2 / 16, rtol=1e-9, atol=1e-12)
    assert psi_weight(phi).convex_flag


@hsettings(max_examples=40, deadline=None)
@given(
    x=st.floats(min_value=0.0, max_value=50.0),
    y=st.floats(min_value=0.0, max_value=4.0),
)
def test_fenchel_young(x, y):
    """x y <= g(y) + g*(x) for g = psi_1"""
    g = psi_weight(make_power_family(2.0, 2.0, 2)[1])
    star = float(conjugate_profile(g, g.convex_flag, np.array([x]))[0])
    assert x * y <= float(g(y)) + star + 1e-9 * (1.0 + abs(x * y))


# ============================================================
# LEMMAS
# ============================================================

def test_lemma1(power):
    profile = lemma1_margin(power[1], 1.0, 1.0, np.linspace(0.0, 200.0, 401))
    assert profile.passed
    with pytest.raises(HypothesisViolatedError):
        lemma1_margin(make_linear_family(1.0, 2)[1], 2.0, 0.0, np.linspace(0.0, 10.0, 11))


def test_corollary1(power):
    A = corollary1_bound(power[1], 2.0, np.linspace(0.0, 200.0, 401))
    assert np.isfinite(A)
    with pytest.raises(HypothesisViolatedError):
        corollary1_bound(make_linear_family(1.0, 2)[1], 2.0, np.linspace(0.0, 200.0, 401))


def test_remark1_series_converges(power):
    series = remark1_series(power[1], 1.0, 200)
    assert series.converged
    assert series.converged_at is not None
    assert np.all(np.diff(series.partial_sums) >= 0)
    two = remark1_series(power[1], 2.0, 200, n=2)
    assert two.converged and two.dimension == 2
    with pytest.raises(ConfigError):
        remark1_series(power[1], 1.0, 5)


def test_lemma2(power):
    A, profile = lemma2_constant(power[1], power[2], 1.0, 0.0, np.linspace(0.0, 20.0, 21))
    assert profile.passed
    assert A == pytest.approx(0.0)
    assert len(profile.ys) == len(profile.xs) == 21 * 21


def test_lemma3_equality_case(power):
    """psi_1* - psi_2* = x ln 2 once both maximisers are interior"""
    xs = np.linspace(128.0, 1000.0, 50)
    gap = exp_conjugate(power[1], xs) - exp_conjugate(power[2], xs)
    np.testing.assert_allclose(gap, xs * np.log(2.0), rtol=0, atol=1e-7 * (1 + xs * np.log(2.0)).max())
    assert lemma3_gap(power[1], power[2], 2.0, 0.001, np.linspace(0.0, 200.0, 201)).passed
    assert family_gap(power, 1, np.linspace(0.0, 200.0, 201)).passed
    with pytest.raises(ConfigError):
        lemma3_gap(power[1], power[2], 1.0, 0.0, xs)


def test_lemma5(power):
    profile = lemma5_gap_growth(power[1], 0.5, np.linspace(0.0, 200.0, 401))
    assert profile.passed
    assert profile.constants["last"] > profile.constants["midpoint"]


def test_lemma67_sandwich_equality_for_square():
    """S(t) = t ln t - t for u = x^2 and t >= 2"""
    ts = np.linspace(0.01, 100.0, 400)
    profile = lemma67_sandwich(square(), ts)
    assert profile.passed
    xs = np.asarray(profile.xs)
    margins = np.asarray(profile.margins)
    assert np.max(np.abs(margins[xs >= 2.0])) <= 1e-7
    assert profile.constants["K_witness"] <= 1.25
    doubled = lemma67_sandwich(square(), np.linspace(0.01, 100.0, 799))
    assert doubled.constants["K_witness"] == pytest.approx(profile.constants["K_witness"], rel=0.01)


def test_lemma67_needs_convexity():
    bent = WeightFunction(lambda x: x ** 2, convex_flag=False, label="bent")
    with pytest.raises(ConvexityRequiredError):
        lemma67_sandwich(bent, np.linspace(0.1, 10.0, 10))


def test_ineq7_and_ineq16(power):
    profile = ineq7_shift(power, 1, 1.0, np.linspace(0.0, 15.0, 151))
    assert profile.passed
    assert np.isfinite(profile.constants["C"])
    A, sub = ineq16_subadd(power, 1, np.linspace(0.0, 60.0, 31))
    assert sub.passed
    assert np.isfinite(A)


def test_dilation(power):
    xs = np.linspace(0.0, 500.0, 501)
    assert dilation_conjugate_margin(power, 1, xs).passed
    assert conjugate_gap_divergence(power, 1, xs).passed


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
