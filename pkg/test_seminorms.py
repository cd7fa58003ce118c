"""Seminorms: log-space sup search, truncation certificates and memoized conjugates"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from src.models.schemas import SupSearchConfig
from src.tools.functions import HermiteGaussian
from src.tools.seminorms import (
    G_norm,
    N_norm,
    R_seminorm,
    calN_norm,
    p_norm,
    psi_star_orders,
    q_norm,
    radial_conjugate,
    sphere_area,
    sweep_frame,
)
from src.tools.weights import make_linear_family, make_power_family, make_table_family
from src.utils.config import settings
from src.utils.errors import ConfigError, ConvexityRequiredError, WeightTooWeakError


@pytest.fixture
def power():
    return make_power_family(2.0, 2.0, 8)


GAUSS1 = HermiteGaussian.gaussian([1.0])
HERMITE1 = HermiteGaussian(1, {(1,): 1.0}, (1.0,))


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * np.pi)
    assert sphere_area(3) == pytest.approx(4 * np.pi)
    with pytest.raises(ConfigError):
        sphere_area(0)


def test_sup_config_per_dimension():
    assert SupSearchConfig.for_dimension(1).grid_points == settings.sup_grid_points_1d
    assert SupSearchConfig.for_dimension(2).grid_points == settings.sup_grid_points_2d
    assert SupSearchConfig.for_dimension(4).grid_points == settings.sup_grid_points_nd
    assert SupSearchConfig.for_dimension(1, scale=2.0).grid_points % 2 == 1
    with pytest.raises(ValueError):
        SupSearchConfig(half_width=6.0, grid_points=64)


# ============================================================
# MEMOIZED CONJUGATES
# ============================================================

def test_radial_phi_star(power):
    """phi_nu*(r) = r^2 / (4 4^nu) for the base-2 quadratic family"""
    r = np.array([0.0, 1.0, 5.0, 20.0])
    np.testing.assert_allclose(radial_conjugate(power, 1, "phi_star", r), r ** 2 / 16, rtol=1e-6, atol=1e-9)
    radial_conjugate(power, 1, "phi_star", [100.0])
    assert power.cache[("phi_star", 1)].r_max >= 100.0
    with pytest.raises(ConfigError):
        radial_conjugate(power, 1, "phi_star", [-1.0])
    with pytest.raises(ConfigError):
        radial_conjugate(power, 1, "psi_star_star_star", [1.0])


def test_radial_biconjugate_recovers_psi(power):
    """(psi_1*)*(t) = 4 e^{2t} since psi_1 is convex"""
    t = np.array([0.0, 0.5, 1.0, 2.0])
    np.testing.assert_allclose(radial_conjugate(power, 1, "psi_star_star", t), 4 * np.exp(2 * t), rtol=1e-6)


def test_psi_star_orders_are_cached(power):
    first = psi_star_orders(power, 2)
    assert len(first) == settings.alpha_cap + 1
    assert first[0] == pytest.approx(-16.0)
    assert psi_star_orders(power, 2) is first
    with pytest.raises(ConfigError):
        psi_star_orders(power, 9)


def test_memo_is_shared_across_threads(power):
    """Concurrent callers see one interpolant per key, covering every request"""
    tops = [5.0, 50.0, 20.0, 200.0, 1.0, 80.0, 120.0, 10.0]

    def phi_star(top):
        r = np.linspace(0.0, top, 9)
        return radial_conjugate(power, 1, "phi_star", r), r

    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(phi_star, tops))
        orders = list(pool.map(lambda _: psi_star_orders(power, 3), range(4)))
    for values, r in results:
        np.testing.assert_allclose(values, r ** 2 / 16, rtol=1e-6, atol=1e-9)
    assert power.cache[("phi_star", 1)].r_max >= 200.0
    assert all(o is orders[0] for o in orders)
    assert power.cache[("psi_star_orders", 3)] is orders[0]


# ============================================================
# SEMINORMS OVER C^n
# ============================================================

def test_p_norm_of_gaussian(power):
    """|e^{-z^2}| e^{-4 |y|^2} = e^{-x^2 - 3 y^2} peaks at 0"""
    value = p_norm(GAUSS1, power, 1, 0)
    assert value.value == pytest.approx(1.0, rel=1e-12)
    assert value.converged
    assert np.allclose(value.argmax_point, 0.0)
    weighted = p_norm(GAUSS1, power, 1, 2)
    assert weighted.value > 1.0
    assert weighted.converged


def test_p_norm_decreases_with_nu(power):
    values = [p_norm(HERMITE1, power, nu, 1).value for nu in (1, 2, 3)]
    assert values[0] >= values[1] >= values[2] > 0


def test_calN_norm_of_gaussian(power):
    """(psi_1*)*(0) = 4, so the sup is e^{-4} at z = 0"""
    value = calN_norm(GAUSS1, power, 1, 0)
    assert value.log_value == pytest.approx(-4.0, abs=1e-6)
    assert value.converged


def test_weak_weight_is_reported():
    """e^{y^2} against e^{-|y|} keeps growing at the boundary"""
    with pytest.raises(WeightTooWeakError):
        p_norm(GAUSS1, make_linear_family(1.0, 2), 1, 0)


def test_zero_function(power):
    zero = HermiteGaussian(1, {(0,): 0.0}, (1.0,))
    value = p_norm(zero, power, 1, 0)
    assert value.value == 0.0 and value.converged
    assert R_seminorm(zero, power, 0, 1, alpha_budget=10).value == 0.0


def test_dimension_and_budget_checks(power):
    with pytest.raises(ConfigError):
        p_norm(HermiteGaussian.gaussian([1.0, 1.0, 1.0]), power, 1, 0)
    with pytest.raises(ConfigError):
        R_seminorm(GAUSS1, power, 0, 1, alpha_budget=settings.alpha_cap + 1)
    with pytest.raises(ConfigError):
        p_norm(GAUSS1, power, 20, 0)


# ============================================================
# SEMINORMS OVER R^n
# ============================================================

def test_R_seminorm_has_tail_certificate(power):
    value = R_seminorm(GAUSS1, power, 0, 1, alpha_budget=40)
    assert value.truncation == 40
    assert value.shell_ratio is not None and value.shell_ratio < 1
    assert value.tail_bound <= 1e-6 * value.value
    assert value.converged
    # the alpha = 0 term at x = 0 alone is e^{psi_1*(0)} = e^{-4}
    assert value.value >= np.exp(-4.0)
    assert value.argmax_index is not None and len(value.argmax_index) == 1


def test_G_and_N_norms(power):
    g = G_norm(GAUSS1, power, 1, 1, beta_budget=30)
    n = N_norm(GAUSS1, power, 1, 1, k_budget=30)
    assert g.converged and n.converged
    assert g.value > 0
    # |x^beta| <= (1+|x|)^|beta| shell by shell
    assert g.log_value <= n.log_value + 1e-9


def test_q_norm_of_gaussian(power):
    """e^{-x^2} e^{x^2/16} peaks at 0"""
    value = q_norm(GAUSS1, power, 0, 1)
    assert value.value == pytest.approx(1.0, rel=1e-9)
    assert value.converged
    assert value.argmax_index == [0]


def test_q_norm_needs_convex_weight():
    bent = make_table_family([0.0, 1.0, 2.0, 3.0], [[0.0, 2.0, 3.0, 3.5]])
    with pytest.raises(ConvexityRequiredError):
        q_norm(GAUSS1, bent, 0, 1)


def test_two_dimensional_seminorms(power):
    f = HermiteGaussian.gaussian([1.0, 1.0])
    q = q_norm(f, power, 0, 1)
    assert q.value == pytest.approx(1.0, rel=1e-9)
    r = R_seminorm(f, power, 0, 1, alpha_budget=12)
    assert r.value >= np.exp(-4.0)


def test_sweep_frame(power):
    values = [p_norm(GAUSS1, power, nu, 0) for nu in (1, 2)]
    frame = sweep_frame("nu", [1, 2], values)
    assert list(frame.columns) == ["nu", "name", "value", "log_value", "tail_bound", "converged"]
    assert frame["value"].tolist() == pytest.approx([1.0, 1.0])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
