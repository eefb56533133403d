import math

import numpy as np
import pytest
from scipy.linalg import expm

from twobec import ConfigError, DegenerateRatioError, IntegrationError, ResourceError
from twobec.dephasing import (
    DephasingConfig, TwoBecDensityMatrix, evolve_dephasing_x, evolve_dephasing_z, linear_fit,
    logarithmic_negativity, negativity_record, negativity_scan, partial_transpose,
    pure_logarithmic_negativity, robustness_scaling,
)
from twobec.pure import TwoBecPureState, evolve_xz, evolve_zz, initial_xx_state
from twobec.spin import spin_operator

from oracles import dephasing_problem, lindblad_rk4, negativity_bruteforce, superoperator_evolution

PI = math.pi


def pure_projector(n, tau):
    return evolve_zz(initial_xx_state(n), tau).projector()


@pytest.mark.parametrize("n,tau", [(3, 0.4), (10, 1.1)])
def test_z_closed_form_no_noise_is_pure(n, tau):
    rho = evolve_dephasing_z(n, tau, 0.0).rho
    assert np.max(np.abs(rho - pure_projector(n, tau))) < 1e-10


def test_z_closed_form_tau_zero_is_product():
    rho = evolve_dephasing_z(5, 0.0, 3.0).rho
    assert np.max(np.abs(rho - pure_projector(5, 0.0))) < 1e-12


@pytest.mark.parametrize("n,tau,gamma", [(4, 0.3, 0.5), (2, 0.8, 0.2), (1, 0.5, 1.0)])
def test_z_closed_form_matches_rk4_oracle(n, tau, gamma):
    h, jumps, rho0 = dephasing_problem(n, "z", gamma)
    ref = lindblad_rk4(h, jumps, rho0, tau, 1e-4)
    rho = evolve_dephasing_z(n, tau, gamma).rho
    assert np.max(np.abs(rho - ref)) < 1e-6


@pytest.mark.parametrize("n,tau,gamma", [(6, 0.7, 0.3), (20, 0.2, 0.05)])
def test_z_invariants(n, tau, gamma):
    dm = evolve_dephasing_z(n, tau, gamma)
    assert abs(dm.trace() - 1) < 1e-9
    assert dm.hermiticity_error() < 1e-9
    assert dm.min_eigenvalue() > -1e-7


def test_z_budget():
    with pytest.raises(ResourceError):
        evolve_dephasing_z(41, 0.1, 0.1)


def test_x_no_noise_is_pure():
    rho = evolve_dephasing_x(4, 0.6, 0.0).rho
    assert np.max(np.abs(rho - pure_projector(4, 0.6))) < 1e-7


@pytest.mark.parametrize("tau,gamma", [(0.05, 0.3), (0.2, 1.0)])
def test_x_matches_superoperator_exponential_n1(tau, gamma):
    ref = superoperator_evolution(1, "x", gamma, tau)
    rho = evolve_dephasing_x(1, tau, gamma).rho
    assert np.max(np.abs(rho - ref)) < 1e-8


def test_x_matches_superoperator_exponential_n2():
    ref = superoperator_evolution(2, "x", 0.4, 0.3)
    assert np.max(np.abs(evolve_dephasing_x(2, 0.3, 0.4).rho - ref)) < 1e-8


@pytest.mark.parametrize("n,tau,gamma", [(3, 0.5, 0.2), (6, PI / 4, 0.05)])
def test_x_invariants(n, tau, gamma):
    dm = evolve_dephasing_x(n, tau, gamma)
    assert abs(dm.trace() - 1) < 1e-8
    assert dm.hermiticity_error() < 1e-9
    assert dm.min_eigenvalue() > -1e-7


def test_x_step_failure_raises():
    with pytest.raises(IntegrationError):
        evolve_dephasing_x(6, 1.0, 5.0, step=0.2)


def test_x_budget():
    with pytest.raises(ResourceError):
        evolve_dephasing_x(17, 0.1, 0.1)


def test_dephasing_config_validation():
    with pytest.raises(ConfigError):
        DephasingConfig("y", 0.1)
    with pytest.raises(ConfigError):
        DephasingConfig("z", -0.1)
    with pytest.raises(ConfigError):
        evolve_dephasing_z(3, -1.0, 0.1)


def test_negativity_product_zero():
    rho = TwoBecDensityMatrix.from_pure(initial_xx_state(5))
    assert abs(logarithmic_negativity(rho)) < 1e-9


def test_negativity_bell_n1():
    rho = TwoBecDensityMatrix(1, pure_projector(1, PI / 4))
    assert logarithmic_negativity(rho) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_negativity_pure_state_identity(n):
    for tau in (0.1, 0.5, 0.9):
        s = evolve_xz(evolve_zz(initial_xx_state(n), tau), 0.2)
        direct = logarithmic_negativity(TwoBecDensityMatrix.from_pure(s))
        assert direct == pytest.approx(pure_logarithmic_negativity(s), abs=1e-8)


def test_partial_transpose_matches_loops():
    rng = np.random.default_rng(11)
    n = 2
    a = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    assert logarithmic_negativity(rho, n) == pytest.approx(
        max(0.0, negativity_bruteforce(rho, n)), abs=1e-10)
    pt = partial_transpose(rho, n)
    assert pt[0 * 3 + 2, 1 * 3 + 0] == rho[0 * 3 + 0, 1 * 3 + 2]


def test_negativity_local_unitary_invariance():
    n = 3
    dm = evolve_dephasing_z(n, 0.4, 0.2)
    u1 = expm(-0.7j * spin_operator("y", n).data)
    u2 = expm(-1.3j * spin_operator("x", n).data)
    u = np.kron(u1, u2)
    rotated = TwoBecDensityMatrix(n, u @ dm.rho @ u.conj().T)
    assert logarithmic_negativity(rotated) == pytest.approx(logarithmic_negativity(dm), abs=1e-8)


@pytest.mark.parametrize("axis,n,tau,gamma", [
    ("z", 6, 0.2, 0.1), ("z", 10, PI / 4, 0.05), ("x", 4, 0.3, 0.1), ("x", 6, PI / 24, 0.05),
])
def test_ratio_never_exceeds_one(axis, n, tau, gamma):
    rec = negativity_record(axis, n, tau, gamma)
    assert rec.neg_bits >= -1e-9
    assert 0 <= rec.ratio <= 1 + 1e-6


def test_x_cat_time_far_more_fragile():
    n = 8
    cat = negativity_record("x", n, PI / 4, 0.05).ratio
    fan = negativity_record("x", n, PI / (4 * n), 0.05).ratio
    assert cat < 0.5 * fan


def test_negativity_scan_threads_identical():
    grid = [0.0, 0.1, 0.3, 0.7]
    a = negativity_scan("z", 5, grid, 0.2, threads=1)
    b = negativity_scan("z", 5, grid, 0.2, threads=3)
    assert [r.neg_bits for r in a] == [r.neg_bits for r in b]
    assert math.isnan(a[0].ratio)


def test_robustness_zero_noise():
    fit = robustness_scaling("z", "1/sqrtN", 0.0, [4, 6, 8])
    assert fit.ratios == pytest.approx((1, 1, 1), abs=1e-9)
    assert fit.exponent_gamma == pytest.approx(0, abs=1e-6)


def test_robustness_z_exponent_in_unit_interval():
    fit = robustness_scaling("z", "1/sqrtN", 0.1, [4, 6, 8, 10, 12])
    assert 0 <= fit.exponent_gamma <= 1
    assert 0 <= fit.r_squared <= 1
    assert fit.n_values == (4, 6, 8, 10, 12)


def test_robustness_degenerate_ratio():
    with pytest.raises(DegenerateRatioError) as info:
        robustness_scaling("z", "const", 0.1, [4, 6], tau_const=PI / 2)
    assert info.value.n == 4


def test_robustness_rejects_bad_rule_and_budget():
    with pytest.raises(ConfigError):
        robustness_scaling("z", "1/N^2", 0.1, [4, 6])
    with pytest.raises(ResourceError):
        robustness_scaling("x", "1/N", 0.1, [4, 20])


def test_linear_fit_perfect_and_flat():
    a, b, r2 = linear_fit([1, 2, 3], [3, 5, 7])
    assert (a, b, r2) == pytest.approx((1, 2, 1))
    assert linear_fit([1, 2, 3], [0, 0, 0])[2] == 1.0


def test_pure_state_wrapper_roundtrip():
    s = evolve_zz(initial_xx_state(2), 0.3)
    dm = TwoBecDensityMatrix.from_pure(s)
    assert dm.as_tensor().shape == (3, 3, 3, 3)
    assert isinstance(s, TwoBecPureState)
