import math

import numpy as np
import pytest

from twobec.dephasing import evolve_dephasing_z
from twobec.pure import TwoBecPureState, evolve_xz, evolve_zz, initial_xx_state
from twobec.spin import SpinCoherentParams
from twobec.witness import (
    collective_moments, collective_moments_density, cv_prediction, evaluate_witness,
    product_state, random_product_states, witness_scan,
)

from oracles import dense_moments

PI = math.pi


@pytest.mark.parametrize("n", [1, 5, 20, 200])
def test_initial_moments(n):
    m = collective_moments(initial_xx_state(n))
    assert (m.sx1, m.sx2) == pytest.approx((n, n), abs=1e-9)
    assert (m.var_a, m.var_b) == pytest.approx((2 * n, 2 * n), abs=1e-8)


@pytest.mark.parametrize("n", [1, 2, 4, 6])
@pytest.mark.parametrize("tau", [0.0, 0.05, PI / 4, 1.0])
def test_moments_match_dense_oracle(n, tau):
    s = evolve_xz(evolve_zz(initial_xx_state(n), tau), 0.3)
    m = collective_moments(s)
    ref = dense_moments(s.psi)
    for key in ("sx1", "sx2", "var_a", "var_b"):
        assert getattr(m, key) == pytest.approx(ref[key], abs=1e-9)


def test_density_adapter_agrees_with_pure_route():
    s = evolve_zz(initial_xx_state(4), 0.13)
    a = collective_moments(s)
    b = collective_moments_density(s.projector(), 4)
    for key in ("sx1", "sx2", "var_a", "var_b"):
        assert getattr(b, key) == pytest.approx(getattr(a, key), abs=1e-9)


def test_density_adapter_on_dephased_state():
    m = collective_moments_density(evolve_dephasing_z(4, 0.1, 0.3), 4)
    assert m.var_a >= 0 and m.var_b >= 0
    assert abs(m.sx1) <= 4


@pytest.mark.parametrize("n", [3, 12])
def test_minus_x_state(n):
    p = SpinCoherentParams(1 / math.sqrt(2), -1 / math.sqrt(2))
    m = collective_moments(product_state(p, p, n))
    assert (m.sx1, m.sx2) == pytest.approx((-n, -n), abs=1e-9)


@pytest.mark.parametrize("n", [5, 20])
def test_boundary_at_zero(n):
    w = evaluate_witness(initial_xx_state(n))
    assert abs(w.margin) < 1e-8
    assert not w.entangled_flag


def test_violation_at_half_inverse_n():
    w = evaluate_witness(evolve_zz(initial_xx_state(20), 0.025))
    assert w.margin < 0
    assert w.entangled_flag
    assert w.lhs == pytest.approx(w.rhs + w.margin)


def test_blind_to_cat_state():
    w = evaluate_witness(evolve_zz(initial_xx_state(20), PI / 4))
    assert w.margin >= 0
    assert not w.entangled_flag


@pytest.mark.parametrize("n", [4, 15, 40])
def test_exchange_symmetry(n):
    for tau in np.linspace(0, 1.5, 9):
        m = collective_moments(evolve_zz(initial_xx_state(n), tau))
        assert m.var_a == pytest.approx(m.var_b, abs=1e-8)
        assert m.var_a >= -1e-9


def test_cv_prediction_values():
    assert cv_prediction(30, 0.0).predicted_var == 60
    assert cv_prediction(30, 1 / 60).predicted_var == pytest.approx(30, abs=1e-12)
    taus = np.linspace(0, 0.1, 501)
    assert min(cv_prediction(30, t).predicted_var for t in taus) >= 30 - 1e-12
    assert cv_prediction(30, 0.02).within_domain
    assert not cv_prediction(30, 0.5).within_domain


def test_cv_prediction_inside_domain():
    n = 50
    rec = witness_scan(n, [0.1 / n])[0]
    assert abs(rec.var_a / rec.prediction.predicted_var - 1) < 0.1


def test_cv_prediction_breaks_down():
    rec = witness_scan(20, [0.5])[0]
    ratio = rec.prediction.predicted_var / rec.var_a
    assert max(ratio, 1 / ratio) > 2
    assert not rec.prediction.within_domain


def test_scan_violation_interval():
    n = 20
    grid = np.linspace(0, 0.05, 26)
    recs = witness_scan(n, grid)
    assert abs(recs[0].witness.margin) < 1e-8
    neg = [r.tau for r in recs if r.witness.margin < 0]
    assert min(neg) < 1 / (2 * n) < max(neg)
    i = int(np.argmin(np.abs(grid - 1 / (2 * n))))
    assert recs[i].witness.margin < 0


def test_scan_threads_identical():
    grid = np.linspace(0, 0.3, 31)
    a = [r.witness.margin for r in witness_scan(12, grid, threads=1)]
    b = [r.witness.margin for r in witness_scan(12, grid, threads=4)]
    assert a == b


def test_no_false_positives_on_product_states():
    margins = []
    for i, (_, state) in enumerate(random_product_states(100, 8, seed=2013)):
        w = evaluate_witness(state)
        margins.append(w.margin)
        assert not w.entangled_flag
    assert min(margins) >= -1e-8


def test_random_product_states_reproducible():
    a = [s.psi for _, s in random_product_states(3, 4, seed=5)]
    b = [s.psi for _, s in random_product_states(3, 4, seed=5)]
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)
    assert isinstance(next(random_product_states(1, 4, 0))[1], TwoBecPureState)
