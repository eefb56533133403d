"""
EPR-type separability witness for two condensates.

For any separable state

    Var(S^y_1 - S^z_2) + Var(S^y_2 - S^z_1) >= 2 <S^x_1> + 2 <S^x_2>,

so a negative margin (lhs - rhs) certifies entanglement.  The witness is
sufficient, not necessary: it misses the cat-like states at long times.

The short-time continuous-variable treatment (S^y, S^z as quadratures
scaled by 2 sqrt(<S^x>)) predicts each variance term to be
N (1 - 2 N tau)^2 + N, valid only for tau of order 1/N.
"""

from dataclasses import dataclass

import numpy as np

from ._sweep import parallel_map
from .pure import TwoBecPureState, evolve_zz, initial_xx_state
from .spin import SpinCoherentParams, apply_spin, check_boson_number, coherent_to_fock, spin_operator

# margins within rounding of zero are not evidence of entanglement
FLAG_TOL = 1e-8


@dataclass(frozen=True)
class MomentReport:
    sx1: float
    sx2: float
    var_a: float
    var_b: float


@dataclass(frozen=True)
class WitnessResult:
    lhs: float
    rhs: float
    margin: float
    entangled_flag: bool


@dataclass(frozen=True)
class CvPrediction:
    tau: float
    predicted_var: float
    within_domain: bool


@dataclass(frozen=True)
class WitnessRecord:
    tau: float
    witness: WitnessResult
    prediction: CvPrediction
    var_a: float

    @property
    def cv_margin(self):
        return 2 * self.prediction.predicted_var - self.witness.rhs


def _on_1(axis, psi):
    return apply_spin(axis, psi)


def _on_2(axis, psi):
    return apply_spin(axis, psi.T).T


def _expect(psi, phi):
    return complex(np.vdot(psi, phi))


def _variance(psi, phi):
    # phi = A psi with A Hermitian, so <A^2> = <phi|phi>
    mean = _expect(psi, phi).real
    return float(np.vdot(phi, phi).real - mean ** 2)


def collective_moments(state):
    """<S^x_i> and the two variance combinations, via tridiagonal operator action."""
    psi = state.psi
    sx1 = _expect(psi, _on_1("x", psi)).real
    sx2 = _expect(psi, _on_2("x", psi)).real
    var_a = _variance(psi, _on_1("y", psi) - _on_2("z", psi))
    var_b = _variance(psi, _on_2("y", psi) - _on_1("z", psi))
    return MomentReport(sx1, sx2, var_a, var_b)


def collective_moments_density(rho, n):
    """Same quantities for a density matrix on the (k, l) product basis."""
    rho = rho.rho if hasattr(rho, "rho") else np.asarray(rho)
    eye = np.eye(n + 1)
    op = {a: spin_operator(a, n).data for a in ("x", "y", "z")}
    one = {a: np.kron(m, eye) for a, m in op.items()}
    two = {a: np.kron(eye, m) for a, m in op.items()}

    def ev(m):
        return np.trace(rho @ m).real

    def var(m):
        return ev(m @ m) - ev(m) ** 2

    return MomentReport(
        ev(one["x"]), ev(two["x"]),
        var(one["y"] - two["z"]), var(two["y"] - one["z"]),
    )


def witness_from_moments(m):
    lhs = m.var_a + m.var_b
    rhs = 2.0 * m.sx1 + 2.0 * m.sx2
    margin = lhs - rhs
    return WitnessResult(lhs, rhs, margin, bool(margin < -FLAG_TOL))


def evaluate_witness(state):
    return witness_from_moments(collective_moments(state))


def cv_prediction(n, tau):
    """Continuous-variable variance N (1 - 2 N tau)^2 + N, with a flag for tau <= 1/N."""
    n = check_boson_number(n)
    return CvPrediction(float(tau), n * (1 - 2 * n * tau) ** 2 + n, bool(tau <= 1.0 / n))


def witness_scan(n, tau_grid, threads=1):
    n = check_boson_number(n)
    psi0 = initial_xx_state(n)

    def one(tau):
        m = collective_moments(evolve_zz(psi0, tau))
        return WitnessRecord(float(tau), witness_from_moments(m), cv_prediction(n, tau), m.var_a)

    return parallel_map(one, [float(t) for t in tau_grid], threads)


def product_state(p1, p2, n):
    """Product of two coherent states as a TwoBecPureState."""
    return TwoBecPureState(n, np.outer(coherent_to_fock(p1, n), coherent_to_fock(p2, n)))


def random_product_states(count, n, seed):
    """Seeded product states; each condensate gets a uniformly random Bloch direction.

    Yields ``((theta1, phi1, theta2, phi2), state)`` pairs.
    """
    rng = np.random.default_rng(seed)
    for _ in range(count):
        theta1, theta2 = np.arccos(rng.uniform(-1.0, 1.0, size=2))
        phi1, phi2 = rng.uniform(0.0, 2 * np.pi, size=2)
        state = product_state(SpinCoherentParams.from_bloch(theta1, phi1),
                              SpinCoherentParams.from_bloch(theta2, phi2), n)
        yield (float(theta1), float(phi1), float(theta2), float(phi2)), state
