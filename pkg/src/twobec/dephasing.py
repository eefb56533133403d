"""
Dephasing of the two-condensate state and logarithmic negativity.

The master equation is

    d rho/d tau = -i [S^z_1 S^z_2, rho]
                  - (Gamma/2) sum_n [ (S^j_n)^2 rho - 2 S^j_n rho S^j_n + rho (S^j_n)^2 ]

with j = z or x, starting from the x-polarized product state.  For j = z the
jump operators commute with the Hamiltonian and the solution is closed form.
For j = x the equation is integrated with fixed-step RK4.

Density matrices are (N+1)^2 x (N+1)^2, indexed by composite (k, l) in
row-major order (k for condensate 1).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._sweep import parallel_map
from .errors import ConfigError, DegenerateRatioError, IntegrationError, NumericalError, ResourceError
from .pure import characteristic_times, evolve_zz, initial_xx_state
from .spin import binomial_amplitudes, check_boson_number, spin_operator, sz_diagonal

Z_MAX_N = 40
X_MAX_N = 16
MEMORY_BUDGET_BYTES = 1 << 30
TRACE_DRIFT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class TwoBecDensityMatrix:
    n: int
    rho: np.ndarray

    @property
    def dim(self):
        return (self.n + 1) ** 2

    def trace(self):
        return complex(np.trace(self.rho))

    def hermiticity_error(self):
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])

    def as_tensor(self):
        """View as rho[k, l, k', l']."""
        d = self.n + 1
        return self.rho.reshape(d, d, d, d)

    @classmethod
    def from_pure(cls, state):
        return cls(state.n, state.projector())


@dataclass(frozen=True)
class DephasingConfig:
    axis: str
    gamma: float

    def __post_init__(self):
        if self.axis not in ("z", "x"):
            raise ConfigError(f"dephasing axis must be 'z' or 'x', got {self.axis!r}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ConfigError(f"dephasing rate must be finite and >= 0, got {self.gamma!r}")


@dataclass(frozen=True)
class NegativityRecord:
    tau: float
    gamma: float
    axis: str
    neg_bits: float
    ratio: float


@dataclass(frozen=True)
class FitResult:
    """Power-law fit log(ratio) = a - gamma log N, with a competing fit against N^2."""

    exponent_gamma: float
    r_squared: float
    n_values: tuple
    ratios: tuple = field(default=())
    taus: tuple = field(default=())
    quadratic_r_squared: float = float("nan")
    superpolynomial: bool = False


def check_budget(axis, n, override_budget=False):
    """Raise ResourceError if N is beyond the default budget for ``axis``."""
    d2 = (n + 1) ** 2
    problems = []
    limit = Z_MAX_N if axis == "z" else X_MAX_N
    if n > limit and not override_budget:
        problems.append(
            f"{axis}-dephasing N={n} exceeds default budget N <= {limit} (use --override-budget)"
        )
    if d2 * d2 * 16 > MEMORY_BUDGET_BYTES:
        problems.append(
            f"density matrix for N={n} needs {d2 * d2 * 16 / 2**20:.0f} MiB, "
            f"memory budget is {MEMORY_BUDGET_BYTES / 2**20:.0f} MiB"
        )
    if problems:
        raise ResourceError(problems)


def _check_times(tau, gamma):
    if not (tau >= 0 and math.isfinite(tau)):
        raise ConfigError(f"tau must be finite and >= 0, got {tau!r}")
    DephasingConfig("z", gamma)


def evolve_dephasing_z(n, tau, gamma_z, override_budget=False):
    """Closed-form solution of the z-dephasing master equation.

    rho_{(k,l),(k',l')} = c_k c_l c_k' c_l' exp(-i (s_k s_l - s_k' s_l') tau)
                          exp(-(Gamma/2) [(s_k - s_k')^2 + (s_l - s_l')^2] tau)
    """
    n = check_boson_number(n)
    _check_times(tau, gamma_z)
    check_budget("z", n, override_budget)
    c = binomial_amplitudes(n)
    s = sz_diagonal(n)
    cc = np.outer(c, c).reshape(-1)
    ss = np.outer(s, s).reshape(-1)
    sk = np.repeat(s, n + 1)
    sl = np.tile(s, n + 1)
    damp = (sk[:, None] - sk[None, :]) ** 2 + (sl[:, None] - sl[None, :]) ** 2
    rho = (np.outer(cc, cc)
           * np.exp(-1j * (ss[:, None] - ss[None, :]) * tau)
           * np.exp(-0.5 * gamma_z * damp * tau))
    return TwoBecDensityMatrix(n, rho)


def default_step(n, gamma):
    return min(1e-3, 0.1 / (n * n * max(1.0, gamma)))


def _x_rhs_factory(n, gamma):
    d = n + 1
    s = sz_diagonal(n)
    hz = np.outer(s, s)
    # -i (E_{kl} - E_{k'l'}) as a (d, d, d, d) array
    ham = -1j * (hz[:, :, None, None] - hz[None, None, :, :])
    sx = spin_operator("x", n).data.real
    sx2 = sx @ sx

    def left(op, t, ax):
        return np.moveaxis(np.tensordot(op, t, axes=(1, ax)), 0, ax)

    def right(t, op, ax):
        return np.moveaxis(np.tensordot(t, op, axes=(ax, 0)), -1, ax)

    def rhs(t):
        out = ham * t
        if gamma:
            for a_ket, a_bra in ((0, 2), (1, 3)):
                diss = left(sx2, t, a_ket) + right(t, sx2, a_bra)
                diss -= 2.0 * right(left(sx, t, a_ket), sx, a_bra)
                out -= 0.5 * gamma * diss
        return out

    return rhs, d


def evolve_dephasing_x(n, tau, gamma_x, step=None, override_budget=False):
    """Integrate the x-dephasing master equation with fixed-step RK4.

    The trace is monitored but never renormalized; a drift beyond 1e-8
    raises IntegrationError.
    """
    n = check_boson_number(n)
    _check_times(tau, gamma_x)
    check_budget("x", n, override_budget)
    rhs, d = _x_rhs_factory(n, gamma_x)
    h = step if step is not None else default_step(n, gamma_x)
    if not h > 0:
        raise ConfigError(f"integration step must be > 0, got {h!r}")
    n_steps = max(1, math.ceil(tau / h - 1e-9)) if tau > 0 else 0
    v = np.outer(*(2 * [binomial_amplitudes(n)])).reshape(-1).astype(complex)
    t = np.outer(v, v).reshape(d, d, d, d)
    if n_steps:
        h = tau / n_steps
        for _ in range(n_steps):
            k1 = rhs(t)
            k2 = rhs(t + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h * k2)
            k4 = rhs(t + h * k3)
            t = t + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(t)):
            raise IntegrationError(f"RK4 diverged for N={n}, tau={tau}, step={h}; use a smaller step")
    rho = t.reshape(d * d, d * d)
    drift = abs(np.trace(rho) - 1.0)
    if drift > TRACE_DRIFT_TOL:
        raise IntegrationError(
            f"trace drift {drift:.3e} exceeds {TRACE_DRIFT_TOL} (N={n}, step={h}); use a smaller step"
        )
    return TwoBecDensityMatrix(n, rho)


def evolve_dephasing(axis, n, tau, gamma, override_budget=False):
    DephasingConfig(axis, gamma)
    if axis == "z":
        return evolve_dephasing_z(n, tau, gamma, override_budget=override_budget)
    return evolve_dephasing_x(n, tau, gamma, override_budget=override_budget)


def partial_transpose(rho, n):
    """Transpose on condensate 2: (k,l),(k',l') -> (k,l'),(k',l)."""
    d = n + 1
    rho = np.asarray(rho)
    return rho.reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)


def logarithmic_negativity(rho, n=None):
    """log2 of the trace norm of the partial transpose, in bits."""
    if isinstance(rho, TwoBecDensityMatrix):
        n, rho = rho.n, rho.rho
    elif n is None:
        n = math.isqrt(np.asarray(rho).shape[0]) - 1
    pt = partial_transpose(rho, n)
    try:
        lam = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on partial transpose: {exc}") from exc
    return max(0.0, float(math.log2(np.sum(np.abs(lam)))))


def pure_logarithmic_negativity(state):
    """2 log2(sum of Schmidt coefficients) for a pure state."""
    sv = np.linalg.svd(state.psi, compute_uv=False)
    return max(0.0, 2.0 * math.log2(float(np.sum(sv))))


def negativity_record(axis, n, tau, gamma, override_budget=False):
    """E_neg at (tau, Gamma) and its ratio to the noiseless value."""
    rho = evolve_dephasing(axis, n, tau, gamma, override_budget=override_budget)
    neg = logarithmic_negativity(rho)
    neg0 = logarithmic_negativity(
        TwoBecDensityMatrix.from_pure(evolve_zz(initial_xx_state(n), tau)))
    if neg0 <= 1e-12:
        ratio = float("nan")
    else:
        ratio = neg / neg0
    return NegativityRecord(float(tau), float(gamma), axis, neg, ratio)


def negativity_scan(axis, n, tau_grid, gamma, threads=1, override_budget=False):
    n = check_boson_number(n)
    DephasingConfig(axis, gamma)
    check_budget(axis, n, override_budget)
    return parallel_map(
        lambda tau: negativity_record(axis, n, float(tau), gamma, override_budget),
        list(tau_grid), threads)


TAU_RULES = ("1/N", "1/sqrtN", "const")


def rule_time(tau_rule, n, tau_const=None):
    """Gate time for a scaling rule: pi/(4N), 1/sqrt(2N), or a constant (default pi/4)."""
    times = characteristic_times(n)
    if tau_rule == "1/N":
        return times["t_fan"]
    if tau_rule == "1/sqrtN":
        return times["t_plateau"]
    if tau_rule == "const":
        return times["t_cat"] if tau_const is None else float(tau_const)
    raise ConfigError(f"tau_rule must be one of {TAU_RULES}, got {tau_rule!r}")


def linear_fit(x, y):
    """Least-squares line y = a + b x; returns (a, b, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    b, a = np.polyfit(x, y, 1)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - (a + b * x)) ** 2))
    if ss_tot <= 1e-300:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return float(a), float(b), r2


def robustness_scaling(axis, tau_rule, gamma, n_values, tau_const=None,
                       threads=1, override_budget=False):
    """Fit how the noisy/noiseless log-negativity ratio scales with N.

    The power law ratio ~ N^-gamma is fitted as a line in (log N, log ratio).
    A second line in (N^2, log ratio) tests for exp(-b N^2) decay; when it
    has the higher R^2 the decay is reported as super-polynomial.
    """
    n_values = tuple(check_boson_number(n) for n in n_values)
    if len(n_values) < 2:
        raise ConfigError("robustness scaling needs at least two N values")
    DephasingConfig(axis, gamma)
    for n in n_values:
        check_budget(axis, n, override_budget)
    taus = [rule_time(tau_rule, n, tau_const) for n in n_values]
    records = parallel_map(
        lambda nt: negativity_record(axis, nt[0], nt[1], gamma, override_budget),
        list(zip(n_values, taus)), threads)
    for n, rec in zip(n_values, records):
        if not rec.ratio == rec.ratio:
            raise DegenerateRatioError(n, rec.tau)
    ratios = np.array([r.ratio for r in records])
    if np.any(ratios <= 0):
        raise NumericalError("non-positive negativity ratio; cannot take a logarithm")
    log_r = np.log(ratios)
    ns = np.array(n_values, dtype=float)
    _, slope, r2 = linear_fit(np.log(ns), log_r)
    _, _, r2_quad = linear_fit(ns ** 2, log_r)
    return FitResult(
        exponent_gamma=-slope,
        r_squared=r2,
        n_values=n_values,
        ratios=tuple(float(r) for r in ratios),
        taus=tuple(taus),
        quadratic_r_squared=r2_quad,
        superpolynomial=bool(r2_quad > r2),
    )
