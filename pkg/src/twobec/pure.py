"""
Closed-system dynamics of two coupled condensates.

The joint pure state is stored as an (N+1)x(N+1) matrix ``psi[k, l]``, the
amplitude of |k>_1 |l>_2.  Both gates are diagonal in the S^z basis of
condensate 2, so each is a column-wise operation on ``psi``:

* ``exp(-i S^z_1 S^z_2 tau)`` multiplies psi[k, l] by exp(-i s_k s_l tau),
* ``exp(-i S^x_1 S^z_2 tau')`` rotates column l of condensate 1 into the
  S^x eigenbasis, applies the phases exp(-i lam_j s_l tau'), and rotates back.

Time is in units of hbar/J.  The entanglement entropy is taken from the
singular values of ``psi`` (Schmidt coefficients).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ._sweep import parallel_map
from .errors import ConfigError, NumericalError, ResourceError
from .spin import binomial_amplitudes, check_boson_number, sz_diagonal, x_eigendecomposition

SV_CUTOFF = 1e-12
MAP2D_MAX_N = 200
MAP2D_MAX_GRID = 500


@dataclass(frozen=True, eq=False)
class TwoBecPureState:
    n: int
    psi: np.ndarray

    def norm(self):
        return float(np.sum(np.abs(self.psi) ** 2))

    def vector(self):
        """Flattened amplitude vector in the row-major (k, l) product basis."""
        return self.psi.reshape(-1)

    def projector(self):
        v = self.vector()
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class GateSpec:
    axis_pair: str
    tau: float

    def __post_init__(self):
        if self.axis_pair not in ("zz", "xz"):
            raise ConfigError(f"axis_pair must be 'zz' or 'xz', got {self.axis_pair!r}")
        if not math.isfinite(self.tau):
            raise ConfigError(f"gate time must be finite, got {self.tau!r}")

    def apply(self, state):
        if self.axis_pair == "zz":
            return evolve_zz(state, self.tau)
        return evolve_xz(state, self.tau)


@dataclass(frozen=True)
class RationalGateTime:
    """Gate time tau = m pi / (4 d), stored in lowest terms."""

    m: int
    d: int

    def __post_init__(self):
        if int(self.m) != self.m or int(self.d) != self.d or self.m < 1 or self.d < 1:
            raise ConfigError(f"m and d must be positive integers, got m={self.m!r}, d={self.d!r}")
        g = math.gcd(int(self.m), int(self.d))
        object.__setattr__(self, "m", int(self.m) // g)
        object.__setattr__(self, "d", int(self.d) // g)

    @classmethod
    def from_fraction_of_pi(cls, frac):
        """Build from tau/pi given as a Fraction (or string such as '1/8')."""
        frac = Fraction(frac)
        # tau = (p/q) pi = m pi / (4 d)  =>  m/d = 4p/q
        r = 4 * frac
        return cls(r.numerator, r.denominator)

    @property
    def tau(self):
        return self.m * math.pi / (4 * self.d)


@dataclass(frozen=True)
class EntanglementRecord:
    tau: float
    tau_prime: Optional[float]
    entropy_bits: float
    entropy_max_bits: float

    @property
    def entropy_normalized(self):
        return self.entropy_bits / self.entropy_max_bits


@dataclass(frozen=True, eq=False)
class EntropyMap:
    """Entropy over a (tau, tau') grid; ``entropy[i, j]`` belongs to (taus[i], tau_primes[j])."""

    n: int
    taus: np.ndarray
    tau_primes: np.ndarray
    entropy: np.ndarray = field(repr=False)

    @property
    def entropy_max_bits(self):
        return math.log2(self.n + 1)

    def record(self, i, j):
        return EntanglementRecord(
            float(self.taus[i]), float(self.tau_primes[j]),
            float(self.entropy[i, j]), self.entropy_max_bits,
        )

    def records(self):
        """Records as a nested list, rows indexed by tau."""
        return [[self.record(i, j) for j in range(len(self.tau_primes))]
                for i in range(len(self.taus))]


def initial_xx_state(n):
    """Both condensates in the maximal S^x eigenstate: psi = c c^T."""
    n = check_boson_number(n)
    c = binomial_amplitudes(n)
    return TwoBecPureState(n, np.outer(c, c).astype(complex))


def zz_phases(n, tau):
    s = sz_diagonal(n)
    return np.exp(-1j * np.outer(s, s) * tau)


def evolve_zz(state, tau):
    """Apply exp(-i S^z_1 S^z_2 tau)."""
    return TwoBecPureState(state.n, state.psi * zz_phases(state.n, tau))


def evolve_xz(state, tau_prime):
    """Apply exp(-i S^x_1 S^z_2 tau') using the cached S^x eigenbasis of condensate 1."""
    lam, w = x_eigendecomposition(state.n)
    coeffs = w.conj().T @ state.psi
    phases = np.exp(-1j * np.outer(lam, sz_diagonal(state.n)) * tau_prime)
    return TwoBecPureState(state.n, w @ (phases * coeffs))


def schmidt_coefficients(psi):
    try:
        return np.linalg.svd(psi, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc


def entropy_from_singular_values(sv):
    sv = sv[sv > SV_CUTOFF]
    p = np.clip(sv ** 2, 0.0, 1.0)
    return float(max(0.0, -np.sum(p * np.log2(p))))


def entanglement_entropy(state):
    """Von Neumann entropy of either reduced state, in bits."""
    psi = state.psi if isinstance(state, TwoBecPureState) else np.asarray(state)
    return entropy_from_singular_values(schmidt_coefficients(psi))


def rational_dip_entropy(t):
    """Large-N entropy at tau = m pi / (4d).

    Adjacent coherent states are separated by m pi / d on the equator, so the
    number of distinct positions is the smallest n with n m = 0 mod 2d,
    i.e. 2d / gcd(m, 2d).  The entropy is log2 of that count.
    """
    if not isinstance(t, RationalGateTime):
        t = RationalGateTime(*t)
    count = 2 * t.d // math.gcd(t.m, 2 * t.d)
    return math.log2(count)


def characteristic_times(n):
    """Fan-out, plateau and cat times: pi/(4N), 1/sqrt(2N), pi/4."""
    n = check_boson_number(n)
    return {
        "t_fan": math.pi / (4 * n),
        "t_plateau": 1.0 / math.sqrt(2 * n),
        "t_cat": math.pi / 4,
    }


def default_steps(n, tau_min, tau_max):
    """Grid size with at least 8N points per pi/2 of gate time."""
    span = abs(tau_max - tau_min)
    return max(2, math.ceil(8 * n * span / (math.pi / 2))) + 1


def _check_grid(name, grid):
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if not np.all(np.isfinite(grid)):
        raise ConfigError(f"{name} contains non-finite values")
    return grid


def scan_entropy(n, tau_grid, threads=1):
    """Entropy after exp(-i S^z_1 S^z_2 tau) from the x-polarized product state."""
    n = check_boson_number(n)
    tau_grid = _check_grid("tau_grid", tau_grid)
    psi0 = initial_xx_state(n)
    e_max = math.log2(n + 1)

    def one(tau):
        return EntanglementRecord(float(tau), None, entanglement_entropy(evolve_zz(psi0, tau)), e_max)

    return parallel_map(one, tau_grid, threads)


def map2d_entropy(n, tau_grid, tau_prime_grid, threads=1, override_budget=False):
    """Entropy after exp(-i S^x_1 S^z_2 tau') exp(-i S^z_1 S^z_2 tau) over a 2D grid."""
    n = check_boson_number(n)
    tau_grid = _check_grid("tau_grid", tau_grid)
    tau_prime_grid = _check_grid("tau_prime_grid", tau_prime_grid)
    if not override_budget:
        problems = []
        if n > MAP2D_MAX_N:
            problems.append(f"map2d N={n} exceeds default budget N <= {MAP2D_MAX_N}")
        if max(len(tau_grid), len(tau_prime_grid)) > MAP2D_MAX_GRID:
            problems.append(
                f"map2d grid {len(tau_grid)}x{len(tau_prime_grid)} exceeds "
                f"default budget {MAP2D_MAX_GRID}x{MAP2D_MAX_GRID}"
            )
        if problems:
            raise ResourceError(problems)

    lam, w = x_eigendecomposition(n)
    s = sz_diagonal(n)
    psi0 = initial_xx_state(n)
    # None marks tau' = 0, where the x gate is skipped outright
    phase_table = [None if tp == 0 else np.exp(-1j * np.outer(lam, s) * tp)
                   for tp in tau_prime_grid]

    def row(tau):
        psi = evolve_zz(psi0, tau).psi
        coeffs = w.conj().T @ psi
        return [entropy_from_singular_values(schmidt_coefficients(
                    psi if ph is None else w @ (ph * coeffs)))
                for ph in phase_table]

    rows = parallel_map(row, tau_grid, threads)
    entropy = np.array(rows, dtype=float).reshape(len(tau_grid), len(tau_prime_grid))
    return EntropyMap(n, tau_grid, tau_prime_grid, entropy)
