"""
Collective spin algebra for a single two-component condensate.

A condensate of N bosons in modes a and b is represented in the Fock basis
|k>, k = 0..N, with k bosons in mode a and N - k in mode b.  The Schwinger
operators are

    S^x = a^dag b + b^dag a
    S^y = -i a^dag b + i b^dag a
    S^z = a^dag a - b^dag b

so S^z |k> = (2k - N) |k> and the commutators carry a factor of two,
[S^x, S^y] = 2i S^z.  All matrices are dense numpy arrays.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, xlogy

from .errors import ConfigError, NormalizationError, NumericalError

AXES = ("x", "y", "z")

_NORM_TOL = 1e-12


def check_boson_number(n):
    """Return ``n`` as an int, raising ConfigError unless it is >= 1."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ConfigError(f"boson number must be a positive integer, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class SpinCoherentParams:
    """Amplitudes (alpha, beta) of the single-particle state alpha a^dag + beta b^dag."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > _NORM_TOL:
            raise NormalizationError(
                f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1 within {_NORM_TOL}"
            )

    @classmethod
    def from_bloch(cls, theta, phi):
        """Coherent state pointing along polar angle ``theta`` and azimuth ``phi``.

        Uses alpha = cos(theta/2), beta = exp(i phi) sin(theta/2), so theta = 0
        is the all-a state (+z) and (theta, phi) = (pi/2, 0) is +x.
        """
        return cls(np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2))

    @classmethod
    def equatorial(cls, phi):
        """The state (e^{i phi}/sqrt2, e^{-i phi}/sqrt2).

        Its Bloch azimuth is -2 phi in the ``from_bloch`` convention.
        """
        return cls(np.exp(1j * phi) / np.sqrt(2), np.exp(-1j * phi) / np.sqrt(2))

    def bloch_vector(self):
        """Unit Bloch vector (x, y, z) of the single-particle state."""
        c = np.conj(self.alpha) * self.beta
        return np.array(
            [2 * c.real, 2 * c.imag, abs(self.alpha) ** 2 - abs(self.beta) ** 2]
        )


def log_binomial(n, k):
    """Natural log of C(n, k), elementwise in ``k``."""
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def coherent_to_fock(p, n):
    """Fock amplitudes of the spin coherent state (alpha a^dag + beta b^dag)^N/sqrt(N!) |0>.

    Returns a length N+1 complex vector with amps[k] = sqrt(C(N,k)) alpha^k beta^(N-k).
    The magnitude is assembled in log space so N in the thousands stays finite.
    """
    n = check_boson_number(n)
    if not isinstance(p, SpinCoherentParams):
        p = SpinCoherentParams(*p)
    k = np.arange(n + 1)
    a, b = abs(p.alpha), abs(p.beta)
    log_mag = 0.5 * log_binomial(n, k) + xlogy(k, a) + xlogy(n - k, b)
    phase = k * np.angle(p.alpha) + (n - k) * np.angle(p.beta)
    return np.exp(log_mag + 1j * phase)


def coherent_overlap(p1, p2, n):
    """<<p1|p2>> = (conj(alpha1) alpha2 + conj(beta1) beta2)^N."""
    n = check_boson_number(n)
    return complex(
        (np.conj(p1.alpha) * p2.alpha + np.conj(p1.beta) * p2.beta) ** n
    )


def binomial_amplitudes(n):
    """Amplitudes c_k = sqrt(C(N,k)) / 2^(N/2) of the +x coherent state (all real)."""
    n = check_boson_number(n)
    k = np.arange(n + 1)
    return np.exp(0.5 * log_binomial(n, k) - 0.5 * n * np.log(2.0))


def sz_diagonal(n):
    """Eigenvalues 2k - N of S^z as a float vector."""
    return 2.0 * np.arange(n + 1) - n


def ladder_elements(n):
    """Off-diagonal elements sqrt((k+1)(N-k)), k = 0..N-1, of S^x."""
    k = np.arange(n, dtype=float)
    return np.sqrt((k + 1) * (n - k))


@dataclass(frozen=True, eq=False)
class CollectiveSpinMatrix:
    axis: str
    data: np.ndarray

    @property
    def n(self):
        return self.data.shape[0] - 1

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def spin_operator(axis, n):
    """Dense (N+1)x(N+1) matrix of S^x, S^y or S^z."""
    n = check_boson_number(n)
    if axis not in AXES:
        raise ConfigError(f"axis must be one of {AXES}, got {axis!r}")
    if axis == "z":
        data = np.diag(sz_diagonal(n)).astype(complex)
    else:
        off = ladder_elements(n)
        data = np.zeros((n + 1, n + 1), dtype=complex)
        idx = np.arange(n)
        if axis == "x":
            data[idx + 1, idx] = off
            data[idx, idx + 1] = off
        else:
            data[idx + 1, idx] = -1j * off
            data[idx, idx + 1] = 1j * off
    return CollectiveSpinMatrix(axis, data)


def apply_spin(axis, v):
    """Apply S^axis to ``v`` along its first axis without forming the matrix.

    ``v`` may be a vector or an array whose leading dimension is N+1.
    """
    v = np.asarray(v)
    n = v.shape[0] - 1
    shape = (n + 1,) + (1,) * (v.ndim - 1)
    if axis == "z":
        return sz_diagonal(n).reshape(shape) * v
    off = ladder_elements(n).reshape((n,) + shape[1:])
    out = np.zeros(v.shape, dtype=complex)
    if axis == "x":
        out[1:] += off * v[:-1]
        out[:-1] += off * v[1:]
    elif axis == "y":
        out[1:] += -1j * off * v[:-1]
        out[:-1] += 1j * off * v[1:]
    else:
        raise ConfigError(f"axis must be one of {AXES}, got {axis!r}")
    return out


@lru_cache(maxsize=64)
def _x_eig(n):
    off = ladder_elements(n)
    try:
        w, vecs = eigh_tridiagonal(np.zeros(n + 1), off)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"S^x eigensolver failed for N={n}: {exc}") from exc
    exact = sz_diagonal(n)
    dev = np.max(np.abs(w - exact))
    if dev > 1e-6 * max(1, n):
        raise NumericalError(
            f"S^x spectrum for N={n} deviates from -N..N by {dev:.3e}"
        )
    vecs = vecs.astype(complex)
    exact.flags.writeable = False
    vecs.flags.writeable = False
    return exact, vecs


def x_eigendecomposition(n):
    """Eigen-decomposition S^x = W diag(lam) W^dag.

    Eigenvalues are returned as the exact integers -N, -N+2, ..., N once the
    solver output has been checked against them.  Results are cached per N
    and returned read-only.
    """
    return _x_eig(check_boson_number(n))
