"""
Plot-ready data: Husimi Q-functions on the Bloch sphere and circle diagrams.

The Q-function uses coherent states alpha = cos(theta/2),
beta = exp(i phi) sin(theta/2) and the normalization (N+1)/(4 pi), so that
it integrates to one over the sphere.
"""

from dataclasses import dataclass

import numpy as np

from .pure import binomial_amplitudes
from .spin import check_boson_number, log_binomial


@dataclass(frozen=True, eq=False)
class QFunctionGrid:
    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray

    def sphere_integral(self):
        """Trapezoid in theta (with sin theta), periodic rectangle rule in phi."""
        dphi = 2 * np.pi / len(self.phis)
        ring = self.values.sum(axis=1) * dphi
        return float(np.trapezoid(ring * np.sin(self.thetas), self.thetas))


@dataclass(frozen=True)
class CircleEntry:
    k: int
    angle: float
    radius: float
    opacity: float


@dataclass(frozen=True, eq=False)
class CircleDiagram:
    n: int
    tau: float
    entries: tuple

    def angles(self):
        return np.array([e.angle for e in self.entries])

    def opacities(self):
        return np.array([e.opacity for e in self.entries])


def coherent_amplitude_table(n, thetas, phis):
    """Fock amplitudes of every grid coherent state, shape (n_theta, n_phi, N+1)."""
    k = np.arange(n + 1)
    half = np.asarray(thetas)[:, None] / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        log_c = np.log(np.abs(np.cos(half)))
        log_s = np.log(np.abs(np.sin(half)))
        # 0 * log(0) := 0 for the poles
        log_mag = (0.5 * log_binomial(n, k)[None, :]
                   + np.where(k == 0, 0.0, k * log_c)
                   + np.where(k == n, 0.0, (n - k) * log_s))
    sign = np.sign(np.cos(half)) ** k * np.sign(np.sin(half)) ** (n - k)
    mag = np.exp(log_mag) * sign
    phase = np.exp(1j * np.asarray(phis)[:, None] * (n - k)[None, :])
    return mag[:, None, :] * phase[None, :, :]


def qfunction_grid(state, n, n_theta=101, n_phi=200):
    """Q(theta, phi) = (N+1)/(4 pi) <alpha|rho|alpha> on a regular grid.

    ``state`` is either a length N+1 amplitude vector or an (N+1)x(N+1)
    density matrix.  Theta runs over [0, pi] inclusive; phi over [0, 2 pi)
    without the endpoint.
    """
    n = check_boson_number(n)
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    amps = coherent_amplitude_table(n, thetas, phis)
    state = np.asarray(state)
    if state.ndim == 1:
        overlap = np.abs(amps.conj() @ state) ** 2
    else:
        overlap = np.einsum("tpk,kj,tpj->tp", amps.conj(), state, amps).real
    values = np.clip((n + 1) / (4 * np.pi) * overlap, 0.0, None)
    return QFunctionGrid(thetas, phis, values)


def reduced_state_1(state):
    """Reduced density matrix of condensate 1 from a TwoBecPureState."""
    return state.psi @ state.psi.conj().T


def equator_maxima(values_on_circle):
    """Indices of strict local maxima on a periodic 1D profile."""
    v = np.asarray(values_on_circle)
    return np.flatnonzero((v > np.roll(v, 1)) & (v > np.roll(v, -1)))


def circle_diagram(n, tau):
    """One circle per Fock index k of condensate 2.

    The circle sits at angle 2(N - 2k) tau, has radius sqrt(2/N), and its
    opacity is |c_k| / max |c_k|.  Colour assignment is left to the caller.
    """
    n = check_boson_number(n)
    c = np.abs(binomial_amplitudes(n))
    opacity = c / c.max()
    radius = float(np.sqrt(2.0 / n))
    entries = tuple(
        CircleEntry(k, 2.0 * (n - 2 * k) * tau, radius, float(opacity[k]))
        for k in range(n + 1)
    )
    return CircleDiagram(n, float(tau), entries)
