"""Unitary dilation of the damped-oscillator semigroup on a discretized half-line.

The phase space is injected into ``L^2(R, PM)`` by

    (j m)(t) = 2 sqrt(gamma) Theta(t) P T_t m,

an isometry because ``Z^T + Z = -4 gamma P``.  Time translation
``(U_t f)(s) = f(s + t)`` is unitary and ``j^* U_t j = T_t``.

Functions are sampled at cell centres of a uniform grid whose cell edges
include ``t = 0``, so the jump of ``Theta`` always sits on a cell boundary and
the midpoint rule stays second order on every integral used here.  Shifts by
whole cells are exact permutations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.linalg

from . import car_fock
from .errors import (InconsistentGenerator, InvalidArgument, TruncationInsufficient,
                     WindowTooSmall)
from .phase_space import DhoGenerator, Regime, evolve_closed_form, propagator_coefficients, trajectory

DEFAULT_DT = 1e-3
LOST_MASS_TOL = 1e-8
KERNEL_THRESHOLD = 1e-10
MAX_TRUNCATION = 6


@dataclass(frozen=True)
class HalfLineGrid:
    dt: float
    n_neg: int  # cells left of t = 0
    n_pos: int  # cells right of t = 0

    @property
    def t_min(self) -> float:
        return -self.n_neg * self.dt

    @property
    def t_max(self) -> float:
        return self.n_pos * self.dt

    @property
    def points(self) -> int:
        return self.n_neg + self.n_pos

    @property
    def times(self) -> np.ndarray:
        return self.t_min + (np.arange(self.points) + 0.5) * self.dt

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.points, self.dt)

    def cells(self, t: float) -> int:
        """Number of cells spanned by ``t``; ``t`` must be a whole multiple of ``dt``."""
        k = round(t / self.dt)
        if abs(t - k * self.dt) > 1e-12 * max(1.0, abs(t)):
            raise InvalidArgument(f"shift {t!r} is not an integer multiple of dt = {self.dt!r}")
        return int(k)


@dataclass(frozen=True, eq=False)
class HalfLineFunction:
    grid: HalfLineGrid
    values: np.ndarray = field(repr=False)  # (points, n_modes), momentum components
    lost_mass: float = 0.0

    def norm_sq(self) -> float:
        return float(self.grid.dt * np.sum(np.abs(self.values) ** 2))

    def inner(self, other: "HalfLineFunction") -> complex:
        if other.grid != self.grid:
            raise InvalidArgument("functions live on different grids")
        return complex(self.grid.dt * np.vdot(self.values, other.values))

    def __sub__(self, other: "HalfLineFunction") -> "HalfLineFunction":
        if other.grid != self.grid:
            raise InvalidArgument("functions live on different grids")
        return HalfLineFunction(self.grid, self.values - other.values)


@dataclass(frozen=True, eq=False)
class SpectralAmplitude:
    energies: np.ndarray
    amplitude: np.ndarray  # (len(energies), n_modes)

    def intensity(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitude) ** 2, axis=1)

    def mass(self) -> float:
        """Trapezoidal integral of the intensity over the listed energies."""
        return float(scipy.integrate.trapezoid(self.intensity(), self.energies))


@dataclass(frozen=True)
class DecayExpectation:
    analytic: complex
    grid: complex

    @property
    def deviation(self) -> float:
        return abs(self.analytic - self.grid)


def auto_t_max(g: DhoGenerator) -> float:
    """Window long enough that the decayed trajectory mass is below ~1e-16."""
    return max(10.0 / g.gamma, 20.0 / g.decay_rate)


def make_grid(g: DhoGenerator, dt: float = DEFAULT_DT, t_max: float | None = None,
              max_shift: float = 0.0) -> HalfLineGrid:
    _require_damping(g)
    if not dt > 0:
        raise InvalidArgument(f"dt must be positive, got {dt!r}")
    if t_max is None:
        t_max = auto_t_max(g)
    if t_max < 10.0 / g.gamma:
        raise InvalidArgument(f"t_max = {t_max!r} is shorter than 10/gamma = {10.0 / g.gamma!r}")
    if max_shift < 0:
        raise InvalidArgument("max_shift must be non-negative")
    n_pos = math.ceil(t_max / dt - 1e-9)
    n_neg = math.ceil(max_shift / dt - 1e-9)
    return HalfLineGrid(float(dt), n_neg, n_pos)


def _require_damping(g: DhoGenerator):
    if not g.gamma > 0:
        raise InvalidArgument("the half-line injection is an isometry only for gamma > 0")


def _check_vector(g: DhoGenerator, m):
    m = np.asarray(m)
    if m.shape != (g.space.dim,):
        raise InvalidArgument(f"expected a phase-space vector of length {g.space.dim}, got shape {m.shape}")
    return m


def inject_halfline(g: DhoGenerator, m, grid: HalfLineGrid) -> HalfLineFunction:
    _require_damping(g)
    m = _check_vector(g, m)
    n = g.space.n_modes
    values = np.zeros((grid.points, n), dtype=np.result_type(m.dtype, float))
    pos = grid.times[grid.n_neg:]
    values[grid.n_neg:] = 2.0 * math.sqrt(g.gamma) * trajectory(g, m, pos)[:, n:]
    return HalfLineFunction(grid, values)


def shift(f: HalfLineFunction, t: float) -> HalfLineFunction:
    """``(U_t f)(s) = f(s + t)`` with zero fill; mass pushed off the window is reported."""
    k = f.grid.cells(t)
    v = f.values
    out = np.zeros_like(v)
    N = v.shape[0]
    if k >= 0:
        out[: N - k] = v[k:]
        dropped = v[:k]
    else:
        out[-k:] = v[: N + k]
        dropped = v[N + k:]
    lost = float(f.grid.dt * np.sum(np.abs(dropped) ** 2))
    if lost > LOST_MASS_TOL:
        raise WindowTooSmall(f"shift by {t!r} pushes mass {lost:.3e} outside the grid window")
    return HalfLineFunction(f.grid, out, f.lost_mass + lost)


def compress(f: HalfLineFunction, g: DhoGenerator) -> np.ndarray:
    """``j^* f = 2 sqrt(gamma) sum_{s>0} dt T_s^T P f(s)``, the exact discrete adjoint of injection."""
    _require_damping(g)
    n = g.space.n_modes
    if f.values.ndim != 2 or f.values.shape[1] != n:
        raise InvalidArgument(f"function values of shape {f.values.shape} do not match {n} modes")
    grid = f.grid
    c0, c1 = propagator_coefficients(g, grid.times[grid.n_neg:])
    pv = f.values[grid.n_neg:]
    dtype = np.result_type(pv.dtype, float)
    first = np.zeros(g.space.dim, dtype=dtype)
    second = np.zeros(g.space.dim, dtype=dtype)
    first[n:] = c0 @ pv
    second[n:] = c1 @ pv
    return 2.0 * math.sqrt(g.gamma) * grid.dt * (first + g.shifted.T @ second)


def project_Q(f: HalfLineFunction, g: DhoGenerator) -> HalfLineFunction:
    return inject_halfline(g, compress(f, g), f.grid)


def lyapunov_gram(g: DhoGenerator) -> np.ndarray:
    """Solve ``Z^T X + X Z = -4 gamma P``; the solution is the Gram matrix ``j^* j``."""
    _require_damping(g)
    return scipy.linalg.solve_continuous_lyapunov(g.Z.T, -4.0 * g.gamma * g.space.P)


def spectral_amplitude_closed(g: DhoGenerator, m, energies) -> SpectralAmplitude:
    """Fourier transform of ``j m`` in closed form.

    ``sqrt(2 gamma / pi) (omega^2 - E^2 + 2 i E gamma)^-1 P (omega J + i E) m``
    with kernel ``exp(-i E t) / sqrt(2 pi)``.
    """
    _require_damping(g)
    m = _check_vector(g, m)
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    n = g.space.n_modes
    q, p = m[:n], m[n:]
    numer = g.omega * q[None, :] + 1j * E[:, None] * p[None, :]
    denom = g.omega**2 - E**2 + 2j * E * g.gamma
    amp = math.sqrt(2.0 * g.gamma / math.pi) * numer / denom[:, None]
    return SpectralAmplitude(E, amp)


def spectral_amplitude_fft(g: DhoGenerator, m, grid: HalfLineGrid) -> SpectralAmplitude:
    """Discrete Fourier transform of the sampled ``j m`` on the FFT energy lattice."""
    f = inject_halfline(g, m, grid)
    N = grid.points
    E = 2.0 * math.pi * np.fft.fftfreq(N, grid.dt)
    raw = np.fft.fft(f.values, axis=0)
    phase = np.exp(-1j * E * grid.times[0])
    amp = grid.dt / math.sqrt(2.0 * math.pi) * phase[:, None] * raw
    order = np.argsort(E, kind="stable")
    return SpectralAmplitude(E[order], amp[order])


def spectral_amplitude_dft(g: DhoGenerator, m, grid: HalfLineGrid, energies) -> SpectralAmplitude:
    """Same quadrature as :func:`spectral_amplitude_fft`, evaluated at arbitrary energies."""
    f = inject_halfline(g, m, grid)
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    t = grid.times[grid.n_neg:]
    v = f.values[grid.n_neg:]
    amp = np.empty((E.size, v.shape[1]), dtype=complex)
    for start in range(0, E.size, 64):
        chunk = E[start:start + 64]
        amp[start:start + 64] = np.exp(-1j * np.outer(chunk, t)) @ v
    return SpectralAmplitude(E, grid.dt / math.sqrt(2.0 * math.pi) * amp)


def spectral_mass_closed(g: DhoGenerator, m) -> float:
    """``integral |F j m|^2 dE`` over the real line by adaptive quadrature."""
    def intensity(E):
        return float(spectral_amplitude_closed(g, m, [E]).intensity()[0])

    peak = g.omega
    core, _ = scipy.integrate.quad(intensity, -4 * peak, 4 * peak, points=[-peak, 0.0, peak], limit=500)
    left, _ = scipy.integrate.quad(intensity, -np.inf, -4 * peak, limit=500)
    right, _ = scipy.integrate.quad(intensity, 4 * peak, np.inf, limit=500)
    return core + left + right


def decay_expectation(g: DhoGenerator, m, n, t: float, grid: HalfLineGrid | None = None) -> DecayExpectation:
    """``<m, T_t^T T_t n>`` directly and as ``<j^* U_t j m, j^* U_t j n>`` on the grid.

    The pairing is the standard one on the complexified phase space, so it is
    real for real ``m`` and ``n``.
    """
    if t < 0:
        raise InvalidArgument("t must be non-negative")
    m = _check_vector(g, m)
    n = _check_vector(g, n)
    T = evolve_closed_form(g, t).T
    analytic = complex(np.vdot(T @ m, T @ n))
    if grid is None:
        grid = make_grid(g, max_shift=t)
    um = compress(shift(inject_halfline(g, m, grid), t), g)
    un = compress(shift(inject_halfline(g, n, grid), t), g)
    return DecayExpectation(analytic, complex(np.vdot(um, un)))


def critical_kernel(g: DhoGenerator) -> np.ndarray:
    """Orthonormal basis (columns) of ``ker(Z + gamma 1)`` at critical damping."""
    if g.regime is not Regime.CRITICAL:
        raise InvalidArgument(f"the kernel is only defined at critical damping, regime is {g.regime.value}")
    _, s, vh = np.linalg.svd(g.shifted)
    small = s <= KERNEL_THRESHOLD * max(1.0, s[0])
    if not np.any(small):
        raise InconsistentGenerator("Z + gamma has no numerical kernel at critical damping")
    basis = vh[small].T
    for t in (0.5, 1.0, 2.0):
        T = evolve_closed_form(g, t).T
        if np.linalg.norm(T @ basis - math.exp(-g.gamma * t) * basis) > 1e-10:
            raise InconsistentGenerator(f"kernel vectors do not decay purely exponentially at t = {t}")
    return basis


def fock_decay_expectation(g: DhoGenerator, m, n, t: float, trunc_dim: int = MAX_TRUNCATION,
                           grid: HalfLineGrid | None = None) -> complex:
    """``<c(jm) Omega, Q~(t) c(jn) Omega>`` on a truncated Fock space.

    The one-particle space is cut down to the span ``S`` of
    ``jm, jn, U_t jm, U_t jn``; ``Q~(t)`` is the second quantization of
    ``P_S U_t^* Q U_t P_S``.
    """
    if t < 0:
        raise InvalidArgument("t must be non-negative")
    if not 1 <= trunc_dim <= MAX_TRUNCATION:
        raise InvalidArgument(f"trunc_dim must lie in [1, {MAX_TRUNCATION}]")
    m = _check_vector(g, m)
    n = _check_vector(g, n)
    if grid is None:
        grid = make_grid(g, max_shift=2 * t)

    jm = inject_halfline(g, m, grid)
    jn = inject_halfline(g, n, grid)
    vectors = [jm, jn, shift(jm, t), shift(jn, t)]
    root = math.sqrt(grid.dt)
    X = np.column_stack([root * v.values.ravel() for v in vectors]).astype(complex)
    B, s, _ = np.linalg.svd(X, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * max(s[0], 1e-300))) if s.size and s[0] > 0 else 0
    B = B[:, : min(max(rank, 1), trunc_dim)]
    residual = np.linalg.norm(X - B @ (B.conj().T @ X))
    if residual > 1e-8:
        raise TruncationInsufficient(f"{B.shape[1]} modes leave a representation residual {residual:.3e}")

    shape = jm.values.shape
    basis_fns = [HalfLineFunction(grid, (B[:, k] / root).reshape(shape)) for k in range(B.shape[1])]
    images = np.column_stack([compress(shift(u, t), g) for u in basis_fns])
    q = images.conj().T @ images

    rep = car_fock.build_fock(B.shape[1])
    Qt = car_fock.second_quantize(rep, q)
    vac = rep.vacuum
    zm = B.conj().T @ (root * jm.values.ravel())
    zn = B.conj().T @ (root * jn.values.ravel())
    left = car_fock.creation_from_coords(rep, zm) @ vac
    right = car_fock.creation_from_coords(rep, zn) @ vac
    return complex(np.vdot(left, Qt @ right))
