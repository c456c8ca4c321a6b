"""Classical phase space of the damped oscillator and its contraction semigroup.

Coordinates are ordered ``(q_1..q_n, p_1..p_n)``.  The complex structure maps
``(q, p) -> (-p, q)`` and ``P`` projects onto the momentum block, so that
``J P = (1 - P) J`` holds exactly in floating point.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidArgument

# |alpha t| below this switches cosh / sinhc to their Taylor series
SERIES_THRESHOLD = 1e-4
SERIES_TERMS = 6
REGIME_RTOL = 1e-12


class Regime(enum.Enum):
    UNDERDAMPED = "underdamped"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"


@dataclass(frozen=True, eq=False)
class PhaseSpace:
    n_modes: int
    J: np.ndarray = field(repr=False)
    P: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * self.n_modes

    def q_block(self, m):
        return np.asarray(m)[..., : self.n_modes]

    def p_block(self, m):
        return np.asarray(m)[..., self.n_modes :]


@dataclass(frozen=True, eq=False)
class DhoGenerator:
    space: PhaseSpace
    omega: float
    gamma: float
    Z: np.ndarray = field(repr=False)
    alpha: complex
    regime: Regime

    @property
    def damped_frequency(self) -> float:
        """``sqrt(omega^2 - gamma^2)`` in the underdamped regime, else 0."""
        if self.regime is Regime.UNDERDAMPED:
            return float(self.alpha.imag)
        return 0.0

    @property
    def decay_rate(self) -> float:
        """Slowest exponential decay rate of the trajectories (spectral abscissa of -Z)."""
        if self.regime is Regime.OVERDAMPED:
            return self.gamma - self.alpha.real
        return self.gamma

    @property
    def shifted(self) -> np.ndarray:
        """``Z + gamma * 1``, the nilpotent-at-criticality part of the generator."""
        return self.Z + self.gamma * np.eye(self.space.dim)


@dataclass(frozen=True, eq=False)
class Propagator:
    t: float
    T: np.ndarray

    @property
    def sigma_max(self) -> float:
        return float(np.linalg.norm(self.T, 2))


def make_phase_space(n_modes: int) -> PhaseSpace:
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidArgument(f"n_modes must be a positive integer, got {n_modes!r}")
    n = int(n_modes)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    J = np.block([[zero, -eye], [eye, zero]])
    P = np.block([[zero, zero], [zero, eye]])
    J.setflags(write=False)
    P.setflags(write=False)
    return PhaseSpace(n, J, P)


def classify_regime(omega: float, gamma: float) -> Regime:
    g2, w2 = gamma * gamma, omega * omega
    if abs(g2 - w2) <= REGIME_RTOL * max(g2, w2):
        return Regime.CRITICAL
    return Regime.UNDERDAMPED if g2 < w2 else Regime.OVERDAMPED


def make_generator(ps: PhaseSpace, omega: float, gamma: float) -> DhoGenerator:
    if not omega > 0:
        raise InvalidArgument(f"omega must be > 0, got {omega!r}")
    if not gamma >= 0:
        raise InvalidArgument(f"gamma must be >= 0, got {gamma!r}")
    omega, gamma = float(omega), float(gamma)
    Z = omega * ps.J - 2.0 * gamma * ps.P
    Z.setflags(write=False)
    alpha = complex(np.sqrt(complex(gamma * gamma - omega * omega)))
    return DhoGenerator(ps, omega, gamma, Z, alpha, classify_regime(omega, gamma))


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise InvalidArgument("the semigroup is only defined for finite t >= 0")
    return t


def propagator_coefficients(g: DhoGenerator, times):
    """Scalar coefficients ``(c0, c1)`` with ``T_t = c0(t) 1 + c1(t) (Z + gamma 1)``.

    ``c0 = exp(-gamma t) cosh(alpha t)`` and ``c1 = exp(-gamma t) sinh(alpha t) / alpha``.
    Both are evaluated with complex arithmetic and returned as real arrays of
    the same shape as ``times``.
    """
    t = _check_time(times)
    alpha = g.alpha
    x = alpha * t
    small = np.abs(x) < SERIES_THRESHOLD

    c0 = np.empty(t.shape, dtype=complex)
    c1 = np.empty(t.shape, dtype=complex)

    if np.any(small):
        xs2 = x[small] ** 2
        ts = t[small]
        cosh_s = np.zeros_like(xs2)
        sinhc_s = np.zeros_like(xs2)
        power = np.ones_like(xs2)
        for k in range(SERIES_TERMS):
            cosh_s += power / math.factorial(2 * k)
            sinhc_s += power / math.factorial(2 * k + 1)
            power = power * xs2
        damp = np.exp(-g.gamma * ts)
        c0[small] = damp * cosh_s
        c1[small] = damp * ts * sinhc_s

    big = ~small
    if np.any(big):
        # exp(-gamma t) folded into each branch so overdamped tails do not overflow
        tb = t[big]
        grow = np.exp((alpha - g.gamma) * tb)
        fall = np.exp(-(alpha + g.gamma) * tb)
        c0[big] = 0.5 * (grow + fall)
        c1[big] = 0.5 * (grow - fall) / alpha

    scale = max(1.0, float(np.max(np.abs(c1), initial=0.0)) * (g.omega + g.gamma))
    residue = max(float(np.max(np.abs(c0.imag), initial=0.0)),
                  float(np.max(np.abs(c1.imag), initial=0.0)) * (g.omega + g.gamma))
    if residue > 1e-13 * scale:
        raise ArithmeticError(f"closed-form propagator kept an imaginary residue {residue:.3e}")
    return c0.real, c1.real


def evolve_closed_form(g: DhoGenerator, t: float) -> Propagator:
    """``T_t = exp(-gamma t) [cosh(alpha t) 1 + sinh(alpha t)/alpha (Z + gamma 1)]``."""
    c0, c1 = propagator_coefficients(g, t)
    T = float(c0) * np.eye(g.space.dim) + float(c1) * g.shifted
    return Propagator(float(t), T)


def evolve_oracle(g: DhoGenerator, t: float) -> Propagator:
    """``exp(Z t)`` by Pade scaling and squaring, independent of the closed form."""
    t = float(_check_time(t))
    return Propagator(t, scipy.linalg.expm(g.Z * t))


def trajectory(g: DhoGenerator, m, times) -> np.ndarray:
    """``T_t m`` for every ``t`` in ``times``; shape ``(len(times), dim)``.

    ``m`` may be complex (an element of the complexified phase space).
    """
    m = np.asarray(m)
    c0, c1 = propagator_coefficients(g, np.atleast_1d(times))
    return np.outer(c0, m) + np.outer(c1, g.shifted @ m)


def quadratic_residual(g: DhoGenerator) -> float:
    """Frobenius norm of ``(Z + gamma)^2 - (gamma^2 - omega^2) 1``."""
    A = g.shifted
    target = (g.gamma**2 - g.omega**2) * np.eye(g.space.dim)
    return float(np.linalg.norm(A @ A - target))


def lyapunov_residual(g: DhoGenerator) -> float:
    """Frobenius norm of ``Z^T + Z + 4 gamma P``."""
    return float(np.linalg.norm(g.Z.T + g.Z + 4.0 * g.gamma * g.space.P))
