"""Gauge-invariant quasifree states on the CAR algebra over ``C^d``.

Such a state is fixed by its one-particle density ``R`` (``0 <= R = R^* <= 1``)
through ``phi[c(m)^* c(n)] = <m, R n>`` and ``phi[c(m) c(n)] = 0``.  It is
realized as the Fock vacuum of the CAR algebra over two copies of ``C^d``
after the Bogoliubov transformation generated by

    V = [[sqrt(R), sqrt(1 - R)], [sqrt(1 - R), -sqrt(R)]]

relative to the doubled complex structure ``i + (-i)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import car_fock
from .errors import InvalidArgument, ResourceLimit
from .finite_dilation import BogoliubovPair, bogoliubov_split

SPECTRUM_SLACK = 1e-10
MAX_FOCK_MODES = 6

# Heisenberg picture A_t = U_t^* A U_t with U_t the second quantization of
# exp(-iHt): creation operators evolve as c(m)_t = c(exp(+iHt) m).  The other
# sign is kept for comparison; it pairs with R = (1 + exp(+beta H))^-1.
EVOLUTION_SIGNS = {"heisenberg": +1, "reversed": -1}


@dataclass(frozen=True, eq=False)
class QuasifreeState:
    R: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.R.shape[0]

    S = None  # gauge invariant states only


@dataclass(frozen=True, eq=False)
class StateDilation:
    V: np.ndarray
    a_V: np.ndarray
    b_V: np.ndarray

    @property
    def Jt(self) -> np.ndarray:
        d = self.V.shape[0] // 2
        return np.diag(np.r_[np.full(d, 1j), np.full(d, -1j)])


def _hermitian(H, what):
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidArgument(f"{what} must be square, got shape {H.shape}")
    if np.abs(H - H.conj().T).max(initial=0.0) > 1e-12:
        raise InvalidArgument(f"{what} is not Hermitian")
    return 0.5 * (H + H.conj().T)


def quasifree_state(R) -> QuasifreeState:
    R = _hermitian(R, "R")
    w = np.linalg.eigvalsh(R)
    if w.min() < -SPECTRUM_SLACK or w.max() > 1 + SPECTRUM_SLACK:
        raise InvalidArgument(f"spectrum of R [{w.min():.3e}, {w.max():.3e}] leaves [0, 1]")
    return QuasifreeState(R)


def kms_R(H, beta: float) -> QuasifreeState:
    """Thermal state ``R = (1 + exp(-beta H))^-1`` via the spectral decomposition of ``H``."""
    H = _hermitian(H, "H")
    if not beta > 0:
        raise InvalidArgument(f"beta must be positive, got {beta!r}")
    h, W = np.linalg.eigh(H)
    R = (W * expit(beta * h)) @ W.conj().T
    return QuasifreeState(0.5 * (R + R.conj().T))


def dilate_state(st: QuasifreeState) -> StateDilation:
    w, W = np.linalg.eigh(st.R)
    if w.min() < -SPECTRUM_SLACK or w.max() > 1 + SPECTRUM_SLACK:
        raise InvalidArgument(f"spectrum of R [{w.min():.3e}, {w.max():.3e}] leaves [0, 1]")
    w = np.clip(w, 0.0, 1.0)
    occ = (W * np.sqrt(w)) @ W.conj().T
    hole = (W * np.sqrt(1.0 - w)) @ W.conj().T
    V = np.block([[occ, hole], [hole, -occ]])
    d = st.d
    Jt = np.diag(np.r_[np.full(d, 1j), np.full(d, -1j)])
    pair = bogoliubov_split(V, Jt)
    return StateDilation(V, pair.a, pair.b)


def realify(A) -> np.ndarray:
    """Real matrix of a complex one on ``C^d`` in coordinates ``(Re z, Im z)``."""
    A = np.asarray(A, dtype=complex)
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


def realify_vector(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag])


def _doubled_realification(A2):
    """Realify a ``2d x 2d`` complex matrix block by block onto ``R^2d + R^2d``."""
    d = A2.shape[0] // 2
    return np.block([[realify(A2[:d, :d]), realify(A2[:d, d:])],
                     [realify(A2[d:, :d]), realify(A2[d:, d:])]])


def doubled_one_particle_space(d: int) -> car_fock.OneParticleSpace:
    """Two realified copies of ``C^d`` with complex structure ``i + (-i)``."""
    J0 = car_fock.standard_space(d).J
    zero = np.zeros_like(J0)
    return car_fock.make_one_particle_space(np.block([[J0, zero], [zero, -J0]]))


def realified_pair(sd: StateDilation, sp: car_fock.OneParticleSpace) -> BogoliubovPair:
    return bogoliubov_split(_doubled_realification(sd.V), sp.J)


def two_point_direct(st: QuasifreeState, m, n) -> complex:
    """``phi[c(m)^* c(n)] = <m, R n>``."""
    m, n = _vectors(st, m, n)
    return complex(np.vdot(m, st.R @ n))


def pair_expectation(st: QuasifreeState, m, n) -> complex:
    """``phi[c(m) c(n)]``, identically zero for gauge-invariant states."""
    _vectors(st, m, n)
    return 0j


def _vectors(st, m, n):
    m = np.asarray(m, dtype=complex)
    n = np.asarray(n, dtype=complex)
    if m.shape != (st.d,) or n.shape != (st.d,):
        raise InvalidArgument(f"vectors must have length {st.d}")
    return m, n


def two_point_via_fock(st: QuasifreeState, m, n) -> complex:
    """``<c_V(jm) Omega, c_V(jn) Omega>`` on the Fock space over two copies of ``C^d``."""
    m, n = _vectors(st, m, n)
    if st.d > MAX_FOCK_MODES:
        raise ResourceLimit(f"Fock check limited to d <= {MAX_FOCK_MODES}, got {st.d}")
    sp = doubled_one_particle_space(st.d)
    rep = car_fock.build_fock(2 * st.d)
    pair = realified_pair(dilate_state(st), sp)
    vac = rep.vacuum
    jm = np.concatenate([realify_vector(m), np.zeros(2 * st.d)])
    jn = np.concatenate([realify_vector(n), np.zeros(2 * st.d)])
    left = car_fock.transformed_creation(rep, sp, pair, jm) @ vac
    right = car_fock.transformed_creation(rep, sp, pair, jn) @ vac
    return complex(np.vdot(left, right))


def evolved_pairing(H, m, x, t: complex, sign: int = +1) -> complex:
    """``<exp(i sign H t) m, x>`` continued analytically to complex ``t``.

    Written as ``<m, exp(-i sign H t) x>`` before continuation, which is
    entire in ``t``.
    """
    h, W = np.linalg.eigh(H)
    phase = np.exp(-1j * sign * h * t)
    return complex(np.vdot(W.conj().T @ m, phase * (W.conj().T @ x)))


def kms_two_point_check(H, beta: float, m, n, R=None, convention: str = "heisenberg") -> float:
    """``|phi[A B] - phi[B A_{i beta}]|`` for ``A = c(m)^*``, ``B = c(n)``.

    ``R`` defaults to the thermal density :func:`kms_R`; passing another
    density tests whether that state is KMS.  The right-hand side uses
    ``phi[c(n) c(x)^*] = <x, (1 - R) n>`` from the CAR.
    """
    H = _hermitian(H, "H")
    if not beta > 0:
        raise InvalidArgument(f"beta must be positive, got {beta!r}")
    try:
        sign = EVOLUTION_SIGNS[convention]
    except KeyError:
        raise InvalidArgument(f"unknown evolution convention {convention!r}") from None
    st = kms_R(H, beta) if R is None else quasifree_state(R)
    m, n = _vectors(st, m, n)
    lhs = two_point_direct(st, m, n)
    if R is None:
        # stay in the eigenbasis of H: a dense 1 - R carries absolute rounding in
        # every direction, which exp(beta h) then amplifies along high energies
        h, W = np.linalg.eigh(H)
        continuation = np.exp(sign * beta * h)
        rhs = complex(np.vdot(W.conj().T @ m, continuation * expit(-beta * h) * (W.conj().T @ n)))
    else:
        rhs = evolved_pairing(H, m, n - st.R @ n, 1j * beta, sign)
    return float(abs(lhs - rhs))
