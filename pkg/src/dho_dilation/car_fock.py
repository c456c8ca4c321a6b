"""Dense fermionic Fock representation over a finite-dimensional one-particle space.

The one-particle space is a real space with a complex structure ``J``.  It is
made complex through an orthonormal basis ``e_1..e_d`` such that
``e_1, .., e_d, J e_1, .., J e_d`` is a real orthonormal basis; a real vector
``m`` then has complex coordinates ``z_k = <e_k, m>`` where

    <m, n> = g(m, n) + i g(J m, n)

is conjugate-linear in ``m``.  Creation operators ``c(m) = sum_k z_k c_k`` are
complex-linear in ``m``, so ``c(J m) = i c(m)``.

Fock basis states are occupation strings ordered lexicographically with mode
1 as the most significant bit, and ``c_k`` carries the sign string of modes
``1..k-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import DegenerateTransformation, InvalidArgument, ResourceLimit
from .finite_dilation import BogoliubovPair

MAX_MODES = 12
KERNEL_THRESHOLD = 1e-8


@dataclass(frozen=True, eq=False)
class OneParticleSpace:
    J: np.ndarray = field(repr=False)
    basis: np.ndarray = field(repr=False)  # real_dim x complex_dim, columns e_k

    @property
    def real_dim(self) -> int:
        return self.J.shape[0]

    @property
    def complex_dim(self) -> int:
        return self.basis.shape[1]

    def coords(self, m) -> np.ndarray:
        """Complex coordinates ``z_k = <e_k, m>`` of a real vector."""
        m = np.asarray(m, dtype=float)
        if m.shape[-1] != self.real_dim:
            raise InvalidArgument(f"vector of length {m.shape[-1]} is not in a space of real dimension {self.real_dim}")
        E = self.basis
        return m @ E + 1j * (m @ (self.J @ E))

    def realify(self, z) -> np.ndarray:
        """Inverse of :meth:`coords`."""
        z = np.asarray(z, dtype=complex)
        E = self.basis
        return E @ z.real + (self.J @ E) @ z.imag

    def inner(self, m, n) -> complex:
        m = np.asarray(m, dtype=float)
        n = np.asarray(n, dtype=float)
        return complex(m @ n + 1j * ((self.J @ m) @ n))

    def complex_matrix(self, A) -> np.ndarray:
        """Matrix ``<e_k, A e_l>`` of a real operator (exact when ``A`` commutes with ``J``)."""
        A = np.asarray(A, dtype=float)
        return self.coords((A @ self.basis).T).T

    def conjugation(self) -> np.ndarray:
        """Real orthogonal map fixing each ``e_k`` and negating each ``J e_k``."""
        E = self.basis
        F = self.J @ E
        return E @ E.T - F @ F.T


def _check_complex_structure(J, tol=1e-12):
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    if J.ndim != 2 or J.shape != (n, n) or n % 2:
        raise InvalidArgument(f"complex structure must be square of even size, got {J.shape}")
    if np.linalg.norm(J @ J + np.eye(n)) > tol * n or np.linalg.norm(J + J.T) > tol * n:
        raise InvalidArgument("J must satisfy J J = -1 and J^T = -J")
    return J


def adapted_basis(J) -> np.ndarray:
    """Greedy J-adapted orthonormal basis, scanning standard basis vectors in order."""
    J = _check_complex_structure(J)
    n = J.shape[0]
    found: list[np.ndarray] = []
    span = np.zeros((n, 0))
    for k in range(n):
        if len(found) == n // 2:
            break
        v = np.zeros(n)
        v[k] = 1.0
        v = v - span @ (span.T @ v)
        v = v - span @ (span.T @ v)
        norm = np.linalg.norm(v)
        if norm < 0.5:
            continue
        v /= norm
        found.append(v)
        span = np.column_stack([span, v, J @ v])
    return np.column_stack(found)


def make_one_particle_space(J, basis=None) -> OneParticleSpace:
    J = _check_complex_structure(J)
    if basis is None:
        basis = adapted_basis(J)
    else:
        basis = np.asarray(basis, dtype=float)
        full = np.column_stack([basis, J @ basis])
        if full.shape != J.shape or np.linalg.norm(full.T @ full - np.eye(J.shape[0])) > 1e-10:
            raise InvalidArgument("basis is not J-adapted orthonormal")
    J = J.copy()
    J.setflags(write=False)
    return OneParticleSpace(J, basis)


def standard_space(d: int) -> OneParticleSpace:
    """``C^d`` realified as ``(Re z, Im z)`` with ``e_k`` the real unit vectors."""
    eye = np.eye(d)
    zero = np.zeros((d, d))
    J = np.block([[zero, -eye], [eye, zero]])
    return make_one_particle_space(J, np.vstack([eye, zero]))


@dataclass(frozen=True, eq=False)
class FockOperator:
    matrix: np.ndarray

    @property
    def H(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.matrix @ other.matrix)
        return self.matrix @ other

    def __add__(self, other):
        return FockOperator(self.matrix + other.matrix)

    def __sub__(self, other):
        return FockOperator(self.matrix - other.matrix)

    def __mul__(self, scalar):
        return FockOperator(scalar * self.matrix)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class FockRep:
    d: int
    c: np.ndarray = field(repr=False)  # (d, 2**d, 2**d) creation matrices

    @property
    def fock_dim(self) -> int:
        return 2**self.d

    @property
    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.fock_dim, dtype=complex)
        v[0] = 1.0
        return v

    def identity(self) -> FockOperator:
        return FockOperator(np.eye(self.fock_dim, dtype=complex))

    def number(self) -> FockOperator:
        counts = np.array([bin(i).count("1") for i in range(self.fock_dim)], dtype=float)
        return FockOperator(np.diag(counts).astype(complex))


def build_fock(d: int) -> FockRep:
    if int(d) != d or not 1 <= d <= MAX_MODES:
        raise ResourceLimit(f"number of modes must lie in [1, {MAX_MODES}], got {d!r}")
    d = int(d)
    eye = np.eye(2)
    sign = np.diag([1.0, -1.0])
    raise_ = np.array([[0.0, 0.0], [1.0, 0.0]])
    c = np.empty((d, 2**d, 2**d))
    for k in range(d):
        factors = [sign] * k + [raise_] + [eye] * (d - k - 1)
        c[k] = reduce(np.kron, factors)
    c.setflags(write=False)
    return FockRep(d, c)


def _check_space(rep: FockRep, sp: OneParticleSpace):
    if sp.complex_dim != rep.d:
        raise InvalidArgument(f"one-particle space has {sp.complex_dim} modes, Fock space {rep.d}")


def creation_from_coords(rep: FockRep, z) -> FockOperator:
    z = np.asarray(z, dtype=complex)
    if z.shape != (rep.d,):
        raise InvalidArgument(f"expected {rep.d} coordinates, got shape {z.shape}")
    return FockOperator(np.tensordot(z, rep.c, axes=1))


def creation(rep: FockRep, sp: OneParticleSpace, m) -> FockOperator:
    _check_space(rep, sp)
    return creation_from_coords(rep, sp.coords(m))


def annihilation(rep: FockRep, sp: OneParticleSpace, m) -> FockOperator:
    return creation(rep, sp, m).H


def transformed_creation(rep: FockRep, sp: OneParticleSpace, pair: BogoliubovPair, m) -> FockOperator:
    """``c_t(m) = c(a m) + c(b m)^*``."""
    _check_space(rep, sp)
    shape = (sp.real_dim, sp.real_dim)
    if pair.a.shape != shape or pair.b.shape != shape:
        raise InvalidArgument(f"Bogoliubov pair of shape {pair.a.shape} does not act on a space of real dimension {sp.real_dim}")
    m = np.asarray(m, dtype=float)
    return creation(rep, sp, pair.a @ m) + creation(rep, sp, pair.b @ m).H


def anticommutator(A, B) -> np.ndarray:
    A = A.matrix if isinstance(A, FockOperator) else A
    B = B.matrix if isinstance(B, FockOperator) else B
    return A @ B + B @ A


def car_residual(ops) -> float:
    """Largest deviation of a family of creation operators from the CAR.

    ``ops`` are the images of an orthonormal basis, so the targets are
    ``{c_k^*, c_l} = delta_kl`` and ``{c_k, c_l} = 0``.
    """
    mats = [op.matrix if isinstance(op, FockOperator) else op for op in ops]
    dim = mats[0].shape[0]
    eye = np.eye(dim)
    worst = 0.0
    for k, ck in enumerate(mats):
        for l in range(k, len(mats)):
            cl = mats[l]
            mixed = anticommutator(ck.conj().T, cl) - (eye if k == l else 0.0)
            worst = max(worst, np.abs(mixed).max(), np.abs(anticommutator(ck, cl)).max())
    return float(worst)


def transformed_vacuum(rep: FockRep, sp: OneParticleSpace, pair: BogoliubovPair) -> np.ndarray:
    """Unit vector annihilated by every transformed annihilator ``c_t(e_k)^*``."""
    E = sp.basis
    stack = np.vstack([transformed_creation(rep, sp, pair, E[:, k]).H.matrix for k in range(rep.d)])
    _, s, vh = np.linalg.svd(stack)
    smallest = float(s[-1])
    if smallest > KERNEL_THRESHOLD:
        raise DegenerateTransformation(
            f"transformed annihilators have no common kernel (smallest singular value {smallest:.3e})", smallest
        )
    omega = vh[-1].conj()
    pivot = np.argmax(np.abs(omega))
    omega = omega * (abs(omega[pivot]) / omega[pivot])
    return omega / np.linalg.norm(omega)


def second_quantize(rep: FockRep, q) -> FockOperator:
    """``sum_kl q_kl c_k c_l^*`` for a complex one-particle matrix ``q``."""
    q = np.asarray(q, dtype=complex)
    if q.shape != (rep.d, rep.d):
        raise InvalidArgument(f"one-particle matrix must be {rep.d}x{rep.d}, got {q.shape}")
    c = rep.c
    return FockOperator(np.einsum("kl,kab,lcb->ac", q, c, c, optimize=True))


def second_quantize_projection(rep: FockRep, sp: OneParticleSpace, Q, tol: float = 1e-10) -> FockOperator:
    _check_space(rep, sp)
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (sp.real_dim, sp.real_dim):
        raise InvalidArgument(f"projection has shape {Q.shape}")
    if (np.linalg.norm(Q @ Q - Q) > tol or np.linalg.norm(Q - Q.T) > tol
            or np.linalg.norm(Q @ sp.J - sp.J @ Q) > tol):
        raise InvalidArgument("Q must be an orthogonal projection commuting with J")
    return second_quantize(rep, sp.complex_matrix(Q))


def vacuum_expectation(rep: FockRep, A) -> complex:
    A = A.matrix if isinstance(A, FockOperator) else np.asarray(A)
    if A.shape != (rep.fock_dim, rep.fock_dim):
        raise InvalidArgument(f"operator of shape {A.shape} does not act on a Fock space of dimension {rep.fock_dim}")
    return complex(A[0, 0])
