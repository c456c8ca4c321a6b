"""Fixed-time doubling of a contraction into an orthogonal operator on M + M.

A contraction ``T`` is completed to the block orthogonal operator

    U = [[T, (1 - T T^T)^(1/2)], [(1 - T^T T)^(1/2), -T^T]]

whose top-left block is ``T``.  Relative to the doubled complex structure
``J + (-J)`` it splits into a complex-linear part ``a`` and a conjugate-linear
part ``b``; ``b`` decides whether the induced Bogoliubov transformation is
implementable on a single Fock space.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, NotAContraction
from .phase_space import PhaseSpace, evolve_closed_form, make_generator, make_phase_space

CONTRACTION_SLACK = 1e-10
CONTRACTION_LIMIT = 1e-6


@dataclass(frozen=True, eq=False)
class DoubledSpace:
    base: PhaseSpace
    Jt: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * self.base.dim


@dataclass(frozen=True, eq=False)
class BlockDilation:
    T: np.ndarray
    U: np.ndarray
    defect_top: np.ndarray
    defect_bot: np.ndarray

    @property
    def size(self) -> int:
        return self.T.shape[0]


@dataclass(frozen=True, eq=False)
class BogoliubovPair:
    a: np.ndarray
    b: np.ndarray


def make_doubled_space(ps: PhaseSpace) -> DoubledSpace:
    n = ps.dim
    Jt = np.zeros((2 * n, 2 * n))
    Jt[:n, :n] = ps.J
    Jt[n:, n:] = -ps.J
    Jt.setflags(write=False)
    return DoubledSpace(ps, Jt)


def inject_doubled(m, dim: int | None = None) -> np.ndarray:
    """``m -> m + 0``.  If ``dim`` is given, ``m`` must have that length."""
    m = np.asarray(m)
    if m.ndim != 1 or (dim is not None and m.shape[0] != dim):
        raise InvalidArgument(f"expected a vector of length {dim}, got shape {m.shape}")
    return np.concatenate([m, np.zeros_like(m)])


def restrict_doubled(x) -> np.ndarray:
    """Adjoint of :func:`inject_doubled`: keep the first block."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] % 2:
        raise InvalidArgument(f"expected an even-length vector, got shape {x.shape}")
    return x[: x.shape[0] // 2].copy()


def _defect_roots(T):
    """Clip ``T`` to a contraction and return it with both defect roots from one SVD.

    ``sqrt(1 - T T^T) = W C W^T`` and ``sqrt(1 - T^T T) = V C V^T`` with
    ``C = sqrt((1 - s)(1 + s))``.  Sharing the singular values keeps the
    off-diagonal blocks of ``U^T U`` cancelling even when ``s`` is within
    rounding of 1, where separate eigendecompositions lose half the digits.
    """
    w, s, vt = np.linalg.svd(T)
    if s.size and s[0] > 1.0 + CONTRACTION_LIMIT:
        raise NotAContraction(f"largest singular value {s[0]:.12g} exceeds 1")
    if s.size and s[0] > 1.0 + CONTRACTION_SLACK:
        s = np.minimum(s, 1.0)
        T = (w * s) @ vt
    c = np.sqrt(np.clip((1.0 - s) * (1.0 + s), 0.0, None))
    return T, (w * c) @ w.T, (vt.T * c) @ vt


def dilate_contraction(T) -> BlockDilation:
    T = np.array(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {T.shape}")
    T, top, bot = _defect_roots(T)
    U = np.block([[T, top], [bot, -T.T]])
    return BlockDilation(T, U, top, bot)


def compression(U) -> np.ndarray:
    """``j^* U j``: the top-left quarter of ``U``."""
    U = np.asarray(U)
    m = U.shape[0] // 2
    return U[:m, :m].copy()


def bogoliubov_split(d: BlockDilation | np.ndarray, ds: DoubledSpace | np.ndarray) -> BogoliubovPair:
    """Split ``U`` into ``Jt``-commuting and ``Jt``-anticommuting parts.

    Both arguments also accept bare matrices so that any orthogonal operator
    and complex structure can be split.
    """
    U = d.U if isinstance(d, BlockDilation) else np.asarray(d)
    Jt = ds.Jt if isinstance(ds, DoubledSpace) else np.asarray(ds)
    if U.shape != Jt.shape:
        raise InvalidArgument(f"operator shape {U.shape} does not match complex structure {Jt.shape}")
    conj = Jt @ U @ Jt
    return BogoliubovPair(0.5 * (U - conj), 0.5 * (U + conj))


def hs_norm_sq(b) -> float:
    """Squared Hilbert-Schmidt norm on the realified space."""
    return float(np.sum(np.abs(np.asarray(b)) ** 2))


def implementable(b, threshold: float = np.inf) -> tuple[bool, float]:
    """Implementability verdict and the squared HS norm of ``b``.

    In finite dimension the norm is always finite, so the verdict is always
    true; the returned norm is what carries information (see
    :func:`hs_scaling`).
    """
    if not threshold > 0:
        raise InvalidArgument("threshold must be positive")
    norm = hs_norm_sq(b)
    return bool(np.isfinite(norm)), norm


def hs_scaling(omega: float, gamma: float, t: float, modes=(1, 2, 4, 8)) -> list[tuple[int, float]]:
    """``(n_modes, ||b_{U_t}||_HS^2)`` for identical copies of one oscillator."""
    out = []
    for n in modes:
        ps = make_phase_space(n)
        g = make_generator(ps, omega, gamma)
        pair = bogoliubov_split(dilate_contraction(evolve_closed_form(g, t).T), make_doubled_space(ps))
        out.append((n, hs_norm_sq(pair.b)))
    return out
