"""Moore-Penrose inverses and the projectors L and R.

Route: flatten, complex adjoint, complex SVD (numpy/LAPACK), threshold,
then map back through the inverse adjoint map.  The projectors are built from
the complementary singular subspaces rather than as ``I - A A^+``, so that a
full-rank factor yields an exactly zero projector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .qtensor import QTensor, Shape, flatten, from_pair, to_pair, unflatten

STRUCTURE_TOL = 1e-11


@dataclass(frozen=True)
class RankTolerance:
    """Relative numerical-rank cutoff used by every SVD in the package."""

    rtol: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.rtol < 1.0:
            raise ValueError(f"rtol must lie in (0, 1), got {self.rtol}")


DEFAULT_RANK_TOL = RankTolerance()


def complex_adjoint(m: np.ndarray) -> np.ndarray:
    """Map the quaternion matrix ``M1 + M2 j`` to ``[[M1, M2], [-conj(M2), conj(M1)]]``."""
    m1, m2 = to_pair(np.asarray(m, dtype=float))
    return np.block([[m1, m2], [-m2.conj(), m1.conj()]])


def from_complex_adjoint(c: np.ndarray, check: bool = True) -> np.ndarray:
    """Inverse of :func:`complex_adjoint`, symmetrising the two block copies.

    With ``check`` set, raises :class:`NumericalError` when the input deviates
    from the adjoint block pattern by more than ``STRUCTURE_TOL`` (relative).
    """
    r, c2 = c.shape[0] // 2, c.shape[1] // 2
    tl, tr = c[:r, :c2], c[:r, c2:]
    bl, br = c[r:, :c2], c[r:, c2:]
    if check:
        dev = max(np.abs(tl - br.conj()).max(initial=0.0), np.abs(tr + bl.conj()).max(initial=0.0))
        ref = max(1.0, np.abs(c).max(initial=0.0))
        if dev > STRUCTURE_TOL * ref:
            raise NumericalError(f"adjoint block structure violated (deviation {dev:.3e})")
    p = 0.5 * (tl + br.conj())
    q = 0.5 * (tr - bl.conj())
    return from_pair(p, q)


@dataclass(frozen=True)
class Decomposition:
    """Pseudo-inverse and both projectors of one quaternion matrix."""

    pinv: np.ndarray
    left: np.ndarray  # L = I - A^+ A, on the column side
    right: np.ndarray  # R = I - A A^+, on the row side
    rank: int


def decompose_matrix(
    m: np.ndarray, tol: RankTolerance = DEFAULT_RANK_TOL, scale: float | None = None
) -> Decomposition:
    """SVD-based pseudo-inverse and projectors of a quaternion matrix.

    Singular values at or below ``rtol * sigma_max * max(2m, 2n)`` count as
    zero.  ``scale``, when given, replaces ``sigma_max`` by
    ``max(sigma_max, scale)``; callers pass the magnitude of the operands a
    matrix was computed from so that pure rounding noise is not inverted.
    """
    m = np.asarray(m, dtype=float)
    rows, cols = m.shape[0], m.shape[1]
    chi = complex_adjoint(m)
    u, s, vh = np.linalg.svd(chi, full_matrices=True)
    smax = s[0] if s.size else 0.0
    ref = max(smax, scale or 0.0)
    cutoff = tol.rtol * ref * max(2 * rows, 2 * cols)
    keep = int(np.count_nonzero(s > cutoff)) if smax > 0 else 0
    # singular values of an adjoint image come in equal pairs; never split one
    if keep % 2:
        keep += 1
    ur, vr = u[:, :keep], vh[:keep, :].conj().T
    pinv_c = (vr / s[:keep]) @ ur.conj().T
    u_perp = u[:, keep:]
    v_perp = vh[keep:, :].conj().T
    right_c = u_perp @ u_perp.conj().T
    left_c = v_perp @ v_perp.conj().T
    return Decomposition(
        pinv=from_complex_adjoint(pinv_c),
        left=from_complex_adjoint(left_c),
        right=from_complex_adjoint(right_c),
        rank=keep // 2,
    )


def pinv_matrix(m: np.ndarray, tol: RankTolerance = DEFAULT_RANK_TOL) -> np.ndarray:
    return decompose_matrix(m, tol).pinv


@dataclass(frozen=True)
class TensorDecomposition:
    pinv: QTensor
    left: QTensor
    right: QTensor
    rank: int


def decompose(a: QTensor, tol: RankTolerance = DEFAULT_RANK_TOL) -> TensorDecomposition:
    d = decompose_matrix(flatten(a), tol)
    rows, cols = a.row_dims, a.col_dims
    return TensorDecomposition(
        pinv=unflatten(d.pinv, Shape(cols, rows)),
        left=unflatten(d.left, Shape(cols, cols)),
        right=unflatten(d.right, Shape(rows, rows)),
        rank=d.rank,
    )


def pinv_tensor(a: QTensor, tol: RankTolerance = DEFAULT_RANK_TOL) -> QTensor:
    return unflatten(pinv_matrix(flatten(a), tol), a.shape.T)


def left_projector(a: QTensor, tol: RankTolerance = DEFAULT_RANK_TOL) -> QTensor:
    """``L_A = I - A^+ * A``, square over ``a.col_dims``."""
    return decompose(a, tol).left


def right_projector(a: QTensor, tol: RankTolerance = DEFAULT_RANK_TOL) -> QTensor:
    """``R_A = I - A * A^+``, square over ``a.row_dims``."""
    return decompose(a, tol).right


def numerical_rank(a: QTensor, tol: RankTolerance = DEFAULT_RANK_TOL) -> int:
    return decompose(a, tol).rank
