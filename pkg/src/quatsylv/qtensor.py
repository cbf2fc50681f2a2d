"""Dense even-order quaternion tensors and the Einstein product.

A :class:`QTensor` of shape ``I1 x ... x IN x J1 x ... x JM`` is stored as a
real numpy array of shape ``(I1, ..., IN, J1, ..., JM, 4)``.  C-order
reshaping to ``(prod(I), prod(J), 4)`` is the flattening map: the first index
is the most significant one on both the row side and the column side.

Quaternion matrices (the flattened form) are plain arrays of shape
``(rows, cols, 4)``.  Products go through the complex pair form
``q = a + b j`` with ``a = w + x i`` and ``b = y + z i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import ParseError, ShapeMismatch
from .quat import EtaAxis, Quaternion, eta_conj_array


@dataclass(frozen=True)
class Shape:
    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(d) for d in self.rows))
        object.__setattr__(self, "cols", tuple(int(d) for d in self.cols))
        if not self.rows or not self.cols:
            raise ShapeMismatch("a tensor needs at least one row mode and one column mode")
        if any(d < 1 for d in self.rows + self.cols):
            raise ShapeMismatch(f"mode dimensions must be positive, got {self}")

    @property
    def total_rows(self) -> int:
        return math.prod(self.rows)

    @property
    def total_cols(self) -> int:
        return math.prod(self.cols)

    @property
    def T(self) -> "Shape":
        return Shape(self.cols, self.rows)

    def __str__(self) -> str:
        return f"{'x'.join(map(str, self.rows))} | {'x'.join(map(str, self.cols))}"


# ---------------------------------------------------------------------------
# quaternion matrices in complex pair form


def to_pair(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a ``(..., 4)`` array into complex parts ``(w + x i, y + z i)``."""
    return m[..., 0] + 1j * m[..., 1], m[..., 2] + 1j * m[..., 3]


def from_pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.stack([a.real, a.imag, b.real, b.imag], axis=-1)


def qmatmul(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Product of quaternion matrices given as ``(r, k, 4)`` and ``(k, c, 4)`` arrays."""
    if m1.shape[1] != m2.shape[0]:
        raise ShapeMismatch(f"cannot multiply {m1.shape[:2]} by {m2.shape[:2]}")
    a1, b1 = to_pair(m1)
    a2, b2 = to_pair(m2)
    # (a1 + b1 j)(a2 + b2 j) = (a1 a2 - b1 conj(b2)) + (a1 b2 + b1 conj(a2)) j
    return from_pair(a1 @ a2 - b1 @ b2.conj(), a1 @ b2 + b1 @ a2.conj())


def qmat_conj_transpose(m: np.ndarray) -> np.ndarray:
    out = np.swapaxes(m, 0, 1).copy()
    out[..., 1:] *= -1.0
    return out


# ---------------------------------------------------------------------------


class QTensor:
    """Immutable dense quaternion tensor with split row and column modes."""

    __slots__ = ("_data", "_shape")

    def __init__(self, data: np.ndarray, rows: Sequence[int], cols: Sequence[int]):
        shape = Shape(tuple(rows), tuple(cols))
        arr = np.array(data, dtype=float)
        expected = shape.rows + shape.cols + (4,)
        if arr.shape != expected:
            if arr.size != math.prod(expected):
                raise ShapeMismatch(f"data of shape {arr.shape} does not fit tensor shape {shape}")
            arr = arr.reshape(expected)
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor entries must be finite")
        arr.setflags(write=False)
        self._data = arr
        self._shape = shape

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_matrix(cls, m: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> "QTensor":
        return unflatten(m, Shape(tuple(rows), tuple(cols)))

    # -- basic properties ----------------------------------------------------
    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> Shape:
        return self._shape

    @property
    def row_dims(self) -> tuple[int, ...]:
        return self._shape.rows

    @property
    def col_dims(self) -> tuple[int, ...]:
        return self._shape.cols

    def entry(self, row_index: Sequence[int], col_index: Sequence[int]) -> Quaternion:
        return Quaternion.from_array(self._data[tuple(row_index) + tuple(col_index)])

    def matrix(self) -> np.ndarray:
        return flatten(self)

    def norm(self) -> float:
        return fro_norm(self)

    # -- arithmetic ------------------------------------------------------------
    def _same_shape(self, other: "QTensor", op: str) -> None:
        if self._shape != other._shape:
            raise ShapeMismatch(f"{op}: shapes {self._shape} and {other._shape} differ")

    def __add__(self, other: "QTensor") -> "QTensor":
        self._same_shape(other, "add")
        return QTensor(self._data + other._data, *self._dims())

    def __sub__(self, other: "QTensor") -> "QTensor":
        self._same_shape(other, "sub")
        return QTensor(self._data - other._data, *self._dims())

    def __neg__(self) -> "QTensor":
        return QTensor(-self._data, *self._dims())

    def __mul__(self, s: float) -> "QTensor":
        return scale(self, s)

    __rmul__ = __mul__

    def __matmul__(self, other: "QTensor") -> "QTensor":
        return einstein_product(self, other)

    @property
    def H(self) -> "QTensor":
        return conj_transpose(self)

    def _dims(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self._shape.rows, self._shape.cols

    def __repr__(self) -> str:
        return f"QTensor(shape={self._shape}, norm={fro_norm(self):.6g})"

    def to_json(self) -> dict[str, Any]:
        return to_json(self)


# ---------------------------------------------------------------------------
# construction helpers


def zeros(shape: Shape | tuple) -> QTensor:
    shape = _as_shape(shape)
    return QTensor(np.zeros(shape.rows + shape.cols + (4,)), shape.rows, shape.cols)


def identity(dims: Sequence[int]) -> QTensor:
    """Unit tensor over ``dims``: one on the diagonal ``i1..iN = j1..jN``."""
    dims = tuple(int(d) for d in dims)
    n = math.prod(dims)
    m = np.zeros((n, n, 4))
    m[np.arange(n), np.arange(n), 0] = 1.0
    return unflatten(m, Shape(dims, dims))


def random_qtensor(rng: np.random.Generator, rows: Sequence[int], cols: Sequence[int]) -> QTensor:
    """Independent standard-normal components on every quaternion axis."""
    rows, cols = tuple(rows), tuple(cols)
    return QTensor(rng.standard_normal(rows + cols + (4,)), rows, cols)


def _as_shape(shape: Shape | tuple) -> Shape:
    if isinstance(shape, Shape):
        return shape
    rows, cols = shape
    return Shape(tuple(rows), tuple(cols))


# ---------------------------------------------------------------------------
# flattening


def flatten(a: QTensor) -> np.ndarray:
    return a.data.reshape(a.shape.total_rows, a.shape.total_cols, 4).copy()


def unflatten(m: np.ndarray, s: Shape) -> QTensor:
    m = np.asarray(m, dtype=float)
    if m.shape != (s.total_rows, s.total_cols, 4):
        raise ShapeMismatch(f"matrix of shape {m.shape[:-1]} cannot be unflattened to {s}")
    return QTensor(m.reshape(s.rows + s.cols + (4,)), s.rows, s.cols)


# ---------------------------------------------------------------------------
# core operations


def einstein_product(a: QTensor, b: QTensor) -> QTensor:
    """``a *_N b`` contracting all column modes of ``a`` against the row modes of ``b``."""
    if a.col_dims != b.row_dims:
        raise ShapeMismatch(
            f"Einstein product needs a.col_dims == b.row_dims, got {a.col_dims} vs {b.row_dims}"
        )
    return unflatten(qmatmul(flatten(a), flatten(b)), Shape(a.row_dims, b.col_dims))


def multiply(*factors: QTensor) -> QTensor:
    """Left-to-right Einstein product of several tensors."""
    out = factors[0]
    for f in factors[1:]:
        out = einstein_product(out, f)
    return out


def conj_transpose(a: QTensor) -> QTensor:
    return unflatten(qmat_conj_transpose(flatten(a)), a.shape.T)


def eta_conj_transpose(a: QTensor, eta: EtaAxis | str) -> QTensor:
    """``-eta a^* eta``: transpose and flip only the eta component of every entry."""
    m = np.swapaxes(flatten(a), 0, 1)
    return unflatten(eta_conj_array(m, eta), a.shape.T)


def fro_norm(a: QTensor) -> float:
    return float(np.sqrt(np.sum(a.data * a.data)))


def add(a: QTensor, b: QTensor) -> QTensor:
    return a + b


def sub(a: QTensor, b: QTensor) -> QTensor:
    return a - b


def scale(a: QTensor, s: float) -> QTensor:
    return QTensor(a.data * float(s), a.row_dims, a.col_dims)


def is_eta_hermitian(a: QTensor, eta: EtaAxis | str, rtol: float = 1e-10) -> bool:
    if a.row_dims != a.col_dims:
        return False
    gap = fro_norm(a - eta_conj_transpose(a, eta))
    return gap <= rtol * max(1.0, fro_norm(a))


# ---------------------------------------------------------------------------
# block tensors


def _block_slices(first: tuple[int, ...], second: tuple[int, ...]):
    head = tuple(slice(0, d) for d in first)
    tail = tuple(slice(d, d + e) for d, e in zip(first, second))
    return head, tail


def row_block(c: QTensor, d: QTensor) -> QTensor:
    """``[C D]``: concatenate along every column mode, zero off the two diagonal blocks."""
    if c.row_dims != d.row_dims or len(c.col_dims) != len(d.col_dims):
        raise ShapeMismatch(f"row_block needs equal row modes, got {c.shape} and {d.shape}")
    cols = tuple(j + k for j, k in zip(c.col_dims, d.col_dims))
    out = np.zeros(c.row_dims + cols + (4,))
    head, tail = _block_slices(c.col_dims, d.col_dims)
    rows_all = tuple(slice(None) for _ in c.row_dims)
    out[rows_all + head] = c.data
    out[rows_all + tail] = d.data
    return QTensor(out, c.row_dims, cols)


def column_block(a: QTensor, b: QTensor) -> QTensor:
    """``[A; B]``: concatenate along every row mode, zero off the two diagonal blocks."""
    if a.col_dims != b.col_dims or len(a.row_dims) != len(b.row_dims):
        raise ShapeMismatch(f"column_block needs equal column modes, got {a.shape} and {b.shape}")
    rows = tuple(j + k for j, k in zip(a.row_dims, b.row_dims))
    out = np.zeros(rows + a.col_dims + (4,))
    head, tail = _block_slices(a.row_dims, b.row_dims)
    out[head] = a.data
    out[tail] = b.data
    return QTensor(out, rows, a.col_dims)


def split_row_block(t: QTensor, first_cols: Sequence[int]) -> tuple[QTensor, QTensor]:
    """Inverse of :func:`row_block` on its two diagonal blocks."""
    first = tuple(first_cols)
    second = tuple(l - j for l, j in zip(t.col_dims, first))
    if len(first) != len(t.col_dims) or any(d < 1 for d in second):
        raise ShapeMismatch(f"cannot split columns {t.col_dims} at {first}")
    head, tail = _block_slices(first, second)
    rows_all = tuple(slice(None) for _ in t.row_dims)
    return (
        QTensor(t.data[rows_all + head], t.row_dims, first),
        QTensor(t.data[rows_all + tail], t.row_dims, second),
    )


def split_column_block(t: QTensor, first_rows: Sequence[int]) -> tuple[QTensor, QTensor]:
    """Inverse of :func:`column_block` on its two diagonal blocks."""
    first = tuple(first_rows)
    second = tuple(l - j for l, j in zip(t.row_dims, first))
    if len(first) != len(t.row_dims) or any(d < 1 for d in second):
        raise ShapeMismatch(f"cannot split rows {t.row_dims} at {first}")
    head, tail = _block_slices(first, second)
    return (
        QTensor(t.data[head], first, t.col_dims),
        QTensor(t.data[tail], second, t.col_dims),
    )


# ---------------------------------------------------------------------------
# JSON


def to_json(a: QTensor) -> dict[str, Any]:
    flat = a.data.reshape(-1, 4)
    return {
        "shape": {"rows": list(a.row_dims), "cols": list(a.col_dims)},
        "data": [[float(v) for v in q] for q in flat],
    }


def from_json(obj: Any, name: str = "tensor") -> QTensor:
    """Decode the JSON tensor layout; errors name the tensor and the bad index."""
    if not isinstance(obj, dict):
        raise ParseError(f"{name}: expected an object with 'shape' and 'data'")
    try:
        rows = obj["shape"]["rows"]
        cols = obj["shape"]["cols"]
        data = obj["data"]
    except (KeyError, TypeError):
        raise ParseError(f"{name}: missing 'shape.rows', 'shape.cols' or 'data'") from None
    for label, dims in (("rows", rows), ("cols", cols)):
        if (
            not isinstance(dims, list)
            or not dims
            or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in dims)
        ):
            raise ParseError(f"{name}: shape.{label} must be a non-empty list of positive integers")
    shape = Shape(tuple(rows), tuple(cols))
    n = shape.total_rows * shape.total_cols
    if not isinstance(data, list) or len(data) != n:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise ParseError(f"{name}: data must hold {n} quaternions, got {got}")
    out = np.empty((n, 4))
    for idx, q in enumerate(data):
        if not isinstance(q, list) or len(q) != 4:
            raise ParseError(f"{name}: data[{idx}] must be a list [w, x, y, z]")
        for c, v in enumerate(q):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParseError(f"{name}: data[{idx}][{c}] is not a finite number ({v!r})")
            out[idx, c] = v
    return QTensor(out, shape.rows, shape.cols)
