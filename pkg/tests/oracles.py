"""Independent reference computations used by the tests.

Nothing here goes through the complex pair form, the complex adjoint or the
staged solvers.  Products use the quaternion structure constants written out
from the unit rules, and solvability is decided by a dense real least-squares
problem over every real component of every unknown.
"""

from __future__ import annotations

import itertools

import numpy as np

from quatsylv.qtensor import QTensor
from quatsylv.sylvester.system import EQUATIONS, UNKNOWNS, SystemSpec

# Basis order 1, i, j, k.  UNIT[a][b] = (sign, index) with e_a e_b = sign e_index.
_UNIT = [
    [(1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0)],
]
STRUCT = np.zeros((4, 4, 4))
for _a, _b in itertools.product(range(4), range(4)):
    _s, _c = _UNIT[_a][_b]
    STRUCT[_a, _b, _c] = _s

ETA_COMPONENT = {"i": 1, "j": 2, "k": 3}


def hamilton(p, q) -> np.ndarray:
    """Product of two quaternions given as length-4 arrays."""
    return np.einsum("a,b,abc->c", np.asarray(p, float), np.asarray(q, float), STRUCT)


def naive_einstein(a: QTensor, b: QTensor) -> QTensor:
    """Contract every column mode of ``a`` against the row modes of ``b`` mode by mode."""
    n = len(a.col_dims)
    ad, bd = a.data, b.data
    out = np.zeros(a.row_dims + b.col_dims + (4,))
    axes_a = list(range(len(a.row_dims), len(a.row_dims) + n))
    axes_b = list(range(n))
    for x, y in itertools.product(range(4), range(4)):
        part = np.tensordot(ad[..., x], bd[..., y], axes=(axes_a, axes_b))
        for z in range(4):
            if STRUCT[x, y, z]:
                out[..., z] += STRUCT[x, y, z] * part
    return QTensor(out, a.row_dims, b.col_dims)


def naive_conj_transpose(a: QTensor, eta: str | None = None) -> QTensor:
    """Swap row and column modes, then conjugate (or eta-conjugate) every entry."""
    nr = len(a.row_dims)
    nd = a.data.ndim - 1
    perm = list(range(nr, nd)) + list(range(nr)) + [nd]
    d = np.transpose(a.data, perm).copy()
    if eta is None:
        d[..., 1:] *= -1.0
    else:
        d[..., ETA_COMPONENT[str(eta)]] *= -1.0
    return QTensor(d, a.col_dims, a.row_dims)


def _as_matrix(t: QTensor) -> np.ndarray:
    r = int(np.prod(t.row_dims))
    c = int(np.prod(t.col_dims))
    return t.data.reshape(r, c, 4)


def sandwich_operator(p: QTensor | None, q: QTensor | None, x_rows: int, x_cols: int) -> np.ndarray:
    """Real matrix of ``X -> P X Q`` acting on the stacked components of ``X``.

    ``None`` stands for an identity factor.
    """
    pm = np.eye(x_rows)[:, :, None] * np.array([1.0, 0, 0, 0]) if p is None else _as_matrix(p)
    qm = np.eye(x_cols)[:, :, None] * np.array([1.0, 0, 0, 0]) if q is None else _as_matrix(q)
    # (P X Q)_{il} = sum_{jk} P_ij X_jk Q_kl; component c gets STRUCT products a*b*d.
    triple = np.einsum("abe,edc->abdc", STRUCT, STRUCT)
    op = np.einsum("ija,kld,abdc->ilcjkb", pm, qm, triple)
    rows = pm.shape[0] * qm.shape[1] * 4
    return op.reshape(rows, x_rows * x_cols * 4)


def _factor(spec: SystemSpec, tokens: tuple[str, ...]) -> QTensor | None:
    out = None
    for tok in tokens:
        t = spec.tensors[tok.rstrip("*")]
        if tok.endswith("*"):
            t = naive_conj_transpose(t, spec.eta.value)
        out = t if out is None else naive_einstein(out, t)
    return out


def linear_system(spec: SystemSpec) -> tuple[np.ndarray, np.ndarray, list[tuple[str, int]]]:
    """Dense real ``(M, b)`` with ``M u = b`` equivalent to the spec's equations.

    For the eta variant extra rows force every unknown to equal its own
    eta-conjugate transpose.
    """
    unknowns = UNKNOWNS[spec.variant]
    shapes = spec.unknown_shapes()
    sizes = {u: (int(np.prod(shapes[u].rows)), int(np.prod(shapes[u].cols))) for u in unknowns}
    offsets, pos = {}, 0
    for u in unknowns:
        offsets[u] = pos
        pos += sizes[u][0] * sizes[u][1] * 4
    blocks, rhs = [], []
    for name, terms in EQUATIONS[spec.variant]:
        e = spec.tensors[name]
        row = np.zeros((e.data.size, pos))
        for term in terms:
            k = next(i for i, tok in enumerate(term) if tok in unknowns)
            u = term[k]
            left = _factor(spec, term[:k]) if k > 0 else None
            right = _factor(spec, term[k + 1:]) if k + 1 < len(term) else None
            r, c = sizes[u]
            op = sandwich_operator(left, right, r, c)
            row[:, offsets[u]:offsets[u] + op.shape[1]] += op
        blocks.append(row)
        rhs.append(_as_matrix(e).reshape(-1))
    if spec.variant == "eta":
        for u in unknowns:
            r, c = sizes[u]
            n = r * c * 4
            ident = np.eye(n)
            swap = np.zeros((n, n))
            comp = ETA_COMPONENT[spec.eta.value]
            for i, j, q in itertools.product(range(r), range(c), range(4)):
                sign = -1.0 if q == comp else 1.0
                swap[(j * r + i) * 4 + q, (i * c + j) * 4 + q] = sign
            con = np.zeros((n, pos))
            con[:, offsets[u]:offsets[u] + n] = ident - swap
            blocks.append(con)
            rhs.append(np.zeros(n))
    return np.vstack(blocks), np.concatenate(rhs), [(u, offsets[u]) for u in unknowns]


def lstsq_relative_residual(spec: SystemSpec) -> float:
    m, b, _ = linear_system(spec)
    u, *_ = np.linalg.lstsq(m, b, rcond=None)
    return float(np.linalg.norm(m @ u - b) / max(1.0, np.linalg.norm(b)))


def oracle_consistent(spec: SystemSpec, tol: float = 1e-9) -> bool:
    """Whether the spec has an exact solution, decided by least squares."""
    return lstsq_relative_residual(spec) <= tol
