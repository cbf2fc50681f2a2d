"""Numeric context for one solve: memoised decompositions and magnitude tracking.

Every tensor produced inside a solve carries a *scale*, an upper bound on the
magnitude of the operands it was computed from (product of factor scales for
products, sum for sums).  Two decisions use it:

* rank cutoffs are taken relative to ``max(sigma_max, scale)`` so that a
  tensor which is zero in exact arithmetic but carries rounding noise is
  recognised as zero instead of being inverted;
* condition thresholds multiply the factor scales, so a right-hand side
  obtained by cancellation is judged against the size of what cancelled.
"""

from __future__ import annotations

import math

import numpy as np

from ..pinv import TensorDecomposition, decompose_matrix
from ..qtensor import (
    QTensor,
    Shape,
    column_block,
    einstein_product,
    flatten,
    fro_norm,
    identity,
    row_block,
    unflatten,
)
from .types import DEFAULT_TOL, Condition, ConsistencyReport, DerivationCache, FreeParams, Tolerances


class Workspace:
    def __init__(
        self,
        tol: Tolerances | None = None,
        fp: FreeParams | None = None,
        cache: DerivationCache | None = None,
        report: ConsistencyReport | None = None,
    ):
        self.tol = tol or DEFAULT_TOL
        self.fp = fp if fp is not None else FreeParams.zero()
        self.cache = cache if cache is not None else DerivationCache()
        self.report = report if report is not None else ConsistencyReport()
        self._scale: dict[int, tuple[QTensor, float]] = {}
        self._decomp: dict[int, tuple[QTensor, TensorDecomposition]] = {}
        self.link_gaps: dict[str, float] = {}

    # -- magnitude bookkeeping ---------------------------------------------
    def scale(self, t: QTensor) -> float:
        hit = self._scale.get(id(t))
        if hit is not None and hit[0] is t:
            return hit[1]
        return fro_norm(t)

    def _tag(self, t: QTensor, s: float) -> QTensor:
        self._scale[id(t)] = (t, max(s, fro_norm(t)))
        return t

    def mul(self, *factors: QTensor) -> QTensor:
        out = factors[0]
        s = self.scale(out)
        for f in factors[1:]:
            out = einstein_product(out, f)
            s *= self.scale(f)
        return self._tag(out, s)

    def add(self, *terms: QTensor) -> QTensor:
        out = terms[0]
        for t in terms[1:]:
            out = out + t
        return self._tag(out, sum(self.scale(t) for t in terms))

    def sub(self, a: QTensor, b: QTensor) -> QTensor:
        return self._tag(a - b, self.scale(a) + self.scale(b))

    def neg(self, a: QTensor) -> QTensor:
        return self._tag(-a, self.scale(a))

    def row_block(self, c: QTensor, d: QTensor) -> QTensor:
        return self._tag(row_block(c, d), math.hypot(self.scale(c), self.scale(d)))

    def column_block(self, a: QTensor, b: QTensor) -> QTensor:
        return self._tag(column_block(a, b), math.hypot(self.scale(a), self.scale(b)))

    def eye(self, dims) -> QTensor:
        return identity(dims)

    # -- decompositions -------------------------------------------------------
    def decompose(self, t: QTensor) -> TensorDecomposition:
        hit = self._decomp.get(id(t))
        if hit is not None and hit[0] is t:
            return hit[1]
        d = decompose_matrix(flatten(t), self.tol.rank_tol, scale=self.scale(t))
        rows, cols = t.row_dims, t.col_dims
        out = TensorDecomposition(
            pinv=unflatten(d.pinv, Shape(cols, rows)),
            left=unflatten(d.left, Shape(cols, cols)),
            right=unflatten(d.right, Shape(rows, rows)),
            rank=d.rank,
        )
        self._decomp[id(t)] = (t, out)
        for part in (out.pinv, out.left, out.right):
            self._tag(part, fro_norm(part))
        return out

    def pinv(self, t: QTensor) -> QTensor:
        return self.decompose(t).pinv

    def L(self, t: QTensor) -> QTensor:
        return self.decompose(t).left

    def R(self, t: QTensor) -> QTensor:
        return self.decompose(t).right

    # -- conditions and cache -----------------------------------------------------
    def condition(self, cid: str, label: str, stage: str, *factors: QTensor) -> Condition:
        """Record ``||f1 * f2 * ...|| <= cond * max(1, prod(scales))``."""
        expr = factors[0]
        for f in factors[1:]:
            expr = einstein_product(expr, f)
        residual = fro_norm(expr)
        threshold = self.tol.cond * max(1.0, math.prod(self.scale(f) for f in factors))
        cond = Condition(cid, residual, threshold, bool(residual <= threshold), label, stage)
        self.report.add(cond)
        return cond

    def keep(self, name: str, value: QTensor, stage: str, symbol: str = "") -> QTensor:
        return self.cache.put(name, value, stage, symbol)

    def cache_gap(self, var: str, gap: float) -> None:
        """Remember how far the two expressions of an equated unknown disagree."""
        self.link_gaps[var] = gap

    def draw(self, name: str, rows, cols) -> QTensor:
        t = self.fp.draw(name, rows, cols)
        return self._tag(t, fro_norm(t))


def relative_gap(a: QTensor, b: QTensor) -> float:
    return fro_norm(a - b) / max(1.0, fro_norm(a), fro_norm(b))


def is_zero_tensor(t: QTensor) -> bool:
    return not np.any(t.data)
