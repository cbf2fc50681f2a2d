"""General solutions of the elementary equation classes.

Each builder records its consistency conditions in the workspace report and
returns *families*: an unknown written as

    const + Lp * alpha + beta * Rp  (+ Lt * theta * Rt)

where ``alpha`` and ``beta`` are private free parameters and ``theta`` is the
parameter a two-term equation shares between its two unknowns.  The cascade
equates families; the public ``solve_*`` functions simply draw every
parameter from a :class:`FreeParams`.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..qtensor import QTensor
from .types import DEFAULT_TOL, ConsistencyReport, FreeParams, Solution, Tolerances
from .workspace import Workspace


@dataclass
class Family:
    """Parametrised general solution of one unknown."""

    const: QTensor
    left: QTensor  # multiplies alpha from the left
    alpha: str
    right: QTensor  # multiplies beta from the right
    beta: str
    link_left: QTensor | None = None
    link_right: QTensor | None = None
    theta: str | None = None

    @property
    def rows(self):
        return self.const.row_dims

    @property
    def cols(self):
        return self.const.col_dims

    def alpha_dims(self):
        return self.left.col_dims, self.cols

    def beta_dims(self):
        return self.rows, self.right.row_dims

    def theta_dims(self):
        return self.link_left.col_dims, self.link_right.row_dims

    def evaluate(self, ws: Workspace, alpha: QTensor, beta: QTensor, theta: QTensor | None = None) -> QTensor:
        terms = [self.const, ws.mul(self.left, alpha), ws.mul(beta, self.right)]
        if self.theta is not None:
            terms.append(ws.mul(self.link_left, theta, self.link_right))
        return ws.add(*terms)

    def evaluate_free(self, ws: Workspace, theta: QTensor | None = None) -> QTensor:
        """Evaluate with ``alpha``/``beta`` (and ``theta`` unless given) drawn from ``ws.fp``."""
        alpha = ws.draw(self.alpha, *self.alpha_dims())
        beta = ws.draw(self.beta, *self.beta_dims())
        if self.theta is not None and theta is None:
            theta = ws.draw(self.theta, *self.theta_dims())
        return self.evaluate(ws, alpha, beta, theta)


# ---------------------------------------------------------------------------
# A * X * B = E


def single_family(
    ws: Workspace,
    a: QTensor,
    b: QTensor,
    e: QTensor,
    *,
    cids: tuple[str, str],
    stage: str,
    params: tuple[str, str],
) -> Family:
    """``cids`` labels the left-side and right-side conditions."""
    ws.condition(cids[0], "R_A * E", stage, ws.R(a), e)
    ws.condition(cids[1], "E * L_B", stage, e, ws.L(b))
    const = ws.mul(ws.pinv(a), e, ws.pinv(b))
    return Family(const, ws.L(a), params[0], ws.R(b), params[1])


# ---------------------------------------------------------------------------
# C3 * X3 * D3 + C4 * X4 * D4 = E


@dataclass
class TwoTerm:
    first: Family  # X3
    second: Family  # X4
    m_hat: QTensor
    n_hat: QTensor
    s_hat: QTensor


def two_term_family(
    ws: Workspace,
    c3: QTensor,
    d3: QTensor,
    c4: QTensor,
    d4: QTensor,
    e: QTensor,
    *,
    cids: tuple[str, str] | None,
    stage: str,
    prefix: str,
) -> TwoTerm:
    """General solution pair; ``cids=None`` skips condition recording."""
    m_hat = ws.mul(ws.R(c3), c4)
    n_hat = ws.mul(d4, ws.L(d3))
    s_hat = ws.mul(c4, ws.L(m_hat))
    for sym, t in (("M^", m_hat), ("N^", n_hat), ("S^", s_hat)):
        ws.keep(f"{prefix}.{sym}", t, stage, sym)
    if cids is not None:
        ws.condition(cids[0], "R_M^ * R_C3 * E", stage, ws.R(m_hat), ws.R(c3), e)
        ws.condition(cids[0], "E * L_D3 * L_N^", stage, e, ws.L(d3), ws.L(n_hat))
        ws.condition(cids[1], "R_C3 * E * L_D4", stage, ws.R(c3), e, ws.L(d4))
        ws.condition(cids[1], "R_C4 * E * L_D3", stage, ws.R(c4), e, ws.L(d3))

    c3p, d3p, c4p, d4p = ws.pinv(c3), ws.pinv(d3), ws.pinv(c4), ws.pinv(d4)
    mp, np_, sp = ws.pinv(m_hat), ws.pinv(n_hat), ws.pinv(s_hat)

    # X3 = C3+ E D3+ - C3+ C4 M^+ E D3+ - C3+ S^ C4+ E N^+ D4 D3+
    #      - C3+ S^ U2 R_N^ D4 D3+ + L_C3 U4 + U5 R_D3
    x3_const = ws.add(
        ws.mul(c3p, e, d3p),
        ws.neg(ws.mul(c3p, c4, mp, e, d3p)),
        ws.neg(ws.mul(c3p, s_hat, c4p, e, np_, d4, d3p)),
    )
    first = Family(
        x3_const,
        ws.L(c3),
        f"{prefix}.U4",
        ws.R(d3),
        f"{prefix}.U5",
        link_left=ws.neg(ws.mul(c3p, s_hat)),
        link_right=ws.mul(ws.R(n_hat), d4, d3p),
        theta=f"{prefix}.U2",
    )
    # X4 = M^+ E D4+ + S^+ S^ C4+ E N^+ + L_M^ L_S^ U1 + L_M^ U2 R_N^ + U3 R_D4
    x4_const = ws.add(ws.mul(mp, e, d4p), ws.mul(sp, s_hat, c4p, e, np_))
    second = Family(
        x4_const,
        ws.mul(ws.L(m_hat), ws.L(s_hat)),
        f"{prefix}.U1",
        ws.R(d4),
        f"{prefix}.U3",
        link_left=ws.L(m_hat),
        link_right=ws.R(n_hat),
        theta=f"{prefix}.U2",
    )
    return TwoTerm(first, second, m_hat, n_hat, s_hat)


# ---------------------------------------------------------------------------
# A * X + Y * B = E


def ax_yb_condition(ws: Workspace, a: QTensor, b: QTensor, e: QTensor, *, cid: str, stage: str, label: str = "R_A * E * L_B"):
    return ws.condition(cid, label, stage, ws.R(a), e, ws.L(b))


def ax_yb_solve(ws: Workspace, a: QTensor, b: QTensor, e: QTensor, *, prefix: str) -> tuple[QTensor, QTensor]:
    """X = A+ E - V1 B + L_A V2,  Y = R_A E B+ + A V1 + V3 R_B."""
    v1 = ws.draw(f"{prefix}.V1", a.col_dims, b.row_dims)
    v2 = ws.draw(f"{prefix}.V2", a.col_dims, e.col_dims)
    v3 = ws.draw(f"{prefix}.V3", e.row_dims, b.row_dims)
    ap, bp = ws.pinv(a), ws.pinv(b)
    x = ws.add(ws.mul(ap, e), ws.neg(ws.mul(v1, b)), ws.mul(ws.L(a), v2))
    y = ws.add(ws.mul(ws.R(a), e, bp), ws.mul(a, v1), ws.mul(v3, ws.R(b)))
    return x, y


# ---------------------------------------------------------------------------
# A1 X1 B1 + A2 X2 B2 + A2 (C3 X3 D3 + C4 X4 D4) B1 = E


@dataclass
class QuadTerm:
    inner: TwoTerm  # X3, X4
    a1: QTensor
    b1: QTensor
    a2: QTensor
    b2: QTensor
    c3: QTensor
    d3: QTensor
    c4: QTensor
    d4: QTensor
    e: QTensor
    prefix: str
    stage: str

    def outer(self, ws: Workspace, x3: QTensor, x4: QTensor) -> TwoTerm:
        """Families of X1, X2 once X3, X4 are fixed (right-hand side E-dot)."""
        inner_term = ws.add(ws.mul(self.c3, x3, self.d3), ws.mul(self.c4, x4, self.d4))
        e_dot = ws.sub(self.e, ws.mul(self.a2, inner_term, self.b1))
        ws.keep(f"{self.prefix}.E_dot", e_dot, self.stage, "E-dot")
        return two_term_family(
            ws, self.a1, self.b1, self.a2, self.b2, e_dot, cids=None, stage=self.stage, prefix=f"{self.prefix}.outer"
        )


@dataclass
class Reduction:
    """Coefficients of the inner two-term equation left after eliminating X1, X2."""

    a_hat1: QTensor
    b_hat1: QTensor
    a_hat2: QTensor
    b_hat2: QTensor
    e_hat: QTensor


def quad_reduce(ws: Workspace, a1, b1, a2, b2, c3, d3, c4, d4, e, *, cid: str, stage: str,
                   prefix: str, symbol_suffix: str = "") -> Reduction:
    """Record the three outer conditions and build the inner equation's data."""
    sfx = symbol_suffix
    m1 = ws.keep(f"{prefix}.M", ws.mul(ws.R(a1), a2), stage, "M" + sfx)
    n1 = ws.keep(f"{prefix}.N", ws.mul(b2, ws.L(b1)), stage, "N" + sfx)
    ws.keep(f"{prefix}.S", ws.mul(a2, ws.L(m1)), stage, "S" + sfx)
    ws.condition(cid, "R_M * R_A1 * E", stage, ws.R(m1), ws.R(a1), e)
    ws.condition(cid, "E * L_B1 * L_N", stage, e, ws.L(b1), ws.L(n1))
    ws.condition(cid, "R_A2 * E * L_B1", stage, ws.R(a2), e, ws.L(b1))
    lb2 = ws.L(b2)
    return Reduction(
        a_hat1=ws.keep(f"{prefix}.A^1", ws.mul(m1, c3), stage, "A^" + sfx),
        b_hat1=ws.keep(f"{prefix}.B^1", ws.mul(d3, b1, lb2), stage, "B^" + sfx),
        a_hat2=ws.keep(f"{prefix}.A^2", ws.mul(m1, c4), stage, "C^" + sfx),
        b_hat2=ws.keep(f"{prefix}.B^2", ws.mul(d4, b1, lb2), stage, "D^" + sfx),
        e_hat=ws.keep(f"{prefix}.E^", ws.mul(ws.R(a1), e, lb2), stage, "E^" + sfx),
    )


def quad_family(
    ws: Workspace,
    a1: QTensor,
    b1: QTensor,
    a2: QTensor,
    b2: QTensor,
    c3: QTensor,
    d3: QTensor,
    c4: QTensor,
    d4: QTensor,
    e: QTensor,
    *,
    cids: tuple[str, str, str],
    stage: str,
    prefix: str,
) -> QuadTerm:
    """Record the seven conditions; ``cids`` = (outer, inner-first, inner-second)."""
    red = quad_reduce(ws, a1, b1, a2, b2, c3, d3, c4, d4, e, cid=cids[0], stage=stage, prefix=prefix)
    inner = two_term_family(
        ws, red.a_hat1, red.b_hat1, red.a_hat2, red.b_hat2, red.e_hat,
        cids=(cids[1], cids[2]), stage=stage, prefix=f"{prefix}.inner",
    )
    return QuadTerm(inner, a1, b1, a2, b2, c3, d3, c4, d4, e, prefix, stage)


# ---------------------------------------------------------------------------
# public entry points


def _start(fp: FreeParams | None, tol: Tolerances | None, kind: str) -> Workspace:
    ws = Workspace(tol or DEFAULT_TOL, (fp or FreeParams.zero()).fresh())
    ws.report.kind = kind
    return ws


def _finish(ws: Workspace, unknowns: dict[str, QTensor]) -> tuple[ConsistencyReport, Solution | None]:
    if not ws.report.overall:
        return ws.report, None
    return ws.report, Solution(unknowns, ws.fp.record())


def solve_axb(a, b, e, fp: FreeParams | None = None, tol: Tolerances | None = None):
    """Solve ``A * X * B = E``; returns ``(report, solution or None)``."""
    ws = _start(fp, tol, "single")
    fam = single_family(ws, a, b, e, cids=("3.6", "3.6"), stage="single", params=("W1", "W2"))
    if not ws.report.overall:
        return ws.report, None
    return _finish(ws, {"X": fam.evaluate_free(ws)})


def solve_ax_yb(a, b, e, fp: FreeParams | None = None, tol: Tolerances | None = None):
    """Solve ``A * X + Y * B = E``; returns ``(report, solution or None)``."""
    ws = _start(fp, tol, "ax_yb")
    ax_yb_condition(ws, a, b, e, cid="3.14", stage="ax_yb")
    if not ws.report.overall:
        return ws.report, None
    x, y = ax_yb_solve(ws, a, b, e, prefix="ax_yb")
    return _finish(ws, {"X": x, "Y": y})


def solve_two_term(c3, d3, c4, d4, e, fp: FreeParams | None = None, tol: Tolerances | None = None):
    """Solve ``C3 * X3 * D3 + C4 * X4 * D4 = E``."""
    ws = _start(fp, tol, "two_term")
    tt = two_term_family(ws, c3, d3, c4, d4, e, cids=("4.3", "4.4"), stage="two_term", prefix="two_term")
    if not ws.report.overall:
        return ws.report, None
    theta = ws.draw(tt.first.theta, *tt.first.theta_dims())
    x3 = tt.first.evaluate_free(ws, theta)
    x4 = tt.second.evaluate_free(ws, theta)
    return _finish(ws, {"X3": x3, "X4": x4})


def solve_quad(a1, b1, a2, b2, c3, d3, c4, d4, e, fp: FreeParams | None = None, tol: Tolerances | None = None):
    """Solve ``A1 X1 B1 + A2 X2 B2 + A2 (C3 X3 D3 + C4 X4 D4) B1 = E``."""
    ws = _start(fp, tol, "quad")
    lem = quad_family(
        ws, a1, b1, a2, b2, c3, d3, c4, d4, e, cids=("3.3", "3.4", "3.5"), stage="quad", prefix="quad"
    )
    if not ws.report.overall:
        return ws.report, None
    unknowns = quad_evaluate(ws, lem)
    return _finish(ws, unknowns)


def quad_evaluate(ws: Workspace, lem: QuadTerm, x3: QTensor | None = None, x4: QTensor | None = None,
                     names: tuple[str, str, str, str] = ("X1", "X2", "X3", "X4")) -> dict[str, QTensor]:
    """Draw free parameters (or use the given X3, X4) and assemble all four unknowns."""
    if x3 is None or x4 is None:
        theta = ws.draw(lem.inner.first.theta, *lem.inner.first.theta_dims())
        x3 = lem.inner.first.evaluate_free(ws, theta)
        x4 = lem.inner.second.evaluate_free(ws, theta)
    outer = lem.outer(ws, x3, x4)
    theta = ws.draw(outer.first.theta, *outer.first.theta_dims())
    x1 = outer.first.evaluate_free(ws, theta)
    x2 = outer.second.evaluate_free(ws, theta)
    return {names[0]: x1, names[1]: x2, names[2]: x3, names[3]: x4}
