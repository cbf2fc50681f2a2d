"""Staged elimination for chains of coupled two-sided equations.

A *chain* has unknowns ``u_1 .. u_n`` and ``n + 1`` equations::

    S_0:  A_0 u_1 B_0 = E_0
    T_k:  P_k u_k Q_k + R_k u_{k+1} S_k = E_k        (k = 1 .. n-1)
    S_n:  A_n u_n B_n = E_n

Both reduced systems and the Z-part of the full system have this shape with
``n = 4``.  One elimination level works as follows:

1. write the general solution of every equation; each ``T_k`` contributes a
   parameter ``theta_k`` shared by its two unknowns;
2. every ``u_k`` now has two expressions (from the equation on its left and
   the one on its right).  Equating them gives ``A X + Y B = c + terms in
   theta``, where ``X`` and ``Y`` collect the private parameters;
3. that equation is solvable iff ``R_A (...) L_B = 0``, which is again a
   single or two-term equation in the thetas.  Listing those conditions for
   ``u_n, u_{n-1}, .., u_1`` yields a chain of length ``n - 1``.

Recursion stops at ``n = 1`` where equating the two single-equation
solutions leaves a constant condition.  Back-substitution runs the other
way: thetas from the level below, then private parameters from each
``A X + Y B`` equation, then the unknowns themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..qtensor import QTensor, split_column_block, split_row_block
from .primitives import Family, ax_yb_condition, ax_yb_solve, single_family, two_term_family
from .workspace import Workspace, relative_gap


@dataclass
class ChainEq:
    """``a u b = e`` (single) or ``a u_k b + c u_{k+1} d = e`` (pair)."""

    a: QTensor
    b: QTensor
    e: QTensor
    c: QTensor | None = None
    d: QTensor | None = None
    name: str = ""

    @property
    def is_pair(self) -> bool:
        return self.c is not None


# ids(level, role) -> condition id(s); role is "single", "pair" or "terminal"
IdScheme = Callable[[int, str], tuple[str, ...]]


def condition_ids(prefix: str) -> IdScheme:
    """Condition numbering: full system ("3"), reduced ("4") or eta-Hermitian ("eta")."""
    if prefix == "eta":
        # the eta-Hermitian conditions reuse fewer ids for the auxiliary system
        table = {
            (0, "single"): ("4.23", "4.23"),
            (0, "pair"): ("4.22", "4.22"),
            (1, "single"): ("4.23", "4.23"),
            (1, "pair"): ("4.24", "4.25"),
            (2, "single"): ("4.28", "4.28"),
            (2, "pair"): ("4.26", "4.27"),
            (3, "single"): ("4.28", "4.29"),
            (4, "terminal"): ("4.29",),
        }
    elif prefix == "3":
        table = {
            (0, "single"): ("3.6", "3.6"),
            (0, "pair"): ("3.4", "3.5"),
            (1, "single"): ("3.7", "3.7"),
            (1, "pair"): ("3.8", "3.9"),
            (2, "single"): ("3.12", "3.12"),
            (2, "pair"): ("3.10", "3.11"),
            (3, "single"): ("3.13", "3.13"),
            (4, "terminal"): ("3.14",),
        }
    else:
        table = {
            (0, "single"): ("4.5", "4.5"),
            (0, "pair"): ("4.3", "4.4"),
            (1, "single"): ("4.6", "4.6"),
            (1, "pair"): ("4.7", "4.8"),
            (2, "single"): ("4.11", "4.11"),
            (2, "pair"): ("4.9", "4.10"),
            (3, "single"): ("4.12", "4.12"),
            (4, "terminal"): ("4.13",),
        }

    def ids(level: int, role: str) -> tuple[str, ...]:
        hit = table.get((level, role))
        if hit is not None:
            return hit
        base = f"{prefix}.L{level}.{role}"
        return (base,) if role == "terminal" else (base, base)

    return ids


# Conventional symbols of the shared parameters in a length-4 chain, by level/position.
_THETA_SYMBOLS = {
    1: {1: "U^2", 2: "V^2", 3: "K^2"},
    2: {1: "Q55", 2: "P44"},
    3: {1: "K44"},
}


@dataclass
class Link:
    """Equated expressions of one unknown: ``A [a_l; a_r] + [b_l, b_r] B = c + ...``."""

    var: str
    left: Family
    right: Family
    a: QTensor
    b: QTensor
    c: QTensor
    left_theta: int | None  # index k of the theta carried by ``left``
    right_theta: int | None
    prefix: str


@dataclass
class Level:
    index: int
    names: list[str]
    links: list[Link] = field(default_factory=list)
    child: "Level | None" = None
    symbols: dict[str, str] = field(default_factory=dict)


def build(ws: Workspace, eqs: list[ChainEq], names: list[str], ids: IdScheme, level: int = 0,
          prefix: str = "chain", named_symbols: bool | None = None) -> Level:
    """Record every condition of the chain and all levels below it."""
    n = len(names)
    if len(eqs) != n + 1 or n < 1:
        raise ValueError("a chain with n unknowns needs n + 1 equations")
    stage = f"{prefix}.L{level}"
    lvl = Level(level, list(names))
    if named_symbols is None:
        named_symbols = n == 4

    # general solutions; left_fam[k] / right_fam[k] are the expressions of u_k
    left_fam: dict[int, Family] = {}
    right_fam: dict[int, Family] = {}
    for pos, eq in enumerate(eqs):
        tag = f"{stage}.eq{pos}"
        if eq.is_pair:
            tt = two_term_family(ws, eq.a, eq.b, eq.c, eq.d, eq.e, cids=ids(level, "pair"), stage=tag, prefix=tag)
            right_fam[pos] = tt.first  # u_pos, theta_pos
            left_fam[pos + 1] = tt.second  # u_{pos+1}, theta_pos
        else:
            fam = single_family(ws, eq.a, eq.b, eq.e, cids=ids(level, "single"), stage=tag,
                                params=(f"{tag}.W1", f"{tag}.W2"))
            if pos == 0:
                left_fam[1] = fam
            else:
                right_fam[n] = fam

    next_eqs: list[ChainEq] = []
    for k in range(n, 0, -1):
        lf, rf = left_fam[k], right_fam[k]
        tag = f"{stage}.link[{names[k - 1]}]"
        a = ws.row_block(lf.left, ws.neg(rf.left))
        b = ws.column_block(lf.right, ws.neg(rf.right))
        c = ws.sub(rf.const, lf.const)
        ws.keep(f"{tag}.A", a, tag, "A")
        ws.keep(f"{tag}.B", b, tag, "B")
        ws.keep(f"{tag}.E", c, tag, "E")
        link = Link(names[k - 1], lf, rf, a, b, c,
                    k - 1 if lf.theta is not None else None,
                    k if rf.theta is not None else None, tag)
        lvl.links.append(link)
        ra, lb = ws.R(a), ws.L(b)
        rhs = ws.neg(ws.mul(ra, c, lb))
        ws.keep(f"{tag}.E^", rhs, tag, "E^")
        terms = []
        if rf.theta is not None:
            terms.append((ws.mul(ra, rf.link_left), ws.mul(rf.link_right, lb)))
        if lf.theta is not None:
            terms.append((ws.neg(ws.mul(ra, lf.link_left)), ws.mul(lf.link_right, lb)))
        if not terms:
            cid = ids(level + 1, "terminal")[0]
            ax_yb_condition(ws, a, b, c, cid=cid, stage=tag, label=f"R_A * E * L_B at {names[k - 1]}")
            continue
        for i, (tl, tr) in enumerate(terms):
            ws.keep(f"{tag}.coef{i}.left", tl, tag)
            ws.keep(f"{tag}.coef{i}.right", tr, tag)
        if len(terms) == 2:
            next_eqs.append(ChainEq(terms[0][0], terms[0][1], rhs, terms[1][0], terms[1][1], name=tag))
        else:
            next_eqs.append(ChainEq(terms[0][0], terms[0][1], rhs, name=tag))

    if n >= 2:
        # unknowns of the next level: theta_{n-1}, ..., theta_1
        theta_names = [f"{stage}.eq{k}.U2" for k in range(n - 1, 0, -1)]
        lvl.child = build(ws, next_eqs, theta_names, ids, level + 1, prefix, named_symbols)
        if named_symbols:
            symbols = _THETA_SYMBOLS.get(level + 1, {})
            lvl.child.symbols = {theta_names[j]: symbols.get(j + 1, "") for j in range(len(theta_names))}
    return lvl


def back_substitute(ws: Workspace, lvl: Level, thetas: dict[int, QTensor] | None = None) -> list[QTensor]:
    """Values of the level's unknowns given the thetas of its pair equations.

    ``thetas`` maps ``k`` (pair equation ``T_k``) to its shared parameter; the
    top-level call passes ``None`` and the thetas come from the child level.
    """
    n = len(lvl.names)
    if thetas is None:
        thetas = {}
        if lvl.child is not None:
            values = back_substitute(ws, lvl.child)
            # child unknown j (0-based) is theta_{n-1-j}
            thetas = {n - 1 - j: v for j, v in enumerate(values)}
    out: dict[int, QTensor] = {}
    for link in lvl.links:
        k = lvl.names.index(link.var) + 1
        rhs_terms = [link.c]
        if link.right_theta is not None:
            th = thetas[link.right_theta]
            rhs_terms.append(ws.mul(link.right.link_left, th, link.right.link_right))
        if link.left_theta is not None:
            th = thetas[link.left_theta]
            rhs_terms.append(ws.neg(ws.mul(link.left.link_left, th, link.left.link_right)))
        rhs = ws.add(*rhs_terms)
        x, y = ax_yb_solve(ws, link.a, link.b, rhs, prefix=f"{link.prefix}")
        alpha_l, alpha_r = split_column_block(x, link.left.left.col_dims)
        beta_l, beta_r = split_row_block(y, link.left.right.row_dims)
        th_l = thetas.get(link.left_theta) if link.left_theta is not None else None
        th_r = thetas.get(link.right_theta) if link.right_theta is not None else None
        u_left = link.left.evaluate(ws, alpha_l, beta_l, th_l)
        u_right = link.right.evaluate(ws, alpha_r, beta_r, th_r)
        ws.keep(f"{link.prefix}.value", u_left, link.prefix)
        ws.keep(f"{link.prefix}.value_from_right", u_right, link.prefix)
        ws.cache_gap(link.var, relative_gap(u_left, u_right))
        out[k] = u_left
    return [out[k] for k in range(1, n + 1)]
