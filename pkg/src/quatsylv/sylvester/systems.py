"""Drivers for the coupled systems and the variant dispatchers.

Full system: each middle equation is first reduced to a two-term equation in
``(Z_i, Z_{i+1})`` (eliminating ``X_i, Y_i``).  Together
with the two single equations in ``Z_1`` and ``Z_4`` this is a chain of the
reduced shape, handled by :mod:`.cascade`.  ``X_i, Y_i`` are assembled last
from the right-hand side with both ``Z`` contributions removed.
"""

from __future__ import annotations

from ..errors import Inconsistent
from ..qtensor import QTensor, eta_conj_transpose, scale
from . import cascade
from .primitives import (
    quad_reduce,
    solve_ax_yb,
    solve_axb,
    solve_quad,
    solve_two_term,
    two_term_family,
)
from .system import SystemSpec
from .types import DEFAULT_TOL, ConsistencyReport, DerivationCache, FreeParams, Solution, Tolerances
from .workspace import Workspace

Z_NAMES = ["Z1", "Z2", "Z3", "Z4"]


def _workspace(fp: FreeParams | None, tol: Tolerances | None, kind: str) -> Workspace:
    ws = Workspace(tol or DEFAULT_TOL, (fp or FreeParams.zero()).fresh())
    ws.report.kind = kind
    return ws


def _require(spec: SystemSpec, variant: str) -> None:
    if spec.variant != variant:
        raise ValueError(f"expected a {variant} spec, got {spec.variant}")


# ---------------------------------------------------------------------------
# full system


def _build_full(ws: Workspace, spec: SystemSpec):
    t = spec.tensors
    eqs = [cascade.ChainEq(t["F4"], t["G4"], t["E4"], name="E4")]
    for i in (1, 2, 3):
        red = quad_reduce(
            ws, t[f"A{i}"], t[f"B{i}"], t[f"C{i}"], t[f"D{i}"],
            t[f"F{i}"], t[f"G{i}"], t[f"H{i}"], t[f"J{i}"], t[f"E{i}"],
            cid="3.3", stage=f"eq{i}", prefix=f"eq{i}", symbol_suffix=f"_{i}",
        )
        eqs.append(cascade.ChainEq(red.a_hat1, red.b_hat1, red.e_hat, red.a_hat2, red.b_hat2, name=f"E{i}"))
    eqs.append(cascade.ChainEq(t["H4"], t["J4"], t["E5"], name="E5"))
    return cascade.build(ws, eqs, Z_NAMES, cascade.condition_ids("3"), prefix="cascade")


def check_full(spec: SystemSpec, tol: Tolerances | None = None) -> ConsistencyReport:
    """Every condition of the full system, keyed by condition id."""
    _require(spec, "full")
    ws = _workspace(None, tol, "full")
    _build_full(ws, spec)
    return ws.report


def solve_full(spec: SystemSpec, fp: FreeParams | None = None, tol: Tolerances | None = None):
    """Returns ``(report, solution or None, cache)``."""
    _require(spec, "full")
    ws = _workspace(fp, tol, "full")
    top = _build_full(ws, spec)
    if not ws.report.overall:
        return ws.report, None, ws.cache
    z = cascade.back_substitute(ws, top)
    t = spec.tensors
    unknowns: dict[str, QTensor] = {}
    for i in (1, 2, 3):
        zi, zn = z[i - 1], z[i]
        inner = ws.add(ws.mul(t[f"F{i}"], zi, t[f"G{i}"]), ws.mul(t[f"H{i}"], zn, t[f"J{i}"]))
        e_dot = ws.keep(f"eq{i}.E_dot", ws.sub(t[f"E{i}"], ws.mul(t[f"C{i}"], inner, t[f"B{i}"])),
                        f"eq{i}", f"E-dot_{i}")
        outer = two_term_family(ws, t[f"A{i}"], t[f"B{i}"], t[f"C{i}"], t[f"D{i}"], e_dot,
                                cids=None, stage=f"eq{i}.xy", prefix=f"eq{i}.xy")
        theta = ws.draw(outer.first.theta, *outer.first.theta_dims())
        unknowns[f"X{i}"] = ws.keep(f"X{i}", outer.first.evaluate_free(ws, theta), f"eq{i}.xy")
        unknowns[f"Y{i}"] = ws.keep(f"Y{i}", outer.second.evaluate_free(ws, theta), f"eq{i}.xy")
    for name, value in zip(Z_NAMES, z):
        unknowns[name] = ws.keep(name, value, "cascade")
    ordered = {k: unknowns[k] for k in ("X1", "X2", "X3", "Y1", "Y2", "Y3", *Z_NAMES)}
    return ws.report, Solution(ordered, ws.fp.record()), ws.cache


# ---------------------------------------------------------------------------
# reduced and eta systems


def _reduced_chain(t: dict[str, QTensor]) -> list[cascade.ChainEq]:
    eqs = [cascade.ChainEq(t["F4"], t["G4"], t["E4"], name="E4")]
    for i in (1, 2, 3):
        eqs.append(cascade.ChainEq(t[f"F{i}"], t[f"G{i}"], t[f"E{i}"], t[f"H{i}"], t[f"J{i}"], name=f"E{i}"))
    eqs.append(cascade.ChainEq(t["H4"], t["J4"], t["E5"], name="E5"))
    return eqs


def _run_reduced(tensors, fp, tol, kind: str, ids: str, solve: bool):
    ws = _workspace(fp, tol, kind)
    top = cascade.build(ws, _reduced_chain(tensors), Z_NAMES, cascade.condition_ids(ids), prefix="cascade")
    if not solve or not ws.report.overall:
        return ws, None
    z = cascade.back_substitute(ws, top)
    return ws, {name: ws.keep(name, value, "cascade") for name, value in zip(Z_NAMES, z)}


def check_reduced(spec: SystemSpec, tol: Tolerances | None = None) -> ConsistencyReport:
    _require(spec, "reduced")
    ws, _ = _run_reduced(spec.tensors, None, tol, "reduced", "4", solve=False)
    return ws.report


def solve_reduced(spec: SystemSpec, fp: FreeParams | None = None, tol: Tolerances | None = None):
    """Returns ``(report, solution or None, cache)``."""
    _require(spec, "reduced")
    ws, z = _run_reduced(spec.tensors, fp, tol, "reduced", "4", solve=True)
    if z is None:
        return ws.report, None, ws.cache
    return ws.report, Solution(z, ws.fp.record()), ws.cache


def auxiliary_tensors(spec: SystemSpec) -> dict[str, QTensor]:
    """Reduced-system data with G = F^{eta*} and J = H^{eta*}."""
    t = dict(spec.tensors)
    for i in (1, 2, 3, 4):
        t[f"G{i}"] = eta_conj_transpose(spec[f"F{i}"], spec.eta)
        t[f"J{i}"] = eta_conj_transpose(spec[f"H{i}"], spec.eta)
    return t


def check_eta(spec: SystemSpec, tol: Tolerances | None = None) -> ConsistencyReport:
    _require(spec, "eta")
    spec.check_eta_rhs(tol or DEFAULT_TOL)
    ws, _ = _run_reduced(auxiliary_tensors(spec), None, tol, "eta", "eta", solve=False)
    return ws.report


def solve_eta_cached(spec: SystemSpec, fp: FreeParams | None = None, tol: Tolerances | None = None):
    _require(spec, "eta")
    spec.check_eta_rhs(tol or DEFAULT_TOL)
    ws, z = _run_reduced(auxiliary_tensors(spec), fp, tol, "eta", "eta", solve=True)
    if z is None:
        return ws.report, None, ws.cache
    sym = {}
    for name, zdot in z.items():
        ws.keep(f"{name}.dot", zdot, "eta")
        sym[name] = ws.keep(name, scale(zdot + eta_conj_transpose(zdot, spec.eta), 0.5), "eta")
    return ws.report, Solution(sym, ws.fp.record()), ws.cache


def solve_eta(spec: SystemSpec, fp: FreeParams | None = None, tol: Tolerances | None = None):
    """Eta-Hermitian solution: solve the auxiliary system, then average with the eta-transpose."""
    report, sol, _ = solve_eta_cached(spec, fp, tol)
    return report, sol


# ---------------------------------------------------------------------------
# dispatch over variants


def check(spec: SystemSpec, tol: Tolerances | None = None) -> ConsistencyReport:
    report, _ = _dispatch(spec, None, tol, solve=False)
    return report


def solve(spec: SystemSpec, fp: FreeParams | None = None, tol: Tolerances | None = None):
    """``(report, solution or None)`` for any variant."""
    return _dispatch(spec, fp, tol, solve=True)


def solve_or_raise(spec: SystemSpec, fp: FreeParams | None = None, tol: Tolerances | None = None) -> Solution:
    report, sol = solve(spec, fp, tol)
    if sol is None:
        failing = report.failing()
        raise Inconsistent(report, failing[0].stage if failing else None)
    return sol


def _dispatch(spec: SystemSpec, fp, tol, solve: bool):
    t = spec.tensors
    v = spec.variant
    if v == "full":
        if not solve:
            return check_full(spec, tol), None
        report, sol, _ = solve_full(spec, fp, tol)
    elif v == "reduced":
        if not solve:
            return check_reduced(spec, tol), None
        report, sol, _ = solve_reduced(spec, fp, tol)
    elif v == "eta":
        if not solve:
            return check_eta(spec, tol), None
        report, sol = solve_eta(spec, fp, tol)
    elif v == "single":
        report, sol = solve_axb(t["A"], t["B"], t["E"], fp, tol)
    elif v == "ax_yb":
        report, sol = solve_ax_yb(t["A"], t["B"], t["E"], fp, tol)
    elif v == "two_term":
        report, sol = solve_two_term(t["C3"], t["D3"], t["C4"], t["D4"], t["E"], fp, tol)
    elif v == "quad":
        report, sol = solve_quad(
            t["A1"], t["B1"], t["A2"], t["B2"], t["C3"], t["D3"], t["C4"], t["D4"], t["E"], fp, tol
        )
    else:  # pragma: no cover - SystemSpec validates the variant
        raise ValueError(v)
    return report, (sol if solve else None)
