"""System specifications, their defining equations, and residual verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import NotEtaHermitianRHS, ParseError, ShapeMismatch
from ..qtensor import QTensor, Shape, einstein_product, eta_conj_transpose, from_json, fro_norm, to_json
from ..quat import EtaAxis
from .types import DEFAULT_TOL, Condition, ConsistencyReport, Solution, Tolerances

VARIANTS = ("single", "ax_yb", "two_term", "quad", "full", "reduced", "eta")

# A term is a product of tokens.  "F1*" denotes the eta-conjugate transpose of
# slot F1 (eta variant only).
Term = tuple[str, ...]


def _chain_equations(g: str, j: str, g4: str, j4: str) -> list[tuple[str, list[Term]]]:
    eqs: list[tuple[str, list[Term]]] = [("E4", [("F4", "Z1", g4)])]
    for i in (1, 2, 3):
        eqs.append((f"E{i}", [(f"F{i}", f"Z{i}", g.format(i)), (f"H{i}", f"Z{i + 1}", j.format(i))]))
    eqs.append(("E5", [("H4", "Z4", j4)]))
    return eqs


def _full_equations() -> list[tuple[str, list[Term]]]:
    eqs: list[tuple[str, list[Term]]] = [("E4", [("F4", "Z1", "G4")])]
    for i in (1, 2, 3):
        eqs.append(
            (
                f"E{i}",
                [
                    (f"A{i}", f"X{i}", f"B{i}"),
                    (f"C{i}", f"Y{i}", f"D{i}"),
                    (f"C{i}", f"F{i}", f"Z{i}", f"G{i}", f"B{i}"),
                    (f"C{i}", f"H{i}", f"Z{i + 1}", f"J{i}", f"B{i}"),
                ],
            )
        )
    eqs.append(("E5", [("H4", "Z4", "J4")]))
    return eqs


EQUATIONS: dict[str, list[tuple[str, list[Term]]]] = {
    "single": [("E", [("A", "X", "B")])],
    "ax_yb": [("E", [("A", "X"), ("Y", "B")])],
    "two_term": [("E", [("C3", "X3", "D3"), ("C4", "X4", "D4")])],
    "quad": [
        (
            "E",
            [
                ("A1", "X1", "B1"),
                ("A2", "X2", "B2"),
                ("A2", "C3", "X3", "D3", "B1"),
                ("A2", "C4", "X4", "D4", "B1"),
            ],
        )
    ],
    "full": _full_equations(),
    "reduced": _chain_equations("G{}", "J{}", "G4", "J4"),
    "eta": _chain_equations("F{}*", "H{}*", "F4*", "H4*"),
}

UNKNOWNS: dict[str, tuple[str, ...]] = {
    "single": ("X",),
    "ax_yb": ("X", "Y"),
    "two_term": ("X3", "X4"),
    "quad": ("X1", "X2", "X3", "X4"),
    "full": ("X1", "X2", "X3", "Y1", "Y2", "Y3", "Z1", "Z2", "Z3", "Z4"),
    "reduced": ("Z1", "Z2", "Z3", "Z4"),
    "eta": ("Z1", "Z2", "Z3", "Z4"),
}


def rhs_names(variant: str) -> list[str]:
    return [name for name, _ in EQUATIONS[variant]]


def coefficient_names(variant: str) -> list[str]:
    """Coefficient slots in order of first appearance (each listed once)."""
    seen: list[str] = []
    unknowns = set(UNKNOWNS[variant])
    for _, terms in EQUATIONS[variant]:
        for term in terms:
            for tok in term:
                base = tok.rstrip("*")
                if base not in unknowns and base not in seen:
                    seen.append(base)
    return seen


def slot_names(variant: str) -> list[str]:
    return coefficient_names(variant) + rhs_names(variant)


def equation_text(rhs: str, terms: list[Term]) -> str:
    return " + ".join(" * ".join(t) for t in terms) + f" = {rhs}"


@dataclass
class SystemSpec:
    variant: str
    tensors: dict[str, QTensor]
    eta: EtaAxis | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {', '.join(VARIANTS)}")
        if self.variant == "eta":
            if self.eta is None:
                raise ValueError("the eta variant needs an eta axis")
            self.eta = EtaAxis.parse(self.eta)
        missing = [s for s in slot_names(self.variant) if s not in self.tensors]
        if missing:
            raise ShapeMismatch(f"{self.variant} spec is missing slots: {', '.join(missing)}")
        self.unknown_shapes()  # raises ShapeMismatch on non-conformable input

    def __getitem__(self, name: str) -> QTensor:
        return self.tensors[name]

    def resolve(self, token: str) -> QTensor:
        if token.endswith("*"):
            return eta_conj_transpose(self.tensors[token[:-1]], self.eta)
        return self.tensors[token]

    def _token_shape(self, token: str) -> Shape:
        t = self.tensors[token.rstrip("*")]
        return t.shape.T if token.endswith("*") else t.shape

    def unknown_shapes(self) -> dict[str, Shape]:
        """Infer every unknown's shape from its neighbours and check conformability."""
        unknowns = set(UNKNOWNS[self.variant])
        found: dict[str, Shape] = {}
        for rhs, terms in EQUATIONS[self.variant]:
            target = self.tensors[rhs].shape
            for term in terms:
                for pos, tok in enumerate(term):
                    if tok not in unknowns:
                        continue
                    rows = self._token_shape(term[pos - 1]).cols if pos > 0 else target.rows
                    cols = self._token_shape(term[pos + 1]).rows if pos + 1 < len(term) else target.cols
                    shape = Shape(rows, cols)
                    if found.setdefault(tok, shape) != shape:
                        raise ShapeMismatch(f"unknown {tok} needs both {found[tok]} and {shape}")
                # dry-run the product on shapes only
                rows = None
                cols = None
                for tok in term:
                    s = found[tok] if tok in unknowns else self._token_shape(tok)
                    if cols is not None and cols != s.rows:
                        raise ShapeMismatch(
                            f"{equation_text(rhs, terms)}: factor {tok} has rows {s.rows}, expected {cols}"
                        )
                    rows = s.rows if rows is None else rows
                    cols = s.cols
                if Shape(rows, cols) != target:
                    raise ShapeMismatch(f"term {' * '.join(term)} has shape {Shape(rows, cols)}, {rhs} is {target}")
        if self.variant == "eta":
            for name, shape in found.items():
                if shape.rows != shape.cols:
                    raise ShapeMismatch(f"eta unknown {name} must be square, got {shape}")
        return found

    def check_eta_rhs(self, tol: Tolerances = DEFAULT_TOL) -> None:
        """Raise :class:`NotEtaHermitianRHS` unless every E is eta-Hermitian."""
        for rhs in rhs_names("eta"):
            e = self.tensors[rhs]
            gap = fro_norm(e - eta_conj_transpose(e, self.eta))
            if gap > tol.cond * max(1.0, fro_norm(e)):
                raise NotEtaHermitianRHS(f"{rhs} is not {self.eta.value}-Hermitian (gap {gap:.3e})")

    def with_tensors(self, **updates: QTensor) -> "SystemSpec":
        tensors = dict(self.tensors)
        tensors.update(updates)
        return SystemSpec(self.variant, tensors, self.eta, dict(self.meta))

    # -- serialisation ---------------------------------------------------------
    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"variant": self.variant}
        if self.eta is not None:
            out["eta"] = self.eta.value
        for name in slot_names(self.variant):
            out[name] = to_json(self.tensors[name])
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj: Any, variant: str | None = None, eta: str | None = None) -> "SystemSpec":
        if not isinstance(obj, dict):
            raise ParseError("spec must be a JSON object mapping slot names to tensors")
        variant = variant or obj.get("variant")
        if variant is None:
            raise ParseError("spec has no 'variant' field and none was given")
        if variant not in VARIANTS:
            raise ParseError(f"unknown variant {variant!r}")
        eta_val = eta or obj.get("eta")
        tensors = {}
        for name in slot_names(variant):
            if name not in obj:
                raise ParseError(f"{name}: slot missing from {variant} spec")
            tensors[name] = from_json(obj[name], name)
        meta = obj.get("meta", {})
        if not isinstance(meta, dict):
            raise ParseError("spec 'meta' must be a JSON object")
        try:
            return cls(variant, tensors, EtaAxis.parse(eta_val) if eta_val else None, dict(meta))
        except ShapeMismatch as exc:
            raise ParseError(f"shape error: {exc}") from exc
        except ValueError as exc:
            raise ParseError(str(exc)) from exc


def evaluate_lhs(spec: SystemSpec, sol: Solution | dict[str, QTensor], rhs: str) -> QTensor:
    values = sol.unknowns if isinstance(sol, Solution) else sol
    terms = dict(EQUATIONS[spec.variant])[rhs]
    total = None
    for term in terms:
        prod = None
        for tok in term:
            t = values[tok] if tok in UNKNOWNS[spec.variant] else spec.resolve(tok)
            prod = t if prod is None else einstein_product(prod, t)
        total = prod if total is None else total + prod
    return total


def verify(spec: SystemSpec, sol: Solution | dict[str, QTensor], tol: Tolerances = DEFAULT_TOL) -> ConsistencyReport:
    """Relative residual ``||LHS - RHS|| / max(1, ||RHS||)`` of every equation."""
    values = sol.unknowns if isinstance(sol, Solution) else sol
    missing = [u for u in UNKNOWNS[spec.variant] if u not in values]
    if missing:
        raise ShapeMismatch(f"solution lacks unknowns: {', '.join(missing)}")
    report = ConsistencyReport(kind="residual")
    for rhs, terms in EQUATIONS[spec.variant]:
        e = spec[rhs]
        gap = fro_norm(evaluate_lhs(spec, values, rhs) - e)
        rel = gap / max(1.0, fro_norm(e))
        report.add(Condition(rhs, rel, tol.residual, bool(rel <= tol.residual), equation_text(rhs, terms), "verify"))
    return report
