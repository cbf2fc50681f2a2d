"""Bundled fixtures and random instance generation.

Consistent instances come from a forward oracle: coefficients and a
ground-truth solution are drawn first and every right-hand side is computed by
evaluating the defining equations.  Inconsistent instances add a unit-norm
perturbation to one right-hand side that lies in the range of a projector
annihilating every left-hand-side term of that equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import jsonio
from .errors import NoNullSpace, ShapeMismatch, UnknownFixture
from .pinv import complex_adjoint, decompose, from_complex_adjoint
from .qtensor import (
    QTensor,
    Shape,
    eta_conj_transpose,
    flatten,
    fro_norm,
    random_qtensor,
    unflatten,
)
from .quat import EtaAxis
from .sylvester.system import UNKNOWNS, SystemSpec, coefficient_names, evaluate_lhs, rhs_names
from .sylvester.types import Solution

DATA_DIR = Path(__file__).resolve().parent / "data"
FIXTURES = ("example-3.3",)

# ---------------------------------------------------------------------------
# shapes

# Each slot is (row index set, column index set).  Index sets are symbolic
# names; a ShapeProfile assigns mode dimensions to them, which makes every
# generated spec conformable by construction.
IndexPair = tuple[str, str]


def _full_table() -> dict[str, IndexPair]:
    t: dict[str, IndexPair] = {
        "F4": ("e4", "z1"), "G4": ("w1", "f4"), "E4": ("e4", "f4"),
        "H4": ("e5", "z4"), "J4": ("w4", "f5"), "E5": ("e5", "f5"),
    }
    for i in (1, 2, 3):
        t.update({
            f"A{i}": (f"r{i}", f"a{i}"), f"X{i}": (f"a{i}", f"b{i}"), f"B{i}": (f"b{i}", f"s{i}"),
            f"C{i}": (f"r{i}", f"c{i}"), f"Y{i}": (f"c{i}", f"d{i}"), f"D{i}": (f"d{i}", f"s{i}"),
            f"F{i}": (f"c{i}", f"z{i}"), f"G{i}": (f"w{i}", f"b{i}"),
            f"H{i}": (f"c{i}", f"z{i + 1}"), f"J{i}": (f"w{i + 1}", f"b{i}"),
            f"E{i}": (f"r{i}", f"s{i}"),
        })
    for k in (1, 2, 3, 4):
        t[f"Z{k}"] = (f"z{k}", f"w{k}")
    return t


def _reduced_table() -> dict[str, IndexPair]:
    t: dict[str, IndexPair] = {
        "F4": ("e4", "z1"), "G4": ("w1", "f4"), "E4": ("e4", "f4"),
        "H4": ("e5", "z4"), "J4": ("w4", "f5"), "E5": ("e5", "f5"),
    }
    for i in (1, 2, 3):
        t.update({
            f"F{i}": (f"r{i}", f"z{i}"), f"G{i}": (f"w{i}", f"s{i}"),
            f"H{i}": (f"r{i}", f"z{i + 1}"), f"J{i}": (f"w{i + 1}", f"s{i}"),
            f"E{i}": (f"r{i}", f"s{i}"),
        })
    for k in (1, 2, 3, 4):
        t[f"Z{k}"] = (f"z{k}", f"w{k}")
    return t


def _eta_table() -> dict[str, IndexPair]:
    t: dict[str, IndexPair] = {"F4": ("e4", "z1"), "E4": ("e4", "e4"), "H4": ("e5", "z4"), "E5": ("e5", "e5")}
    for i in (1, 2, 3):
        t.update({f"F{i}": (f"r{i}", f"z{i}"), f"H{i}": (f"r{i}", f"z{i + 1}"), f"E{i}": (f"r{i}", f"r{i}")})
    for k in (1, 2, 3, 4):
        t[f"Z{k}"] = (f"z{k}", f"z{k}")
    return t


SHAPE_TABLES: dict[str, dict[str, IndexPair]] = {
    "single": {"A": ("r", "p"), "X": ("p", "q"), "B": ("q", "s"), "E": ("r", "s")},
    "ax_yb": {"A": ("r", "p"), "X": ("p", "s"), "Y": ("r", "q"), "B": ("q", "s"), "E": ("r", "s")},
    "two_term": {
        "C3": ("r", "p3"), "X3": ("p3", "q3"), "D3": ("q3", "s"),
        "C4": ("r", "p4"), "X4": ("p4", "q4"), "D4": ("q4", "s"),
        "E": ("r", "s"),
    },
    "quad": {
        "A1": ("r", "p1"), "X1": ("p1", "q1"), "B1": ("q1", "s"),
        "A2": ("r", "t"), "X2": ("t", "q2"), "B2": ("q2", "s"),
        "C3": ("t", "p3"), "X3": ("p3", "q3"), "D3": ("q3", "q1"),
        "C4": ("t", "p4"), "X4": ("p4", "q4"), "D4": ("q4", "q1"),
        "E": ("r", "s"),
    },
    "full": _full_table(),
    "reduced": _reduced_table(),
    "eta": _eta_table(),
}


@dataclass(frozen=True)
class ShapeProfile:
    """Mode dimensions for the index sets of one variant's shape table.

    ``dims`` overrides individual index sets; all others get ``default``.
    ``deficiency_prob`` is the chance that a drawn coefficient is truncated
    to a lower rank.
    """

    default: tuple[int, ...] = (2, 2)
    dims: dict[str, tuple[int, ...]] = field(default_factory=dict)
    deficiency_prob: float = 0.5

    def __post_init__(self):
        for label, d in (("default", self.default), *self.dims.items()):
            if not d or any(int(x) < 1 for x in d):
                raise ShapeMismatch(f"index set {label} needs positive mode dimensions, got {d}")
        if not 0.0 <= self.deficiency_prob <= 1.0:
            raise ValueError("deficiency_prob must lie in [0, 1]")

    def index_dims(self, index: str) -> tuple[int, ...]:
        return tuple(self.dims.get(index, self.default))

    def shapes(self, variant: str) -> dict[str, Shape]:
        if variant not in SHAPE_TABLES:
            raise ValueError(f"unknown variant {variant!r}")
        return {
            name: Shape(self.index_dims(r), self.index_dims(c))
            for name, (r, c) in SHAPE_TABLES[variant].items()
        }


DEFAULT_PROFILE = ShapeProfile()

# ---------------------------------------------------------------------------
# forward oracle


def truncate_rank(t: QTensor, rank: int) -> QTensor:
    """Best rank-``rank`` approximation: keep the leading singular values of the flattening."""
    m = flatten(t)
    u, s, vh = np.linalg.svd(complex_adjoint(m), full_matrices=False)
    keep = 2 * rank  # singular values of the complex adjoint come in equal pairs
    chi = (u[:, :keep] * s[:keep]) @ vh[:keep]
    return unflatten(from_complex_adjoint(chi), t.shape)


def _draw_coefficient(rng: np.random.Generator, shape: Shape, prob: float) -> QTensor:
    t = random_qtensor(rng, shape.rows, shape.cols)
    top = min(shape.total_rows, shape.total_cols)
    if top >= 2 and rng.random() < prob:
        t = truncate_rank(t, int(rng.integers(1, top)))
    return t


def generate_consistent(
    variant: str,
    profile: ShapeProfile = DEFAULT_PROFILE,
    seed: int = 0,
    eta: EtaAxis | str = "i",
) -> tuple[SystemSpec, Solution]:
    """A random spec together with a solution it is built to satisfy."""
    shapes = profile.shapes(variant)
    rng = np.random.default_rng(seed)
    axis = EtaAxis.parse(eta) if variant == "eta" else None
    tensors = {name: _draw_coefficient(rng, shapes[name], profile.deficiency_prob) for name in coefficient_names(variant)}
    unknowns = {}
    for name in UNKNOWNS[variant]:
        z = random_qtensor(rng, shapes[name].rows, shapes[name].cols)
        if axis is not None:
            z = (z + eta_conj_transpose(z, axis)) * 0.5
        unknowns[name] = z
    # Right-hand sides are placeholders until the forward evaluation below.
    for name in rhs_names(variant):
        tensors[name] = QTensor(np.zeros(shapes[name].rows + shapes[name].cols + (4,)), shapes[name].rows, shapes[name].cols)
    spec = SystemSpec(variant, tensors, axis, {"generator": "forward", "seed": int(seed)})
    forward = with_forward_rhs(spec, unknowns)
    return forward, Solution(unknowns)


def with_forward_rhs(spec: SystemSpec, unknowns: Solution | dict[str, QTensor]) -> SystemSpec:
    """Replace every right-hand side by the left-hand side evaluated at ``unknowns``."""
    updates = {}
    for name in rhs_names(spec.variant):
        e = evaluate_lhs(spec, unknowns, name)
        if spec.eta is not None:
            e = (e + eta_conj_transpose(e, spec.eta)) * 0.5  # drop rounding asymmetry
        updates[name] = e
    return spec.with_tensors(**updates)


# ---------------------------------------------------------------------------
# negative instances

# For each right-hand side: the coefficients that start every left-hand-side
# term, then the ones that end every term.  A perturbation in the cokernel of
# the first group (or the kernel of the second) cannot be absorbed.
def _factor_groups(variant: str, rhs: str) -> tuple[list[str], list[str]]:
    if variant == "single":
        return ["A"], ["B"]
    if variant == "two_term":
        return ["C3", "C4"], ["D3", "D4"]
    if variant == "quad":
        return ["A1", "A2"], ["B1", "B2"]
    if rhs == "E4":
        return ["F4"], ["G4"]
    if rhs == "E5":
        return ["H4"], ["J4"]
    i = rhs[1:]
    if variant == "full":
        return [f"A{i}", f"C{i}"], [f"B{i}", f"D{i}"]
    return [f"F{i}", f"H{i}"], [f"G{i}", f"J{i}"]


def _stack_rows(ts: list[QTensor]) -> QTensor:
    """Concatenate the flattenings side by side: the range of every term."""
    m = np.concatenate([flatten(t) for t in ts], axis=1)
    return QTensor.from_matrix(m, ts[0].row_dims, (m.shape[1],))


def _stack_cols(ts: list[QTensor]) -> QTensor:
    m = np.concatenate([flatten(t) for t in ts], axis=0)
    return QTensor.from_matrix(m, (m.shape[0],), ts[0].col_dims)


def _unit(t: QTensor) -> QTensor | None:
    n = fro_norm(t)
    return None if n < 1e-8 else t * (1.0 / n)


SIDES = ("auto", "left", "right")


def perturbation(spec: SystemSpec, rhs: str, rng: np.random.Generator, side: str = "auto") -> QTensor | None:
    """A unit-norm tensor no choice of unknowns can produce in equation ``rhs``, or None.

    ``side="left"`` uses only the cokernel of the leading coefficients,
    ``"right"`` only the kernel of the trailing ones, and ``"auto"`` tries the
    left side first.  The ax_yb and eta variants always use their own
    two-sided constructions.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {', '.join(SIDES)}")
    e = spec[rhs]
    q = random_qtensor(rng, e.row_dims, e.col_dims)
    if spec.variant == "ax_yb":
        r = decompose(spec["A"]).right
        l = decompose(spec["B"]).left
        return _unit(r @ q @ l)
    left, right = _factor_groups(spec.variant, rhs)
    if spec.variant == "eta":
        r = decompose(_stack_rows([spec[n] for n in left])).right
        r = QTensor.from_matrix(flatten(r), e.row_dims, e.row_dims)
        sym = q + eta_conj_transpose(q, spec.eta)
        return _unit(r @ sym @ eta_conj_transpose(r, spec.eta))
    if side != "right":
        r = decompose(_stack_rows([spec[n] for n in left])).right
        if fro_norm(r) > 0.0:
            r = QTensor.from_matrix(flatten(r), e.row_dims, e.row_dims)
            return _unit(r @ q)
        if side == "left":
            return None
    l = decompose(_stack_cols([spec[n] for n in right])).left
    if fro_norm(l) > 0.0:
        l = QTensor.from_matrix(flatten(l), e.col_dims, e.col_dims)
        return _unit(q @ l)
    return None


def perturb_inconsistent(
    spec: SystemSpec, which_rhs: str | None = None, seed: int = 0, side: str = "auto"
) -> SystemSpec:
    """Add an unabsorbable unit-norm perturbation to one right-hand side.

    With ``which_rhs`` unset the right-hand sides are tried in a seed-dependent
    order and the first perturbable one is used.  Raises :class:`NoNullSpace`
    when no candidate admits a perturbation.
    """
    rng = np.random.default_rng(seed)
    names = rhs_names(spec.variant)
    if which_rhs is not None:
        if which_rhs not in names:
            raise ValueError(f"{which_rhs} is not a right-hand side of the {spec.variant} variant")
        candidates = [which_rhs]
    else:
        candidates = [names[i] for i in rng.permutation(len(names))]
    for rhs in candidates:
        delta = perturbation(spec, rhs, rng, side)
        if delta is not None:
            out = spec.with_tensors(**{rhs: spec[rhs] + delta})
            out.meta["perturbed"] = rhs
            return out
    raise NoNullSpace(f"every candidate coefficient is surjective for {', '.join(candidates)}")


# ---------------------------------------------------------------------------
# fixtures


def fixture_paths(fixture_id: str) -> tuple[Path, Path]:
    if fixture_id not in FIXTURES:
        raise UnknownFixture(f"no bundled fixture {fixture_id!r}; known: {', '.join(FIXTURES)}")
    return DATA_DIR / f"{fixture_id}.spec.json", DATA_DIR / f"{fixture_id}.solution.json"


def load_fixture(fixture_id: str) -> tuple[SystemSpec, Solution]:
    spec_path, sol_path = fixture_paths(fixture_id)
    spec = SystemSpec.from_json(jsonio.read(spec_path))
    sol = Solution.from_json(jsonio.read(sol_path))
    return spec, sol
