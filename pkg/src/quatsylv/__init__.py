"""Quaternion tensors, Moore-Penrose inverses and coupled Sylvester-type tensor systems."""

from .errors import (
    Inconsistent,
    NoNullSpace,
    NotEtaHermitianRHS,
    NumericalError,
    ParseError,
    QuatSylvError,
    ShapeMismatch,
    UnknownFixture,
)
from .instances import ShapeProfile, generate_consistent, load_fixture, perturb_inconsistent
from .pinv import RankTolerance, left_projector, pinv_tensor, right_projector
from .qtensor import QTensor, Shape, einstein_product, eta_conj_transpose, flatten, unflatten
from .quat import EtaAxis, Quaternion
from .sylvester import (
    ConsistencyReport,
    FreeParams,
    Solution,
    SystemSpec,
    Tolerances,
    check,
    solve,
    solve_or_raise,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "ConsistencyReport",
    "EtaAxis",
    "FreeParams",
    "Inconsistent",
    "NoNullSpace",
    "NotEtaHermitianRHS",
    "NumericalError",
    "ParseError",
    "QTensor",
    "QuatSylvError",
    "Quaternion",
    "RankTolerance",
    "Shape",
    "ShapeMismatch",
    "ShapeProfile",
    "Solution",
    "SystemSpec",
    "Tolerances",
    "UnknownFixture",
    "check",
    "einstein_product",
    "eta_conj_transpose",
    "flatten",
    "generate_consistent",
    "left_projector",
    "load_fixture",
    "perturb_inconsistent",
    "pinv_tensor",
    "right_projector",
    "solve",
    "solve_or_raise",
    "unflatten",
    "verify",
]
