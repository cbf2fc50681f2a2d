"""Quaternion scalars and the eta-involutions.

A quaternion ``w + x i + y j + z k`` is stored as four doubles.  The scalar
type here is meant for clarity and for tests; bulk arithmetic on tensors works
on numpy arrays whose trailing axis holds the four components (see
:mod:`quatsylv.qtensor`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class EtaAxis(enum.Enum):
    """One of the three imaginary units used to define eta-Hermitian structure."""

    I = "i"
    J = "j"
    K = "k"

    @property
    def component(self) -> int:
        """Index (1, 2 or 3) of this axis within ``[w, x, y, z]``."""
        return {"i": 1, "j": 2, "k": 3}[self.value]

    @property
    def unit(self) -> "Quaternion":
        comps = [0.0, 0.0, 0.0, 0.0]
        comps[self.component] = 1.0
        return Quaternion(*comps)

    @classmethod
    def parse(cls, value: "str | EtaAxis") -> "EtaAxis":
        if isinstance(value, EtaAxis):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"eta axis must be one of i, j, k (got {value!r})") from None


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        w, x, y, z = (float(v) for v in arr)
        return cls(w, x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: "Quaternion | float") -> "Quaternion":
        if isinstance(other, Quaternion):
            return qmul(self, other)
        s = float(other)
        return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)

    def __rmul__(self, other: float) -> "Quaternion":
        return self * other

    def norm(self) -> float:
        return norm(self)

    def isclose(self, other: "Quaternion", rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        a, b = self.to_array(), other.to_array()
        return bool(np.all(np.abs(a - b) <= atol + rtol * np.maximum(np.abs(a), np.abs(b))))


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``a * b``."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def qconj(a: Quaternion) -> Quaternion:
    return Quaternion(a.w, -a.x, -a.y, -a.z)


def norm(a: Quaternion) -> float:
    return math.sqrt(a.w * a.w + a.x * a.x + a.y * a.y + a.z * a.z)


def qinv(a: Quaternion) -> Quaternion:
    """Multiplicative inverse; raises ZeroDivisionError for the zero quaternion."""
    n2 = a.w * a.w + a.x * a.x + a.y * a.y + a.z * a.z
    if n2 == 0.0:
        raise ZeroDivisionError("zero quaternion has no inverse")
    c = qconj(a)
    return Quaternion(c.w / n2, c.x / n2, c.y / n2, c.z / n2)


def eta_conj(a: Quaternion, eta: EtaAxis | str) -> Quaternion:
    """Return ``-eta * conj(a) * eta``.

    The result keeps the real part and the two imaginary axes orthogonal to
    ``eta`` and flips the sign of the ``eta`` component.
    """
    u = EtaAxis.parse(eta).unit
    return -qmul(qmul(u, qconj(a)), u)


def eta_conj_array(arr: np.ndarray, eta: EtaAxis | str) -> np.ndarray:
    """Vectorised :func:`eta_conj` over an array whose last axis has length 4."""
    out = np.array(arr, dtype=float, copy=True)
    out[..., EtaAxis.parse(eta).component] *= -1.0
    return out
