"""Value types shared by the solvers: tolerances, free parameters, reports."""

from __future__ import annotations

import hashlib
import zlib
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping

import numpy as np

from ..errors import ParseError, ShapeMismatch
from ..pinv import RankTolerance
from ..qtensor import QTensor, Shape, from_json, to_json, zeros


@dataclass(frozen=True)
class Tolerances:
    """Numerical knobs for one solve.

    ``rank`` is the relative singular-value cutoff, ``cond`` the relative
    threshold for consistency conditions and ``residual`` the pass mark for
    substituted equation residuals.
    """

    rank: float = 1e-12
    cond: float = 1e-9
    residual: float = 1e-8

    @property
    def rank_tol(self) -> RankTolerance:
        return RankTolerance(self.rank)


DEFAULT_TOL = Tolerances()


# ---------------------------------------------------------------------------


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


@dataclass
class FreeParams:
    """Arbitrary tensors of a general solution, looked up by parameter name.

    Explicit tensors win.  Otherwise the ``zero`` policy returns zeros and the
    ``random`` policy returns standard-normal components from a generator
    keyed on ``(seed, name)``, so every parameter is reproducible on its own.
    """

    policy: str = "zero"
    seed: int | None = None
    explicit: dict[str, QTensor] = field(default_factory=dict)
    used: dict[str, QTensor] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.policy not in ("zero", "random"):
            raise ValueError(f"unknown free-parameter policy {self.policy!r}")
        if self.policy == "random" and self.seed is None:
            raise ValueError("the random policy needs a seed")

    @classmethod
    def zero(cls) -> "FreeParams":
        return cls("zero")

    @classmethod
    def random(cls, seed: int) -> "FreeParams":
        return cls("random", int(seed))

    @classmethod
    def parse(cls, text: str, fallback_seed: int | None = None) -> "FreeParams":
        """Parse ``zero``, ``random`` or ``random:<seed>``."""
        text = text.strip()
        if text == "zero":
            return cls.zero()
        if text == "random" or text == "random:":
            if fallback_seed is None:
                raise ValueError("--free random needs a seed (random:<seed> or QUATSYLV_SEED)")
            return cls.random(fallback_seed)
        if text.startswith("random:"):
            raw = text.split(":", 1)[1]
            try:
                seed = int(raw)
            except ValueError:
                raise ValueError(f"bad seed {raw!r} in --free") from None
            if not 0 <= seed < 2**64:
                raise ValueError("seed must be an unsigned 64-bit integer")
            return cls.random(seed)
        raise ValueError(f"--free must be 'zero' or 'random:<seed>', got {text!r}")

    def fresh(self) -> "FreeParams":
        """Same policy and explicit tensors with an empty usage record."""
        return FreeParams(self.policy, self.seed, dict(self.explicit))

    def draw(self, name: str, rows, cols) -> QTensor:
        shape = Shape(tuple(rows), tuple(cols))
        if name in self.explicit:
            t = self.explicit[name]
            if t.shape != shape:
                raise ShapeMismatch(f"free parameter {name} must have shape {shape}, got {t.shape}")
        elif self.policy == "zero":
            t = zeros(shape)
        else:
            seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(_name_key(name),))
            rng = np.random.default_rng(seq)
            t = QTensor(rng.standard_normal(shape.rows + shape.cols + (4,)), shape.rows, shape.cols)
        self.used[name] = t
        return t

    def record(self) -> "FreeParams":
        """Snapshot whose explicit tensors are exactly the parameters consumed."""
        return FreeParams(self.policy, self.seed, dict(self.used))

    def describe(self) -> str:
        return "zero" if self.policy == "zero" else f"random:{self.seed}"


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    condition_id: str
    residual: float
    threshold: float
    passed: bool
    label: str = ""
    stage: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "condition_id": self.condition_id,
            "residual": self.residual,
            "threshold": self.threshold,
            "pass": self.passed,
            "label": self.label,
            "stage": self.stage,
        }


@dataclass
class ConsistencyReport:
    conditions: list[Condition] = field(default_factory=list)
    kind: str = "consistency"

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.conditions)

    def add(self, cond: Condition) -> None:
        self.conditions.append(cond)

    def extend(self, other: "ConsistencyReport") -> None:
        self.conditions.extend(other.conditions)

    def failing(self) -> list[Condition]:
        return [c for c in self.conditions if not c.passed]

    def by_id(self, condition_id: str) -> list[Condition]:
        return [c for c in self.conditions if c.condition_id == condition_id]

    def max_ratio(self) -> float:
        """Largest residual/threshold ratio (0 for an empty report)."""
        return max((c.residual / c.threshold for c in self.conditions), default=0.0)

    def __iter__(self) -> Iterator[Condition]:
        return iter(self.conditions)

    def __len__(self) -> int:
        return len(self.conditions)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "overall": self.overall,
            "conditions": [c.to_json() for c in self.conditions],
        }

    def to_text(self) -> str:
        lines = [f"{self.kind}: {'PASS' if self.overall else 'FAIL'}"]
        for c in self.conditions:
            mark = "ok  " if c.passed else "FAIL"
            where = f" [{c.stage}]" if c.stage else ""
            lines.append(
                f"  {mark} ({c.condition_id}) {c.label}{where}: "
                f"residual={c.residual:.3e} threshold={c.threshold:.3e}"
            )
        return "\n".join(lines)


# ---------------------------------------------------------------------------


@dataclass
class Solution:
    unknowns: dict[str, QTensor]
    free_params_used: FreeParams = field(default_factory=FreeParams)

    def __getitem__(self, name: str) -> QTensor:
        return self.unknowns[name]

    def __contains__(self, name: str) -> bool:
        return name in self.unknowns

    def names(self) -> list[str]:
        return list(self.unknowns)

    def to_json(self) -> dict[str, Any]:
        fp = self.free_params_used
        return {
            "unknowns": {k: to_json(v) for k, v in self.unknowns.items()},
            "free_params": {"policy": fp.describe(), "names": sorted(fp.explicit)},
        }

    @classmethod
    def from_json(cls, obj: Any) -> "Solution":
        """Parse the ``to_json`` layout; a bare mapping of unknowns is accepted too."""
        if not isinstance(obj, dict):
            raise ParseError("solution must be a JSON object")
        raw = obj.get("unknowns", obj)
        if not isinstance(raw, dict):
            raise ParseError("solution 'unknowns' must map names to tensors")
        unknowns = {name: from_json(value, name) for name, value in raw.items()}
        meta = obj.get("free_params")
        policy = meta.get("policy", "zero") if isinstance(meta, dict) else "zero"
        try:
            fp = FreeParams.parse(policy)
        except ValueError as exc:
            raise ParseError(f"solution free_params: {exc}") from None
        return cls(unknowns, fp)


@dataclass(frozen=True)
class CacheEntry:
    value: QTensor
    stage: str
    symbol: str = ""


class DerivationCache:
    """Every intermediate tensor of a cascade run, keyed by a structured name."""

    def __init__(self) -> None:
        self._entries: dict[str, CacheEntry] = {}

    def put(self, name: str, value: QTensor, stage: str, symbol: str = "") -> QTensor:
        self._entries[name] = CacheEntry(value, stage, symbol)
        return value

    def __getitem__(self, name: str) -> QTensor:
        return self._entries[name].value

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def entry(self, name: str) -> CacheEntry:
        return self._entries[name]

    def names(self) -> list[str]:
        return list(self._entries)

    def by_symbol(self, symbol: str) -> list[str]:
        return [k for k, e in self._entries.items() if e.symbol == symbol]

    def items(self) -> Mapping[str, CacheEntry]:
        return dict(self._entries)

    def fingerprint(self) -> str:
        """Digest of every name and tensor payload, for determinism checks."""
        h = hashlib.sha256()
        for name, entry in self._entries.items():
            h.update(name.encode())
            h.update(np.ascontiguousarray(entry.value.data).tobytes())
        return h.hexdigest()
