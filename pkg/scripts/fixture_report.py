"""Compare a bundled fixture's printed data with its listed solution.

Prints the consistency report, the per-equation residuals, and every entry
where the listed solution's left-hand side differs from the printed
right-hand side.

    python3 scripts/fixture_report.py [--id example-3.3] [--atol 1e-9]
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from quatsylv.instances import FIXTURES, load_fixture
from quatsylv.sylvester import check, rhs_names, verify
from quatsylv.sylvester.system import evaluate_lhs


@dataclass(frozen=True)
class ReportConfig:
    fixture_id: str = FIXTURES[0]
    atol: float = 1e-9


def fmt_quat(q: np.ndarray) -> str:
    return "[" + ", ".join(f"{v:g}" for v in q) + "]"


def run(cfg: ReportConfig) -> None:
    spec, sol = load_fixture(cfg.fixture_id)
    print(check(spec).to_text())
    print(verify(spec, sol).to_text())
    for name in rhs_names(spec.variant):
        gap = evaluate_lhs(spec, sol, name).data - spec[name].data
        bad = np.argwhere(np.abs(gap).max(axis=-1) > cfg.atol)
        print(f"{name}: {len(bad)} of {gap[..., 0].size} entries differ")
        for idx in bad:
            i1, i2, k, l = (int(v) + 1 for v in idx)
            key = tuple(int(v) for v in idx)
            print(
                f"  slice ({k},{l}) entry ({i1},{i2}): printed {fmt_quat(spec[name].data[key])}"
                f" lhs {fmt_quat(spec[name].data[key] + gap[key])}"
            )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--id", dest="fixture_id", default=FIXTURES[0])
    parser.add_argument("--atol", type=float, default=1e-9)
    args = parser.parse_args()
    run(ReportConfig(args.fixture_id, args.atol))


if __name__ == "__main__":
    main()
