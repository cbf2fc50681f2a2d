"""Generate, check, solve and verify random instances of every variant.

For each variant and seed this builds a forward instance, solves it under the
zero and random free-parameter policies, and then tries to perturb it out of
range.  One summary line per variant reports pass counts, the worst relative
residual, how many instances admitted a perturbation, and wall time.

    python3 scripts/roundtrip_sweep.py [--seeds 20] [--variants full,reduced]
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from quatsylv.errors import NoNullSpace
from quatsylv.instances import generate_consistent, perturb_inconsistent
from quatsylv.sylvester import VARIANTS, FreeParams, check, solve, verify


@dataclass(frozen=True)
class SweepConfig:
    seeds: int = 20
    variants: tuple[str, ...] = VARIANTS


@dataclass
class VariantStats:
    solved: int = 0
    attempted: int = 0
    worst_residual: float = 0.0
    perturbable: int = 0
    rejected: int = 0
    seconds: float = 0.0
    failures: list[tuple[int, str]] = field(default_factory=list)


def sweep_variant(variant: str, seeds: int) -> VariantStats:
    stats = VariantStats()
    start = time.perf_counter()
    for seed in range(1, seeds + 1):
        spec, _ = generate_consistent(variant, seed=seed)
        for fp in (FreeParams.zero(), FreeParams.random(seed)):
            stats.attempted += 1
            _, sol = solve(spec, fp)
            if sol is None:
                stats.failures.append((seed, fp.describe()))
                continue
            report = verify(spec, sol)
            stats.worst_residual = max(stats.worst_residual, max(c.residual for c in report))
            if report.overall:
                stats.solved += 1
            else:
                stats.failures.append((seed, fp.describe()))
        try:
            bad = perturb_inconsistent(spec, seed=seed)
        except NoNullSpace:
            continue
        stats.perturbable += 1
        stats.rejected += not check(bad).overall
    stats.seconds = time.perf_counter() - start
    return stats


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--variants", default=",".join(VARIANTS))
    args = parser.parse_args()
    cfg = SweepConfig(args.seeds, tuple(v.strip() for v in args.variants.split(",")))
    for variant in cfg.variants:
        s = sweep_variant(variant, cfg.seeds)
        print(
            f"{variant:9s} solved {s.solved}/{s.attempted}  worst residual {s.worst_residual:.1e}  "
            f"perturbable {s.perturbable}/{cfg.seeds} rejected {s.rejected}  {s.seconds:.1f}s"
            + (f"  failures {s.failures}" if s.failures else "")
        )


if __name__ == "__main__":
    main()
