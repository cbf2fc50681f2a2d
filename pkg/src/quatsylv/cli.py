"""Command-line front end.

Commands::

    quatsylv check    SPEC                [-o REPORT]
    quatsylv solve    SPEC                [-o SOLUTION] [--report REPORT] [--free zero|random:<seed>]
    quatsylv verify   SPEC SOLUTION       [-o REPORT]
    quatsylv generate --variant V         [--seed N] [--dims 2,2] [--inconsistent] -o SPEC [--solution-out SOLUTION]
    quatsylv example  [--id example-3.3]  [-o REPORT]

Exit status: 0 success or consistent, 2 inconsistent or residual failure,
3 input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import jsonio
from .errors import NoNullSpace, NotEtaHermitianRHS, NumericalError, ParseError, ShapeMismatch, UnknownFixture
from .instances import FIXTURES, ShapeProfile, generate_consistent, load_fixture, perturb_inconsistent
from .pinv import RankTolerance
from .quat import EtaAxis
from .sylvester import VARIANTS, ConsistencyReport, FreeParams, SystemSpec, Tolerances, check, solve, verify
from .sylvester.types import Solution

EXIT_OK = 0
EXIT_INCONSISTENT = 2
EXIT_INPUT = 3
SEED_ENV = "QUATSYLV_SEED"


class InputError(Exception):
    """Bad command-line input; reported with exit status 3."""


@dataclass
class RunConfig:
    command: str
    inputs: list[Path] = field(default_factory=list)
    output: Path | None = None
    report_output: Path | None = None
    solution_output: Path | None = None
    tol: Tolerances = field(default_factory=Tolerances)
    free: FreeParams = field(default_factory=FreeParams.zero)
    variant: str | None = None
    eta: EtaAxis | None = None
    fmt: str = "json"
    seed: int | None = None
    dims: tuple[int, ...] = (2, 2)
    inconsistent: bool = False
    fixture_id: str = "example-3.3"


def _env_seed() -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        seed = int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None
    if not 0 <= seed < 2**64:
        raise InputError(f"{SEED_ENV} must be an unsigned 64-bit integer")
    return seed


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"--dims must be comma-separated positive integers, got {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise InputError(f"--dims must be comma-separated positive integers, got {text!r}")
    return dims


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=1e-12, help="relative singular-value cutoff (default 1e-12)")
    common.add_argument("--tol-cond", type=float, default=1e-9, help="relative consistency threshold (default 1e-9)")
    common.add_argument("--tol-residual", type=float, default=1e-8, help="relative residual pass mark (default 1e-8)")
    common.add_argument("--variant", choices=VARIANTS, help="system variant (overrides the spec's 'variant' field)")
    common.add_argument("--eta", choices=[a.value for a in EtaAxis], help="eta axis for the eta variant")
    common.add_argument("--format", dest="fmt", choices=("json", "text"), default="json", help="report format")
    common.add_argument("-o", "--output", type=Path, help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="quatsylv", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="evaluate every consistency condition")
    p.add_argument("spec", type=Path)

    p = sub.add_parser("solve", parents=[common], help="compute a member of the general solution")
    p.add_argument("spec", type=Path)
    p.add_argument("--free", default="zero", help="free parameters: zero or random:<seed> (default zero)")
    p.add_argument("--report", type=Path, dest="report_output", help="also write the consistency report here")

    p = sub.add_parser("verify", parents=[common], help="substitute a solution and report residuals")
    p.add_argument("spec", type=Path)
    p.add_argument("solution", type=Path)

    p = sub.add_parser("generate", parents=[common], help="write a random spec and its ground-truth solution")
    p.add_argument("--seed", type=int, help=f"generator seed (falls back to ${SEED_ENV}, then 0)")
    p.add_argument("--dims", default="2,2", help="mode dimensions of every index set (default 2,2)")
    p.add_argument("--inconsistent", action="store_true", help="perturb one right-hand side out of range")
    p.add_argument("--solution-out", type=Path, dest="solution_output", help="ground-truth solution file")

    p = sub.add_parser("example", parents=[common], help="verify a bundled fixture against its listed solution")
    p.add_argument("--id", dest="fixture_id", default=FIXTURES[0], help=f"fixture id (known: {', '.join(FIXTURES)})")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    for flag, value in (("--tol-rank", args.tol_rank), ("--tol-cond", args.tol_cond), ("--tol-residual", args.tol_residual)):
        if not value > 0.0:
            raise InputError(f"{flag} must be positive, got {value}")
    try:
        RankTolerance(args.tol_rank)
    except ValueError as exc:
        raise InputError(f"--tol-rank: {exc}") from None
    cfg = RunConfig(
        command=args.command,
        output=args.output,
        tol=Tolerances(rank=args.tol_rank, cond=args.tol_cond, residual=args.tol_residual),
        variant=args.variant,
        eta=EtaAxis.parse(args.eta) if args.eta else None,
        fmt=args.fmt,
    )
    if args.command in ("check", "solve", "verify"):
        cfg.inputs.append(args.spec)
    if args.command == "verify":
        cfg.inputs.append(args.solution)
    if args.command == "solve":
        cfg.report_output = args.report_output
        try:
            cfg.free = FreeParams.parse(args.free, fallback_seed=_env_seed())
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if args.command == "generate":
        if args.variant is None:
            raise InputError("generate needs --variant")
        seed = args.seed if args.seed is not None else _env_seed()
        cfg.seed = 0 if seed is None else seed
        cfg.dims = _parse_dims(args.dims)
        cfg.inconsistent = args.inconsistent
        cfg.solution_output = args.solution_output
    if args.command == "example":
        cfg.fixture_id = args.fixture_id
    for path in cfg.inputs:
        if not path.is_file():
            raise InputError(f"{path}: no such file")
    return cfg


# ---------------------------------------------------------------------------


def _emit(cfg: RunConfig, text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        path.write_text(text, encoding="utf-8")


def _report_text(cfg: RunConfig, report: ConsistencyReport) -> str:
    return jsonio.dumps(report.to_json()) if cfg.fmt == "json" else report.to_text() + "\n"


def _load_spec(cfg: RunConfig, path: Path) -> SystemSpec:
    obj = jsonio.read(path)
    return SystemSpec.from_json(obj, variant=cfg.variant, eta=cfg.eta.value if cfg.eta else None)


def _first_failure(report: ConsistencyReport) -> None:
    failing = report.failing()
    if not failing:
        return
    c = failing[0]
    if report.kind == "residual":
        print(f"residual check failed: equation {c.condition_id} ({c.label})", file=sys.stderr)
    else:
        where = f" at {c.stage}" if c.stage else ""
        print(f"inconsistent: condition {c.condition_id} fails{where} ({c.label})", file=sys.stderr)


def _cmd_check(cfg: RunConfig) -> int:
    spec = _load_spec(cfg, cfg.inputs[0])
    report = check(spec, cfg.tol)
    _emit(cfg, _report_text(cfg, report), cfg.output)
    _first_failure(report)
    return EXIT_OK if report.overall else EXIT_INCONSISTENT


def _cmd_solve(cfg: RunConfig) -> int:
    spec = _load_spec(cfg, cfg.inputs[0])
    report, sol = solve(spec, cfg.free, cfg.tol)
    if cfg.report_output is not None:
        cfg.report_output.write_text(_report_text(cfg, report), encoding="utf-8")
    if sol is None:
        _first_failure(report)
        if cfg.report_output is None:
            _emit(cfg, _report_text(cfg, report), cfg.output)
        return EXIT_INCONSISTENT
    _emit(cfg, jsonio.dumps(sol.to_json()), cfg.output)
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> int:
    spec = _load_spec(cfg, cfg.inputs[0])
    sol = Solution.from_json(jsonio.read(cfg.inputs[1]))
    return _verify_and_report(cfg, spec, sol)


def _verify_and_report(cfg: RunConfig, spec: SystemSpec, sol: Solution) -> int:
    report = verify(spec, sol, cfg.tol)
    _emit(cfg, _report_text(cfg, report), cfg.output)
    _first_failure(report)
    return EXIT_OK if report.overall else EXIT_INCONSISTENT


def _cmd_generate(cfg: RunConfig) -> int:
    profile = ShapeProfile(default=cfg.dims)
    spec, sol = generate_consistent(cfg.variant, profile, cfg.seed, cfg.eta or EtaAxis.I)
    if cfg.inconsistent:
        spec = perturb_inconsistent(spec, seed=cfg.seed)
    _emit(cfg, jsonio.dumps(spec.to_json()), cfg.output)
    if cfg.solution_output is not None:
        cfg.solution_output.write_text(jsonio.dumps(sol.to_json()), encoding="utf-8")
    return EXIT_OK


def _cmd_example(cfg: RunConfig) -> int:
    spec, sol = load_fixture(cfg.fixture_id)
    return _verify_and_report(cfg, spec, sol)


COMMANDS = {
    "check": _cmd_check,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "generate": _cmd_generate,
    "example": _cmd_example,
}


def run(cfg: RunConfig) -> int:
    return COMMANDS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return run(config_from_args(args))
    except (InputError, ParseError, ShapeMismatch, NotEtaHermitianRHS, UnknownFixture, NoNullSpace, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
