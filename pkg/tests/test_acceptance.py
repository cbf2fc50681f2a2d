"""Acceptance criteria, each run at its stated tolerance.

Every criterion test records one ``criterion N: PASS|FAIL`` line; the lines
are repeated in the terminal summary.  Criterion 1 cannot pass on the data as
printed (see the decisions ledger), so its full check is a strict xfail and
the parts that do hold are asserted separately.
"""

import time

import numpy as np
import pytest

from quatsylv import jsonio
from quatsylv.cli import main
from quatsylv.errors import Inconsistent, NoNullSpace
from quatsylv.instances import generate_consistent, load_fixture, perturb_inconsistent
from quatsylv.pinv import left_projector, pinv_tensor, right_projector
from quatsylv.qtensor import (
    QTensor,
    conj_transpose,
    einstein_product,
    eta_conj_transpose,
    flatten,
    fro_norm,
    qmatmul,
    random_qtensor,
)
from quatsylv.quat import EtaAxis
from quatsylv.sylvester import FreeParams, Tolerances, check, check_full, solve, solve_or_raise, verify
from quatsylv.sylvester.system import evaluate_lhs
from oracles import naive_einstein
from strategies import low_rank

ROUND_TRIP_VARIANTS = ("single", "ax_yb", "two_term", "quad", "full", "reduced")
NEGATIVE_VARIANTS = ROUND_TRIP_VARIANTS + ("eta",)
RESIDUAL_TOL = Tolerances(residual=1e-8)


def mul(*ts):
    out = ts[0]
    for t in ts[1:]:
        out = einstein_product(out, t)
    return out


def rel(a: QTensor, b: QTensor) -> float:
    return fro_norm(a - b) / max(fro_norm(b), 1e-300)


# ---------------------------------------------------------------------------
# criterion 1: bundled example


def fixture_outcome():
    start = time.perf_counter()
    spec, sol = load_fixture("example-3.3")
    cond = check_full(spec)
    res = verify(spec, sol, RESIDUAL_TOL)
    elapsed = time.perf_counter() - start
    return spec, sol, cond, res, elapsed


def test_criterion_1_bundled_example(record_criterion):
    _, _, cond, res, elapsed = fixture_outcome()
    failing_cond = sorted({f"({c.condition_id}) {c.stage}" for c in cond.failing()})
    failing_eq = [c.condition_id for c in res.failing()]
    passed = cond.overall and res.overall and elapsed < 1.0
    detail = (
        f"check_full failing={failing_cond or 'none'}; "
        f"verify failing={failing_eq or 'none'}; runtime={elapsed:.2f}s"
    )
    record_criterion(1, passed, detail)
    assert elapsed < 1.0
    # Everything except the listed failures holds; the full criterion is the xfail below.
    assert [c.condition_id for c in cond.failing()] == ["3.6"]
    assert set(failing_eq) <= {"E1", "E2", "E3", "E4", "E5"}


@pytest.mark.xfail(
    strict=True,
    reason="printed data disagrees with the listed solution in E4, E5 (J4 entry) and across E1-E3",
)
def test_criterion_1_full_golden_check():
    _, _, cond, res, elapsed = fixture_outcome()
    assert cond.overall and elapsed < 1.0
    for name in ("E4", "E5", "E2"):
        assert res.by_id(name)[0].passed
    for name in ("E1", "E3"):
        assert res.by_id(name)[0].passed


def test_criterion_1_first_equation_structure():
    spec, _, _, _, _ = fixture_outcome()
    f4, e4 = spec["F4"], spec["E4"]
    assert fro_norm(mul(right_projector(f4), e4)) <= 1e-9 * fro_norm(e4)
    x = pinv_tensor(f4)
    scale = fro_norm(f4)
    assert fro_norm(mul(f4, x, f4) - f4) <= 1e-10 * scale
    assert fro_norm(mul(x, f4, x) - x) <= 1e-10 * max(1.0, fro_norm(x))


def test_criterion_1_passes_once_source_is_made_consistent():
    # DERIVED: right-hand sides recomputed from the listed solution.
    spec, sol = load_fixture("example-3.3")
    fresh = spec.with_tensors(**{n: evaluate_lhs(spec, sol, n) for n in ("E1", "E2", "E3", "E4", "E5")})
    assert check_full(fresh).overall
    assert verify(fresh, sol, RESIDUAL_TOL).overall
    report, got = solve(fresh)
    assert report.overall and verify(fresh, got, RESIDUAL_TOL).overall


def test_criterion_1_j4_entry_explains_e5():
    # DERIVED: with J4(:,:,2,1) entry (2,2) read as 2+i, E5 and every condition hold.
    spec, sol = load_fixture("example-3.3")
    data = spec["J4"].data.copy()
    assert data[1, 1, 1, 0].tolist() == [2.0, 0.0, 1.0, 0.0]
    data[1, 1, 1, 0] = [2.0, 1.0, 0.0, 0.0]
    fixed = spec.with_tensors(J4=QTensor(data, (2, 2), (2, 2)))
    assert check_full(fixed).overall
    assert verify(fixed, sol, RESIDUAL_TOL).by_id("E5")[0].passed


# ---------------------------------------------------------------------------
# criterion 2: Penrose axioms and projector identities


def penrose_and_identities(d: QTensor) -> tuple[float, float]:
    x = pinv_tensor(d)
    dx, xd = mul(d, x), mul(x, d)
    nd, nx = fro_norm(d), max(fro_norm(x), 1e-300)
    axioms = max(
        fro_norm(mul(d, x, d) - d) / nd,
        fro_norm(mul(x, d, x) - x) / nx,
        fro_norm(conj_transpose(dx) - dx) / max(fro_norm(dx), 1.0),
        fro_norm(conj_transpose(xd) - xd) / max(fro_norm(xd), 1.0),
    )
    left, right = left_projector(d), right_projector(d)
    ids = [
        fro_norm(mul(right, d)) / nd,
        fro_norm(mul(x, right)) / nx,
        fro_norm(mul(d, left)) / nd,
        fro_norm(mul(left, x)) / nx,
        rel(pinv_tensor(conj_transpose(d)), conj_transpose(x)),
        rel(pinv_tensor(mul(conj_transpose(d), d)), mul(x, pinv_tensor(conj_transpose(d)))),
    ]
    for eta in EtaAxis:
        de = eta_conj_transpose(d, eta)
        ids.append(rel(pinv_tensor(de), eta_conj_transpose(x, eta)))
        ids.append(fro_norm(eta_conj_transpose(left, eta) - right_projector(de)))
        ids.append(fro_norm(eta_conj_transpose(right, eta) - left_projector(de)))
    return axioms, max(ids)


def test_criterion_2_penrose_suite(record_criterion):
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    worst_axiom = worst_identity = 0.0
    for n in range(200):
        order = 2 if n % 2 == 0 else 3
        rows = tuple(int(v) for v in rng.integers(1, 4, size=order))
        cols = tuple(int(v) for v in rng.integers(1, 4, size=order))
        top = min(int(np.prod(rows)), int(np.prod(cols)))
        if n % 4 >= 2 and top > 1:
            d = low_rank(rng, rows, cols, int(rng.integers(1, top)))
        else:
            d = random_qtensor(rng, rows, cols)
        a, i = penrose_and_identities(d)
        worst_axiom, worst_identity = max(worst_axiom, a), max(worst_identity, i)
    elapsed = time.perf_counter() - start
    passed = worst_axiom <= 1e-10 and worst_identity <= 1e-9 and elapsed < 30.0
    record_criterion(
        2, passed, f"200 tensors; worst axiom={worst_axiom:.1e} worst identity={worst_identity:.1e}; {elapsed:.1f}s"
    )
    assert passed


# ---------------------------------------------------------------------------
# criterion 3: flattening homomorphism


def test_criterion_3_flattening_homomorphism(record_criterion):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        order = int(rng.integers(1, 4))
        r, m, c = (tuple(int(v) for v in rng.integers(1, 4, size=order)) for _ in range(3))
        a, b = random_qtensor(rng, r, m), random_qtensor(rng, m, c)
        # the tensor-side product comes from the mode-by-mode oracle, not the library
        gap = np.linalg.norm(flatten(naive_einstein(a, b)) - qmatmul(flatten(a), flatten(b)))
        worst = max(worst, gap / (fro_norm(a) * fro_norm(b)))
    passed = worst <= 1e-12
    record_criterion(3, passed, f"100 pairs; worst gap/(|A||B|)={worst:.1e}")
    assert passed


# ---------------------------------------------------------------------------
# criterion 4: round trip


def test_criterion_4_round_trip(record_criterion):
    failures = []
    for variant in ROUND_TRIP_VARIANTS:
        for seed in range(1, 21):
            spec, _ = generate_consistent(variant, seed=seed)
            if not check(spec).overall:
                failures.append((variant, seed, "check"))
                continue
            for fp in (FreeParams.zero(), FreeParams.random(seed)):
                report, sol = solve(spec, fp)
                if sol is None:
                    failures.append((variant, seed, fp.describe()))
                    continue
                if not verify(spec, sol, RESIDUAL_TOL).overall:
                    failures.append((variant, seed, fp.describe()))
    passed = not failures
    record_criterion(4, passed, f"{len(ROUND_TRIP_VARIANTS)} variants x 20 seeds x 2 policies; failures={failures or 0}")
    assert passed


# ---------------------------------------------------------------------------
# criterion 5: negative detection


def test_criterion_5_negative_detection(record_criterion):
    missed = []
    counts = {}
    for variant in NEGATIVE_VARIANTS:
        found, seed = 0, 0
        while found < 20:
            seed += 1
            spec, _ = generate_consistent(variant, seed=seed)
            try:
                bad = perturb_inconsistent(spec, seed=seed)
            except NoNullSpace:
                continue
            found += 1
            rejected = not check(bad).overall
            try:
                solve_or_raise(bad)
                named = False
            except Inconsistent as exc:
                named = exc.condition_id != "?" and bool(exc.stage)
            if not (rejected and named):
                missed.append((variant, seed))
        counts[variant] = seed
    passed = not missed
    record_criterion(5, passed, f"20 perturbed per variant (seeds scanned: {counts}); missed={missed or 0}")
    assert passed


# ---------------------------------------------------------------------------
# criterion 6: eta-Hermitian suite


def test_criterion_6_eta_hermitian(record_criterion):
    worst_sym = 0.0
    failures = []
    for eta in EtaAxis:
        for seed in range(1, 11):
            spec, _ = generate_consistent("eta", seed=seed, eta=eta)
            report, sol = solve(spec)
            if sol is None:
                failures.append((eta.value, seed))
                continue
            for k in ("Z1", "Z2", "Z3", "Z4"):
                z = sol[k]
                worst_sym = max(worst_sym, fro_norm(z - eta_conj_transpose(z, eta)) / max(fro_norm(z), 1e-300))
            if not verify(spec, sol, RESIDUAL_TOL).overall:
                failures.append((eta.value, seed))
    passed = not failures and worst_sym <= 1e-12
    record_criterion(6, passed, f"3 axes x 10 instances; worst |Z - Z^eta*|/|Z|={worst_sym:.1e}; failures={failures or 0}")
    assert passed


# ---------------------------------------------------------------------------
# criterion 7: determinism


def test_criterion_7_determinism(record_criterion, tmp_path):
    mismatched = []
    for variant in NEGATIVE_VARIANTS:
        outputs = []
        for run in range(2):
            spec = tmp_path / f"{variant}-{run}.spec.json"
            sol = tmp_path / f"{variant}-{run}.sol.json"
            assert main(["generate", "--variant", variant, "--seed", "17", "-o", str(spec)]) == 0
            assert main(["solve", str(spec), "--free", "random:17", "-o", str(sol)]) == 0
            outputs.append((spec.read_bytes(), sol.read_bytes()))
        if outputs[0] != outputs[1]:
            mismatched.append(variant)
        spec_obj, _ = generate_consistent(variant, seed=17)
        _, sol_obj = solve(spec_obj, FreeParams.random(17))
        if jsonio.dumps(sol_obj.to_json()).encode() != outputs[0][1]:
            mismatched.append(f"{variant}(api)")
    passed = not mismatched
    record_criterion(7, passed, f"{len(NEGATIVE_VARIANTS)} variants, two runs each; mismatched={mismatched or 0}")
    assert passed
