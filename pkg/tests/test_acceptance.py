"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL verdict with the measured quantity;
``conftest.py`` prints the lines at the end of the session. Run this file
directly (``python tests/test_acceptance.py``) to get only the verdict lines.
"""

import itertools
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from summab.cli import main, run
from summab.conditions import check_factor_conditions, check_lemma_conclusions, check_weight_conditions
from summab.conditions import factor_system, lemma32_sequence
from summab.decomposition import abel_splits, residual_max
from summab.families import FamilySpec, generate
from summab.matrices import (
    cesaro_matrix,
    check_matrix_conditions,
    custom_matrix,
    delta_transform_direct,
    delta_transform_via_ahat,
    identity_matrix,
    weighted_mean_matrix,
)
from summab.reports import classify
from summab.scenario import parse_scenario
from summab.seqcore import partial_sums, weight_partials
from summab.summability import summability_index

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"
GOLDEN = Path(__file__).resolve().parent / "data" / "canon1_theorem.json"

RESULTS = []


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def weights(name, N):
    return weight_partials(generate("weights", FamilySpec(name), N).values)


def rel(x, y):
    x, y = np.asarray(x), np.asarray(y)
    scale = np.maximum(np.abs(x), np.abs(y))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(scale > 0, np.abs(x - y) / scale, 0.0)
    return float(r.max())


def test_criterion_1_two_route_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20)
    N, worst = 60, 0.0
    for _ in range(100):
        table = np.tril(rng.uniform(0, 1, (N + 1, N + 1)), -1)
        table[np.diag_indices(N + 1)] = rng.uniform(0.1, 1, N + 1)
        A = custom_matrix(table)
        D = A.derive()
        a = rng.uniform(-1, 1, N + 1)
        s = np.cumsum(a)
        for n in range(N + 1):
            direct = delta_transform_direct(A, s, n)
            err = abs(direct - delta_transform_via_ahat(D, a, n)) / (1 + abs(direct))
            worst = max(worst, err)
    elapsed = time.perf_counter() - t0
    record(1, worst <= 1e-10 and elapsed < 1.0,
           f"max |direct - via ahat|/(1+|direct|) = {worst:.2e} (tol 1e-10), {elapsed:.2f} s (limit 1 s)")


def test_criterion_2_weighted_mean_closed_form():
    # row-normwise relative error, see README
    N, worst = 200, 0.0
    for name in ("unit", "linear", "geometric"):
        A = weighted_mean_matrix(weights(name, N))
        closed, generic = A.derive(), A.derive(generic=True)
        for n in range(N + 1):
            c, g = closed.ahat_row(n), generic.ahat_row(n)
            worst = max(worst, float(np.max(np.abs(c - g)) / np.max(np.abs(c))))
    record(2, worst <= 1e-12, f"max row-normwise rel. error generic vs closed = {worst:.2e} (tol 1e-12)")


def test_criterion_3_reductions():
    N = 500
    a = generate("terms", FamilySpec("random_bounded"), N).values
    s = partial_sums(a).values
    n = np.arange(N + 1, dtype=np.float64)
    unit = weights("unit", N)
    worst, exact = 0.0, True
    for k in (1.0, 2.0):
        for name in ("unit", "linear", "geometric"):
            w = weights(name, N)
            m = summability_index("matrix", k, A=weighted_mean_matrix(w), w=w, a=a).partials.values
            r = summability_index("weighted", k, s=s, w=w).partials.values
            worst = max(worst, rel(m, r))
        wu = summability_index("weighted", k, s=s, w=unit)
        c1 = summability_index("cesaro", k, s=s, alpha=1.0)
        shift = np.ones(N + 1)
        shift[1:] = ((n[1:] + 1) / n[1:]) ** (k - 1)
        worst = max(worst, rel(wu.partials.values, np.cumsum(shift * c1.summands)))
        ident = summability_index("matrix", k, A=identity_matrix(N), w=unit, a=a)
        direct = np.zeros(N + 1)
        direct[1:] = (n[1:] + 1) ** (k - 1) * np.abs(a[1:]) ** k
        worst = max(worst, rel(ident.summands, direct))
        if k == 1.0:
            exact &= bool(np.array_equal(ident.partials.values, np.cumsum(np.abs(np.r_[0.0, a[1:]]))))
            worst = max(worst, rel(wu.partials.values, c1.partials.values))
    record(3, worst <= 1e-12 and exact,
           f"max rel. diff over matrix/weighted/Cesaro/identity reductions = {worst:.2e} (tol 1e-12), "
           f"identity k=1 bit-exact: {exact}")


def test_criterion_4_abel_split_grid():
    N, worst = 200, 0.0
    grid = itertools.product(("unit", "linear", "geometric"),
                             ("inverse_X_squared", "inverse_X", "constant"),
                             ("alternating", "random_bounded"),
                             ("weighted_mean", "cesaro"))
    X = generate("X", FamilySpec("harmonic_plus_one"), N).values
    for wname, lname, tname, kind in grid:
        w = weights(wname, N)
        lam = generate("lambda", FamilySpec(lname), N, X=X).values
        a = generate("terms", FamilySpec(tname), N).values
        A = weighted_mean_matrix(w) if kind == "weighted_mean" else cesaro_matrix(1.0, N)
        worst = max(worst, residual_max(abel_splits(A.derive(), partial_sums(a).values, w, lam)))
    record(4, worst <= 1e-9, f"max residual/(1+|direct|) over 36 scenarios, n <= 200 = {worst:.2e} (tol 1e-9)")


def test_criterion_5_matrix_conditions():
    N, ok, notes = 1000, True, []
    for name in ("unit", "linear", "geometric", "log_slow"):
        w = weights(name, N)
        rep = check_matrix_conditions(weighted_mean_matrix(w), w)
        good = (rep["M22"].verdict == "pass" and rep["M23"].verdict == "pass"
                and rep["M24"].witness.ratio_sup == 1.0
                and rep["M25"].witness.ratio_sup <= 1.0 + 1e-12)
        ok &= good
        notes.append(f"{name} M25={rep['M25'].witness.ratio_sup:.16g}")
    table = weighted_mean_matrix(weights("unit", 12)).to_dense()
    table[5, 2] = 1.5 * table[4, 2]
    planted = check_matrix_conditions(custom_matrix(table), weights("unit", 12))["M23"]
    ok &= planted.verdict == "fail" and planted.first_violation == (5, 2)
    record(5, ok, f"M22-M24 hold for 4 weight families; {', '.join(notes)}; "
                  f"planted violation flagged at {planted.first_violation}")


def test_criterion_6_lemma_properties():
    N, checked, ok = 4096, 0, True
    xs = [FamilySpec("harmonic_plus_one"), FamilySpec("power", {"eps": 0.25}), FamilySpec("power", {"eps": 0.5})]
    for xspec, lname in itertools.product(xs, ("inverse_X_squared", "inverse_X", "constant")):
        X = generate("X", xspec, N + 1).values
        lam = generate("lambda", FamilySpec(lname), N + 1, X=X).values
        fs = factor_system(X, lam, weights("unit", N + 1))
        if all(classify(r.verdict) == "pass" for r in check_factor_conditions(fs)):
            checked += 1
            concl = check_lemma_conclusions(fs)
            ok &= concl["L26"].verdict == "bounded" and concl["L27"].verdict == "summable_trend"
    w_checked = 0
    for name in ("unit", "linear", "geometric", "log_slow"):
        M = 1000
        w = weights(name, M)
        if all(r.verdict == "bounded" for r in check_weight_conditions(w)):
            w_checked += 1
            fs = factor_system(np.ones(M + 1), np.ones(M + 1), w, beta=np.zeros(M + 1))
            ok &= check_lemma_conclusions(fs)["L32"].verdict == "bounded"
    g = lemma32_sequence(weights("unit", 5000))
    n = np.arange(1, g.size, dtype=np.float64)
    spot = rel(g[1:], 1.0 / (n * (n + 1)))
    ok &= spot <= 1e-14 and checked > 0 and w_checked > 0
    record(6, ok, f"L26/L27 hold on all {checked}/9 systems passing C10-C13; "
                  f"L32 holds on all {w_checked}/4 weight families passing C15/C16; "
                  f"unit-weight spot check rel. error {spot:.1e} (tol 1e-14)")


def test_criterion_7_canon1_theorem():
    t0 = time.perf_counter()
    rep = run(parse_scenario(SCENARIOS / "canon1.scn"), "theorem")
    elapsed = time.perf_counter() - t0
    hyp_ok = all(classify(e["verdict"]) == "pass" for e in rep["conditions"].values())
    series = [("index", rep["index"])] + [(f"V{t['r']}", t) for t in rep["decomposition"]["terms"]]
    trend_ok = all(e["verdict"] == "summable_trend" and e["blocks"][-1] < e["blocks"][-2] < e["blocks"][-3]
                   for _, e in series)
    record(7, hyp_ok and trend_ok and elapsed < 30,
           f"{len(rep['conditions'])} hypothesis entries pass/bounded: {hyp_ok}; index and V1-V4 "
           f"summable_trend with strictly decreasing last 3 blocks: {trend_ok}; {elapsed:.1f} s (limit 30 s)")


def test_criterion_8_negative_control():
    path = SCENARIOS / "canon1_negative.scn"
    code = main(["theorem", "--scenario", str(path), "--quiet"])
    rep = run(parse_scenario(path), "theorem")
    failing = [k for k, v in rep["verdicts"].items() if classify(v) == "fail"]
    record(8, code == 1 and bool(failing), f"exit code {code}; failing entries: {', '.join(failing)}")


def test_criterion_9_cli_contract(tmp_path):
    canon = str(SCENARIOS / "canon1.scn")
    outs = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "summab", "theorem", "--scenario", canon, "--json", str(p), "--quiet"],
                       check=True)
        outs.append(p.read_bytes())
    stable = outs[0] == outs[1] == GOLDEN.read_bytes()
    codes = {
        "pass": main(["theorem", "--scenario", canon, "--quiet"]),
        "fail": main(["theorem", "--scenario", str(SCENARIOS / "canon1_negative.scn"), "--quiet"]),
        "inconclusive": main(["theorem", "--scenario", canon, "--horizon", "512", "--quiet"]),
    }
    codes_ok = codes == {"pass": 0, "fail": 1, "inconclusive": 2}
    bad = tmp_path / "bad.scn"
    bad.write_text("terms = alternating\nweights = unit\nmatrix weighted_mean\n")
    proc = subprocess.run([sys.executable, "-m", "summab", "theorem", "--scenario", str(bad)],
                          capture_output=True, text=True)
    malformed_ok = proc.returncode >= 10 and "line 3" in proc.stderr
    record(9, stable and codes_ok and malformed_ok,
           f"golden byte-stable: {stable}; exit codes {codes}; malformed file exit {proc.returncode} "
           f"with line number: {malformed_ok}")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q", "-s"]))
