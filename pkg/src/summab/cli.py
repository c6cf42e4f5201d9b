"""``summab``: run hypothesis checks, indices and the split on a scenario.

Exit codes: 0 every check passes, 1 at least one fails or trends divergent,
2 inconclusive entries but no failures, 10 usage error, 11 scenario error,
12 domain error while computing, 13 output error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import DomainError
from .conditions import (
    FactorSystem,
    check_hypotheses,
    check_lemma_conclusions,
    check_nondecreasing,
    factor_system,
)
from .decomposition import (
    abel_splits,
    direct_index,
    minkowski_excess,
    residual_max,
    split_table,
    term_index_partials,
)
from .families import FamilySpec, generate, load_tabulated
from .matrices import (
    NormalMatrix,
    cesaro_matrix,
    check_matrix_conditions,
    custom_matrix,
    identity_matrix,
    load_matrix_csv,
    weighted_mean_matrix,
)
from .reports import classify, rollup
from .scenario import Scenario, ScenarioError, parse_scenario
from .seqcore import RealSequence, WeightSequence, partial_sums, weight_partials
from .summability import convergence_diagnostic, summability_index
from .decomposition import factored_terms

COMMANDS = ("conditions", "matrix-conditions", "index", "decompose", "theorem", "reduce")
REDUCTION_TOL = 1e-12

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_SCENARIO, EXIT_DOMAIN, EXIT_OUTPUT = 10, 11, 12, 13


@dataclass
class Workspace:
    """Every sequence a scenario resolves to, at horizon ``N``."""

    scenario: Scenario
    a: RealSequence
    s: RealSequence
    w: WeightSequence
    fs: FactorSystem
    A: NormalMatrix
    t: RealSequence

    @property
    def N(self):
        return self.scenario.horizon


def build_matrix(spec: FamilySpec, w: WeightSequence, N: int, base_dir=None) -> NormalMatrix:
    if spec.name == "weighted_mean":
        return weighted_mean_matrix(w, N)
    if spec.name == "cesaro":
        return cesaro_matrix(spec.params["alpha"], N)
    if spec.name == "identity":
        return identity_matrix(N)
    path = Path(spec.params["path"])
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    A = load_matrix_csv(path)
    if A.horizon < N:
        raise DomainError(f"matrix CSV {path} has horizon {A.horizon} < {N}")
    return custom_matrix(A.to_dense()[: N + 1, : N + 1])


def materialize(sc: Scenario) -> Workspace:
    N, base = sc.horizon, sc.base_dir
    # one extra index so forward differences reach n = N
    X = generate("X", sc.X, N + 1, base_dir=base)
    lam = generate("lambda", sc.lam, N + 1, X=X.values, base_dir=base)
    p = generate("weights", sc.weights, N + 1, base_dir=base)
    w_ext = weight_partials(p)
    if sc.beta is None:
        fs = factor_system(X, lam, w_ext, sc.k)
    else:
        beta = RealSequence(load_tabulated(_path(sc.beta.params["path"], base), N, "beta"), "tabulated",
                            sc.beta.params)
        fs = factor_system(X.truncate(N), lam.truncate(N), w_ext.truncate(N), sc.k, beta=beta)
    w = w_ext.truncate(N)
    a = generate("terms", sc.terms, N, base_dir=base)
    s = partial_sums(a)
    A = build_matrix(sc.matrix, w, N, base)
    t = factored_terms(a, w, lam.truncate(N))
    # splits read λ_{n+1} and p_{n+1} only for n < N, so horizon N suffices
    return Workspace(sc, a, s, w, fs, A, t)


def _path(p, base):
    p = Path(p)
    return p if p.is_absolute() or base is None else Path(base) / p


def _tol(ws, key):
    return ws.scenario.tolerances[key]


def section_conditions(ws: Workspace) -> tuple[dict, dict]:
    sc = ws.scenario
    rep = check_hypotheses(
        ws.fs, ws.s.values, sc.preset, ws.A,
        slope_tol=_tol(ws, "slope_tol"), beta_tol=_tol(ws, "beta_tol"), ratio_cap=_tol(ws, "ratio_cap"),
    )
    rep = rep.merge(check_lemma_conclusions(ws.fs, _tol(ws, "slope_tol"), _tol(ws, "block_rho")))
    notes = {}
    if "X_nondec" not in rep:
        # reported for reference; the almost-increasing check is the binding one
        notes["X_nondec"] = check_nondecreasing(ws.fs.X).as_dict()
    return rep.as_dict(), notes


def section_matrix_conditions(ws: Workspace) -> dict:
    rep = check_matrix_conditions(ws.A, ws.w, ws.N, _tol(ws, "slope_tol"))
    return rep.as_dict()


def _index_dict(ix, diag) -> dict:
    out = {
        "method": ix.method,
        "k": ix.k,
        "T_final": ix.final,
        "blocks": [float(b) for b in diag.blocks],
        "verdict": diag.verdict,
    }
    out.update({k: v for k, v in ix.params.items()})
    return out


def compute_index(ws: Workspace):
    sc = ws.scenario
    t = ws.t.values
    if sc.index_method == "matrix":
        ix = summability_index("matrix", sc.k, A=ws.A, w=ws.w, a=t)
    elif sc.index_method == "weighted":
        ix = summability_index("weighted", sc.k, s=np.cumsum(t), w=ws.w)
    else:
        ix = summability_index("cesaro", sc.k, s=np.cumsum(t), alpha=sc.index_alpha)
    return ix, convergence_diagnostic(ix, rho=_tol(ws, "block_rho"))


def section_index(ws: Workspace) -> tuple[dict, object]:
    ix, diag = compute_index(ws)
    out = _index_dict(ix, diag)
    out["series"] = "factored"
    return out, ix


def section_decomposition(ws: Workspace):
    sc = ws.scenario
    splits = abel_splits(ws.A.derive(), ws.s.values, ws.w, ws.fs.lam.values, ws.N)
    parts = term_index_partials(splits, ws.w, sc.k, rho=_tol(ws, "block_rho"))
    full = direct_index(splits, ws.w, sc.k)
    rmax = residual_max(splits)
    tol = _tol(ws, "residual_tol")
    out = {
        "residual_max": rmax,
        "residual_tol": tol,
        "residual_verdict": "pass" if rmax <= tol else "fail",
        "minkowski_excess": minkowski_excess(full, parts, sc.k),
        "terms": [p.as_dict() for p in parts],
    }
    return out, splits, parts


def _rel_diff(x, y) -> float:
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    scale = np.maximum(np.abs(x), np.abs(y))
    d = np.abs(x - y)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(scale > 0, d / scale, 0.0)
    return float(r.max()) if r.size else 0.0


def reductions(t, w: WeightSequence, k: float, N: int) -> list:
    """The specializations of the general matrix index, as numeric identities.

    With ``P_n = n + 1`` for unit weights, ``(P_n/p_n)^(k-1)`` is
    ``(n+1)^(k-1)``; the Cesàro and ``|A|_k`` indices weight by ``n^(k-1)``,
    so those two coincide with the weighted index only after rescaling each
    summand by that factor, and unscaled only at ``k = 1``. Comparisons are
    between partial sums: single summands can be tiny differences of means
    and carry cancellation error well above the tolerance.
    """
    t = np.asarray(t, dtype=np.float64)[: N + 1]
    s = np.cumsum(t)
    n = np.arange(N + 1, dtype=np.float64)
    out = []

    wm = weighted_mean_matrix(w, N)
    lhs = summability_index("matrix", k, A=wm, w=w, a=t)
    rhs = summability_index("weighted", k, s=s, w=w)
    out.append(("matrix_weighted_mean_vs_riesz", lhs.partials.values, rhs.partials.values))

    unit = weight_partials(np.ones(N + 1))
    wu = summability_index("weighted", k, s=s, w=unit)
    c1 = summability_index("cesaro", k, s=s, alpha=1.0)
    shift = np.ones(N + 1)
    shift[1:] = ((n[1:] + 1.0) / n[1:]) ** (k - 1.0)
    out.append(("riesz_unit_vs_cesaro1_rescaled", wu.partials.values, np.cumsum(shift * c1.summands)))
    if k == 1.0:
        out.append(("riesz_unit_vs_cesaro1", wu.partials.values, c1.partials.values))

    ident = summability_index("matrix", k, A=identity_matrix(N), w=unit, a=t)
    direct = np.zeros(N + 1)
    direct[1:] = (n[1:] + 1.0) ** (k - 1.0) * np.abs(t[1:]) ** k
    out.append(("identity_unit_vs_terms", ident.summands, direct))
    if k == 1.0:
        plain = np.cumsum(np.concatenate(([0.0], n[1:] ** (k - 1.0) * np.abs(t[1:]) ** k)))
        out.append(("identity_unit_vs_terms_partials", ident.partials.values, plain))

    return [
        {"name": name, "max_rel_diff": _rel_diff(x, y), "tol": REDUCTION_TOL,
         "verdict": "pass" if _rel_diff(x, y) <= REDUCTION_TOL else "fail"}
        for name, x, y in out
    ]


def section_reduce(ws: Workspace) -> dict:
    sc = ws.scenario
    out = {"identities": reductions(ws.t.values, ws.w, sc.k, ws.N)}
    # with a weighted-mean matrix the matrix conditions hold identically,
    # so the matrix theorem's hypotheses collapse to the weighted-mean ones
    wm = weighted_mean_matrix(ws.w, ws.N)
    mc = check_matrix_conditions(wm, ws.w, ws.N, _tol(ws, "slope_tol"))
    out["weighted_mean_matrix_conditions"] = mc.as_dict()
    return out


def run(sc: Scenario, command: str, dump_dir=None) -> dict:
    """Run one command and return the JSON-ready report."""
    if command not in COMMANDS:
        raise DomainError(f"unknown command {command!r}")
    ws = materialize(sc)
    report = {"scenario": sc.as_dict(), "command": command}
    dumps = {}
    if command in ("conditions", "theorem"):
        report["conditions"], notes = section_conditions(ws)
        if notes:
            report["notes"] = notes
    if command == "matrix-conditions":
        report["conditions"] = section_matrix_conditions(ws)
    if command in ("index", "theorem"):
        report["index"], ix = section_index(ws)
        dumps["index"] = (["n", "value", "summand"],
                          [np.arange(ix.horizon + 1), ix.partials.values, ix.summands])
    if command in ("decompose", "theorem"):
        report["decomposition"], splits, _ = section_decomposition(ws)
        tab = split_table(splits)
        dumps["decomposition"] = (["n", "value", "v1", "v2", "v3", "v4", "residual"],
                                  [tab[:, i] for i in range(7)])
    if command == "reduce":
        report["reductions"] = section_reduce(ws)
    report["verdicts"] = verdict_summary(report)
    report["overall"] = rollup(report["verdicts"].values())
    report["provenance"] = {
        "tool": "summab",
        "version": __version__,
        "beta": ws.fs.provenance.get("beta"),
        "defaults_filled": list(sc.defaults),
        "difference_convention": "Δx_n = x_n - x_{n+1}",
        "partial_sums": "s_n = a_0 + ... + a_n; split uses s_n - s_0",
    }
    if dump_dir is not None:
        n = np.arange(ws.N + 1)
        dumps["terms"] = (["n", "value", "s", "t"], [n, ws.a.values, ws.s.values, ws.t.values])
        for key, seq in (("X", ws.fs.X), ("lambda", ws.fs.lam), ("beta", ws.fs.beta), ("p", ws.w.p)):
            dumps[key] = (["n", "value"], [np.arange(seq.horizon + 1), seq.values])
        write_dumps(dump_dir, dumps)
    return sanitize(report)


def verdict_summary(report: dict) -> dict:
    out = {}
    for cid, entry in report.get("conditions", {}).items():
        out[f"conditions.{cid}"] = entry["verdict"]
    if "index" in report:
        out["index"] = report["index"]["verdict"]
    if "decomposition" in report:
        dec = report["decomposition"]
        out["decomposition.residual"] = dec["residual_verdict"]
        for term in dec["terms"]:
            out[f"decomposition.V{term['r']}"] = term["verdict"]
    if "reductions" in report:
        for item in report["reductions"]["identities"]:
            out[f"reductions.{item['name']}"] = item["verdict"]
        for cid, entry in report["reductions"]["weighted_mean_matrix_conditions"].items():
            out[f"reductions.{cid}"] = entry["verdict"]
    return out


def exit_code(report: dict) -> int:
    overall = report["overall"]
    return {"pass": EXIT_OK, "fail": EXIT_FAIL}.get(overall, EXIT_INCONCLUSIVE)


def sanitize(obj):
    """Plain-Python, JSON-safe copy (numpy scalars unwrapped, inf as string)."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.ndarray):
        return sanitize(obj.tolist())
    return obj


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def write_dumps(dump_dir, dumps: dict) -> None:
    d = Path(dump_dir)
    d.mkdir(parents=True, exist_ok=True)
    for name, (header, cols) in dumps.items():
        with open(d / f"{name}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in zip(*cols):
                writer.writerow([int(row[0])] + [repr(float(x)) for x in row[1:]])


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="summab", description=__doc__.splitlines()[0].strip("`"))
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--scenario", required=True, type=Path, help="scenario file (key = value lines)")
    parser.add_argument("--horizon", type=int, help="override the scenario horizon N")
    parser.add_argument("--k", type=float, help="override the exponent k")
    parser.add_argument("--slope-tol", type=float, help="override tolerances.slope_tol")
    parser.add_argument("--dump", type=Path, metavar="DIR", help="write CSV series to DIR")
    parser.add_argument("--json", type=Path, metavar="PATH", help="write the JSON report to PATH")
    parser.add_argument("--quiet", action="store_true", help="print nothing on success")
    parser.add_argument("--version", action="version", version=f"summab {__version__}")
    return parser


def _summary(report: dict) -> str:
    lines = [f"{report['scenario']['name']} / {report['command']}: {report['overall']}"]
    for key, verdict in report["verdicts"].items():
        mark = {"pass": "ok", "fail": "FAIL"}.get(classify(verdict), "??")
        lines.append(f"  [{mark:>4}] {key}: {verdict}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        sc = parse_scenario(args.scenario)
        changes = {}
        if args.horizon is not None:
            changes["horizon"] = args.horizon
        if args.k is not None:
            changes["k"] = args.k
        if args.slope_tol is not None:
            changes["tolerances"] = {**sc.tolerances, "slope_tol": args.slope_tol}
        if changes:
            sc = sc.replace(**changes)
    except ScenarioError as exc:
        print(f"summab: scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    try:
        report = run(sc, args.command, args.dump)
    except DomainError as exc:
        print(f"summab: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = to_json(report)
    try:
        if args.json is not None:
            args.json.parent.mkdir(parents=True, exist_ok=True)
            args.json.write_text(text)
            if not args.quiet:
                sys.stdout.write(_summary(report))
        elif not args.quiet:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"summab: cannot write report: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
