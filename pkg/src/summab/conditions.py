"""Hypothesis checkers for summability-factor theorems on ``sum a_n P_n lambda_n / (n p_n)``.

Every asymptotic ``O(.)`` hypothesis becomes a :class:`GrowthWitness`;
pointwise inequalities are checked exactly and report the first violating
index. Condition ids are stable strings used in JSON reports:

=============  =====================================================
``C10``        ``|Δλ_n| <= β_n``
``C11``        ``β_n -> 0``
``C12``        ``sum n |Δβ_n| X_n = O(1)``
``C13``        ``|λ_n| X_n = O(1)``
``C14``        ``sum_{n<=m} |s_n|^k / n = O(X_m)``
``C15``        ``P_n = O(n p_n)``
``C16``        ``P_n Δp_n = O(p_n p_{n+1})``
``C17``        ``sum_{n<=m} |s_n|^k / (n X_n^(k-1)) = O(X_m)``
``L26``        ``n X_n β_n = O(1)``
``L27``        ``sum β_n X_n < inf`` (dyadic block trend)
``L32``        ``Δ(P_n / (n p_n)) = O(1/n)``
``R1``, ``R2``  ``λ_n`` bounded, ``Δλ_n = O(1/n)``
``X_nondec``   ``X`` positive and non-decreasing
``X_almost``   ``X`` almost increasing
``M22``-``M25``  matrix entry conditions, see :mod:`summab.matrices`
=============  =====================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import DomainError, check_exponent, check_vector
from .matrices import NormalMatrix, check_matrix_conditions
from .reports import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    ConditionResult,
    HypothesisReport,
    boolean_result,
    witness_result,
)
from .seqcore import (
    DEFAULT_SLOPE_TOL,
    RealSequence,
    WeightSequence,
    almost_increasing_witness,
    as_sequence,
    growth_witness,
)
from .summability import DEFAULT_BLOCK_RHO, MIN_DIAGNOSTIC_HORIZON, convergence_diagnostic

INEQ_TOL = 1e-12
DEFAULT_BETA_TOL = 1e-3
DEFAULT_RATIO_CAP = 100.0

PRESETS = {
    "thm21": ("X_nondec", "C10", "C11", "C12", "C13", "C14", "C15", "C16"),
    "thm22": ("X_nondec", "C10", "C11", "C12", "C13", "C15", "C16", "C17"),
    "thm31": ("X_almost", "C10", "C11", "C12", "C13", "C15", "C16", "C17",
              "M22", "M23", "M24", "M25"),
}
LEMMA_IDS = ("L26", "L27", "L32", "R1", "R2")


@dataclass(frozen=True, eq=False)
class FactorSystem:
    """The sequences ``X``, ``λ``, ``β``, the weights and the exponent ``k``."""

    X: RealSequence
    lam: RealSequence
    beta: RealSequence
    w: WeightSequence
    k: float = 1.0
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        check_exponent(self.k)
        horizons = {self.X.horizon, self.lam.horizon, self.beta.horizon, self.w.horizon}
        if len(horizons) != 1:
            raise DomainError(
                f"horizons differ: X={self.X.horizon} lambda={self.lam.horizon} "
                f"beta={self.beta.horizon} p={self.w.horizon}"
            )
        check_vector(self.X, "X", positive=True)
        check_vector(self.beta, "beta", nonnegative=True)

    @property
    def horizon(self) -> int:
        return self.X.horizon


def factor_system(X, lam, w: WeightSequence, k: float = 1.0, beta=None) -> FactorSystem:
    """Build a :class:`FactorSystem`, defaulting ``β_n = |Δλ_n|``.

    The default is the smallest ``β`` satisfying ``C10``. It needs
    ``λ_{n+1}``, so the system's horizon is one less than ``λ``'s.
    """
    X, lam = as_sequence(X, "X"), as_sequence(lam, "lambda")
    if beta is None:
        N = lam.horizon - 1
        b = np.abs(lam.values[:-1] - lam.values[1:])
        beta = RealSequence(b, "auto", {"rule": "|Δλ|"})
        prov = {"beta": "auto: beta_n = |lambda_n - lambda_{n+1}|"}
    else:
        beta = as_sequence(beta, "beta")
        N = min(X.horizon, lam.horizon, beta.horizon, w.horizon)
        beta = beta.truncate(N)
        prov = {"beta": beta.origin}
    N = min(N, X.horizon, w.horizon)
    return FactorSystem(X.truncate(N), lam.truncate(N), beta.truncate(N), w.truncate(N), k, prov)


def _diff(x: np.ndarray) -> np.ndarray:
    return x[:-1] - x[1:]


def _first(mask: np.ndarray, offset: int = 0):
    return int(np.argmax(mask)) + offset if mask.any() else None


def _tail_trend(x: np.ndarray) -> float:
    n = np.arange(x.size, dtype=np.float64)
    n -= n.mean()
    return float(np.dot(n, x - x.mean()) / np.dot(n, n))


def check_beta_null(beta, tol: float = DEFAULT_BETA_TOL) -> ConditionResult:
    """``β_n -> 0``: last-quarter max below ``tol`` and a falling last-quarter trend.

    A pure threshold would pass sequences that creep upward below ``tol``.
    """
    b = check_vector(beta, "beta")
    tail = b[(3 * (b.size - 1)) // 4 :]
    tail_max = float(tail.max())
    trend = 0.0 if tail.size < 2 or not tail.any() else _tail_trend(tail)
    small = tail_max < tol
    falling = trend < 0 or not tail.any()
    if small and falling:
        verdict = PASS
    elif not small and not falling:
        verdict = FAIL
    else:
        verdict = INCONCLUSIVE
    return ConditionResult("C11", verdict, detail={"tail_max": tail_max, "tail_trend": trend, "tol": tol})


def check_factor_conditions(
    fs: FactorSystem,
    slope_tol: float = DEFAULT_SLOPE_TOL,
    beta_tol: float = DEFAULT_BETA_TOL,
) -> HypothesisReport:
    """Conditions ``C10``-``C13`` on ``(X, λ, β)``."""
    N = fs.horizon
    if N < 3:
        raise DomainError(f"factor conditions need horizon >= 3, got {N}")
    X, lam, beta = fs.X.values, fs.lam.values, fs.beta.values

    dlam = np.abs(_diff(lam))
    c10 = boolean_result("C10", _first(dlam > beta[:-1] + INEQ_TOL))

    c11 = check_beta_null(beta, beta_tol)

    n = np.arange(N, dtype=np.float64)
    summand = n * np.abs(_diff(beta)) * X[:-1]
    summand[0] = 0.0
    T = np.cumsum(summand)
    c12 = witness_result("C12", growth_witness(T, np.ones_like(T), 1, slope_tol),
                         {"partial_sum_final": float(T[-1])})

    c13 = witness_result("C13", growth_witness(np.abs(lam) * X, np.ones(N + 1), 1, slope_tol))
    return HypothesisReport.of(c10, c11, c12, c13)


def moment_sums(s, X, k: float, variant: str = "thm22") -> np.ndarray:
    """``M_m`` for ``m = 0..N`` (``M_0 = 0``)."""
    k = check_exponent(k)
    s = check_vector(s, "s")
    X = check_vector(X, "X", positive=True)
    N = min(s.size, X.size) - 1
    s, X = s[: N + 1], X[: N + 1]
    summand = np.zeros(N + 1)
    n = np.arange(1, N + 1, dtype=np.float64)
    summand[1:] = np.abs(s[1:]) ** k / n
    if variant == "thm22":
        if k != 1.0:
            summand[1:] /= X[1:] ** (k - 1.0)
    elif variant != "thm21":
        raise DomainError(f"unknown moment variant {variant!r}")
    return np.cumsum(summand)


def check_moment_condition(s, X, k: float, variant: str = "thm22",
                           slope_tol: float = DEFAULT_SLOPE_TOL):
    """Witness for ``M_m = O(X_m)``; ``thm21`` omits the ``X_n^(k-1)`` divisor."""
    M = moment_sums(s, X, k, variant)
    X = check_vector(X, "X")[: M.size]
    return growth_witness(M, X, 1, slope_tol)


def check_weight_conditions(w: WeightSequence, slope_tol: float = DEFAULT_SLOPE_TOL) -> HypothesisReport:
    p, P = w.p.values, w.P.values
    N = p.size - 1
    n = np.arange(N + 1, dtype=np.float64)
    c15 = growth_witness(P, n * p, 1, slope_tol)
    # (P_n/p_n) * |Δp_n|/p_{n+1}: same ratio as P_n|Δp_n| / (p_n p_{n+1}) without
    # forming p_n p_{n+1}, which overflows for geometric weights
    ratio16 = (P[:-1] / p[:-1]) * (np.abs(_diff(p)) / p[1:])
    c16 = growth_witness(ratio16, np.ones(N), 1, slope_tol)
    return HypothesisReport.of(witness_result("C15", c15), witness_result("C16", c16))


def lemma32_sequence(w: WeightSequence) -> np.ndarray:
    """``|Δ(P_n/(n p_n))|`` for ``n = 0..N-1`` (entry 0 is unused and set to 0).

    Evaluated as ``|(P_n/p_n)((n+1) - n p_n/p_{n+1}) - n| / (n(n+1))``, which
    keeps unit weights exact instead of subtracting two numbers near 1.
    """
    p, P = w.p.values, w.P.values
    N = p.size - 1
    n = np.arange(1, N, dtype=np.float64)
    out = np.zeros(N)
    num = (P[1:N] / p[1:N]) * ((n + 1.0) - n * (p[1:N] / p[2:])) - n
    out[1:] = np.abs(num) / (n * (n + 1.0))
    return out


def check_lemma_conclusions(
    fs: FactorSystem,
    slope_tol: float = DEFAULT_SLOPE_TOL,
    rho: float = DEFAULT_BLOCK_RHO,
) -> HypothesisReport:
    """Conclusions ``L26``, ``L27``, ``L32``, ``R1``, ``R2`` (they should
    follow whenever the matching hypotheses hold)."""
    N = fs.horizon
    X, lam, beta = fs.X.values, fs.lam.values, fs.beta.values
    n = np.arange(N + 1, dtype=np.float64)

    l26 = witness_result("L26", growth_witness(n * X * beta, np.ones(N + 1), 1, slope_tol))

    summand = beta * X
    summand[0] = 0.0
    T = np.cumsum(summand)
    if N >= MIN_DIAGNOSTIC_HORIZON:
        diag = convergence_diagnostic(T, rho=rho)
        l27 = ConditionResult("L27", diag.verdict, detail={**diag.as_dict(), "T_final": float(T[-1])})
    else:
        l27 = ConditionResult("L27", INCONCLUSIVE,
                              detail={"reason": f"horizon {N} < {MIN_DIAGNOSTIC_HORIZON}"})

    inv_n = np.ones(N)
    inv_n[1:] = 1.0 / n[1:N]
    l32 = witness_result("L32", growth_witness(lemma32_sequence(fs.w), inv_n, 1, slope_tol))

    r1 = witness_result("R1", growth_witness(np.abs(lam), np.ones(N + 1), 1, slope_tol))
    r2 = witness_result("R2", growth_witness(np.abs(_diff(lam)), inv_n, 1, slope_tol))
    return HypothesisReport.of(l26, l27, l32, r1, r2)


def check_nondecreasing(X) -> ConditionResult:
    x = check_vector(X, "X", positive=True)
    return boolean_result("X_nondec", _first(x[1:] < x[:-1], 1))


def check_almost_increasing(X, ratio_cap: float = DEFAULT_RATIO_CAP,
                            slope_tol: float = DEFAULT_SLOPE_TOL) -> ConditionResult:
    ai = almost_increasing_witness(X, ratio_cap, slope_tol)
    return witness_result("X_almost", ai.witness, {"A": ai.A, "B": ai.B, "ratio_cap": ratio_cap})


def check_hypotheses(
    fs: FactorSystem,
    s,
    preset: str = "thm31",
    A: NormalMatrix | None = None,
    slope_tol: float = DEFAULT_SLOPE_TOL,
    beta_tol: float = DEFAULT_BETA_TOL,
    ratio_cap: float = DEFAULT_RATIO_CAP,
) -> HypothesisReport:
    """Every hypothesis of one theorem preset, in the preset's order.

    ``s`` are the partial sums used by the moment conditions. ``thm31``
    also needs the matrix ``A``.
    """
    if preset not in PRESETS:
        raise DomainError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    ids = PRESETS[preset]
    s = check_vector(s, "s")[: fs.horizon + 1]
    found = {}
    if "X_nondec" in ids:
        found["X_nondec"] = check_nondecreasing(fs.X)
    if "X_almost" in ids:
        found["X_almost"] = check_almost_increasing(fs.X, ratio_cap, slope_tol)
    for r in check_factor_conditions(fs, slope_tol, beta_tol):
        found[r.id] = r
    if "C14" in ids:
        found["C14"] = witness_result("C14", check_moment_condition(s, fs.X, fs.k, "thm21", slope_tol))
    if "C17" in ids:
        found["C17"] = witness_result("C17", check_moment_condition(s, fs.X, fs.k, "thm22", slope_tol))
    for r in check_weight_conditions(fs.w, slope_tol):
        found[r.id] = r
    if "M22" in ids:
        if A is None:
            raise DomainError(f"preset {preset} needs a matrix")
        for r in check_matrix_conditions(A, fs.w, fs.horizon, slope_tol):
            found[r.id] = r
    return HypothesisReport({cid: found[cid] for cid in ids})
