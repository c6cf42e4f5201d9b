"""Normal matrices, their series-to-sequence / series-to-series companions,
and the entry conditions a summability-factor theorem places on them.

A normal matrix is lower triangular with a nonzero diagonal. Closed-form
kinds (weighted mean, Cesàro, identity) compute rows on demand; only the
``custom`` kind stores a dense triangle.

Given ``A``, the companions are

    abar(n, v) = a(n, v) + a(n, v+1) + ... + a(n, n)
    ahat(n, v) = abar(n, v) - abar(n-1, v)        (ahat(0, 0) = a(0, 0))

so that ``A_n(s) = sum_v abar(n, v) a_v`` and
``A_n(s) - A_{n-1}(s) = sum_v ahat(n, v) a_v`` for ``s`` the partial sums of ``a``.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ._validation import DomainError, check_index, check_vector
from .reports import HypothesisReport, boolean_result, witness_result
from .seqcore import DEFAULT_SLOPE_TOL, WeightSequence, growth_witness
from .summability import _coeff_array, _check_order

WEIGHTED_MEAN = "weighted_mean"
CESARO = "cesaro"
IDENTITY = "identity"
CUSTOM = "custom"

ROW_SUM_TOL = 1e-12


def _suffix_sum(x: np.ndarray) -> np.ndarray:
    return np.cumsum(x[::-1])[::-1]


class NormalMatrix:
    """Lower-triangular matrix with nonzero diagonal, rows ``0..horizon``.

    Instances are immutable. Use the factory functions
    :func:`weighted_mean_matrix`, :func:`cesaro_matrix`,
    :func:`identity_matrix` and :func:`custom_matrix` to build one.
    """

    kind = CUSTOM

    def __init__(self, horizon: int):
        if horizon < 0:
            raise DomainError(f"horizon must be nonnegative, got {horizon}")
        self.horizon = int(horizon)

    def __repr__(self):
        return f"{type(self).__name__}(kind={self.kind!r}, horizon={self.horizon})"

    @property
    def params(self) -> dict:
        return {}

    def row(self, n: int) -> np.ndarray:
        """Entries ``a(n, 0..n)``."""
        n = check_index(n, self.horizon)
        return self._row(n)

    def _row(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def entry(self, n: int, v: int) -> float:
        if v < 0 or v > n:
            return 0.0
        return float(self.row(n)[v])

    __call__ = entry

    def diagonal(self) -> np.ndarray:
        return np.array([self._row(n)[n] for n in range(self.horizon + 1)])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.horizon + 1, self.horizon + 1))
        for n in range(self.horizon + 1):
            out[n, : n + 1] = self._row(n)
        return out

    def apply(self, s) -> np.ndarray:
        """``A_n(s)`` for every ``n`` up to the shorter of the two horizons."""
        s = check_vector(s, "s")
        N = min(self.horizon, s.size - 1)
        return np.array([np.dot(self._row(n), s[: n + 1]) for n in range(N + 1)])

    def derive(self, generic: bool = False) -> "DerivedMatrices":
        return DerivedMatrices(self, generic=generic)

    # closed forms for the companions; None falls back to summation
    def _abar_closed(self, n: int):
        return None

    def _ahat_closed(self, n: int):
        return None


class WeightedMeanMatrix(NormalMatrix):
    """``a(n, v) = p_v / P_n``, the Riesz (N-bar, p) mean."""

    kind = WEIGHTED_MEAN

    def __init__(self, w: WeightSequence, horizon: int):
        if horizon > w.horizon:
            raise DomainError(f"weights have horizon {w.horizon} < {horizon}")
        super().__init__(horizon)
        self.weights = w.truncate(horizon)
        self._p = self.weights.p.values
        self._P = self.weights.P.values

    @property
    def params(self):
        return {"weights": self.weights.p.origin, **dict(self.weights.p.params)}

    def _row(self, n):
        return self._p[: n + 1] / self._P[n]

    def apply(self, s):
        s = check_vector(s, "s")
        N = min(self.horizon, s.size - 1)
        return np.cumsum(self._p[: N + 1] * s[: N + 1]) / self._P[: N + 1]

    def _abar_closed(self, n):
        # 1 - P_{v-1}/P_n, written to keep the v = n entry exact
        Pm1 = np.concatenate(([0.0], self._P[:n]))
        return (self._P[n] - Pm1) / self._P[n]

    def _ahat_closed(self, n):
        if n == 0:
            return np.array([1.0])
        Pm1 = np.concatenate(([0.0], self._P[:n]))
        # P_{v-1}/P_{n-1} first: the product P_n P_{n-1} overflows for fast weights
        return (Pm1 / self._P[n - 1]) * (self._p[n] / self._P[n])


class CesaroMatrix(NormalMatrix):
    """``a(n, v) = A_{n-v}^(alpha-1) / A_n^alpha``, the (C, alpha) mean."""

    kind = CESARO

    def __init__(self, alpha: float, horizon: int):
        super().__init__(horizon)
        self.alpha = _check_order(alpha)
        self._lower = _coeff_array(self.alpha - 1.0, self.horizon)
        self._upper = _coeff_array(self.alpha, self.horizon)
        if np.any(self._upper == 0) or not np.all(np.isfinite(self._upper)):
            raise DomainError(f"Cesàro coefficients of order {self.alpha} overflow at horizon {horizon}")

    @property
    def params(self):
        return {"alpha": self.alpha}

    def _row(self, n):
        return self._lower[n::-1] / self._upper[n]

    def apply(self, s):
        s = check_vector(s, "s")
        N = min(self.horizon, s.size - 1)
        return np.convolve(self._lower[: N + 1], s[: N + 1])[: N + 1] / self._upper[: N + 1]

    def _abar_closed(self, n):
        # sum_{m<=M} A_m^(alpha-1) = A_M^alpha
        return self._upper[n::-1] / self._upper[n]

    def _ahat_closed(self, n):
        # abar(n,v) - abar(n-1,v) = v A_{n-v}^(alpha-1) / (n A_n^alpha), no cancellation
        if n == 0:
            return np.array([1.0])
        v = np.arange(n + 1, dtype=np.float64)
        return v * self._lower[n::-1] / (n * self._upper[n])


class IdentityMatrix(NormalMatrix):
    kind = IDENTITY

    def _row(self, n):
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out

    def apply(self, s):
        s = check_vector(s, "s")
        return s[: min(self.horizon, s.size - 1) + 1].copy()

    def _abar_closed(self, n):
        return np.ones(n + 1)

    def _ahat_closed(self, n):
        return self._row(n)


class CustomMatrix(NormalMatrix):
    """Dense lower triangle supplied by the caller."""

    kind = CUSTOM

    def __init__(self, table):
        table = np.array(table, dtype=np.float64)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise DomainError(f"custom matrix must be square, got shape {table.shape}")
        if not np.all(np.isfinite(table)):
            raise DomainError("custom matrix has non-finite entries")
        upper = np.triu(table, 1)
        if np.any(upper):
            n, v = np.argwhere(upper)[0]
            raise DomainError(f"custom matrix is not lower triangular: a({n},{v}) = {table[n, v]!r}")
        diag = np.diag(table)
        if np.any(diag == 0):
            n = int(np.argmax(diag == 0))
            raise DomainError(f"custom matrix is not normal: a({n},{n}) = 0")
        super().__init__(table.shape[0] - 1)
        table.setflags(write=False)
        self._table = table

    def _row(self, n):
        return self._table[n, : n + 1]

    def to_dense(self):
        return self._table.copy()

    def apply(self, s):
        s = check_vector(s, "s")
        N = min(self.horizon, s.size - 1)
        return self._table[: N + 1, : N + 1] @ s[: N + 1]


def weighted_mean_matrix(w: WeightSequence, N: int | None = None) -> WeightedMeanMatrix:
    return WeightedMeanMatrix(w, w.horizon if N is None else N)


def cesaro_matrix(alpha: float, N: int) -> CesaroMatrix:
    return CesaroMatrix(alpha, N)


def identity_matrix(N: int) -> IdentityMatrix:
    return IdentityMatrix(N)


def custom_matrix(rows) -> CustomMatrix:
    """Build a custom matrix from a square array or from ragged rows
    where row ``n`` lists ``a(n, 0..n)``."""
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        return CustomMatrix(rows)
    rows = [list(r) for r in rows]
    N = len(rows) - 1
    table = np.zeros((N + 1, N + 1))
    for n, r in enumerate(rows):
        if len(r) != n + 1:
            raise DomainError(f"row {n} has {len(r)} entries, expected {n + 1}")
        table[n, : n + 1] = r
    return CustomMatrix(table)


def load_matrix_csv(path) -> CustomMatrix:
    """Read a triangle from CSV: line ``n`` (0-based) holds ``n+1`` entries."""
    rows = []
    with open(Path(path), newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            try:
                rows.append([float(c) for c in rec])
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise DomainError(f"{path}: no matrix rows")
    return custom_matrix(rows)


def save_matrix_csv(A: NormalMatrix, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        for n in range(A.horizon + 1):
            writer.writerow([repr(float(x)) for x in A.row(n)])


class DerivedMatrices:
    """The companions ``abar`` and ``ahat`` of a normal matrix.

    With ``generic=False`` closed forms are used where the kind has them;
    ``generic=True`` always sums entries of ``A`` (kept as a test oracle).
    """

    def __init__(self, source: NormalMatrix, generic: bool = False):
        self.source = source
        self.generic = bool(generic)

    @property
    def horizon(self):
        return self.source.horizon

    def abar_row(self, n: int) -> np.ndarray:
        n = check_index(n, self.horizon)
        out = None if self.generic else self.source._abar_closed(n)
        return _suffix_sum(self.source._row(n)) if out is None else out

    def ahat_row(self, n: int) -> np.ndarray:
        n = check_index(n, self.horizon)
        out = None if self.generic else self.source._ahat_closed(n)
        if out is not None:
            return out
        row = self.source._row(n)
        if n == 0:
            return row.copy()
        # suffix sums of the row difference: same value as abar(n) - abar(n-1)
        # but without subtracting two O(1) numbers
        diff = row.copy()
        diff[:n] -= self.source._row(n - 1)
        return _suffix_sum(diff)

    def abar(self, n: int, v: int) -> float:
        return 0.0 if v < 0 or v > n else float(self.abar_row(n)[v])

    def ahat(self, n: int, v: int) -> float:
        return 0.0 if v < 0 or v > n else float(self.ahat_row(n)[v])

    def delta_all(self, a) -> np.ndarray:
        """``sum_v ahat(n, v) a_v`` for every ``n`` the two horizons share."""
        a = check_vector(a, "a")
        N = min(self.horizon, a.size - 1)
        return np.array([np.dot(self.ahat_row(n), a[: n + 1]) for n in range(N + 1)])


def derive(A: NormalMatrix, generic: bool = False) -> DerivedMatrices:
    return DerivedMatrices(A, generic=generic)


def row_transform(A: NormalMatrix, s, n: int) -> float:
    """``A_n(s) = sum_{v<=n} a(n, v) s_v``."""
    s = check_vector(s, "s")
    n = check_index(n, min(A.horizon, s.size - 1))
    return float(np.dot(A._row(n), s[: n + 1]))


def delta_transform_direct(A: NormalMatrix, s, n: int) -> float:
    """``A_n(s) - A_{n-1}(s)``; ``A_0(s)`` at ``n = 0``."""
    if n == 0:
        return row_transform(A, s, 0)
    return row_transform(A, s, n) - row_transform(A, s, n - 1)


def delta_transform_via_ahat(D: DerivedMatrices, a, n: int) -> float:
    """``sum_{v<=n} ahat(n, v) a_v`` where ``a`` are the series terms."""
    a = check_vector(a, "a")
    n = check_index(n, min(D.horizon, a.size - 1))
    return float(np.dot(D.ahat_row(n), a[: n + 1]))


def delta_transforms_direct(A: NormalMatrix, s) -> np.ndarray:
    t = A.apply(s)
    return np.diff(t, prepend=0.0)


def _check_positive(A: NormalMatrix, N: int):
    for n in range(N + 1):
        row = A._row(n)
        if row[n] <= 0:
            raise DomainError(f"matrix is not positive normal: a({n},{n}) = {row[n]!r}")
        neg = row < 0
        if neg.any():
            v = int(np.argmax(neg))
            raise DomainError(f"matrix is not positive: a({n},{v}) = {row[v]!r}")


def check_matrix_conditions(
    A: NormalMatrix,
    w: WeightSequence,
    N: int | None = None,
    slope_tol: float = DEFAULT_SLOPE_TOL,
    start_index: int = 1,
) -> HypothesisReport:
    """Entry conditions on a positive normal matrix.

    ``M22``: every ``abar(n, 0)`` equals 1 (absolute tolerance 1e-12).
    ``M23``: columns are non-increasing below the diagonal, checked exactly.
    ``M24``: witness for ``a(n, n) = O(p_n / P_n)``.
    ``M25``: witness for ``sum_{v=1}^{n-1} a(v, v) ahat(n, v+1) = O(a(n, n))``.

    Violations are report content; only a non-positive matrix raises.
    """
    N = min(A.horizon, w.horizon) if N is None else int(N)
    if N > A.horizon or N > w.horizon:
        raise DomainError(f"N = {N} exceeds matrix or weight horizon")
    _check_positive(A, N)
    D = A.derive()

    m22 = None
    worst = 0.0
    for n in range(N + 1):
        dev = abs(D.abar_row(n)[0] - 1.0)
        worst = max(worst, dev)
        if m22 is None and dev > ROW_SUM_TOL:
            m22 = n

    m23 = None
    prev = A._row(0)
    for n in range(1, N + 1):
        cur = A._row(n)
        bad = prev < cur[:n]
        if bad.any():
            m23 = (n, int(np.argmax(bad)))
            break
        prev = cur

    diag = np.array([A._row(n)[n] for n in range(N + 1)])
    p, P = w.p.values[: N + 1], w.P.values[: N + 1]
    w24 = growth_witness(diag, p / P, start_index=start_index, slope_tol=slope_tol)

    lhs = np.zeros(N + 1)
    for n in range(2, N + 1):
        # ahat(n, v+1) for v = 1..n-1 is ahat_row(n)[2:n+1]
        lhs[n] = np.dot(diag[1:n], D.ahat_row(n)[2 : n + 1])
    w25 = growth_witness(lhs, diag, start_index=start_index, slope_tol=slope_tol)

    return HypothesisReport.of(
        boolean_result("M22", m22, {"max_deviation": worst}),
        boolean_result("M23", m23),
        witness_result("M24", w24),
        witness_result("M25", w25),
    )
