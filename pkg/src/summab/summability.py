"""Cesàro and Riesz means and the absolute summability indices.

Three indices are supported, each a partial-sum series ``T_n`` starting at
``n = 1``:

* ``cesaro``:   sum of ``n^(k-1) |u_n - u_{n-1}|^k`` with ``u`` the (C, alpha) means
* ``weighted``: sum of ``(P_n/p_n)^(k-1) |w_n - w_{n-1}|^k`` with ``w`` the Riesz means
* ``matrix``:   sum of ``(P_n/p_n)^(k-1) |A_n(s) - A_{n-1}(s)|^k`` for a normal matrix ``A``

A finite horizon cannot decide convergence, so :func:`convergence_diagnostic`
only reports a trend from dyadic blocks ``T_{2^(j+1)} - T_{2^j}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import DomainError, check_exponent, check_index, check_vector
from .seqcore import RealSequence, WeightSequence, as_sequence, partial_sums

SUMMABLE = "summable_trend"
DIVERGENT = "divergent_trend"
INCONCLUSIVE = "inconclusive"

DEFAULT_BLOCK_RHO = 0.95
DEFAULT_BLOCKS = 3
MIN_DIAGNOSTIC_HORIZON = 2**7
_LOG_SPACE_FROM = 1000


def _check_order(alpha):
    alpha = float(alpha)
    if not alpha > -1:
        raise DomainError(f"Cesàro order must exceed -1, got {alpha!r}")
    return alpha


def cesaro_coeff(alpha: float, n: int) -> float:
    """``A_n^alpha = (alpha+1)(alpha+2)...(alpha+n) / n!``, zero for ``n < 0``.

    Uses the plain product up to ``n = 1000`` and a signed log-sum beyond.
    """
    alpha = _check_order(alpha)
    return _coeff(alpha, int(n))


def _coeff(order: float, n: int) -> float:
    if n < 0:
        return 0.0
    if n <= _LOG_SPACE_FROM:
        out = 1.0
        for i in range(1, n + 1):
            out *= (order + i) / i
        return out
    return float(_coeff_array(order, n)[n])


_EXACT_ORDER_MAX = 8


def _integer_coeffs(order: int, N: int) -> np.ndarray:
    # binomials in exact integer arithmetic, rounded once
    if order == -1:
        out = np.zeros(N + 1)
        out[0] = 1.0
        return out
    c, vals = 1, [1.0]
    for m in range(1, N + 1):
        c = c * (order + m) // m
        vals.append(float(c))
    return np.array(vals)


def _coeff_array(order: float, N: int) -> np.ndarray:
    """``A_m^order`` for ``m = 0..N``; ``order`` may be below -1 here."""
    if order == int(order) and -1 <= order <= _EXACT_ORDER_MAX:
        return _integer_coeffs(int(order), N)
    i = np.arange(1, N + 1, dtype=np.float64)
    factors = (order + i) / i
    out = np.empty(N + 1)
    out[0] = 1.0
    head = min(N, _LOG_SPACE_FROM)
    out[1 : head + 1] = np.cumprod(factors[:head])
    if N > head:
        tail = factors[head:]
        # a zero factor sends the log to -inf, so every later coefficient is 0
        with np.errstate(divide="ignore"):
            logs = np.log(abs(out[head])) + np.cumsum(np.log(np.abs(tail)))
        sign = np.sign(out[head]) * np.cumprod(np.sign(tail))
        out[head + 1 :] = sign * np.exp(logs)
    return out


def cesaro_coeffs(alpha: float, N: int) -> np.ndarray:
    """Vector of ``A_m^alpha`` for ``m = 0..N``."""
    return _coeff_array(_check_order(alpha), int(N))


def cesaro_means(s, alpha: float) -> np.ndarray:
    """All means ``u_n^alpha``, ``n = 0..N``, by one discrete convolution."""
    alpha = _check_order(alpha)
    s = check_vector(s, "s")
    N = s.size - 1
    upper = _coeff_array(alpha, N)
    if alpha == 1.0:
        # A^0 is all ones: a running mean, no quadratic convolution
        return np.cumsum(s) / upper
    lower = _coeff_array(alpha - 1.0, N)
    return np.convolve(lower, s)[: N + 1] / upper


def cesaro_mean(s, alpha: float, n: int) -> float:
    """``u_n^alpha = (1/A_n^alpha) * sum_{v<=n} A_{n-v}^(alpha-1) s_v``."""
    alpha = _check_order(alpha)
    s = check_vector(s, "s")
    n = check_index(n, s.size - 1)
    lower = _coeff_array(alpha - 1.0, n)
    return float(np.dot(lower[::-1], s[: n + 1]) / _coeff(alpha, n))


def riesz_means(s, w: WeightSequence) -> np.ndarray:
    s = check_vector(s, "s")
    p, P = w.p.values, w.P.values
    if s.size > p.size:
        raise DomainError(f"weights have horizon {p.size - 1}, series needs {s.size - 1}")
    N = s.size - 1
    return np.cumsum(p[: N + 1] * s) / P[: N + 1]


def riesz_mean(s, w: WeightSequence, n: int) -> float:
    """``w_n = (1/P_n) * sum_{v<=n} p_v s_v``."""
    s = check_vector(s, "s")
    n = check_index(n, min(s.size - 1, w.horizon))
    return float(np.dot(w.p.values[: n + 1], s[: n + 1]) / w.P.values[n])


@dataclass(frozen=True, eq=False)
class IndexSeries:
    """Partial sums ``T_0 = 0, T_1, ..., T_N`` of an absolute summability index."""

    method: str
    k: float
    partials: RealSequence
    summands: np.ndarray
    block_increments: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return self.partials.horizon

    @property
    def final(self) -> float:
        return float(self.partials.values[-1])


def dyadic_blocks(T) -> np.ndarray:
    """``T_{2^(j+1)} - T_{2^j}`` for every ``j`` with ``2^(j+1) <= N``."""
    T = np.asarray(getattr(T, "values", T), dtype=np.float64)
    N = T.size - 1
    out = []
    j = 0
    while 2 ** (j + 1) <= N:
        out.append(T[2 ** (j + 1)] - T[2**j])
        j += 1
    return np.array(out)


def index_from_summands(method, summands, k, params=None) -> IndexSeries:
    summands = np.asarray(summands, dtype=np.float64).copy()
    summands[0] = 0.0
    summands.setflags(write=False)
    T = np.cumsum(summands)
    return IndexSeries(
        method=method,
        k=k,
        partials=RealSequence(T, f"index:{method}", {"k": k}),
        summands=summands,
        block_increments=dyadic_blocks(T),
        params=dict(params or {}),
    )


def _power(x, k):
    x = np.abs(x)
    return x if k == 1.0 else x**k


def weight_factor(w: WeightSequence, N: int, k: float) -> np.ndarray:
    """``(P_n/p_n)^(k-1)`` for ``n = 0..N``."""
    if k == 1.0:
        return np.ones(N + 1)
    return (w.P.values[: N + 1] / w.p.values[: N + 1]) ** (k - 1.0)


def summability_index(method: str, k: float, **inputs) -> IndexSeries:
    """Index partial sums for one of the three methods.

    Parameters
    ----------
    method : {"cesaro", "weighted", "matrix"}
    k : float
        Exponent, at least 1.
    **inputs
        ``cesaro``: ``s`` (partial sums) and ``alpha``.
        ``weighted``: ``s`` and ``w`` (a WeightSequence).
        ``matrix``: ``A`` (a NormalMatrix or DerivedMatrices), ``w`` and
        ``a`` (series terms). ``s`` may be given instead of ``a``.
        ``N`` optionally truncates the horizon.

    The matrix method evaluates ``A_n(s) - A_{n-1}(s)`` as
    ``sum_v ahat(n, v) a_v``, a different route from the Riesz-mean
    differences used by ``weighted``.
    """
    k = check_exponent(k)
    N = inputs.get("N")
    if method == "cesaro":
        s = _series(inputs, "s", N)
        alpha = _check_order(inputs.get("alpha", 1.0))
        u = cesaro_means(s, alpha)
        n = np.arange(s.size, dtype=np.float64)
        summands = np.zeros(s.size)
        summands[1:] = n[1:] ** (k - 1.0) * _power(np.diff(u), k)
        return index_from_summands("cesaro", summands, k, {"alpha": alpha})
    if method == "weighted":
        s = _series(inputs, "s", N)
        w = inputs["w"]
        wm = riesz_means(s, w)
        summands = np.zeros(s.size)
        summands[1:] = weight_factor(w, s.size - 1, k)[1:] * _power(np.diff(wm), k)
        return index_from_summands("weighted", summands, k)
    if method == "matrix":
        if "a" in inputs:
            a = _series(inputs, "a", N)
        else:
            s = _series(inputs, "s", N)
            a = np.diff(s, prepend=0.0)
        w = inputs["w"]
        D = inputs["A"]
        D = D.derive() if hasattr(D, "derive") else D
        delta = D.delta_all(a)
        summands = weight_factor(w, a.size - 1, k) * _power(delta, k)
        return index_from_summands("matrix", summands, k, {"matrix": D.source.kind})
    raise DomainError(f"unknown summability method {method!r}")


def _series(inputs, key, N):
    if key not in inputs:
        raise DomainError(f"summability_index needs {key!r}")
    x = check_vector(inputs[key], key)
    if N is not None:
        if N > x.size - 1:
            raise DomainError(f"{key} has horizon {x.size - 1} < N = {N}")
        x = x[: N + 1]
    return x


def index_of_terms(method: str, a, k: float, **inputs) -> IndexSeries:
    """Convenience wrapper taking series terms for every method."""
    a = as_sequence(a)
    if method == "matrix":
        return summability_index("matrix", k, a=a.values, **inputs)
    return summability_index(method, k, s=partial_sums(a).values, **inputs)


@dataclass(frozen=True)
class Diagnostic:
    verdict: str
    blocks: np.ndarray
    ratios: np.ndarray
    rho: float
    n_blocks: int

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "blocks": [float(b) for b in self.blocks],
            "rho": self.rho,
            "n_blocks": self.n_blocks,
        }


def convergence_diagnostic(ix, rho: float = DEFAULT_BLOCK_RHO, n_blocks: int = DEFAULT_BLOCKS) -> Diagnostic:
    """Trend verdict from the last ``n_blocks`` dyadic block increments.

    ``summable_trend``: the blocks strictly decrease and each successive
    ratio is at most ``rho`` (all-zero tails count as summable).
    ``divergent_trend``: the blocks are non-decreasing and not all zero.
    Anything else is ``inconclusive``.
    """
    T = ix.partials.values if isinstance(ix, IndexSeries) else check_vector(ix, "partials")
    N = T.size - 1
    if N < MIN_DIAGNOSTIC_HORIZON:
        raise DomainError(f"diagnostic needs horizon >= {MIN_DIAGNOSTIC_HORIZON}, got {N}")
    blocks = dyadic_blocks(T)
    tail = blocks[-n_blocks:]
    ratios = np.array([_ratio(tail[i + 1], tail[i]) for i in range(tail.size - 1)])
    if not np.any(tail):
        verdict = SUMMABLE
    elif all(tail[i + 1] < tail[i] for i in range(tail.size - 1)) and np.all(ratios <= rho):
        verdict = SUMMABLE
    elif all(tail[i + 1] >= tail[i] for i in range(tail.size - 1)):
        verdict = DIVERGENT
    else:
        verdict = INCONCLUSIVE
    return Diagnostic(verdict, blocks, ratios, float(rho), int(n_blocks))


def _ratio(num, den):
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return float(num / den)
