"""Finite-horizon sequences, differences, weights and growth witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._validation import DomainError, check_vector

DEFAULT_SLOPE_TOL = 0.05
DEFAULT_SLOPE_MARGIN = 0.02

BOUNDED = "bounded"
UNBOUNDED = "unbounded_trend"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class RealSequence:
    """Real values ``x_0 .. x_N`` with a note on where they came from.

    ``origin`` is a family name (e.g. ``"harmonic_plus_one"``) or
    ``"tabulated"``; ``params`` holds the family parameters.
    """

    values: np.ndarray
    origin: str = "tabulated"
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", check_vector(self.values, self.origin))

    @property
    def horizon(self) -> int:
        return self.values.size - 1

    def __len__(self):
        return self.values.size

    def __getitem__(self, item):
        return self.values[item]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    def truncate(self, horizon: int) -> "RealSequence":
        if horizon > self.horizon:
            raise DomainError(f"cannot extend horizon {self.horizon} to {horizon}")
        return RealSequence(self.values[: horizon + 1], self.origin, self.params)


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Positive weights ``p_n`` and their partial sums ``P_n = p_0 + ... + p_n``."""

    p: RealSequence
    P: RealSequence

    @property
    def horizon(self) -> int:
        return self.p.horizon

    def truncate(self, horizon: int) -> "WeightSequence":
        return WeightSequence(self.p.truncate(horizon), self.P.truncate(horizon))


@dataclass(frozen=True)
class GrowthWitness:
    """Finite-horizon evidence for a claim ``numerator = O(denominator)``.

    ``tail_slope`` is the least-squares slope of ``log ratio`` against
    ``log n`` over the upper half of the horizon; a bounded ratio has a
    slope near zero or negative.
    """

    ratio_sup: float
    argmax_index: int
    tail_slope: float
    horizon: int
    verdict: str
    start_index: int = 1
    slope_tol: float = DEFAULT_SLOPE_TOL

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "ratio_sup": self.ratio_sup,
            "argmax": self.argmax_index,
            "tail_slope": self.tail_slope,
        }


def as_sequence(x, origin="tabulated", params=None) -> RealSequence:
    if isinstance(x, RealSequence):
        return x
    return RealSequence(x, origin, params or {})


def partial_sums(a) -> RealSequence:
    """Running sums ``s_n = a_0 + ... + a_n``."""
    a = as_sequence(a)
    return RealSequence(np.cumsum(a.values), "partial_sums", {"of": a.origin})


def forward_diff(x) -> RealSequence:
    """``(Δx)_n = x_n - x_{n+1}`` for ``n = 0 .. N-1``.

    Note the sign: this is the convention under which the summation-by-parts
    split in :mod:`summab.decomposition` is exact.
    """
    x = as_sequence(x)
    if x.horizon < 1:
        raise DomainError("forward difference of a horizon-0 sequence is empty")
    v = x.values
    return RealSequence(v[:-1] - v[1:], "forward_diff", {"of": x.origin})


def weight_partials(p) -> WeightSequence:
    p = as_sequence(p)
    vals = check_vector(p.values, "p", positive=True)
    P = np.cumsum(vals)
    bad = np.diff(P) <= 0
    if bad.any():
        # positive weights can still be absorbed by rounding when P is huge
        i = int(np.argmax(bad)) + 1
        raise DomainError(f"P is not strictly increasing at index {i} (p[{i}] lost to rounding)")
    return WeightSequence(p, RealSequence(P, "weight_partials", {"of": p.origin}))


def _tail_slope(idx: np.ndarray, ratios: np.ndarray, horizon: int) -> float:
    lo = max(horizon // 2, 1)
    keep = (idx >= lo) & (ratios > 0)
    if keep.sum() < 2:
        return 0.0
    x = np.log(idx[keep].astype(np.float64))
    y = np.log(ratios[keep])
    x = x - x.mean()
    denom = float(np.dot(x, x))
    if denom == 0.0:
        return 0.0
    return float(np.dot(x, y - y.mean()) / denom)


def _verdict(ratio_sup, slope, slope_tol, margin):
    if np.isfinite(ratio_sup) and slope <= slope_tol:
        return BOUNDED
    if slope > slope_tol + margin:
        return UNBOUNDED
    return INCONCLUSIVE


def growth_witness(
    numerator,
    denominator,
    start_index: int = 1,
    slope_tol: float = DEFAULT_SLOPE_TOL,
    margin: float = DEFAULT_SLOPE_MARGIN,
) -> GrowthWitness:
    """Witness for ``|numerator_n| = O(|denominator_n|)`` on ``n >= start_index``.

    The verdict is ``bounded`` when the sup ratio is finite and the tail slope
    is at most ``slope_tol``, ``unbounded_trend`` when the slope exceeds
    ``slope_tol + margin``, and ``inconclusive`` in between.

    >>> w = growth_witness(np.arange(10.0) ** 2, np.arange(10.0))
    >>> w.verdict
    'unbounded_trend'
    """
    num = check_vector(numerator, "numerator")
    den = check_vector(denominator, "denominator")
    if num.size != den.size:
        raise DomainError(f"horizons differ: {num.size - 1} vs {den.size - 1}")
    horizon = num.size - 1
    if not 0 <= start_index <= horizon:
        raise DomainError(f"start_index {start_index} outside [0, {horizon}]")
    d = np.abs(den[start_index:])
    zero = d == 0
    if zero.any():
        raise DomainError(f"denominator vanishes at index {start_index + int(np.argmax(zero))}")
    ratios = np.abs(num[start_index:]) / d
    idx = np.arange(start_index, horizon + 1)
    j = int(np.argmax(ratios))
    ratio_sup = float(ratios[j])
    slope = _tail_slope(idx, ratios, horizon)
    return GrowthWitness(
        ratio_sup=ratio_sup,
        argmax_index=start_index + j,
        tail_slope=slope,
        horizon=horizon,
        verdict=_verdict(ratio_sup, slope, slope_tol, margin),
        start_index=start_index,
        slope_tol=slope_tol,
    )


@dataclass(frozen=True)
class AlmostIncreasingWitness:
    witness: GrowthWitness
    z: RealSequence
    A: float
    B: float
    ratio_cap: float


def almost_increasing_witness(
    b,
    ratio_cap: float = 100.0,
    slope_tol: float = DEFAULT_SLOPE_TOL,
    margin: float = DEFAULT_SLOPE_MARGIN,
) -> AlmostIncreasingWitness:
    """Test whether ``b`` is almost increasing via its running maximum.

    With ``z_n = max_{m<=n} b_m`` we always have ``b_n <= z_n``, so ``B = 1``
    and ``A = 1 / sup z_n/b_n``. Any other admissible ``z`` is within
    constant factors of this one. Monotonicity is taken non-strictly.
    """
    vals = check_vector(b, "b", positive=True)
    z = np.maximum.accumulate(vals)
    w = growth_witness(z, vals, start_index=0, slope_tol=slope_tol, margin=margin)
    if w.verdict == BOUNDED and w.ratio_sup > ratio_cap:
        w = GrowthWitness(w.ratio_sup, w.argmax_index, w.tail_slope, w.horizon,
                          INCONCLUSIVE, w.start_index, w.slope_tol)
    origin = getattr(b, "origin", "tabulated")
    return AlmostIncreasingWitness(
        witness=w,
        z=RealSequence(z, "running_max", {"of": origin}),
        A=1.0 / w.ratio_sup,
        B=1.0,
        ratio_cap=ratio_cap,
    )
