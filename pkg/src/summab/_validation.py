"""Input validation helpers shared by every module.

These play the role ``sklearn.utils.check_array`` plays for estimators: they
coerce array-likes to contiguous float64 vectors and raise ``DomainError``
with the offending index instead of letting NaNs leak into sums.
"""

from __future__ import annotations

import numpy as np


class DomainError(ValueError):
    """Raised when an input violates a mathematical precondition."""


def check_vector(x, name="x", *, min_horizon=0, positive=False, nonnegative=False):
    """Return ``x`` as a read-only 1-D float64 array.

    ``min_horizon`` is the smallest admissible last index, so the array must
    hold at least ``min_horizon + 1`` values.
    """
    arr = np.array(getattr(x, "values", x), dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError(f"{name} is empty")
    bad = ~np.isfinite(arr)
    if bad.any():
        raise DomainError(f"{name} has a non-finite value at index {int(np.argmax(bad))}")
    if arr.size - 1 < min_horizon:
        raise DomainError(f"{name} has horizon {arr.size - 1}, need at least {min_horizon}")
    if positive:
        bad = arr <= 0
        if bad.any():
            i = int(np.argmax(bad))
            raise DomainError(f"{name} must be strictly positive; {name}[{i}] = {arr[i]!r}")
    if nonnegative:
        bad = arr < 0
        if bad.any():
            i = int(np.argmax(bad))
            raise DomainError(f"{name} must be nonnegative; {name}[{i}] = {arr[i]!r}")
    arr.setflags(write=False)
    return arr


def check_index(n, horizon, name="n", *, low=0):
    n = int(n)
    if n < low or n > horizon:
        raise DomainError(f"{name} = {n} outside [{low}, {horizon}]")
    return n


def check_exponent(k):
    k = float(k)
    if not np.isfinite(k) or k < 1:
        raise DomainError(f"k must be >= 1, got {k!r}")
    return k
