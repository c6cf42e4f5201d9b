"""scikit-learn compatible wrappers.

Each row of ``X`` is one finite sequence indexed ``0..N``; the column count
fixes the horizon at ``fit`` time. The wrappers only adapt shapes and
parameters; the numerics live in :mod:`summab.matrices` and
:mod:`summab.summability`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import DomainError
from .matrices import cesaro_matrix, custom_matrix, identity_matrix, weighted_mean_matrix
from .seqcore import weight_partials
from .summability import convergence_diagnostic, summability_index

MATRIX_KINDS = ("weighted_mean", "cesaro", "identity", "custom")


def _weights(weights, N):
    if weights is None:
        return weight_partials(np.ones(N + 1))
    p = np.asarray(weights, dtype=np.float64)
    if p.ndim != 1 or p.size < N + 1:
        raise DomainError(f"weights must be a vector of length >= {N + 1}")
    return weight_partials(p[: N + 1])


def _matrix(kind, w, N, alpha, table):
    if kind == "weighted_mean":
        return weighted_mean_matrix(w, N)
    if kind == "cesaro":
        return cesaro_matrix(alpha, N)
    if kind == "identity":
        return identity_matrix(N)
    if kind == "custom":
        if table is None:
            raise DomainError("kind='custom' needs a table")
        return custom_matrix(np.asarray(table, dtype=np.float64)[: N + 1, : N + 1])
    raise DomainError(f"kind must be one of {MATRIX_KINDS}, got {kind!r}")


class MatrixMeanTransformer(TransformerMixin, BaseEstimator):
    """Apply a normal matrix to each row of partial sums.

    Parameters
    ----------
    kind : {"weighted_mean", "cesaro", "identity", "custom"}
    weights : array-like, optional
        ``p_n`` for the weighted mean; unit weights when omitted.
    alpha : float
        Cesàro order.
    table : array-like, optional
        Square lower-triangular table for ``kind="custom"``.
    output : {"mean", "delta"}
        ``"mean"`` returns ``A_n(s)``, ``"delta"`` returns ``A_n(s) - A_{n-1}(s)``.

    Examples
    --------
    >>> MatrixMeanTransformer().fit_transform([[1.0, 0.0, 1.0]]).round(4)
    array([[1.    , 0.5   , 0.6667]])
    """

    def __init__(self, kind="weighted_mean", weights=None, alpha=1.0, table=None, output="mean"):
        self.kind = kind
        self.weights = weights
        self.alpha = alpha
        self.table = table
        self.output = output

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        N = X.shape[1] - 1
        self.n_features_in_ = X.shape[1]
        self.weights_ = _weights(self.weights, N)
        self.matrix_ = _matrix(self.kind, self.weights_, N, self.alpha, self.table)
        if self.output not in ("mean", "delta"):
            raise DomainError(f"output must be 'mean' or 'delta', got {self.output!r}")
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, fitted with {self.n_features_in_}")
        out = np.vstack([self.matrix_.apply(row) for row in X])
        if self.output == "delta":
            out = np.diff(out, axis=1, prepend=0.0)
        return out


class AbsoluteSummabilityIndex(TransformerMixin, BaseEstimator):
    """Index partial sums ``T_0..T_N`` for each row of series terms.

    ``transform`` returns the partial sums; ``predict`` returns the dyadic
    trend verdict per row (needs at least 129 columns).
    """

    def __init__(self, method="matrix", k=1.0, kind="weighted_mean", weights=None, alpha=1.0,
                 table=None, rho=0.95):
        self.method = method
        self.k = k
        self.kind = kind
        self.weights = weights
        self.alpha = alpha
        self.table = table
        self.rho = rho

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        N = X.shape[1] - 1
        self.n_features_in_ = X.shape[1]
        self.weights_ = _weights(self.weights, N)
        if self.method == "matrix":
            self.derived_ = _matrix(self.kind, self.weights_, N, self.alpha, self.table).derive()
        elif self.method in ("weighted", "cesaro"):
            self.derived_ = None
        else:
            raise DomainError(f"method must be matrix, weighted or cesaro, got {self.method!r}")
        return self

    def _index(self, a):
        if self.method == "matrix":
            return summability_index("matrix", self.k, A=self.derived_, w=self.weights_, a=a)
        s = np.cumsum(a)
        if self.method == "weighted":
            return summability_index("weighted", self.k, s=s, w=self.weights_)
        return summability_index("cesaro", self.k, s=s, alpha=self.alpha)

    def transform(self, X):
        check_is_fitted(self, "weights_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, fitted with {self.n_features_in_}")
        return np.vstack([self._index(row).partials.values for row in X])

    def predict(self, X):
        T = self.transform(X)
        return np.array([convergence_diagnostic(row, rho=self.rho).verdict for row in T])
