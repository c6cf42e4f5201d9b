"""Built-in parameterized sequence families and tabulated CSV input."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import DomainError
from .seqcore import RealSequence


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, **self.params}


def _n(N):
    return np.arange(N + 1, dtype=np.float64)


def _sign(N):
    # (-1)^(n+1): -1, 1, -1, ...
    return np.where(np.arange(N + 1) % 2 == 0, -1.0, 1.0)


def harmonic_plus_one(N):
    n = _n(N)
    out = np.ones(N + 1)
    out[1:] += np.cumsum(1.0 / n[1:])
    return out


TERMS = {
    "alternating": ({}, lambda N: _sign(N)),
    "alternating_power": ({"delta": 0.5}, lambda N, delta: _sign(N) * (_n(N) + 1.0) ** (-delta)),
    "random_bounded": ({"seed": 0, "bound": 1.0},
                       lambda N, seed, bound: np.random.default_rng(int(seed)).uniform(-bound, bound, N + 1)),
}

WEIGHTS = {
    "unit": ({}, lambda N: np.ones(N + 1)),
    "linear": ({}, lambda N: _n(N) + 1.0),
    "geometric": ({"q": 2.0}, lambda N, q: float(q) ** _n(N)),
    "log_slow": ({}, lambda N: 1.0 / (_n(N) + 1.0)),
}

XS = {
    "harmonic_plus_one": ({}, harmonic_plus_one),
    "power": ({"eps": 0.5}, lambda N, eps: (_n(N) + 1.0) ** eps),
}

# lambda families are functions of X
LAMBDAS = {
    "inverse_X_squared": ({}, lambda X: X**-2.0),
    "inverse_X": ({}, lambda X: 1.0 / X),
    "constant": ({"c": 1.0}, lambda X, c: np.full_like(X, float(c))),
}

MATRICES = {
    "weighted_mean": {},
    "cesaro": {"alpha": 1.0},
    "identity": {},
    "csv": {"path": None},
}

CATEGORIES = {"terms": TERMS, "weights": WEIGHTS, "X": XS, "lambda": LAMBDAS}


def resolve_params(category: str, spec: FamilySpec) -> FamilySpec:
    """Fill defaults and reject unknown names or parameters."""
    if spec.name == "tabulated":
        if "path" not in spec.params:
            raise DomainError(f"{category}: tabulated family needs a path")
        extra = set(spec.params) - {"path"}
        if extra:
            raise DomainError(f"{category}: unknown parameter(s) {sorted(extra)} for tabulated")
        return spec
    table = MATRICES if category == "matrix" else CATEGORIES[category]
    if spec.name not in table:
        choices = sorted(table) + ([] if category == "matrix" else ["tabulated"])
        raise DomainError(f"{category}: unknown family {spec.name!r}; choose from {choices}")
    defaults = table[spec.name] if category == "matrix" else table[spec.name][0]
    extra = set(spec.params) - set(defaults)
    if extra:
        raise DomainError(f"{category}: unknown parameter(s) {sorted(extra)} for {spec.name}")
    params = {**defaults, **spec.params}
    if category == "matrix" and spec.name == "csv" and params["path"] is None:
        raise DomainError("matrix: csv family needs a path")
    return FamilySpec(spec.name, params)


def load_tabulated(path, N: int, name: str = "tabulated") -> np.ndarray:
    """Read ``n,value`` rows covering ``n = 0..N``; a header line is allowed."""
    values = {}
    with open(Path(path), newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or rec[0].strip().startswith("#"):
                continue
            if len(rec) != 2:
                raise DomainError(f"{path}:{lineno}: expected two columns n,value")
            try:
                n, v = int(rec[0]), float(rec[1])
            except ValueError:
                if lineno == 1:
                    continue
                raise DomainError(f"{path}:{lineno}: cannot parse {rec!r}") from None
            values[n] = v
    missing = [n for n in range(N + 1) if n not in values]
    if missing:
        raise DomainError(f"{path}: {name} missing n = {missing[0]} (need 0..{N})")
    return np.array([values[n] for n in range(N + 1)])


def generate(category: str, spec: FamilySpec, N: int, X=None, base_dir=None) -> RealSequence:
    spec = resolve_params(category, spec)
    if spec.name == "tabulated":
        path = Path(spec.params["path"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        vals = load_tabulated(path, N, category)
    elif category == "lambda":
        if X is None:
            raise DomainError("lambda families need X")
        vals = LAMBDAS[spec.name][1](np.asarray(X, dtype=np.float64)[: N + 1], **spec.params)
    else:
        with np.errstate(over="ignore"):
            vals = CATEGORIES[category][spec.name][1](N, **spec.params)
    return RealSequence(vals, spec.name, spec.params)
