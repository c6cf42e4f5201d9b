"""Scenario files: flat ``key = value`` text with ``#`` comments.

Family parameters use dotted keys::

    name = CANON-1
    horizon = 4096
    k = 2
    terms = alternating
    weights = unit
    X = harmonic_plus_one
    lambda = inverse_X_squared
    matrix = cesaro
    matrix.alpha = 1
    tolerances.slope_tol = 0.05

``<family>.kind`` is accepted as a synonym of ``<family>``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ._validation import DomainError
from .conditions import DEFAULT_BETA_TOL, DEFAULT_RATIO_CAP, PRESETS
from .decomposition import DEFAULT_RESIDUAL_TOL
from .families import FamilySpec, resolve_params
from .seqcore import DEFAULT_SLOPE_TOL
from .summability import DEFAULT_BLOCK_RHO, MIN_DIAGNOSTIC_HORIZON

FAMILY_KEYS = ("terms", "weights", "X", "lambda", "beta", "matrix")
REQUIRED = ("terms", "weights", "matrix")
INDEX_METHODS = ("matrix", "weighted", "cesaro")

DEFAULTS = {
    "horizon": 4096,
    "k": 1.0,
    "X": "harmonic_plus_one",
    "lambda": "inverse_X_squared",
    "beta": "auto",
    "preset": "thm31",
    "index": "matrix",
}
TOLERANCE_DEFAULTS = {
    "slope_tol": DEFAULT_SLOPE_TOL,
    "residual_tol": DEFAULT_RESIDUAL_TOL,
    "block_rho": DEFAULT_BLOCK_RHO,
    "beta_tol": DEFAULT_BETA_TOL,
    "ratio_cap": DEFAULT_RATIO_CAP,
}
SCALAR_KEYS = {"name", "horizon", "k", "preset", "index", "index.alpha"}


class ScenarioError(ValueError):
    """Malformed or invalid scenario; carries the line or field at fault."""

    def __init__(self, message, line=None, field=None, source=None):
        self.line = line
        self.field = field
        self.source = source
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = ", ".join(where) + ": " if where else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Scenario:
    name: str
    horizon: int
    k: float
    terms: FamilySpec
    weights: FamilySpec
    X: FamilySpec
    lam: FamilySpec
    beta: FamilySpec | None  # None means auto
    matrix: FamilySpec
    tolerances: dict
    preset: str = "thm31"
    index_method: str = "matrix"
    index_alpha: float = 1.0
    defaults: tuple = ()
    base_dir: str | None = field(default=None, compare=False)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "horizon": self.horizon,
            "k": self.k,
            "terms": self.terms.as_dict(),
            "weights": self.weights.as_dict(),
            "X": self.X.as_dict(),
            "lambda": self.lam.as_dict(),
            "beta": "auto" if self.beta is None else self.beta.as_dict(),
            "matrix": self.matrix.as_dict(),
            "tolerances": dict(self.tolerances),
            "preset": self.preset,
            "index": {"method": self.index_method, "alpha": self.index_alpha},
            "defaults_filled": list(self.defaults),
        }

    def replace(self, **changes) -> "Scenario":
        out = dataclasses.replace(self, **changes)
        validate(out)
        return out


def _number(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_pairs(text: str, source=None) -> dict:
    """``{key: (value, line)}`` from scenario text."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {raw.strip()!r}", line=lineno, source=source)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ScenarioError("missing key before '='", line=lineno, source=source)
        if not value:
            raise ScenarioError(f"missing value for {key!r}", line=lineno, source=source)
        if key in pairs:
            raise ScenarioError(f"duplicate key {key!r} (first on line {pairs[key][1]})",
                                line=lineno, source=source)
        pairs[key] = (value, lineno)
    return pairs


def _known(key: str) -> bool:
    if key in SCALAR_KEYS:
        return True
    head, _, tail = key.partition(".")
    if head == "tolerances":
        return tail in TOLERANCE_DEFAULTS
    return head in FAMILY_KEYS


def build(pairs: dict, source=None, base_dir=None) -> Scenario:
    for key, (_, line) in pairs.items():
        if not _known(key):
            raise ScenarioError(f"unknown key {key!r}", line=line, field=key, source=source)

    filled = []

    def scalar(key, conv, default):
        if key in pairs:
            value, line = pairs[key]
            try:
                return conv(value)
            except ValueError:
                raise ScenarioError(f"cannot read {value!r}", line=line, field=key, source=source) from None
        filled.append(key)
        return default

    families = {}
    for fam in FAMILY_KEYS:
        plain, kind = pairs.get(fam), pairs.get(f"{fam}.kind")
        if plain and kind:
            raise ScenarioError(f"both {fam!r} and '{fam}.kind' given", line=kind[1], field=fam, source=source)
        entry = plain or kind
        if entry is None:
            if fam in REQUIRED:
                raise ScenarioError(f"missing required family {fam!r}", field=fam, source=source)
            filled.append(fam)
            name, line = DEFAULTS[fam], None
        else:
            name, line = entry
        params = {}
        for key, (value, _) in pairs.items():
            head, _, tail = key.partition(".")
            if head == fam and tail and tail != "kind":
                params[tail] = _number(value)
        if fam == "beta" and name == "auto":
            if params:
                raise ScenarioError("beta = auto takes no parameters", line=line, field="beta", source=source)
            families[fam] = None
            continue
        category = "matrix" if fam == "matrix" else fam
        spec = FamilySpec(name, params)
        if fam == "beta":
            if name != "tabulated":
                raise ScenarioError("beta must be 'auto' or 'tabulated'", line=line, field=fam, source=source)
        else:
            try:
                spec = resolve_params(category, spec)
            except DomainError as exc:
                raise ScenarioError(str(exc), line=line, field=fam, source=source) from None
        families[fam] = spec

    tolerances = {}
    for tol, default in TOLERANCE_DEFAULTS.items():
        tolerances[tol] = scalar(f"tolerances.{tol}", float, default)

    scenario = Scenario(
        name=scalar("name", str, Path(str(source)).stem if source else "scenario"),
        horizon=scalar("horizon", int, DEFAULTS["horizon"]),
        k=scalar("k", float, DEFAULTS["k"]),
        terms=families["terms"],
        weights=families["weights"],
        X=families["X"],
        lam=families["lambda"],
        beta=families["beta"],
        matrix=families["matrix"],
        tolerances=tolerances,
        preset=scalar("preset", str, DEFAULTS["preset"]),
        index_method=scalar("index", str, DEFAULTS["index"]),
        index_alpha=scalar("index.alpha", float, 1.0),
        defaults=tuple(filled),
        base_dir=None if base_dir is None else str(base_dir),
    )
    validate(scenario, pairs, source)
    return scenario


def validate(sc: Scenario, pairs=None, source=None) -> None:
    def fail(fieldname, message):
        line = pairs[fieldname][1] if pairs and fieldname in pairs else None
        raise ScenarioError(message, line=line, field=fieldname, source=source)

    if sc.k < 1:
        fail("k", "k must be ≥ 1")
    if sc.horizon < MIN_DIAGNOSTIC_HORIZON:
        fail("horizon", f"horizon must be ≥ {MIN_DIAGNOSTIC_HORIZON}")
    if sc.preset not in PRESETS:
        fail("preset", f"preset must be one of {sorted(PRESETS)}")
    if sc.index_method not in INDEX_METHODS:
        fail("index", f"index must be one of {list(INDEX_METHODS)}")
    if not sc.index_alpha > -1:
        fail("index.alpha", "index.alpha must exceed -1")
    for tol, value in sc.tolerances.items():
        if not value > 0:
            fail(f"tolerances.{tol}", f"{tol} must be positive")
    if not sc.tolerances["block_rho"] < 1:
        fail("tolerances.block_rho", "block_rho must be below 1")


def parse_scenario(path) -> Scenario:
    """Parse and validate a scenario file; relative data paths resolve
    against the file's directory."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", source=path) from None
    return build(read_pairs(text, source=path), source=path, base_dir=path.parent)


def parse_scenario_text(text: str, base_dir=None) -> Scenario:
    return build(read_pairs(text), base_dir=base_dir)
