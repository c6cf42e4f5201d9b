"""Condition results and their roll-up into pass / fail / inconclusive."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .seqcore import GrowthWitness

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

_OK = {"pass", "bounded", "summable_trend"}
_BAD = {"fail", "unbounded_trend", "divergent_trend"}


def classify(verdict: str) -> str:
    """Map any verdict string onto pass / fail / inconclusive."""
    if verdict in _OK:
        return PASS
    if verdict in _BAD:
        return FAIL
    return INCONCLUSIVE


def rollup(verdicts) -> str:
    classes = {classify(v) for v in verdicts}
    if FAIL in classes:
        return FAIL
    if INCONCLUSIVE in classes:
        return INCONCLUSIVE
    return PASS


@dataclass(frozen=True)
class ConditionResult:
    """One checked hypothesis: a witness-backed or an exact boolean verdict."""

    id: str
    verdict: str
    witness: GrowthWitness | None = None
    first_violation: Any = None
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return classify(self.verdict) == PASS

    def as_dict(self) -> dict:
        if self.witness is not None:
            out = self.witness.as_dict()
            out["verdict"] = self.verdict
        else:
            out = {"verdict": self.verdict, "ratio_sup": None, "argmax": None, "tail_slope": None}
        if self.first_violation is not None:
            fv = self.first_violation
            out["first_violation"] = list(fv) if isinstance(fv, tuple) else fv
        if self.detail:
            out["detail"] = dict(self.detail)
        return out


def boolean_result(cid: str, violation, detail=None) -> ConditionResult:
    return ConditionResult(cid, FAIL if violation is not None else PASS,
                           first_violation=violation, detail=detail or {})


def witness_result(cid: str, witness: GrowthWitness, detail=None) -> ConditionResult:
    return ConditionResult(cid, witness.verdict, witness=witness, detail=detail or {})


@dataclass(frozen=True)
class HypothesisReport:
    """Condition results keyed by stable id, in insertion order."""

    entries: dict

    def __getitem__(self, cid) -> ConditionResult:
        return self.entries[cid]

    def __contains__(self, cid):
        return cid in self.entries

    def __iter__(self):
        return iter(self.entries.values())

    @property
    def ids(self):
        return list(self.entries)

    @property
    def overall(self) -> str:
        return rollup(r.verdict for r in self.entries.values())

    def merge(self, other: "HypothesisReport") -> "HypothesisReport":
        dup = set(self.entries) & set(other.entries)
        if dup:
            raise ValueError(f"condition ids reported twice: {sorted(dup)}")
        return HypothesisReport({**self.entries, **other.entries})

    def as_dict(self) -> dict:
        return {cid: r.as_dict() for cid, r in self.entries.items()}

    @classmethod
    def of(cls, *results: ConditionResult) -> "HypothesisReport":
        entries = {}
        for r in results:
            if r.id in entries:
                raise ValueError(f"condition id {r.id} reported twice")
            entries[r.id] = r
        return cls(entries)
