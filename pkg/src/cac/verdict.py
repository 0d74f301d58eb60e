"""Three-valued verdicts and tagged findings shared by every checker."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    UNKNOWN = "unknown"

    def __bool__(self) -> bool:
        return self is Verdict.PASS

    @staticmethod
    def of(flag: bool) -> "Verdict":
        return Verdict.PASS if flag else Verdict.FAIL


def combine(verdicts: Iterable[Verdict]) -> Verdict:
    """Conjunction over the lattice: any fail wins, then any unknown."""
    vs = list(verdicts)
    if Verdict.FAIL in vs:
        return Verdict.FAIL
    if Verdict.UNKNOWN in vs:
        return Verdict.UNKNOWN
    return Verdict.PASS


def disjunction(verdicts: Iterable[Verdict]) -> Verdict:
    """Any pass wins, then any unknown."""
    vs = list(verdicts)
    if Verdict.PASS in vs:
        return Verdict.PASS
    if Verdict.UNKNOWN in vs:
        return Verdict.UNKNOWN
    return Verdict.FAIL


@dataclass(frozen=True)
class Witness:
    message: str
    rule: str | None = None
    position: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {"message": self.message, "position": list(self.position) if self.position is not None else None,
                "rule": self.rule}


@dataclass
class Check:
    """One node of a verdict tree: a condition tag, its verdict and evidence."""

    tag: str
    verdict: Verdict
    witnesses: list[Witness] = field(default_factory=list)
    children: list["Check"] = field(default_factory=list)
    semantic: bool = False

    @staticmethod
    def node(tag: str, children: list["Check"], semantic: bool = False) -> "Check":
        return Check(tag, combine(c.verdict for c in children), [], children, semantic)

    def failures(self, path: tuple[str, ...] = ()) -> list[tuple[tuple[str, ...], "Check"]]:
        """Leaves below failing nodes, each with the tags leading to it."""
        if self.verdict is Verdict.PASS:
            return []
        path = path + (self.tag,)
        if not self.children:
            return [(path, self)]
        return [f for c in self.children for f in c.failures(path)]

    def to_json(self) -> dict:
        return {
            "children": [c.to_json() for c in self.children],
            "condition": self.tag,
            "verdict": self.verdict.value,
            "witnesses": [w.to_json() for w in self.witnesses],
        }
