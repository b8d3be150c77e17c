"""The recursion h(N, M') counting the independent combinations the combined
scheme transmits, together with a replayable trace of the reductions used."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .errors import UsageError

RULES = ("gcd", "base-rep", "blocks", "reflect", "even", "odd-base")


@dataclass(frozen=True)
class Step:
    rule: str
    before: tuple
    after: tuple | None  # None for terminal rules
    added: int  # contribution to h made by this step


@dataclass
class HRecursionTrace:
    steps: list = field(default_factory=list)
    value: int = 0

    def to_json(self):
        return {"value": self.value,
                "steps": [{"rule": s.rule, "before": list(s.before),
                           "after": None if s.after is None else list(s.after),
                           "added": s.added} for s in self.steps]}

    @classmethod
    def from_json(cls, d):
        steps = [Step(s["rule"], tuple(s["before"]),
                      None if s["after"] is None else tuple(s["after"]), int(s["added"]))
                 for s in d["steps"]]
        return cls(steps, int(d["value"]))

    def replay(self) -> int:
        """Re-apply each rule to its recorded input and return the total.

        Raises if a recorded step does not follow from its input."""
        total, cur = 0, None
        for s in self.steps:
            if cur is not None and s.before != cur:
                raise UsageError(f"trace discontinuity at {s}")
            after, added = _apply(s.rule, *s.before)
            if after != s.after or added != s.added:
                raise UsageError(f"step {s} does not replay")
            total += added
            cur = after
        if cur is not None:
            raise UsageError("trace does not end in a terminal rule")
        return total


def classify(N: int, M: int) -> str:
    """Which reduction applies to (N, M') first."""
    if gcd(N, M) > 1:
        return "gcd"
    if M == 1:
        return "base-rep"
    if N > 2 * M:
        return "blocks"
    if 2 * N < 3 * M:
        return "reflect"
    return "even" if M % 2 == 0 else "odd-base"


def _apply(rule: str, N: int, M: int):
    if rule != classify(N, M):
        raise UsageError(f"rule {rule} does not apply to ({N}, {M})")
    if rule == "gcd":
        g = gcd(N, M)
        return (N // g, M // g), 0
    if rule == "base-rep":
        return None, N
    if rule == "blocks":
        b = N // M - 1
        return (N - b * M, M), b
    if rule == "reflect":
        return (M, 2 * M - N), 0
    if rule == "even":
        return (N - M, M // 2), 1
    y = 2 * M - N
    return None, (M + 5) // 2 - y


def h_value(N: int, M: int) -> HRecursionTrace:
    """Trace of h(N, M').

    >>> h_value(7, 4).value, [s.rule for s in h_value(7, 3).steps]
    (3, ['blocks', 'reflect', 'even', 'base-rep'])
    """
    if not (isinstance(N, int) and isinstance(M, int)) or not 1 <= M <= N:
        raise UsageError(f"need integers 1 <= M' <= N, got N={N}, M'={M}")
    trace = HRecursionTrace()
    cur = (N, M)
    while cur is not None:
        rule = classify(*cur)
        after, added = _apply(rule, *cur)
        trace.steps.append(Step(rule, cur, after, added))
        trace.value += added
        cur = after
    return trace


def h(N: int, M: int) -> int:
    return h_value(N, M).value
