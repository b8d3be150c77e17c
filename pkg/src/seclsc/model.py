"""The SchemeSpec container and its JSON form."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .assignment import Assignment, ProblemParams
from .errors import UsageError
from .field import PrimeField
from .recursion import HRecursionTrace


@dataclass(frozen=True)
class SchemeSpec:
    """A complete linear scheme.

    ``coeff`` is F' with shape (lam, m + r) over the columns
    [merged messages | randomness]; server n transmits
    ``server_vectors[n] @ coeff`` applied to (W', Q).
    """

    params: ProblemParams
    kind: str
    grouping: tuple  # grouping[i] = datasets (1-based) merged into message i+1
    assignment: Assignment
    lam: int
    randomness_count: int
    coeff: np.ndarray
    server_vectors: np.ndarray
    output_lengths: tuple
    trace: HRecursionTrace | None = None

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.params.q)

    @property
    def m(self) -> int:
        return len(self.grouping)

    def rows(self) -> np.ndarray:
        """Expanded transmissions s_n F', one row per server."""
        return self.field.matmul(self.server_vectors, self.coeff)

    def computable(self):
        """Per server, the 0-based merged messages whose whole group it stores."""
        return [frozenset(i for i, g in enumerate(self.grouping) if set(g) <= z)
                for z in self.assignment.sets]

    def target(self) -> np.ndarray:
        return np.concatenate([np.ones(self.m, dtype=np.int64),
                               np.zeros(self.randomness_count, dtype=np.int64)])

    def with_(self, **kw) -> "SchemeSpec":
        return replace(self, **kw)

    def to_json(self):
        return {
            "kind": self.kind,
            "params": self.params.to_json(),
            "grouping": [list(g) for g in self.grouping],
            "assignment": self.assignment.to_json(),
            "lambda": self.lam,
            "randomness_count": self.randomness_count,
            "coeff_matrix": {"rows": int(self.coeff.shape[0]),
                             "cols": int(self.coeff.shape[1]),
                             "entries": [int(x) for x in self.coeff.ravel()]},
            "server_vectors": [[int(x) for x in v] for v in self.server_vectors],
            "output_lengths": list(self.output_lengths),
            "trace": None if self.trace is None else self.trace.to_json(),
        }

    @classmethod
    def from_json(cls, d):
        try:
            params = ProblemParams.from_json(d["params"])
            cm = d["coeff_matrix"]
            rows, cols = int(cm["rows"]), int(cm["cols"])
            entries = cm["entries"]
            if rows * cols != len(entries):
                raise UsageError("coeff_matrix entries do not match its shape")
            f = PrimeField(params.q)
            coeff = f.asarray(entries, 1).reshape(rows, cols)
            sv = f.asarray(d["server_vectors"], 2) if d["server_vectors"] else \
                np.zeros((0, rows), dtype=np.int64)
            spec = cls(
                params=params,
                kind=str(d.get("kind", "unknown")),
                grouping=tuple(tuple(int(x) for x in g) for g in d["grouping"]),
                assignment=Assignment.from_json(d["assignment"]),
                lam=int(d["lambda"]),
                randomness_count=int(d["randomness_count"]),
                coeff=coeff,
                server_vectors=sv,
                output_lengths=tuple(int(x) for x in d.get("output_lengths",
                                                           [1] * params.N)),
                trace=None if d.get("trace") is None else HRecursionTrace.from_json(d["trace"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, UsageError):
                raise
            raise UsageError(f"malformed scheme JSON: {e}") from e
        if sv.shape != (params.N, rows):
            raise UsageError(f"server_vectors shape {sv.shape} != ({params.N}, {rows})")
        if cols != spec.m + spec.randomness_count:
            raise UsageError("coeff_matrix width != merged messages + randomness")
        if spec.assignment.n != params.N or spec.assignment.k != params.K:
            raise UsageError("assignment size disagrees with params")
        return spec
