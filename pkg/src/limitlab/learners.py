"""Executable learner models and the trace runner.

Step functions return ``None`` where the learner is undefined. Running a
learner over a sequence raises :class:`Divergence` at the first undefined
step; :func:`trace` records divergence as an outcome instead of raising.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .core import NO_HYP, Text, check_datum, content, expand
from .hypspace import canonical, expr_from_json, expr_to_json, value_from_json, value_to_json

WILDCARD = "*"


class Divergence(Exception):
    def __init__(self, position: int):
        super().__init__(f"learner undefined at position {position}")
        self.position = position


class BmsLearner:
    """Bounded-memory-states learner: ``step(state, x) -> (state', hyp)``."""

    kind = "bms"

    def __init__(self, id: str, step: Callable, start=0, table: dict | None = None, meta: dict | None = None):
        self.id = str(id)
        self._step = step
        self.start = canonical(start)
        self.table = table
        self.meta = dict(meta or {})

    def step(self, state, x):
        return self._step(state, x)

    @classmethod
    def from_table(cls, rows, id: str = "M", start=0, meta=None) -> "BmsLearner":
        exact: dict = {}
        wild: dict = {}
        for row in rows:
            if isinstance(row, dict):
                s, d, nxt, h = row["state"], row["datum"], row["next"], row["hyp"]
            else:
                s, d, nxt, h = row
            s, nxt = canonical(s), canonical(nxt)
            if d == WILDCARD:
                wild[s] = (nxt, h)
            else:
                key = (s, check_datum(d))
                if key in exact:
                    raise ValueError(f"duplicate transition for {key}")
                exact[key] = (nxt, h)

        def step(state, x):
            out = exact.get((state, x))
            if out is None:
                out = wild.get(state)
            return out

        return cls(id, step, start, table={"exact": exact, "wild": wild}, meta=meta)

    @property
    def states(self) -> frozenset | None:
        """State set for table learners, None otherwise."""
        if self.table is None:
            return None
        out = {self.start}
        for (s, _), (nxt, _) in self.table["exact"].items():
            out.update((s, nxt))
        for s, (nxt, _) in self.table["wild"].items():
            out.update((s, nxt))
        return frozenset(out)

    def __repr__(self):
        return f"BmsLearner({self.id!r})"


class IterLearner:
    """Iterative learner: ``step(hyp, x) -> hyp'``, starting from ``?``."""

    kind = "iterative"

    def __init__(self, id: str, step: Callable, table: dict | None = None, meta: dict | None = None):
        self.id = str(id)
        self._step = step
        self.table = table
        self.meta = dict(meta or {})

    def step(self, hyp, x):
        return self._step(hyp, x)

    @classmethod
    def from_table(cls, rows, id: str = "M", meta=None) -> "IterLearner":
        exact: dict = {}
        wild: dict = {}
        for row in rows:
            if isinstance(row, dict):
                prev, d, h = row["prev"], row["datum"], row["hyp"]
            else:
                prev, d, h = row
            if d == WILDCARD:
                wild[prev] = h
            else:
                exact[(prev, check_datum(d))] = h

        def step(prev, x):
            out = exact.get((prev, x))
            if out is None:
                out = wild.get(prev)
            return out

        return cls(id, step, table={"exact": exact, "wild": wild}, meta=meta)

    def __repr__(self):
        return f"IterLearner({self.id!r})"


class HistoryLearner:
    """Learner defined on whole finite sequences."""

    kind = "history"

    def __init__(self, id: str, fn: Callable, meta: dict | None = None):
        self.id = str(id)
        self._fn = fn
        self.meta = dict(meta or {})

    def __call__(self, seq) -> object:
        return self._fn(tuple(seq))


def bms_run(M: BmsLearner, state, seq) -> tuple:
    hyp = NO_HYP
    for i, x in enumerate(seq):
        out = M.step(state, x)
        if out is None:
            raise Divergence(i)
        state, hyp = out
    return state, hyp


def iter_run(M: IterLearner, seq):
    hyp = NO_HYP
    for i, x in enumerate(seq):
        hyp = M.step(hyp, x)
        if hyp is None:
            raise Divergence(i)
    return hyp


def run(M, seq):
    """Hypothesis of any learner kind after reading ``seq``."""
    if isinstance(M, BmsLearner):
        return bms_run(M, M.start, seq)[1]
    if isinstance(M, IterLearner):
        return iter_run(M, seq)
    if not seq:
        return NO_HYP
    return M(seq)


# -- traces ---------------------------------------------------------------


class Record(NamedTuple):
    time: int
    datum: object
    before: object
    after: object
    hyp: object


@dataclass
class Trace:
    """Learning sequence of a learner on a text.

    Record ``t`` is the step reading ``text[t]``; its hypothesis is the
    learner's output on the first ``t + 1`` data. When ``cycle`` is set to
    ``(start, period)``, record ``t >= start`` behaves like record
    ``start + (t - start) % period`` forever.
    """

    text: Text
    kind: str
    learner_id: str
    budget: int
    records: list = field(default_factory=list)
    cycle: tuple | None = None
    exhausted: bool = False
    diverged_at: int | None = None

    @property
    def complete(self) -> bool:
        """Whether the whole infinite learning sequence is determined."""
        return self.cycle is not None or self.diverged_at is not None

    def record_at(self, t: int) -> Record:
        if t < len(self.records):
            return self.records[t]
        if self.cycle is None:
            raise IndexError(f"time {t} beyond recorded trace")
        start, period = self.cycle
        r = self.records[start + (t - start) % period]
        return r._replace(time=t)

    def hyp_at(self, t: int):
        return self.record_at(t).hyp

    def exact_horizon(self) -> int:
        """Number of positions that decide every quantified restriction.

        Hypotheses are periodic from the cycle start and prefix contents are
        constant once the text saturates; three periods past both points let
        any ordered triple be mapped onto an equivalent one.
        """
        if self.cycle is None:
            return len(self.records)
        start, period = self.cycle
        settle = max(start, self.text.saturation - 1)
        return settle + 3 * period

    def hypotheses(self, n: int | None = None) -> list:
        n = self.exact_horizon() if n is None else n
        return [self.hyp_at(t) for t in range(n)]

    def to_json(self) -> dict:
        doc = {
            "learner": self.learner_id,
            "kind": self.kind,
            "text": str(self.text),
            "budget": self.budget,
            "records": [
                {
                    "t": r.time,
                    "datum": r.datum,
                    **(
                        {"before": value_to_json(r.before), "after": value_to_json(r.after)}
                        if self.kind == "bms"
                        else {}
                    ),
                    "hyp": expr_to_json(r.hyp),
                }
                for r in self.records
            ],
            "cycle": None if self.cycle is None else {"start": self.cycle[0], "period": self.cycle[1]},
            "budget_exhausted": self.exhausted,
            "diverged_at": self.diverged_at,
        }
        if self.kind == "bms":
            states, verdict = visited_states(self)
            doc["visited_states"] = [value_to_json(s) for s in sorted(states, key=_state_key)]
            doc["states_verdict"] = verdict
        return doc


def _state_key(s):
    from .hypspace import sort_key

    return sort_key(s)


def trace(M, T: Text, budget: int = 256) -> Trace:
    if budget < len(T.head) + 1:
        raise ValueError(f"budget {budget} must exceed the head length {len(T.head)}")
    tr = Trace(T, M.kind, M.id, budget)
    nhead, ntail = len(T.head), len(T.tail)
    if M.kind == "history":
        for i in range(budget):
            try:
                h = M(expand(T, i + 1))
            except Divergence:
                tr.diverged_at = i
                return tr
            tr.records.append(Record(i, T[i], None, None, h))
        tr.exhausted = True
        return tr

    memory = M.start if M.kind == "bms" else NO_HYP
    seen: dict = {}
    for i in range(budget):
        if i >= nhead:
            key = (memory, (i - nhead) % ntail)
            first = seen.get(key)
            if first is not None:
                tr.cycle = (first, i - first)
                return tr
            seen[key] = i
        x = T[i]
        if M.kind == "bms":
            out = M.step(memory, x)
            if out is None:
                tr.diverged_at = i
                return tr
            nxt, h = out
            tr.records.append(Record(i, x, memory, nxt, h))
            memory = nxt
        else:
            h = M.step(memory, x)
            if h is None:
                tr.diverged_at = i
                return tr
            tr.records.append(Record(i, x, None, None, h))
            memory = h
    tr.exhausted = True
    return tr


FINITE = "FINITE"
UNDETERMINED = "UNDETERMINED"


def visited_states(tr: Trace) -> tuple:
    if tr.kind != "bms":
        raise TypeError("visited states are defined for BMS traces only")
    states = frozenset(r.before for r in tr.records)
    if tr.diverged_at is not None and not tr.records:
        return frozenset(), FINITE
    return states, (UNDETERMINED if tr.exhausted else FINITE)


# -- learner files ---------------------------------------------------------


def learner_to_json(M) -> dict:
    if M.table is None:
        raise ValueError(f"learner {M.id!r} has no table; materialize it first")
    exact, wild = M.table["exact"], M.table["wild"]
    if M.kind == "bms":
        rows = [
            {"state": value_to_json(s), "datum": d, "next": value_to_json(n), "hyp": expr_to_json(h)}
            for (s, d), (n, h) in exact.items()
        ] + [
            {"state": value_to_json(s), "datum": WILDCARD, "next": value_to_json(n), "hyp": expr_to_json(h)}
            for s, (n, h) in wild.items()
        ]
        doc = {"id": M.id, "kind": "bms", "start": value_to_json(M.start), "transitions": rows}
    else:
        rows = [
            {"prev": expr_to_json(p), "datum": d, "hyp": expr_to_json(h)}
            for (p, d), h in exact.items()
        ] + [{"prev": expr_to_json(p), "datum": WILDCARD, "hyp": expr_to_json(h)} for p, h in wild.items()]
        doc = {"id": M.id, "kind": "iterative", "transitions": rows}
    if M.meta:
        doc.update(M.meta)
    return doc


def learner_from_json(doc, default_id: str = "M"):
    """Decode a learner file; returns ``(learner, required_learners)``.

    A bare list is a BMS transition table. ``requires`` holds the source
    learners that guarded indices in the table refer to.
    """
    if isinstance(doc, str):
        doc = json.loads(doc)
    if isinstance(doc, list):
        doc = {"transitions": doc}
    kind = doc.get("kind", "bms")
    lid = doc.get("id", default_id)
    required = [learner_from_json(r)[0] for r in doc.get("requires", [])]
    meta = {k: doc[k] for k in ("provenance",) if k in doc}
    if kind == "bms":
        rows = [
            (
                value_from_json(r["state"]),
                r["datum"],
                value_from_json(r["next"]),
                expr_from_json(r["hyp"]),
            )
            for r in doc["transitions"]
        ]
        M = BmsLearner.from_table(rows, lid, value_from_json(doc.get("start", 0)), meta=meta)
    elif kind == "iterative":
        rows = [(expr_from_json(r["prev"]), r["datum"], expr_from_json(r["hyp"])) for r in doc["transitions"]]
        M = IterLearner.from_table(rows, lid, meta=meta)
    else:
        raise ValueError(f"unknown learner kind {kind!r}")
    return M, required


def trace_content_at(tr: Trace, t: int) -> frozenset:
    """Content of the data read up to and including record ``t``."""
    return content(expand(tr.text, min(t + 1, tr.text.saturation)))
