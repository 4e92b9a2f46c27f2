"""Finite hypothesis space with staged enumeration.

A catalog of finite languages stands in for the programming system. Each
element carries a delay, the stage at which its enumeration "halts", so
``enumerate_step(p, t)`` is the stage-t approximation of the language named
by ``p``. Derived indices (padding, guarded indices, unions) are structural
values over base ids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .core import NO_HYP, PAUSE


class UnresolvedReference(KeyError):
    pass


# -- index expressions -----------------------------------------------------


class IndexExpr:
    __slots__ = ()

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        return hash(self) == hash(other) and self._fields() == other._fields()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((type(self).__name__,) + self._fields())
            object.__setattr__(self, "_hash", h)
        return h

    def __setattr__(self, name, value):
        raise AttributeError("index expressions are immutable")

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)


class Base(IndexExpr):
    __slots__ = ("id", "_hash")

    def __init__(self, id: str):
        object.__setattr__(self, "id", str(id))
        object.__setattr__(self, "_hash", None)

    def _fields(self):
        return (self.id,)

    def __repr__(self):
        return f"Base({self.id!r})"


class Padded(IndexExpr):
    """Same language as ``inner``; ``payload`` only changes identity.

    ``inner`` may be ``?``: a padded no-hypothesis still carries a payload,
    which iterative learners need to remember their memory.
    """

    __slots__ = ("inner", "payload", "_hash")

    def __init__(self, inner, payload):
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "payload", canonical(payload))
        object.__setattr__(self, "_hash", None)

    def _fields(self):
        return (self.inner, self.payload)

    def __repr__(self):
        return f"Padded({self.inner!r}, {self.payload!r})"


class Guarded(IndexExpr):
    """Enumerates ``e`` only while state ``s`` of learner ``learner`` keeps
    answering ``(s, e)`` on everything enumerated so far."""

    __slots__ = ("learner", "e", "s", "_hash")

    def __init__(self, learner: str, e: IndexExpr, s):
        object.__setattr__(self, "learner", str(learner))
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "s", canonical(s))
        object.__setattr__(self, "_hash", None)

    def _fields(self):
        return (self.learner, self.e, self.s)

    def __repr__(self):
        return f"Guarded({self.learner!r}, {self.e!r}, {self.s!r})"


class Union(IndexExpr):
    __slots__ = ("extra", "e", "_hash")

    def __init__(self, extra, e: IndexExpr):
        object.__setattr__(self, "extra", frozenset(extra))
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "_hash", None)

    def _fields(self):
        return (self.extra, self.e)

    def __repr__(self):
        return f"Union({sorted(self.extra)!r}, {self.e!r})"


def is_index(h) -> bool:
    """True for hypotheses that name a language (not ``?``, not padded ``?``)."""
    while isinstance(h, Padded):
        h = h.inner
    return isinstance(h, IndexExpr)


def sort_key(v):
    if isinstance(v, bool):
        return (0, int(v))
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, str):
        return (1, v)
    if isinstance(v, tuple):
        return (2, tuple(sort_key(x) for x in v))
    if isinstance(v, frozenset):
        return (3, tuple(sorted(sort_key(x) for x in v)))
    if isinstance(v, IndexExpr):
        return (4, type(v).__name__, tuple(sort_key(f) for f in v._fields()))
    if v is None:
        return (-1,)
    return (5, repr(v))


def canonical(v):
    """Hashable, deterministic form of a payload or state value."""
    if isinstance(v, (list, tuple)):
        return tuple(canonical(x) for x in v)
    if isinstance(v, (set, frozenset)):
        return frozenset(canonical(x) for x in v)
    if isinstance(v, dict):
        return tuple(sorted(((canonical(k), canonical(x)) for k, x in v.items()), key=sort_key))
    return v


def pad(p, payload) -> Padded:
    return Padded(p, payload)


# -- catalog and evaluation context ---------------------------------------


@dataclass(frozen=True)
class Language:
    elements: frozenset
    delay: Mapping[int, int] = field(default_factory=dict)

    def stage(self, x: int) -> int:
        """First stage at which ``x`` is enumerated."""
        return max(x, self.delay.get(x, 0))


@dataclass(frozen=True)
class Catalog:
    universe_max: int
    languages: Mapping[str, Language]

    def __post_init__(self):
        for lid, lang in self.languages.items():
            for x in lang.elements:
                if not 0 <= x <= self.universe_max:
                    raise ValueError(f"language {lid}: element {x} outside 0..{self.universe_max}")

    @classmethod
    def from_sets(cls, universe_max: int, sets: Mapping[str, Any], delays=None) -> "Catalog":
        delays = delays or {}
        langs = {
            str(k): Language(frozenset(v), dict(delays.get(k, {}))) for k, v in sets.items()
        }
        return cls(universe_max, langs)

    @classmethod
    def from_json(cls, doc) -> "Catalog":
        if isinstance(doc, str):
            doc = json.loads(doc)
        langs = {}
        for entry in doc["languages"]:
            lid = str(entry["id"])
            if lid in langs:
                raise ValueError(f"duplicate language id {lid!r}")
            delay = {int(k): int(v) for k, v in entry.get("delay", {}).items()}
            langs[lid] = Language(frozenset(int(x) for x in entry["elements"]), delay)
        return cls(int(doc.get("universe_max", 16)), langs)

    def to_json(self) -> dict:
        return {
            "universe_max": self.universe_max,
            "languages": [
                {
                    "id": lid,
                    "elements": sorted(lang.elements),
                    **({"delay": {str(k): v for k, v in sorted(lang.delay.items())}} if lang.delay else {}),
                }
                for lid, lang in self.languages.items()
            ],
        }

    @property
    def max_delay(self) -> int:
        return max((d for lang in self.languages.values() for d in lang.delay.values()), default=0)


class EvalContext:
    """Catalog plus the learner registry that guarded indices refer to.

    Semantics are memoized; registering a learner never changes the meaning
    of an already evaluated expression because learner ids are unique.
    """

    def __init__(self, catalog: Catalog, learners=None, t_stab: int | None = None):
        self.catalog = catalog
        self.learners = dict(learners or {})
        floor = catalog.universe_max + catalog.max_delay
        self.t_stab = floor if t_stab is None else t_stab
        if self.t_stab < floor:
            raise ValueError(f"t_stab must be at least {floor}")
        self._sem: dict = {}
        self._mask: dict = {}

    def register(self, learner):
        known = self.learners.get(learner.id)
        if known is not None and known is not learner:
            raise ValueError(f"learner id {learner.id!r} already registered")
        self.learners[learner.id] = learner
        return learner

    def learner(self, lid: str):
        try:
            return self.learners[lid]
        except KeyError:
            raise UnresolvedReference(f"unknown learner id {lid!r}") from None

    def language(self, lid: str) -> Language:
        try:
            return self.catalog.languages[lid]
        except KeyError:
            raise UnresolvedReference(f"unknown base id {lid!r}") from None

    def semantics(self, p) -> frozenset:
        return semantics(self, p)

    def mask(self, p) -> int:
        m = self._mask.get(p)
        if m is None:
            m = 0
            for x in semantics(self, p):
                m |= 1 << x
            self._mask[p] = m
        return m


def _guard_failure_stage(ctx: EvalContext, p: Guarded, limit: int) -> int | None:
    """Least stage u <= limit whose guard fails, or None."""
    learner = ctx.learner(p.learner)
    checked: set = set()
    for u in range(limit + 1):
        for x in enumerate_step(ctx, p.e, u):
            if x in checked:
                continue
            out = learner.step(p.s, x)
            if out is None or out[0] != p.s or out[1] != p.e:
                return u
            checked.add(x)
    return None


def enumerate_step(ctx: EvalContext, p, t: int) -> frozenset:
    if t < 0:
        return frozenset()
    if isinstance(p, Base):
        lang = ctx.language(p.id)
        return frozenset(x for x in lang.elements if lang.stage(x) <= t)
    if isinstance(p, Padded):
        if not is_index(p.inner):
            raise ValueError("a padded '?' names no language")
        return enumerate_step(ctx, p.inner, t)
    if isinstance(p, Union):
        return p.extra | enumerate_step(ctx, p.e, t)
    if isinstance(p, Guarded):
        # guard verdicts are monotone: once some enumerated x fails, it stays enumerated
        fail = _guard_failure_stage(ctx, p, t)
        last_ok = t if fail is None else fail - 1
        return enumerate_step(ctx, p.e, last_ok)
    raise TypeError(f"not an index expression: {p!r}")


def semantics(ctx: EvalContext, p) -> frozenset:
    cached = ctx._sem.get(p)
    if cached is not None:
        return cached
    # base schedules are constant beyond t_stab, so this stage is the limit
    result = enumerate_step(ctx, p, ctx.t_stab + 1)
    ctx._sem[p] = result
    return result


def semantically_equal(ctx: EvalContext, p, q) -> bool:
    return semantics(ctx, p) == semantics(ctx, q)


# -- JSON codecs -----------------------------------------------------------


def value_to_json(v):
    if isinstance(v, IndexExpr):
        return {"index": expr_to_json(v)}
    if isinstance(v, tuple):
        return [value_to_json(x) for x in v]
    if isinstance(v, frozenset):
        return {"set": [value_to_json(x) for x in sorted(v, key=sort_key)]}
    return v


def value_from_json(doc):
    if isinstance(doc, list):
        return tuple(value_from_json(x) for x in doc)
    if isinstance(doc, dict):
        if "index" in doc:
            return expr_from_json(doc["index"])
        if "set" in doc:
            return frozenset(value_from_json(x) for x in doc["set"])
        raise ValueError(f"cannot decode value {doc!r}")
    return doc


def expr_to_json(p):
    if p == NO_HYP:
        return NO_HYP
    if isinstance(p, Base):
        return p.id
    if isinstance(p, Padded):
        return {"pad": expr_to_json(p.inner), "payload": value_to_json(p.payload)}
    if isinstance(p, Guarded):
        return {"guarded": p.learner, "e": expr_to_json(p.e), "s": value_to_json(p.s)}
    if isinstance(p, Union):
        return {"union": sorted(p.extra), "e": expr_to_json(p.e)}
    raise TypeError(f"not a hypothesis: {p!r}")


def expr_from_json(doc):
    if isinstance(doc, str):
        return NO_HYP if doc == NO_HYP else Base(doc)
    if isinstance(doc, dict):
        if "base" in doc:
            return Base(doc["base"])
        if "pad" in doc:
            return Padded(expr_from_json(doc["pad"]), value_from_json(doc.get("payload")))
        if "guarded" in doc:
            return Guarded(doc["guarded"], expr_from_json(doc["e"]), value_from_json(doc["s"]))
        if "union" in doc:
            return Union(frozenset(int(x) for x in doc["union"] if x != PAUSE), expr_from_json(doc["e"]))
    raise ValueError(f"cannot decode index expression {doc!r}")
