"""Named fixture learners, their catalog, and random table generators."""

from __future__ import annotations

import random
from itertools import combinations

from .core import NO_HYP, PAUSE
from .hypspace import Base, Catalog, EvalContext
from .learners import BmsLearner, IterLearner

UNIVERSE = 16

L4 = frozenset(range(0, UNIVERSE + 1, 4))
L2 = frozenset(range(0, UNIVERSE + 1, 2))

P4, P2 = Base("p4"), Base("p2")


def fixture_catalog() -> Catalog:
    return Catalog.from_sets(
        UNIVERSE,
        {
            "p4": L4,
            "p2": L2,
            # revisit fixture: one index per transition
            "c00": {0},
            "c01": {1},
            "c10": {1, 2},
            "c11": {2},
            # three syntactically distinct names for one language
            "up": {1},
            "uq": {1},
            "up_prime": {1},
        },
    )


def multiples() -> BmsLearner:
    """Fixture A: conjectures multiples of 4 until an even non-multiple of 4
    arrives, then multiples of 2 forever. Undefined on odd data."""

    def step(s, x):
        if x != PAUSE and x % 2:
            return None
        if s == 0 and (x == PAUSE or x % 4 == 0):
            return 0, P4
        return 1, P2

    return BmsLearner("A", step, start=0)


def counter() -> BmsLearner:
    """Fixture B: a fresh state on every datum."""
    return BmsLearner("B", lambda q, x: (q + 1, P2), start=0)


def revisit() -> BmsLearner:
    """Fixture C: 0 -> 1 on datum 1, 1 -> 0 on datum 2, self-loops otherwise."""
    rows = [
        (0, 1, 1, Base("c01")),
        (0, "*", 0, Base("c00")),
        (1, 2, 0, Base("c10")),
        (1, "*", 1, Base("c11")),
    ]
    return BmsLearner.from_table(rows, "C", 0)


def u_shape() -> BmsLearner:
    """Three equal-language conjectures in a row on ``1|#``."""
    rows = [
        (0, "*", 1, Base("up")),
        (1, "*", 2, Base("uq")),
        (2, "*", 2, Base("up_prime")),
    ]
    return BmsLearner.from_table(rows, "U", 0)


FIXTURES = {"A": multiples, "B": counter, "C": revisit, "U": u_shape}


def fixture_context() -> EvalContext:
    ctx = EvalContext(fixture_catalog())
    for make in FIXTURES.values():
        ctx.register(make())
    return ctx


# -- random tables -------------------------------------------------------


def subset_catalog(elements=(0, 1, 2), universe_max: int | None = None) -> Catalog:
    """Every subset of ``elements`` as a language named ``L<bitmask>``."""
    elements = tuple(elements)
    sets = {}
    for k in range(len(elements) + 1):
        for combo in combinations(elements, k):
            sets[f"L{sum(1 << e for e in combo)}"] = frozenset(combo)
    return Catalog.from_sets(max(elements) if universe_max is None else universe_max, sets)


def random_bms_table(
    rng: random.Random,
    hyps,
    alphabet=(0, 1, 2, PAUSE),
    max_states: int = 6,
    p_undefined: float = 0.0,
    p_question: float = 0.1,
    id: str = "R",
) -> BmsLearner:
    n = rng.randint(1, max_states)
    hyps = list(hyps)
    rows = []
    for s in range(n):
        for x in alphabet:
            if rng.random() < p_undefined:
                continue
            h = NO_HYP if rng.random() < p_question else Base(rng.choice(hyps))
            rows.append((s, x, rng.randrange(n), h))
    return BmsLearner.from_table(rows, id, 0)


def random_iter_table(
    rng: random.Random,
    hyps,
    alphabet=(0, 1, 2, PAUSE),
    p_undefined: float = 0.0,
    p_question: float = 0.1,
    id: str = "I",
) -> IterLearner:
    hyps = [Base(h) for h in hyps]
    rows = []
    for prev in [NO_HYP] + hyps:
        for x in alphabet:
            if rng.random() < p_undefined:
                continue
            h = NO_HYP if rng.random() < p_question else rng.choice(hyps)
            rows.append((prev, x, h))
    return IterLearner.from_table(rows, id)
