"""Text corpora, the brute-force oracle and experiment orchestration."""

from __future__ import annotations

import datetime
import json
import os
import random
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .core import NO_HYP, PAUSE, Text, parse_text
from .fixtures import FIXTURES, fixture_catalog
from .hypspace import Catalog, EvalContext, is_index
from .learners import learner_from_json, trace
from .restrictions import (
    HOLDS, RESTRICTIONS, UNDETERMINED, VIOLATED, Pred, check, implication_audit,
)
from . import transforms


class ConfigError(ValueError):
    pass


# -- corpora ---------------------------------------------------------------


def gen_texts(language, max_head: int = 8, count: int = 8, seed: int = 0, universe_max: int | None = None) -> list:
    """Seeded eventually periodic texts whose content is exactly ``language``.

    Always includes the sorted canonical text and a pause-inflated copy of
    it; the rest shuffle, repeat and interleave pauses in the head and push
    whatever does not fit into the tail.
    """
    L = sorted(set(language))
    if universe_max is not None and any(x > universe_max for x in L):
        raise ConfigError(f"language {L} exceeds universe 0..{universe_max}")
    rng = random.Random(seed)
    texts = [Text(tuple(L), (PAUSE,))]
    inflated = tuple(y for x in L for y in (PAUSE, x))
    if len(inflated) <= max(max_head, 1) or not L:
        texts.append(Text(inflated or (PAUSE,), (PAUSE,)))
    else:
        texts.append(Text(inflated[:max_head], tuple(L) + (PAUSE,)))
    attempts = 0
    while len(texts) < count and attempts < 50 * count:
        attempts += 1
        n = rng.randint(0, max_head)
        pool = L + [PAUSE]
        head = [rng.choice(pool) for _ in range(n)]
        missing = [x for x in L if x not in head]
        rng.shuffle(missing)
        if missing:
            tail = tuple(missing) + ((PAUSE,) if rng.random() < 0.5 else ())
        elif L and rng.random() < 0.3:
            tail = (rng.choice(L), PAUSE)
        else:
            tail = (PAUSE,)
        T = Text(tuple(head), tail)
        if T not in texts:
            texts.append(T)
    return texts


def random_texts(alphabet, n: int, rng: random.Random, max_head: int = 6, max_tail: int = 3) -> list:
    alphabet = list(alphabet)
    out = []
    for _ in range(n):
        head = tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_head)))
        tail = tuple(rng.choice(alphabet) for _ in range(rng.randint(1, max_tail)))
        out.append(Text(head, tail))
    return out


# -- brute-force oracle ----------------------------------------------------

ORACLE_LIMIT = 10**6


class OracleTooLarge(RuntimeError):
    def __init__(self, count: int):
        super().__init__(f"{count} sequences exceed the oracle limit of {ORACLE_LIMIT}")
        self.count = count


def _oracle_restrictions(preds, W: list, h: list, cnt: list, total: frozenset) -> dict:
    """Evaluate every quantifier instance at once and report each predicate.

    Positions holding ``?`` are dropped first; the remaining formula
    instances are laid out as boolean pair and triple arrays over the
    effective positions.
    """
    idx = [i for i in range(len(h)) if W[i] is not None]
    n = len(idx)
    W = [W[i] for i in idx]
    cnt = [cnt[i] for i in idx]
    h = [h[i] for i in idx]
    universe = sorted(set().union(total, *W, *cnt))
    inW = np.array([[x in w for x in universe] for w in W], dtype=bool).reshape(n, len(universe))
    inC = np.array([[x in c for x in universe] for c in cnt], dtype=bool).reshape(n, len(universe))
    inT = np.array([x in total for x in universe], dtype=bool)

    # a[i, j] for "set_i subset of set_j" and friends
    sub = ~np.any(inW[:, None, :] & ~inW[None, :, :], axis=2)
    eqW = sub & sub.T
    eqh = np.array([[a == b for b in h] for a in h], dtype=bool).reshape(n, n)
    cnt_in_W = ~np.any(inC[:, None, :] & ~inW[None, :, :], axis=2)  # [t, s]: cnt_t <= W_s
    full = np.all(inW == inT, axis=1) if n else np.zeros(0, dtype=bool)
    pos = np.arange(n)
    le = pos[:, None] <= pos[None, :]  # [s, t]: s <= t
    ord3 = le[:, :, None] & le[None, :, :]  # [r, s, t]: r <= s <= t

    out = {}
    for p in preds:
        if p is Pred.CONV:
            bad = le & cnt_in_W.T & ~eqh
        elif p is Pred.CAUT:
            bad = le & sub.T & ~eqW
        elif p is Pred.WMON:
            bad = le & cnt_in_W.T & ~sub
        elif p is Pred.MON:
            inWT = inW & inT
            bad = le & np.any(inWT[:, None, :] & ~inWT[None, :, :], axis=2)
        elif p is Pred.SMON:
            bad = le & ~sub
        elif p is Pred.DEC:
            bad = ord3 & eqW[:, None, :] & ~eqW[:, :, None]
        elif p is Pred.NU:
            bad = ord3 & (eqW & full[:, None] & full[None, :])[:, None, :] & ~eqW[:, :, None]
        elif p is Pred.SNU:
            bad = ord3 & (eqW & full[:, None] & full[None, :])[:, None, :] & ~eqh[:, :, None]
        elif p is Pred.SDEC:
            bad = ord3 & eqW[:, None, :] & ~eqh[:, :, None]
        elif p is Pred.WB:
            strict = (pos[:, None] < pos[None, :])[:, :, None] & le[None, :, :]
            # witness[r, s, t]: some x in cnt_s, in W_t, not in W_r
            witness = np.any(inC[None, :, None, :] & inW[None, None, :, :] & ~inW[:, None, None, :], axis=3)
            bad = strict & ~eqh[:, :, None] & ~witness
        else:
            raise ValueError(p)
        out[p] = VIOLATED if bad.any() else HOLDS
    return out


def oracle_horizon(head_len: int, state_bound: int) -> int:
    """Positions needed on ``head`` followed by pauses.

    Past the head the memory run is periodic after at most ``state_bound``
    steps with period at most ``state_bound``; three periods beyond that
    cover every ordered triple, and one more leaves room for Ex's window.
    """
    return head_len + 4 * (state_bound + 1) + 1


def brute_force_oracle(M, alphabet, max_len: int, ctx: EvalContext, state_bound: int | None = None,
                       preds=None) -> list:
    """Exhaustive verdicts for every ``Text(σ, #)`` with ``|σ| <= max_len``.

    Simulates the step function directly over a long pause-padded prefix (no
    cycle detection) and expands each restriction's quantifiers. Each entry
    holds the states and hypotheses on ``σ`` itself plus the verdicts.
    """
    M = getattr(M, "bms", M)
    if M.kind == "history":
        raise TypeError("the oracle needs a step function; materialize the learner first")
    symbols = list(alphabet) + [PAUSE]
    count = sum(len(symbols) ** k for k in range(max_len + 1))
    if count > ORACLE_LIMIT:
        raise OracleTooLarge(count)
    if state_bound is None:
        state_bound = len(M.states) if getattr(M, "states", None) else transforms.reachable_states(M, symbols)
    if preds is None:
        preds = list(RESTRICTIONS) + [Pred.EX] + ([Pred.BMS_STAR] if M.kind == "bms" else [])
    preds = [Pred.parse(p) for p in preds]
    table = []
    for n in range(max_len + 1):
        for sigma in product(symbols, repeat=n):
            table.append(_oracle_entry(M, sigma, ctx, state_bound, preds))
    return table


def _oracle_entry(M, sigma, ctx, state_bound, preds) -> dict:
    H = oracle_horizon(len(sigma), state_bound)
    data = list(sigma) + [PAUSE] * (H - len(sigma))
    bms = M.kind == "bms"
    memory = M.start if bms else NO_HYP
    states, hyps = [], []
    diverged = None
    for i, x in enumerate(data):
        out = M.step(memory, x)
        if out is None:
            diverged = i
            break
        if bms:
            states.append(memory)
            memory, hyp = out
        else:
            memory = hyp = out
        hyps.append(hyp)
    total = frozenset(x for x in sigma if x != PAUSE)
    W = [ctx.semantics(h) if is_index(h) else None for h in hyps]
    cnt, seen = [], set()
    for x in data[: len(hyps)]:
        if x != PAUSE:
            seen.add(x)
        cnt.append(frozenset(seen))
    verdicts = _oracle_restrictions([p for p in preds if p in RESTRICTIONS], W, hyps, cnt, total)
    for p in preds:
        if p is Pred.EX:
            verdicts[p] = _oracle_ex(W, hyps, total, diverged, H, state_bound)
        elif p is Pred.BMS_STAR:
            # every memory of the run shows up before the first full period ends
            early = set(states[: len(sigma) + state_bound + 1])
            verdicts[p] = HOLDS if diverged is not None or set(states) <= early else UNDETERMINED
        elif p is Pred.T:
            verdicts[p] = HOLDS
    return {
        "sequence": sigma,
        "states": states[: len(sigma)] if bms else None,
        "hypotheses": hyps[: len(sigma)],
        "diverged_at": diverged,
        "verdicts": verdicts,
    }


def _oracle_ex(W, hyps, total, diverged, H, state_bound) -> str:
    if diverged is not None:
        return VIOLATED
    window = H - (state_bound + 1)
    for t0 in range(min(window, len(hyps))):
        if W[t0] is None or W[t0] != total:
            continue
        if all(W[t] is None or hyps[t] == hyps[t0] for t in range(t0, len(hyps))):
            return HOLDS
    return VIOLATED


def compare_with_oracle(M, alphabet, max_len, ctx, budget: int = 256, state_bound=None) -> list:
    """Entries where trace-based verdicts differ from the oracle's."""
    table = brute_force_oracle(M, alphabet, max_len, ctx, state_bound=state_bound)
    mismatches = []
    for entry in table:
        T = Text(entry["sequence"], (PAUSE,))
        tr = trace(M, T, max(budget, len(T.head) + 1))
        for p, expected in entry["verdicts"].items():
            got = check(p, tr, ctx).outcome
            if got != expected:
                mismatches.append({"text": str(T), "pred": p.value, "oracle": expected, "trace": got})
    return mismatches


# -- experiments -----------------------------------------------------------

TRANSFORM_OPS = {
    "it2bms": lambda M: transforms.it_to_bms(M),
    "bms2it": lambda M: transforms.bms_to_it(M),
    "statedec": lambda M: transforms.state_decisive(M),
    "sconv": lambda M: transforms.strongly_conservative(M),
    "wb": lambda M: transforms.witness_based(M),
}


def apply_transforms(M, ops, ctx: EvalContext):
    ctx.register(M)
    for op in ops:
        if op not in TRANSFORM_OPS:
            raise ConfigError(f"unknown transform {op!r}")
        M = TRANSFORM_OPS[op](M)
        ctx.register(M)
    return M


def load_catalog(spec, base: Path | None = None) -> Catalog:
    if spec in (None, "fixtures"):
        return fixture_catalog()
    if isinstance(spec, dict):
        return Catalog.from_json(spec)
    path = Path(base or ".") / spec
    try:
        return Catalog.from_json(json.loads(path.read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_learner(spec, ctx: EvalContext, base: Path | None = None):
    """``fixture:A`` or a path to a learner file; registers what it needs."""
    if isinstance(spec, str) and spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in FIXTURES:
            raise ConfigError(f"unknown fixture {name!r}")
        M = ctx.learners.get(name) or FIXTURES[name]()
        return ctx.register(M)
    path = Path(base or ".") / spec
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        M, required = learner_from_json(doc, default_id=path.stem)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: bad learner table: {exc}") from exc
    for R in required:
        ctx.register(R)
    return ctx.register(M)


@dataclass
class ExperimentConfig:
    catalog: object = "fixtures"
    learners: list = field(default_factory=list)
    texts: list = field(default_factory=list)
    generate: list = field(default_factory=list)
    seed: int = 0
    budget: int = 256
    predicates: list = field(default_factory=lambda: ["EX"])
    expect: dict = field(default_factory=dict)
    fail_on_undetermined: bool = False
    base_dir: str = "."

    def __post_init__(self):
        if self.budget < 1:
            raise ConfigError("budget must be at least 1")
        self.predicates = [Pred.parse(p) for p in self.predicates]
        self.expect = {Pred.parse(k).value: v for k, v in self.expect.items()}

    @classmethod
    def from_json(cls, doc, base_dir: str = ".") -> "ExperimentConfig":
        if isinstance(doc, (str, Path)):
            path = Path(doc)
            try:
                doc = json.loads(path.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"{path}: {exc}") from exc
            base_dir = str(path.parent)
        known = {k: v for k, v in doc.items() if k in cls.__dataclass_fields__}
        unknown = set(doc) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        known.setdefault("base_dir", base_dir)
        seed = os.environ.get("LIMITLAB_SEED")
        if seed is not None:
            known["seed"] = int(seed)
        return cls(**known)


def _corpus(cfg: ExperimentConfig, ctx: EvalContext) -> list:
    texts = [parse_text(t) if isinstance(t, str) else Text(tuple(t[0]), tuple(t[1])) for t in cfg.texts]
    for k, gen in enumerate(cfg.generate):
        lang = gen["language"]
        elements = ctx.catalog.languages[lang].elements if isinstance(lang, str) else lang
        texts += gen_texts(
            elements, gen.get("max_head", 8), gen.get("count", 8),
            seed=cfg.seed + k, universe_max=ctx.catalog.universe_max,
        )
    return texts


def run_experiment(cfg: ExperimentConfig) -> tuple:
    """Run every (learner, text) pair; returns ``(report, exit_code)``."""
    base = Path(cfg.base_dir)
    ctx = EvalContext(load_catalog(cfg.catalog, base))
    learners = []
    for spec in cfg.learners:
        if isinstance(spec, str):
            spec = {"learner": spec}
        M = load_learner(spec["learner"], ctx, base)
        learners.append(apply_transforms(M, spec.get("transforms", []), ctx))
    texts = _corpus(cfg, ctx)

    pairs, traces, failures = [], [], []
    summary = {p.value: {HOLDS: 0, VIOLATED: 0, UNDETERMINED: 0} for p in cfg.predicates}
    for M in learners:
        for T in texts:
            tr = trace(M, T, max(cfg.budget, len(T.head) + 1))
            if M.kind != "history":
                traces.append(tr)
            verdicts = {}
            for p in cfg.predicates:
                if p is Pred.BMS_STAR and M.kind != "bms":
                    continue
                v = check(p, tr, ctx)
                verdicts[p.value] = v.to_json()
                summary[p.value][v.outcome] += 1
                want = cfg.expect.get(p.value)
                if want == HOLDS and (v.violated or (cfg.fail_on_undetermined and v.outcome == UNDETERMINED)):
                    failures.append({"learner": M.id, "text": str(T), "pred": p.value,
                                     "outcome": v.outcome, "witness": v.witness})
            pairs.append({"learner": M.id, "text": str(T), "diverged_at": tr.diverged_at,
                          "cycle": tr.cycle, "verdicts": verdicts})

    report = {
        "seed": cfg.seed,
        "budget": cfg.budget,
        "learners": [M.id for M in learners],
        "texts": [str(T) for T in texts],
        "pairs": pairs,
        "summary": summary,
        "implication_audit": implication_audit(traces, ctx),
        "failures": failures,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    return report, (1 if failures else 0)
