"""Learner-to-learner compilers.

* :func:`it_to_bms` turns an iterative learner into a BMS learner whose
  states are its hypotheses.
* :func:`bms_to_it` turns a BMS learner into an iterative one. The iterative
  learner pads a visit log onto every conjecture and, whenever the source
  would re-enter an already visited state, replays the logged path back to
  the last first-time-visited state (``pump``). Its conjectures are the
  source's effective conjectures on the resulting pumped text.
* :func:`state_decisive` applies the same pumping inside the states of a BMS
  learner, so that withdrawn states are never re-entered.
* :func:`strongly_conservative` and :func:`witness_based` build, from a
  state-decisive strongly locking learner, first a locally conservative
  learner over guarded indices and then a witness-based BMS learner.
"""

from __future__ import annotations

from itertools import product

from .core import NO_HYP, PAUSE, Text, expand
from .hypspace import EvalContext, Guarded, Padded, Union, is_index
from .learners import BmsLearner, Divergence, HistoryLearner, IterLearner, Trace, bms_run, run


class MissingState(KeyError):
    pass


def _provenance(op: str, source, construction: str) -> dict:
    return {"provenance": {"op": op, "source": source.id, "construction": construction}}


# -- iterative -> BMS ------------------------------------------------------


def it_to_bms(M: IterLearner, id: str | None = None) -> BmsLearner:
    """States are the iterative learner's hypotheses; the start state is ``?``."""

    def step(q, x):
        h = M.step(q, x)
        return None if h is None else (h, h)

    return BmsLearner(
        id or f"{M.id}/it2bms", step, start=NO_HYP,
        meta=_provenance("it2bms", M, "hypotheses used as memory states"),
    )


# -- visit logs and pumping ------------------------------------------------


def initial_visit(M: BmsLearner) -> tuple:
    return ((M.start, PAUSE),)


def path_replay(visit, frm, inclusive: bool = False) -> tuple:
    """Data leading from ``frm`` to the last state of the visit log.

    By default the datum that first entered ``frm`` is excluded: replaying
    it from ``frm`` would not follow the logged transitions. ``inclusive``
    keeps it, reproducing the literal path definition for comparison.
    """
    for k, (s, _) in enumerate(visit):
        if s == frm:
            start = k if inclusive else k + 1
            return tuple(d for _, d in visit[start:])
    raise MissingState(f"state {frm!r} not in visit log")


def pump(M: BmsLearner, visit, x, inclusive: bool = False):
    """``(pumped data, next visit log)`` for datum ``x``, or None if undefined."""
    out = M.step(visit[-1][0], x)
    if out is None:
        return None
    nxt = out[0]
    if any(s == nxt for s, _ in visit):
        return (x,) + path_replay(visit, nxt, inclusive), visit
    return (x,), visit + ((nxt, x),)


def chunk_hypothesis(M: BmsLearner, state, data):
    """Last non-``?`` conjecture of ``M`` while reading ``data`` from ``state``.

    ``?`` stands for repeating the previous conjecture, so this is what ``M``
    effectively conjectures after the chunk. Using the literal last output
    instead loses convergence when ``M`` shows its final index only inside
    replayed paths.
    """
    last = NO_HYP
    for x in data:
        out = M.step(state, x)
        if out is None:
            raise Divergence(-1)
        state, h = out
        if is_index(h):
            last = h
    return last


def _decode_visit(M: BmsLearner, prev):
    if prev == NO_HYP:
        return initial_visit(M)
    if isinstance(prev, Padded) and isinstance(prev.payload, tuple) and prev.payload[:1] == ("visit",):
        return prev.payload[1]
    return None


def bms_to_it(M: BmsLearner, id: str | None = None, inclusive: bool = False) -> IterLearner:
    """Iterative learner whose next conjecture depends only on the previous
    (padded) conjecture and the current datum."""

    def step(prev, x):
        visit = _decode_visit(M, prev)
        if visit is None:
            return None
        adv = pump(M, visit, x, inclusive)
        if adv is None:
            return None
        data, new_visit = adv
        try:
            h = chunk_hypothesis(M, visit[-1][0], data)
        except Divergence:
            return None
        return Padded(h, ("visit", new_visit))

    return IterLearner(
        id or f"{M.id}/bms2it", step,
        meta=_provenance("bms2it", M, "iterative simulation on a pumped equivalent text with padded visit logs"),
    )


def equivalent_text(M: BmsLearner, T: Text, horizon: int, inclusive: bool = False) -> tuple:
    """Pumped prefix for the first ``horizon`` data of ``T`` and the simulating map.

    Returns ``(data, sim)`` with ``sim[t]`` the length of the pumped prefix
    matching ``T[:t]`` for ``t <= horizon``.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    visit = initial_visit(M)
    data: list = []
    sim = [0]
    for t in range(horizon):
        adv = pump(M, visit, T[t], inclusive)
        if adv is None:
            raise Divergence(t)
        chunk, visit = adv
        data.extend(chunk)
        sim.append(len(data))
    return tuple(data), tuple(sim)


def pumped_text(M: BmsLearner, T: Text, budget: int = 4096, inclusive: bool = False) -> tuple:
    """The whole pumped text as an eventually periodic :class:`Text`.

    Once the visit log is stable, pumping depends only on the tail offset, so
    the pumped text repeats when ``(visit, offset)`` does. Returns
    ``(text, sim)`` where ``sim(t)`` is defined for every ``t``.
    """
    visit = initial_visit(M)
    data: list = []
    sims = [0]
    seen: dict = {}
    nhead, ntail = len(T.head), len(T.tail)
    for t in range(budget):
        if t >= nhead:
            key = (visit, (t - nhead) % ntail)
            first = seen.get(key)
            if first is not None:
                head = tuple(data[: sims[first]])
                tail = tuple(data[sims[first]:])
                period, base = t - first, sims[first]

                def sim(u, _sims=tuple(sims)):
                    if u <= t:
                        return _sims[u]
                    k, r = divmod(u - first, period)
                    return base + k * len(tail) + (_sims[first + r] - base)

                return Text(head, tail), sim
            seen[key] = t
        adv = pump(M, visit, T[t], inclusive)
        if adv is None:
            raise Divergence(t)
        chunk, visit = adv
        data.extend(chunk)
        sims.append(len(data))
    raise RuntimeError(f"visit log did not stabilize within {budget} steps")


# -- state-decisive normal form -------------------------------------------


def state_decisive(M: BmsLearner, id: str | None = None, inclusive: bool = False) -> BmsLearner:
    """BMS learner over ``(state, visit log)`` that never re-enters a left state."""

    def step(state, x):
        s, visit = state
        out = M.step(s, x)
        if out is None:
            return None
        nxt, h = out
        if any(q == nxt for q, _ in visit):
            try:
                h = chunk_hypothesis(M, s, (x,) + path_replay(visit, nxt, inclusive))
            except Divergence:
                return None
            return state, h
        return (nxt, visit + ((nxt, x),)), h

    return BmsLearner(
        id or f"{M.id}/statedec", step, start=(M.start, initial_visit(M)),
        meta=_provenance("statedec", M, "visit-log states with path pumping on revisits"),
    )


def withdrawn_reentries(tr: Trace) -> list:
    """Times at which a BMS trace enters a state it had previously left."""
    left: set = set()
    hits = []
    for t in range(tr.exact_horizon() if tr.cycle else len(tr.records)):
        r = tr.record_at(t)
        if r.after != r.before:
            left.add(r.before)
            if r.after in left:
                hits.append(t)
    return hits


# -- strongly conservative and witness-based learners ----------------------


def _guarded(M: BmsLearner, h, s):
    return Guarded(M.id, h, s) if is_index(h) else NO_HYP


def sconv_step(M: BmsLearner):
    """Step function of the strongly conservative learner; same states as ``M``."""

    def step(s, x):
        out = M.step(s, x)
        if out is None:
            return None
        nxt, h = out
        return nxt, _guarded(M, h, nxt)

    return step


def strongly_conservative(M: BmsLearner, id: str | None = None) -> HistoryLearner:
    """``σ ↦ Guarded(M, M(σ), state after σ)``; ``?`` on the empty sequence.

    The guarded index only enumerates while the source keeps both its state
    and conjecture on everything enumerated, so a mind change on ``x``
    implies ``x`` was not in the previous conjecture.
    """

    def fn(seq):
        if not seq:
            return NO_HYP
        s, h = bms_run(M, M.start, seq)
        return _guarded(M, h, s)

    learner = HistoryLearner(
        id or f"{M.id}/sconv", fn,
        meta=_provenance("sconv", M, "guarded indices over (conjecture, state)"),
    )
    learner.source = M
    learner.bms = BmsLearner(learner.id, sconv_step(M), start=M.start, meta=learner.meta)
    return learner


def local_conservativeness_violations(Mp: HistoryLearner, ctx: EvalContext, texts, horizon: int) -> list:
    """Prefixes where a mind change on ``x`` happens although ``x`` was in the old conjecture."""
    bad = []
    for T in texts:
        seq = expand(T, horizon)
        prev = Mp(seq[:0])
        for n in range(horizon):
            try:
                nxt = Mp(seq[: n + 1])
            except Divergence:
                break
            x = seq[n]
            if nxt != prev and is_index(prev) and x != PAUSE and x in ctx.semantics(prev):
                bad.append({"text": str(T), "length": n, "datum": x})
            prev = nxt
    return bad


def _mc_data(mc) -> frozenset:
    return frozenset(d for _, d in mc)


def witness_based(M, id: str | None = None) -> BmsLearner:
    """Witness-based BMS learner over ``(state, mind-change log)``.

    Data that already caused a mind change are read as pauses. A new
    conjecture of the strongly conservative learner is emitted patched with
    every logged mind-change datum; repetitions are emitted as ``?``.
    Accepts the source learner or its :func:`strongly_conservative` form.
    """
    source = getattr(M, "source", M)
    inner = sconv_step(source)

    def step(state, x):
        s, mc = state
        y = PAUSE if x in _mc_data(mc) else x
        out = inner(s, y)
        if out is None:
            return None
        nxt, e = out
        last = mc[-1][0] if mc else NO_HYP
        if e == last:
            return (nxt, mc), NO_HYP
        mc = mc + ((e, y),)
        if not is_index(e):
            return (nxt, mc), NO_HYP
        extra = frozenset(d for d in _mc_data(mc) if d != PAUSE)
        return (nxt, mc), Union(extra, e)

    return BmsLearner(
        id or f"{source.id}/wb", step, start=(source.start, ()),
        meta=_provenance("wb", source, "mind-change log states with witness-patched guarded indices"),
    )


def find_locking_sequence(M, language, ctx: EvalContext, max_len: int = 3, depth: int = 3):
    """Bounded search for a locking sequence of ``M`` on ``language``.

    Diagnostic only: a hit is a locking sequence up to extensions of length
    ``depth``; a miss proves nothing.
    """
    alphabet = sorted(language) + [PAUSE]
    for n in range(max_len + 1):
        for sigma in product(alphabet, repeat=n):
            try:
                h = run(M, sigma)
            except Divergence:
                continue
            if not is_index(h) or ctx.semantics(h) != frozenset(language):
                continue
            if _locked(M, sigma, h, alphabet, depth):
                return sigma
    return None


def _locked(M, sigma, h, alphabet, depth) -> bool:
    for k in range(1, depth + 1):
        for tau in product(alphabet, repeat=k):
            try:
                if run(M, sigma + tau) != h:
                    return False
            except Divergence:
                return False
    return True


# -- materialization -------------------------------------------------------


def materialize(M, alphabet, max_states: int = 10_000):
    """Explicit transition table of ``M`` restricted to reachable memory.

    Explores from the start memory over ``alphabet``; undefined steps are
    left out. Raises if more than ``max_states`` memories are reachable.
    """
    alphabet = list(alphabet)
    start = M.start if M.kind == "bms" else NO_HYP
    frontier, seen, rows = [start], {start}, []
    while frontier:
        q = frontier.pop()
        for x in alphabet:
            out = M.step(q, x)
            if out is None:
                continue
            nxt, h = out if M.kind == "bms" else (out, out)
            rows.append((q, x, nxt, h) if M.kind == "bms" else (q, x, h))
            if nxt not in seen:
                if len(seen) >= max_states:
                    raise RuntimeError(f"more than {max_states} reachable states")
                seen.add(nxt)
                frontier.append(nxt)
    if M.kind == "bms":
        return BmsLearner.from_table(rows, M.id, start, meta=M.meta)
    return IterLearner.from_table(rows, M.id, meta=M.meta)


def reachable_states(M, alphabet, max_states: int = 10_000) -> int:
    table = materialize(M, alphabet, max_states)
    if M.kind == "bms":
        return len(table.states)
    return len({p for p, _ in table.table["exact"]} | set(table.table["exact"].values()))


__all__ = [
    "it_to_bms", "bms_to_it", "path_replay", "pump", "equivalent_text", "pumped_text",
    "state_decisive", "chunk_hypothesis", "withdrawn_reentries", "strongly_conservative", "sconv_step",
    "local_conservativeness_violations", "witness_based", "find_locking_sequence",
    "materialize", "reachable_states", "MissingState",
]
