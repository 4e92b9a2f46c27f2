"""Verdicts for convergence, finite memory and the learning restrictions.

Quantifiers range over *effective* positions: positions holding ``?`` (or a
padded ``?``) name no language and are skipped. Universally quantified
restrictions over an infinite periodic trace are decided on
:meth:`Trace.exact_horizon` positions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import kernels
from .core import content, expand
from .hypspace import EvalContext, expr_to_json, is_index
from .learners import FINITE, Trace, visited_states


class Pred(str, enum.Enum):
    CONV = "CONV"
    DEC = "DEC"
    CAUT = "CAUT"
    WMON = "WMON"
    MON = "MON"
    SMON = "SMON"
    NU = "NU"
    SNU = "SNU"
    SDEC = "SDEC"
    WB = "WB"
    EX = "EX"
    BMS_STAR = "BMS_STAR"
    T = "T"

    @classmethod
    def parse(cls, tag) -> "Pred":
        if isinstance(tag, Pred):
            return tag
        return cls(str(tag).upper().replace("BMS*", "BMS_STAR"))


RESTRICTIONS = (
    Pred.CONV, Pred.DEC, Pred.CAUT, Pred.WMON, Pred.MON,
    Pred.SMON, Pred.NU, Pred.SNU, Pred.SDEC, Pred.WB,
)
SEMANTIC = (Pred.CAUT, Pred.DEC, Pred.MON, Pred.SMON, Pred.WMON, Pred.NU, Pred.T)

_CODES = {p: getattr(kernels, p.value) for p in RESTRICTIONS}

HOLDS = "HOLDS"
VIOLATED = "VIOLATED"
UNDETERMINED = "UNDETERMINED"


@dataclass
class Verdict:
    pred: Pred
    outcome: str
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.outcome == HOLDS

    @property
    def violated(self) -> bool:
        return self.outcome == VIOLATED

    def triple(self) -> tuple:
        w = self.witness or {}
        return tuple(w[k] for k in ("r", "s", "t") if w.get(k) is not None)

    def to_json(self) -> dict:
        doc = {"pred": self.pred.value, "outcome": self.outcome, "witness": self.witness}
        doc.update(self.details)
        return doc


def effective_positions(tr: Trace, n: int | None = None) -> list:
    """``(time, hypothesis)`` for every non-``?`` position in the first ``n``."""
    if n is None:
        n = tr.exact_horizon()
    return [(t, h) for t in range(n) for h in (tr.hyp_at(t),) if is_index(h)]


def _prefix_masks(tr: Trace, n: int) -> list:
    out, mask = [], 0
    for t in range(min(n, tr.text.saturation)):
        x = tr.text[t]
        if x != "#":
            mask |= 1 << x
        out.append(mask)
    out.extend([mask] * (n - len(out)))
    return out


def _set_mask(xs) -> int:
    m = 0
    for x in xs:
        m |= 1 << x
    return m


def _window(tr: Trace, upto: int | None) -> tuple:
    """Number of positions to inspect and whether they settle the verdict."""
    if upto is None:
        return tr.exact_horizon(), tr.complete
    if tr.cycle is None:
        upto = min(upto, len(tr.records))
    return upto, False


def _explain(ctx, tr, witness) -> dict:
    hyps, sems = {}, {}
    for k, t in witness.items():
        if t is None or k not in "rst":
            continue
        h = tr.hyp_at(t)
        hyps[k] = expr_to_json(h)
        sems[k] = sorted(ctx.semantics(h))
    return {"hypotheses": hyps, "semantics": sems}


def check(pred, tr: Trace, ctx: EvalContext, upto: int | None = None, backend: str | None = None) -> Verdict:
    """Evaluate one predicate on a trace.

    With ``upto`` only the first ``upto`` positions are inspected and a
    clean result is UNDETERMINED rather than HOLDS.
    """
    pred = Pred.parse(pred)
    if pred is Pred.T:
        return Verdict(pred, HOLDS)
    if pred is Pred.EX:
        return check_ex(tr, ctx)
    if pred is Pred.BMS_STAR:
        return check_bms_star(tr)

    n, settled = _window(tr, upto)
    eff = effective_positions(tr, n)
    times = [t for t, _ in eff]
    ids: dict = {}
    hid = [ids.setdefault(h, len(ids)) for _, h in eff]
    sem = [ctx.mask(h) for _, h in eff]
    prefix = _prefix_masks(tr, n)
    cnt = [prefix[t] for t in times]
    total = _set_mask(tr.text.content)

    hit = kernels.first_violation(_CODES[pred], sem, hid, cnt, total, backend=backend)
    if hit is not None:
        t, s, r = hit
        witness = {"r": times[r] if r >= 0 else None, "s": times[s], "t": times[t]}
        return Verdict(pred, VIOLATED, witness, _explain(ctx, tr, witness))
    return Verdict(pred, HOLDS if settled else UNDETERMINED)


def check_ex(tr: Trace, ctx: EvalContext) -> Verdict:
    if tr.diverged_at is not None:
        return Verdict(Pred.EX, VIOLATED, {"diverged_at": tr.diverged_at})
    if tr.cycle is None:
        return Verdict(Pred.EX, UNDETERMINED)
    eff = effective_positions(tr)
    if not eff:
        return Verdict(Pred.EX, VIOLATED, None, {"reason": "no hypothesis"})
    start, period = tr.cycle
    recurring = {h for t, h in eff if start <= t < start + period}
    if len(recurring) > 1:
        return Verdict(Pred.EX, VIOLATED, None, {"reason": "infinitely many mind changes"})
    final = eff[-1][1]
    t0 = eff[-1][0]
    for t, h in reversed(eff):
        if h != final:
            break
        t0 = t
    if ctx.semantics(final) != tr.text.content:
        return Verdict(
            Pred.EX, VIOLATED, {"t0": t0},
            {"final": expr_to_json(final), "semantics": sorted(ctx.semantics(final)), "content": sorted(tr.text.content)},
        )
    return Verdict(Pred.EX, HOLDS, {"t0": t0}, {"final": expr_to_json(final)})


def check_bms_star(tr: Trace) -> Verdict:
    states, verdict = visited_states(tr)
    outcome = HOLDS if verdict == FINITE else UNDETERMINED
    return Verdict(Pred.BMS_STAR, outcome, None, {"distinct_states": len(states)})


def check_all(tr: Trace, ctx: EvalContext, preds=None, backend: str | None = None) -> dict:
    preds = RESTRICTIONS if preds is None else [Pred.parse(p) for p in preds]
    return {p: check(p, tr, ctx, backend=backend) for p in preds}


IMPLICATIONS = (
    (Pred.CONV, (Pred.SNU, Pred.WMON)),
    (Pred.SDEC, (Pred.DEC, Pred.SNU)),
    (Pred.SMON, (Pred.CAUT, Pred.DEC, Pred.MON, Pred.WMON)),
    (Pred.DEC, (Pred.NU,)),
    (Pred.WMON, (Pred.NU,)),
    (Pred.SNU, (Pred.NU,)),
    (Pred.WB, (Pred.CONV, Pred.SDEC, Pred.CAUT)),
)


def implication_audit(traces, ctx: EvalContext, backend: str | None = None) -> dict:
    """Check the backbone implications on every trace.

    A counterexample (premise HOLDS, conclusion VIOLATED) means a checker
    bug, since the implications are theorems about single traces.
    """
    traces = list(traces)
    violations = []
    checked = 0
    undetermined = 0
    for i, tr in enumerate(traces):
        verdicts = check_all(tr, ctx, backend=backend)
        for premise, conclusions in IMPLICATIONS:
            for concl in conclusions:
                a, b = verdicts[premise].outcome, verdicts[concl].outcome
                if UNDETERMINED in (a, b):
                    undetermined += 1
                    continue
                checked += 1
                if a == HOLDS and b == VIOLATED:
                    violations.append(
                        {"trace": i, "text": str(tr.text), "learner": tr.learner_id,
                         "premise": premise.value, "conclusion": concl.value,
                         "witness": verdicts[concl].witness}
                    )
    return {
        "traces": len(traces),
        "instances_checked": checked,
        "instances_undetermined": undetermined,
        "violations": violations,
    }


def replay_witness(pred, tr: Trace, ctx: EvalContext, witness: dict) -> bool:
    """Re-evaluate the cited formula instance directly; True if it is violated."""
    pred = Pred.parse(pred)
    r, s, t = witness.get("r"), witness["s"], witness["t"]
    W = lambda i: ctx.semantics(tr.hyp_at(i))  # noqa: E731
    h = tr.hyp_at
    cnt = lambda i: content(expand(tr.text, i + 1))  # noqa: E731
    total = tr.text.content
    if pred is Pred.CONV:
        return cnt(t) <= W(s) and h(s) != h(t)
    if pred is Pred.CAUT:
        return W(t) < W(s)
    if pred is Pred.WMON:
        return cnt(t) <= W(s) and not W(s) <= W(t)
    if pred is Pred.MON:
        return not (W(s) & total) <= (W(t) & total)
    if pred is Pred.SMON:
        return not W(s) <= W(t)
    if pred is Pred.DEC:
        return W(r) == W(t) and W(r) != W(s)
    if pred is Pred.NU:
        return W(r) == W(t) == total and W(r) != W(s)
    if pred is Pred.SNU:
        return W(r) == W(t) == total and h(r) != h(s)
    if pred is Pred.SDEC:
        return W(r) == W(t) and h(r) != h(s)
    if pred is Pred.WB:
        return r < s and h(r) != h(s) and not (cnt(s) & (W(t) - W(r)))
    raise ValueError(pred)
