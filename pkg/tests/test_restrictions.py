import pytest
from hypothesis import given
from hypothesis import strategies as st

from limitlab.core import NO_HYP, PAUSE, Text, parse_text
from limitlab.fixtures import L2, P2, P4, counter, multiples, subset_catalog, u_shape
from limitlab.hypspace import Base, EvalContext
from limitlab.learners import BmsLearner, HistoryLearner, trace
from limitlab.restrictions import (
    HOLDS, RESTRICTIONS, UNDETERMINED, Pred, check, check_all, effective_positions,
    implication_audit, replay_witness,
)

import reference
from conftest import SMALL, bms_tables, texts


def seq_learner(hyps, id="S"):
    """BMS learner emitting a fixed hypothesis list, then repeating the last."""
    def step(q, x):
        return min(q + 1, len(hyps)), hyps[min(q, len(hyps) - 1)]
    return BmsLearner(id, step)


def test_effective_positions_examples(ctx):
    tr = trace(seq_learner([NO_HYP, P4, NO_HYP, P2]), parse_text("|#"))
    assert effective_positions(tr, 4) == [(1, P4), (3, P2)]
    tr = trace(seq_learner([NO_HYP]), parse_text("|#"))
    assert effective_positions(tr) == []
    tr = trace(seq_learner([P4, P2]), parse_text("|#"))
    assert [t for t, _ in effective_positions(tr, 5)] == [0, 1, 2, 3, 4]


def test_fixture_a_examples(ctx):
    tr = trace(multiples(), parse_text("4,2|#"))
    assert check("SMON", tr, ctx).holds
    assert check("WB", tr, ctx).holds
    v = check("EX", tr, ctx)
    assert v.violated and v.details["final"] == "p2"

    tr = trace(multiples(), Text(tuple(sorted(L2)), (PAUSE,)))
    v = check(Pred.EX, tr, ctx)
    assert v.holds and v.details["final"] == "p2"
    assert check(Pred.BMS_STAR, tr, ctx).holds


def test_u_shape_separates_snu_from_nu(ctx):
    tr = trace(u_shape(), parse_text("1|#"))
    snu = check("SNU", tr, ctx)
    assert snu.violated and snu.triple() == (0, 1, 2)
    assert check("NU", tr, ctx).holds


def test_constant_question_is_not_ex(ctx):
    tr = trace(seq_learner([NO_HYP]), parse_text("1|#"))
    assert check("EX", tr, ctx).violated
    assert check("BMS_STAR", tr, ctx).holds


def test_counter_is_undetermined(ctx):
    tr = trace(counter(), parse_text("|#"), 64)
    v = check("BMS_STAR", tr, ctx)
    assert v.outcome == UNDETERMINED and v.details["distinct_states"] == 64
    assert check("EX", tr, ctx).outcome == UNDETERMINED
    # a clean restriction on an unfinished trace is not a proof
    assert check("SMON", tr, ctx).outcome == UNDETERMINED


def test_divergence_is_ex_violation(ctx):
    tr = trace(multiples(), parse_text("4,1|#"))
    assert check("EX", tr, ctx).violated
    assert check("SMON", tr, ctx).holds


def test_upto_window_is_undetermined(ctx):
    tr = trace(multiples(), parse_text("4,2|#"))
    assert check("SMON", tr, ctx, upto=3).outcome == UNDETERMINED
    assert check("CAUT", trace(seq_learner([P2, P4]), parse_text("|#")), ctx, upto=2).violated


def test_trivial_predicate(ctx):
    assert check("T", trace(counter(), parse_text("|#"), 8), ctx).holds


def test_pred_parse():
    assert Pred.parse("bms*") is Pred.BMS_STAR
    with pytest.raises(ValueError):
        Pred.parse("XYZ")


def test_audit_contrapositive_on_nu_violation():
    cat = subset_catalog(SMALL)
    ctx = EvalContext(cat)
    full, other = Base("L3"), Base("L1")
    tr = trace(seq_learner([full, other, full]), parse_text("0,1|#"))
    verdicts = check_all(tr, ctx)
    assert verdicts[Pred.NU].violated
    assert any(verdicts[p].violated for p in (Pred.DEC, Pred.WMON, Pred.SNU))
    assert implication_audit([tr], ctx)["violations"] == []


def test_history_traces_are_checked_on_their_window(ctx):
    H = HistoryLearner("H", lambda seq: P4 if len(seq) < 3 else P2)
    tr = trace(H, parse_text("4|#"), 10)
    assert check("SMON", tr, ctx).outcome == UNDETERMINED
    assert check("CAUT", trace(HistoryLearner("G", lambda s: P2 if len(s) < 3 else P4), parse_text("4|#"), 10), ctx).violated


# -- properties --------------------------------------------------------------


def _small_ctx(M):
    ctx = EvalContext(subset_catalog(SMALL))
    ctx.register(M)
    return ctx


@given(bms_tables(max_states=4, p_undefined=0.1), texts(), st.sampled_from(RESTRICTIONS))
def test_verdict_matches_reference(M, T, pred):
    ctx = _small_ctx(M)
    tr = trace(M, T, 400)
    n = tr.exact_horizon()
    rows = reference.positions(tr, ctx, n)
    hit = reference.first_violation(
        pred.value, [r[1] for r in rows], [r[2] for r in rows], [r[3] for r in rows], T.content
    )
    v = check(pred, tr, ctx)
    if hit is None:
        assert v.outcome == HOLDS
    else:
        t, s, r = hit
        assert v.violated
        assert (v.witness["t"], v.witness["s"]) == (rows[t][0], rows[s][0])
        assert v.witness["r"] == (rows[r][0] if r >= 0 else None)


@given(bms_tables(max_states=4), texts(), st.sampled_from(RESTRICTIONS))
def test_exact_horizon_is_enough(M, T, pred):
    """Extending the window by several periods never finds a new violation."""
    ctx = _small_ctx(M)
    tr = trace(M, T, 400)
    if tr.cycle is None:
        return
    longer = tr.exact_horizon() + 4 * tr.cycle[1] + len(T.tail) + 3
    assert check(pred, tr, ctx).violated == check(pred, tr, ctx, upto=longer).violated


@given(bms_tables(max_states=4, p_undefined=0.1), texts(), st.sampled_from(RESTRICTIONS))
def test_witnesses_replay(M, T, pred):
    ctx = _small_ctx(M)
    v = check(pred, trace(M, T, 400), ctx)
    if v.violated:
        assert replay_witness(pred, trace(M, T, 400), ctx, v.witness)


@given(bms_tables(max_states=4), texts(), st.sampled_from(RESTRICTIONS), st.integers(1, 12), st.integers(0, 12))
def test_monotone_refutation(M, T, pred, n, extra):
    ctx = _small_ctx(M)
    tr = trace(M, T, 400)
    if check(pred, tr, ctx, upto=n).violated:
        assert check(pred, tr, ctx, upto=n + extra).violated
        assert check(pred, tr, ctx).violated


@given(bms_tables(max_states=4), texts())
def test_backends_agree_on_traces(M, T):
    ctx = _small_ctx(M)
    tr = trace(M, T, 400)
    for pred in RESTRICTIONS:
        assert check(pred, tr, ctx, backend="python") == check(pred, tr, ctx, backend="cython")
