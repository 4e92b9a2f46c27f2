import random
from itertools import product

import pytest
from hypothesis import given

from limitlab.core import NO_HYP, PAUSE, Text, content, expand, parse_text
from limitlab.fixtures import (
    L2, L4, P2, P4, multiples, random_iter_table, revisit, subset_catalog,
)
from limitlab.harness import gen_texts
from limitlab.hypspace import Base, EvalContext, Guarded, Padded, Union, is_index
from limitlab.learners import BmsLearner, Divergence, HistoryLearner, IterLearner, bms_run, iter_run, run, trace
from limitlab.restrictions import check
from limitlab.transforms import (
    MissingState, bms_to_it, chunk_hypothesis, equivalent_text, find_locking_sequence, it_to_bms,
    local_conservativeness_violations, materialize, path_replay, pump, pumped_text, state_decisive,
    strongly_conservative, withdrawn_reentries, witness_based,
)

from conftest import SMALL, bms_tables, texts

V = ((0, PAUSE), (1, 1))


def corpus():
    return gen_texts(L4, count=6, seed=7) + gen_texts(L2, count=6, seed=8)


# -- it_to_bms ---------------------------------------------------------------


def test_it_to_bms_examples():
    M = IterLearner.from_table([(NO_HYP, 4, P4), (NO_HYP, 2, P2), (P4, "*", P4), (P2, "*", P2)], "I")
    N = it_to_bms(M)
    assert N.start == NO_HYP
    assert bms_run(N, N.start, ()) == (NO_HYP, NO_HYP)
    assert bms_run(N, N.start, (4,))[1] == iter_run(M, (4,)) == P4
    reached = {NO_HYP} | {bms_run(N, N.start, seq)[0] for seq in [(4,), (2,), (4, 2), (2, 4)]}
    assert reached == {NO_HYP, P4, P2}


@given(texts())
def test_it_to_bms_exact(T):
    M = random_iter_table(random.Random(hash(T) & 0xFFFF), ["L1", "L2", "L4"])
    N = it_to_bms(M)
    seq = expand(T, 12)
    for n in range(1, len(seq) + 1):
        assert run(N, seq[:n]) == iter_run(M, seq[:n])


# -- pumping -------------------------------------------------------------------


def test_path_replay_examples():
    assert path_replay(V, 1) == ()
    assert path_replay(V, 0) == (1,)
    assert path_replay(((0, PAUSE), (1, 1), (2, 5)), 1) == (5,)
    assert path_replay(V, 0, inclusive=True) == (PAUSE, 1)
    with pytest.raises(MissingState):
        path_replay(V, 9)


def test_bms_to_it_on_revisit_fixture():
    C = revisit()
    Mi = bms_to_it(C)
    h1 = Mi.step(NO_HYP, 1)
    assert h1.payload == ("visit", V)
    assert pump(C, V, 2) == ((2, 1), V)
    h2 = Mi.step(h1, 2)
    assert h2 == Padded(bms_run(C, 1, (2, 1))[1], ("visit", V))


def test_bms_to_it_on_multiples():
    A = multiples()
    Mi = bms_to_it(A)
    h = iter_run(Mi, (4,))
    assert h == Padded(P4, ("visit", ((0, PAUSE),)))
    assert iter_run(Mi, (4, 2)) == Padded(P2, ("visit", ((0, PAUSE), (1, 2))))


def test_equivalent_text_examples():
    data, sim = equivalent_text(multiples(), parse_text("4,2|#"), 4)
    assert data == (4, 2, PAUSE, PAUSE) and sim == (0, 1, 2, 3, 4)
    data, sim = equivalent_text(revisit(), parse_text("1,2|#"), 3)
    assert data[:3] == (1, 2, 1) and sim[2] == 3
    with pytest.raises(Divergence):
        equivalent_text(multiples(), parse_text("4,3|#"), 4)


def test_inclusive_replay_breaks_simulation():
    """Replaying the entering datum from the revisited state leaves the logged path."""
    rows = [(0, 1, 1, P4), (0, "*", 0, P4), (1, 1, 0, P4), (1, 2, 2, P2), (1, "*", 1, P4),
            (2, 3, 1, P2), (2, "*", 2, P2)]
    M = BmsLearner.from_table(rows, "P")
    T = parse_text("1,2,3|#")
    for inclusive, expect_ok in ((False, True), (True, False)):
        data, sim = equivalent_text(M, T, 3, inclusive)
        state, _ = bms_run(M, M.start, data[: sim[3]])
        assert (state == 2) is expect_ok


def test_revisit_fixture_cannot_tell_replay_variants_apart():
    C = revisit()
    for n in range(1, 6):
        for seq in product((1, 2, PAUSE), repeat=n):
            T = Text(seq, (PAUSE,))
            runs = []
            for inclusive in (False, True):
                data, sim = equivalent_text(C, T, n, inclusive)
                runs.append(bms_run(C, C.start, data)[0])
            assert runs[0] == runs[1]


def test_chunk_hypothesis_keeps_question_as_repetition():
    # the source ends every replayed chunk with '?' but conjectures L0 inside it
    rows = [(0, PAUSE, 1, NO_HYP), (1, PAUSE, 0, Base("L0"))]
    M = BmsLearner.from_table(rows, "Q")
    ctx = EvalContext(subset_catalog((0, 1)))
    ctx.register(M)
    T = parse_text("|#")
    Tp, _ = pumped_text(M, T)
    assert check("EX", trace(M, Tp), ctx).holds
    assert chunk_hypothesis(M, 1, (PAUSE, PAUSE)) == Base("L0")
    Mi = ctx.register(bms_to_it(M))
    assert check("EX", trace(Mi, T), ctx).holds


@given(bms_tables(max_states=5), texts())
def test_simulation_contract(M, T):
    ctx = EvalContext(subset_catalog(SMALL))
    Mi = bms_to_it(M)
    data, sim = equivalent_text(M, T, 24)
    prev, last_src, last_it = NO_HYP, NO_HYP, NO_HYP
    state, pos = M.start, 0
    for t in range(1, 25):
        prev = Mi.step(prev, T[t - 1])
        while pos < sim[t]:
            state, h = M.step(state, data[pos])
            pos += 1
            if is_index(h):
                last_src = h
        assert content(expand(T, t)) == content(data[: sim[t]])
        if is_index(prev):
            last_it = prev
        # '?' repeats the previous conjecture, so effective conjectures agree
        assert is_index(last_it) == is_index(last_src)
        if is_index(h):
            assert ctx.semantics(prev) == ctx.semantics(h)
        if is_index(last_it):
            assert ctx.semantics(last_it) == ctx.semantics(last_src)


@given(bms_tables(max_states=5), texts())
def test_pumped_text_matches_prefix(M, T):
    Tp, sim = pumped_text(M, T)
    data, sims = equivalent_text(M, T, 30)
    assert expand(Tp, len(data)) == data
    assert [sim(t) for t in range(31)] == list(sims)
    assert Tp.content == T.content


# -- state-decisive ------------------------------------------------------------


def test_state_decisive_example():
    C = revisit()
    N = state_decisive(C)
    s1, _ = bms_run(N, N.start, (1,))
    assert s1 == (1, V)
    s2, h2 = N.step(s1, 2)
    assert s2 == s1 and h2 == bms_run(C, 1, (2, 1))[1]


def test_state_decisive_without_revisits_is_transparent():
    A = multiples()
    N = state_decisive(A)
    for T in corpus():
        a, n = trace(A, T), trace(N, T)
        assert [a.hyp_at(t) for t in range(20)] == [n.hyp_at(t) for t in range(20)]


@given(bms_tables(max_states=6), texts())
def test_state_decisive_never_reenters(M, T):
    assert withdrawn_reentries(trace(state_decisive(M), T, 2000)) == []


def test_withdrawn_audit_sees_revisits():
    assert withdrawn_reentries(trace(revisit(), parse_text("1,2,1|#"))) == [1, 2]


# -- strongly conservative and witness-based -----------------------------------


def test_strongly_conservative_examples(ctx):
    A = ctx.learner("A")
    Mp = strongly_conservative(A)
    assert Mp(()) == NO_HYP
    assert Mp((4,)) == Guarded("A", P4, 0)
    assert ctx.semantics(Mp((4,))) == L4
    changed = Mp((4, 2))
    assert changed == Guarded("A", P2, 1) != Mp((4,))
    assert 2 not in ctx.semantics(Mp((4,)))
    assert Mp.bms.step(0, 4) == (0, Guarded("A", P4, 0))


def test_local_conservativeness_on_corpus(ctx):
    Mp = strongly_conservative(ctx.learner("A"))
    assert local_conservativeness_violations(Mp, ctx, corpus(), 40) == []


def test_audit_flags_non_conservative(ctx):
    flip = BmsLearner("F", lambda q, x: (1 - q, P4 if q else P2))
    ctx.register(flip)
    H = HistoryLearner("FH", lambda seq: run(flip, seq) if seq else NO_HYP)
    assert local_conservativeness_violations(H, ctx, [parse_text("4|4")], 5)


def test_witness_based_examples(ctx):
    A = ctx.learner("A")
    N = ctx.register(witness_based(A))
    s, h = bms_run(N, N.start, (4,))
    assert h == Union(frozenset({4}), Guarded("A", P4, 0))
    s2, h2 = N.step(s, 2)
    assert h2 == Union(frozenset({4, 2}), Guarded("A", P2, 1))
    assert 2 in ctx.semantics(h2) - ctx.semantics(h)
    # the duplicate 2 is read as a pause and causes nothing
    s3, h3 = N.step(s2, 2)
    assert h3 == NO_HYP and s3[1] == s2[1]

    tr = trace(N, parse_text("0,4,8,12,16|#"))
    effective = {tr.hyp_at(t) for t in range(tr.exact_horizon())} - {NO_HYP}
    assert len(effective) == 1
    assert check("EX", tr, ctx).holds
    assert witness_based(strongly_conservative(A)).step(N.start, 4) == N.step(N.start, 4)


def test_locking_sequence_search(ctx):
    A = ctx.learner("A")
    assert find_locking_sequence(A, L4, ctx) == (0,)
    assert find_locking_sequence(A, L2, ctx, depth=2) == (2,)


def test_materialize_round_trip():
    A = multiples()
    alphabet = [0, 2, 4, PAUSE]
    table = materialize(bms_to_it(A), alphabet)
    for seq in [(4,), (4, 2), (2, 4, PAUSE)]:
        assert iter_run(table, seq) == iter_run(bms_to_it(A), seq)
    with pytest.raises(RuntimeError):
        materialize(BmsLearner("B", lambda q, x: (q + 1, P2)), [PAUSE], max_states=20)


def test_it_to_bms_of_bms_to_it_is_semantically_faithful(ctx):
    A = multiples()
    R = it_to_bms(bms_to_it(A))
    for T in corpus():
        a, r = trace(A, T), trace(R, T)
        for t in range(30):
            assert ctx.semantics(a.hyp_at(t)) == ctx.semantics(r.hyp_at(t))
