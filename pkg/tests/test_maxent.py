import io
import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cue_corpus, make_example
from wsdkit.lexkb import fixture_path
from wsdkit.maxent import (CrossValidationError, SelectionError, TrainingError, classify,
                           cross_validate, dumps, extract_features, fit, loads,
                           parse_selection, read_corpus, select_best, stratified_folds, train,
                           vote_me, write_corpus)
from wsdkit.maxent.corpus import AnnotatedToken, CorpusError, TrainingExample
from wsdkit.maxent.features import BOUNDARY_LEFT, BOUNDARY_RIGHT
from wsdkit.maxent.selection import PER_POS


@pytest.fixture(scope="module")
def interest():
    return read_corpus(fixture_path("interest.corpus"))


def me_oracle(contexts, labels, senses):
    """Maximum-entropy p(c|x) by direct convex optimisation of the primal."""
    cp = pytest.importorskip("cvxpy")
    feats = sorted({(p, s) for ctx, s in zip(contexts, labels) for p in ctx})
    P = cp.Variable((len(contexts), len(senses)))
    cons = [P >= 0, cp.sum(P, axis=1) == 1]
    for q, s in feats:
        j = senses.index(s)
        rows = [i for i, ctx in enumerate(contexts) if q in ctx]
        cons.append(cp.sum(P[rows, j]) == sum(labels[i] == s for i in rows))
    cp.Problem(cp.Maximize(cp.sum(cp.entr(P))), cons).solve(solver=cp.CLARABEL)
    return np.asarray(P.value)


def toy_problem(seed):
    rng = random.Random(seed)
    n_senses = rng.choice([2, 3])
    senses = [f"s{i}" for i in range(n_senses)]
    n_preds = 4 if n_senses == 2 else 2
    preds = [f"p{i}=v" for i in range(n_preds)]
    while True:
        n = rng.randint(12, 30)
        contexts = [{p for p in preds if rng.random() < 0.5} for _ in range(n)]
        labels = [rng.choice(senses) for _ in range(n)]
        n_feats = len({(p, s) for c, s in zip(contexts, labels) for p in c})
        if len(set(labels)) == n_senses and n_feats <= 8:
            return contexts, labels


class TestSelection:
    @pytest.mark.parametrize("code, rendered", [
        ("sbcprdk3", ["s", "b", "c", "p", "r", "d", "k3"]),
        ("0LWSBck5", ["0", "L", "W", "S", "B", "c", "k5"]),
        ("", []),
        ("K10pP", ["K10", "p", "P"]),
    ])
    def test_parse(self, code, rendered):
        sel = parse_selection(code)
        assert [str(t) for t in sel.templates] == rendered
        assert str(sel) == code

    @pytest.mark.parametrize("code, position", [("01Wsbcpdm", 1), ("sx", 1), ("k", 0),
                                                ("0mcbWsdrrvK3", 9)])
    def test_errors_report_position(self, code, position):
        with pytest.raises(SelectionError) as info:
            parse_selection(code)
        assert info.value.position == position

    def test_threshold_parsed(self):
        (t,) = parse_selection("k12").templates
        assert t.code == "k" and t.threshold == 12


class TestFeatures:
    def test_interest_non_collapsed(self, interest):
        clf = train(interest, "p", max_iters=5)
        feats = {f for f in clf.alphas if f[0].startswith("p-1=")}
        assert feats == {("p-1=adjective", "interest#1"), ("p-1=adjective", "interest#5"),
                         ("p-1=verb", "interest#1")}

    def test_interest_collapsed(self, interest):
        clf = train(interest, "P", max_iters=5)
        feats = {f for f in clf.alphas if f[0] == "P-1"}
        assert feats == {("P-1", "interest#1"), ("P-1", "interest#5")}
        assert clf.bags[("P-1", "interest#1")] == {"adjective", "verb"}
        assert clf.bags[("P-1", "interest#5")] == {"adjective"}

    def test_empty_selection(self, interest):
        assert extract_features(interest[0], parse_selection("")) == set()

    def test_boundaries(self, interest):
        preds = extract_features(interest[0], parse_selection("s"))
        assert f"s-3={BOUNDARY_LEFT}" in preds and f"s+3={BOUNDARY_RIGHT}" in preds
        assert "s-1=widespread" in preds and "s+1=in" in preds

    def test_collocations_and_word(self, interest):
        preds = extract_features(interest[1], parse_selection("0bc"))
        assert {"0=interest", "b-2-1=the good", "c-2-1=the best", "c-1+1=best of",
                "b+1+2=of both"} <= preds

    def test_content_words_and_syntax(self):
        ex = make_example("e", "bank", "b#1",
                          left=[("the", "the", "DT"), ("big", "big", "JJ")],
                          right=[("closed", "close", "VB")])
        tokens = list(ex.tokens)
        tokens[2] = AnnotatedToken("bank", "bank", "NN", dep_head=3, dep_rel="subj",
                                   multiword=True)
        ex = TrainingExample("e", "bank", "N", "b#1", tuple(tokens), 2)
        preds = extract_features(ex, parse_selection("LWrdmDM"))
        assert {"L=big", "L=close", "W=closed", "r=subj", "d=close", "D=close", "m=1",
                "M=1"} <= preds
        assert "L=the" not in preds

    def test_keywords_threshold(self):
        ex = [make_example(f"e{i}", "bank", "b#1" if i < 4 else "b#2",
                           left=[("river", "river", "NN")] if i in (0, 1, 4) else
                           [("fee", "fee", "NN")] if i == 2 else [("x", "x", "DT")])
              for i in range(8)]
        clf = train(ex, "k50", max_iters=5)
        # river: 2 of 4 b#1 examples (50%) qualifies, 1 of 4 b#2 does not;
        # fee: only once, below the absolute minimum of 2
        assert ("k50=river", "b#1") in clf.alphas
        assert ("k50=river", "b#2") not in clf.alphas
        assert not any(f[0] == "k50=fee" for f in clf.alphas)

    def test_collapsed_never_exceeds_plain(self):
        ex = cue_corpus(seed=3, noise=0.3)
        plain = train(ex, "sp", max_iters=1)
        coll = train(ex, "SP", max_iters=1)
        for key in ("s-1", "p-2", "s+1"):
            n_plain = sum(1 for f in plain.alphas if f[0].startswith(key + "="))
            n_coll = sum(1 for f in coll.alphas if f[0] == key.upper())
            assert n_coll <= n_plain


class TestTraining:
    def test_single_sense(self):
        ex = [make_example(f"e{i}", "bank", "b#1") for i in range(3)]
        clf = train(ex, "s")
        assert clf.degenerate
        pred = classify(clf, ex[0])
        assert pred.sense == "b#1" and pred.probabilities == {"b#1": 1.0}

    def test_uniform_data_gives_priors(self):
        ex = [make_example(f"e{i}", "bank", "b#1" if i < 6 else "b#2",
                           left=[("the", "the", "DT")]) for i in range(9)]
        clf = train(ex, "s", max_iters=500, tol=1e-9)
        pred = classify(clf, ex[0])
        assert pred.probabilities["b#1"] == pytest.approx(6 / 9, abs=1e-6)

    def test_separable_toy(self):
        contexts = [{"f=a"}, {"f=a"}, {"f=b"}, {"f=b"}]
        labels = ["x", "x", "y", "y"]
        clf = fit(contexts, labels, max_iters=2000, tol=1e-6)
        for ctx, gold in zip(contexts, labels):
            probs, _ = clf.distribution(ctx)
            assert probs[clf.senses.index(gold)] > 0.99

    def test_mixed_words_rejected(self):
        a = make_example("a", "bank", "b#1")
        b = make_example("b", "plant", "p#1")
        with pytest.raises(TrainingError):
            train([a, b], "s")

    def test_no_examples(self):
        with pytest.raises(TrainingError):
            train([], "s")

    def test_no_features_gives_mfs_only(self):
        ex = [make_example(f"e{i}", "bank", "b#1" if i < 2 else "b#2") for i in range(3)]
        clf = train(ex, "r")
        assert clf.meta.get("mfs_only") == "1"
        pred = classify(clf, ex[2])
        assert pred.sense == "b#1" and pred.fallback

    def test_converged_gap_below_tol(self):
        contexts, labels = toy_problem(5)
        clf = fit(contexts, labels, max_iters=20000, tol=1e-7)
        assert clf.converged and float(clf.meta["gap"]) < 1e-7


class TestClassification:
    def test_unseen_predicates_fall_back(self):
        ex = cue_corpus(seed=1)
        clf = train(ex, "s", max_iters=50)
        odd = make_example("odd", "bank", "?", left=[("zz", "zz", "NN")] * 3,
                           right=[("qq", "qq", "NN")] * 3)
        pred = classify(clf, odd)
        assert pred.fallback and pred.sense == clf.mfs
        assert list(pred.probabilities.values()) == pytest.approx(list(clf.priors))

    def test_word_mismatch(self):
        clf = train(cue_corpus(), "s", max_iters=5)
        with pytest.raises(ValueError):
            classify(clf, make_example("x", "plant", "p#1"))

    def test_learns_cue(self):
        ex = cue_corpus(seed=2)
        clf = train(ex, "s", max_iters=100)
        assert all(classify(clf, e).sense == e.sense for e in ex)

    def test_argmax_invariant_to_example_order(self):
        ex = cue_corpus(seed=4, noise=0.2)
        clf_a = train(ex, "sp", max_iters=60)
        shuffled = ex[:]
        random.Random(0).shuffle(shuffled)
        clf_b = train(shuffled, "sp", max_iters=60)
        assert [classify(clf_a, e).sense for e in ex] == [classify(clf_b, e).sense for e in ex]


class TestSerialization:
    def test_round_trip(self):
        ex = cue_corpus(seed=5, noise=0.2)
        clf = train(ex, "sPk10", max_iters=30)
        text = dumps(clf)
        again = loads(text)
        assert dumps(again) == text
        for e in ex:
            assert classify(again, e).probabilities == classify(clf, e).probabilities

    def test_header(self):
        text = dumps(train(cue_corpus(), "s", max_iters=3))
        lines = text.splitlines()
        assert lines[0] == "MEMODEL 1"
        assert lines[1:5] == ["WORD\tbank", "POS\tN", "SELECTION\ts", "SENSES\tbank#1\tbank#2"]
        assert any(l.startswith("FEAT\ts-1=river\tbank#1\t") for l in lines)

    @pytest.mark.parametrize("text", ["", "MEMODEL 2\n", "MEMODEL 1\nWORD\tx\n",
                                      "MEMODEL 1\nFEAT\tp\ts\t-1\n"])
    def test_bad_files(self, text):
        with pytest.raises(ValueError):
            loads(text)


class TestCorpusFormat:
    def test_round_trip(self, interest):
        buf = io.StringIO()
        write_corpus(interest, buf)
        assert read_corpus(io.StringIO(buf.getvalue())) == interest

    @pytest.mark.parametrize("text", [
        "TOKEN\t0\ta\ta\tNN\t-\t-\t0\n",
        "EXAMPLE\te\tx\tN\ts\t0\nTOKEN\t0\tx\tx\tNN\t-\t-\t0\n",
        "EXAMPLE\te\tx\tN\ts\t0\nTOKEN\t1\tx\tx\tNN\t-\t-\t0\nEND\n",
        "EXAMPLE\te\tx\tN\ts\t0\nTOKEN\t0\ty\ty\tNN\t-\t-\t0\nEND\n",
        "EXAMPLE\te\tx\tN\ts\t0\nTOKEN\t0\tx\tx\tNN\t0\t-\t0\nEND\n",
        "EXAMPLE\te\tx\tN\ts\t0\nTOKEN\t0\tx\tx\tNN\t-\t-\t2\nEND\n",
    ])
    def test_errors(self, text):
        with pytest.raises(CorpusError):
            read_corpus(io.StringIO(text))

    def test_prefixed_multiword_flag(self):
        text = "EXAMPLE\te\tx\tN\ts\t0\nTOKEN\t0\tx\tx\tNN\t-\t-\tmw:1\nEND\n"
        assert read_corpus(io.StringIO(text))[0].target.multiword


class TestOracle:
    @pytest.mark.parametrize("seed", range(6))
    def test_matches_convex_oracle(self, seed):
        contexts, labels = toy_problem(seed)
        clf = fit(contexts, labels, max_iters=20000, tol=1e-9)
        expected = me_oracle(contexts, labels, list(clf.senses))
        got = np.array([clf.distribution(c)[0] for c in contexts])
        assert np.abs(got - expected).max() < 1e-3

    @pytest.mark.parametrize("seed", range(6))
    def test_log_likelihood_non_decreasing(self, seed):
        contexts, labels = toy_problem(seed)
        clf = fit(contexts, labels, max_iters=300, tol=1e-12)
        assert np.all(np.diff(clf.log_likelihood) >= -1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_probabilities_sum_to_one(seed):
    rng = random.Random(seed)
    contexts, labels = toy_problem(seed % 7)
    clf = fit(contexts, labels, max_iters=50)
    for _ in range(20):
        ctx = {f"p{i}=v" for i in range(6) if rng.random() < 0.5}
        probs, _ = clf.distribution(ctx)
        assert abs(probs.sum() - 1) < 1e-9


class TestCrossValidation:
    def test_three_per_sense(self):
        ex = cue_corpus(n_per_sense=3)
        parts, dropped = stratified_folds(ex, 3)
        assert not dropped
        for part in parts:
            assert sorted(e.sense for e in part) == ["bank#1", "bank#2"]

    def test_small_sense_excluded(self):
        ex = cue_corpus(n_per_sense=5)[:7]  # bank#1 x5, bank#2 x2
        parts, dropped = stratified_folds(ex, 3)
        assert dropped == ["bank#2"]
        assert all(e.sense == "bank#1" for p in parts for e in p)

    @pytest.mark.parametrize("n", [3, 4, 7, 10])
    def test_balanced(self, n):
        ex = cue_corpus(n_per_sense=n)
        parts, _ = stratified_folds(ex, 3, seed=9)
        for sense in ("bank#1", "bank#2"):
            sizes = [sum(e.sense == sense for e in p) for p in parts]
            assert set(sizes) <= {n // 3, -(-n // 3)}

    def test_nothing_survives(self):
        with pytest.raises(CrossValidationError):
            cross_validate(cue_corpus(n_per_sense=2), "s")

    def test_folds_validated(self):
        with pytest.raises(CrossValidationError):
            stratified_folds(cue_corpus(), 1)

    def test_deterministic(self):
        ex = cue_corpus(n_per_sense=8, noise=0.3, seed=2)
        assert cross_validate(ex, "sp", seed=4) == cross_validate(ex, "sp", seed=4)

    def test_seed_changes_split(self):
        ex = cue_corpus(n_per_sense=9)
        a, _ = stratified_folds(ex, 3, seed=1)
        b, _ = stratified_folds(ex, 3, seed=2)
        assert [[e.id for e in p] for p in a] != [[e.id for e in p] for p in b]


class TestSelectBest:
    def test_single_candidate(self):
        ex = cue_corpus(n_per_sense=6)
        assert {str(v) for v in select_best(ex, ["s"]).values()} == {"s"}

    def test_dominating_candidate(self):
        # the word before the target decides the sense; 'r' carries nothing
        ex = cue_corpus(n_per_sense=9, seed=1) + cue_corpus("plant", n_per_sense=9, seed=2)
        best = select_best(ex, ["r", "s"], max_iters=50)
        assert {str(v) for v in best.values()} == {"s"}
        assert set(best) == {"bank,N", "plant,N"}

    def test_per_pos_groups(self):
        ex = cue_corpus(n_per_sense=6) + cue_corpus("run", n_per_sense=6, pos="V")
        best = select_best(ex, ["s", "p"], PER_POS, max_iters=30)
        assert set(best) == {"N", "V"}

    def test_ties_go_to_first(self):
        ex = cue_corpus(n_per_sense=6)
        assert str(select_best(ex, ["r", "m"])["bank,N"]) == "r"

    def test_empty_candidates(self):
        with pytest.raises(ValueError):
            select_best(cue_corpus(), [])


class TestVoteMe:
    def test_unanimous(self):
        assert vote_me([("MEbfs.pos", "a"), ("MEbfs", "a"), ("MEfix", "a")]) == "a"

    def test_majority(self):
        assert vote_me([("MEbfs.pos", "b"), ("MEbfs", "a"), ("MEfix", "a")]) == "a"

    def test_three_way_tie_every_order(self):
        answers = [("MEbfs.pos", "x"), ("MEbfs", "y"), ("MEfix", "z")]
        for perm in itertools.permutations(answers):
            assert vote_me(list(perm)) == "x"

    def test_priority_skips_abstainer(self):
        assert vote_me([("MEbfs.pos", None), ("MEbfs", "y"), ("MEfix", "z")]) == "y"

    def test_all_abstain_gives_mfs(self):
        assert vote_me([("MEbfs.pos", None)], mfs="m") == "m"

    def test_empty(self):
        with pytest.raises(ValueError):
            vote_me([])
