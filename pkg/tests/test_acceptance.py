"""Acceptance criteria 1-8, each at its stated tolerance and time budget.

Criterion 7 needs the Causal-TimeBank corpus (TimeML files with token
sidecars), which is not redistributed; point CATENA_CAUSAL_TIMEBANK at it
to run the check.
"""
import os
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from catena import allen
from catena.allen import BASE, FULL, STRICT, compose, converse, rel
from catena.evaluate import Question, qa_evaluate, stratified_folds, temporal_awareness
from catena.linear import Hyperparams, predict, save_model, train
from catena.pipeline import annotate, train_pipeline
from catena.reasoner import check_document, deduce, predict_deducible
from catena.synth import synthetic_corpus

from graphs import interval_doc
from oracles import composition_by_enumeration
from rule_examples import EXAMPLES
from test_linear import SEPARABLE
from test_reasoner import albright

README = Path(__file__).resolve().parent.parent / "README.md"


@contextmanager
def within(record, number, budget):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        record(number, "FAIL", f"({time.perf_counter() - t0:.2f}s)")
        raise
    took = time.perf_counter() - t0
    if took >= budget:
        record(number, "FAIL", f"({took:.2f}s, budget {budget}s)")
        pytest.fail(f"criterion {number} took {took:.2f}s, budget {budget}s")
    record(number, "PASS", f"({took:.2f}s)")


def test_1_allen_algebra(criterion):
    with within(criterion, 1, 5.0):
        oracle = composition_by_enumeration()
        for a in BASE:
            for b in BASE:
                assert compose(rel(a), rel(b)) == rel(*oracle[(a, b)]), (a, b)
        rng = np.random.default_rng(1)
        for r1, r2 in rng.integers(0, FULL + 1, size=(1000, 2)).tolist():
            assert converse(converse(r1)) == r1
            assert converse(compose(r1, r2)) == compose(converse(r2), converse(r1))


def test_2_reasoning_examples(criterion):
    with within(criterion, 2, 1.0):
        res = check_document(albright(), allen.DEFAULT_PROFILE_ORDER)
        assert not res.consistent and set(res.culprit) == {"ei116", "ei45", "ei46"}
        found = {(t.source, t.target): t.rel_type for t in deduce(albright("INCLUDES"))}
        assert found[("ei45", "ei47")] == "BEFORE"


def test_3_rule_fixtures(criterion):
    with within(criterion, 3, 1.0):
        assert len(EXAMPLES) == 14
        wrong = [(name, compute(), want) for name, compute, want in EXAMPLES if compute() != want]
        assert not wrong, wrong


def _random_doc(rng, k, doc_id):
    while True:
        starts = rng.integers(0, 8, size=k)
        pts = [(int(s), int(s + rng.integers(1, 4))) for s in starts]
        pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
        keep = [p for p in pairs if rng.random() < 0.6]
        d = interval_doc(pts, keep, doc_id=doc_id)
        if d.tlinks:
            return d


def test_4_metric_properties(criterion):
    with within(criterion, 4, 10.0):
        rng = np.random.default_rng(4)
        for n in range(50):
            d = _random_doc(rng, int(rng.integers(3, 7)), f"g{n}")
            assert temporal_awareness(d, d).f1 == 1.0
        for n in range(50):
            k = int(rng.integers(3, 7))
            d, ref = _random_doc(rng, k, "g"), _random_doc(rng, k, "g")
            closed = d.with_links(d.tlinks + tuple(deduce(d)), ())
            a, b = temporal_awareness(d, ref), temporal_awareness(closed, ref)
            assert (a.precision, a.recall) == (b.precision, b.recall)
        for n in (3, 5, 8):
            chain = interval_doc([(2 * i, 2 * i + 1) for i in range(n)], [(i, i + 1) for i in range(n - 1)],
                                 doc_id="chain")
            qs = [Question("chain", "ei1", "BEFORE", f"ei{n}", "YES"),
                  Question("chain", f"ei{n}", "BEFORE", "ei1", "NO")]
            r = qa_evaluate([chain], qs)
            assert (r.coverage, r.precision, r.recall) == (1.0, 1.0, 1.0)


def test_5_classifier_contract(criterion, tmp_path):
    with within(criterion, 5, 30.0):
        for name in ("a", "b"):
            save_model(train(SEPARABLE, Hyperparams(), seed=11), tmp_path / f"{name}.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        m = train(SEPARABLE)
        assert all(predict(m, x).label == lab for x, lab in SEPARABLE)
        for log in m.history.values():
            assert log and all(b <= a + 1e-12 for a, b in zip(log, log[1:]))


def test_6_pipeline_post_edit(criterion):
    with within(criterion, 6, 30.0):
        bundle = train_pipeline(synthetic_corpus(20, seed=101), seed=0)
        corpus = synthetic_corpus(20, seed=6)
        emitted = 0
        for a in corpus:
            out = annotate(a, bundle)
            tl = {(t.source, t.target): t.rel_type for t in out.tlinks}
            for c in out.clinks:
                emitted += 1
                # source is the cause: CLINK(e1,e2) wants BEFORE, CLINK-R(e1,e2) wants AFTER
                assert tl.get((c.source, c.target)) == "BEFORE" or tl.get((c.target, c.source)) == "AFTER"
            again = annotate(type(a)(out, a.layer), bundle)
            assert again == out
        assert emitted > 0


CTB = os.environ.get("CATENA_CAUSAL_TIMEBANK")


@pytest.mark.skipif(not CTB, reason="set CATENA_CAUSAL_TIMEBANK to a Causal-TimeBank directory")
def test_7_corpus_dependent(criterion):
    from catena.causal import NO_REL, clink_features
    from catena.features import fit_encoders
    from catena.pipeline import causal_instances, read_corpus

    try:
        corpus = read_corpus(CTB)

        # (a) deduction grows E-E TLINKs roughly fourfold
        before = after = 0
        for a in corpus:
            doc = a.doc
            ee = lambda t: doc.is_event(t.source) and doc.is_event(t.target)
            n = sum(ee(t) for t in doc.tlinks)
            before += n
            chk = check_document(doc)
            after += n + (sum(ee(t) for t in deduce(doc, chk.profile_used)) if chk.consistent else 0)
        assert abs(after - 10226) <= 0.10 * 10226, (before, after)

        # (b) stratified 10-fold CLINK extraction with TLINK features; (c) ablation
        items = causal_instances(corpus)
        labels = [lab for *_, lab in items]
        gold_pos = sum(lab != NO_REL for lab in labels)

        def run(use_tlink):
            tp = fp = 0
            for fold in stratified_folds(labels, 10, seed=0):
                held = set(fold)
                tr = [x for i, x in enumerate(items) if i not in held]
                enc = fit_encoders([(p, a, {"tlink": tl} if (tl and use_tlink) else None)
                                    for p, a, tl, _ in tr], causal=True)
                model = train([(clink_features(p, a, enc, tl if use_tlink else None), lab)
                               for p, a, tl, lab in tr])
                for i in fold:
                    p, a, tl, lab = items[i]
                    got = predict(model, clink_features(p, a, enc, tl if use_tlink else None)).label
                    if got != NO_REL:
                        tp += got == lab
                        fp += got != lab
            prec = tp / (tp + fp) if tp + fp else 0.0
            recall = tp / gold_pos if gold_pos else 0.0
            return prec, recall, (2 * prec * recall / (prec + recall) if prec + recall else 0.0)

        _, r_with, f_with = run(True)
        _, r_without, _ = run(False)
        assert abs(f_with - 0.4589) <= 0.06, f_with
        assert r_without < r_with, (r_without, r_with)
    except BaseException:
        criterion(7, "FAIL")
        raise
    criterion(7, "PASS")


def test_7_skip_is_reported(criterion):
    if not CTB:
        criterion(7, "SKIP", "(Causal-TimeBank not present)")


def test_8_regression_predictor(criterion):
    with within(criterion, 8, 1.0):
        assert predict_deducible(15, 10, 10) == 177.0
        assert predict_deducible(0, 0, 0) == -10.0
        text = README.read_text(encoding="utf-8")
        assert "177" in text and "43" in text
