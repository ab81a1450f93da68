import pytest
from hypothesis import given, settings, strategies as st

from catena.allen import TLINK_LABELS
from catena.annotation import AnnotatedDocument, EntityPair
from catena.causal import (
    NO_REL, causal_verb_rule, classify_clink, clink_candidate_filter, clink_features,
    pair_label, post_edit_tlinks, propagate_clinks, self_train,
)
from catena.features import fit_encoders
from catena.linear import train
from catena.synth import DocBuilder
from catena.timeml import CLink, TLink

from rule_examples import EXAMPLES

CAUSAL = [e for e in EXAMPLES if e[0].split()[0] in ("causal", "post-edit")]


@pytest.mark.parametrize("name,compute,expected", CAUSAL, ids=[e[0] for e in CAUSAL])
def test_worked_examples(name, compute, expected):
    assert compute() == expected


def test_verb_outside_window_never_fires():
    a = DocBuilder("d").sentence("""
        caused cause VBD 0 ROOT M
        the the DT 3 NMOD
        blast blast NN 1 OBJ E:ei1:OCCURRENCE
        and and CC 3 COORD
        damage damage NN 4 CONJ E:ei2:OCCURRENCE
    """).build()
    assert causal_verb_rule(EntityPair("EE", "ei1", "ei2", True), a) is None


def test_link_verb_direction_from_particle():
    a = DocBuilder("d").sentence("""
        The the DT 2 NMOD
        losses loss NNS 3 SBJ E:ei1:OCCURRENCE
        resulted result VBD 0 ROOT M
        from from IN 3 ADV
        the the DT 6 NMOD
        strike strike NN 4 PMOD E:ei2:OCCURRENCE
    """).build()
    assert causal_verb_rule(EntityPair("EE", "ei1", "ei2", True), a) == "CLINK-R"


# -- candidate filter -------------------------------------------------------


def _because():
    return DocBuilder("d").sentence("""
        Flights flight NNS 2 SBJ
        were be VBD 0 ROOT M
        cancelled cancel VBN 2 VC E:ei1:OCCURRENCE:PAST
        yesterday yesterday NN 3 TMP T:t1:DATE:1999-12-31
        because because IN 3 PRP
        workers worker NNS 7 SBJ
        struck strike VBD 5 SUB E:ei2:OCCURRENCE:PAST
    """).build()


def test_signalled_pair_kept():
    a = _because()
    assert a.entity_distance("ei1", "ei2") == 2
    assert clink_candidate_filter(EntityPair("EE", "ei1", "ei2", True), a)


def test_object_pair_filtered():
    a = DocBuilder("d").sentence("""
        Because because IN 3 PRP
        of of IN 1 PMOD
        fear fear NN 4 SBJ E:ei1:OCCURRENCE
        halted halt VBD 0 ROOT M E:ei2:OCCURRENCE:PAST
        trading trading NN 4 OBJ E:ei3:OCCURRENCE
    """).build()
    assert not clink_candidate_filter(EntityPair("EE", "ei2", "ei3", True), a)


def test_distant_pair_filtered():
    b = DocBuilder("d").sentence("""
        Talks talk NNS 6 SBJ E:ei1:OCCURRENCE
        ,  , , 1 P
        visits visit NNS 1 APPO E:ei2:OCCURRENCE
        , , , 1 P
        raids raid NNS 1 APPO E:ei3:OCCURRENCE
        ended end VBD 0 ROOT M E:ei4:OCCURRENCE:PAST
        in in IN 6 LOC
        fights fight NNS 7 PMOD E:ei5:OCCURRENCE
        because because IN 6 PRP
        storms storm NNS 11 SBJ E:ei6:OCCURRENCE
        hit hit VBD 9 SUB E:ei7:OCCURRENCE:PAST
    """).build()
    pair = EntityPair("EE", "ei1", "ei7", True)
    assert b.entity_distance("ei1", "ei7") == 6
    assert not clink_candidate_filter(pair, b)
    assert clink_candidate_filter(EntityPair("EE", "ei4", "ei7", True), b)


def test_unsignalled_pair_filtered():
    a = DocBuilder("d").sentence("""
        Prices price NNS 2 SBJ E:ei1:OCCURRENCE
        fell fall VBD 0 ROOT M E:ei2:OCCURRENCE:PAST
        after after IN 2 TMP
        talks talk NNS 3 PMOD E:ei3:OCCURRENCE
    """).build()
    assert not clink_candidate_filter(EntityPair("EE", "ei2", "ei3", True), a)


# -- post-editing -----------------------------------------------------------


def test_post_edit_keeps_consistent_link():
    t = TLink("l1", "ei1", "ei2", "BEFORE", provenance="classifier")
    assert post_edit_tlinks([t], [CLink("l2", "ei1", "ei2")]) == [t]


def test_post_edit_records_overwritten_label():
    t = TLink("l1", "ei2", "ei1", "BEFORE", provenance="classifier")
    (out,) = post_edit_tlinks([t], [CLink("l2", "ei1", "ei2")])
    assert (out.source, out.rel_type, out.target) == ("ei2", "AFTER", "ei1")
    assert out.provenance == "post-edit" and out.replaced == "BEFORE"


def test_post_edit_adds_missing_link_with_fresh_id():
    out = post_edit_tlinks([TLink("l1", "ei3", "ei4", "AFTER")], [CLink("l2", "ei1", "ei2")],
                           taken={"l3"})
    assert out[0].rel_type == "AFTER"
    assert (out[1].lid, out[1].source, out[1].rel_type, out[1].target) == ("l4", "ei1", "BEFORE", "ei2")


EVENTS = [f"ei{i}" for i in range(5)]


@st.composite
def link_sets(draw):
    pairs = st.tuples(st.sampled_from(EVENTS), st.sampled_from(EVENTS)).filter(lambda p: p[0] != p[1])
    tl = draw(st.lists(st.tuples(pairs, st.sampled_from(sorted(TLINK_LABELS))), max_size=8))
    cl = draw(st.lists(pairs, max_size=4, unique_by=lambda p: frozenset(p)))
    tlinks = [TLink(f"l{i}", a, b, lab) for i, ((a, b), lab) in enumerate(tl)]
    clinks = [CLink(f"c{i}", a, b) for i, (a, b) in enumerate(cl)]
    return tlinks, clinks


@settings(max_examples=150)
@given(link_sets())
def test_post_edit_orders_every_causal_pair(links):
    tlinks, clinks = links
    out = post_edit_tlinks(tlinks, clinks)
    causal = {frozenset((c.source, c.target)) for c in clinks}
    for c in clinks:
        on_pair = [t for t in out if {t.source, t.target} == {c.source, c.target}]
        assert on_pair
        for t in on_pair:
            assert t.rel_type == ("BEFORE" if t.source == c.source else "AFTER")
    # links on other pairs are untouched
    untouched = [t for t in tlinks if frozenset((t.source, t.target)) not in causal]
    assert [t for t in out if frozenset((t.source, t.target)) not in causal] == untouched


# -- propagation ------------------------------------------------------------


def _kerry():
    one = DocBuilder("i").sentence("""
        violence violence NN 2 SBJ E:ei1:OCCURRENCE
        could can MD 0 ROOT M
        undermine undermine VB 2 VC
        the the DT 5 NMOD
        fight fight NN 3 OBJ E:ei2:OCCURRENCE
    """).clink("ei1", "ei2", provenance="classifier", confidence=2.3).build()
    two = DocBuilder("ii").sentence("""
        violence violence NN 2 SBJ E:ei3:OCCURRENCE
        could can MD 0 ROOT M
        hamper hamper VB 2 VC
        efforts effort NNS 3 OBJ
        to to TO 4 NMOD
        tackle tackle VB 5 IM E:ei4:OCCURRENCE
        militants militant NNS 6 OBJ
    """).build()
    three = DocBuilder("iii").sentence("""
        violence violence NN 2 SBJ E:ei5:OCCURRENCE
        could can MD 0 ROOT M
        undermine undermine VB 2 VC
        the the DT 5 NMOD
        fight fight NN 3 OBJ E:ei6:OCCURRENCE
    """).build()
    coref = [{("i", "ei1"), ("ii", "ei3"), ("iii", "ei5")},
             {("i", "ei2"), ("ii", "ei4"), ("iii", "ei6")}]
    return [one, two, three], coref


def test_kerry_cluster_propagation():
    docs, coref = _kerry()
    new = propagate_clinks(docs, coref, 1.75)
    assert new["i"] == []
    (c,) = new["ii"]
    assert (c.source, c.target, c.provenance, c.confidence) == ("ei3", "ei4", "propagated", None)
    (c3,) = new["iii"]
    assert (c3.source, c3.target) == ("ei5", "ei6")


def test_low_confidence_not_propagated():
    docs, coref = _kerry()
    weak = docs[0].doc.with_links(clinks=[CLink("l9", "ei1", "ei2", provenance="classifier",
                                                confidence=1.2)])
    docs[0] = AnnotatedDocument(weak, docs[0].layer)
    assert all(v == [] for v in propagate_clinks(docs, coref, 1.75).values())


def test_existing_label_not_overwritten():
    docs, coref = _kerry()
    labelled = docs[1].doc.with_links(clinks=[CLink("l1", "ei4", "ei3")])
    docs[1] = AnnotatedDocument(labelled, docs[1].layer)
    new = propagate_clinks(docs, coref, 1.75)
    assert new["ii"] == []


def test_propagation_is_idempotent():
    docs, coref = _kerry()
    new = propagate_clinks(docs, coref, 1.75)
    merged = [AnnotatedDocument(a.doc.with_links(clinks=a.doc.clinks + tuple(new[a.doc_id])), a.layer)
              for a in docs]
    again = propagate_clinks(merged, coref, 1.75)
    assert all(v == [] for v in again.values())


# -- classification and self-training ---------------------------------------


def _toy_corpus():
    """Direction follows the signal: "because of" between the events means CLINK-R."""
    def doc(i, block):
        return DocBuilder(f"toy{i}").sentence(block).build()

    r = """
        trading trading NN 2 SBJ E:ei1:OCCURRENCE
        stopped stop VBD 0 ROOT M E:ei2:OCCURRENCE:PAST
        because because IN 2 PRP
        of of IN 3 PMOD
        the the DT 6 NMOD
        storm storm NN 4 PMOD E:ei3:OCCURRENCE
    """
    f = """
        rain rain NN 2 SBJ E:ei1:OCCURRENCE
        fell fall VBD 0 ROOT M E:ei2:OCCURRENCE:PAST
        , , , 2 P
        thus thus RB 5 ADV
        flooding flooding NN 2 OBJ E:ei3:OCCURRENCE
    """
    n = """
        talks talk NNS 2 SBJ E:ei1:OCCURRENCE
        resumed resume VBD 0 ROOT M E:ei2:OCCURRENCE:PAST
        after after IN 2 TMP
        the the DT 5 NMOD
        holiday holiday NN 3 PMOD E:ei3:OCCURRENCE
    """
    items = []
    for i, (block, label) in enumerate([(r, "CLINK-R"), (f, "CLINK"), (n, NO_REL)] * 2):
        items.append((EntityPair("EE", "ei2", "ei3", True), doc(i, block), label))
    return items


def _toy_model():
    items = _toy_corpus()
    enc = fit_encoders([(p, a) for p, a, _ in items], causal=True)
    data = [(clink_features(p, a, enc), lab) for p, a, lab in items]
    return items, enc, train(data, seed=3)


def test_classifier_recovers_direction():
    items, enc, model = _toy_model()
    for p, a, lab in items:
        assert classify_clink(model, p, a, enc).label == lab
    first = classify_clink(model, items[0][0], items[0][1], enc)
    assert classify_clink(model, items[0][0], items[0][1], enc) == first


def test_self_train_returns_positives_only():
    items, enc, model = _toy_model()
    docs = [a for _, a, _ in items]
    extra = self_train(model, docs, enc)
    assert extra and all(lab != NO_REL for _, lab in extra)
    assert self_train(model, [], enc) == []


def test_self_train_changes_retrained_weights():
    items, enc, model = _toy_model()
    base = [(clink_features(p, a, enc), lab) for p, a, lab in items]
    extra = self_train(model, [a for _, a, _ in items[:1]], enc)
    retrained = train(base + extra, seed=3)
    assert not (retrained.weights == model.weights).all()


def test_pair_label_orientation():
    c = CLink("l1", "ei2", "ei1")
    assert pair_label(c, "ei1", "ei2") == "CLINK-R"
    assert pair_label(c, "ei2", "ei1") == "CLINK"
    assert pair_label(c, "ei1", "ei3") is None
