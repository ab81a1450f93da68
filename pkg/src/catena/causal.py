"""Causal relations: verb rules, candidate filtering, classification,
propagation across coreferent documents and TLINK post-editing.

Labels are oriented on the pair: ``CLINK`` means e1 causes e2 and
``CLINK-R`` means e2 causes e1. As :class:`CLink` objects the source is
always the cause.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .annotation import AnnotatedDocument, EntityPair, candidate_pairs
from .features import FeatureEncoders, featurize
from .lexicons import Lexicons, load_lexicons
from .linear import FeatureVector, LinearModel, predict
from .timeml import CLink, TLink, fresh_id, taken_ids

NO_REL = "NO-REL"

DEP1 = frozenset({"SBJ", "PRD-IM", "NMOD", "APPO", "ADV", "PRP-IM"})

_CLINK_R = {"LGS-PMOD"}
_FIRES = {
    "AFFECT": {"OBJ"},
    "LINK": {"OBJ", "ADV-PMOD", "DIR-PMOD", "AMOD-PMOD"},
    "CAUSE": {"OBJ", "OPRD", "OPRD-IM", "ADV-PMOD"} | _CLINK_R,
    "AMBIGUOUS": {"OPRD", "OPRD-IM", "ADV-PMOD"},
}

BLOCKING_DEPS = frozenset({"SBJ", "OBJ", "COORD-CONJ", "VC", "LOC-PMOD", "OPRD", "OPRD-IM"})
MAX_DISTANCE = 5


def as_clink(pair: EntityPair, label: str, lid: str, **kw) -> CLink:
    if label == "CLINK":
        return CLink(lid, pair.e1, pair.e2, **kw)
    return CLink(lid, pair.e2, pair.e1, **kw)


def pair_label(clink: CLink, e1: str, e2: str) -> str | None:
    """Label of ``clink`` seen from the pair ``(e1, e2)``."""
    if (clink.source, clink.target) == (e1, e2):
        return "CLINK"
    if (clink.source, clink.target) == (e2, e1):
        return "CLINK-R"
    return None


# -- causal verb rules ---------------------------------------------------------


def _dep1(adoc: AnnotatedDocument, v: int, h1: int) -> str | None:
    path = adoc.descending_path(v, h1) or adoc.descending_path(h1, v)
    if path:
        return "-".join(path)
    # e1 is the subject of a copula whose predicate leads to v
    full = adoc.dep_path(h1, v)
    if full and full[0] == "SBJ" and full[1:] == ["PRD", "IM"]:
        return "PRD-IM"
    return None


def _verb_label(category: str, direction: str, dep2: str) -> str | None:
    if category == "AFFECT":
        return "CLINK" if dep2 in _FIRES["AFFECT"] else None
    if category == "LINK":
        return direction if dep2 in _FIRES["LINK"] else None
    if category.endswith("-AMBIGUOUS"):
        return "CLINK" if dep2 in _FIRES["AMBIGUOUS"] else None
    if dep2 in _FIRES["CAUSE"]:
        return "CLINK-R" if dep2 in _CLINK_R else "CLINK"
    return None


def causal_verb_rule(pair: EntityPair, adoc: AnnotatedDocument,
                     lex: Lexicons | None = None) -> str | None:
    """CLINK / CLINK-R when a lexicon verb between the events links them."""
    lex = lex or load_lexicons()
    h1, h2 = adoc.head(pair.e1), adoc.head(pair.e2)
    toks = adoc.tokens
    for v in range(min(h1, h2) + 1, max(h1, h2)):
        tok = toks[v]
        nearby = [t.form for t in toks if t.head == v] + ([toks[v + 1].form] if v + 1 < len(toks) else [])
        entry = lex.causal_verb(tok.lemma, nearby)
        if entry is None:
            continue
        dep1 = _dep1(adoc, v, h1)
        dep2 = adoc.descending_path(v, h2)
        if dep1 not in DEP1 or not dep2:
            continue
        label = _verb_label(entry.category, entry.direction, "-".join(dep2))
        if label:
            return label
    return None


# -- candidate filtering -------------------------------------------------------


def _connected(adoc: AnnotatedDocument, a: int, b: int) -> bool:
    return adoc.dominates(a, b) or adoc.dominates(b, a)


def clink_candidate_filter(pair: EntityPair, adoc: AnnotatedDocument,
                           lex: Lexicons | None = None) -> bool:
    """Keep a causal candidate only if it looks signalled and is not a plain argument pair."""
    lex = lex or load_lexicons()
    if adoc.entity_distance(pair.e1, pair.e2) >= MAX_DISTANCE:
        return False
    h1, h2 = adoc.head(pair.e1), adoc.head(pair.e2)
    direct = adoc.descending_path(h1, h2) or adoc.descending_path(h2, h1)
    if direct and "-".join(direct) in BLOCKING_DEPS:
        return False
    for s in _causal_signals(adoc, {adoc.sentence_of(pair.e1), adoc.sentence_of(pair.e2)}, lex):
        inside = range(s.start, s.end + 1)
        if any(_connected(adoc, t, h) for t in inside for h in (h1, h2)):
            return True
    return False


def _causal_signals(adoc: AnnotatedDocument, sentences: Iterable[int], lex: Lexicons):
    found = []
    for s in sorted(sentences):
        toks = [t for t in adoc.tokens if t.sentence == s]
        if toks:
            found += lex.causal_signals([t.form for t in toks], toks[0].index)
    return found


# -- classification ------------------------------------------------------------


def clink_features(pair: EntityPair, adoc: AnnotatedDocument, enc: FeatureEncoders,
                   tlink_label: str | None = None, lex: Lexicons | None = None) -> FeatureVector:
    return featurize(pair, adoc, enc, {"tlink": tlink_label} if tlink_label else None, lex)


def classify_clink(model: LinearModel, pair: EntityPair, adoc: AnnotatedDocument,
                   enc: FeatureEncoders, tlink_label: str | None = None,
                   lex: Lexicons | None = None):
    """Three-way decision with its margin; returns a :class:`Prediction`."""
    return predict(model, clink_features(pair, adoc, enc, tlink_label, lex))


def self_train(model: LinearModel, unlabeled: Sequence[AnnotatedDocument], enc: FeatureEncoders,
               conf_threshold: float | None = None, lex: Lexicons | None = None,
               tlink_labels: Mapping | None = None) -> list[tuple[FeatureVector, str]]:
    """One round of self-labelling: confident causal predictions become training data.

    ``tlink_labels`` maps ``(doc_id, e1, e2)`` to the E-E label fed to the
    classifier. NO-REL predictions are never returned.
    """
    lex = lex or load_lexicons()
    tlink_labels = tlink_labels or {}
    out = []
    for adoc in unlabeled:
        for pair in candidate_pairs(adoc, "causal"):
            if not clink_candidate_filter(pair, adoc, lex):
                continue
            x = clink_features(pair, adoc, enc, tlink_labels.get((adoc.doc_id, pair.e1, pair.e2)), lex)
            p = predict(model, x)
            if p.label == NO_REL:
                continue
            if conf_threshold is not None and p.confidence <= conf_threshold:
                continue
            out.append((x, p.label))
    return out


# -- propagation ---------------------------------------------------------------


def propagate_clinks(cluster: Sequence[AnnotatedDocument], coref: Iterable[Iterable[tuple[str, str]]],
                     conf_threshold: float = 1.75) -> dict[str, list[CLink]]:
    """Copy confident CLINKs onto coreferent event pairs of sibling documents.

    ``coref`` partitions ``(doc_id, eiid)`` mentions into cross-document
    classes. Links with no confidence (gold annotation) always qualify;
    propagated links never act as sources.
    Returns the new links per document id; existing links are never touched.
    """
    klass = {}
    for n, group in enumerate(coref):
        for mention in group:
            klass[tuple(mention)] = n
    members: dict[tuple[int, str], list[str]] = {}
    for mention, n in klass.items():
        members.setdefault((n, mention[0]), []).append(mention[1])
    for group_ids in members.values():
        group_ids.sort()

    linked = {a.doc_id: {frozenset((c.source, c.target)) for c in a.doc.clinks} for a in cluster}
    ids = {a.doc_id: fresh_id("l", taken_ids(a.doc)) for a in cluster}
    new: dict[str, list[CLink]] = {a.doc_id: [] for a in cluster}
    for adoc in cluster:
        for c in adoc.doc.clinks:
            if c.provenance == "propagated":
                continue
            if c.confidence is not None and c.confidence <= conf_threshold:
                continue
            kc, ke = klass.get((adoc.doc_id, c.source)), klass.get((adoc.doc_id, c.target))
            if kc is None or ke is None:
                continue
            for other in cluster:
                d = other.doc_id
                if d == adoc.doc_id:
                    continue
                for cause in members.get((kc, d), ()):
                    for effect in members.get((ke, d), ()):
                        key = frozenset((cause, effect))
                        if cause == effect or key in linked[d]:
                            continue
                        lid = next(ids[d])
                        linked[d].add(key)
                        new[d].append(CLink(lid, cause, effect, provenance="propagated"))
    return new


# -- post-editing --------------------------------------------------------------


def post_edit_tlinks(tlinks: Sequence[TLink], clinks: Sequence[CLink],
                     taken: Iterable[str] = ()) -> list[TLink]:
    """Make every causal pair temporally ordered: the cause precedes the effect.

    A TLINK on the pair is relabelled (keeping its orientation, recording the
    old label in ``replaced``) or, when absent, added as cause BEFORE effect.
    New link ids avoid ``taken`` as well as the ids of the given links.
    """
    out = list(tlinks)
    where = {}
    for n, t in enumerate(out):
        where.setdefault(frozenset((t.source, t.target)), []).append(n)
    ids = fresh_id("l", {t.lid for t in out} | {c.lid for c in clinks} | set(taken))
    for c in clinks:
        if c.source == c.target:
            continue
        hits = where.get(frozenset((c.source, c.target)))
        if not hits:
            where[frozenset((c.source, c.target))] = [len(out)]
            out.append(TLink(next(ids), c.source, c.target, "BEFORE", provenance="post-edit"))
            continue
        for n in hits:
            t = out[n]
            want = "BEFORE" if t.source == c.source else "AFTER"
            if t.rel_type != want:
                out[n] = TLink(t.lid, t.source, t.target, want, t.signal_id, "post-edit",
                               t.replaced or t.rel_type, t.extra)
    return out
