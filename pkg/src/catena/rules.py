"""Deterministic rule sieve for E-D, E-T, E-E and T-T pairs.

Each rule function returns a TLINK label oriented ``pair.e1 -> pair.e2`` or
``None`` to abstain. Rules inside a function are tried in order and the
first match wins.
"""
from __future__ import annotations

from typing import Iterable

from .allen import INVERSE_LABEL
from .annotation import AnnotatedDocument, EntityPair
from .lexicons import Lexicons, load_lexicons
from .timeml import EventInstance, Timex
from .timex import tt_rule

# arcs through which a timex or prepositional phrase modifies an event
MODIFIER_ARCS = ("TMP", "ADV")

SENSE_LABEL = {
    "TimePoint": "IS_INCLUDED",
    "TimePreceding": "BEFORE",
    "TimeFollowing": "AFTER",
    "Duration": "DURING",
    "StartTime": "BEGUN_BY",
    "EndTime": "ENDED_BY",
}

ASPECTUAL_LABEL = {"initiation": "BEGINS", "termination": "ENDS", "continuation": "INCLUDES"}


def ed_rule(e: EventInstance, dct: Timex | None = None) -> str | None:
    """Event vs. document creation time, from tense and aspect alone."""
    if e.tense == "PAST" and e.aspect == "PERFECTIVE":
        return "BEFORE"
    if e.tense == "PRESENT" and e.aspect in ("PROGRESSIVE", "PERFECTIVE_PROGRESSIVE"):
        return "INCLUDES"
    if e.tense == "FUTURE":
        return "AFTER"
    return None


# -- event-timex ---------------------------------------------------------------


_PATTERN_JOINERS = {"between": ("and",), "from": ("to", "until", "till"), None: ("-", "--")}


def duration_patterns(adoc: AnnotatedDocument, sentence: int) -> dict[str, tuple[str, list[int]]]:
    """Timexes in "between T1 and T2", "from T1 to/until T2" or "T1-T2" patterns.

    Maps each timex id to ``("begin" | "end", anchor tokens)``; the anchors
    are the tokens an event must dominate for the pattern to modify it.
    """
    toks = adoc.tokens
    tids = adoc.timexes_in_sentence(sentence)
    out = {}
    for t1, t2 in zip(tids, tids[1:]):
        (a1, b1), (a2, _) = adoc.token_span(t1), adoc.token_span(t2)
        between = [t.form.lower() for t in toks[b1 + 1:a2]]
        intro = toks[a1 - 1].form.lower() if a1 > 0 and toks[a1 - 1].sentence == sentence else None
        key = intro if intro in ("between", "from") else None
        if len(between) == 1 and between[0] in _PATTERN_JOINERS[key]:
            anchors = [adoc.head(t1), adoc.head(t2)] + ([a1 - 1] if key else [])
            out.setdefault(t1, ("begin", anchors))
            out.setdefault(t2, ("end", anchors))
    return out


def et_rule(pair: EntityPair, adoc: AnnotatedDocument, lex: Lexicons | None = None) -> str | None:
    """Event vs. timex in the same sentence, driven by the modifier structure."""
    if pair.kind != "ET" or not pair.same_sentence:
        return None
    lex = lex or load_lexicons()
    e, t = pair.e1, pair.e2
    he, ht = adoc.head(e), adoc.head(t)

    pattern = duration_patterns(adoc, adoc.sentence_of(t)).get(t)
    if pattern and any(adoc.dominates(he, a) for a in pattern[1]):
        return "BEGUN_BY" if pattern[0] == "begin" else "ENDED_BY"

    path = adoc.descending_path(he, ht)
    if not path or path[0] not in MODIFIER_ARCS:
        return None
    if len(path) == 1:
        if adoc.doc.timex(t).type in ("DATE", "TIME"):
            return "IS_INCLUDED"
        return None
    if path[-1] != "PMOD" or len(path) > 3:
        return None
    prep_head = _child_on_path(adoc, he, ht)
    t_first = adoc.token_span(t)[0]
    if prep_head >= t_first:
        return None
    forms = [tok.form for tok in adoc.tokens[prep_head:t_first]]
    sense = lex.preposition_sense(forms)
    return SENSE_LABEL.get(sense)


def _child_on_path(adoc: AnnotatedDocument, top: int, bottom: int) -> int:
    node = bottom
    for a in adoc.ancestors(bottom):
        if a == top:
            return node
        node = a
    return node


# -- event-event ---------------------------------------------------------------


def _governed_label(adoc: AnnotatedDocument, gov: str, dep: str, path: list[str],
                    lex: Lexicons) -> str | None:
    key = "-".join(path)
    if key == "LGS-PMOD":
        return "AFTER"
    if key == "LOC-PMOD":
        return "IS_INCLUDED"
    g = adoc.doc.event(gov)
    if key in ("OPRD", "OPRD-IM"):
        cls = lex.aspectual.get(adoc.head_token(gov).lemma.lower())
        if cls:
            return ASPECTUAL_LABEL[cls]
        if g.aspect == "PERFECTIVE_PROGRESSIVE":
            return "SIMULTANEOUS"
        return "BEFORE"
    if len(path) > 3:
        return None
    d = adoc.doc.event(dep)
    for rule in lex.ee_rules:
        if rule.rule_set == "reporting" and g.event_class != "REPORTING":
            continue
        if rule.matches(g.tense, g.aspect, d.tense, d.aspect):
            return rule.label
    return None


def ee_rule(pair: EntityPair, adoc: AnnotatedDocument, lex: Lexicons | None = None) -> str | None:
    """Event vs. event: dependency patterns, tense tables, then coreference."""
    if pair.kind != "EE":
        return None
    lex = lex or load_lexicons()
    e1, e2 = pair.e1, pair.e2
    if pair.same_sentence:
        h1, h2 = adoc.head(e1), adoc.head(e2)
        path = adoc.descending_path(h1, h2)
        if path:
            label = _governed_label(adoc, e1, e2, path, lex)
            if label:
                return label
        else:
            path = adoc.descending_path(h2, h1)
            if path:
                label = _governed_label(adoc, e2, e1, path, lex)
                if label:
                    return INVERSE_LABEL[label]
    if adoc.coreferent(e1, e2):
        return "SIMULTANEOUS"
    return None


# -- the sieve -----------------------------------------------------------------


def rule_label(pair: EntityPair, adoc: AnnotatedDocument, lex: Lexicons | None = None) -> str | None:
    doc = adoc.doc
    if pair.kind == "TT":
        return tt_rule(doc.timex(pair.e1), doc.timex(pair.e2))
    if pair.kind == "ED":
        return ed_rule(doc.event(pair.e1), doc.dct)
    if pair.kind == "ET":
        return et_rule(pair, adoc, lex)
    return ee_rule(pair, adoc, lex)


def apply_rule_sieve(adoc: AnnotatedDocument, pairs: Iterable[EntityPair],
                     lex: Lexicons | None = None) -> dict[EntityPair, str]:
    """Labels for the pairs some rule fires on; other pairs are left out."""
    lex = lex or load_lexicons()
    out = {}
    for p in pairs:
        label = rule_label(p, adoc, lex)
        if label is not None:
            out[p] = label
    return out
