"""Build small annotated documents from a compact line format.

Each sentence is a multi-line string with one token per line::

    form  lemma  POS  head  deprel  [tags...]

``head`` is 1-based within the sentence (0 = root). Tags:

``M``                       main verb of the sentence
``E:ei1[:CLASS[:TENSE[:ASPECT[:POLARITY]]]]``   event instance on this token
``T:t1:TYPE:VALUE``         timex starting on this token
``T+``                      continues the previous token's timex
``S:s1`` / ``C:cs1``        temporal / causal signal on this token

The builder lays tokens out with single spaces, then derives both the
TimeML :class:`~catena.timeml.Document` and the sidecar
:class:`~catena.annotation.AnnotationLayer` from the same offsets.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .annotation import AnnotatedDocument, AnnotationLayer, Token
from .timeml import CausalSignal, CLink, Document, EventInstance, Signal, Timex, TLink


def _pos_attr(tag: str) -> str:
    if tag.startswith("VB"):
        return "VERB"
    if tag.startswith("NN"):
        return "NOUN"
    if tag.startswith("JJ"):
        return "ADJECTIVE"
    if tag.startswith("IN"):
        return "PREPOSITION"
    return "OTHER"


def _chunk(tag: str) -> str:
    if tag.startswith("VB") or tag == "MD" or tag == "TO":
        return "B-VP"
    if tag.startswith(("NN", "DT", "JJ", "PRP", "CD")):
        return "B-NP"
    if tag == "IN":
        return "B-PP"
    return "O"


@dataclass
class DocBuilder:
    doc_id: str
    dct: str = "2000-01-01"
    sentences: list = field(default_factory=list)
    tlinks: list = field(default_factory=list)
    clinks: list = field(default_factory=list)
    coref: list = field(default_factory=list)
    similarity: dict | None = None

    def sentence(self, block: str) -> "DocBuilder":
        rows = [line.split() for line in block.strip().splitlines() if line.strip()]
        self.sentences.append(rows)
        return self

    def tlink(self, source: str, rel: str, target: str, **kw) -> "DocBuilder":
        self.tlinks.append((source, rel, target, kw))
        return self

    def clink(self, source: str, target: str, **kw) -> "DocBuilder":
        self.clinks.append((source, target, kw))
        return self

    def build(self) -> AnnotatedDocument:
        text_parts: list[str] = []
        pos = 0
        tokens: list[Token] = []
        events, timexes, signals, csignals = [], [], [], []
        open_timex = None
        for s_idx, rows in enumerate(self.sentences):
            base = len(tokens)
            for local, row in enumerate(rows):
                form, lemma, tag, head, deprel, *tags = row
                if text_parts:
                    text_parts.append(" ")
                    pos += 1
                start, end = pos, pos + len(form)
                text_parts.append(form)
                pos = end
                head_i = int(head)
                tokens.append(Token(
                    index=base + local, form=form, lemma=lemma, pos=tag, chunk=_chunk(tag),
                    head=-1 if head_i == 0 else base + head_i - 1, deprel=deprel,
                    main_verb="M" in tags, start=start, end=end, sentence=s_idx,
                ))
                continued = False
                for t in tags:
                    parts = t.split(":")
                    if parts[0] == "E":
                        eiid = parts[1]
                        cls, tense, aspect, pol = (parts[2:] + [None] * 4)[:4]
                        events.append(EventInstance(
                            eiid=eiid, eid="e" + eiid.lstrip("ei"), span=(start, end),
                            event_class=cls or "OCCURRENCE", tense=tense or "NONE",
                            aspect=aspect or "NONE", pos=_pos_attr(tag), polarity=pol or "POS",
                        ))
                    elif parts[0] == "T":
                        open_timex = [parts[1], parts[2], ":".join(parts[3:]), start, end]
                        timexes.append(open_timex)
                    elif parts[0] == "T+":
                        open_timex[4] = end
                        continued = True
                    elif parts[0] == "S":
                        signals.append(Signal(parts[1], (start, end)))
                    elif parts[0] == "C":
                        csignals.append(CausalSignal(parts[1], (start, end), (("_tag", "C-SIGNAL"),)))
                if not continued and not any(t.startswith("T:") for t in tags):
                    open_timex = None
        text = "".join(text_parts)
        dct = Timex("t0", None, "DATE", self.dct, "CREATION_TIME")
        tx = tuple(Timex(tid, (s, e), typ, val) for tid, typ, val, s, e in timexes)
        tl = tuple(
            TLink(kw.get("lid", f"l{n}"), a, b, r, provenance=kw.get("provenance", "annotated"))
            for n, (a, r, b, kw) in enumerate(self.tlinks, 1)
        )
        cl = tuple(
            CLink(kw.get("lid", f"c{n}"), a, b, provenance=kw.get("provenance", "annotated"),
                  confidence=kw.get("confidence"))
            for n, (a, b, kw) in enumerate(self.clinks, 1)
        )
        doc = Document(
            doc_id=self.doc_id, dct=dct, text=text, events=tuple(events), timexes=tx,
            signals=tuple(signals), csignals=tuple(csignals), tlinks=tl, clinks=cl,
            dct_text=self.dct,
        )
        layer = AnnotationLayer(tokens, [frozenset(g) for g in self.coref],
                                self.similarity, self.doc_id)
        return AnnotatedDocument(doc, layer)


# -- seeded synthetic corpus ---------------------------------------------------

_SUBJECTS = ("officials", "workers", "traders", "rebels", "farmers", "pilots")
_PAST = (("fell", "fall"), ("rose", "rise"), ("struck", "strike"), ("left", "leave"),
         ("resigned", "resign"), ("protested", "protest"), ("closed", "close"))
_BASE = (("meet", "meet"), ("vote", "vote"), ("return", "return"), ("sign", "sign"))
_NOUNS = ("storm", "strike", "crash", "flood", "blast", "war")
_PREP_LABEL = (("on", "IS_INCLUDED"), ("before", "BEFORE"), ("after", "AFTER"))


class _Doc:
    def __init__(self, doc_id: str, dct: str):
        self.b = DocBuilder(doc_id, dct=dct)
        self.ei = 0
        self.t = 0

    def event(self) -> str:
        self.ei += 1
        return f"ei{self.ei}"

    def timex(self) -> str:
        self.t += 1
        return f"t{self.t}"

    def add(self, rows) -> None:
        self.b.sentence("\n".join(" ".join(str(c) for c in r) for r in rows))


def _day(rng, past: bool) -> str:
    return f"1999-12-{rng.integers(10, 29):02d}" if past else f"2000-01-{rng.integers(10, 29):02d}"


def _because(d: _Doc, rng) -> None:
    # SUBJ V [prep DAY] because SUBJ2 V2 ; V2 causes V
    a, b = d.event(), d.event()
    (f1, l1), (f2, l2) = (_PAST[i] for i in rng.choice(len(_PAST), 2, replace=False))
    rows = [(rng.choice(_SUBJECTS).capitalize(), "x", "NNS", 2, "SBJ"),
            (f1, l1, "VBD", 0, "ROOT", "M", f"E:{a}:OCCURRENCE:PAST")]
    if rng.random() < 0.5:
        t = d.timex()
        prep, label = _PREP_LABEL[rng.integers(len(_PREP_LABEL))]
        rows += [(prep, prep, "IN", 2, "TMP"), ("Friday", "friday", "NNP", 3, "PMOD", f"T:{t}:DATE:{_day(rng, True)}")]
        d.b.tlink(a, label, t)
    k = len(rows) + 1
    rows += [("because", "because", "IN", 2, "PRP"), (rng.choice(_SUBJECTS), "x", "NNS", k + 2, "SBJ"),
             (f2, l2, "VBD", k, "SUB", f"E:{b}:OCCURRENCE:PAST")]
    d.add(rows)
    d.b.tlink(a, "BEFORE", "t0").tlink(b, "BEFORE", "t0").tlink(b, "BEFORE", a).clink(b, a)


def _because_of(d: _Doc, rng) -> None:
    # Because of the NOUN , SUBJ V ; the noun event is the cause
    a, b = d.event(), d.event()
    f, l = _PAST[rng.integers(len(_PAST))]
    noun = rng.choice(_NOUNS)
    d.add([("Because", "because", "IN", 7, "PRP"), ("of", "of", "IN", 1, "PMOD"),
           ("the", "the", "DT", 4, "NMOD"), (noun, noun, "NN", 2, "PMOD", f"E:{a}:OCCURRENCE"),
           (",", ",", ",", 7, "P"), (rng.choice(_SUBJECTS), "x", "NNS", 7, "SBJ"),
           (f, l, "VBD", 0, "ROOT", "M", f"E:{b}:OCCURRENCE:PAST")])
    d.b.tlink(b, "BEFORE", "t0").tlink(a, "BEFORE", b).clink(a, b)


def _reported(d: _Doc, rng) -> None:
    # Officials said SUBJ V because SUBJ2 V2 ; the report follows, the cause precedes
    s, a, b = d.event(), d.event(), d.event()
    (f1, l1), (f2, l2) = (_PAST[i] for i in rng.choice(len(_PAST), 2, replace=False))
    d.add([("Officials", "official", "NNS", 2, "SBJ"),
           ("said", "say", "VBD", 0, "ROOT", "M", f"E:{s}:REPORTING:PAST"),
           (rng.choice(_SUBJECTS), "x", "NNS", 4, "SBJ"),
           (f1, l1, "VBD", 2, "OBJ", f"E:{a}:OCCURRENCE:PAST"),
           ("because", "because", "IN", 4, "PRP"), (rng.choice(_SUBJECTS), "x", "NNS", 7, "SBJ"),
           (f2, l2, "VBD", 5, "SUB", f"E:{b}:OCCURRENCE:PAST")])
    d.b.tlink(s, "BEFORE", "t0").tlink(a, "BEFORE", "t0").tlink(s, "AFTER", a)
    d.b.tlink(b, "BEFORE", a).clink(b, a)


def _future(d: _Doc, rng) -> None:
    # SUBJ will V on DAY
    a, t = d.event(), d.timex()
    f, l = _BASE[rng.integers(len(_BASE))]
    d.add([(rng.choice(_SUBJECTS).capitalize(), "x", "NNS", 2, "SBJ"), ("will", "will", "MD", 0, "ROOT", "M"),
           (f, l, "VB", 2, "VC", f"E:{a}:OCCURRENCE:FUTURE"), ("on", "on", "IN", 3, "TMP"),
           ("Monday", "monday", "NNP", 4, "PMOD", f"T:{t}:DATE:{_day(rng, False)}")])
    d.b.tlink(a, "AFTER", "t0").tlink(a, "IS_INCLUDED", t)


def _caused(d: _Doc, rng) -> None:
    # The NOUN caused the boat to V
    a, b = d.event(), d.event()
    noun = rng.choice(_NOUNS)
    f, l = _BASE[rng.integers(len(_BASE))]
    d.add([("The", "the", "DT", 2, "NMOD"), (noun, noun, "NN", 3, "SBJ", f"E:{a}:OCCURRENCE"),
           ("caused", "cause", "VBD", 0, "ROOT", "M"), ("the", "the", "DT", 5, "NMOD"),
           ("crowd", "crowd", "NN", 3, "OBJ"), ("to", "to", "TO", 3, "OPRD"),
           (f, l, "VB", 6, "IM", f"E:{b}:OCCURRENCE:INFINITIVE")])
    d.b.tlink(a, "BEFORE", b).clink(a, b)


def _after(d: _Doc, rng) -> None:
    # SUBJ V after the NOUN
    a, b = d.event(), d.event()
    f, l = _PAST[rng.integers(len(_PAST))]
    noun = rng.choice(_NOUNS)
    d.add([(rng.choice(_SUBJECTS).capitalize(), "x", "NNS", 2, "SBJ"),
           (f, l, "VBD", 0, "ROOT", "M", f"E:{a}:OCCURRENCE:PAST"), ("after", "after", "IN", 2, "TMP"),
           ("the", "the", "DT", 5, "NMOD"), (noun, noun, "NN", 3, "PMOD", f"E:{b}:OCCURRENCE")])
    d.b.tlink(a, "BEFORE", "t0").tlink(a, "AFTER", b)


_TEMPLATES = (_because, _because_of, _reported, _future, _caused, _after)


def synthetic_corpus(n_docs: int = 20, seed: int = 0, sentences: int = 4) -> list[AnnotatedDocument]:
    """Small gold-annotated documents built from a handful of sentence templates.

    Every document gets TLINKs of all three event kinds and CLINKs in both
    directions, so each model has at least two labels to learn.
    """
    rng = np.random.default_rng(seed)
    out = []
    for n in range(n_docs):
        d = _Doc(f"syn{n:03d}", "2000-01-01")
        # the first two templates guarantee both causal directions
        picks = [0, 1] + list(rng.integers(len(_TEMPLATES), size=max(0, sentences - 2)))
        for k in rng.permutation(picks):
            _TEMPLATES[int(k)](d, rng)
        out.append(d.b.build())
    return out
