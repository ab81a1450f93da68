"""Token-level sidecar annotations and the queries built on them.

Sidecar format (one token per line, blank line between sentences, ``#``
header lines for document-level data)::

    # doc: wsj_0679
    # coref: ei24 ei27
    ID  FORM  LEMMA  POS  CHUNK  HEAD  DEPREL  MAIN  START  END  [SUPERSENSE]

Columns are tab separated. ``ID`` and ``HEAD`` are 1-based and local to the
sentence (``HEAD`` 0 marks the root), ``MAIN`` is ``1`` for the main verb of
the sentence, ``START``/``END`` are character offsets into the TimeML TEXT
content, and dependency labels follow the CoNLL-2008 inventory. ``_`` marks
an empty optional column.

Similarity tables are tab separated ``lemma1 lemma2 score`` lines.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import AlignmentError, AnnotationMissingError, DanglingReferenceError
from .timeml import Document


@dataclass(frozen=True)
class Token:
    index: int  # document-global
    form: str
    lemma: str
    pos: str
    chunk: str
    head: int  # document-global index of the head, -1 for the root
    deprel: str
    main_verb: bool
    start: int
    end: int
    sentence: int
    supersense: str | None = None


@dataclass
class AnnotationLayer:
    tokens: list[Token]
    coref: list[frozenset] = field(default_factory=list)
    similarity: dict | None = None
    doc_id: str = ""

    @property
    def n_sentences(self) -> int:
        return self.tokens[-1].sentence + 1 if self.tokens else 0


def read_sidecar(text: str) -> AnnotationLayer:
    tokens: list[Token] = []
    coref: list[frozenset] = []
    doc_id = ""
    sentence: list[list[str]] = []
    n_sent = 0

    def flush():
        nonlocal sentence, n_sent
        if not sentence:
            return
        base = len(tokens)
        for cols in sentence:
            head = int(cols[5])
            tokens.append(Token(
                index=base + int(cols[0]) - 1, form=cols[1], lemma=cols[2], pos=cols[3],
                chunk=cols[4], head=-1 if head == 0 else base + head - 1, deprel=cols[6],
                main_verb=cols[7] == "1", start=int(cols[8]), end=int(cols[9]),
                sentence=n_sent,
                supersense=cols[10] if len(cols) > 10 and cols[10] != "_" else None,
            ))
        sentence = []
        n_sent += 1

    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            key = key.strip()
            if key == "doc":
                doc_id = value.strip()
            elif key == "coref":
                coref.append(frozenset(value.split()))
            continue
        if not line.strip():
            flush()
            continue
        cols = line.split("\t")
        if len(cols) < 10:
            raise AlignmentError(f"sidecar line {lineno}: expected >=10 columns, got {len(cols)}")
        sentence.append(cols)
    flush()
    return AnnotationLayer(tokens, coref, None, doc_id)


def write_sidecar(layer: AnnotationLayer) -> str:
    out = []
    if layer.doc_id:
        out.append(f"# doc: {layer.doc_id}")
    for group in layer.coref:
        out.append("# coref: " + " ".join(sorted(group)))
    current = 0
    first_of_sentence = 0
    for tok in layer.tokens:
        if tok.sentence != current:
            out.append("")
            current = tok.sentence
            first_of_sentence = tok.index
        head = 0 if tok.head < 0 else tok.head - first_of_sentence + 1
        out.append("\t".join([
            str(tok.index - first_of_sentence + 1), tok.form, tok.lemma, tok.pos, tok.chunk,
            str(head), tok.deprel, "1" if tok.main_verb else "0", str(tok.start), str(tok.end),
            tok.supersense or "_",
        ]))
    return "\n".join(out) + "\n"


def read_similarity(text: str) -> dict:
    table = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        a, b, score = line.split("\t")
        table[(a, b)] = float(score)
    return table


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntityPair:
    kind: str  # "TT", "ED", "ET" or "EE"
    e1: str
    e2: str
    same_sentence: bool


class AnnotatedDocument:
    """A :class:`Document` aligned with its :class:`AnnotationLayer`."""

    def __init__(self, doc: Document, layer: AnnotationLayer):
        self.doc = doc
        self.layer = layer
        self.tokens = layer.tokens
        self._spans: dict[str, tuple[int, int]] = {}
        self._heads: dict[str, int] = {}
        self._event_ids = frozenset(e.eiid for e in doc.events)
        self._timex_ids = frozenset(t.tid for t in doc.timexes)
        self._align()
        ents = [(self._heads[i], i) for i in self._spans
                if i in self._event_ids or i in self._timex_ids]
        self._ordinal = {ident: n for n, (_, ident) in enumerate(sorted(ents))}
        self._coref = {}
        for n, group in enumerate(layer.coref):
            for ident in group:
                self._coref[ident] = n

    def _align(self) -> None:
        text = self.doc.text
        toks = self.tokens
        out_of_range = 0
        for t in toks:
            if t.end > len(text) or text[t.start:t.end] != t.form:
                out_of_range += 1
        covered = bytearray(len(text))
        for t in toks:
            covered[max(0, t.start):min(len(text), t.end)] = b"\x01" * max(
                0, min(len(text), t.end) - max(0, t.start))
        uncovered_runs = 0
        prev = False
        for ch, c in zip(text, covered):
            miss = not c and not ch.isspace()
            if miss and not prev:
                uncovered_runs += 1
            prev = miss
        if out_of_range or uncovered_runs:
            expected = len(toks) - out_of_range + uncovered_runs
            raise AlignmentError(
                f"{self.doc.doc_id}: annotation layer has {len(toks)} tokens, "
                f"document text needs {expected}")
        spans = [(e.eiid, e.span) for e in self.doc.events]
        spans += [(t.tid, t.span) for t in self.doc.timexes]
        spans += [(s.sid, s.span) for s in self.doc.signals]
        spans += [(c.cid, c.span) for c in self.doc.csignals]
        for ident, (start, end) in spans:
            hit = [t.index for t in toks if t.start < end and t.end > start]
            if not hit:
                raise AlignmentError(f"{self.doc.doc_id}: entity {ident} covers no token")
            first, last = hit[0], hit[-1]
            self._spans[ident] = (first, last)
            inside = range(first, last + 1)
            head = next((i for i in inside if toks[i].head not in inside), last)
            self._heads[ident] = head

    # entity-level queries ------------------------------------------------

    @property
    def doc_id(self) -> str:
        return self.doc.doc_id

    def is_dct(self, ident: str) -> bool:
        return ident == self.doc.dct.tid

    def is_event(self, ident: str) -> bool:
        return ident in self._event_ids

    def token_span(self, ident: str) -> tuple[int, int]:
        try:
            return self._spans[ident]
        except KeyError:
            raise DanglingReferenceError(ident, self.doc.doc_id) from None

    def head(self, ident: str) -> int:
        try:
            return self._heads[ident]
        except KeyError:
            raise DanglingReferenceError(ident, self.doc.doc_id) from None

    def head_token(self, ident: str) -> Token:
        return self.tokens[self.head(ident)]

    def sentence_of(self, ident: str) -> int:
        return self.tokens[self.head(ident)].sentence

    def ordinal(self, ident: str) -> int:
        return self._ordinal[ident]

    def entity_distance(self, a: str, b: str) -> int:
        """Difference of entity ordinals: adjacent entities are at distance 1."""
        return abs(self._ordinal[a] - self._ordinal[b])

    def coreferent(self, a: str, b: str) -> bool:
        return a in self._coref and self._coref.get(a) == self._coref.get(b)

    def similarity(self, a: str, b: str) -> float | None:
        """Lemma similarity of two entities; ``None`` when the table lacks it."""
        table = self.layer.similarity
        if not table:
            return None
        la, lb = self.head_token(a).lemma, self.head_token(b).lemma
        if (la, lb) in table:
            return table[(la, lb)]
        return table.get((lb, la))

    def events_in_sentence(self, s: int) -> list[str]:
        return [e.eiid for e in sorted(self.doc.events, key=lambda e: self.head(e.eiid))
                if self.sentence_of(e.eiid) == s]

    def timexes_in_sentence(self, s: int) -> list[str]:
        return [t.tid for t in sorted(self.doc.timexes, key=lambda t: self.head(t.tid))
                if self.sentence_of(t.tid) == s]

    # dependency queries -------------------------------------------------

    def ancestors(self, tok: int) -> list[int]:
        out = []
        seen = {tok}
        h = self.tokens[tok].head
        while h >= 0 and h not in seen:
            out.append(h)
            seen.add(h)
            h = self.tokens[h].head
        return out

    def descending_path(self, top: int, bottom: int) -> list[str] | None:
        """Arc labels from ``top`` down to ``bottom``, or None if not dominated."""
        if top == bottom:
            return []
        chain = [bottom]
        for a in self.ancestors(bottom):
            if a == top:
                return [self.tokens[i].deprel for i in reversed(chain)]
            chain.append(a)
        return None

    def dep_path(self, a: int, b: int) -> list[str] | None:
        """Labels on the tree path from token ``a`` to token ``b``.

        Upward arcs contribute the label of the token left behind, downward
        arcs the label of the token entered. None when the tokens lie in
        different trees.
        """
        if a == b:
            return []
        up_a = [a] + self.ancestors(a)
        up_b = [b] + self.ancestors(b)
        common = set(up_a) & set(up_b)
        if not common:
            return None
        lca = next(t for t in up_a if t in common)
        up = [self.tokens[t].deprel for t in up_a[: up_a.index(lca)]]
        down = [self.tokens[t].deprel for t in reversed(up_b[: up_b.index(lca)])]
        return up + down

    def dominates(self, a: int, b: int) -> bool:
        return a in self.ancestors(b)


def attach_annotations(doc: Document, layer: AnnotationLayer,
                       similarity: dict | None = None) -> AnnotatedDocument:
    if similarity is not None:
        layer = AnnotationLayer(layer.tokens, layer.coref, similarity, layer.doc_id)
    return AnnotatedDocument(doc, layer)


def require_layer(adoc) -> AnnotatedDocument:
    if not isinstance(adoc, AnnotatedDocument):
        raise AnnotationMissingError(
            f"expected an AnnotatedDocument, got {type(adoc).__name__}")
    return adoc


# ---------------------------------------------------------------------------
# candidate pairs


def _forward_pairs(items: Sequence[str]) -> Iterator[tuple[str, str]]:
    for i, a in enumerate(items):
        for b in items[i + 1:]:
            yield a, b


def candidate_pairs(adoc: AnnotatedDocument, task: str = "temporal") -> list[EntityPair]:
    if task not in ("temporal", "causal"):
        raise ValueError(f"unknown task {task!r}")
    n_sent = adoc.layer.n_sentences
    events_by_s = [adoc.events_in_sentence(s) for s in range(n_sent)]
    pairs: list[EntityPair] = []

    if task == "causal":
        for s in range(n_sent):
            for a, b in _forward_pairs(events_by_s[s]):
                pairs.append(EntityPair("EE", a, b, True))
            if s + 1 < n_sent:
                for a in events_by_s[s]:
                    for b in events_by_s[s + 1]:
                        pairs.append(EntityPair("EE", a, b, False))
        return _sort(adoc, pairs)

    dct = adoc.doc.dct.tid
    timexes = [t.tid for t in sorted(adoc.doc.timexes, key=lambda t: adoc.head(t.tid))]
    for a, b in _forward_pairs([dct] + timexes):
        same = a != dct and adoc.sentence_of(a) == adoc.sentence_of(b)
        pairs.append(EntityPair("TT", a, b, same))
    for s in range(n_sent):
        for e in events_by_s[s]:
            pairs.append(EntityPair("ED", e, dct, False))
    for s in range(n_sent):
        for e in events_by_s[s]:
            for t in adoc.timexes_in_sentence(s):
                pairs.append(EntityPair("ET", e, t, True))
        for a, b in _forward_pairs(events_by_s[s]):
            pairs.append(EntityPair("EE", a, b, True))
        if s + 1 < n_sent:
            mains_a = [e for e in events_by_s[s] if adoc.head_token(e).main_verb]
            mains_b = [e for e in events_by_s[s + 1] if adoc.head_token(e).main_verb]
            for a in mains_a:
                for b in mains_b:
                    pairs.append(EntityPair("EE", a, b, False))
    return _sort(adoc, pairs)


_KIND_ORDER = {"TT": 0, "ED": 1, "ET": 2, "EE": 3}


def _sort(adoc: AnnotatedDocument, pairs: Iterable[EntityPair]) -> list[EntityPair]:
    def pos(ident: str) -> int:
        return -1 if adoc.is_dct(ident) else adoc.head(ident)

    return sorted(pairs, key=lambda p: (_KIND_ORDER[p.kind], pos(p.e1), pos(p.e2)))
