"""Scorers: temporal awareness, CLINK P/R/F1, dense label match, QA, and folds."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .allen import FULL, INVERSE_LABEL, STRICT, MappingProfile
from .errors import AlignmentError, CatenaError, DanglingReferenceError, FoldError
from .pipeline import to_dense
from .reasoner import canonical_reduce, graph_from_document, path_consistency, timegraph_answer
from .timeml import CLink, Document, TLink


@dataclass
class ScoreReport:
    precision: float
    recall: float
    f1: float
    tp_sys: int  # system items verified against the reference
    n_sys: int
    tp_ref: int  # reference items recovered by the system
    n_ref: int
    per_label: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, tp_sys: int, n_sys: int, tp_ref: int, n_ref: int, per_label=None) -> "ScoreReport":
        p = tp_sys / n_sys if n_sys else 0.0
        r = tp_ref / n_ref if n_ref else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        return cls(p, r, f, tp_sys, n_sys, tp_ref, n_ref, per_label or {})

    def __add__(self, other: "ScoreReport") -> "ScoreReport":
        return ScoreReport.from_counts(self.tp_sys + other.tp_sys, self.n_sys + other.n_sys,
                                       self.tp_ref + other.tp_ref, self.n_ref + other.n_ref)

    def lines(self) -> list[str]:
        return [f"precision\t{self.precision:.4f}", f"recall\t{self.recall:.4f}", f"f1\t{self.f1:.4f}",
                f"counts\tsys {self.tp_sys}/{self.n_sys}\tref {self.tp_ref}/{self.n_ref}"]


EMPTY_REPORT = ScoreReport(0.0, 0.0, 0.0, 0, 0, 0, 0)


# -- id normalisation ----------------------------------------------------------------


def _spans(doc: Document) -> dict:
    out = {("DCT",): doc.dct.tid}
    out.update(((e.span,), e.eiid) for e in doc.events)
    out.update(((t.span,), t.tid) for t in doc.timexes)
    return out


def align(sys: Document, ref: Document) -> dict[str, str]:
    """Map system entity ids onto reference ids by character span."""
    s, r = _spans(sys), _spans(ref)
    missing = sorted(k[0] for k in r.keys() - s.keys())
    extra = sorted(k[0] for k in s.keys() - r.keys())
    if missing or extra:
        raise AlignmentError(f"{ref.doc_id}: entity spans differ; only in reference {missing}, "
                             f"only in system {extra}")
    return {s[k]: r[k] for k in s}


def _renamed(sys: Document, ref: Document) -> tuple[list[TLink], list[CLink]]:
    m = align(sys, ref)
    tl = [TLink(t.lid, m[t.source], m[t.target], t.rel_type, provenance=t.provenance) for t in sys.tlinks]
    cl = [CLink(c.lid, m[c.source], m[c.target], provenance=c.provenance) for c in sys.clinks]
    return tl, cl


# -- temporal awareness ----------------------------------------------------------


def _reduced_and_closed(doc: Document, profile: MappingProfile, tlinks=None):
    g = graph_from_document(doc, profile, tlinks)
    res = path_consistency(g)
    if not res.consistent:
        # nothing sound can be inferred: score the links as given
        return g, g
    return canonical_reduce(g), res.closure


def _verified(edges, closure) -> int:
    n = 0
    for (a, b) in edges.order:
        r = edges.edges[(a, b)]
        if r != FULL and closure.get(a, b) & ~r == 0:
            n += 1
    return n


def _constrained(g) -> int:
    return sum(1 for p in g.order if g.edges[p] != FULL)


def temporal_awareness(sys: Document, ref: Document, profile: MappingProfile = STRICT) -> ScoreReport:
    """Reduced system relations checked against the reference closure, and vice versa."""
    tl, _ = _renamed(sys, ref)
    s_red, s_clo = _reduced_and_closed(ref, profile, tl)
    r_red, r_clo = _reduced_and_closed(ref, profile)
    return ScoreReport.from_counts(_verified(s_red, r_clo), _constrained(s_red),
                                   _verified(r_red, s_clo), _constrained(r_red))


# -- CLINKs ------------------------------------------------------------------------


def clink_prf(sys: Document, ref: Document) -> ScoreReport:
    """Exact match on (cause, effect); direction is normalised by the link convention."""
    _, cl = _renamed(sys, ref)
    s = {(c.source, c.target) for c in cl}
    r = {(c.source, c.target) for c in ref.clinks}
    tp = len(s & r)
    return ScoreReport.from_counts(tp, len(s), tp, len(r))


# -- dense label match ---------------------------------------------------------------


def _pair_labels(tlinks: Iterable[TLink], order: dict) -> dict:
    out = {}
    for t in tlinks:
        a, b, lab = t.source, t.target, t.rel_type
        if order[a] > order[b]:
            a, b, lab = b, a, INVERSE_LABEL.get(lab, lab)
        out.setdefault((a, b), lab)
    return out


def dense_prf(sys: Document, ref: Document) -> ScoreReport:
    """Pairwise label agreement after mapping both sides to the dense label set."""
    tl, _ = _renamed(sys, ref)
    ref_d = to_dense(ref)
    sys_d = to_dense(ref.with_links(tl, ()))
    order = {e: n for n, e in enumerate(ref.entity_ids())}
    s, r = _pair_labels(sys_d.tlinks, order), _pair_labels(ref_d.tlinks, order)
    per_label = {}
    for lab in sorted(set(s.values()) | set(r.values())):
        hit = sum(1 for k, v in s.items() if v == lab and r.get(k) == lab)
        per_label[lab] = ScoreReport.from_counts(hit, sum(v == lab for v in s.values()),
                                                 hit, sum(v == lab for v in r.values()))
    tp = sum(1 for k, v in s.items() if r.get(k) == v)
    return ScoreReport.from_counts(tp, len(s), tp, len(r), per_label)


METRICS = {"awareness": temporal_awareness, "clink": lambda s, r, profile=None: clink_prf(s, r),
           "dense": lambda s, r, profile=None: dense_prf(s, r)}


def score_corpus(sys_docs: Sequence[Document], ref_docs: Sequence[Document], metric: str = "awareness",
                 profile: MappingProfile = STRICT) -> ScoreReport:
    """Micro-averaged score over documents paired by id."""
    if metric not in METRICS:
        raise CatenaError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}")
    sys_by = {d.doc_id: d for d in sys_docs}
    ref_by = {d.doc_id: d for d in ref_docs}
    if sys_by.keys() != ref_by.keys():
        raise AlignmentError(f"document sets differ: only in reference {sorted(ref_by.keys() - sys_by.keys())}, "
                             f"only in system {sorted(sys_by.keys() - ref_by.keys())}")
    total = EMPTY_REPORT
    for doc_id in sorted(ref_by):
        total = total + METRICS[metric](sys_by[doc_id], ref_by[doc_id], profile=profile)
    return total


# -- QA ------------------------------------------------------------------------------


@dataclass(frozen=True)
class Question:
    doc_id: str
    e1: str  # "START-END" character span or an entity id
    relation: str
    e2: str
    gold: str


@dataclass
class QAReport:
    coverage: float
    precision: float
    recall: float
    f1: float
    answered: int
    correct: int
    total: int
    errors: list = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"coverage\t{self.coverage:.4f}", f"precision\t{self.precision:.4f}",
               f"recall\t{self.recall:.4f}", f"f1\t{self.f1:.4f}",
               f"counts\tanswered {self.answered}\tcorrect {self.correct}\ttotal {self.total}"]
        return out + [f"error\t{e}" for e in self.errors]


_SPAN = re.compile(r"^(\d+)-(\d+)$")


def read_questions(text: str) -> list[Question]:
    """One question per line: doc id, e1, relation, e2, YES|NO (tab-separated)."""
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 5:
            raise CatenaError(f"questions line {n}: expected 5 tab-separated fields, got {len(cols)}")
        doc_id, e1, rel, e2, gold = (c.strip() for c in cols)
        if gold.upper() not in ("YES", "NO"):
            raise CatenaError(f"questions line {n}: gold answer must be YES or NO, got {gold!r}")
        out.append(Question(doc_id, e1, rel.upper(), e2, gold.upper()))
    return out


def _resolve(doc: Document, ref: str) -> str:
    m = _SPAN.match(ref)
    if m is None:
        if ref == doc.dct.tid or doc.is_event(ref) or any(t.tid == ref for t in doc.timexes):
            return ref
        raise DanglingReferenceError(ref, doc.doc_id)
    span = (int(m.group(1)), int(m.group(2)))
    for e in doc.events:
        if e.span == span:
            return e.eiid
    for t in doc.timexes:
        if t.span == span:
            return t.tid
    raise DanglingReferenceError(ref, doc.doc_id)


def qa_evaluate(docs: Sequence[Document], questions: Sequence[Question],
                profile: MappingProfile = STRICT) -> QAReport:
    """Answer each question from its document's closure; UNKNOWN counts as unanswered."""
    by_id = {d.doc_id: d for d in docs}
    closures = {}
    answered = correct = 0
    errors = []
    for q in questions:
        doc = by_id.get(q.doc_id)
        if doc is None:
            errors.append(f"{q.doc_id}: no such document")
            continue
        if q.doc_id not in closures:
            g = graph_from_document(doc, profile)
            res = path_consistency(g)
            closures[q.doc_id] = res.closure if res.consistent else g
        try:
            a, b = _resolve(doc, q.e1), _resolve(doc, q.e2)
            answer = timegraph_answer(closures[q.doc_id], a, q.relation, b, profile)
        except (DanglingReferenceError, KeyError) as exc:
            errors.append(f"{q.doc_id}: {exc}")
            continue
        if answer == "UNKNOWN":
            continue
        answered += 1
        correct += answer == q.gold
    total = len(questions)
    p = correct / answered if answered else 0.0
    r = correct / total if total else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return QAReport(answered / total if total else 0.0, p, r, f, answered, correct, total, errors)


# -- folds ---------------------------------------------------------------------------


def stratified_folds(labels: Sequence, k: int, seed: int = 0) -> list[list[int]]:
    """Partition instance indices into ``k`` folds with per-label counts within one."""
    n = len(labels)
    if k < 2:
        raise FoldError(f"need at least 2 folds, got {k}")
    if k > n:
        raise FoldError(f"{k} folds requested for {n} instances")
    rng = np.random.default_rng(seed)
    by_label: dict = {}
    for i, lab in enumerate(labels):
        by_label.setdefault(lab, []).append(i)
    folds: list[list[int]] = [[] for _ in range(k)]
    nxt = 0
    # dealing continues from where the previous label stopped, keeping fold sizes level
    for lab in sorted(by_label, key=str):
        for i in rng.permutation(by_label[lab]):
            folds[nxt].append(int(i))
            nxt = (nxt + 1) % k
    return [sorted(f) for f in folds]
