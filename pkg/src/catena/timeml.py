"""TimeML documents: data model, parsing and serialization.

Text-level tags (EVENT, TIMEX3, SIGNAL, C-SIGNAL and anything unknown) are
kept as character spans over the TEXT content so that the document can be
written back with the same markup. Link tags become :class:`TLink` and
:class:`CLink` records; SLINK/ALINK and unknown top-level tags are carried
through untouched.
"""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable
from xml.sax.saxutils import escape, quoteattr

from .allen import TLINK_LABELS
from .errors import DanglingReferenceError, InvariantError, TimeMLParseError

EVENT_CLASSES = (
    "REPORTING", "PERCEPTION", "ASPECTUAL", "I_ACTION", "I_STATE", "STATE", "OCCURRENCE",
)
TENSES = ("PAST", "PRESENT", "FUTURE", "INFINITIVE", "PRESPART", "PASTPART", "NONE")
ASPECTS = ("PROGRESSIVE", "PERFECTIVE", "PERFECTIVE_PROGRESSIVE", "NONE")
TIMEX_TYPES = ("DATE", "TIME", "DURATION", "SET")

PROVENANCES = ("annotated", "rule", "reasoner-deduced", "classifier", "post-edit", "propagated")

Span = tuple  # (start, end) character offsets into Document.text


@dataclass(frozen=True)
class EventInstance:
    eiid: str
    eid: str
    span: Span
    event_class: str
    tense: str = "NONE"
    aspect: str = "NONE"
    pos: str = "UNKNOWN"
    polarity: str = "POS"
    modality: str | None = None
    extra: tuple = ()  # remaining MAKEINSTANCE attributes, sorted (name, value)

    def __post_init__(self):
        if self.event_class not in EVENT_CLASSES:
            raise InvariantError(f"event {self.eid}: class {self.event_class!r} not allowed")
        if self.tense not in TENSES:
            raise InvariantError(f"event instance {self.eiid}: tense {self.tense!r} not allowed")
        if self.aspect not in ASPECTS:
            raise InvariantError(f"event instance {self.eiid}: aspect {self.aspect!r} not allowed")


@dataclass(frozen=True)
class Timex:
    tid: str
    span: Span | None
    type: str
    value: str
    function_in_document: str = "NONE"
    anchor_time_id: str | None = None
    extra: tuple = ()

    def __post_init__(self):
        if self.type not in TIMEX_TYPES:
            raise InvariantError(f"timex {self.tid}: type {self.type!r} not allowed")
        if not self.value:
            raise InvariantError(f"timex {self.tid}: empty value")

    @property
    def is_dct(self) -> bool:
        return self.function_in_document == "CREATION_TIME"


@dataclass(frozen=True)
class Signal:
    sid: str
    span: Span
    extra: tuple = ()


@dataclass(frozen=True)
class CausalSignal:
    cid: str
    span: Span
    extra: tuple = ()


@dataclass(frozen=True)
class TLink:
    lid: str
    source: str
    target: str
    rel_type: str
    signal_id: str | None = None
    provenance: str = "annotated"
    replaced: str | None = None  # label overwritten by post-editing
    extra: tuple = ()

    def __post_init__(self):
        if self.rel_type not in TLINK_LABELS and self.rel_type != "VAGUE":
            raise InvariantError(f"tlink {self.lid}: relType {self.rel_type!r} not allowed")
        if self.provenance not in PROVENANCES:
            raise InvariantError(f"tlink {self.lid}: provenance {self.provenance!r}")

    @property
    def deduced(self) -> bool:
        return self.provenance == "reasoner-deduced"


@dataclass(frozen=True)
class CLink:
    """Causal link; ``source`` is the cause, ``target`` the effect."""

    lid: str
    source: str
    target: str
    csignal_id: str | None = None
    provenance: str = "annotated"
    confidence: float | None = None
    extra: tuple = ()

    def __post_init__(self):
        if self.source == self.target:
            raise InvariantError(f"clink {self.lid}: source equals target {self.source!r}")
        if self.provenance not in PROVENANCES:
            raise InvariantError(f"clink {self.lid}: provenance {self.provenance!r}")


@dataclass(frozen=True)
class Opaque:
    """A tag kept verbatim: top-level (span None) or inline over a text span."""

    tag: str
    attrs: tuple
    span: Span | None = None
    xml: str | None = None


@dataclass(frozen=True)
class Document:
    doc_id: str
    dct: Timex
    text: str
    events: tuple = ()
    timexes: tuple = ()
    signals: tuple = ()
    csignals: tuple = ()
    tlinks: tuple = ()
    clinks: tuple = ()
    slinks: tuple = ()
    alinks: tuple = ()
    inline_other: tuple = ()
    other: tuple = ()
    event_extra: tuple = ()  # per eid: (eid, sorted extra EVENT attrs)
    dct_text: str = ""

    def __post_init__(self):
        validate(self)

    # lookups -------------------------------------------------------------

    @cached_property
    def _index(self) -> dict:
        idx = {t.tid: t for t in self.timexes}
        idx[self.dct.tid] = self.dct
        idx.update((e.eiid, e) for e in self.events)
        return idx

    def event(self, eiid: str) -> EventInstance:
        e = self._index.get(eiid)
        if not isinstance(e, EventInstance):
            raise DanglingReferenceError(eiid, self.doc_id)
        return e

    def timex(self, tid: str) -> Timex:
        t = self._index.get(tid)
        if not isinstance(t, Timex):
            raise DanglingReferenceError(tid, self.doc_id)
        return t

    def entity_ids(self) -> list[str]:
        """Event instances and timexes (DCT first) in document order."""
        items = [(t.span[0], 1, t.tid) for t in self.timexes]
        items += [(e.span[0], 0, e.eiid) for e in self.events]
        return [self.dct.tid] + [i for _, _, i in sorted(items)]

    def is_event(self, ident: str) -> bool:
        return isinstance(self._index.get(ident), EventInstance)

    def with_links(self, tlinks: Iterable[TLink] | None = None,
                   clinks: Iterable[CLink] | None = None) -> "Document":
        return replace(
            self,
            tlinks=self.tlinks if tlinks is None else tuple(tlinks),
            clinks=self.clinks if clinks is None else tuple(clinks),
        )


def validate(doc: Document) -> None:
    seen: set[str] = set()

    def claim(ident: str, kind: str):
        if ident in seen:
            raise InvariantError(f"{doc.doc_id}: duplicate {kind} id {ident!r}")
        seen.add(ident)

    if not doc.dct.is_dct:
        raise InvariantError(f"{doc.doc_id}: DCT timex lacks functionInDocument=CREATION_TIME")
    if any(t.is_dct for t in doc.timexes):
        raise InvariantError(f"{doc.doc_id}: more than one CREATION_TIME timex")
    claim(doc.dct.tid, "timex")
    for t in doc.timexes:
        claim(t.tid, "timex")
    eids = set()
    for e in doc.events:
        claim(e.eiid, "event instance")
        eids.add(e.eid)
    for eid in eids - {e.eiid for e in doc.events}:
        claim(eid, "event")
    for s in doc.signals:
        claim(s.sid, "signal")
    for c in doc.csignals:
        claim(c.cid, "c-signal")
    event_ids = {e.eiid for e in doc.events}
    timex_ids = {t.tid for t in doc.timexes} | {doc.dct.tid}
    signal_ids = {s.sid for s in doc.signals}
    csignal_ids = {c.cid for c in doc.csignals}
    for link in doc.tlinks:
        claim(link.lid, "link")
        for end in (link.source, link.target):
            if end not in event_ids and end not in timex_ids:
                raise DanglingReferenceError(end, f"{doc.doc_id} TLINK {link.lid}")
        if link.signal_id and link.signal_id not in signal_ids:
            raise DanglingReferenceError(link.signal_id, f"{doc.doc_id} TLINK {link.lid}")
    for link in doc.clinks:
        claim(link.lid, "link")
        for end in (link.source, link.target):
            if end not in event_ids:
                raise DanglingReferenceError(end, f"{doc.doc_id} CLINK {link.lid}")
        if link.csignal_id and link.csignal_id not in csignal_ids:
            raise DanglingReferenceError(link.csignal_id, f"{doc.doc_id} CLINK {link.lid}")


# ---------------------------------------------------------------------------
# parsing

_TEXT_TAGS = {"EVENT", "TIMEX3", "SIGNAL", "C-SIGNAL", "CSIGNAL"}


def _offset_of(raw: bytes, line: int, col: int) -> int:
    lines = raw.split(b"\n")
    return sum(len(x) + 1 for x in lines[: line - 1]) + col


def _attrs(elem: ET.Element, drop: Iterable[str] = ()) -> tuple:
    drop = set(drop)
    return tuple(sorted((k, v) for k, v in elem.attrib.items() if k not in drop))


def _walk_text(elem: ET.Element, buf: list, spans: list) -> None:
    """Flatten TEXT content, recording (tag, attrib, start, end) per element."""
    if elem.text:
        buf.append(elem.text)
    for child in elem:
        start = sum(map(len, buf))
        _walk_text(child, buf, spans)
        spans.append((child.tag, dict(child.attrib), start, sum(map(len, buf))))
        if child.tail:
            buf.append(child.tail)


def parse_timeml(raw_xml: str | bytes, extra_labels: Iterable[str] = ()) -> Document:
    raw = raw_xml.encode("utf-8") if isinstance(raw_xml, str) else raw_xml
    try:
        root = ET.fromstring(raw)
    except ET.ParseError as exc:
        line, col = exc.position
        raise TimeMLParseError(f"malformed XML: {exc}", _offset_of(raw, line, col)) from None
    if root.tag != "TimeML":
        raise TimeMLParseError(f"root element is <{root.tag}>, expected <TimeML>", 0)
    allowed = set(TLINK_LABELS) | set(extra_labels)

    doc_id = ""
    dct = None
    dct_text = ""
    text = ""
    spans: list = []
    instances: list[ET.Element] = []
    tlinks, clinks, slinks, alinks, other = [], [], [], [], []
    for child in root:
        tag = child.tag
        if tag == "DOCID":
            doc_id = (child.text or "").strip()
        elif tag == "DCT":
            t = child.find("TIMEX3")
            if t is None:
                raise TimeMLParseError("DCT without TIMEX3")
            dct = _timex(t, None)
            dct_text = t.text or ""
        elif tag == "TEXT":
            buf: list[str] = []
            _walk_text(child, buf, spans)
            text = "".join(buf)
        elif tag == "MAKEINSTANCE":
            instances.append(child)
        elif tag == "TLINK":
            tlinks.append(_tlink(child, allowed))
        elif tag == "CLINK":
            clinks.append(_clink(child))
        elif tag in ("SLINK", "ALINK"):
            (slinks if tag == "SLINK" else alinks).append(
                Opaque(tag, _attrs(child), None, _xml(child)))
        else:
            other.append(Opaque(tag, _attrs(child), None, _xml(child)))
    if dct is None:
        raise InvariantError(f"{doc_id or '<no DOCID>'}: no DCT timex")

    events_by_eid: dict[str, tuple] = {}
    timexes, signals, csignals, inline = [], [], [], []
    for tag, attrib, start, end in sorted(spans, key=lambda s: (s[2], -s[3])):
        span = (start, end)
        if tag == "EVENT":
            events_by_eid[attrib["eid"]] = (span, attrib)
        elif tag == "TIMEX3":
            el = ET.Element(tag, attrib)
            timexes.append(_timex(el, span))
        elif tag == "SIGNAL":
            signals.append(Signal(attrib["sid"], span, _sorted(attrib, {"sid"})))
        elif tag in ("C-SIGNAL", "CSIGNAL"):
            cid = attrib.get("cid") or attrib.get("id")
            csignals.append(CausalSignal(cid, span, (("_tag", tag),) + _sorted(attrib, {"cid", "id"})))
        else:
            inline.append(Opaque(tag, _sorted(attrib, ()), span))

    events = []
    for mi in instances:
        a = dict(mi.attrib)
        eid = a.pop("eventID")
        if eid not in events_by_eid:
            raise DanglingReferenceError(eid, f"{doc_id} MAKEINSTANCE {a.get('eiid')}")
        span, ev = events_by_eid[eid]
        events.append(EventInstance(
            eiid=a.pop("eiid"), eid=eid, span=span,
            event_class=ev.get("class", "OCCURRENCE"),
            tense=a.pop("tense", "NONE"), aspect=a.pop("aspect", "NONE"),
            pos=a.pop("pos", "UNKNOWN"), polarity=a.pop("polarity", "POS"),
            modality=a.pop("modality", None), extra=tuple(sorted(a.items())),
        ))
    instanced = {e.eid for e in events}
    event_extra = []
    for eid, (span, ev) in events_by_eid.items():
        if eid not in instanced:
            # EVENT without MAKEINSTANCE: give it an implicit instance
            events.append(EventInstance(eiid=eid, eid=eid, span=span,
                                        event_class=ev.get("class", "OCCURRENCE"),
                                        extra=(("_implicit", "true"),)))
        event_extra.append((eid, _sorted(ev, {"eid", "class"})))
    events.sort(key=lambda e: (e.span[0], e.eiid))

    return Document(
        doc_id=doc_id, dct=dct, text=text, events=tuple(events),
        timexes=tuple(timexes), signals=tuple(signals), csignals=tuple(csignals),
        tlinks=tuple(tlinks), clinks=tuple(clinks), slinks=tuple(slinks),
        alinks=tuple(alinks), inline_other=tuple(inline), other=tuple(other),
        event_extra=tuple(sorted(event_extra)), dct_text=dct_text,
    )


def _sorted(attrib: dict, drop: set) -> tuple:
    return tuple(sorted((k, v) for k, v in attrib.items() if k not in drop))


def _xml(elem: ET.Element) -> str:
    el = ET.Element(elem.tag, elem.attrib)
    el.text, el[:] = elem.text, list(elem)
    return ET.tostring(el, encoding="unicode").strip()


def _timex(el: ET.Element, span) -> Timex:
    a = dict(el.attrib)
    try:
        tid = a.pop("tid")
        ttype = a.pop("type")
    except KeyError as exc:
        raise InvariantError(f"TIMEX3 missing attribute {exc}") from None
    return Timex(
        tid=tid, span=span, type=ttype, value=a.pop("value", ""),
        function_in_document=a.pop("functionInDocument", "NONE"),
        anchor_time_id=a.pop("anchorTimeID", None), extra=tuple(sorted(a.items())),
    )


def _tlink(el: ET.Element, allowed: set) -> TLink:
    a = dict(el.attrib)
    source = a.pop("eventInstanceID", None) or a.pop("timeID", None)
    target = a.pop("relatedToEventInstance", None) or a.pop("relatedToTime", None)
    lid = a.pop("lid", None)
    if not (lid and source and target):
        raise InvariantError(f"TLINK {lid!r} lacks lid/source/target")
    rel_type = a.pop("relType")
    if rel_type not in allowed:
        raise InvariantError(f"TLINK {lid}: relType {rel_type!r} not allowed")
    deduced = a.pop("deduced", "false") == "true"
    provenance = a.pop("provenance", "reasoner-deduced" if deduced else "annotated")
    return TLink(lid, source, target, rel_type, a.pop("signalID", None), provenance,
                 a.pop("replacedRelType", None), tuple(sorted(a.items())))


def _clink(el: ET.Element) -> CLink:
    a = dict(el.attrib)
    lid = a.pop("id", None) or a.pop("lid", None) or a.pop("c_lid", None)
    source = a.pop("source", None) or a.pop("eventInstanceID", None)
    target = a.pop("target", None) or a.pop("relatedToEventInstance", None)
    if not (lid and source and target):
        raise InvariantError(f"CLINK {lid!r} lacks id/source/target")
    conf = a.pop("confidence", None)
    return CLink(lid, source, target, a.pop("csignalID", None) or a.pop("c-signalID", None),
                 a.pop("provenance", "annotated"), None if conf is None else float(conf),
                 tuple(sorted(a.items())))


# ---------------------------------------------------------------------------
# serialization


def _tag(name: str, attrs: Iterable[tuple], close: bool) -> str:
    body = "".join(f" {k}={quoteattr(str(v))}" for k, v in attrs if v is not None)
    return f"<{name}{body}{'/' if close else ''}>"


def _inline_elements(doc: Document) -> list[tuple]:
    extra = dict(doc.event_extra)
    seen_eid = set()
    out = []
    for e in doc.events:
        if e.eid in seen_eid:
            continue
        seen_eid.add(e.eid)
        attrs = [("eid", e.eid), ("class", e.event_class)] + list(extra.get(e.eid, ()))
        out.append(("EVENT", attrs, e.span))
    for t in doc.timexes:
        out.append(("TIMEX3", _timex_attrs(t), t.span))
    for s in doc.signals:
        out.append(("SIGNAL", [("sid", s.sid)] + list(s.extra), s.span))
    for c in doc.csignals:
        extra_c = dict(c.extra)
        tag = extra_c.pop("_tag", "C-SIGNAL")
        key = "id" if tag == "CSIGNAL" else "cid"
        out.append((tag, [(key, c.cid)] + sorted(extra_c.items()), c.span))
    for o in doc.inline_other:
        out.append((o.tag, list(o.attrs), o.span))
    return out


def _timex_attrs(t: Timex) -> list[tuple]:
    return [("tid", t.tid), ("type", t.type), ("value", t.value)] + list(t.extra) + [
        ("functionInDocument", t.function_in_document), ("anchorTimeID", t.anchor_time_id)]


def _render_text(doc: Document) -> str:
    opens: dict[int, list] = {}
    closes: dict[int, list] = {}
    for order, (tag, attrs, (start, end)) in enumerate(_inline_elements(doc)):
        opens.setdefault(start, []).append((-end, order, tag, attrs))
        if end > start:
            closes.setdefault(end, []).append((-start, -order, tag))
    out = []
    text = doc.text
    for pos in range(len(text) + 1):
        for _, _, tag in sorted(closes.get(pos, ())):
            out.append(f"</{tag}>")
        for neg_end, _, tag, attrs in sorted(opens.get(pos, ()), key=lambda x: (x[0], x[1])):
            out.append(_tag(tag, attrs, False))
            if -neg_end == pos:
                out.append(f"</{tag}>")
        if pos < len(text):
            out.append(escape(text[pos]))
    return "".join(out)


def serialize_timeml(doc: Document) -> str:
    lines = ['<?xml version="1.0" ?>', "<TimeML>", f"<DOCID>{escape(doc.doc_id)}</DOCID>"]
    lines.append("<DCT>" + _tag("TIMEX3", _timex_attrs(doc.dct), False)
                 + escape(doc.dct_text) + "</TIMEX3></DCT>")
    lines.append("<TEXT>" + _render_text(doc) + "</TEXT>")
    for e in doc.events:
        if dict(e.extra).get("_implicit") == "true":
            continue
        lines.append(_tag("MAKEINSTANCE", [
            ("eventID", e.eid), ("eiid", e.eiid), ("tense", e.tense), ("aspect", e.aspect),
            ("polarity", e.polarity), ("pos", e.pos), ("modality", e.modality),
        ] + list(e.extra), True))
    for t in doc.tlinks:
        lines.append(_tag("TLINK", _tlink_attrs(doc, t), True))
    for o in doc.slinks + doc.alinks + doc.other:
        lines.append(o.xml)
    for c in doc.clinks:
        lines.append(_tag("CLINK", [
            ("id", c.lid), ("source", c.source), ("target", c.target),
            ("csignalID", c.csignal_id),
            ("provenance", None if c.provenance == "annotated" else c.provenance),
            ("confidence", None if c.confidence is None else repr(c.confidence)),
        ] + list(c.extra), True))
    lines.append("</TimeML>")
    return "\n".join(lines) + "\n"


def _tlink_attrs(doc: Document, t: TLink) -> list[tuple]:
    events = {e.eiid for e in doc.events}
    src_key = "eventInstanceID" if t.source in events else "timeID"
    tgt_key = "relatedToEventInstance" if t.target in events else "relatedToTime"
    attrs = [("lid", t.lid), ("relType", t.rel_type), (src_key, t.source), (tgt_key, t.target),
             ("signalID", t.signal_id)]
    if t.deduced:
        attrs.append(("deduced", "true"))
    elif t.provenance != "annotated":
        attrs.append(("provenance", t.provenance))
    attrs.append(("replacedRelType", t.replaced))
    return attrs + list(t.extra)


def read_timeml(path) -> Document:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        return parse_timeml(raw)
    except TimeMLParseError as exc:
        raise TimeMLParseError(f"{path}: {exc}") from None


def taken_ids(doc: Document) -> set[str]:
    """Every id in use in ``doc``; links and entities share one namespace."""
    ids = {doc.dct.tid} | {t.tid for t in doc.timexes}
    ids |= {e.eiid for e in doc.events} | {e.eid for e in doc.events}
    ids |= {s.sid for s in doc.signals} | {c.cid for c in doc.csignals}
    ids |= {t.lid for t in doc.tlinks} | {c.lid for c in doc.clinks}
    return ids


_ID_NUM = re.compile(r"(\d+)$")


def fresh_id(prefix: str, taken: Iterable[str]) -> "Iterable[str]":
    """Yield ids ``prefix1, prefix2, ...`` that do not collide with ``taken``."""
    taken = set(taken)
    n = 1
    while True:
        cand = f"{prefix}{n}"
        if cand not in taken:
            taken.add(cand)
            yield cand
        n += 1
