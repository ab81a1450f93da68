"""Sparse one-hot features for E-D, E-T, E-E and causal event pairs.

Features are first produced as strings (``"tense1=PAST"``, ``"samePoS"``)
and then mapped through a vocabulary fitted on training data. Strings not in
the vocabulary are dropped, so unseen values encode as an all-zero block.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .annotation import AnnotatedDocument, EntityPair, require_layer
from .errors import EmptyTrainingError, ModelFormatError
from .lexicons import Lexicons, SignalMatch, load_lexicons
from .linear import FeatureVector

SIMPLIFY = {"IBEFORE": "BEFORE", "IAFTER": "AFTER", "DURING": "SIMULTANEOUS",
            "DURING_INV": "SIMULTANEOUS"}


def simplify_labels(label: str) -> str:
    return SIMPLIFY.get(label, label)


def wn_bucket(sim: float) -> str:
    if sim <= 0.0:
        return "sim<=0.0"
    if sim <= 0.5:
        return "0.0<sim<=0.5"
    if sim <= 1.0:
        return "0.5<sim<=1.0"
    return "sim>1.0"


# -- raw feature strings -------------------------------------------------------


def _entity(adoc: AnnotatedDocument, ident: str, slot: str) -> list[str]:
    doc = adoc.doc
    if adoc.is_dct(ident):
        return [f"type{slot}={doc.dct.type}"]
    tok = adoc.head_token(ident)
    out = [f"pos{slot}={tok.pos}", f"chunk{slot}={tok.chunk}"]
    if adoc.is_event(ident):
        e = doc.event(ident)
        out += [f"class{slot}={e.event_class}", f"tense{slot}={e.tense}",
                f"aspect{slot}={e.aspect}", f"polarity{slot}={e.polarity}"]
        if tok.main_verb:
            out.append(f"mainVerb{slot}")
    else:
        out.append(f"type{slot}={doc.timex(ident).type}")
    return out


def _context(adoc: AnnotatedDocument, a: str, b: str) -> list[str]:
    out = []
    if adoc.head_token(a).pos == adoc.head_token(b).pos:
        out.append("samePoS")
    if adoc.sentence_of(a) != adoc.sentence_of(b):
        out.append("sentenceDistance")
    if adoc.entity_distance(a, b) > 1:
        out.append("entityDistance")
    return out


def _signal_head(adoc: AnnotatedDocument, s: SignalMatch) -> int:
    inside = range(s.start, s.end + 1)
    return next((i for i in inside if adoc.tokens[i].head not in inside), s.end)


def _pick_signal(adoc: AnnotatedDocument, signals: Sequence[SignalMatch], h1: int, h2: int):
    """The signal between the entities nearest to the later one, else the nearest overall."""
    lo, hi = min(h1, h2), max(h1, h2)
    between = [s for s in signals if lo < s.start and s.end < hi]
    if between:
        return between[-1], "BETWEEN"
    if not signals:
        return None, None
    s = min(signals, key=lambda s: (min(abs(s.start - lo), abs(s.start - hi)), s.start))
    first_of_sentence = s.start == 0 or adoc.tokens[s.start - 1].sentence != adoc.tokens[s.start].sentence
    if first_of_sentence:
        return s, "BEGIN"
    return s, "BEFORE" if s.end < lo else "AFTER"


def _signal_block(adoc: AnnotatedDocument, a: str, b: str, signals, prefix: str,
                  dep_labels: Sequence[str]) -> list[str]:
    h1, h2 = adoc.head(a), adoc.head(b)
    s, position = _pick_signal(adoc, signals, h1, h2)
    if s is None:
        return []
    out = [f"{prefix}Cluster={s.cluster}", f"{prefix}Position={position}"]
    sh = _signal_head(adoc, s)
    labels = set()
    for h in (h1, h2):
        labels.update(adoc.dep_path(sh, h) or ())
    out += [f"{prefix}Dep={lab}" for lab in dep_labels if lab in labels]
    return out


def _sentence_forms(adoc: AnnotatedDocument, sentences: Iterable[int]):
    for s in sorted(set(sentences)):
        toks = [t for t in adoc.tokens if t.sentence == s]
        if toks:
            yield [t.form for t in toks], toks[0].index


def _signals(adoc, a, b, match) -> list[SignalMatch]:
    found = []
    for forms, offset in _sentence_forms(adoc, (adoc.sentence_of(a), adoc.sentence_of(b))):
        found += match(forms, offset)
    return found


def _dependency_path(adoc: AnnotatedDocument, a: str, b: str, lex: Lexicons) -> list[str]:
    path = adoc.dep_path(adoc.head(a), adoc.head(b))
    if not path or len(path) > lex.path_max_length or not set(path) <= lex.path_labels:
        return []
    return ["depPath=" + "-".join(path)]


def raw_features(pair: EntityPair, adoc: AnnotatedDocument, extras: Mapping[str, str] | None = None,
                 causal: bool = False, lex: Lexicons | None = None) -> list[str]:
    """Feature strings for ``pair``; ``extras`` carries rule-sieve labels.

    Recognised extras: ``timex_dct`` (E-T), ``e1_dct`` and ``e2_dct`` (E-E)
    and ``tlink`` (causal; missing means NONE).
    """
    adoc = require_layer(adoc)
    lex = lex or load_lexicons()
    extras = extras or {}
    a, b = pair.e1, pair.e2
    out = _entity(adoc, a, "1") + _entity(adoc, b, "2")
    if pair.kind == "ED":
        return out

    out += _context(adoc, a, b)
    if pair.kind == "ET":
        if adoc.head(a) < adoc.head(b):
            out.append("entityOrder")
        out += _signal_block(adoc, a, b,
                             _signals(adoc, a, b, lambda f, o: lex.temporal_signals(f, o, "timex")),
                             "tsig", lex.signal_dep_labels)
        if "timex_dct" in extras:
            out.append(f"timexDct={extras['timex_dct']}")
        return out

    e1, e2 = adoc.doc.event(a), adoc.doc.event(b)
    if e1.event_class == e2.event_class:
        out.append("sameClass")
    if (e1.tense, e1.aspect) == (e2.tense, e2.aspect):
        out.append("sameTenseAspect")
    if e1.polarity == e2.polarity:
        out.append("samePolarity")
    out += _dependency_path(adoc, a, b, lex)
    out += _signal_block(adoc, a, b,
                         _signals(adoc, a, b, lambda f, o: lex.temporal_signals(f, o, "event")),
                         "tsig", lex.signal_dep_labels)
    sim = adoc.similarity(a, b)
    if sim is not None:
        out.append("wnSim=" + wn_bucket(sim))
    if causal:
        out += _signal_block(adoc, a, b, _signals(adoc, a, b, lex.causal_signals),
                             "csig", lex.signal_dep_labels)
        out.append(f"tlink={extras.get('tlink') or 'NONE'}")
    else:
        for key in ("e1_dct", "e2_dct"):
            if key in extras:
                out.append(f"{key}={extras[key]}")
    return out


# -- encoders ------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureEncoders:
    """Vocabulary for one model: feature string -> column index."""

    vocab: dict[str, int]
    causal: bool = False

    @property
    def dim(self) -> int:
        return len(self.vocab)

    def encode(self, strings: Iterable[str]) -> FeatureVector:
        idx = sorted({self.vocab[s] for s in strings if s in self.vocab})
        return FeatureVector(tuple(idx), self.dim)

    def to_dict(self) -> dict:
        return {"causal": self.causal, "features": list(self.vocab)}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureEncoders":
        try:
            return cls({s: i for i, s in enumerate(d["features"])}, bool(d["causal"]))
        except (KeyError, TypeError) as exc:
            raise ModelFormatError(f"malformed encoder: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


def fit_encoders(items: Iterable[tuple], causal: bool = False,
                 lex: Lexicons | None = None) -> FeatureEncoders:
    """Fit a vocabulary in first-seen order over ``(pair, adoc[, extras])`` items."""
    vocab: dict[str, int] = {}
    n = 0
    for pair, adoc, *rest in items:
        n += 1
        for s in raw_features(pair, adoc, rest[0] if rest else None, causal, lex):
            vocab.setdefault(s, len(vocab))
    if not n:
        raise EmptyTrainingError("cannot fit encoders on an empty corpus")
    return FeatureEncoders(vocab, causal)


def featurize(pair: EntityPair, adoc: AnnotatedDocument, enc: FeatureEncoders,
              extras: Mapping[str, str] | None = None, lex: Lexicons | None = None) -> FeatureVector:
    return enc.encode(raw_features(pair, adoc, extras, enc.causal, lex))
