"""Lexicon tables and signal matching.

Tables are tab-separated text files with ``#`` comments. They ship in
``catena/data``; setting ``CATENA_LEXICON_DIR`` to a directory makes any
file found there take precedence over the bundled copy.
"""
from __future__ import annotations

import os
import re
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

ENV_VAR = "CATENA_LEXICON_DIR"


def _read(name: str, lexicon_dir: str | None) -> list[list[str]]:
    base = lexicon_dir or os.environ.get(ENV_VAR)
    if base and (Path(base) / name).is_file():
        text = (Path(base) / name).read_text(encoding="utf-8")
    else:
        text = resources.files("catena.data").joinpath(name).read_text(encoding="utf-8")
    return [line.split("\t") for line in text.splitlines()
            if line.strip() and not line.startswith("#")]


@dataclass(frozen=True)
class SignalMatch:
    start: int  # first token index (document-global)
    end: int  # last token index, inclusive
    text: str
    cluster: str


@dataclass(frozen=True)
class CausalVerb:
    lemma: str
    particle: str | None
    category: str
    direction: str


@dataclass(frozen=True)
class EERule:
    rule_set: str
    e1_tense: str
    e1_aspect: str
    e2_tense: str
    e2_aspect: str
    label: str

    def matches(self, t1, a1, t2, a2) -> bool:
        return all(p in ("*", v) for p, v in
                   ((self.e1_tense, t1), (self.e1_aspect, a1), (self.e2_tense, t2), (self.e2_aspect, a2)))


class Lexicons:
    """All lexical resources the rules and features consult."""

    def __init__(self, lexicon_dir: str | None = None):
        self.source = lexicon_dir or os.environ.get(ENV_VAR) or "bundled"
        self.event_signals = _phrase_table(_read("temporal_signals_event.tsv", lexicon_dir))
        self.timex_signals = _phrase_table(_read("temporal_signals_timex.tsv", lexicon_dir))
        self.prepositions = _phrase_table(_read("temporal_prepositions.tsv", lexicon_dir))
        self.aspectual = {r[0]: r[1] for r in _read("aspectual_verbs.tsv", lexicon_dir)}

        self.causal_verbs: dict[str, list[CausalVerb]] = {}
        for lemma, particle, cat, direction in _read("causal_verbs.tsv", lexicon_dir):
            entry = CausalVerb(lemma, None if particle == "_" else particle, cat, direction)
            bucket = self.causal_verbs.setdefault(lemma, [])
            if all(e.particle != entry.particle for e in bucket):
                bucket.append(entry)

        self.causal_patterns = []
        for kind, text, cluster in _read("causal_signals.tsv", lexicon_dir):
            body = text if kind == "regex" else re.escape(text)
            self.causal_patterns.append(
                (re.compile(r"(?<![\w'-])" + body + r"(?![\w-])"), cluster))

        rows = _read("dependency_paths.tsv", lexicon_dir)
        self.path_max_length = next(int(r[1]) for r in rows if r[0] == "max_length")
        self.path_labels = frozenset(r[0] for r in rows if r[0] != "max_length")
        self.signal_dep_labels = tuple(r[0] for r in _read("signal_dep_labels.tsv", lexicon_dir))
        self.ee_rules = tuple(EERule(*r) for r in _read("ee_tense_rules.tsv", lexicon_dir))

    # -- temporal signals ----------------------------------------------------

    def temporal_signals(self, forms: Sequence[str], offset: int = 0,
                         table: str = "event") -> list[SignalMatch]:
        """Longest-first, non-overlapping matches of a signal table in ``forms``."""
        return _match_phrases(self.event_signals if table == "event" else self.timex_signals,
                              forms, offset)

    def preposition_sense(self, forms: Sequence[str]) -> str | None:
        return self.prepositions.get(tuple(f.lower() for f in forms), (None,))[0]

    # -- causal signals and verbs -------------------------------------------

    def causal_signals(self, forms: Sequence[str], offset: int = 0) -> list[SignalMatch]:
        """Match causal signal patterns over lowercased, space-joined tokens."""
        text, starts = _joined(forms)
        taken: set[int] = set()
        found = []
        for pattern, cluster in self.causal_patterns:
            for m in pattern.finditer(text):
                first = _token_at(starts, m.start())
                last = _token_at(starts, m.end() - 1)
                span = set(range(first, last + 1))
                if span & taken:
                    continue
                taken |= span
                found.append(SignalMatch(first + offset, last + offset, m.group(0), cluster))
        return sorted(found, key=lambda s: s.start)

    def causal_verb(self, lemma: str, next_forms: Sequence[str] = ()) -> CausalVerb | None:
        """Lexicon entry for ``lemma``; particle entries need the particle nearby."""
        entries = self.causal_verbs.get(lemma.lower())
        if not entries:
            return None
        nearby = {f.lower() for f in next_forms}
        for e in entries:
            if e.particle and e.particle in nearby:
                return e
        return next((e for e in entries if e.particle is None), None)


def _phrase_table(rows) -> dict[tuple, tuple[str, ...]]:
    table = {}
    for text, *rest in rows:
        key = tuple(text.lower().split())
        table.setdefault(key, tuple(rest))
    return table


def _match_phrases(table, forms, offset) -> list[SignalMatch]:
    low = [f.lower() for f in forms]
    longest = max((len(k) for k in table), default=0)
    out = []
    i = 0
    while i < len(low):
        for n in range(min(longest, len(low) - i), 0, -1):
            key = tuple(low[i:i + n])
            if key in table:
                out.append(SignalMatch(i + offset, i + n - 1 + offset, " ".join(key), table[key][0]))
                i += n
                break
        else:
            i += 1
    return out


def _joined(forms):
    starts = []
    pos = 0
    for f in forms:
        starts.append(pos)
        pos += len(f) + 1
    return " ".join(f.lower() for f in forms), starts


def _token_at(starts, char):
    return bisect_right(starts, char) - 1


def load_lexicons(lexicon_dir: str | None = None) -> Lexicons:
    """Shared, cached :class:`Lexicons` for a directory (or the environment default)."""
    return _cached(lexicon_dir or os.environ.get(ENV_VAR))


@lru_cache(maxsize=4)
def _cached(lexicon_dir: str | None) -> Lexicons:
    return Lexicons(lexicon_dir)
