"""Allen interval algebra over 13-bit relation sets.

A relation set is a plain ``int`` whose bit ``i`` is set when base relation
``BASE[i]`` is admitted. ``0`` signals inconsistency and ``FULL`` means the
relation is unknown.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

BASE = ("<", ">", "m", "mi", "o", "oi", "s", "si", "d", "di", "f", "fi", "=")
INDEX = {name: i for i, name in enumerate(BASE)}
FULL = (1 << len(BASE)) - 1
EMPTY = 0

_CONVERSE_NAME = {
    "<": ">", ">": "<", "m": "mi", "mi": "m", "o": "oi", "oi": "o",
    "s": "si", "si": "s", "d": "di", "di": "d", "f": "fi", "fi": "f", "=": "=",
}
_CONVERSE_BIT = [INDEX[_CONVERSE_NAME[b]] for b in BASE]

TLINK_LABELS = (
    "BEFORE", "AFTER", "INCLUDES", "IS_INCLUDED", "DURING", "DURING_INV",
    "SIMULTANEOUS", "IAFTER", "IBEFORE", "IDENTITY", "BEGINS", "ENDS",
    "BEGUN_BY", "ENDED_BY",
)

INVERSE_LABEL = {
    "BEFORE": "AFTER", "AFTER": "BEFORE",
    "INCLUDES": "IS_INCLUDED", "IS_INCLUDED": "INCLUDES",
    "DURING": "DURING_INV", "DURING_INV": "DURING",
    "SIMULTANEOUS": "SIMULTANEOUS", "IDENTITY": "IDENTITY",
    "IBEFORE": "IAFTER", "IAFTER": "IBEFORE",
    "BEGINS": "BEGUN_BY", "BEGUN_BY": "BEGINS",
    "ENDS": "ENDED_BY", "ENDED_BY": "ENDS",
}


def rel(*names: str) -> int:
    """Build a relation set from base-relation names, e.g. ``rel("<", "m")``."""
    out = 0
    for n in names:
        out |= 1 << INDEX[n]
    return out


EQ_REL = 1 << INDEX["="]


def names(r: int) -> list[str]:
    return [b for i, b in enumerate(BASE) if r >> i & 1]


def fmt(r: int) -> str:
    return "{" + ", ".join(names(r)) + "}"


def parse_rel(text: str) -> int:
    """Inverse of :func:`fmt`; also accepts bare space/comma separated names."""
    body = text.strip().strip("{}")
    return rel(*[t for t in body.replace(",", " ").split() if t])


@lru_cache(maxsize=None)
def converse(r: int) -> int:
    out = 0
    for i in range(len(BASE)):
        if r >> i & 1:
            out |= 1 << _CONVERSE_BIT[i]
    return out


def _load_table() -> list[list[int]]:
    table = [[0] * len(BASE) for _ in BASE]
    text = resources.files("catena.data").joinpath("allen_composition.tsv").read_text()
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        a, b, res = line.split("\t")
        table[INDEX[a]][INDEX[b]] = rel(*res.split())
    return table


COMPOSITION = _load_table()


@lru_cache(maxsize=1 << 16)
def compose(r1: int, r2: int) -> int:
    """Weak composition: union of base compositions over both sets."""
    if r1 == FULL or r2 == FULL:
        if r1 and r2:
            return FULL
    out = 0
    for i in range(len(BASE)):
        if not r1 >> i & 1:
            continue
        row = COMPOSITION[i]
        for j in range(len(BASE)):
            if r2 >> j & 1:
                out |= row[j]
                if out == FULL:
                    return FULL
    return out


@dataclass(frozen=True)
class MappingProfile:
    """How TLINK labels are read as Allen relation sets."""

    name: str
    forward: Mapping[str, int]
    # label preferred by unmap when several labels share one relation set
    preference: tuple[str, ...] = ("SIMULTANEOUS",)
    _inverse: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        missing = set(TLINK_LABELS) - set(self.forward)
        if missing:
            raise ValueError(f"profile {self.name!r} misses labels {sorted(missing)}")
        inverse: dict[int, str] = {}
        for label in TLINK_LABELS:
            r = self.forward[label]
            if r in inverse and label not in self.preference:
                continue
            if r in inverse and inverse[r] in self.preference:
                continue
            inverse[r] = label
        object.__setattr__(self, "_inverse", inverse)

    def map(self, label: str) -> int:
        try:
            return self.forward[label]
        except KeyError:
            raise ValueError(f"unknown TLINK label {label!r}") from None

    def unmap(self, r: int) -> str | None:
        return self._inverse.get(r)


_STRICT = {
    "BEFORE": rel("<"), "AFTER": rel(">"),
    "IBEFORE": rel("m"), "IAFTER": rel("mi"),
    "BEGINS": rel("s"), "BEGUN_BY": rel("si"),
    "DURING": rel("d"), "DURING_INV": rel("di"),
    "IS_INCLUDED": rel("d"), "INCLUDES": rel("di"),
    "ENDS": rel("f"), "ENDED_BY": rel("fi"),
    "SIMULTANEOUS": rel("="), "IDENTITY": rel("="),
}

# IS_INCLUDED/INCLUDES listed before DURING so unmap of {d} yields IS_INCLUDED
_PREFERENCE = ("SIMULTANEOUS", "IS_INCLUDED", "INCLUDES")

STRICT = MappingProfile("strict", _STRICT, _PREFERENCE)
RELAXED = MappingProfile(
    "relaxed",
    {**_STRICT, "BEFORE": rel("<", "m"), "AFTER": rel(">", "mi")},
    _PREFERENCE,
)
OVERLAP_DURING = MappingProfile(
    "overlap-during",
    {**_STRICT, "DURING": rel("o"), "DURING_INV": rel("oi")},
    _PREFERENCE,
)

PROFILES = {p.name: p for p in (STRICT, RELAXED, OVERLAP_DURING)}
DEFAULT_PROFILE_ORDER = (STRICT, RELAXED)


def map_tlink(label: str, profile: MappingProfile = STRICT) -> int:
    return profile.map(label)


def unmap(r: int, profile: MappingProfile = STRICT) -> str | None:
    return profile.unmap(r)


def load_profile(text: str) -> MappingProfile:
    """Read a profile from ``key = value`` lines.

    ``name`` names the profile, ``base`` names a built-in profile to start
    from, and every other key is a TLINK label whose value is a relation set
    such as ``{<, m}``. Lines starting with ``#`` are ignored.
    """
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    name = entries.pop("name", "custom")
    base = PROFILES[entries.pop("base", "strict")]
    forward = dict(base.forward)
    for key, value in entries.items():
        if key not in TLINK_LABELS:
            raise ValueError(f"unknown TLINK label {key!r} in profile")
        forward[key] = parse_rel(value)
    return MappingProfile(name, forward, base.preference)


def union(rs: Iterable[int]) -> int:
    out = 0
    for r in rs:
        out |= r
    return out
