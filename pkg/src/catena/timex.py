"""Normalized TIMEX3 values and the timex-timex rule.

Values are parsed into :class:`IsoValue`. Calendar points can be turned into
half-open minute intervals (:func:`interval_of`), which is all the
timex-timex rule needs.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date
from typing import NamedTuple

from .errors import NotAnchorableError, ValueFormatError

REF_TOKENS = ("PAST_REF", "PRESENT_REF", "FUTURE_REF")
PARTS_OF_DAY = {"MO": (6, 12), "MI": (12, 13), "AF": (12, 18), "EV": (18, 24), "NI": (20, 24)}

_CAL = re.compile(
    r"^(?P<year>\d{4}|\d{3}|\d{2})"
    r"(?:-(?:(?P<month>\d{2})(?:-(?P<day>\d{2}))?"
    r"|W(?P<week>\d{2})"
    r"|(?P<part>[QH]\d)))?"
    r"(?:T(?:(?P<hour>\d{2}):(?P<minute>\d{2})(?::(?P<second>\d{2}))?"
    r"|(?P<pod>MO|MI|AF|EV|NI)))?$"
)
_DUR = re.compile(
    r"^P(?:(?P<date>(?:(?:\d+(?:\.\d+)?|X)(?:Y|M|W|D|DE|CE|ML))+))?"
    r"(?:T(?P<time>(?:(?:\d+(?:\.\d+)?|X)[HMS])+))?$"
)
_DUR_ITEM = re.compile(r"(\d+(?:\.\d+)?|X)(DE|CE|ML|[YMWDHS])")


@dataclass(frozen=True)
class IsoValue:
    """A parsed TIMEX3 value.

    ``kind`` is ``"point"``, ``"duration"`` or ``"ref"``. For points, the
    year field is always set; a 3-digit year is a decade (``198`` = the
    1980s) and a 2-digit year a century. ``part`` holds a quarter/half
    (``Q3``, ``H1``) and ``pod`` a part of day. Duration ``amounts`` are
    ``(unit, amount)`` pairs, with time units prefixed ``T`` and ``None``
    as the amount for an unspecified ``X``.
    """

    kind: str
    year: int | None = None
    year_digits: int = 4
    month: int | None = None
    week: int | None = None
    day: int | None = None
    part: str | None = None
    hour: int | None = None
    minute: int | None = None
    second: int | None = None
    pod: str | None = None
    amounts: tuple = ()
    token: str | None = None

    @property
    def granularity(self) -> str:
        if self.kind != "point":
            return self.kind
        for name in ("second", "minute", "pod", "day", "week", "part", "month"):
            if getattr(self, name) is not None:
                return name
        return {4: "year", 3: "decade", 2: "century"}[self.year_digits]


class Interval(NamedTuple):
    """Half-open interval in minutes since 0001-01-01T00:00."""

    start: int
    end: int


def parse_value(s: str) -> IsoValue:
    if not s or not s.strip():
        raise ValueFormatError(s, "empty timex value")
    s = s.strip()
    if s in REF_TOKENS:
        return IsoValue("ref", token=s)
    if s.startswith("P"):
        return _parse_duration(s)
    m = _CAL.match(s)
    if not m:
        raise ValueFormatError(s, f"unrecognized timex value {s!r}")
    g = m.groupdict()
    digits = len(g["year"])
    if digits < 4 and any(g[k] for k in ("month", "week", "part", "hour", "pod")):
        raise ValueFormatError(s, f"decade/century value {s!r} cannot carry finer fields")
    as_int = lambda k: int(g[k]) if g[k] is not None else None  # noqa: E731
    v = IsoValue(
        "point", year=int(g["year"]), year_digits=digits, month=as_int("month"),
        week=as_int("week"), day=as_int("day"), part=g["part"], hour=as_int("hour"),
        minute=as_int("minute"), second=as_int("second"), pod=g["pod"],
    )
    _check_ranges(v, s)
    return v


def _check_ranges(v: IsoValue, raw: str) -> None:
    try:
        if v.year_digits == 4 and v.year < 1:
            raise ValueError("year")
        if v.day is not None:
            date(v.year, v.month, v.day)
        elif v.month is not None and not 1 <= v.month <= 12:
            raise ValueError("month")
        if v.week is not None:
            date.fromisocalendar(v.year, v.week, 1)
        if v.part is not None and not 1 <= int(v.part[1]) <= (4 if v.part[0] == "Q" else 2):
            raise ValueError("part")
        if v.hour is not None and not (0 <= v.hour <= 23 and 0 <= v.minute <= 59):
            raise ValueError("time")
        if v.second is not None and not 0 <= v.second <= 59:
            raise ValueError("second")
        if (v.hour is not None or v.pod is not None) and v.day is None:
            raise ValueError("time of day needs a full date")
    except ValueError as exc:
        raise ValueFormatError(raw, f"out-of-range field in {raw!r}: {exc}") from None


def _parse_duration(s: str) -> IsoValue:
    m = _DUR.match(s)
    if not m or not (m["date"] or m["time"]):
        raise ValueFormatError(s, f"unrecognized duration {s!r}")
    amounts = []
    for prefix, chunk in (("", m["date"]), ("T", m["time"])):
        for amount, unit in _DUR_ITEM.findall(chunk or ""):
            if amount == "X":
                value = None
            else:
                value = float(amount) if "." in amount else int(amount)
                if value <= 0:
                    raise ValueFormatError(s, f"non-positive duration amount in {s!r}")
            amounts.append((prefix + unit, value))
    return IsoValue("duration", amounts=tuple(amounts))


def render(v: IsoValue) -> str:
    if v.kind == "ref":
        return v.token
    if v.kind == "duration":
        date_part = "".join(_amount(a) + u for u, a in v.amounts if not u.startswith("T"))
        time_part = "".join(_amount(a) + u[1:] for u, a in v.amounts if u.startswith("T"))
        return "P" + date_part + ("T" + time_part if time_part else "")
    out = f"{v.year:0{v.year_digits}d}"
    if v.month is not None:
        out += f"-{v.month:02d}"
        if v.day is not None:
            out += f"-{v.day:02d}"
    elif v.week is not None:
        out += f"-W{v.week:02d}"
    elif v.part is not None:
        out += "-" + v.part
    if v.hour is not None:
        out += f"T{v.hour:02d}:{v.minute:02d}"
        if v.second is not None:
            out += f":{v.second:02d}"
    elif v.pod is not None:
        out += "T" + v.pod
    return out


def _amount(a) -> str:
    return "X" if a is None else str(a)


def _day(y: int, m: int = 1, d: int = 1) -> int:
    # 10000-01-01 is the exclusive end of the 999x decade
    if (y, m, d) == (10000, 1, 1):
        return date(9999, 12, 31).toordinal() + 1
    return date(y, m, d).toordinal()


def _month_start(y: int, m: int) -> int:
    y, m = y + (m - 1) // 12, (m - 1) % 12 + 1
    return _day(y, m) * 1440


def interval_of(v: IsoValue) -> Interval:
    """Half-open minute interval covered by a calendar point."""
    if v.kind != "point":
        raise NotAnchorableError(f"{render(v)} is a {v.kind}, not a calendar point")
    if v.year_digits < 4:
        width = 10 ** (4 - v.year_digits)
        first = v.year * width
        return Interval(_day(max(first, 1)) * 1440, _day(first + width) * 1440)
    y = v.year
    if v.week is not None:
        start = date.fromisocalendar(y, v.week, 1).toordinal() * 1440
        return Interval(start, start + 7 * 1440)
    if v.part is not None:
        n = int(v.part[1])
        span = 3 if v.part[0] == "Q" else 6
        first = (n - 1) * span + 1
        return Interval(_month_start(y, first), _month_start(y, first + span))
    if v.month is None:
        return Interval(_day(y) * 1440, _day(y + 1) * 1440)
    if v.day is None:
        return Interval(_month_start(y, v.month), _month_start(y, v.month + 1))
    day0 = _day(y, v.month, v.day) * 1440
    if v.hour is not None:
        start = day0 + v.hour * 60 + v.minute
        return Interval(start, start + 1)
    if v.pod is not None:
        lo, hi = PARTS_OF_DAY[v.pod]
        return Interval(day0 + lo * 60, day0 + hi * 60)
    return Interval(day0, day0 + 1440)


def compare_intervals(a: Interval, b: Interval) -> str | None:
    if a.end <= b.start:
        return "BEFORE"
    if b.end <= a.start:
        return "AFTER"
    if a == b:
        return "SIMULTANEOUS"
    if b.start <= a.start and a.end <= b.end:
        return "IS_INCLUDED"
    if a.start <= b.start and b.end <= a.end:
        return "INCLUDES"
    return None


def tt_rule(t1, t2) -> str | None:
    """Label the pair of timexes from their values, or ``None``.

    Only DATE and TIME timexes take part. REF tokens, durations,
    unparseable values and partial overlaps give no label.
    """
    if t1.type not in ("DATE", "TIME") or t2.type not in ("DATE", "TIME"):
        return None
    try:
        v1, v2 = parse_value(t1.value), parse_value(t2.value)
        return compare_intervals(interval_of(v1), interval_of(v2))
    except (ValueFormatError, NotAnchorableError):
        return None
