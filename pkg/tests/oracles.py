"""Independent brute-force oracles used to freeze and check expected values."""
from __future__ import annotations

import itertools

BASE = ["<", ">", "m", "mi", "o", "oi", "s", "si", "d", "di", "f", "fi", "="]


def classify(x: tuple[int, int], y: tuple[int, int]) -> str:
    """Allen relation of interval x to interval y from raw endpoint comparisons."""
    xs, xe = x
    ys, ye = y
    if xe < ys:
        return "<"
    if ye < xs:
        return ">"
    if xe == ys:
        return "m"
    if ye == xs:
        return "mi"
    if xs == ys and xe == ye:
        return "="
    if xs == ys:
        return "s" if xe < ye else "si"
    if xe == ye:
        return "f" if xs > ys else "fi"
    if ys < xs and xe < ye:
        return "d"
    if xs < ys and ye < xe:
        return "di"
    if xs < ys < xe < ye:
        return "o"
    return "oi"


def _intervals(n_points: int):
    return [(a, b) for a in range(n_points) for b in range(n_points) if a < b]


def composition_by_enumeration() -> dict[tuple[str, str], frozenset[str]]:
    """Compose base relations by enumerating every placement of three intervals.

    Six endpoints take at most six distinct ordinal values, so integer
    coordinates in range(6) realise every weak ordering.
    """
    table: dict[tuple[str, str], set[str]] = {
        (a, b): set() for a in BASE for b in BASE
    }
    ivs = _intervals(6)
    for x, y, z in itertools.product(ivs, repeat=3):
        table[(classify(x, y), classify(y, z))].add(classify(x, z))
    return {k: frozenset(v) for k, v in table.items()}


def naive_path_consistency(nodes, edges, compose, converse, full):
    """Sweep every triangle until nothing changes. Returns dict or None."""
    rel = {}
    for i in nodes:
        for j in nodes:
            rel[(i, j)] = full
    for i in nodes:
        rel[(i, i)] = 1 << BASE.index("=")
    for (i, j), r in edges.items():
        rel[(i, j)] &= r
        rel[(j, i)] &= converse(r)
    changed = True
    while changed:
        changed = False
        for i in nodes:
            for j in nodes:
                for k in nodes:
                    new = rel[(i, j)] & compose(rel[(i, k)], rel[(k, j)])
                    if new != rel[(i, j)]:
                        rel[(i, j)] = new
                        changed = True
                        if new == 0:
                            return None
    return rel
