"""Documents whose TLINKs are read off randomly placed intervals, so they are consistent."""
from hypothesis import assume, strategies as st

from catena.allen import INDEX, STRICT, TLINK_LABELS
from catena.synth import DocBuilder

from oracles import classify


def _label_for(base: str) -> str | None:
    # the first label whose strict reading admits the true relation
    for lab in TLINK_LABELS:
        if STRICT.map(lab) & (1 << INDEX[base]):
            return lab
    return None


def interval_doc(points, links, doc_id="g"):
    rows = "\n".join(f"w{i} w NN 0 ROOT E:ei{i + 1}:OCCURRENCE" for i in range(len(points)))
    b = DocBuilder(doc_id).sentence(rows)
    for i, j in links:
        lab = _label_for(classify(points[i], points[j]))
        if lab is not None:
            b.tlink(f"ei{i + 1}", lab, f"ei{j + 1}")
    return b.build().doc


@st.composite
def consistent_docs(draw, max_events=6):
    n = draw(st.integers(2, max_events))
    points = []
    for _ in range(n):
        a = draw(st.integers(0, 8))
        points.append((a, a + draw(st.integers(1, 4))))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    links = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=len(pairs), unique=True))
    doc = interval_doc(points, links)
    assume(doc.tlinks)
    return doc
