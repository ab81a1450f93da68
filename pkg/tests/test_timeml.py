from pathlib import Path

import pytest

from catena.errors import DanglingReferenceError, InvariantError, TimeMLParseError
from catena.timeml import CLink, TLink, fresh_id, parse_timeml, read_timeml, serialize_timeml

FIXTURE = Path(__file__).parent / "fixtures" / "wsj_0679.tml"

MINIMAL = """<TimeML>
<DOCID>d1</DOCID>
<DCT><TIMEX3 tid="t0" type="DATE" value="2000-01-01" functionInDocument="CREATION_TIME">2000-01-01</TIMEX3></DCT>
<TEXT>He <EVENT eid="e1" class="OCCURRENCE">left</EVENT> and <EVENT eid="e2" class="OCCURRENCE">came</EVENT>.</TEXT>
<MAKEINSTANCE eventID="e1" eiid="ei1" tense="PAST" aspect="NONE" polarity="POS" pos="VERB"/>
<MAKEINSTANCE eventID="e2" eiid="ei2" tense="PAST" aspect="NONE" polarity="POS" pos="VERB"/>
{links}
</TimeML>
"""


def test_fixture_entities():
    doc = read_timeml(FIXTURE)
    assert doc.doc_id == "wsj_0679"
    assert doc.dct.value == "1989-10-30"
    assert [e.eiid for e in doc.events] == ["ei24", "ei26", "ei27", "ei28", "ei29"]
    assert doc.text[slice(*doc.event("ei24").span)] == "acquired"
    assert doc.text[slice(*doc.timex("t25").span)] == "Aug. 10, 1988"
    assert doc.timex("t31").value == "P18M"
    assert doc.csignals[0].cid == "cs32"


def test_fixture_links():
    doc = read_timeml(FIXTURE)
    assert {(t.lid, t.source, t.rel_type, t.target) for t in doc.tlinks} == {
        ("l21", "t31", "AFTER", "t25"),
        ("l22", "ei29", "DURING", "t31"),
        ("l23", "ei24", "AFTER", "ei26"),
    }
    (c,) = doc.clinks
    assert (c.source, c.target, c.csignal_id) == ("ei26", "ei24", "cs32")


def test_round_trip():
    doc = read_timeml(FIXTURE)
    again = parse_timeml(serialize_timeml(doc))
    assert again == doc
    assert serialize_timeml(again) == serialize_timeml(doc)


def test_provenance_survives_round_trip():
    doc = parse_timeml(MINIMAL.format(links=""))
    doc = doc.with_links(
        [TLink("l1", "ei1", "ei2", "BEFORE", provenance="reasoner-deduced"),
         TLink("l2", "ei1", "t0", "BEFORE", provenance="rule", replaced="AFTER")],
        [CLink("c1", "ei1", "ei2", provenance="classifier", confidence=2.5)],
    )
    back = parse_timeml(serialize_timeml(doc))
    assert back.tlinks[0].deduced
    assert back.tlinks[1].provenance == "rule" and back.tlinks[1].replaced == "AFTER"
    assert back.clinks[0].confidence == 2.5


def test_malformed_xml_reports_offset():
    with pytest.raises(TimeMLParseError) as info:
        parse_timeml("<TimeML><TEXT>oops</TimeML>")
    assert info.value.offset is not None


def test_dangling_link():
    with pytest.raises(DanglingReferenceError):
        parse_timeml(MINIMAL.format(
            links='<TLINK lid="l1" relType="BEFORE" eventInstanceID="ei1" relatedToEventInstance="ei9"/>'))


def test_bad_label():
    with pytest.raises(InvariantError):
        parse_timeml(MINIMAL.format(
            links='<TLINK lid="l1" relType="SOONISH" eventInstanceID="ei1" relatedToEventInstance="ei2"/>'))


def test_duplicate_ids():
    with pytest.raises(InvariantError):
        parse_timeml(MINIMAL.format(
            links='<TLINK lid="l1" relType="BEFORE" eventInstanceID="ei1" relatedToEventInstance="ei2"/>'
                  '<TLINK lid="l1" relType="AFTER" eventInstanceID="ei2" relatedToEventInstance="ei1"/>'))


def test_clink_attribute_variants():
    doc = parse_timeml(MINIMAL.format(
        links='<CLINK lid="c1" eventInstanceID="ei1" relatedToEventInstance="ei2"/>'))
    assert (doc.clinks[0].source, doc.clinks[0].target) == ("ei1", "ei2")


def test_fresh_id():
    ids = fresh_id("l", ["l1", "l3"])
    assert [next(ids) for _ in range(3)] == ["l2", "l4", "l5"]
