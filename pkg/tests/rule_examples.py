"""Worked rule examples shared by the rule, causal and acceptance tests.

Each entry is ``(name, compute, expected)``; ``compute()`` runs the rule on
a small hand-parsed document and returns its label.
"""
from catena.annotation import EntityPair
from catena.causal import causal_verb_rule, post_edit_tlinks
from catena.rules import ed_rule, ee_rule, et_rule
from catena.synth import DocBuilder
from catena.timeml import CLink, TLink, Timex
from catena.timex import tt_rule


def _single(block, **kw):
    return DocBuilder("ex", **kw).sentence(block).build()


def _ed(tense, aspect):
    a = _single(f"""
        They they PRP 2 SBJ
        left leave VBD 0 ROOT M E:ei1:OCCURRENCE:{tense}:{aspect}
    """)
    return ed_rule(a.doc.event("ei1"), a.doc.dct)


def _et(block, e, t):
    a = _single(block)
    return et_rule(EntityPair("ET", e, t, True), a)


def _ee(a, e1, e2, same=True):
    return ee_rule(EntityPair("EE", e1, e2, same), a)


def arrived_on_tuesday():
    return _et("""
        She she PRP 2 SBJ
        arrived arrive VBD 0 ROOT M E:ei1:OCCURRENCE:PAST
        on on IN 2 TMP
        Tuesday tuesday NNP 3 PMOD T:t1:DATE:1999-03-02
    """, "ei1", "t1")


def stayed_until_friday():
    return _et("""
        He he PRP 2 SBJ
        stayed stay VBD 0 ROOT M E:ei1:OCCURRENCE:PAST
        until until IN 2 TMP
        Friday friday NNP 3 PMOD T:t1:DATE:1999-03-05
    """, "ei1", "t1")


def worked_from_to():
    return _et("""
        She she PRP 2 SBJ
        worked work VBD 0 ROOT M E:ei1:OCCURRENCE:PAST
        from from IN 2 TMP
        1990 1990 CD 3 PMOD T:t1:DATE:1990
        to to IN 2 TMP
        1995 1995 CD 5 PMOD T:t2:DATE:1995
    """, "ei1", "t1")


def touched_off_by():
    a = _single("""
        The the DT 2 NMOD
        rally rally NN 3 SBJ
        was be VBD 0 ROOT M
        touched touch VBN 3 VC E:ei1:OCCURRENCE:PAST
        off off RP 4 PRT
        by by IN 4 LGS
        the the DT 8 NMOD
        collapse collapse NN 6 PMOD E:ei2:OCCURRENCE
    """)
    return _ee(a, "ei1", "ei2")


def began_to_relax():
    a = _single("""
        The the DT 2 NMOD
        situation situation NN 3 SBJ
        began begin VBD 0 ROOT M E:ei1:ASPECTUAL:PAST
        to to TO 3 OPRD
        relax relax VB 4 IM E:ei2:OCCURRENCE:INFINITIVE
    """)
    return _ee(a, "ei1", "ei2")


def coreferent_mentions():
    a = (DocBuilder("ex", coref=[{"ei1", "ei2"}])
         .sentence("""
            Rebels rebel NNS 2 SBJ
            attacked attack VBD 0 ROOT M E:ei1:OCCURRENCE:PAST
            the the DT 4 NMOD
            town town NN 2 OBJ
         """)
         .sentence("""
            The the DT 2 NMOD
            attack attack NN 3 SBJ E:ei2:OCCURRENCE
            lasted last VBD 0 ROOT M E:ei3:OCCURRENCE:PAST
         """).build())
    return _ee(a, "ei1", "ei2", same=False)


def evening_within_day():
    t1 = Timex("t1", None, "TIME", "2015-12-12T19:00")
    t2 = Timex("t2", None, "DATE", "2015-12-12")
    return tt_rule(t1, t2)


def blast_caused_heel():
    a = _single("""
        The the DT 2 NMOD
        blast blast NN 3 SBJ E:ei1:OCCURRENCE
        caused cause VBD 0 ROOT M
        the the DT 5 NMOD
        boat boat NN 3 OBJ
        to to TO 3 OPRD
        heel heel VB 6 IM E:ei2:OCCURRENCE:INFINITIVE
    """)
    return causal_verb_rule(EntityPair("EE", "ei1", "ei2", True), a)


def triggered_by_the_end():
    a = _single("""
        with with IN 0 ROOT
        the the DT 3 NMOD
        crisis crisis NN 1 PMOD E:ei1:OCCURRENCE
        triggered trigger VBN 3 APPO
        by by IN 4 LGS
        the the DT 7 NMOD
        end end NN 5 PMOD E:ei2:OCCURRENCE
        of of IN 7 NMOD
        talks talk NNS 8 PMOD
    """)
    return causal_verb_rule(EntityPair("EE", "ei1", "ei2", True), a)


def make_with_object():
    a = _single("""
        The the DT 2 NMOD
        storms storm NNS 3 SBJ E:ei1:OCCURRENCE
        made make VBD 0 ROOT M
        damage damage NN 3 OBJ E:ei2:OCCURRENCE
    """)
    return causal_verb_rule(EntityPair("EE", "ei1", "ei2", True), a)


def _post_edit(clink, tlink_label):
    edited = post_edit_tlinks([TLink("l1", "ei1", "ei2", tlink_label, provenance="classifier")], [clink])
    return edited[0].rel_type


def post_edit_clink():
    return _post_edit(CLink("l2", "ei1", "ei2"), "AFTER")


def post_edit_clink_r():
    # CLINK-R(ei1, ei2): ei2 is the cause
    return _post_edit(CLink("l2", "ei2", "ei1"), "BEFORE")


EXAMPLES = [
    ("ed past perfective", lambda: _ed("PAST", "PERFECTIVE"), "BEFORE"),
    ("ed future", lambda: _ed("FUTURE", "NONE"), "AFTER"),
    ("et arrived on Tuesday", arrived_on_tuesday, "IS_INCLUDED"),
    ("et stayed until Friday", stayed_until_friday, "ENDED_BY"),
    ("et from T1 to T2", worked_from_to, "BEGUN_BY"),
    ("ee touched off by", touched_off_by, "AFTER"),
    ("ee began to relax", began_to_relax, "BEGINS"),
    ("ee coreference", coreferent_mentions, "SIMULTANEOUS"),
    ("tt evening within day", evening_within_day, "IS_INCLUDED"),
    ("causal blast caused heel", blast_caused_heel, "CLINK"),
    ("causal triggered by", triggered_by_the_end, "CLINK-R"),
    ("causal make with object", make_with_object, None),
    ("post-edit clink", post_edit_clink, "BEFORE"),
    ("post-edit clink-r", post_edit_clink_r, "AFTER"),
]
