"""Consistency checking, deduction and the deduction-size estimate on one small document."""
from catena.allen import DEFAULT_PROFILE_ORDER, fmt
from catena.reasoner import (
    check_document, deduce, graph_from_document, path_consistency, predict_deducible, smcc,
)
from catena.synth import DocBuilder


def meeting(first_link):
    b = DocBuilder("meeting").sentence("""
        Albright albright NNP 2 SBJ
        announced announce VBD 0 ROOT M E:ei45:OCCURRENCE:PAST
        during during IN 2 TMP
        meeting meeting NN 3 PMOD E:ei116:OCCURRENCE
    """).sentence("""
        She she PRP 2 SBJ
        pledged pledge VBD 0 ROOT M E:ei46:I_ACTION:PAST
        to to TO 2 OPRD
        ask ask VB 3 IM E:ei47:I_ACTION:INFINITIVE
    """)
    b.tlink("ei116", first_link, "ei45").tlink("ei116", "INCLUDES", "ei46")
    b.tlink("ei45", "BEFORE", "ei46").tlink("ei46", "BEFORE", "ei47")
    return b.build().doc


bad = meeting("IS_INCLUDED")
res = check_document(bad, DEFAULT_PROFILE_ORDER)
print("consistent:", res.consistent, "culprit:", res.culprit)

good = meeting("INCLUDES")
res = check_document(good, DEFAULT_PROFILE_ORDER)
print("consistent:", res.consistent, "profile:", res.profile_used.name)
for t in deduce(good, res.profile_used):
    print(f"  deduced {t.source} {t.rel_type} {t.target}")

closure = path_consistency(graph_from_document(good)).closure
for a, b in closure.order:
    print(f"  {a:6s} {b:6s} {fmt(closure.get(a, b))}")

g = graph_from_document(good)
n_links = len(good.tlinks)
print("estimate for this document:", predict_deducible(n_links, len(good.events), smcc(g)))
print("estimate for (15, 10, 10):", predict_deducible(15, 10, 10))
