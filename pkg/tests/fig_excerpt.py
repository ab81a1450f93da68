"""Hand-parsed excerpt with a causal signal, a date and two events."""
from catena.synth import DocBuilder

FIG = """
According accord VBG 7 ADV
to to TO 1 AMOD
the the DT 4 NMOD
filing filing NN 2 PMOD
, , , 7 P
Hewlett-Packard hewlett-packard NNP 7 SBJ
acquired acquire VBD 0 ROOT M E:ei24:OCCURRENCE:PAST
730,070 730,070 CD 10 NMOD
common common JJ 10 NMOD
shares share NNS 7 OBJ
from from IN 10 NMOD
Octel octel NNP 11 PMOD
as as IN 7 ADV
a a DT 15 NMOD
result result NN 13 PMOD
of of IN 15 NMOD
an an DT 25 NMOD
Aug. aug. NNP 25 TMP T:t25:DATE:1988-08-10
10 10 CD 18 NMOD T+
, , , 18 P T+
1988 1988 CD 18 NMOD T+
, , , 25 P
stock stock NN 25 NMOD
purchase purchase NN 25 NMOD
agreement agreement NN 16 PMOD E:ei26:I_ACTION
. . . 7 P
"""


def fig(gold=True):
    b = DocBuilder("fig", dct="1989-03-01").sentence(FIG)
    if gold:
        b.tlink("ei24", "BEFORE", "t0").tlink("ei26", "IS_INCLUDED", "t25").tlink("ei24", "AFTER", "ei26")
        b.clink("ei26", "ei24")
    return b.build()
