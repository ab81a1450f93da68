"""Copy a confident CLINK onto coreferent event pairs in sibling documents."""
from catena.causal import propagate_clinks
from catena.synth import DocBuilder

source = DocBuilder("i").sentence("""
    violence violence NN 2 SBJ E:ei1:OCCURRENCE
    could can MD 0 ROOT M
    undermine undermine VB 2 VC
    the the DT 5 NMOD
    fight fight NN 3 OBJ E:ei2:OCCURRENCE
""").clink("ei1", "ei2", provenance="classifier", confidence=2.3).build()

sibling = DocBuilder("ii").sentence("""
    violence violence NN 2 SBJ E:ei3:OCCURRENCE
    could can MD 0 ROOT M
    hamper hamper VB 2 VC
    efforts effort NNS 3 OBJ
    to to TO 4 NMOD
    tackle tackle VB 5 IM E:ei4:OCCURRENCE
    militants militant NNS 6 OBJ
""").build()

coref = [{("i", "ei1"), ("ii", "ei3")}, {("i", "ei2"), ("ii", "ei4")}]
for threshold in (1.75, 2.5):
    new = propagate_clinks([source, sibling], coref, threshold)
    print(f"threshold {threshold}:", {d: [(c.source, c.target) for c in links] for d, links in new.items()})
