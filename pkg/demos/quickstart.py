"""Train on a synthetic corpus, annotate held-out documents, and score them."""
from catena.evaluate import score_corpus
from catena.pipeline import PipelineConfig, annotate_with_report, train_pipeline
from catena.synth import synthetic_corpus

train_docs = synthetic_corpus(20, seed=1)
test_docs = synthetic_corpus(5, seed=2)

bundle = train_pipeline(train_docs, seed=0)
for kind, (enc, model) in sorted(bundle.models.items()):
    print(f"{kind:6s} {enc.dim:4d} features  labels={model.labels}")

cfg = PipelineConfig(reasoning="on-demand", threshold=100)
outputs = []
for adoc in test_docs:
    doc, report = annotate_with_report(adoc, bundle, cfg)
    outputs.append(doc)
    print(f"\n{doc.doc_id}: {doc.text}")
    print(f"  consistent={report.consistent} reasoned={report.reasoned} counts={report.counts}")
    for c in doc.clinks:
        print(f"  CLINK {c.source} -> {c.target} ({c.provenance}, confidence={c.confidence})")

gold = [a.doc for a in test_docs]
for metric in ("awareness", "clink", "dense"):
    r = score_corpus(outputs, gold, metric)
    print(f"{metric:9s} P={r.precision:.3f} R={r.recall:.3f} F1={r.f1:.3f}")
