"""Command-line entry point: ``catena COMMAND [flags]``.

Exit status is 0 on success, 1 when a check or evaluation reports findings,
and 2 on usage, input-format or model-format errors.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from .allen import INVERSE_LABEL, PROFILES
from .annotation import AnnotatedDocument
from .errors import CatenaError
from .lexicons import ENV_VAR

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _threshold(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (x >= 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"threshold must be a finite number >= 0, got {text}")
    return x


def _coeffs(text: str) -> tuple[float, ...]:
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected four comma-separated numbers, got {text!r}") from None
    if len(parts) != 4 or not all(math.isfinite(p) for p in parts):
        raise argparse.ArgumentTypeError(f"expected four finite comma-separated numbers, got {text!r}")
    return parts


def _profile_list(text: str) -> tuple[str, ...]:
    names = tuple(p.strip() for p in text.split(",") if p.strip())
    bad = [n for n in names if n not in PROFILES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown profile(s) {bad or text!r}; choose from {sorted(PROFILES)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catena", description="Temporal and causal relation extraction.")
    p.add_argument("--lexicons", metavar="DIR", help=f"lexicon directory (default: ${ENV_VAR} or bundled)")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train the four classifiers on a gold corpus")
    t.add_argument("--corpus", required=True)
    t.add_argument("--out", required=True, help="bundle directory to write")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--config")
    t.add_argument("--simplify-labels", dest="simplify", action="store_true", default=None)
    t.add_argument("--no-simplify-labels", dest="simplify", action="store_false")
    t.add_argument("--unlabeled", help="corpus for one round of CLINK self-training")

    a = sub.add_parser("annotate", help="annotate a corpus with TLINKs and CLINKs")
    a.add_argument("--in", dest="inp", required=True)
    a.add_argument("--models", required=True)
    a.add_argument("--config")
    a.add_argument("--out", required=True)
    a.add_argument("--jobs", type=_positive_int, default=1)

    r = sub.add_parser("reason", help="check consistency of, or deduce links for, one TimeML file")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--profile", choices=sorted(PROFILES), default="strict")
    mode = r.add_mutually_exclusive_group(required=True)
    mode.add_argument("--check", action="store_true")
    mode.add_argument("--deduce", action="store_true")
    r.add_argument("--out", help="where to write the deduced document (default: stdout)")

    c = sub.add_parser("causal", help="extract CLINKs and optionally propagate them across a cluster")
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--models", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--coref", help="cross-document coreference file, one group per line of doc:eiid")
    c.add_argument("--threshold", type=float, default=1.75)

    e = sub.add_parser("evaluate", help="score system output against a reference corpus")
    e.add_argument("--sys", required=True)
    e.add_argument("--ref", required=True)
    e.add_argument("--metric", choices=("awareness", "clink", "dense"), default="awareness")
    e.add_argument("--profile", choices=sorted(PROFILES), default="strict")
    e.add_argument("--min-f1", type=float, help="exit 1 when F1 falls below this value")

    q = sub.add_parser("qa", help="answer temporal yes/no questions from document closures")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--questions", required=True)
    q.add_argument("--profile", choices=sorted(PROFILES), default="strict")

    f = sub.add_parser("folds", help="assign instances to stratified folds")
    f.add_argument("--labels", required=True, help="file with one label per line")
    f.add_argument("--k", type=_positive_int, default=10)
    f.add_argument("--seed", type=int, default=0)

    pt = sub.add_parser("prepare-training", help="drop inconsistent documents and add deduced links")
    pt.add_argument("--corpus", required=True)
    pt.add_argument("--threshold", type=_threshold, default=100.0)
    pt.add_argument("--coeffs", type=_coeffs)
    pt.add_argument("--profiles", type=_profile_list, default=("strict", "relaxed"))
    pt.add_argument("--out", help="write the prepared corpus here")
    return p


def _config(path, **overrides):
    from .pipeline import PipelineConfig

    cfg = PipelineConfig.from_json(Path(path).read_text(encoding="utf-8")) if path else PipelineConfig()
    changes = {k: v for k, v in overrides.items() if v is not None}
    if changes:
        from dataclasses import replace
        cfg = replace(cfg, **changes)
    return cfg


def _plain(items):
    return [x.doc if isinstance(x, AnnotatedDocument) else x for x in items]


def _need_dir(path: str, what: str) -> None:
    if not Path(path).is_dir():
        raise _Usage(f"{what} {path}: not a directory")


def _cmd_train(args) -> int:
    from .pipeline import read_corpus, train_pipeline

    _need_dir(args.corpus, "--corpus")
    cfg = _config(args.config, simplify_labels=args.simplify)
    corpus = read_corpus(args.corpus)
    unlabeled = read_corpus(args.unlabeled) if args.unlabeled else ()
    bundle = train_pipeline(corpus, cfg, args.seed, unlabeled=unlabeled, lex=_lex(args))
    bundle.save(args.out)
    for kind, (enc, model) in sorted(bundle.models.items()):
        print(f"{kind}\tfeatures {enc.dim}\tlabels {','.join(model.labels)}")
    return EXIT_OK


def _cmd_annotate(args) -> int:
    from .pipeline import Bundle, annotate_corpus, read_corpus, write_corpus

    _need_dir(args.inp, "--in")
    cfg = _config(args.config)
    bundle = Bundle.load(args.models)
    docs = read_corpus(args.inp)
    results = annotate_corpus(docs, bundle, cfg, args.jobs, args.lexicons)
    write_corpus([AnnotatedDocument(d, a.layer) for (d, _), a in zip(results, docs)], args.out)
    for doc, rep in results:
        state = "consistent" if rep.consistent else f"inconsistent {' '.join(map(str, rep.culprit or ()))}"
        print(f"{doc.doc_id}\ttlinks {rep.counts['tlinks']}\tclinks {rep.counts['clinks']}\t{state}")
    return EXIT_OK


def _cmd_reason(args) -> int:
    from .reasoner import check_document, deduce
    from .timeml import read_timeml, serialize_timeml

    doc = read_timeml(args.inp)
    profile = PROFILES[args.profile]
    check = check_document(doc, [profile])
    if not check.consistent:
        i, k, j = check.culprit
        print(f"inconsistent\t{args.inp}\t{i} {k} {j}")
        return EXIT_FINDINGS
    if args.check:
        print(f"consistent\t{args.inp}\t{profile.name}")
        return EXIT_OK
    extra = deduce(doc, profile)
    text = serialize_timeml(doc.with_links(doc.tlinks + tuple(extra), doc.clinks))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"deduced\t{len(extra)}\t{args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read_coref(path: str) -> list[list[tuple[str, str]]]:
    groups = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        group = []
        for item in line.split():
            doc_id, sep, eiid = item.rpartition(":")
            if not sep or not doc_id or not eiid:
                raise CatenaError(f"{path} line {n}: expected doc:eiid items, got {item!r}")
            group.append((doc_id, eiid))
        groups.append(group)
    return groups


def _cmd_causal(args) -> int:
    from .annotation import candidate_pairs
    from .causal import (
        NO_REL, as_clink, causal_verb_rule, classify_clink, clink_candidate_filter, post_edit_tlinks,
        propagate_clinks,
    )
    from .pipeline import Bundle, read_corpus, write_corpus
    from .timeml import fresh_id, taken_ids

    _need_dir(args.inp, "--in")
    bundle = Bundle.load(args.models)
    if "CLINK" not in bundle.models:
        raise CatenaError(f"{args.models}: bundle has no CLINK model")
    coref = _read_coref(args.coref) if args.coref else None
    lex = _lex(args)
    enc, model = bundle.models["CLINK"]
    docs = read_corpus(args.inp)
    out = []
    for adoc in docs:
        doc = adoc.doc
        ids = fresh_id("l", taken_ids(doc))
        known = {frozenset((c.source, c.target)) for c in doc.clinks}
        labels = {(t.source, t.target): t.rel_type for t in doc.tlinks}
        labels.update({(t.target, t.source): INVERSE_LABEL.get(t.rel_type, t.rel_type)
                       for t in doc.tlinks if (t.target, t.source) not in labels})
        new = []
        for p in candidate_pairs(adoc, "causal"):
            if frozenset((p.e1, p.e2)) in known:
                continue
            label = causal_verb_rule(p, adoc, lex)
            if label:
                new.append(as_clink(p, label, next(ids), provenance="rule"))
            elif clink_candidate_filter(p, adoc, lex):
                pred = classify_clink(model, p, adoc, enc, labels.get((p.e1, p.e2)), lex)
                if pred.label != NO_REL:
                    new.append(as_clink(p, pred.label, next(ids), provenance="classifier",
                                        confidence=round(pred.confidence, 6)))
        out.append(AnnotatedDocument(doc.with_links(None, doc.clinks + tuple(new)), adoc.layer))
    if coref:
        added = propagate_clinks(out, coref, args.threshold)
        out = [AnnotatedDocument(a.doc.with_links(None, a.doc.clinks + tuple(added.get(a.doc_id, ()))), a.layer)
               for a in out]
    final = []
    for a in out:
        tl = post_edit_tlinks(a.doc.tlinks, a.doc.clinks, taken_ids(a.doc))
        final.append(AnnotatedDocument(a.doc.with_links(tl, None), a.layer))
        print(f"{a.doc_id}\tclinks {len(a.doc.clinks)}")
    write_corpus(final, args.out)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    from .evaluate import score_corpus
    from .pipeline import read_corpus

    _need_dir(args.sys, "--sys")
    _need_dir(args.ref, "--ref")
    rep = score_corpus(_plain(read_corpus(args.sys, need_layer=False)),
                       _plain(read_corpus(args.ref, need_layer=False)), args.metric, PROFILES[args.profile])
    print(f"metric\t{args.metric}")
    print("\n".join(rep.lines()))
    for lab, sub in sorted(rep.per_label.items()):
        print(f"label\t{lab}\t{sub.precision:.4f}\t{sub.recall:.4f}\t{sub.f1:.4f}")
    if args.min_f1 is not None and rep.f1 < args.min_f1:
        return EXIT_FINDINGS
    return EXIT_OK


def _cmd_qa(args) -> int:
    from .evaluate import qa_evaluate, read_questions
    from .pipeline import read_corpus

    _need_dir(args.inp, "--in")
    questions = read_questions(Path(args.questions).read_text(encoding="utf-8"))
    rep = qa_evaluate(_plain(read_corpus(args.inp, need_layer=False)), questions, PROFILES[args.profile])
    print("\n".join(rep.lines()))
    return EXIT_FINDINGS if rep.errors else EXIT_OK


def _cmd_folds(args) -> int:
    from .evaluate import stratified_folds

    labels = [l.strip() for l in Path(args.labels).read_text(encoding="utf-8").splitlines() if l.strip()]
    folds = stratified_folds(labels, args.k, args.seed)
    where = {i: n for n, f in enumerate(folds) for i in f}
    for i in range(len(labels)):
        print(f"{i}\t{labels[i]}\t{where[i]}")
    return EXIT_OK


def _cmd_prepare(args) -> int:
    from .pipeline import PipelineConfig, prepare_training, read_corpus, write_corpus

    kw = {"threshold": args.threshold, "profiles": args.profiles}
    if args.coeffs:
        kw["coeffs"] = args.coeffs
    cfg = PipelineConfig(**kw)
    _need_dir(args.corpus, "--corpus")
    kept, rep = prepare_training(read_corpus(args.corpus, need_layer=False), cfg)
    print("\n".join(rep.lines()))
    if args.out:
        write_corpus(kept, args.out)
    return EXIT_OK


def _lex(args):
    from .lexicons import load_lexicons

    return load_lexicons(args.lexicons)


COMMANDS = {"train": _cmd_train, "annotate": _cmd_annotate, "reason": _cmd_reason, "causal": _cmd_causal,
            "evaluate": _cmd_evaluate, "qa": _cmd_qa, "folds": _cmd_folds, "prepare-training": _cmd_prepare}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.lexicons and not os.path.isdir(args.lexicons):
        print(f"catena: --lexicons {args.lexicons}: not a directory", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (_Usage, CatenaError, OSError, ValueError) as exc:
        print(f"catena {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
