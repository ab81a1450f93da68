"""The full sieve: rules, reasoner, classifiers, causal extraction, post-editing.

A corpus on disk is a directory of ``NAME.tml`` files, each with a token
sidecar ``NAME.ann``; an optional ``similarity.tsv`` applies to every
document. A model bundle is a directory holding ``manifest.json`` and one
JSON file per model.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .allen import INVERSE_LABEL, PROFILES
from .annotation import (
    AnnotatedDocument, EntityPair, attach_annotations, candidate_pairs, read_sidecar,
    read_similarity, write_sidecar,
)
from .causal import (
    NO_REL, as_clink, causal_verb_rule, classify_clink, clink_candidate_filter, clink_features,
    pair_label, post_edit_tlinks, self_train,
)
from .errors import CatenaError, DegenerateTrainingError, EmptyTrainingError, ModelFormatError
from .features import FeatureEncoders, featurize, fit_encoders, simplify_labels
from .lexicons import Lexicons, load_lexicons
from .linear import LinearModel, model_from_dict, model_to_dict, predict, train
from .reasoner import (
    DEFAULT_COEFFS, check_document, deduce, graph_from_document, predict_deducible, smcc,
)
from .rules import apply_rule_sieve, ed_rule
from .timeml import CLink, Document, TLink, fresh_id, read_timeml, serialize_timeml, taken_ids
from .timex import tt_rule

REASONING_MODES = ("always", "never", "on-demand")
TLINK_SOURCES = ("gold", "sieve", "none")
TEMPORAL_KINDS = ("ED", "ET", "EE")
BUNDLE_FORMAT = "catena-bundle"
BUNDLE_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    profiles: tuple[str, ...] = ("strict", "relaxed")
    reasoning: str = "on-demand"
    threshold: float = 100.0
    coeffs: tuple[float, ...] = tuple(DEFAULT_COEFFS)
    clink_threshold: float = 1.75
    simplify_labels: bool = True
    emit_tt: bool = False
    emit_deduced: bool = True
    dense: bool = False
    self_train_iterations: int = 1
    clink_tlink_source: str = "sieve"

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        unknown = [p for p in self.profiles if p not in PROFILES]
        if unknown or not self.profiles:
            raise CatenaError(f"config: unknown mapping profile(s) {unknown or 'none given'}")
        if self.reasoning not in REASONING_MODES:
            raise CatenaError(f"config: reasoning must be one of {REASONING_MODES}, got {self.reasoning!r}")
        if not self.threshold >= 0:
            raise CatenaError(f"config: threshold must be >= 0, got {self.threshold}")
        if len(self.coeffs) != 4 or not all(math.isfinite(c) for c in self.coeffs):
            raise CatenaError(f"config: coeffs must be four finite numbers, got {self.coeffs}")
        if self.clink_tlink_source not in TLINK_SOURCES:
            raise CatenaError(f"config: clink_tlink_source must be one of {TLINK_SOURCES}")
        if self.self_train_iterations < 0:
            raise CatenaError("config: self_train_iterations must be >= 0")

    @property
    def mapping_profiles(self):
        return [PROFILES[p] for p in self.profiles]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CatenaError(f"config: not JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise CatenaError("config: expected a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = sorted(set(data) - known)
        if extra:
            raise CatenaError(f"config: unknown key(s) {extra}")
        return cls(**data)


# -- corpus I/O ----------------------------------------------------------------


def read_corpus(directory, need_layer: bool = True) -> list:
    """Documents in ``directory`` sorted by file name.

    Returns :class:`AnnotatedDocument` objects when sidecars are present (and
    required when ``need_layer``), plain :class:`Document` objects otherwise.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise CatenaError(f"{directory}: not a directory")
    sim_path = directory / "similarity.tsv"
    similarity = read_similarity(sim_path.read_text(encoding="utf-8")) if sim_path.exists() else None
    out = []
    for path in sorted(directory.glob("*.tml")):
        doc = read_timeml(path)
        side = path.with_suffix(".ann")
        if side.exists():
            layer = read_sidecar(side.read_text(encoding="utf-8"))
            try:
                out.append(attach_annotations(doc, layer, similarity))
            except CatenaError as exc:
                raise type(exc)(f"{side}: {exc}") from None
        elif need_layer:
            raise CatenaError(f"{path}: missing token sidecar {side.name}")
        else:
            out.append(doc)
    return out


def write_corpus(docs: Sequence, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for item in docs:
        doc = item.doc if isinstance(item, AnnotatedDocument) else item
        (directory / f"{doc.doc_id}.tml").write_text(serialize_timeml(doc), encoding="utf-8")
        if isinstance(item, AnnotatedDocument):
            (directory / f"{doc.doc_id}.ann").write_text(write_sidecar(item.layer), encoding="utf-8")


# -- model bundle --------------------------------------------------------------


@dataclass
class Bundle:
    """Encoder and model per pair kind ("ED", "ET", "EE", "CLINK")."""

    models: dict[str, tuple[FeatureEncoders, LinearModel]] = field(default_factory=dict)
    seed: int = 0
    simplified: bool = True

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        files = {}
        for kind, (enc, model) in sorted(self.models.items()):
            name = f"{kind.lower()}.json"
            payload = {"encoder": enc.to_dict(), "model": model_to_dict(model)}
            (directory / name).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")
            files[kind] = name
        manifest = {"format": BUNDLE_FORMAT, "version": BUNDLE_VERSION, "seed": self.seed,
                    "simplified_labels": self.simplified, "models": files}
        (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                                 encoding="utf-8")

    @classmethod
    def load(cls, directory) -> "Bundle":
        directory = Path(directory)
        try:
            manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ModelFormatError(f"{directory}: no manifest.json") from None
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{directory}/manifest.json: not JSON ({exc})") from None
        if manifest.get("format") != BUNDLE_FORMAT or manifest.get("version") != BUNDLE_VERSION:
            raise ModelFormatError(f"{directory}/manifest.json: unsupported bundle header")
        models = {}
        for kind, name in manifest["models"].items():
            try:
                payload = json.loads((directory / name).read_text(encoding="utf-8"))
                models[kind] = (FeatureEncoders.from_dict(payload["encoder"]),
                                model_from_dict(payload["model"]))
            except (OSError, KeyError, json.JSONDecodeError, ModelFormatError) as exc:
                raise ModelFormatError(f"{directory / name}: {exc}") from None
        return cls(models, manifest.get("seed", 0), manifest.get("simplified_labels", True))


# -- shared helpers ------------------------------------------------------------


def _kind(adoc: AnnotatedDocument, a: str, b: str) -> str | None:
    ea, eb = adoc.is_event(a), adoc.is_event(b)
    if ea and eb:
        return "EE"
    if ea or eb:
        return "ED" if adoc.is_dct(b if ea else a) else "ET"
    return "TT"


def _oriented_pair(adoc: AnnotatedDocument, a: str, b: str) -> tuple[EntityPair, bool] | None:
    """Canonical pair for two linked entities and whether ``(a, b)`` was flipped."""
    kind = _kind(adoc, a, b)
    if kind == "TT":
        return None
    if kind in ("ED", "ET"):
        flip = not adoc.is_event(a)
    else:
        flip = adoc.head(a) > adoc.head(b)
    e1, e2 = (b, a) if flip else (a, b)
    same = adoc.is_dct(e2) is False and adoc.sentence_of(e1) == adoc.sentence_of(e2)
    return EntityPair(kind, e1, e2, same), flip


def _extras(pair: EntityPair, adoc: AnnotatedDocument) -> dict:
    doc = adoc.doc
    if pair.kind == "ET":
        label = tt_rule(doc.timex(pair.e2), doc.dct)
        return {"timex_dct": label} if label else {}
    if pair.kind == "EE":
        out = {}
        for key, e in (("e1_dct", pair.e1), ("e2_dct", pair.e2)):
            label = ed_rule(doc.event(e), doc.dct)
            if label:
                out[key] = label
        return out
    return {}


class _Labels:
    """Pair labels keyed by the unordered pair, read back in any orientation."""

    def __init__(self):
        self._by_key: dict[frozenset, tuple[str, str, str]] = {}

    def set(self, a: str, b: str, label: str) -> None:
        self._by_key[frozenset((a, b))] = (a, b, label)

    def get(self, a: str, b: str) -> str | None:
        hit = self._by_key.get(frozenset((a, b)))
        if hit is None:
            return None
        return hit[2] if hit[0] == a else INVERSE_LABEL[hit[2]]

    def copy(self) -> "_Labels":
        out = _Labels()
        out._by_key = dict(self._by_key)
        return out

    def __contains__(self, key) -> bool:
        return frozenset(key) in self._by_key


# -- annotation ----------------------------------------------------------------


@dataclass
class AnnotationReport:
    doc_id: str
    consistent: bool = True
    culprit: tuple | None = None
    profile: str | None = None
    reasoned: bool = False
    predicted_deducible: float | None = None
    counts: dict = field(default_factory=dict)


def _should_reason(cfg: PipelineConfig, doc: Document, profile) -> tuple[bool, float | None]:
    if cfg.reasoning == "never":
        return False, None
    g = graph_from_document(doc, profile)
    n_tlinks = sum(1 for t in doc.tlinks if t.rel_type != "VAGUE")
    pred = predict_deducible(n_tlinks, len(doc.events), smcc(g), cfg.coeffs)
    if cfg.reasoning == "always":
        return True, pred
    return pred < cfg.threshold, pred


def _sieve(adoc: AnnotatedDocument, pairs, cfg: PipelineConfig, lex: Lexicons, ids, report=None):
    """Rule sieve, then the reasoner once on its output.

    Returns the pair labels, their provenance and the rule links. Deduced
    labels are kept only for candidate pairs.
    """
    labels = _Labels()
    provenance: dict[frozenset, str] = {}
    rule_links = []
    for p, lab in apply_rule_sieve(adoc, pairs, lex).items():
        labels.set(p.e1, p.e2, lab)
        provenance[frozenset((p.e1, p.e2))] = "rule"
        rule_links.append(TLink(next(ids), p.e1, p.e2, lab, provenance="rule"))

    ruled = adoc.doc.with_links(rule_links, ())
    check = check_document(ruled, cfg.mapping_profiles)
    report = report or AnnotationReport(adoc.doc_id)
    report.consistent, report.culprit = check.consistent, check.culprit
    if check.consistent:
        report.profile = check.profile_used.name
        run, report.predicted_deducible = _should_reason(cfg, ruled, check.profile_used)
        if run:
            report.reasoned = True
            wanted = {frozenset((p.e1, p.e2)) for p in pairs}
            for t in deduce(ruled, check.profile_used):
                key = frozenset((t.source, t.target))
                if key in wanted:
                    labels.set(t.source, t.target, t.rel_type)
                    provenance[key] = "reasoner-deduced"
    return labels, provenance, rule_links


def sieve_labels(adoc: AnnotatedDocument, cfg: PipelineConfig | None = None, lex: Lexicons | None = None):
    """Rule and reasoner labels for a document's entities, ignoring its own links.

    Returns a mapping ``(e1, e2) -> label`` readable in either orientation.
    """
    cfg = cfg or PipelineConfig()
    base = AnnotatedDocument(adoc.doc.with_links((), ()), adoc.layer)
    labels, _, _ = _sieve(base, candidate_pairs(base, "temporal"), cfg, lex or load_lexicons(),
                          fresh_id("l", taken_ids(base.doc)))
    return labels


def annotate_with_report(adoc: AnnotatedDocument, bundle: Bundle, cfg: PipelineConfig | None = None,
                         lex: Lexicons | None = None) -> tuple[Document, AnnotationReport]:
    """Annotate one document from its entities; existing links are replaced."""
    cfg = cfg or PipelineConfig()
    lex = lex or load_lexicons()
    base = adoc.doc.with_links((), ())
    adoc = AnnotatedDocument(base, adoc.layer)
    report = AnnotationReport(base.doc_id)
    ids = fresh_id("l", taken_ids(base))

    pairs = candidate_pairs(adoc, "temporal")
    labels, provenance, rule_links = _sieve(adoc, pairs, cfg, lex, ids, report)

    # the causal classifier sees rule and reasoner labels only
    sieve_labels = labels.copy()

    # 3. classifiers on what is still unlabelled
    for p in pairs:
        if (p.e1, p.e2) in labels or p.kind not in bundle.models:
            continue
        enc, model = bundle.models[p.kind]
        pred = predict(model, featurize(p, adoc, enc, _extras(p, adoc), lex))
        labels.set(p.e1, p.e2, pred.label)
        provenance[frozenset((p.e1, p.e2))] = "classifier"

    tlinks = []
    for p in pairs:
        prov = provenance.get(frozenset((p.e1, p.e2)))
        if prov is None or (p.kind == "TT" and not cfg.emit_tt):
            continue
        if prov == "reasoner-deduced" and not cfg.emit_deduced:
            continue
        tlinks.append(TLink(next(ids), p.e1, p.e2, labels.get(p.e1, p.e2), provenance=prov))

    # 4. causal verb rules, then the filtered classifier
    clinks = []
    for p in candidate_pairs(adoc, "causal"):
        label = causal_verb_rule(p, adoc, lex)
        if label:
            clinks.append(as_clink(p, label, next(ids), provenance="rule"))
            continue
        if "CLINK" not in bundle.models or not clink_candidate_filter(p, adoc, lex):
            continue
        enc, model = bundle.models["CLINK"]
        pred = classify_clink(model, p, adoc, enc, sieve_labels.get(p.e1, p.e2), lex)
        if pred.label != NO_REL:
            clinks.append(as_clink(p, pred.label, next(ids), provenance="classifier",
                                   confidence=round(pred.confidence, 6)))

    # 5. causes precede effects
    tlinks = post_edit_tlinks(tlinks, clinks, taken_ids(base) | {t.lid for t in rule_links})
    out = base.with_links(tlinks, clinks)
    if cfg.dense:
        out = to_dense(out)
    report.counts = {"tlinks": len(out.tlinks), "clinks": len(out.clinks),
                     "rule": sum(t.provenance == "rule" for t in out.tlinks),
                     "deduced": sum(t.deduced for t in out.tlinks)}
    return out, report


def annotate(adoc: AnnotatedDocument, bundle: Bundle, cfg: PipelineConfig | None = None,
             lex: Lexicons | None = None) -> Document:
    return annotate_with_report(adoc, bundle, cfg, lex)[0]


def _annotate_job(args):
    adoc, bundle, cfg, lexicon_dir = args
    return annotate_with_report(adoc, bundle, cfg, load_lexicons(lexicon_dir))


def annotate_corpus(docs: Sequence[AnnotatedDocument], bundle: Bundle, cfg: PipelineConfig | None = None,
                    jobs: int = 1, lexicon_dir: str | None = None) -> list[tuple[Document, AnnotationReport]]:
    """Annotate documents independently; results keep input order for any ``jobs``."""
    cfg = cfg or PipelineConfig()
    work = [(a, bundle, cfg, lexicon_dir) for a in docs]
    if jobs <= 1 or len(work) <= 1:
        return [_annotate_job(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_annotate_job, work))


# -- TimeBank-Dense compatibility ----------------------------------------------

DENSE_MAP = {
    "IBEFORE": "BEFORE", "BEGINS": "BEFORE", "ENDED_BY": "BEFORE",
    "IAFTER": "AFTER", "BEGUN_BY": "AFTER", "ENDS": "AFTER",
    "IDENTITY": "SIMULTANEOUS", "DURING": "SIMULTANEOUS", "DURING_INV": "SIMULTANEOUS",
}
REF_VALUES = ("PAST_REF", "PRESENT_REF", "FUTURE_REF")


def dense_label(label: str) -> str:
    return DENSE_MAP.get(label, label)


def to_dense(doc: Document) -> Document:
    """Collapse labels onto the dense label set and apply the two VAGUE rules."""
    out = []
    for t in doc.tlinks:
        label = dense_label(t.rel_type)
        ends = (t.source, t.target)
        events = [e for e in ends if doc.is_event(e)]
        others = [e for e in ends if not doc.is_event(e)]
        if len(events) == 1:
            tx = doc.timex(others[0])
            if tx.is_dct and doc.event(events[0]).pos == "ADJECTIVE":
                label = "VAGUE"
            elif not tx.is_dct and tx.value in REF_VALUES:
                label = "VAGUE"
        out.append(TLink(t.lid, t.source, t.target, label, t.signal_id, t.provenance, t.replaced, t.extra))
    return doc.with_links(out, doc.clinks)


# -- training --------------------------------------------------------------------


@dataclass
class TrainingReport:
    documents: int = 0
    discarded: list[str] = field(default_factory=list)
    deduced_documents: list[str] = field(default_factory=list)
    added_tlinks: int = 0
    predictions: dict[str, float] = field(default_factory=dict)

    def lines(self) -> list[str]:
        return [
            f"documents\t{self.documents}",
            f"discarded\t{len(self.discarded)}\t{' '.join(self.discarded)}",
            f"deduced_documents\t{len(self.deduced_documents)}\t{' '.join(self.deduced_documents)}",
            f"added_tlinks\t{self.added_tlinks}",
        ]


def prepare_training(corpus: Sequence, cfg: PipelineConfig | None = None):
    """Drop inconsistent documents and add deduced TLINKs where deduction is cheap.

    Accepts :class:`Document` or :class:`AnnotatedDocument` items and returns
    ``(kept items, TrainingReport)``.
    """
    cfg = cfg or PipelineConfig()
    report = TrainingReport(documents=len(corpus))
    kept = []
    for item in corpus:
        doc = item.doc if isinstance(item, AnnotatedDocument) else item
        check = check_document(doc, cfg.mapping_profiles)
        if not check.consistent:
            report.discarded.append(doc.doc_id)
            continue
        run, pred = _should_reason(cfg, doc, check.profile_used)
        if pred is not None:
            report.predictions[doc.doc_id] = pred
        if run:
            extra = deduce(doc, check.profile_used)
            if extra:
                report.deduced_documents.append(doc.doc_id)
                report.added_tlinks += len(extra)
                doc = doc.with_links(doc.tlinks + tuple(extra), doc.clinks)
        kept.append(AnnotatedDocument(doc, item.layer) if isinstance(item, AnnotatedDocument) else doc)
    return kept, report


def temporal_instances(corpus: Sequence[AnnotatedDocument], simplify: bool = True):
    """``(kind, pair, adoc, extras, label)`` for every gold non-VAGUE TLINK."""
    out = []
    for adoc in corpus:
        seen = set()
        for t in adoc.doc.tlinks:
            if t.rel_type == "VAGUE" or t.source == t.target:
                continue
            oriented = _oriented_pair(adoc, t.source, t.target)
            if oriented is None:
                continue
            pair, flipped = oriented
            if (pair.e1, pair.e2) in seen:
                continue
            seen.add((pair.e1, pair.e2))
            label = INVERSE_LABEL[t.rel_type] if flipped else t.rel_type
            if simplify:
                label = simplify_labels(label)
            out.append((pair.kind, pair, adoc, _extras(pair, adoc), label))
    return out


def _gold_ee_label(adoc: AnnotatedDocument, pair: EntityPair) -> str | None:
    labels = _Labels()
    for t in adoc.doc.tlinks:
        if t.rel_type != "VAGUE":
            labels.set(t.source, t.target, t.rel_type)
    return labels.get(pair.e1, pair.e2)


def causal_instances(corpus: Sequence[AnnotatedDocument], lex: Lexicons | None = None,
                     tlink_source: str = "gold", cfg: PipelineConfig | None = None):
    """``(pair, adoc, tlink_label, label)`` over filtered candidates plus gold causal pairs.

    ``tlink_source`` picks the E-E label fed to the TLINK feature: the gold
    TLINKs, the rule sieve plus reasoner (what annotation sees), or nothing.
    """
    if tlink_source not in TLINK_SOURCES:
        raise CatenaError(f"tlink_source must be one of {TLINK_SOURCES}, got {tlink_source!r}")
    lex = lex or load_lexicons()
    out = []
    for adoc in corpus:
        sieve = sieve_labels(adoc, cfg, lex) if tlink_source == "sieve" else None
        for p in candidate_pairs(adoc, "causal"):
            label = next((pair_label(c, p.e1, p.e2) for c in adoc.doc.clinks
                          if pair_label(c, p.e1, p.e2)), None)
            if label is None and not clink_candidate_filter(p, adoc, lex):
                continue
            if tlink_source == "gold":
                tl = _gold_ee_label(adoc, p)
            else:
                tl = sieve.get(p.e1, p.e2) if sieve else None
            out.append((p, adoc, tl, label or NO_REL))
    return out


def _fit(kind: str, items, seed: int, causal: bool, lex):
    labels = {lab for *_, lab in items}
    if not items:
        raise EmptyTrainingError(f"{kind} model: no training instances")
    if len(labels) < 2:
        raise DegenerateTrainingError(f"{kind} model: need two labels, got {sorted(labels)}")
    if causal:
        enc = fit_encoders([(p, a, {"tlink": tl} if tl else None) for p, a, tl, _ in items], True, lex)
        data = [(clink_features(p, a, enc, tl, lex), lab) for p, a, tl, lab in items]
    else:
        enc = fit_encoders([(p, a, ex) for _, p, a, ex, _ in items], False, lex)
        data = [(featurize(p, a, enc, ex, lex), lab) for _, p, a, ex, lab in items]
    return enc, data


def train_pipeline(corpus: Sequence[AnnotatedDocument], cfg: PipelineConfig | None = None, seed: int = 0,
                   kinds: Sequence[str] = ("ED", "ET", "EE", "CLINK"),
                   unlabeled: Sequence[AnnotatedDocument] = (), lex: Lexicons | None = None) -> Bundle:
    """Fit encoders and one linear model per requested pair kind."""
    cfg = cfg or PipelineConfig()
    lex = lex or load_lexicons()
    bundle = Bundle(seed=seed, simplified=cfg.simplify_labels)
    temporal = temporal_instances(corpus, cfg.simplify_labels)
    for kind in kinds:
        if kind == "CLINK":
            continue
        items = [x for x in temporal if x[0] == kind]
        enc, data = _fit(kind, items, seed, False, lex)
        bundle.models[kind] = (enc, train(data, seed=seed))
    if "CLINK" in kinds:
        items = causal_instances(corpus, lex, cfg.clink_tlink_source, cfg)
        enc, data = _fit("CLINK", items, seed, True, lex)
        model = train(data, seed=seed)
        unl_tlinks = {}
        if unlabeled and cfg.clink_tlink_source == "sieve":
            for a in unlabeled:
                lab = sieve_labels(a, cfg, lex)
                for p in candidate_pairs(a, "causal"):
                    if lab.get(p.e1, p.e2):
                        unl_tlinks[(a.doc_id, p.e1, p.e2)] = lab.get(p.e1, p.e2)
        for _ in range(cfg.self_train_iterations if unlabeled else 0):
            extra = self_train(model, unlabeled, enc, cfg.clink_threshold, lex, unl_tlinks)
            if not extra:
                break
            model = train(data + extra, seed=seed)
        bundle.models["CLINK"] = (enc, model)
    return bundle
