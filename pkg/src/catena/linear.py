"""One-vs-rest L2-regularized L2-loss linear SVM trained in the dual.

Each binary problem is solved by dual coordinate descent with a bias
feature appended to every instance. Inputs are sparse binary vectors given
as sorted index arrays, so a dot product is a gather-and-sum.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateTrainingError, EmptyTrainingError, ModelFormatError, ShapeError

FORMAT = "catena-linear"
VERSION = 1


@dataclass(frozen=True)
class FeatureVector:
    """Sparse binary vector: sorted unique active indices below ``dim``."""

    indices: tuple[int, ...]
    dim: int

    def __post_init__(self):
        idx = self.indices
        if any(b <= a for a, b in zip(idx, idx[1:])) or (idx and (idx[0] < 0 or idx[-1] >= self.dim)):
            raise ShapeError(f"indices must be sorted, unique and below {self.dim}")

    def dense(self) -> np.ndarray:
        v = np.zeros(self.dim)
        v[list(self.indices)] = 1.0
        return v


@dataclass(frozen=True)
class Hyperparams:
    C: float = 1.0
    tol: float = 1e-4
    max_epochs: int = 1000


@dataclass(eq=False)
class LinearModel:
    labels: tuple[str, ...]
    weights: np.ndarray  # (n_labels, dim)
    bias: np.ndarray  # (n_labels,)
    hp: Hyperparams = field(default_factory=Hyperparams)
    seed: int = 0
    # dual objective after every epoch, one list per label; not persisted
    history: dict[str, list[float]] = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


class Prediction(NamedTuple):
    label: str
    scores: dict[str, float]
    confidence: float


def _binary_dual_cd(rows, y, dim, hp, rng):
    """Solve one binary problem; returns (w, b, objective per epoch)."""
    n = len(rows)
    diag = 1.0 / (2.0 * hp.C)
    # +1 for the bias feature
    qbar = np.array([len(r) + 1.0 + diag for r in rows])
    alpha = np.zeros(n)
    w = np.zeros(dim)
    b = 0.0
    log = []
    for _ in range(hp.max_epochs):
        pg_max, pg_min = -np.inf, np.inf
        for i in rng.permutation(n):
            r = rows[i]
            g = y[i] * (w[r].sum() + b) - 1.0 + diag * alpha[i]
            pg = g if alpha[i] > 0 else min(g, 0.0)
            pg_max, pg_min = max(pg_max, pg), min(pg_min, pg)
            if abs(pg) > 1e-12:
                old = alpha[i]
                alpha[i] = max(old - g / qbar[i], 0.0)
                step = (alpha[i] - old) * y[i]
                w[r] += step
                b += step
        log.append(0.5 * (w @ w + b * b) + 0.5 * diag * (alpha @ alpha) - alpha.sum())
        if pg_max - pg_min <= hp.tol:
            break
    return w, b, log


def train(data: Sequence[tuple[FeatureVector, str]], hp: Hyperparams | None = None,
          seed: int = 0) -> LinearModel:
    """Fit one binary SVM per label (that label vs. the rest)."""
    hp = hp or Hyperparams()
    if not data:
        raise EmptyTrainingError("no training instances")
    labels = tuple(sorted({lab for _, lab in data}))
    if len(labels) < 2:
        raise DegenerateTrainingError(f"need at least two labels, got {list(labels)}")
    dim = data[0][0].dim
    if any(x.dim != dim for x, _ in data):
        raise ShapeError("training vectors disagree on dimensionality")
    rows = [np.array(x.indices, dtype=np.intp) for x, _ in data]
    gold = np.array([lab for _, lab in data])
    weights = np.zeros((len(labels), dim))
    bias = np.zeros(len(labels))
    history = {}
    for k, lab in enumerate(labels):
        y = np.where(gold == lab, 1.0, -1.0)
        rng = np.random.default_rng([seed, k])
        weights[k], bias[k], history[lab] = _binary_dual_cd(rows, y, dim, hp, rng)
    return LinearModel(labels, weights, bias, hp, seed, history)


def scores(m: LinearModel, x: FeatureVector) -> np.ndarray:
    if x.dim != m.dim:
        raise ShapeError(f"vector has dimension {x.dim}, model expects {m.dim}")
    return m.weights[:, list(x.indices)].sum(axis=1) + m.bias


def predict(m: LinearModel, x: FeatureVector) -> Prediction:
    """Argmax label (ties go to the earlier label) and top-minus-runner-up margin."""
    s = scores(m, x)
    top = int(np.argmax(s))
    rest = np.delete(s, top)
    return Prediction(m.labels[top], dict(zip(m.labels, s.tolist())), float(s[top] - rest.max()))


# -- persistence ---------------------------------------------------------------


def model_to_dict(m: LinearModel) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "labels": list(m.labels),
        "dim": m.dim,
        "hyperparams": {"C": m.hp.C, "tol": m.hp.tol, "max_epochs": m.hp.max_epochs},
        "seed": m.seed,
        "weights": m.weights.tolist(),
        "bias": m.bias.tolist(),
    }


def model_from_dict(d: dict) -> LinearModel:
    if not isinstance(d, dict) or d.get("format") != FORMAT:
        raise ModelFormatError("not a linear model file")
    if d.get("version") != VERSION:
        raise ModelFormatError(f"unsupported model version {d.get('version')!r}, expected {VERSION}")
    try:
        w = np.array(d["weights"], dtype=float).reshape(len(d["labels"]), d["dim"])
        return LinearModel(tuple(d["labels"]), w, np.array(d["bias"], dtype=float),
                           Hyperparams(**d["hyperparams"]), int(d["seed"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model: {exc}") from exc


def save_model(m: LinearModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(m), fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> LinearModel:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not JSON ({exc})") from exc
    return model_from_dict(d)
