import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catena.errors import DegenerateTrainingError, EmptyTrainingError, ModelFormatError, ShapeError
from catena.linear import (
    FeatureVector, Hyperparams, LinearModel, load_model, model_to_dict, predict, save_model, train,
)


def fv(*idx, dim=6):
    return FeatureVector(tuple(idx), dim)


# three classes, each owning one feature; features 3-5 are noise
SEPARABLE = [
    (fv(0, 3), "A"), (fv(0, 4), "A"), (fv(0), "A"),
    (fv(1, 3), "B"), (fv(1, 5), "B"), (fv(1), "B"),
    (fv(2, 4), "C"), (fv(2, 5), "C"), (fv(2, 3), "C"),
]


def primal(w, b, X, y, C):
    margins = np.maximum(0.0, 1.0 - y * (X @ w + b))
    return 0.5 * (w @ w + b * b) + C * (margins ** 2).sum()


def test_separable_training_accuracy():
    m = train(SEPARABLE)
    assert all(predict(m, x).label == lab for x, lab in SEPARABLE)


def test_solution_certified_by_duality_gap():
    # the dual objective is minus the dual function, so primal + logged value -> 0
    m = train(SEPARABLE, Hyperparams(tol=1e-8))
    X = np.array([x.dense() for x, _ in SEPARABLE])
    for k, lab in enumerate(m.labels):
        y = np.array([1.0 if l == lab else -1.0 for _, l in SEPARABLE])
        p = primal(m.weights[k], m.bias[k], X, y, 1.0)
        assert p + m.history[lab][-1] == pytest.approx(0.0, abs=1e-6)


def test_objective_never_increases():
    rng = np.random.default_rng(0)
    data = [(fv(*sorted(rng.choice(6, size=3, replace=False).tolist())), str(rng.integers(3)))
            for _ in range(40)]
    m = train(data, Hyperparams(tol=1e-6))
    for log in m.history.values():
        assert all(b <= a + 1e-12 for a, b in zip(log, log[1:]))


def test_deterministic_bytes(tmp_path):
    save_model(train(SEPARABLE, seed=7), tmp_path / "a.json")
    save_model(train(SEPARABLE, seed=7), tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_round_trip(tmp_path):
    m = train(SEPARABLE)
    save_model(m, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert model_to_dict(back) == model_to_dict(m)
    assert np.array_equal(back.weights, m.weights)


def test_corrupted_header(tmp_path):
    d = model_to_dict(train(SEPARABLE))
    d["format"] = "something-else"
    (tmp_path / "m.json").write_text(json.dumps(d))
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / "m.json")
    d["format"], d["version"] = "catena-linear", 99
    (tmp_path / "m.json").write_text(json.dumps(d))
    with pytest.raises(ModelFormatError, match="version"):
        load_model(tmp_path / "m.json")
    (tmp_path / "m.json").write_text("{not json")
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / "m.json")


def test_zero_model_picks_first_label():
    m = LinearModel(("A", "B", "C"), np.zeros((3, 4)), np.zeros(3))
    p = predict(m, fv(1, dim=4))
    assert (p.label, p.confidence) == ("A", 0.0)


def test_errors():
    with pytest.raises(EmptyTrainingError):
        train([])
    with pytest.raises(DegenerateTrainingError):
        train([(fv(0), "A"), (fv(1), "A")])
    with pytest.raises(ShapeError):
        predict(train(SEPARABLE), fv(0, dim=7))
    with pytest.raises(ShapeError):
        fv(3, 1)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100.0), st.floats(-5.0, 5.0), st.lists(st.integers(0, 5), unique=True))
def test_argmax_and_margin_under_affine_scores(scale, shift, idx):
    m = train(SEPARABLE)
    x = fv(*sorted(idx))
    base = predict(m, x)
    scaled = LinearModel(m.labels, m.weights * scale, m.bias * scale)
    assert predict(scaled, x).label == base.label
    # shifting every score by the same constant leaves the margin alone
    shifted = LinearModel(m.labels, m.weights, m.bias + shift)
    assert predict(shifted, x).label == base.label
    assert predict(shifted, x).confidence == pytest.approx(base.confidence, abs=1e-9)
