import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import hinge_grad_case
from textvote.corpus import DataFormatError, Headline, Vocabulary
from textvote.bow_svm import (
    SparseVector,
    SvmConfig,
    SvmModel,
    decision_scores,
    featurize,
    hinge_objective,
    hinge_subgradient,
    load_svm,
    predict_svm,
    save_svm,
    train_binary,
    train_svm,
)
from textvote.synthetic import keyword_dataset

VOCAB = Vocabulary(["a", "b", "c"], [3, 2, 1])

# two clusters on either side of a line; x3 and x4 share no token with x1 and x2
FOUR_POINTS = [
    (("a",), 1.0),
    (("a", "b"), 1.0),
    (("c",), -1.0),
    (("b", "c"), -1.0),
]


def four_point_problem():
    X = [featurize(t, VOCAB) for t, _ in FOUR_POINTS]
    y = np.array([lab for _, lab in FOUR_POINTS])
    return X, y


def test_featurize_example():
    v = featurize(["a", "a", "b"], VOCAB)
    assert v.indices.tolist() == [0, 1] and v.values.tolist() == [1.0, 1.0]


def test_featurize_all_oov():
    assert len(featurize(["x", "y"], VOCAB)) == 0


def test_featurize_counts_option():
    v = featurize(["a", "a", "b"], VOCAB, binary=False)
    assert v.values.tolist() == [2.0, 1.0]


@given(st.lists(st.sampled_from(["a", "b", "c", "zz"]), max_size=10), st.randoms())
def test_featurize_order_and_multiplicity(tokens, rnd):
    shuffled = list(tokens)
    rnd.shuffle(shuffled)
    assert featurize(shuffled, VOCAB) == featurize(tokens, VOCAB)
    assert featurize(list(dict.fromkeys(tokens)), VOCAB) == featurize(tokens, VOCAB)


def test_sparse_vector_validation():
    with pytest.raises(ValueError):
        SparseVector([1, 0], [1.0, 1.0], 3)
    with pytest.raises(ValueError):
        SparseVector([0, 3], [1.0, 1.0], 3)
    with pytest.raises(ValueError):
        SparseVector([0], [0.0], 3)


def test_four_point_separable():
    X, y = four_point_problem()
    w, b = train_binary(X, y, VOCAB.n_tokens, SvmConfig())
    dense = np.stack([x.toarray() for x in X])
    assert np.all(np.sign(dense @ w + b) == y)


def test_objective_non_increasing_over_epochs():
    X, y = four_point_problem()
    dense = np.stack([x.toarray() for x in X])
    objs = []
    for e in range(1, 21):
        w, b = train_binary(X, y, VOCAB.n_tokens, SvmConfig(epochs=e))
        objs.append(hinge_objective(w, b, dense, y, 1.0))
    assert all(b <= a + 1e-12 for a, b in zip(objs, objs[1:])), objs


def test_satisfied_margin_has_zero_hinge_term():
    X = np.array([[2.0, 0.0]])
    y = np.array([1.0])
    w = np.array([1.0, 0.0])
    dw, db = hinge_subgradient(w, 0.0, X, y, 1.0)
    assert np.array_equal(dw, w) and db == 0.0  # only the regulariser remains


def test_subgradient_finite_differences():
    for seed in range(50):
        assert hinge_grad_case(seed) < 1e-6


def _train_data():
    return keyword_dataset(num_classes=3, n_train=150, n_dev=30, n_filler=30, seed=2)


def test_one_vs_rest_isolation():
    spec, train_set, _ = _train_data()
    vocab = Vocabulary(*zip(*sorted({t: 1 for h in train_set for t in h.tokens}.items())))
    cfg = SvmConfig(epochs=5)
    model = train_svm(train_set, vocab, cfg, 3)
    X = [featurize(h.tokens, vocab) for h in train_set]
    for k in range(3):
        y = np.array([1.0 if h.label == k else -1.0 for h in train_set])
        w, b = train_binary(X, y, vocab.n_tokens, cfg)
        assert np.array_equal(w, model.weights[k]) and b == model.bias[k]


def test_separable_accuracy_and_determinism():
    spec, train_set, dev_set = _train_data()
    vocab = Vocabulary(*zip(*sorted({t: 1 for h in train_set for t in h.tokens}.items())))
    a = train_svm(train_set, vocab, SvmConfig(), 3)
    b = train_svm(train_set, vocab, SvmConfig(), 3)
    assert np.array_equal(a.weights, b.weights) and np.array_equal(a.bias, b.bias)
    acc = np.mean([predict_svm(a, featurize(h.tokens, vocab))[0] == h.label for h in dev_set])
    assert acc >= 0.95


def test_missing_class_rejected():
    train_set = [Headline(0, ("a",)), Headline(2, ("b",))]
    with pytest.raises(ValueError, match="class 1"):
        train_svm(train_set, VOCAB, SvmConfig(), 3)


def test_zero_model_predicts_zero():
    model = SvmModel(np.zeros((3, 3)), np.zeros(3), SvmConfig(), VOCAB)
    label, conf = predict_svm(model, featurize(["a"], VOCAB))
    assert label == 0 and np.allclose(conf, 0.5)


def test_argmax_oracle():
    rng = np.random.default_rng(0)
    model = SvmModel(rng.normal(size=(3, 3)), rng.normal(size=3), SvmConfig(), VOCAB)
    for _ in range(100):
        toks = [t for t in ("a", "b", "c") if rng.random() < 0.5]
        x = featurize(toks, VOCAB)
        scores = [sum(model.weights[k][i] for i in x.indices) + model.bias[k] for k in range(3)]
        best = max(range(3), key=lambda k: (scores[k], -k))
        assert predict_svm(model, x)[0] == best


def test_dimension_mismatch():
    model = SvmModel(np.zeros((2, 3)), np.zeros(2), SvmConfig(), VOCAB)
    with pytest.raises(ValueError):
        decision_scores(model, SparseVector([0], [1.0], 5))


def test_svm_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    model = SvmModel(rng.normal(size=(3, 3)), rng.normal(size=3), SvmConfig(C=0.5), VOCAB, ("x", "y", "z"))
    p1, p2 = tmp_path / "a.svm", tmp_path / "b.svm"
    save_svm(model, p1)
    loaded = load_svm(p1)
    save_svm(loaded, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert loaded.config == model.config and loaded.class_names == ("x", "y", "z")
    assert np.abs(loaded.weights - model.weights).max() <= 1e-6


def test_svm_corrupt_field(tmp_path):
    p = tmp_path / "a.svm"
    save_svm(SvmModel(np.zeros((2, 3)), np.zeros(2), SvmConfig(), VOCAB), p)
    p.write_text(p.read_text(encoding="utf-8").replace("epochs 20", "epochs many"), encoding="utf-8")
    with pytest.raises(DataFormatError, match="epochs"):
        load_svm(p)
