import itertools
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperskip.evaluate import (
    DEFAULT_FRACTIONS,
    EvalReport,
    EvalRow,
    fit_logreg,
    macro_f1,
    make_splits,
    run_protocol,
    standard_error,
)
from hyperskip.graphio import build_graph, read_graph

DATA = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="module")
def karate():
    return read_graph(DATA / "karate.edgelist", labels=DATA / "karate.labels")


def labeled(labels):
    n = len(labels)
    names = [f"v{i}" for i in range(n)]
    k = max(labels) + 1
    return build_graph(names, [(i, i + 1) for i in range(n - 1)], list(labels), [f"c{c}" for c in range(k)])


def test_half_split_karate(karate):
    (sp,) = make_splits(karate, [0.5], repetitions=1)
    assert len(sp.train) == 17 and len(sp.test) == 17


def test_default_grid_split_count(karate):
    splits = make_splits(karate, DEFAULT_FRACTIONS, 10, seed=0)
    assert len(splits) == 90
    for sp in splits:
        assert set(sp.train).isdisjoint(sp.test)
        assert set(sp.train) | set(sp.test) == set(range(34))
        train_labels = {karate.labels[v] for v in sp.train}
        assert train_labels == {0, 1}


def test_splits_deterministic(karate):
    assert make_splits(karate, [0.3, 0.6], 5, seed=2) == make_splits(karate, [0.3, 0.6], 5, seed=2)
    a = make_splits(karate, [0.3], 5, seed=2)
    b = make_splits(karate, [0.3], 5, seed=3)
    assert [s.train for s in a] != [s.train for s in b]
    # a split depends only on (seed, fraction, repetition), not on the rest of the grid
    assert make_splits(karate, [0.6], 5, seed=2) == make_splits(karate, [0.3, 0.6], 5, seed=2)[5:]


def test_stratified_counts(karate):
    for sp in make_splits(karate, [0.1, 0.6, 0.9], 3):
        counts = np.bincount(np.asarray(karate.labels)[list(sp.train)], minlength=2)
        for c, n_c in enumerate((16, 18)):
            want = min(max(math.floor(sp.labeled_fraction * n_c + 0.5), 1), n_c - 1)
            assert counts[c] == want


def test_tiny_class_gets_seeded(caplog):
    g = labeled([0] * 30 + [1] * 3)
    with caplog.at_level("WARNING"):
        (sp,) = make_splits(g, [0.1], 1)
    assert sp.seeded_classes == (1,)
    assert sum(1 for v in sp.train if g.labels[v] == 1) == 1
    assert "seeded" in caplog.text


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(0, 3), min_size=4, max_size=40),
    st.floats(0.05, 0.95),
    st.integers(0, 100),
)
def test_splits_partition(labels, fraction, seed):
    g = labeled(labels)
    for sp in make_splits(g, [fraction], 2, seed):
        assert set(sp.train).isdisjoint(sp.test)
        assert sorted(sp.train + sp.test) == list(range(len(labels)))
        assert {g.labels[v] for v in sp.train} == set(labels)


def test_split_rejects_bad_fraction(karate):
    with pytest.raises(ValueError):
        make_splits(karate, [1.0], 1)


def test_logreg_separable():
    x = np.array([[-1.0, 0.0]] * 5 + [[1.0, 0.0]] * 5)
    y = np.array([0] * 5 + [1] * 5)
    clf = fit_logreg(x, y)
    assert np.array_equal(clf.predict(x), y)


def test_logreg_strong_penalty_predicts_majority():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(40, 3))
    y = np.array([0] * 25 + [1] * 15)
    clf = fit_logreg(x, y, l2=1e8)
    assert np.abs(clf.weights).max() < 1e-6
    assert np.all(clf.predict(x) == 0)


def test_logreg_single_class():
    x = np.arange(6.0).reshape(3, 2)
    clf = fit_logreg(x, [2, 2, 2])
    assert list(clf.predict(x)) == [2, 2, 2]


def test_logreg_matches_independent_optimizer():
    optimize = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(42)
    n, d, k = 50, 4, 3
    y = rng.integers(0, k, n)
    x = rng.normal(size=(n, d)) + 0.8 * np.eye(k, d)[y]
    l2 = 1e-2
    clf = fit_logreg(x, y, l2=l2)
    z = (x - x.mean(0)) / x.std(0)
    onehot = np.eye(k)[y]

    def objective(p):
        w = p[: d * k].reshape(d, k)
        b = p[d * k :]
        logits = z @ w + b
        lse = np.log(np.sum(np.exp(logits), axis=1))
        f = np.mean(lse - np.sum(onehot * logits, axis=1)) + 0.5 * l2 * np.sum(w**2)
        prob = np.exp(logits - lse[:, None])
        g_w = z.T @ (prob - onehot) / n + l2 * w
        g_b = (prob - onehot).mean(0)
        return f, np.concatenate([g_w.ravel(), g_b])

    ref = optimize.minimize(objective, np.zeros(d * k + k), jac=True, method="BFGS", options={"gtol": 1e-10})
    assert clf.grad_norm <= 1e-6
    assert clf.objective == pytest.approx(ref.fun, abs=1e-6)
    # weights are identifiable up to a shared shift of the bias, not of W
    np.testing.assert_allclose(clf.weights, ref.x[: d * k].reshape(d, k), atol=1e-4)
    assert np.array_equal(clf.predict(x), np.argmax(z @ ref.x[: d * k].reshape(d, k) + ref.x[d * k :], 1))


def test_logreg_deterministic():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(30, 2))
    y = rng.integers(0, 2, 30)
    a, b = fit_logreg(x, y), fit_logreg(x, y)
    assert np.array_equal(a.weights, b.weights) and np.array_equal(a.bias, b.bias)


def test_macro_f1_examples():
    assert macro_f1([0, 1, 1, 0], [0, 1, 1, 0]) == 1.0
    assert macro_f1(["a"] * 4, ["a", "a", "b", "b"]) == pytest.approx(1 / 3, abs=1e-15)
    assert macro_f1([0, 0], [0, 0], classes=[0, 1]) == 0.5
    with pytest.raises(ValueError):
        macro_f1([], [])


def brute_macro_f1(pred, truth, k):
    cm = np.zeros((k, k), dtype=np.int64)
    for p, t in zip(pred, truth):
        cm[t, p] += 1
    scores = []
    for c in range(k):
        tp = cm[c, c]
        prec = tp / cm[:, c].sum() if cm[:, c].sum() else 0.0
        rec = tp / cm[c, :].sum() if cm[c, :].sum() else 0.0
        scores.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    return float(np.mean(scores))


def test_macro_f1_brute_force():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        k = int(rng.integers(2, 6))
        n = int(rng.integers(1, 40))
        pred, truth = rng.integers(0, k, n), rng.integers(0, k, n)
        got = macro_f1(pred, truth, classes=range(k))
        assert got == pytest.approx(brute_macro_f1(pred, truth, k), abs=1e-12)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=30), st.permutations(range(4)))
def test_macro_f1_relabeling_invariant(pairs, perm):
    pred, truth = map(np.array, zip(*pairs))
    perm = np.array(perm)
    assert macro_f1(perm[pred], perm[truth]) == pytest.approx(macro_f1(pred, truth), abs=1e-15)
    assert 0.0 <= macro_f1(pred, truth) <= 1.0


def test_standard_error():
    assert standard_error([1.0, 2.0, 3.0, 4.0]) == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert standard_error([0.7]) == 0.0


def test_protocol_bookkeeping(karate):
    rng = np.random.default_rng(0)
    feats = rng.normal(size=(34, 2))
    report = run_protocol({"m": feats}, karate, DEFAULT_FRACTIONS, 10, seed=0)
    assert len(report.rows) == 9
    for r in report.rows:
        assert r.reps == 10 and len(r.scores) == 10
        assert 0.0 <= r.mean_macro_f1 <= 1.0 and r.stderr >= 0
        assert r.mean_macro_f1 == pytest.approx(np.mean(r.scores))


def test_protocol_paired(karate):
    rng = np.random.default_rng(1)
    feats = rng.normal(size=(34, 3))
    report = run_protocol({"a": feats, "b": feats.copy()}, karate, [0.2, 0.6], 5, seed=3)
    for f in (0.2, 0.6):
        ra, rb = report.row("a", f), report.row("b", f)
        assert ra.scores == rb.scores and ra.stderr == rb.stderr


def test_protocol_null_model():
    rng = np.random.default_rng(123)
    labels = rng.integers(0, 2, 200)
    g = labeled(list(labels))
    feats = rng.normal(size=(200, 4))
    row = run_protocol({"null": feats}, g, [0.5], 10, seed=0).rows[0]
    assert abs(row.mean_macro_f1 - 0.5) < 0.1


def test_protocol_rejects_short_features(karate):
    with pytest.raises(ValueError, match="every vertex"):
        run_protocol({"m": np.zeros((33, 2))}, karate, [0.5], 1)


def test_report_serialization():
    rep = EvalReport([EvalRow("hyperbolic-2d", 0.6, 0.875, 0.0125, 10, [0.875] * 10)], seed=0)
    assert rep.to_csv() == "model,fraction,mean_macro_f1,stderr,reps\nhyperbolic-2d,0.6,0.875,0.0125,10\n"
    assert '"mean_macro_f1": 0.875' in rep.to_json()
    assert "hyperbolic-2d" in rep.table()
    with pytest.raises(KeyError):
        rep.row("hyperbolic-2d", 0.5)
