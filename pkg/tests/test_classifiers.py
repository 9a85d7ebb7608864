import numpy as np
import pytest
from sklearn.base import clone

from coughdet.classifiers import (
    ElasticNetLogistic,
    ExternalScores,
    OneLayerMLP,
    RBFSVM,
    dual_objective,
    load_model,
    logistic_loss_grad,
    make_classifier,
    mlp_loss_grad,
    rbf_kernel,
    save_model,
    smo,
    train_lr,
    train_mlp,
    train_svm,
)
from coughdet.classifiers.mlp import init_params
from coughdet.evaluation import auc
from coughdet.exceptions import ConfigError, InputError, LoadError

from .oracles import central_difference, svm_dual_bruteforce


def rel_err(a, b):
    a, b = np.ravel(a), np.ravel(b)
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


def blobs(rng, n=60, d=3, sep=3.0):
    y = np.r_[np.zeros(n // 2, int), np.ones(n - n // 2, int)]
    X = rng.normal(size=(n, d)) + sep * y[:, None]
    return X, y


def xor(rng, n=200):
    X = rng.uniform(-1, 1, size=(n, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(int)
    return X, y


class TestGradients:
    @pytest.mark.parametrize("seed", range(20))
    def test_logistic(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(3, 15)), int(rng.integers(1, 6))
        Z, y = rng.normal(size=(n, d)), rng.integers(0, 2, size=n).astype(float)
        w, b = rng.normal(size=d), float(rng.normal())
        _, gw, gb = logistic_loss_grad(w, b, Z, y)
        fd = central_difference(lambda v: logistic_loss_grad(v[:-1], v[-1], Z, y)[0], np.r_[w, b])
        assert rel_err(np.r_[gw, gb], fd) < 1e-4

    @pytest.mark.parametrize("seed", range(20))
    def test_mlp(self, seed):
        rng = np.random.default_rng(100 + seed)
        n, d, h = int(rng.integers(3, 12)), int(rng.integers(1, 5)), int(rng.integers(1, 6))
        Z, y = rng.normal(size=(n, d)), rng.integers(0, 2, size=n).astype(float)
        params = init_params(d, h, rng)
        params["b1"] = rng.normal(size=h) * 0.1
        params["b2"] = float(rng.normal())
        l2 = float(rng.uniform(0, 1))
        _, grads = mlp_loss_grad(params, Z, y, l2)
        for key in ("W1", "b1", "w2", "b2"):
            def f(v, key=key):
                p = dict(params)
                p[key] = v if key != "b2" else float(v)
                return mlp_loss_grad(p, Z, y, l2)[0]
            fd = central_difference(f, np.asarray(params[key], dtype=float))
            assert rel_err(grads[key], fd) < 1e-4, key


class TestSVMDual:
    @pytest.mark.parametrize("seed", range(40))
    def test_smo_matches_bruteforce(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        X = rng.normal(size=(n, 2))
        y = rng.choice([-1.0, 1.0], size=n)
        y[0] = -y[1]
        C = float(10 ** rng.uniform(-2, 2))
        K = rbf_kernel(X, X, float(10 ** rng.uniform(-1, 1)))
        alpha, _, _ = smo(K, y, C)
        best, _ = svm_dual_bruteforce(K, y, C)
        assert abs(dual_objective(alpha, K, y) - best) < 1e-4
        assert abs(alpha @ y) < 1e-6
        assert np.all(alpha >= -1e-6) and np.all(alpha <= C + 1e-6)

    def test_kkt_on_larger_problem(self, rng):
        X, y = blobs(rng, n=120, sep=1.0)
        m = RBFSVM(reg_strength=10.0).fit(X, y)
        ys = 2.0 * y - 1
        assert abs(m.alpha_ @ ys) < 1e-6
        assert np.all(m.alpha_ >= 0) and np.all(m.alpha_ <= 10.0)


class TestEstimators:
    @pytest.mark.parametrize("cls,kw", [(ElasticNetLogistic, {"reg_strength": 1e3}),
                                        (RBFSVM, {"reg_strength": 10.0}),
                                        (OneLayerMLP, {"n_hidden": 8, "max_iter": 500})])
    def test_separable_blobs(self, cls, kw, rng):
        X, y = blobs(rng)
        m = cls(**kw).fit(X, y)
        assert m.score(X, y) == 1.0
        p = m.predict_proba(X)
        assert p.shape == (len(X), 2) and np.allclose(p.sum(axis=1), 1.0)
        assert np.all((p >= 0) & (p <= 1))

    def test_lr_weak_penalty_separates_exactly(self):
        X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
        y = np.array([0, 0, 1, 1])
        m = ElasticNetLogistic(reg_strength=1e7).fit(X, y)
        assert m.coef_[0] > 0 and np.all(m.predict(X) == y)

    def test_lr_strong_penalty_zeroes_weights(self, rng):
        X, y = blobs(rng)
        m = ElasticNetLogistic(reg_strength=1e-7).fit(X, y)
        assert np.all(m.coef_ == 0)
        np.testing.assert_allclose(m.predict_proba(X)[:, 1], 0.5, atol=1e-6)

    def test_lr_lasso_is_sparse(self, rng):
        X, y = blobs(rng, d=8)
        X[:, 4:] = rng.normal(size=(len(X), 4))  # pure noise columns
        m = ElasticNetLogistic(reg_strength=5.0, l1_ratio=1.0, l2_ratio=0.0).fit(X, y)
        assert np.sum(m.coef_ == 0) >= 2

    def test_lr_matches_sklearn_ridge(self, rng):
        from sklearn.linear_model import LogisticRegression

        X, y = blobs(rng, n=80, sep=1.0)
        Z = (X - X.mean(0)) / X.std(0)
        ours = ElasticNetLogistic(reg_strength=2.0, l1_ratio=0.0, l2_ratio=1.0, tol=1e-13).fit(X, y)
        # sklearn minimises C * sum(loss) + |w|^2 / 2, i.e. mean(loss) + |w|^2 / (2 C n)
        ref = LogisticRegression(C=2.0 / len(y), tol=1e-12, max_iter=10000).fit(Z, y)
        np.testing.assert_allclose(ours.coef_, ref.coef_[0], rtol=1e-4)

    def test_nonlinear_models_solve_xor(self, rng):
        X, y = xor(rng)
        assert RBFSVM(reg_strength=100.0, kernel_coef=2.0).fit(X, y).score(X, y) >= 0.97
        assert OneLayerMLP(n_hidden=16, l2_penalty=0.0, random_state=1).fit(X, y).score(X, y) >= 0.95

    def test_svm_row_order_invariance(self, rng):
        X, y = blobs(rng, sep=1.0)
        perm = rng.permutation(len(y))
        a = RBFSVM().fit(X, y).decision_function(X)
        b = RBFSVM().fit(X[perm], y[perm]).decision_function(X)
        assert np.array_equal(a, b)

    def test_mlp_seeded(self, rng):
        X, y = blobs(rng, sep=1.0)
        a = OneLayerMLP(n_hidden=5, max_iter=30, random_state=3).fit(X, y).predict_proba(X)
        b = OneLayerMLP(n_hidden=5, max_iter=30, random_state=3).fit(X, y).predict_proba(X)
        assert np.array_equal(a, b)

    def test_string_labels(self, rng):
        X, y = blobs(rng)
        labels = np.where(y == 1, "cough", "non_cough")
        m = ElasticNetLogistic(reg_strength=100.0).fit(X, labels)
        assert m.classes_.tolist() == ["cough", "non_cough"]
        assert set(m.predict(X)) <= {"cough", "non_cough"}

    def test_validation(self, rng):
        X, y = blobs(rng)
        with pytest.raises(InputError):
            ElasticNetLogistic().fit(X, np.zeros(len(y)))
        m = ElasticNetLogistic().fit(X, y)
        with pytest.raises(InputError):
            m.predict(X[:, :2])
        assert m.predict_proba(np.empty((0, 3))).shape == (0, 2)
        with pytest.raises(ConfigError):
            ElasticNetLogistic(reg_strength=0).fit(X, y)
        with pytest.raises(ConfigError):
            make_classifier("cnn")

    def test_clone_and_params(self):
        m = RBFSVM(reg_strength=3.0, kernel_coef=0.5)
        c = clone(m)
        assert c.get_params()["reg_strength"] == 3.0 and c is not m

    def test_train_helpers(self, rng):
        X, y = blobs(rng)
        for m in (train_lr(X, y, 10.0, 0.5, 0.5), train_svm(X, y, 1.0, 0.3),
                  train_mlp(X, y, 0.01, 8)):
            assert auc(m.predict_proba(X)[:, 1], y) > 0.99


class TestPersistence:
    @pytest.mark.parametrize("kind,kw", [("lr", {}), ("svm", {}), ("mlp", {"n_hidden": 4, "max_iter": 30})])
    def test_round_trip(self, kind, kw, tmp_path, rng):
        X, y = blobs(rng, sep=1.0)
        m = make_classifier(kind, **kw).fit(X, y)
        save_model(m, tmp_path / "m.json", extra={"note": "x"})
        back = load_model(tmp_path / "m.json")
        assert type(back) is type(m)
        assert np.array_equal(back.predict_proba(X), m.predict_proba(X))

    def test_bad_version(self, tmp_path):
        (tmp_path / "m.json").write_text('{"format_version": 99, "kind": "lr"}')
        with pytest.raises(LoadError):
            load_model(tmp_path / "m.json")


def test_external_scores(tmp_path):
    (tmp_path / "s.csv").write_text("event_id,score\na,0.9\nb,0.1\n")
    s = ExternalScores.from_csv(tmp_path / "s.csv")
    assert s.scores_for(["b", "a"]).tolist() == [0.1, 0.9]
    with pytest.raises(InputError):
        s.scores_for(["c"])
