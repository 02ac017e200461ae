import numpy as np
import pytest

from oracles import dual_objective, kernel_matrix, max_kkt_violation, oracle_best_dual, recover_alpha

from glyphsvm.errors import DimensionMismatchError, NoConvergenceError, SingleClassError
from glyphsvm.svm import (
    KernelCache,
    KernelSpec,
    decision_value,
    kernel_eval,
    predict_binary,
    train_binary,
)

LINEAR = KernelSpec(kind="linear")


def random_problem(rng, n, gap=0.0):
    X = rng.normal(size=(n, 2))
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    if np.all(y == y[0]):
        y[0] = -y[0]
    X[y > 0, 0] += gap
    return X, y


# --- kernels ------------------------------------------------------------------

def test_kernel_linear():
    assert kernel_eval(LINEAR, [1.0, 2.0], [1.0, 2.0]) == 5.0


def test_kernel_rbf_self_is_one():
    spec = KernelSpec(kind="rbf", gamma=3.7)
    for x in ([0.0, 0.0], [2.5, -1.0], [100.0]):
        assert kernel_eval(spec, x, x) == 1.0


def test_kernel_poly():
    spec = KernelSpec(kind="poly", degree=2)
    assert kernel_eval(spec, [1.0, 0.0], [1.0, 0.0]) == 4.0


def test_kernel_sigmoid_orthogonal():
    spec = KernelSpec(kind="sigmoid", slope=1.0, offset=0.0)
    assert kernel_eval(spec, [1.0, 0.0], [0.0, 1.0]) == 0.0


def test_kernel_symmetry():
    rng = np.random.default_rng(0)
    specs = [
        LINEAR,
        KernelSpec(kind="poly", degree=3),
        KernelSpec(kind="rbf", gamma=0.7),
        KernelSpec(kind="sigmoid", slope=0.5, offset=-0.2),
    ]
    for _ in range(25):
        x, y = rng.normal(size=(2, 4))
        for spec in specs:
            assert kernel_eval(spec, x, y) == pytest.approx(kernel_eval(spec, y, x), rel=1e-15)


def test_kernel_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        kernel_eval(LINEAR, [1.0, 2.0], [1.0, 2.0, 3.0])


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec(kind="rbf", gamma=0.0)
    with pytest.raises(ValueError):
        KernelSpec(kind="rbf")
    with pytest.raises(ValueError):
        KernelSpec(kind="poly", degree=0)
    with pytest.raises(ValueError):
        KernelSpec(kind="sigmoid", slope=1.0)  # offset must be explicit
    with pytest.raises(ValueError):
        KernelSpec(kind="laplace")


# --- analytic two-point problem -------------------------------------------------

def two_point_model():
    X = np.array([[0.0, 0.0], [2.0, 0.0]])
    y = np.array([-1.0, 1.0])
    return train_binary(X, y, LINEAR, C=100.0), X, y


def test_two_point_bias_and_margin():
    model, _, _ = two_point_model()
    assert model.bias == pytest.approx(-1.0, abs=1e-3)
    w = model.dual_coeffs @ model.support_vectors
    assert 2.0 / np.linalg.norm(w) == pytest.approx(2.0, abs=1e-3)


def test_two_point_midpoint_is_boundary():
    model, _, _ = two_point_model()
    assert abs(decision_value(model, [1.0, 0.0])) <= 1e-6


def test_unbounded_sv_sits_on_margin():
    model, X, y = two_point_model()
    alpha = recover_alpha(model, X, y)
    for idx in range(2):
        if 0 < alpha[idx] < model.C:
            assert abs(decision_value(model, X[idx])) == pytest.approx(1.0, abs=1e-3)


def test_label_flip_negates_decisions():
    rng = np.random.default_rng(1)
    X, y = random_problem(rng, 12)
    m_pos = train_binary(X, y, LINEAR, C=5.0)
    m_neg = train_binary(X, -y, LINEAR, C=5.0)
    probes = rng.normal(size=(20, 2))
    for p in probes:
        assert decision_value(m_pos, p) == pytest.approx(-decision_value(m_neg, p), abs=1e-9)


# --- XOR ------------------------------------------------------------------------

XOR_X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
XOR_Y = np.array([1.0, 1.0, -1.0, -1.0])


def test_xor_linear_not_separable():
    model = train_binary(XOR_X, XOR_Y, LINEAR, C=10.0)
    acc = np.mean([predict_binary(model, x) == t for x, t in zip(XOR_X, XOR_Y)])
    assert acc <= 0.75


def test_xor_rbf_separates():
    model = train_binary(XOR_X, XOR_Y, KernelSpec(kind="rbf", gamma=1.0), C=10.0)
    assert [predict_binary(model, x) for x in XOR_X] == [1, 1, -1, -1]


# --- error paths -------------------------------------------------------------------

def test_single_class_raises():
    with pytest.raises(SingleClassError):
        train_binary(np.eye(3), np.ones(3), LINEAR, C=1.0)


def test_no_convergence_carries_diagnostics():
    rng = np.random.default_rng(2)
    X, y = random_problem(rng, 30)
    with pytest.raises(NoConvergenceError) as excinfo:
        train_binary(X, y, KernelSpec(kind="rbf", gamma=0.5), C=10.0, max_iter=2)
    err = excinfo.value
    assert err.iterations == 2
    assert err.violation is not None and err.violation > 1e-3
    assert err.category == "NoConvergence"


def test_bad_hyperparameters():
    with pytest.raises(ValueError):
        train_binary(XOR_X, XOR_Y, LINEAR, C=0.0)
    with pytest.raises(ValueError):
        train_binary(XOR_X, XOR_Y, LINEAR, C=1.0, tol=0.0)


def test_decision_dimension_mismatch():
    model, _, _ = two_point_model()
    with pytest.raises(DimensionMismatchError):
        decision_value(model, [1.0, 2.0, 3.0])


# --- solver invariants ----------------------------------------------------------------

def test_box_and_equality_constraints():
    rng = np.random.default_rng(3)
    for _ in range(15):
        X, y = random_problem(rng, int(rng.integers(4, 25)))
        C = float(rng.choice([0.5, 1.0, 10.0, 100.0]))
        model = train_binary(X, y, KernelSpec(kind="rbf", gamma=0.8), C=C)
        alpha = np.abs(model.dual_coeffs)
        assert np.all(alpha >= 0.0) and np.all(alpha <= C)  # exact box
        assert abs(model.dual_coeffs.sum()) <= 1e-6
        assert len(model.dual_coeffs) >= 1


def test_kkt_within_tolerance():
    rng = np.random.default_rng(4)
    for _ in range(10):
        X, y = random_problem(rng, 15)
        for spec in (LINEAR, KernelSpec(kind="rbf", gamma=0.6)):
            model = train_binary(X, y, spec, C=10.0, tol=1e-3)
            assert max_kkt_violation(model, X, y, 10.0) <= 1e-3 + 1e-9


def test_separable_margin_matches_analytic():
    # two parallel point clusters at distance 4 -> margin 4, w = (0.5, 0)
    X = np.array([[0.0, 0.0], [0.0, 1.0], [4.0, 0.0], [4.0, 1.0]])
    y = np.array([-1.0, -1.0, 1.0, 1.0])
    model = train_binary(X, y, LINEAR, C=1e3, tol=1e-6)
    w = model.dual_coeffs @ model.support_vectors
    assert 2.0 / np.linalg.norm(w) == pytest.approx(4.0, abs=1e-3)


def test_dual_objective_meets_oracle_small_instances():
    rng = np.random.default_rng(5)
    for trial in range(8):
        n = int(rng.integers(4, 7))
        X, y = random_problem(rng, n)
        spec = LINEAR if trial % 2 == 0 else KernelSpec(kind="rbf", gamma=1.0)
        C = 1.0 if trial % 4 < 2 else 10.0
        model = train_binary(X, y, spec, C=C, tol=1e-4)
        alpha = recover_alpha(model, X, y)
        ours = dual_objective(alpha, y, kernel_matrix(spec, X))
        assert ours >= oracle_best_dual(X, y, spec, C) - 1e-4


def test_prediction_invariant_under_permutation():
    rng = np.random.default_rng(6)
    X, y = random_problem(rng, 20, gap=1.0)
    model_a = train_binary(X, y, KernelSpec(kind="rbf", gamma=0.5), C=10.0)
    perm = rng.permutation(len(y))
    model_b = train_binary(X[perm], y[perm], KernelSpec(kind="rbf", gamma=0.5), C=10.0)
    probes = rng.normal(size=(50, 2))
    preds_a = [predict_binary(model_a, p) for p in probes]
    preds_b = [predict_binary(model_b, p) for p in probes]
    assert preds_a == preds_b


def test_training_deterministic():
    rng = np.random.default_rng(7)
    X, y = random_problem(rng, 18)
    m1 = train_binary(X, y, KernelSpec(kind="rbf", gamma=0.4), C=3.0)
    m2 = train_binary(X, y, KernelSpec(kind="rbf", gamma=0.4), C=3.0)
    assert np.array_equal(m1.dual_coeffs, m2.dual_coeffs)
    assert m1.bias == m2.bias


def test_cache_size_does_not_change_result():
    rng = np.random.default_rng(8)
    X, y = random_problem(rng, 16)
    spec = KernelSpec(kind="rbf", gamma=0.9)
    small = train_binary(X, y, spec, C=2.0, cache=KernelCache(spec, X, max_rows=2))
    large = train_binary(X, y, spec, C=2.0, cache=KernelCache(spec, X, max_rows=1000))
    assert np.array_equal(small.dual_coeffs, large.dual_coeffs)
    assert small.bias == large.bias


def test_predict_sign_rule():
    model, _, _ = two_point_model()
    assert predict_binary(model, [2.0, 0.0]) == 1   # f = +1
    assert predict_binary(model, [0.0, 0.0]) == -1  # f = -1
    assert predict_binary(model, [1.0, 0.0]) == 1   # f = 0 maps to +1
