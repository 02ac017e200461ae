import numpy as np
import pytest

from glyphsvm.errors import BadMagicError, CorruptBlockError, VersionMismatchError
from glyphsvm.model_io import load_model, save_model
from glyphsvm.multiclass import class_decision_values, predict, train_one_vs_all, train_one_vs_one
from glyphsvm.svm import KernelSpec


def small_model(strategy="ova", kernel=None, labels=None):
    rng = np.random.default_rng(0)
    vectors, labs = [], []
    for c in range(3):
        vectors.append(np.array([3.0 * c, -c]) + 0.3 * rng.normal(size=(8, 2)))
        labs.extend([labels[c] if labels else c] * 8)
    X = np.vstack(vectors)
    kernel = kernel or KernelSpec(kind="rbf", gamma=0.5)
    trainer = train_one_vs_all if strategy == "ova" else train_one_vs_one
    return trainer(X, labs, kernel, 10.0), X


@pytest.mark.parametrize("strategy", ["ova", "ovo"])
def test_roundtrip_decisions_exact(strategy, tmp_path):
    model, X = small_model(strategy)
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    loaded = load_model(path)
    rng = np.random.default_rng(1)
    probes = rng.normal(size=(100, 2)) * 3
    assert loaded.strategy == model.strategy
    assert loaded.class_ids == model.class_ids
    for p in probes:
        assert predict(loaded, p) == predict(model, p)
    if strategy == "ova":
        for p in probes:
            np.testing.assert_array_equal(
                class_decision_values(loaded, p), class_decision_values(model, p)
            )


@pytest.mark.parametrize(
    "kernel",
    [
        KernelSpec(kind="linear"),
        KernelSpec(kind="poly", degree=4),
        KernelSpec(kind="sigmoid", slope=0.01, offset=-0.25),
    ],
)
def test_roundtrip_all_kernels(kernel, tmp_path):
    model, _ = small_model("ova", kernel=kernel)
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    assert load_model(path).classifiers[0].kernel == kernel


def test_roundtrip_string_labels(tmp_path):
    model, _ = small_model("ova", labels=["alpha", "beta", "gamma"])
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.class_ids == ["alpha", "beta", "gamma"]
    assert all(isinstance(c, str) for c in loaded.class_ids)


def test_roundtrip_int_labels_stay_int(tmp_path):
    model, _ = small_model("ova")
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    assert load_model(path).class_ids == [0, 1, 2]


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.gsvm"
    path.write_text("XXXX\nversion 1\n")
    with pytest.raises(BadMagicError):
        load_model(path)


def test_version_mismatch(tmp_path):
    model, _ = small_model()
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    text = path.read_text().replace("version 1", "version 99", 1)
    path.write_text(text)
    with pytest.raises(VersionMismatchError):
        load_model(path)


def test_truncated_file(tmp_path):
    model, _ = small_model()
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[: len(lines) // 2]))
    with pytest.raises(CorruptBlockError):
        load_model(path)


def test_sv_count_mismatch(tmp_path):
    model, _ = small_model()
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    lines = path.read_text().splitlines()
    for i, line in enumerate(lines):
        if line.startswith("sv_count "):
            lines[i] = "sv_count 9999"
            break
    path.write_text("\n".join(lines))
    with pytest.raises(CorruptBlockError):
        load_model(path)


def test_coeff_length_mismatch(tmp_path):
    model, _ = small_model()
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    lines = path.read_text().splitlines()
    for i, line in enumerate(lines):
        if line.startswith("coeffs "):
            lines[i] = "coeffs 1.0"
            break
    path.write_text("\n".join(lines))
    with pytest.raises(CorruptBlockError):
        load_model(path)


def test_classifier_count_mismatch(tmp_path):
    model, _ = small_model()
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    text = path.read_text().replace("classifiers 3", "classifiers 2", 1)
    path.write_text(text)
    with pytest.raises(CorruptBlockError):
        load_model(path)


def test_box_constraint_checked_on_load(tmp_path):
    model, _ = small_model()
    path = tmp_path / "model.gsvm"
    save_model(model, path)
    lines = path.read_text().splitlines()
    for i, line in enumerate(lines):
        if line.startswith("coeffs "):
            parts = line.split()
            parts[1] = "1e9"  # exceeds C
            lines[i] = " ".join(parts)
            break
    path.write_text("\n".join(lines))
    with pytest.raises(CorruptBlockError):
        load_model(path)
