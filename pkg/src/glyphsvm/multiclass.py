"""One-vs-all and one-vs-one reductions over the binary SVM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NoConvergenceError, SingleClassError
from .svm import BinaryModel, KernelCache, KernelSpec, decision_value, train_binary


def class_sort_key(label):
    """Numeric order when every label parses as an integer, else lexicographic."""
    try:
        return (0, int(label), "")
    except (TypeError, ValueError):
        return (1, 0, str(label))


def ordered_classes(labels) -> list:
    return sorted(set(labels), key=class_sort_key)


@dataclass(frozen=True)
class MinMaxScaling:
    """Per-dimension min-max record fitted on training data only.

    Constant dimensions map to 0 so unseen offsets cannot blow up the RBF
    distances.
    """

    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "MinMaxScaling":
        X = np.asarray(X, dtype=np.float64)
        return cls(mins=X.min(axis=0), maxs=X.max(axis=0))

    @property
    def dimension(self) -> int:
        return self.mins.shape[0]

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.dimension:
            raise DimensionMismatchError(
                f"scaling expects dimension {self.dimension}, got {X.shape[-1]}"
            )
        span = self.maxs - self.mins
        safe = np.where(span > 0, span, 1.0)
        scaled = (X - self.mins) / safe
        return np.where(span > 0, scaled, 0.0)


@dataclass
class MulticlassModel:
    """Binary models assembled under a one-vs-all or one-vs-one strategy."""

    strategy: str
    class_ids: list
    classifiers: list[BinaryModel]
    scaling: MinMaxScaling
    pairs: list[tuple[int, int]] | None = None

    def validate(self) -> None:
        n = len(self.class_ids)
        if n < 2:
            raise SingleClassError("multiclass model needs at least two classes")
        expected = n if self.strategy == "ova" else n * (n - 1) // 2
        if len(self.classifiers) != expected:
            raise ValueError(
                f"{self.strategy} with {n} classes needs {expected} classifiers, "
                f"got {len(self.classifiers)}"
            )


def _prepare(data_vectors, data_labels):
    X = np.asarray(data_vectors, dtype=np.float64)
    labels = list(data_labels)
    if X.ndim != 2 or X.shape[0] != len(labels):
        raise DimensionMismatchError("vectors and labels disagree in length")
    classes = ordered_classes(labels)
    if len(classes) < 2:
        raise SingleClassError("need at least two classes")
    return X, labels, classes


def train_one_vs_all(
    data_vectors,
    data_labels,
    kernel: KernelSpec,
    C: float,
    tol: float = 1e-3,
    max_iter: int = 1_000_000,
) -> MulticlassModel:
    """One binary model per class: +1 for the class, -1 for the rest.

    Feature scaling is fitted on the full training set and shared by every
    binary problem (and recorded in the model for prediction time).
    """
    X, labels, classes = _prepare(data_vectors, data_labels)
    scaling = MinMaxScaling.fit(X)
    Xs = scaling.transform(X)
    cache = KernelCache(kernel, Xs)
    classifiers = []
    for cls in classes:
        y = np.array([1.0 if lb == cls else -1.0 for lb in labels])
        try:
            classifiers.append(
                train_binary(Xs, y, kernel, C, tol=tol, max_iter=max_iter, cache=cache)
            )
        except NoConvergenceError as exc:
            raise NoConvergenceError(
                f"class {cls!r} vs rest: {exc}",
                iterations=exc.iterations,
                violation=exc.violation,
                context=cls,
            ) from exc
    model = MulticlassModel(
        strategy="ova", class_ids=classes, classifiers=classifiers, scaling=scaling
    )
    model.validate()
    return model


def train_one_vs_one(
    data_vectors,
    data_labels,
    kernel: KernelSpec,
    C: float,
    tol: float = 1e-3,
    max_iter: int = 1_000_000,
) -> MulticlassModel:
    """One binary model per unordered class pair (i, j), i < j, +1 = class i."""
    X, labels, classes = _prepare(data_vectors, data_labels)
    scaling = MinMaxScaling.fit(X)
    Xs = scaling.transform(X)
    classifiers = []
    pairs = []
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            cls_i, cls_j = classes[i], classes[j]
            idx = [t for t, lb in enumerate(labels) if lb == cls_i or lb == cls_j]
            sub_x = Xs[idx]
            sub_y = np.array([1.0 if labels[t] == cls_i else -1.0 for t in idx])
            try:
                classifiers.append(
                    train_binary(sub_x, sub_y, kernel, C, tol=tol, max_iter=max_iter)
                )
            except NoConvergenceError as exc:
                raise NoConvergenceError(
                    f"class pair ({classes[i]!r}, {classes[j]!r}): {exc}",
                    iterations=exc.iterations,
                    violation=exc.violation,
                    context=(classes[i], classes[j]),
                ) from exc
            pairs.append((i, j))
    model = MulticlassModel(
        strategy="ovo",
        class_ids=classes,
        classifiers=classifiers,
        scaling=scaling,
        pairs=pairs,
    )
    model.validate()
    return model


def class_decision_values(model: MulticlassModel, x) -> np.ndarray:
    """Per-class decision values of a one-vs-all model (scaled internally)."""
    if model.strategy != "ova":
        raise ValueError("per-class decision values need an ova model")
    xs = model.scaling.transform(np.asarray(x, dtype=np.float64))
    return np.array([decision_value(clf, xs) for clf in model.classifiers])


def predict_ova(model: MulticlassModel, x):
    """Winner-takes-all over per-class decision values; ties pick the lowest id."""
    values = class_decision_values(model, x)
    return model.class_ids[int(np.argmax(values))]


def predict_ovo(model: MulticlassModel, x):
    """Max-wins voting; vote ties fall back to the signed decision-value sums,
    then the lowest class id."""
    if model.strategy != "ovo":
        raise ValueError("predict_ovo needs an ovo model")
    xs = model.scaling.transform(np.asarray(x, dtype=np.float64))
    n = len(model.class_ids)
    votes = np.zeros(n, dtype=np.int64)
    scores = np.zeros(n)
    for (i, j), clf in zip(model.pairs, model.classifiers):
        f = decision_value(clf, xs)
        if f >= 0.0:
            votes[i] += 1
        else:
            votes[j] += 1
        scores[i] += f
        scores[j] -= f
    top = votes.max()
    tied = np.flatnonzero(votes == top)
    if len(tied) == 1:
        return model.class_ids[int(tied[0])]
    best = tied[np.argmax(scores[tied])]  # argmax keeps the lowest index on ties
    return model.class_ids[int(best)]


def predict(model: MulticlassModel, x):
    if model.strategy == "ova":
        return predict_ova(model, x)
    return predict_ovo(model, x)


def predict_batch(model: MulticlassModel, X) -> list:
    X = np.asarray(X, dtype=np.float64)
    return [predict(model, row) for row in X]
