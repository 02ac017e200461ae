"""Binary soft-margin kernel SVM with an SMO dual solver.

The solver is sequential minimal optimization over the maximal
KKT-violating pair (Keerthi's working-set selection), deterministic with
lowest-index tie-breaking, so identical inputs always produce identical
models.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, NoConvergenceError, SingleClassError

KERNEL_KINDS = ("linear", "poly", "rbf", "sigmoid")
DEFAULT_TOL = 1e-3
DEFAULT_MAX_ITER = 1_000_000
CURVATURE_FLOOR = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Kernel identity plus its parameters.

    linear:   x . y
    poly:     (x . y + 1)^degree
    rbf:      exp(-gamma * ||x - y||^2), gamma > 0
    sigmoid:  tanh(slope * (x . y) + offset); slope and offset have no
              defaults and must be given explicitly
    """

    kind: str
    degree: int = 3
    gamma: float | None = None
    slope: float | None = None
    offset: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf":
            if self.gamma is None or self.gamma <= 0:
                raise ValueError("rbf kernel requires gamma > 0")
        if self.kind == "poly":
            if int(self.degree) != self.degree or self.degree < 1:
                raise ValueError("poly kernel requires integer degree >= 1")
        if self.kind == "sigmoid":
            if self.slope is None or self.offset is None:
                raise ValueError("sigmoid kernel requires explicit slope and offset")

    def describe(self) -> str:
        if self.kind == "linear":
            return "linear"
        if self.kind == "poly":
            return f"poly degree={self.degree}"
        if self.kind == "rbf":
            return f"rbf gamma={self.gamma}"
        return f"sigmoid slope={self.slope} offset={self.offset}"


def linear_kernel() -> KernelSpec:
    return KernelSpec(kind="linear")


def poly_kernel(degree: int) -> KernelSpec:
    return KernelSpec(kind="poly", degree=degree)


def rbf_kernel(gamma: float) -> KernelSpec:
    return KernelSpec(kind="rbf", gamma=gamma)


def sigmoid_kernel(slope: float, offset: float) -> KernelSpec:
    return KernelSpec(kind="sigmoid", slope=slope, offset=offset)


def kernel_against(spec: KernelSpec, rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Kernel values of one point against a stack of rows."""
    rows = np.asarray(rows, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if rows.shape[1] != x.shape[0]:
        raise DimensionMismatchError(
            f"vectors have dimension {rows.shape[1]}, probe has {x.shape[0]}"
        )
    if spec.kind == "linear":
        return rows @ x
    if spec.kind == "poly":
        return (rows @ x + 1.0) ** spec.degree
    if spec.kind == "rbf":
        diff = rows - x
        return np.exp(-spec.gamma * np.einsum("ij,ij->i", diff, diff))
    return np.tanh(spec.slope * (rows @ x) + spec.offset)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Scalar kernel evaluation K(x, y)."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shapes {x.shape} and {y.shape} differ")
    return float(kernel_against(spec, x.reshape(1, -1), y)[0])


class KernelCache:
    """Lazily computed kernel rows with LRU eviction.

    Pure memoization over a fixed sample matrix: results never depend on the
    cache size. One cache can be shared by several binary trainings over the
    same samples (one-vs-all reuses every row N times).
    """

    def __init__(self, spec: KernelSpec, samples: np.ndarray, max_rows: int = 4096):
        self.spec = spec
        self.samples = np.asarray(samples, dtype=np.float64)
        self.max_rows = max(int(max_rows), 1)
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            return cached
        value = kernel_against(self.spec, self.samples, self.samples[i])
        self._rows[i] = value
        if len(self._rows) > self.max_rows:
            self._rows.popitem(last=False)
        return value


@dataclass
class TrainingMeta:
    iterations: int
    kkt_violation: float


@dataclass
class BinaryModel:
    """Trained binary SVM: support vectors, alpha_i * y_i, and the bias."""

    kernel: KernelSpec
    support_vectors: np.ndarray
    dual_coeffs: np.ndarray
    bias: float
    C: float
    meta: TrainingMeta = field(default_factory=lambda: TrainingMeta(0, 0.0))


def _validate_training_input(samples, labels):
    X = np.asarray(samples, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("samples must be a 2-D array")
    if y.shape != (X.shape[0],):
        raise DimensionMismatchError(
            f"{X.shape[0]} samples but {y.shape} labels"
        )
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if np.all(y == y[0]):
        raise SingleClassError("training labels are all identical")
    return X, y


def train_binary(
    samples,
    labels,
    kernel: KernelSpec,
    C: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    cache: KernelCache | None = None,
) -> BinaryModel:
    """Solve the soft-margin dual by SMO and package the resulting model.

    Stops once the maximal KKT violation drops to `tol`; raises
    NoConvergenceError with diagnostics if `max_iter` pair updates are not
    enough. The bias averages y_i - u_i over unbounded support vectors,
    falling back to the midpoint of the feasible interval.
    """
    X, y = _validate_training_input(samples, labels)
    if C <= 0:
        raise ValueError("C must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = X.shape[0]
    if cache is None:
        cache = KernelCache(kernel, X)
    elif cache.samples.shape != X.shape or cache.spec != kernel:
        raise ValueError("cache does not match the training samples/kernel")

    alpha = np.zeros(n)
    grad = np.ones(n)  # dW/dalpha_i at alpha = 0
    yg = y * grad
    pos = y > 0
    upper = np.where(pos, C, 0.0)  # bound on y_i * alpha_i
    lower = np.where(pos, 0.0, -C)

    iterations = 0
    while True:
        ya = y * alpha
        in_up = ya < upper
        in_low = ya > lower
        up_scores = np.where(in_up, yg, -np.inf)
        low_scores = np.where(in_low, yg, np.inf)
        i = int(np.argmax(up_scores))
        j = int(np.argmin(low_scores))
        violation = float(up_scores[i] - low_scores[j])
        if violation <= tol:
            break
        if iterations >= max_iter:
            raise NoConvergenceError(
                f"no convergence after {iterations} pair updates "
                f"(KKT violation {violation:.3e} > tol {tol:.3e})",
                iterations=iterations,
                violation=violation,
            )
        k_i = cache.row(i)
        k_j = cache.row(j)
        curvature = max(k_i[i] + k_j[j] - 2.0 * k_i[j], CURVATURE_FLOOR)
        step = min(
            upper[i] - ya[i],
            ya[j] - lower[j],
            violation / curvature,
        )
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        # keep the box constraint exact despite rounding in the update
        snap = 1e-12 * max(1.0, C)
        for idx in (i, j):
            if alpha[idx] < snap:
                alpha[idx] = 0.0
            elif alpha[idx] > C - snap:
                alpha[idx] = C
        yg -= step * (k_i - k_j)
        iterations += 1

    m = float(np.max(np.where(in_up, yg, -np.inf)))
    big_m = float(np.min(np.where(in_low, yg, np.inf)))
    unbounded = (alpha > 0) & (alpha < C)
    if unbounded.any():
        bias = float(np.mean(yg[unbounded]))
    else:
        bias = (m + big_m) / 2.0
    support = alpha > 0
    if not support.any():
        raise ValueError(f"tol {tol} is too loose; no support vectors survived")
    return BinaryModel(
        kernel=kernel,
        support_vectors=X[support].copy(),
        dual_coeffs=(alpha[support] * y[support]).copy(),
        bias=bias,
        C=float(C),
        meta=TrainingMeta(iterations=iterations, kkt_violation=max(violation, 0.0)),
    )


def decision_value(model: BinaryModel, x) -> float:
    """f(x) = sum_i alpha_i y_i K(sv_i, x) + b."""
    x = np.asarray(x, dtype=np.float64)
    k = kernel_against(model.kernel, model.support_vectors, x)
    return float(model.dual_coeffs @ k + model.bias)


def decision_values(model: BinaryModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return np.array([decision_value(model, row) for row in X])


def predict_binary(model: BinaryModel, x) -> int:
    """Sign of the decision value; exactly zero maps to +1."""
    return 1 if decision_value(model, x) >= 0.0 else -1
