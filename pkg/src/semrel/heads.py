"""Supervised regression heads: linear epsilon-insensitive SVR trained by
seeded stochastic subgradient descent, and squared-error gradient boosting
over depth-limited regression trees with exact greedy split search.

Both are deterministic given (data, seed) and serialize to versioned JSON.
Predictions are clamped to [0, 1], the relatedness codomain.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import CorruptModel, DimensionMismatch, VersionMismatch

MODEL_VERSION = 1


@dataclass(frozen=True)
class SvrParams:
    epsilon: float = 0.05
    c: float = 1.0
    epochs: int = 200
    learning_rate: float = 0.5
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "c": self.c,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class GbtParams:
    max_depth: int = 4
    n_rounds: int = 200
    shrinkage: float = 0.1
    reg_lambda: float = 1.0
    min_samples_leaf: int = 2
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "n_rounds": self.n_rounds,
            "shrinkage": self.shrinkage,
            "reg_lambda": self.reg_lambda,
            "min_samples_leaf": self.min_samples_leaf,
            "seed": self.seed,
        }


@dataclass
class TrainReport:
    """Training-loss trace (MSE per epoch or round) plus wall-clock time."""

    losses: list[float]
    final_loss: float
    seconds: float
    degenerate: bool = False


@dataclass
class SvrModel:
    weights: np.ndarray
    bias: float
    params: SvrParams

    @property
    def n_features(self) -> int:
        return int(self.weights.shape[0])

    def raw_predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weights + self.bias


class TreeNode:
    """Axis-aligned binary split or leaf; leaves carry the boosted increment."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, value: float = 0.0):
        self.feature = -1
        self.threshold = 0.0
        self.left: TreeNode | None = None
        self.right: TreeNode | None = None
        self.value = value

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def route(self, x: np.ndarray) -> float:
        node = self
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.value

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())


@dataclass
class GbtModel:
    trees: list[TreeNode]
    base_score: float
    n_features: int
    params: GbtParams

    def raw_predict(self, X: np.ndarray) -> np.ndarray:
        out = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            for i in range(X.shape[0]):
                out[i] += self.params.shrinkage * tree.route(X[i])
        return out


# ----------------------------------------------------------------- common


def _check_training_data(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be a 2-D sample matrix, got ndim={X.ndim}")
    if y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"got {X.shape[0]} samples but {y.shape[0] if y.ndim == 1 else '?'} labels")
    if X.shape[0] < 2:
        raise DimensionMismatch("need at least 2 training samples")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise ValueError("training data contains non-finite values")
    return X, y


def _mse(pred: np.ndarray, y: np.ndarray) -> float:
    diff = pred - y
    return float(diff @ diff) / y.shape[0]


def _clamp01(values: np.ndarray) -> np.ndarray:
    return np.clip(values, 0.0, 1.0)


# -------------------------------------------------------------------- SVR


def svr_objective(weights: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray, params: SvrParams) -> float:
    """0.5 * ||w||^2 + C * sum_i max(0, |w.x_i + b - y_i| - epsilon)."""
    residual = X @ weights + bias - y
    hinge = np.maximum(0.0, np.abs(residual) - params.epsilon)
    return 0.5 * float(weights @ weights) + params.c * float(np.sum(hinge))


def svr_gradient(weights: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray, params: SvrParams) -> tuple[np.ndarray, float]:
    """Subgradient of the objective; exact gradient away from the hinge kinks."""
    residual = X @ weights + bias - y
    active = np.abs(residual) > params.epsilon
    signs = np.sign(residual) * active
    grad_w = weights + params.c * (X.T @ signs)
    grad_b = params.c * float(np.sum(signs))
    return grad_w, grad_b


def epsilon_tube_loss(pred: np.ndarray, y: np.ndarray, epsilon: float) -> float:
    return float(np.sum(np.maximum(0.0, np.abs(pred - y) - epsilon)))


def train_svr(X, y, params: SvrParams = SvrParams()) -> tuple[SvrModel, TrainReport]:
    """Seeded stochastic subgradient descent with a cosine-decay step size.

    All-identical labels short-circuit to a constant predictor (zero weights,
    bias = label), flagged in the report.
    """
    start = time.perf_counter()
    X, y = _check_training_data(X, y)
    n, d = X.shape

    if np.all(y == y[0]):
        model = SvrModel(weights=np.zeros(d), bias=float(y[0]), params=params)
        return model, TrainReport(losses=[0.0], final_loss=0.0, seconds=time.perf_counter() - start, degenerate=True)

    rng = np.random.default_rng(params.seed)
    w = np.zeros(d)
    b = 0.0
    losses: list[float] = []
    for epoch in range(params.epochs):
        lr = params.learning_rate * 0.5 * (1.0 + math.cos(math.pi * epoch / params.epochs))
        for i in rng.permutation(n):
            r = float(w @ X[i]) + b - y[i]
            # Per-sample piece of the objective: 0.5*||w||^2/n + C*hinge_i.
            if abs(r) > params.epsilon:
                g = 1.0 if r > 0 else -1.0
                w -= lr * (w / n + params.c * g * X[i])
                b -= lr * params.c * g
            else:
                w -= lr * (w / n)
        losses.append(_mse(X @ w + b, y))

    model = SvrModel(weights=w, bias=b, params=params)
    return model, TrainReport(
        losses=losses,
        final_loss=losses[-1],
        seconds=time.perf_counter() - start,
    )


# -------------------------------------------------------------------- GBT


def _grow_tree(
    X: np.ndarray,
    residuals: np.ndarray,
    idx: np.ndarray,
    depth: int,
    params: GbtParams,
    leaf_updates: list[tuple[TreeNode, np.ndarray]],
) -> TreeNode:
    n = idx.shape[0]
    total = float(residuals[idx].sum())
    lam = params.reg_lambda
    msl = params.min_samples_leaf

    def make_leaf() -> TreeNode:
        leaf = TreeNode(value=total / (n + lam))
        leaf_updates.append((leaf, idx))
        return leaf

    if depth >= params.max_depth or n < max(2, 2 * msl):
        return make_leaf()

    Xn = X[idx]
    gn = residuals[idx]
    order = np.argsort(Xn, axis=0, kind="stable")
    sorted_values = np.take_along_axis(Xn, order, axis=0)
    prefix = np.cumsum(gn[order], axis=0)

    left_count = np.arange(1, n, dtype=np.float64)[:, None]
    left_sum = prefix[:-1, :]
    right_sum = total - left_sum
    right_count = n - left_count
    gain = 0.5 * (
        left_sum**2 / (left_count + lam)
        + right_sum**2 / (right_count + lam)
        - total**2 / (n + lam)
    )
    valid = (sorted_values[1:] > sorted_values[:-1]) & (left_count >= msl) & (right_count >= msl)
    gain = np.where(valid, gain, -np.inf)

    # Feature-major scan: equal gains resolve to the lowest feature index,
    # then the lowest threshold.
    flat = np.ascontiguousarray(gain.T).ravel()
    best = int(np.argmax(flat))
    if not flat[best] > 0.0:
        return make_leaf()
    feature, position = divmod(best, n - 1)

    lo = float(sorted_values[position, feature])
    hi = float(sorted_values[position + 1, feature])
    threshold = 0.5 * (lo + hi)
    if threshold >= hi:  # midpoint rounded up between adjacent floats
        threshold = lo

    node = TreeNode()
    node.feature = feature
    node.threshold = threshold
    goes_left = X[idx, feature] <= threshold
    node.left = _grow_tree(X, residuals, idx[goes_left], depth + 1, params, leaf_updates)
    node.right = _grow_tree(X, residuals, idx[~goes_left], depth + 1, params, leaf_updates)
    return node


def train_gbt(X, y, params: GbtParams = GbtParams()) -> tuple[GbtModel, TrainReport]:
    """Squared-error gradient boosting; loss trace starts at the base score.

    The MSE trace is non-increasing by construction for shrinkage in (0, 1].
    """
    start = time.perf_counter()
    X, y = _check_training_data(X, y)
    n, d = X.shape
    degenerate = bool(np.all(y == y[0]))

    # mean(y) of a constant vector is the constant, exactly
    base = float(y[0]) if degenerate else float(np.mean(y))
    preds = np.full(n, base)
    losses = [_mse(preds, y)]
    trees: list[TreeNode] = []
    all_idx = np.arange(n)
    for _ in range(params.n_rounds):
        residuals = y - preds
        leaf_updates: list[tuple[TreeNode, np.ndarray]] = []
        root = _grow_tree(X, residuals, all_idx, 0, params, leaf_updates)
        for leaf, leaf_idx in leaf_updates:
            preds[leaf_idx] += params.shrinkage * leaf.value
        trees.append(root)
        losses.append(_mse(preds, y))
        # guaranteed for shrinkage in (0, 1] with regularized leaf values
        assert losses[-1] <= losses[-2] + 1e-15, "training loss increased"

    model = GbtModel(trees=trees, base_score=base, n_features=d, params=params)
    return model, TrainReport(
        losses=losses,
        final_loss=losses[-1],
        seconds=time.perf_counter() - start,
        degenerate=degenerate,
    )


# -------------------------------------------------------------- predict


def predict_batch(model: SvrModel | GbtModel, X) -> np.ndarray:
    """Clamped predictions for a sample matrix, one score in [0, 1] per row."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(f"model expects {model.n_features} features, got {X.shape[1]}")
    return _clamp01(model.raw_predict(X))


def predict(model: SvrModel | GbtModel, x) -> float:
    """Single-sample prediction, clamped to [0, 1]."""
    return float(predict_batch(model, np.asarray(x, dtype=np.float64))[0])


# -------------------------------------------------------- serialization


def _tree_to_obj(node: TreeNode):
    if node.is_leaf:
        return node.value
    return [node.feature, node.threshold, _tree_to_obj(node.left), _tree_to_obj(node.right)]


def _tree_from_obj(obj) -> TreeNode:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return TreeNode(value=float(obj))
    if not (isinstance(obj, list) and len(obj) == 4):
        raise CorruptModel(f"malformed tree node {obj!r}")
    node = TreeNode()
    node.feature = int(obj[0])
    node.threshold = float(obj[1])
    node.left = _tree_from_obj(obj[2])
    node.right = _tree_from_obj(obj[3])
    return node


def save(model: SvrModel | GbtModel) -> bytes:
    if isinstance(model, SvrModel):
        payload = {
            "version": MODEL_VERSION,
            "kind": "svr",
            "weights": [float(v) for v in model.weights],
            "bias": model.bias,
            "params": model.params.to_dict(),
        }
    elif isinstance(model, GbtModel):
        payload = {
            "version": MODEL_VERSION,
            "kind": "gbt",
            "base_score": model.base_score,
            "n_features": model.n_features,
            "trees": [_tree_to_obj(t) for t in model.trees],
            "params": model.params.to_dict(),
        }
    else:
        raise TypeError(f"cannot save {type(model).__name__}")
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def load(data: bytes) -> SvrModel | GbtModel:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModel(f"unreadable model file: {exc}") from None
    if not isinstance(payload, dict) or "version" not in payload:
        raise CorruptModel("model payload is not an object with a version")
    if payload["version"] != MODEL_VERSION:
        raise VersionMismatch(MODEL_VERSION, payload["version"])
    kind = payload.get("kind")
    try:
        if kind == "svr":
            return SvrModel(
                weights=np.asarray(payload["weights"], dtype=np.float64),
                bias=float(payload["bias"]),
                params=SvrParams(**payload["params"]),
            )
        if kind == "gbt":
            return GbtModel(
                trees=[_tree_from_obj(t) for t in payload["trees"]],
                base_score=float(payload["base_score"]),
                n_features=int(payload["n_features"]),
                params=GbtParams(**payload["params"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed model payload: {exc}") from None
    raise CorruptModel(f"unknown model kind {kind!r}")
