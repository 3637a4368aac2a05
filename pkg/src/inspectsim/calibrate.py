"""Quantification of cause-effect relations from measured data.

Three tools bind the simulator's qualitative wiring to numbers: a one-
hidden-layer feed-forward regression network, relevance ranking of the
explaining variables via the analytic partial derivatives of the trained
network, and binary regression trees split on normalized standard deviation
reduction.  Training is full-batch gradient descent with a backtracking
step size, so a fixed seed always reproduces the same weights and the
training error never ends above its starting point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

ACTIVATIONS = ("logistic", "tanh", "identity")


class CalibrationError(ValueError):
    pass


@dataclass
class NNModel:
    """Weights of a d-input, n-hidden-unit, single-output network.

    ``hidden_weights`` has one row per hidden unit, with the bias in column
    0; ``output_weights[0]`` is the output bias.
    """

    input_dim: int
    hidden_weights: np.ndarray  # shape (n, d + 1)
    output_weights: np.ndarray  # shape (n + 1,)
    activation: str = "tanh"
    column_names: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.hidden_weights = np.asarray(self.hidden_weights, dtype=float)
        self.output_weights = np.asarray(self.output_weights, dtype=float)
        n, cols = self.hidden_weights.shape
        if cols != self.input_dim + 1:
            raise CalibrationError(
                f"hidden weights expect {cols - 1} inputs, model says {self.input_dim}"
            )
        if self.output_weights.shape != (n + 1,):
            raise CalibrationError("output weight count must be hidden units + 1")
        if self.activation not in ACTIVATIONS:
            raise CalibrationError(f"unknown activation {self.activation!r}")
        if not (np.isfinite(self.hidden_weights).all() and np.isfinite(self.output_weights).all()):
            raise CalibrationError("non-finite weights")

    @property
    def hidden_units(self) -> int:
        return self.hidden_weights.shape[0]


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "logistic":
        return 1.0 / (1.0 + np.exp(-z))
    if name == "tanh":
        return np.tanh(z)
    return z


def _act_prime(name: str, z: np.ndarray) -> np.ndarray:
    if name == "logistic":
        s = 1.0 / (1.0 + np.exp(-z))
        return s * (1.0 - s)
    if name == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    return np.ones_like(z)


def _augment(x: np.ndarray) -> np.ndarray:
    ones = np.ones(x.shape[:-1] + (1,))
    return np.concatenate([ones, x], axis=-1)


def nn_eval(model: NNModel, x: Sequence[float]) -> float:
    """Evaluate the network at one input vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.input_dim,):
        raise CalibrationError(f"expected {model.input_dim} inputs, got {x.shape}")
    z = model.hidden_weights @ _augment(x)
    hidden = _act(model.activation, z)
    return float(model.output_weights[0] + model.output_weights[1:] @ hidden)


def _eval_batch(model: NNModel, xs: np.ndarray) -> np.ndarray:
    z = _augment(xs) @ model.hidden_weights.T  # (rows, n)
    return model.output_weights[0] + _act(model.activation, z) @ model.output_weights[1:]


def relevance(model: NNModel, x: Sequence[float], k: int) -> float:
    """Partial derivative of the network output with respect to input ``k``.

    ``k`` is a 0-based feature index.  A large magnitude means the variable
    drives the output near ``x``; a flat response everywhere is the signal
    that the variable (or the model) carries no explanatory weight.
    """
    x = np.asarray(x, dtype=float)
    if not 0 <= k < model.input_dim:
        raise CalibrationError(f"feature index {k} out of range 0..{model.input_dim - 1}")
    z = model.hidden_weights @ _augment(x)
    gprime = _act_prime(model.activation, z)
    return float(np.sum(model.output_weights[1:] * gprime * model.hidden_weights[:, k + 1]))


@dataclass
class Dataset:
    """Rows of explaining variables plus one explained variable."""

    names: list[str]
    x: np.ndarray  # shape (rows, d)
    y: np.ndarray  # shape (rows,)
    target_name: str = "y"

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 2 or self.y.ndim != 1 or self.x.shape[0] != self.y.shape[0]:
            raise CalibrationError("dataset shapes are inconsistent")
        if len(self.names) != self.x.shape[1]:
            raise CalibrationError("column name count does not match data width")
        if not (np.isfinite(self.x).all() and np.isfinite(self.y).all()):
            raise CalibrationError("dataset contains non-finite values")

    def __len__(self) -> int:
        return self.x.shape[0]


def load_dataset(path: str | Path, delimiter: str = ",", target: str | None = None) -> Dataset:
    """Read a delimited text file with a header row; last column is the
    explained variable unless ``target`` names another column."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if len(lines) < 2:
        raise CalibrationError("dataset needs a header row and at least one data row")
    header = [h.strip() for h in lines[0].split(delimiter)]
    target = target if target is not None else header[-1]
    if target not in header:
        raise CalibrationError(f"target column {target!r} not in header {header}")
    t_idx = header.index(target)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in line.split(delimiter)]
        if len(parts) != len(header):
            raise CalibrationError(f"line {lineno}: expected {len(header)} fields, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise CalibrationError(f"line {lineno}: {exc}") from exc
    data = np.array(rows)
    x = np.delete(data, t_idx, axis=1)
    names = [h for i, h in enumerate(header) if i != t_idx]
    return Dataset(names=names, x=x, y=data[:, t_idx], target_name=target)


def _mse(model: NNModel, xs: np.ndarray, ys: np.ndarray) -> float:
    diff = _eval_batch(model, xs) - ys
    return float(np.mean(diff * diff))


def nn_train(
    ds: Dataset,
    hidden_units: int = 8,
    learning_rate: float = 0.05,
    epochs: int = 500,
    seed: int = 0,
    activation: str = "tanh",
) -> NNModel:
    """Fit a network by seeded full-batch gradient descent on the MSE.

    Initial weights are uniform(-0.5, 0.5).  The step size backtracks when
    a step would increase the loss and slowly re-grows afterwards; the best
    weights seen are returned, so the training error is never above the
    initial error.
    """
    if hidden_units < 1 or epochs < 1 or learning_rate <= 0:
        raise CalibrationError("hyperparameters must be positive")
    rng = np.random.default_rng(seed)
    w = rng.uniform(-0.5, 0.5, size=(hidden_units, ds.x.shape[1] + 1))
    v = rng.uniform(-0.5, 0.5, size=hidden_units + 1)
    model = NNModel(ds.x.shape[1], w, v, activation, list(ds.names))
    xs, ys = ds.x, ds.y
    xa = _augment(xs)
    best_loss = loss = _mse(model, xs, ys)
    best = (w.copy(), v.copy())
    lr = learning_rate
    for epoch in range(epochs):
        z = xa @ w.T
        g = _act(activation, z)
        pred = v[0] + g @ v[1:]
        residual = pred - ys
        if not np.isfinite(residual).all():
            raise CalibrationError(f"training diverged at epoch {epoch}")
        n = len(ds)
        grad_v0 = 2.0 * residual.mean()
        grad_v = 2.0 * (residual @ g) / n
        back = (residual[:, None] * v[1:][None, :]) * _act_prime(activation, z)
        grad_w = 2.0 * (back.T @ xa) / n
        w_new = w - lr * grad_w
        v_new = v.copy()
        v_new[0] -= lr * grad_v0
        v_new[1:] -= lr * grad_v
        trial = NNModel(ds.x.shape[1], w_new, v_new, activation, list(ds.names))
        new_loss = _mse(trial, xs, ys)
        if not math.isfinite(new_loss):
            raise CalibrationError(f"training diverged at epoch {epoch}")
        if new_loss <= loss:
            w, v, loss = w_new, v_new, new_loss
            lr *= 1.05
            if loss < best_loss:
                best_loss = loss
                best = (w.copy(), v.copy())
        else:
            lr *= 0.5
            if lr < 1e-12:
                break
    return NNModel(ds.x.shape[1], best[0], best[1], activation, list(ds.names))


def rank_relevance(model: NNModel, ds: Dataset) -> list[tuple[str, float]]:
    """Order explaining variables by mean |partial derivative| over the data."""
    scores = np.zeros(model.input_dim)
    for row in ds.x:
        for k in range(model.input_dim):
            scores[k] += abs(relevance(model, row, k))
    scores /= max(len(ds), 1)
    names = ds.names if ds.names else [f"x{k + 1}" for k in range(model.input_dim)]
    order = sorted(range(model.input_dim), key=lambda k: (-scores[k], k))
    return [(names[k], float(scores[k])) for k in order]


def save_model(model: NNModel, path: str | Path) -> None:
    payload = {
        "input_dim": model.input_dim,
        "activation": model.activation,
        "hidden_weights": model.hidden_weights.tolist(),
        "output_weights": model.output_weights.tolist(),
        "column_names": model.column_names,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_model(path: str | Path) -> NNModel:
    raw = json.loads(Path(path).read_text())
    return NNModel(
        input_dim=int(raw["input_dim"]),
        hidden_weights=np.array(raw["hidden_weights"], dtype=float),
        output_weights=np.array(raw["output_weights"], dtype=float),
        activation=raw.get("activation", "tanh"),
        column_names=list(raw.get("column_names", [])),
    )


# --- regression trees -------------------------------------------------------


@dataclass
class TreeNode:
    """Internal node (split) or leaf (statistics of the explained variable).

    Leaves carry the fraction of training rows they hold plus the variance,
    mean and standard deviation of the target over those rows, so a
    root-to-leaf path reads as a rule with its expected outcome.
    """

    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    fraction: float = 0.0
    variance: float = 0.0
    mean: float = 0.0
    std: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


def _variance(y: np.ndarray) -> float:
    """Population variance with float noise on constant data snapped to 0."""
    mean = float(y.mean())
    var = float(y.var())
    if var <= (np.finfo(float).eps * max(1.0, abs(mean))) ** 2 * len(y):
        return 0.0
    return var


def _std(y: np.ndarray) -> float:
    return math.sqrt(_variance(y))


def _leaf(y: np.ndarray, total: int) -> TreeNode:
    var = _variance(y)
    return TreeNode(
        fraction=len(y) / total, variance=var, mean=float(y.mean()), std=math.sqrt(var)
    )


def best_split(
    x: np.ndarray, y: np.ndarray, min_leaf: int
) -> tuple[int, float, float] | None:
    """Best (feature, threshold, score) by normalized std-dev reduction.

    score = 1 - (n_l*std_l + n_r*std_r) / (n*std_parent); the split with the
    largest score wins, ties resolved toward the lower feature index and
    threshold.  Returns None when no split beats zero reduction.
    """
    n = len(y)
    parent_std = _std(y)
    if parent_std <= 0 or n < 2 * min_leaf:
        return None
    best: tuple[int, float, float] | None = None
    for feature in range(x.shape[1]):
        values = np.unique(x[:, feature])
        for lo, hi in zip(values[:-1], values[1:]):
            threshold = (lo + hi) / 2.0
            mask = x[:, feature] <= threshold
            n_l = int(mask.sum())
            if n_l < min_leaf or n - n_l < min_leaf:
                continue
            weighted = (n_l * _std(y[mask]) + (n - n_l) * _std(y[~mask])) / n
            score = 1.0 - weighted / parent_std
            if score <= 1e-12:
                continue
            if best is None or score > best[2] + 1e-12:
                best = (feature, threshold, score)
    return best


def fit_tree(ds: Dataset, min_leaf: int = 1, max_depth: int = 6) -> TreeNode:
    """Greedy binary regression tree on normalized std-dev reduction."""
    if len(ds) == 0:
        raise CalibrationError("cannot fit a tree on an empty dataset")
    total = len(ds)

    def build(x: np.ndarray, y: np.ndarray, depth: int) -> TreeNode:
        if depth >= max_depth:
            return _leaf(y, total)
        split = best_split(x, y, min_leaf)
        if split is None:
            return _leaf(y, total)
        feature, threshold, _ = split
        mask = x[:, feature] <= threshold
        node = _leaf(y, total)
        node.feature = feature
        node.threshold = threshold
        node.left = build(x[mask], y[mask], depth + 1)
        node.right = build(x[~mask], y[~mask], depth + 1)
        return node

    return build(ds.x, ds.y, 0)


def tree_predict(tree: TreeNode, x: Sequence[float]) -> tuple[float, float, float]:
    """Return (mean, std, fraction) of the leaf reached by ``x``."""
    x = np.asarray(x, dtype=float)
    node = tree
    while not node.is_leaf:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.mean, node.std, node.fraction


def tree_leaves(tree: TreeNode) -> list[TreeNode]:
    if tree.is_leaf:
        return [tree]
    return tree_leaves(tree.left) + tree_leaves(tree.right)
