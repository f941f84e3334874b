"""Native baselines: a tabular linear classifier and a graph-aware variant.

Both are weighted logistic regressions trained by full-batch gradient
descent on standardized features. The graph-aware variant augments each
user's features with projected co-occurrence statistics (per-channel
neighbor count and mean neighbor feature vector), which carries the same
pairwise signal a message-passing layer would aggregate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ValidationError
from .graph import GraphData, ProjectedUserGraph, project_user_graph
from .split import SplitAssignment

TABULAR = "tabular"
GRAPH_AGGREGATE = "graph_aggregate"


@dataclass
class TrainSettings:
    learning_rate: float = 0.5
    epochs: int = 400
    l2: float = 1e-4
    init_scale: float = 0.01
    class_weighting: str = "inverse_frequency"


@dataclass
class LinearModel:
    """Logistic model over (possibly augmented) user features."""

    kind: str
    weights: np.ndarray
    bias: float
    feature_names: tuple[str, ...]
    mean: np.ndarray
    scale: np.ndarray
    settings: TrainSettings = field(default_factory=TrainSettings)

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def weighted_logistic_loss_grad(theta: np.ndarray, X: np.ndarray, y: np.ndarray,
                                sample_weights: np.ndarray, l2: float):
    """Loss and gradient of weighted logistic NLL with L2 on the weights.

    theta packs [weights..., bias]. Returns (loss, grad) with grad matching
    theta's layout; this is the exact objective the trainer descends, and
    the finite-difference check in the tests pins it.
    """
    w, b = theta[:-1], theta[-1]
    z = X @ w + b
    p = _sigmoid(z)
    eps = 1e-12
    wsum = sample_weights.sum()
    nll = -(sample_weights * (y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))).sum() / wsum
    loss = nll + 0.5 * l2 * float(w @ w)
    resid = sample_weights * (p - y) / wsum
    grad = np.concatenate([X.T @ resid + l2 * w, [resid.sum()]])
    return loss, grad


def _class_weights(y: np.ndarray) -> np.ndarray:
    n = y.shape[0]
    n_pos = int(y.sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("training needs both classes present")
    w_pos = n / (2.0 * n_pos)
    w_neg = n / (2.0 * n_neg)
    return np.where(y == 1, w_pos, w_neg)


def _standardize_fit(X: np.ndarray):
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return mean, scale


def _fit(X: np.ndarray, y: np.ndarray, rng: np.random.Generator,
         settings: TrainSettings):
    sample_weights = _class_weights(y)
    theta = np.concatenate([
        rng.normal(0.0, settings.init_scale, X.shape[1]), [0.0],
    ])
    for _ in range(settings.epochs):
        _, grad = weighted_logistic_loss_grad(theta, X, y, sample_weights, settings.l2)
        theta -= settings.learning_rate * grad
    return theta[:-1], float(theta[-1])


def _augmented_names(base: tuple[str, ...]) -> tuple[str, ...]:
    names = list(base)
    for channel in ("device_share", "ip_share"):
        names.append(f"{channel}_neighbor_count")
        names.extend(f"{channel}_neighbor_mean_{n}" for n in base)
    return tuple(names)


def _augment_features(base: np.ndarray, proj: ProjectedUserGraph) -> np.ndarray:
    """[base | per channel: neighbor count, mean neighbor base features].

    Users with no neighbors in a channel get zeros (count and means).
    """
    n, d = base.shape
    blocks = [base]
    for channel in ("device-share", "ip-share"):
        u, v = proj.channels[channel]
        count = np.zeros(n)
        np.add.at(count, u, 1.0)
        np.add.at(count, v, 1.0)
        sums = np.zeros((n, d))
        np.add.at(sums, u, base[v])
        np.add.at(sums, v, base[u])
        means = sums / np.maximum(count, 1.0)[:, None]
        blocks.append(count[:, None])
        blocks.append(means)
    return np.concatenate(blocks, axis=1)


def _design_matrix(graph: GraphData, kind: str,
                   proj: ProjectedUserGraph | None = None):
    users = graph.nodes["user"]
    base = users.features
    if kind == TABULAR:
        return base, users.feature_names
    proj = proj if proj is not None else project_user_graph(graph)
    return _augment_features(base, proj), _augmented_names(users.feature_names)


def _train(graph: GraphData, assignment: SplitAssignment, rng, kind: str,
           settings: TrainSettings) -> LinearModel:
    X_all, names = _design_matrix(graph, kind)
    y_all = graph.nodes["user"].labels.astype(float)
    train_ids = assignment.users_in("train")
    X, y = X_all[train_ids], y_all[train_ids]
    mean, scale = _standardize_fit(X)
    weights, bias = _fit((X - mean) / scale, y, rng, settings)
    return LinearModel(
        kind=kind, weights=weights, bias=bias, feature_names=names,
        mean=mean, scale=scale, settings=settings,
    )


def train_tabular(graph: GraphData, assignment: SplitAssignment,
                  rng: np.random.Generator,
                  settings: TrainSettings | None = None) -> LinearModel:
    """Fit the features-only baseline on the train partition."""
    return _train(graph, assignment, rng, TABULAR, settings or TrainSettings())


def train_graph_aggregate(graph: GraphData, assignment: SplitAssignment,
                          rng: np.random.Generator,
                          settings: TrainSettings | None = None) -> LinearModel:
    """Fit the co-occurrence-augmented baseline on the train partition."""
    return _train(graph, assignment, rng, GRAPH_AGGREGATE, settings or TrainSettings())


def predict(model: LinearModel, graph: GraphData,
            user_ids: np.ndarray | None = None) -> dict[int, float]:
    """Score users; returns {user_id: probability}. Widths must match."""
    X_all, names = _design_matrix(graph, model.kind)
    if X_all.shape[1] != model.n_features:
        raise ConfigError(
            f"feature width mismatch: model expects {model.n_features} "
            f"columns, graph provides {X_all.shape[1]}"
        )
    if user_ids is None:
        user_ids = np.arange(graph.nodes["user"].n)
    user_ids = np.asarray(user_ids, dtype=np.int64)
    X = (X_all[user_ids] - model.mean) / model.scale
    scores = _sigmoid(X @ model.weights + model.bias)
    return {int(u): float(s) for u, s in zip(user_ids, scores)}
