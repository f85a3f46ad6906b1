"""Two-layer GCN for semi-supervised node classification, trained by
full-batch gradient descent with hand-derived gradients.

    Z = softmax(A_hat relu(A_hat X W0) W1)
    loss = -sum_{l in train} log Z[l, y_l]
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    BadDimensions,
    ConnectivityFailure,
    DegenerateParameters,
    EmptyMask,
    EmptyTrainSet,
    ShapeMismatch,
    StaleCache,
)
from .filters import renormalized_adjacency
from .formats import fmt, format_matrix_csv, parse_matrix_csv, read_text, write_text
from .graph import (
    Graph,
    build_graph,
    connected_components,
    induced_subgraph,
    read_edge_list,
    write_edge_list,
)

LOG_CLAMP = 1e-15


@dataclass(frozen=True)
class GCNModel:
    W0: np.ndarray
    W1: np.ndarray
    A_hat: np.ndarray = field(repr=False)
    rng_seed: int = 0

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.W0.shape[0], self.W0.shape[1], self.W1.shape[1]


@dataclass(frozen=True)
class NodeDataset:
    features: np.ndarray
    labels: np.ndarray
    train_mask: np.ndarray
    val_mask: np.ndarray
    test_mask: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        features = np.asarray(self.features, dtype=float)
        n = len(labels)
        if features.ndim != 2 or features.shape[0] != n:
            raise ShapeMismatch(f"features {features.shape} for {n} labels")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", features)
        masks = [np.asarray(m, dtype=np.int64).ravel() for m in (self.train_mask, self.val_mask, self.test_mask)]
        for m in masks:
            if m.size and (m.min() < 0 or m.max() >= n):
                raise ShapeMismatch("mask id out of range")
        a, b, c = (set(m.tolist()) for m in masks)
        if a & b or a & c or b & c:
            raise ShapeMismatch("masks must be disjoint")
        if masks[0].size:
            missing = set(np.unique(self.labels).tolist()) - set(self.labels[masks[0]].tolist())
            if missing:
                raise ShapeMismatch(f"classes {sorted(missing)} have no training node")
        object.__setattr__(self, "train_mask", masks[0])
        object.__setattr__(self, "val_mask", masks[1])
        object.__setattr__(self, "test_mask", masks[2])

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def num_classes(self) -> int:
        return int(self.labels.max()) + 1 if self.n else 0


@dataclass(frozen=True)
class ForwardCache:
    W0: np.ndarray
    W1: np.ndarray
    X: np.ndarray
    AX: np.ndarray
    H_pre: np.ndarray
    H: np.ndarray
    AH: np.ndarray
    logits: np.ndarray


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def init_model(C: int, H: int, F: int, A_hat, seed: int = 0) -> GCNModel:
    """Glorot-uniform weights, deterministic in ``seed``."""
    if min(C, H, F) < 1:
        raise BadDimensions(f"dimensions must be positive, got C={C}, H={H}, F={F}")
    A_hat = np.asarray(A_hat, dtype=float)
    if A_hat.ndim != 2 or A_hat.shape[0] != A_hat.shape[1]:
        raise BadDimensions(f"A_hat must be square, got {A_hat.shape}")
    rng = np.random.default_rng(seed)
    s0, s1 = glorot_bound(C, H), glorot_bound(H, F)
    W0 = rng.uniform(-s0, s0, size=(C, H))
    W1 = rng.uniform(-s1, s1, size=(H, F))
    return GCNModel(W0=W0, W1=W1, A_hat=A_hat, rng_seed=seed)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(m: GCNModel, F_in) -> tuple[np.ndarray, ForwardCache]:
    X = np.asarray(F_in, dtype=float)
    n = m.A_hat.shape[0]
    if X.ndim != 2 or X.shape != (n, m.W0.shape[0]):
        raise ShapeMismatch(f"features {X.shape} incompatible with n={n}, C={m.W0.shape[0]}")
    AX = m.A_hat @ X
    H_pre = AX @ m.W0
    H = np.maximum(H_pre, 0.0)
    AH = m.A_hat @ H
    logits = AH @ m.W1
    Z = softmax(logits)
    return Z, ForwardCache(m.W0, m.W1, X, AX, H_pre, H, AH, logits)


def loss(Z, dataset: NodeDataset) -> float:
    """Cross-entropy summed (not averaged) over the training nodes."""
    idx = dataset.train_mask
    if idx.size == 0:
        raise EmptyTrainSet("no labelled training nodes")
    p = np.maximum(Z[idx, dataset.labels[idx]], LOG_CLAMP)
    return float(-np.sum(np.log(p)))


def _same(a: np.ndarray, b: np.ndarray) -> bool:
    return a is b or (a.shape == b.shape and np.array_equal(a, b))


def backward(m: GCNModel, F_in, dataset: NodeDataset, cache: ForwardCache) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of :func:`loss` with respect to ``W0`` and ``W1``."""
    if not (_same(cache.W0, m.W0) and _same(cache.W1, m.W1)):
        raise StaleCache("cache was produced with different weights")
    X = np.asarray(F_in, dtype=float)
    if X.shape != cache.X.shape or not np.array_equal(X, cache.X):
        raise StaleCache("cache was produced from different features")
    idx = dataset.train_mask
    if idx.size == 0:
        raise EmptyTrainSet("no labelled training nodes")
    # d loss / d logits = Z - Y on training rows, 0 elsewhere
    Z = softmax(cache.logits)
    d_logits = np.zeros_like(Z)
    np.add.at(d_logits, idx, Z[idx])
    np.add.at(d_logits, (idx, dataset.labels[idx]), -1.0)
    grad_W1 = cache.AH.T @ d_logits
    d_H = m.A_hat.T @ (d_logits @ m.W1.T)
    d_H_pre = d_H * (cache.H_pre > 0)
    grad_W0 = cache.AX.T @ d_H_pre
    return grad_W0, grad_W1


def predict(m: GCNModel, F_in) -> np.ndarray:
    Z, _ = forward(m, F_in)
    # argmax returns the first maximum, i.e. the lowest class id on ties
    return np.argmax(Z, axis=1)


def accuracy(pred: np.ndarray, labels: np.ndarray, mask) -> float:
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise EmptyMask("accuracy over an empty mask")
    return float(np.mean(pred[mask] == labels[mask]))


def evaluate(m: GCNModel, dataset: NodeDataset, mask) -> float:
    return accuracy(predict(m, dataset.features), dataset.labels, mask)


@dataclass(frozen=True)
class HistoryRow:
    epoch: int
    loss: float
    train_acc: float
    val_acc: float


def train(m: GCNModel, dataset: NodeDataset, epochs: int, learning_rate: float) -> tuple[GCNModel, list[HistoryRow]]:
    """Full-batch gradient descent; each history row reports the loss and
    accuracies of the weights at the start of that epoch."""
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if learning_rate < 0:
        raise ValueError("learning rate must be non-negative")
    X = dataset.features
    history = []
    for epoch in range(1, epochs + 1):
        Z, cache = forward(m, X)
        pred = np.argmax(Z, axis=1)
        val_acc = accuracy(pred, dataset.labels, dataset.val_mask) if dataset.val_mask.size else float("nan")
        history.append(HistoryRow(
            epoch=epoch,
            loss=loss(Z, dataset),
            train_acc=accuracy(pred, dataset.labels, dataset.train_mask),
            val_acc=val_acc,
        ))
        g0, g1 = backward(m, X, dataset, cache)
        m = replace(m, W0=m.W0 - learning_rate * g0, W1=m.W1 - learning_rate * g1)
    return m, history


# ---------------------------------------------------------------------------
# synthetic data
# ---------------------------------------------------------------------------

def sbm_graph(block_sizes, p_in: float, p_out: float, rng: np.random.Generator) -> tuple[Graph, np.ndarray]:
    """One stochastic-block-model draw; returns the graph and block labels."""
    labels = np.repeat(np.arange(len(block_sizes)), block_sizes)
    n = len(labels)
    prob = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    draws = rng.random((n, n))
    iu, ju = np.triu_indices(n, k=1)
    keep = draws[iu, ju] < prob[iu, ju]
    return build_graph(n, zip(iu[keep].tolist(), ju[keep].tolist())), labels


def _split_masks(labels: np.ndarray, rng: np.random.Generator):
    train, val, test = [], [], []
    for b in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == b))
        k = len(members)
        n_train = max(1, int(round(0.1 * k)))
        n_val = int(round(0.1 * k))
        train += members[:n_train].tolist()
        val += members[n_train:n_train + n_val].tolist()
        test += members[n_train + n_val:].tolist()
    return np.sort(train), np.sort(val), np.sort(test)


def generate_sbm(
    blocks: int,
    nodes_per_block: int,
    p_in: float,
    p_out: float,
    feature_noise: float,
    seed: int = 0,
    max_attempts: int = 100,
) -> tuple[Graph, NodeDataset]:
    """Stochastic block model with one-hot block features plus Gaussian noise.

    Graphs are redrawn until connected; after ``max_attempts`` failures the
    largest component of the last draw is kept.  Masks split each block
    10% / 10% / 80% into train / validation / test.
    """
    if blocks < 2 or nodes_per_block < 1:
        raise DegenerateParameters(f"need blocks >= 2 and nodes_per_block >= 1, got {blocks}, {nodes_per_block}")
    if not 0.0 <= p_out < p_in <= 1.0:
        raise DegenerateParameters(f"need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}")
    if not feature_noise >= 0.0:
        raise DegenerateParameters(f"feature noise must be non-negative, got {feature_noise}")
    rng = np.random.default_rng(seed)
    sizes = [nodes_per_block] * blocks
    for _ in range(max_attempts):
        g, labels = sbm_graph(sizes, p_in, p_out, rng)
        parts = connected_components(g)
        if parts.component_count == 1:
            break
    else:
        counts = np.bincount(parts.component_id)
        keep = parts.members(int(np.argmax(counts)))
        g, _ = induced_subgraph(g, keep)
        labels = labels[keep]
        if len(np.unique(labels)) < blocks:
            raise ConnectivityFailure(
                f"no connected draw in {max_attempts} attempts and the largest component misses some blocks"
            )
    features = np.eye(blocks)[labels] + feature_noise * rng.standard_normal((g.n, blocks))
    train_mask, val_mask, test_mask = _split_masks(labels, rng)
    return g, NodeDataset(features, labels, train_mask, val_mask, test_mask)


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

GRAPH_FILE = "graph.tsv"
FEATURES_FILE = "features.csv"
LABELS_FILE = "labels.csv"
MASK_FILES = {"train": "train.txt", "val": "val.txt", "test": "test.txt"}


def _format_ids(ids) -> str:
    return "".join(f"{int(i)}\n" for i in ids)


def _parse_ids(text: str) -> np.ndarray:
    return np.array([int(x) for x in text.split()], dtype=np.int64)


def save_dataset(directory, g: Graph, ds: NodeDataset) -> None:
    os.makedirs(directory, exist_ok=True)
    write_edge_list(g, os.path.join(directory, GRAPH_FILE))
    write_text(os.path.join(directory, FEATURES_FILE), format_matrix_csv(ds.features))
    write_text(
        os.path.join(directory, LABELS_FILE),
        "node,label\n" + "".join(f"{i},{int(y)}\n" for i, y in enumerate(ds.labels)),
    )
    for name, mask in zip(MASK_FILES, (ds.train_mask, ds.val_mask, ds.test_mask)):
        write_text(os.path.join(directory, MASK_FILES[name]), _format_ids(mask))


def load_dataset(directory) -> tuple[Graph, NodeDataset]:
    g = read_edge_list(os.path.join(directory, GRAPH_FILE)).graph
    features = parse_matrix_csv(read_text(os.path.join(directory, FEATURES_FILE)))
    reader = csv.DictReader(io.StringIO(read_text(os.path.join(directory, LABELS_FILE))))
    pairs = sorted((int(r["node"]), int(r["label"])) for r in reader)
    labels = np.zeros(len(pairs), dtype=np.int64)
    for node, label in pairs:
        labels[node] = label
    masks = [_parse_ids(read_text(os.path.join(directory, MASK_FILES[k]))) for k in MASK_FILES]
    if features.shape[0] != g.n or len(labels) != g.n:
        raise ShapeMismatch(f"graph has {g.n} nodes, features {features.shape[0]}, labels {len(labels)}")
    return g, NodeDataset(features, labels, *masks)


def model_to_json(m: GCNModel) -> str:
    C, H, F = m.dims
    doc = {
        "dims": {"C": C, "H": H, "F": F},
        "seed": m.rng_seed,
        "W0": m.W0.tolist(),
        "W1": m.W1.tolist(),
    }
    return json.dumps(doc, indent=1) + "\n"


def model_from_json(text: str, A_hat) -> GCNModel:
    doc = json.loads(text)
    W0 = np.array(doc["W0"], dtype=float)
    W1 = np.array(doc["W1"], dtype=float)
    dims = doc["dims"]
    if W0.shape != (dims["C"], dims["H"]) or W1.shape != (dims["H"], dims["F"]):
        raise BadDimensions("checkpoint weights disagree with declared dims")
    return GCNModel(W0=W0, W1=W1, A_hat=np.asarray(A_hat, dtype=float), rng_seed=int(doc.get("seed", 0)))


def format_history(history) -> str:
    lines = ["epoch,loss,train_acc,val_acc"]
    lines += [f"{r.epoch},{fmt(r.loss)},{fmt(r.train_acc)},{fmt(r.val_acc)}" for r in history]
    return "\n".join(lines) + "\n"


def model_for_graph(g: Graph, C: int, H: int, F: int, seed: int = 0) -> GCNModel:
    return init_model(C, H, F, renormalized_adjacency(g), seed)
