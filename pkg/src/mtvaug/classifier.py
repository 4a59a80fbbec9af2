"""Linear classifier trained by minibatch SGD on the weighted joint objective

    J = gamma_o * J_original + gamma_aug * J_augmented

with augmented minibatches regenerated online from the originals.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .augment import AugmentationConfig, augment, augment_dataset
from .errors import DimensionMismatch
from .features import FeatureVector, Rows, featurize_batch
from .rng import TAG_AUGMENT, TAG_ORDER, RandomStream
from .textcore import Dataset

MODEL_MAGIC = b"MTVLIN"
MODEL_VERSION = 1
DEFAULT_DIM = 1 << 18


class LossKind(str, enum.Enum):
    LOGISTIC = "logistic"
    HINGE_OVR = "hinge_ovr"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MixWeights:
    """Weights of the original-data and augmented-data loss terms (sum to 1)."""

    gamma_o: float
    gamma_aug: float | None = None

    def __post_init__(self):
        if self.gamma_aug is None:
            object.__setattr__(self, "gamma_aug", 1.0 - self.gamma_o)
        for name in ("gamma_o", "gamma_aug"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if abs(self.gamma_o + self.gamma_aug - 1.0) > 1e-12:
            raise ValueError("gamma_o + gamma_aug must equal 1")

    @classmethod
    def vanilla(cls) -> "MixWeights":
        return cls(1.0, 0.0)

    @classmethod
    def traditional(cls) -> "MixWeights":
        return cls(0.0, 1.0)


def mtv_loss(weights: MixWeights, loss_o: float, loss_aug: float) -> float:
    return weights.gamma_o * loss_o + weights.gamma_aug * loss_aug


@dataclass(frozen=True)
class TrainConfig:
    loss: LossKind = LossKind.HINGE_OVR
    epochs: int = 1000
    batch_size: int = 32
    learning_rate: float = 0.1
    l2_lambda: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "loss", LossKind(self.loss))
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be at least 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be non-negative")


@dataclass
class LinearModel:
    """Class scores ``weights @ x + bias`` for ``C`` classes over ``D`` features."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ValueError("weights must be C x D and bias length C")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("model parameters must be finite")

    @classmethod
    def zeros(cls, n_classes: int, dim: int) -> "LinearModel":
        return cls(np.zeros((n_classes, dim)), np.zeros(n_classes))

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def scores(self, X: sp.spmatrix | np.ndarray) -> np.ndarray:
        if X.shape[1] != self.dim:
            raise DimensionMismatch(f"input has {X.shape[1]} features, model expects {self.dim}")
        return np.asarray(X @ self.weights.T) + self.bias

    def predict(self, X) -> np.ndarray:
        # argmax returns the first maximum, so ties go to the lowest class id
        return np.argmax(self.scores(X), axis=1)

    def save(self, path: str | Path) -> None:
        """Binary layout (little-endian): magic ``MTVLIN``, version byte,
        uint32 C, uint32 D, C float64 biases, C*D float64 weights row-major."""
        with open(path, "wb") as fh:
            fh.write(MODEL_MAGIC + bytes([MODEL_VERSION]))
            fh.write(struct.pack("<II", self.n_classes, self.dim))
            fh.write(self.bias.astype("<f8").tobytes())
            fh.write(np.ascontiguousarray(self.weights).astype("<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "LinearModel":
        blob = Path(path).read_bytes()
        head = len(MODEL_MAGIC)
        if blob[:head] != MODEL_MAGIC:
            raise ValueError(f"{path}: not a model file")
        if blob[head] != MODEL_VERSION:
            raise ValueError(f"{path}: unsupported model version {blob[head]}")
        n_classes, dim = struct.unpack_from("<II", blob, head + 1)
        offset = head + 9
        expected = offset + 8 * n_classes * (dim + 1)
        if len(blob) != expected:
            raise ValueError(f"{path}: truncated or oversized model file")
        bias = np.frombuffer(blob, "<f8", n_classes, offset)
        weights = np.frombuffer(blob, "<f8", n_classes * dim, offset + 8 * n_classes)
        return cls(weights.reshape(n_classes, dim).astype(np.float64),
                   bias.astype(np.float64))


def _row_scores(W, b, rows: Rows) -> np.ndarray:
    if rows.vals.size == 0:
        return np.tile(b, (rows.n_rows, 1))
    contrib = W[:, rows.cols] * rows.vals
    return np.add.reduceat(contrib, rows.indptr[:-1], axis=1).T + b


def _loss_and_grad(W, b, rows: Rows, y, loss, sample_weight=None):
    """Loss and gradient on a batch; ``sample_weight`` defaults to 1/B each.

    Every row must have at least one nonzero (featurizer output always does).
    """
    n = rows.n_rows
    scores = _row_scores(W, b, rows)
    if sample_weight is None:
        sample_weight = np.full(n, 1.0 / n)
    idx = np.arange(n)
    if loss is LossKind.LOGISTIC:
        shifted = scores - scores.max(axis=1, keepdims=True)
        expd = np.exp(shifted)
        total = expd.sum(axis=1)
        per_example = np.log(total) - shifted[idx, y]
        dscores = expd / total[:, None]
        dscores[idx, y] -= 1.0
    else:
        n_classes = scores.shape[1]
        signs = -np.ones_like(scores)
        signs[idx, y] = 1.0
        margins = 1.0 - signs * scores
        active = margins > 0
        per_example = np.where(active, margins, 0.0).sum(axis=1) / n_classes
        dscores = np.where(active, -signs, 0.0) / n_classes
    dscores *= sample_weight[:, None]
    per_nnz = dscores[rows.row_ids()]
    per_nnz *= rows.vals[:, None]
    grad_w = np.empty_like(W)
    for c in range(W.shape[0]):
        grad_w[c] = np.bincount(rows.cols, weights=per_nnz[:, c], minlength=rows.dim)
    grad_b = dscores.sum(axis=0)
    return float(per_example @ sample_weight), grad_w, grad_b


def loss_and_grad(model: LinearModel, batch: Sequence[tuple[FeatureVector, int]],
                  loss: LossKind | str) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean batch loss and its gradient w.r.t. ``(weights, bias)``, L2 term excluded.

    Logistic is softmax cross-entropy. Hinge is one-vs-rest:
    ``(1/C) * sum_c max(0, 1 - y_c * s_c)`` with ``y_c = +1`` only for the true class.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    rows = Rows.from_vectors((fv for fv, _ in batch), model.dim)
    y = np.array([label for _, label in batch], dtype=np.int64)
    if np.any((y < 0) | (y >= model.n_classes)):
        raise ValueError("class id outside the model's classes")
    return _loss_and_grad(model.weights, model.bias, rows, y, LossKind(loss))


class StepRecord(NamedTuple):
    """Per-update losses. ``loss_combined`` is evaluated in one pass over the
    concatenated original + augmented batch with per-example weights
    ``gamma_o/B`` and ``gamma_aug/B``."""

    epoch: int
    step: int
    loss_original: float
    loss_augmented: float
    loss_combined: float


def train_mtv(train: Dataset, cfg: TrainConfig, aug: AugmentationConfig | None,
              lexicon: Mapping[str, Sequence[str]] | None, weights: MixWeights,
              dim: int = DEFAULT_DIM, *, aug_seed: int | None = None,
              on_step: Callable[[StepRecord], None] | None = None) -> LinearModel:
    """Fit a linear model with online paired augmentation.

    Every minibatch of originals ``B_o`` is paired with ``B_a``, a fresh
    augmentation of each member, and the update uses
    ``gamma_o * grad(B_o) + gamma_aug * grad(B_a)``.

    Two streams come from ``cfg.seed``: one for example order and one for
    augmentation (overridable through ``aug_seed``). The order stream is
    consumed identically whatever the weights, so ``gamma_aug == 0`` (or an
    identity augmentation, ``alpha == 0``) reproduces plain training bit for bit.
    """
    if lexicon is None:
        lexicon = {}
    loss = cfg.loss
    order_rng = RandomStream.derived(cfg.seed, TAG_ORDER)
    aug_rng = RandomStream(aug_seed) if aug_seed is not None \
        else RandomStream.derived(cfg.seed, TAG_AUGMENT)
    use_aug = aug is not None and not aug.is_identity and weights.gamma_aug > 0
    need_original = weights.gamma_o > 0 or not use_aug or on_step is not None

    examples = train.examples
    all_rows = featurize_batch((ex.sequence for ex in examples), dim)
    feats = [all_rows.row(i) for i in range(len(examples))]
    labels = np.array(train.labels, dtype=np.int64)
    W = np.zeros((train.n_classes, dim))
    b = np.zeros(train.n_classes)
    lr, lam, bs = cfg.learning_rate, cfg.l2_lambda, cfg.batch_size
    gamma_o, gamma_aug = weights.gamma_o, weights.gamma_aug

    order = list(range(len(examples)))
    step = 0
    for epoch in range(cfg.epochs):
        order_rng.shuffle(order)
        for start in range(0, len(order), bs):
            ids = order[start:start + bs]
            y = labels[ids]
            if need_original:
                Xo = Rows.from_arrays([feats[i] for i in ids], dim)
                loss_o, gw, gb = _loss_and_grad(W, b, Xo, y, loss)
            if use_aug:
                Xa = featurize_batch(
                    [augment(examples[i].sequence, aug, lexicon, aug_rng) for i in ids], dim)
                loss_a, gwa, gba = _loss_and_grad(W, b, Xa, y, loss)
                if gamma_o == 0:
                    gw, gb = gwa, gba
                else:
                    gw = gamma_o * gw + gamma_aug * gwa
                    gb = gamma_o * gb + gamma_aug * gba
            else:
                Xa, loss_a = Xo, loss_o
            if on_step is not None:
                on_step(StepRecord(epoch, step, loss_o, loss_a,
                                   _combined_loss(W, b, Xo, Xa, y, loss, weights)))
            # w <- w - lr * (g + lam * w), in place; the bias is not regularized
            gw += lam * W
            gw *= lr
            W -= gw
            b -= lr * gb
            step += 1
    return LinearModel(W, b)


def _combined_loss(W, b, Xo, Xa, y, loss, weights):
    n_o, n_a = Xo.n_rows, Xa.n_rows
    X = Xo.concat(Xa)
    sample_weight = np.concatenate([np.full(n_o, weights.gamma_o / n_o),
                                    np.full(n_a, weights.gamma_aug / n_a)])
    return _loss_and_grad(W, b, X, np.concatenate([y, y]), loss, sample_weight)[0]


def equal_updates_epochs(baseline_epochs: int, baseline_size: int, corpus_size: int) -> int:
    """Epoch count giving a ``corpus_size`` corpus the same number of example
    updates as ``baseline_epochs`` over ``baseline_size`` (half-up, at least 1)."""
    if min(baseline_epochs, baseline_size, corpus_size) < 1:
        raise ValueError("all arguments must be at least 1")
    numerator = baseline_epochs * baseline_size
    return max(1, (2 * numerator + corpus_size) // (2 * corpus_size))


def train_static(train: Dataset, cfg: TrainConfig, aug: AugmentationConfig,
                 lexicon: Mapping[str, Sequence[str]] | None, copies: int,
                 dim: int = DEFAULT_DIM, include_original: bool = False) -> LinearModel:
    """Train plainly on a pre-generated augmented corpus.

    Epochs are rescaled with :func:`equal_updates_epochs` so the model sees
    as many example updates as ``cfg.epochs`` over ``train`` alone.
    """
    aug_rng = RandomStream.derived(cfg.seed, TAG_AUGMENT)
    corpus = augment_dataset(train, aug, lexicon or {}, copies, aug_rng,
                             include_original=include_original)
    epochs = equal_updates_epochs(cfg.epochs, len(train), len(corpus))
    return train_mtv(corpus, replace(cfg, epochs=epochs), None, None, MixWeights.vanilla(), dim)


def evaluate(model: LinearModel, test: Dataset, dim: int | None = None) -> float:
    """Accuracy of argmax predictions; ties resolve to the lowest class id."""
    dim = model.dim if dim is None else dim
    if dim != model.dim:
        raise DimensionMismatch(f"dimension {dim} != model dimension {model.dim}")
    if len(test) == 0:
        raise ValueError("test set is empty")
    X = featurize_batch((ex.sequence for ex in test), dim).to_csr()
    predicted = model.predict(X)
    return float(np.mean(predicted == np.array(test.labels)))
