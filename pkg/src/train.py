"""
train.py

Softmax-regression training of an LBoW model by stochastic gradient descent.

The loss of a document is the negative log-likelihood of its gold label under the
model's class distribution. Updates touch only the word vectors of the current
document (and the hidden layer when there is one).
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import pandas as pd
from loguru import logger
from scipy.special import log_softmax
from sklearn.metrics import accuracy_score
from tqdm import tqdm

from src.config import TrainConfig
from src.corpus import Dataset, Document, Vocabulary
from src.errors import MissingLabel
from src.model import LBoWModel, SoftmaxVariant, occurrence_weights, predict_many


@dataclass(frozen=True)
class Gradient:
    """
    Gradient of the loss of one document.

    Attributes:
        rows (ndarray): distinct word indices of the document, ascending.
        embeddings (ndarray): len(rows) x n gradient w.r.t. those word vectors.
        hidden (ndarray | None): m x n gradient w.r.t. B, None without a hidden layer.
    """

    rows: np.ndarray
    embeddings: np.ndarray
    hidden: np.ndarray | None = None


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    mean_loss: float
    accuracy: float
    learning_rate: float


def init_model(
    vocab: Vocabulary, m: int, cfg: TrainConfig, labels: Sequence[str] | None = None
) -> LBoWModel:
    """
    Seeded initial model: embeddings uniform in [-1/(2n), 1/(2n)], hidden layer zero.

    Without a hidden layer the word dimension is forced to m.
    """
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    labels = tuple(labels) if labels is not None else tuple(str(j) for j in range(m))

    dim = cfg.dim if cfg.use_hidden else m
    if not cfg.use_hidden and cfg.dim != m:
        logger.info(f"No hidden layer: word dimension set to m={m} instead of {cfg.dim}")

    rng = np.random.default_rng(cfg.seed)
    bound = 1.0 / (2 * dim)
    embeddings = rng.uniform(-bound, bound, size=(len(vocab), dim))
    hidden = np.zeros((m, dim)) if cfg.use_hidden else None
    return LBoWModel(embeddings, labels, vocab.words, hidden, SoftmaxVariant.FULL)


def _logits(embeddings, hidden, variant, indices, weights) -> tuple[np.ndarray, np.ndarray]:
    y = weights @ embeddings[indices]
    if hidden is not None:
        return y, hidden @ y
    if variant is SoftmaxVariant.REDUCED:
        return y, np.append(y, 0.0)
    return y, y


def _loss_and_gradient(
    embeddings: np.ndarray,
    hidden: np.ndarray | None,
    variant: SoftmaxVariant,
    doc: Document,
) -> tuple[float, Gradient]:
    if doc.label is None:
        raise MissingLabel("loss needs a document with a gold label")
    indices, weights = occurrence_weights(doc, embeddings.shape[0])
    y, z = _logits(embeddings, hidden, variant, indices, weights)

    log_p = log_softmax(z)
    value = float(-log_p[doc.label])

    # dloss/dz = p - onehot(label)
    delta = np.exp(log_p)
    delta[doc.label] -= 1.0

    hidden_grad = None
    if hidden is not None:
        dy = hidden.T @ delta
        hidden_grad = np.outer(delta, y)
    elif variant is SoftmaxVariant.REDUCED:
        dy = delta[:-1]
    else:
        dy = delta

    return value, Gradient(indices, np.outer(weights, dy), hidden_grad)


def loss(model: LBoWModel, doc: Document) -> float:
    """-ln p_label for the document's gold label."""
    value, _ = _loss_and_gradient(model.embeddings, model.hidden, model.variant, doc)
    return value


def gradient(model: LBoWModel, doc: Document) -> Gradient:
    _, grad = _loss_and_gradient(model.embeddings, model.hidden, model.variant, doc)
    return grad


def sgd_step(model: LBoWModel, doc: Document, learning_rate: float) -> LBoWModel:
    """A new model after one gradient step on a single document."""
    embeddings = np.array(model.embeddings)
    hidden = None if model.hidden is None else np.array(model.hidden)
    _, grad = _loss_and_gradient(embeddings, hidden, model.variant, doc)
    embeddings[grad.rows] -= learning_rate * grad.embeddings
    if hidden is not None:
        hidden -= learning_rate * grad.hidden
    return LBoWModel(embeddings, model.labels, model.vocabulary, hidden, model.variant)


def accuracy(model: LBoWModel, docs: Sequence[Document]) -> float:
    gold = [doc.label for doc in docs]
    if any(label is None for label in gold):
        raise MissingLabel("accuracy needs labeled documents")
    return float(accuracy_score(gold, predict_many(model, docs)))


def train(
    dataset: Dataset,
    cfg: TrainConfig,
    on_epoch: Callable[[EpochStats], None] | None = None,
    progress: bool = False,
) -> LBoWModel:
    """
    Train an LBoW model with plain SGD.

    Documents are visited in a seeded shuffled order each epoch and the learning rate
    decays linearly from `cfg.learning_rate` to 0 over all steps.

    Args:
        dataset (Dataset): labeled, nonempty documents.
        cfg (TrainConfig): hyper-parameters.
        on_epoch (Callable | None): called with the EpochStats of every epoch.
        progress (bool): show a tqdm progress bar.

    Returns:
        LBoWModel: the final model.
    """
    docs = dataset.documents
    if not docs:
        raise ValueError("cannot train on an empty dataset")
    if any(doc.label is None for doc in docs):
        raise MissingLabel("every training document needs a gold label")

    initial = init_model(dataset.vocabulary, dataset.m, cfg, dataset.labels)
    embeddings = np.array(initial.embeddings)
    hidden = None if initial.hidden is None else np.array(initial.hidden)
    variant = initial.variant

    shuffler = np.random.default_rng([cfg.seed, 1])
    total_steps = cfg.epochs * len(docs)
    gold = [doc.label for doc in docs]
    step = 0

    for epoch in tqdm(range(cfg.epochs), desc="Training", disable=not progress):
        running_loss = 0.0
        for position in shuffler.permutation(len(docs)):
            learning_rate = cfg.learning_rate * (1.0 - step / total_steps)
            value, grad = _loss_and_gradient(embeddings, hidden, variant, docs[position])
            embeddings[grad.rows] -= learning_rate * grad.embeddings
            if hidden is not None:
                hidden -= learning_rate * grad.hidden
            running_loss += value
            step += 1

        predicted = []
        for doc in docs:
            indices, weights = occurrence_weights(doc, embeddings.shape[0])
            predicted.append(int(np.argmax(_logits(embeddings, hidden, variant, indices, weights)[1])))

        stats = EpochStats(
            epoch=epoch + 1,
            mean_loss=running_loss / len(docs),
            accuracy=float(accuracy_score(gold, predicted)),
            learning_rate=learning_rate,
        )
        logger.info(
            f"Epoch {stats.epoch}/{cfg.epochs}: loss {stats.mean_loss:.6f}, "
            f"train accuracy {stats.accuracy:.4f}"
        )
        if on_epoch is not None:
            on_epoch(stats)

    return LBoWModel(embeddings, dataset.labels, dataset.vocabulary.words, hidden, variant)


def history_frame(history: Sequence[EpochStats]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "epoch": stats.epoch,
                "loss": stats.mean_loss,
                "accuracy": stats.accuracy,
                "learning_rate": stats.learning_rate,
            }
            for stats in history
        ],
        columns=["epoch", "loss", "accuracy", "learning_rate"],
    )
