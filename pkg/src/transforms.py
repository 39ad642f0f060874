"""
transforms.py

Exact, equivalence-preserving transforms of LBoW models and the equivalence checks.

- fold_hidden_layer replaces every word vector x_i by B . x_i and drops B.
- shift_reduce subtracts each word vector's last coordinate from all of its
  coordinates and drops the resulting zero, switching to the reduced softmax.
- compress applies both, giving m-1 dimensional word vectors and no hidden layer.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from loguru import logger

from src.corpus import Document
from src.errors import (
    HasHiddenLayer,
    LabelCountMismatch,
    NoHiddenLayer,
    VocabularyMismatch,
    WrongDimensionality,
)
from src.model import LBoWModel, SoftmaxVariant, predict, predict_proba

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class EquivalenceReport:
    """
    Side-by-side comparison of two models on a document set.

    Attributes:
        n_documents (int): documents compared.
        max_abs_prob_diff (float): largest |p_A - p_B| over documents and classes.
        n_label_disagreements (int): documents whose predicted classes differ.
        tol (float): tolerance used for the strict verdict.
        strict (bool): same probabilities within tol (and same classes).
        plain (bool): same predicted class on every document.
    """

    n_documents: int
    max_abs_prob_diff: float
    n_label_disagreements: int
    tol: float
    strict: bool
    plain: bool


@dataclass(frozen=True)
class ModelSummary:
    m: int
    n: int
    vocab_size: int
    has_hidden: bool
    variant: SoftmaxVariant
    parameter_count: int
    compressed_n: int
    compressed_parameter_count: int

    @property
    def compression_ratio(self) -> float:
        return self.parameter_count / self.compressed_parameter_count


def fold_hidden_layer(model: LBoWModel) -> LBoWModel:
    """
    Fold the hidden layer into the word vectors.

    The result has m-dimensional word vectors x^_i = B . x_i, no hidden layer, and
    computes the same classification vector for every document.

    Raises:
        NoHiddenLayer: the model has no hidden layer.
    """
    if model.hidden is None:
        raise NoHiddenLayer("model has no hidden layer to fold")
    # row i of X B^T is B . x_i
    folded = model.embeddings @ model.hidden.T
    logger.debug(f"Folded hidden layer: word dimension {model.n} -> {model.m}")
    return LBoWModel(folded, model.labels, model.vocabulary, None, SoftmaxVariant.FULL)


def shift_reduce(model: LBoWModel) -> LBoWModel:
    """
    Reduce an m-dimensional flat model to m-1 dimensions.

    Row i becomes (x_{i,1} - x_{i,m}, ..., x_{i,m-1} - x_{i,m}); the model then
    classifies with the reduced softmax.

    Raises:
        HasHiddenLayer: the model still has a hidden layer.
        WrongDimensionality: the word dimension is not m.
    """
    if model.hidden is not None:
        raise HasHiddenLayer("fold the hidden layer before shift-reducing")
    if model.variant is not SoftmaxVariant.FULL or model.n != model.m:
        raise WrongDimensionality(
            f"shift-reduce needs a full-softmax model with n = m = {model.m}, got n = {model.n}"
        )
    reduced = model.embeddings[:, :-1] - model.embeddings[:, -1:]
    logger.debug(f"Shift-reduced word dimension {model.n} -> {model.n - 1}")
    return LBoWModel(reduced, model.labels, model.vocabulary, None, SoftmaxVariant.REDUCED)


def compress(model: LBoWModel) -> LBoWModel:
    """Fold (if needed) then shift-reduce. Reduced models are returned unchanged."""
    if model.variant is SoftmaxVariant.REDUCED:
        return model
    if model.hidden is not None:
        model = fold_hidden_layer(model)
    return shift_reduce(model)


def describe(model: LBoWModel) -> ModelSummary:
    compressed_n = model.m - 1
    return ModelSummary(
        m=model.m,
        n=model.n,
        vocab_size=model.vocab_size,
        has_hidden=model.has_hidden,
        variant=model.variant,
        parameter_count=model.parameter_count,
        compressed_n=compressed_n,
        compressed_parameter_count=model.vocab_size * compressed_n,
    )


def _compare(model_a: LBoWModel, model_b: LBoWModel, docs: Sequence[Document]) -> tuple[float, int]:
    max_diff, disagreements = 0.0, 0
    for doc in docs:
        diff = float(np.max(np.abs(predict_proba(model_a, doc) - predict_proba(model_b, doc))))
        max_diff = max(max_diff, diff)
        if predict(model_a, doc) != predict(model_b, doc):
            disagreements += 1
    return max_diff, disagreements


def verify_equivalence(
    model_a: LBoWModel,
    model_b: LBoWModel,
    docs: Sequence[Document],
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> EquivalenceReport:
    """
    Compare two models document by document.

    Args:
        model_a (LBoWModel): first model.
        model_b (LBoWModel): second model, over the same vocabulary and label count.
        docs (Sequence[Document]): nonempty documents.
        tol (float): tolerance of the strict verdict.
        workers (int): threads evaluating chunks of documents.

    Returns:
        EquivalenceReport: the max/count reductions, independent of evaluation order.
    """
    if model_a.m != model_b.m:
        raise LabelCountMismatch(f"models classify {model_a.m} and {model_b.m} labels")
    if model_a.vocab_size != model_b.vocab_size:
        raise VocabularyMismatch(
            f"models have {model_a.vocab_size} and {model_b.vocab_size} dictionary words"
        )

    docs = list(docs)
    if workers > 1 and len(docs) > workers:
        chunks = [docs[start::workers] for start in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda chunk: _compare(model_a, model_b, chunk), chunks))
        max_diff = max(result[0] for result in results)
        disagreements = sum(result[1] for result in results)
    else:
        max_diff, disagreements = _compare(model_a, model_b, docs)

    plain = disagreements == 0
    return EquivalenceReport(
        n_documents=len(docs),
        max_abs_prob_diff=max_diff,
        n_label_disagreements=disagreements,
        tol=tol,
        strict=plain and max_diff <= tol,
        plain=plain,
    )
