"""
model.py

The LBoW forward pass: the document vector is the mean of the document's word
vectors, an optional linear hidden layer maps it to the classification vector, and
a softmax turns that into class probabilities. Reduced models carry m-1 dimensional
word vectors and classify with the last class's logit fixed at zero.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
import numpy.typing as npt
from scipy.special import softmax as _softmax

from src.corpus import Document, Vocabulary
from src.errors import DimensionMismatch, EmptyDocument, InvalidModel

DocumentVector = npt.NDArray[np.float64]
ClassificationVector = npt.NDArray[np.float64]
ClassDistribution = npt.NDArray[np.float64]


class SoftmaxVariant(str, Enum):
    FULL = "full"
    REDUCED = "reduced"


def _frozen_matrix(values, name: str) -> npt.NDArray[np.float64]:
    matrix = np.array(values, dtype=np.float64, copy=True)
    if matrix.ndim != 2:
        raise InvalidModel(f"{name} must be a matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidModel(f"{name} has non-finite entries")
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class LBoWModel:
    """
    Linear bag-of-words classifier (X, B).

    Attributes:
        embeddings (ndarray): |D| x n word vectors, row i is the vector of word i.
        labels (tuple[str, ...]): the m class names.
        vocabulary (tuple[str, ...]): the |D| dictionary words in index order.
        hidden (ndarray | None): m x n hidden layer B, or None.
        variant (SoftmaxVariant): FULL (softmax over z) or REDUCED (m-1 logits
            plus an implicit zero).
    """

    embeddings: npt.NDArray[np.float64]
    labels: tuple[str, ...]
    vocabulary: tuple[str, ...]
    hidden: npt.NDArray[np.float64] | None = None
    variant: SoftmaxVariant = SoftmaxVariant.FULL

    def __post_init__(self):
        object.__setattr__(self, "embeddings", _frozen_matrix(self.embeddings, "embeddings"))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "vocabulary", tuple(self.vocabulary))
        object.__setattr__(self, "variant", SoftmaxVariant(self.variant))
        if self.hidden is not None:
            object.__setattr__(self, "hidden", _frozen_matrix(self.hidden, "hidden"))

        m, n = len(self.labels), self.embeddings.shape[1]
        if m < 2:
            raise InvalidModel(f"a model needs at least 2 labels, got {m}")
        if len(self.vocabulary) != self.embeddings.shape[0]:
            raise InvalidModel(
                f"{len(self.vocabulary)} vocabulary words for {self.embeddings.shape[0]} embedding rows"
            )
        if self.hidden is not None:
            if self.variant is SoftmaxVariant.REDUCED:
                raise InvalidModel("a reduced-softmax model cannot have a hidden layer")
            if self.hidden.shape != (m, n):
                raise InvalidModel(f"hidden layer must be {m}x{n}, got {self.hidden.shape}")
        elif self.variant is SoftmaxVariant.FULL and n != m:
            raise InvalidModel(f"without a hidden layer the word dimension must be m={m}, got {n}")
        elif self.variant is SoftmaxVariant.REDUCED and n != m - 1:
            raise InvalidModel(f"a reduced model needs word dimension m-1={m - 1}, got {n}")
        if len(set(self.vocabulary)) != len(self.vocabulary):
            raise InvalidModel("vocabulary words must be distinct")

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return self.embeddings.shape[1]

    @property
    def vocab_size(self) -> int:
        return self.embeddings.shape[0]

    @property
    def has_hidden(self) -> bool:
        return self.hidden is not None

    def as_vocabulary(self) -> Vocabulary:
        """The model's dictionary for encoding new text (corpus counts are not kept)."""
        return Vocabulary.from_words(self.vocabulary)

    @property
    def parameter_count(self) -> int:
        return self.embeddings.size + (self.hidden.size if self.hidden is not None else 0)


def occurrence_weights(doc: Document, vocab_size: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Distinct word indices in ascending order and their frequencies k_w / N.

    Frequencies are exact integer ratios rounded once, so a document and any
    repetition of it get bitwise identical weights.

    Raises:
        EmptyDocument: the document has no occurrence.
        DimensionMismatch: an index is outside the vocabulary.
    """
    if len(doc) == 0:
        raise EmptyDocument("cannot classify an empty document")
    indices, counts = np.unique(np.asarray(doc.word_indices, dtype=np.int64), return_counts=True)
    if indices[0] < 0 or indices[-1] >= vocab_size:
        raise DimensionMismatch(f"word index outside vocabulary of size {vocab_size}")
    return indices, counts / len(doc)


def document_vector(doc: Document, model: LBoWModel) -> DocumentVector:
    """The mean of the word vectors of all occurrences."""
    indices, weights = occurrence_weights(doc, model.vocab_size)
    return weights @ model.embeddings[indices]


def classification_vector(y: DocumentVector, hidden: np.ndarray) -> ClassificationVector:
    """z = B . y"""
    if hidden.ndim != 2 or hidden.shape[1] != y.shape[0]:
        raise DimensionMismatch(f"hidden layer {hidden.shape} cannot multiply a vector of length {y.shape[0]}")
    return hidden @ y


def softmax(z: ClassificationVector) -> ClassDistribution:
    # scipy subtracts the maximum before exponentiating
    return _softmax(np.asarray(z, dtype=np.float64))


def reduced_softmax(y: DocumentVector) -> ClassDistribution:
    """
    Class distribution over m classes from an (m-1)-dimensional vector.

    p_j = e^{y_j} / (1 + sum_k e^{y_k}) for j < m and p_m = 1 / (1 + sum_k e^{y_k}),
    which is the softmax of y with a zero logit appended.
    """
    return softmax(np.append(np.asarray(y, dtype=np.float64), 0.0))


def logits(model: LBoWModel, doc: Document) -> ClassificationVector:
    """The m values whose argmax is the predicted class."""
    y = document_vector(doc, model)
    if model.hidden is not None:
        return classification_vector(y, model.hidden)
    if model.variant is SoftmaxVariant.REDUCED:
        return np.append(y, 0.0)
    return y


def predict_proba(model: LBoWModel, doc: Document) -> ClassDistribution:
    if model.variant is SoftmaxVariant.REDUCED:
        return reduced_softmax(document_vector(doc, model))
    return softmax(logits(model, doc))


def predict(model: LBoWModel, doc: Document) -> int:
    """Index of the largest logit; ties go to the lowest index."""
    return int(np.argmax(logits(model, doc)))


def predict_label(model: LBoWModel, doc: Document) -> str:
    return model.labels[predict(model, doc)]


def predict_many(model: LBoWModel, docs: Sequence[Document]) -> list[int]:
    return [predict(model, doc) for doc in docs]


@dataclass
class MultiplyCounter:
    multiplies: int = 0

    def add(self, count: int) -> None:
        self.multiplies += int(count)


def forward_counted(model: LBoWModel, doc: Document, counter: MultiplyCounter) -> ClassificationVector:
    """
    Run the forward pass occurrence by occurrence while counting elementwise multiplies.

    Every occurrence is scaled by 1/N on its own (N * n multiplies), then the hidden
    layer, if any, costs m * n more.
    """
    if len(doc) == 0:
        raise EmptyDocument("cannot classify an empty document")
    scale = 1.0 / len(doc)
    y = np.zeros(model.n)
    for idx in doc.word_indices:
        row = model.embeddings[idx]
        y += scale * row
        counter.add(row.size)
    if model.hidden is not None:
        counter.add(model.hidden.size)
        return model.hidden @ y
    if model.variant is SoftmaxVariant.REDUCED:
        return np.append(y, 0.0)
    return y


def closed_form_multiplies(model: LBoWModel, n_occurrences: int) -> int:
    """N*n + m*n with a hidden layer, N*m without, N*(m-1) for reduced models."""
    if model.hidden is not None:
        return n_occurrences * model.n + model.hidden.size
    return n_occurrences * model.n
