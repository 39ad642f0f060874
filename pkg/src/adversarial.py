"""
adversarial.py

The most-frequent-word (MFW) problem and the construction showing that word vectors
with fewer coordinates than classes cannot solve it.

With m words and m classes, a document's class is its most frequent word (ties go to
the lowest index). One-hot word vectors solve the problem exactly. For q < m
dimensional word vectors the m vectors are linearly dependent; an exact integer
dependence sum_i a_i x_i = 0 yields two documents with different classes whose summed
word vectors are equal, and every LBoW classifier must give both the same class.

All of the dependence work is done in exact rational arithmetic: a finite float is a
rational number, so word vectors are converted without loss.
"""

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import Iterator, Sequence

import numpy as np
from loguru import logger

from src.corpus import Document
from src.errors import (
    CounterexampleTooLong,
    DegenerateCertificate,
    DimensionMismatch,
    EmptyDocument,
    InvalidCounterexample,
    WrongDimensionality,
)
from src.model import LBoWModel, SoftmaxVariant, predict

RationalVector = tuple[Fraction, ...]

MAX_COUNTEREXAMPLE_LENGTH = 1_000_000


class SignCase(str, Enum):
    ALL_SAME_SIGN = "all-same-sign"
    MIXED_SIGNS = "mixed-signs"


def mfw_label(doc: Document, m: int) -> int:
    """Index of the most frequent word; ties go to the lowest index."""
    if len(doc) == 0:
        raise EmptyDocument("an empty document has no most frequent word")
    if not 0 <= min(doc.word_indices) <= max(doc.word_indices) < m:
        raise DimensionMismatch(f"word index outside the {m}-word dictionary")
    counts = np.bincount(np.asarray(doc.word_indices, dtype=np.int64), minlength=m)
    return int(np.argmax(counts))


@dataclass(frozen=True)
class MfwProblem:
    """The MFW classification problem over m words w0..w{m-1}, one class per word."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"the MFW problem needs at least 2 words, got {self.m}")

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(f"w{i}" for i in range(self.m))

    def label(self, doc: Document) -> int:
        return mfw_label(doc, self.m)

    def documents(self, max_length: int) -> Iterator[Document]:
        """Every document of length 1..max_length, shortest first."""
        for length in range(1, max_length + 1):
            for indices in product(range(self.m), repeat=length):
                yield Document(indices)

    def random_document(self, rng: np.random.Generator, max_length: int) -> Document:
        length = int(rng.integers(1, max_length + 1))
        return Document(tuple(int(i) for i in rng.integers(0, self.m, size=length)))


def exact_classifier(m: int) -> LBoWModel:
    """One-hot word vectors: the document vector holds the word frequencies."""
    words = MfwProblem(m).words
    return LBoWModel(np.eye(m), words, words)


@dataclass(frozen=True)
class DependenceCertificate:
    """
    Exact integer coefficients a with sum_i a_i x_i = 0 over the certified rows.
    """

    coefficients: tuple[int, ...]
    rows: tuple[RationalVector, ...]

    @property
    def nonzero_count(self) -> int:
        return sum(1 for a in self.coefficients if a != 0)

    @property
    def sign_case(self) -> SignCase:
        signs = {a > 0 for a in self.coefficients if a != 0}
        return SignCase.ALL_SAME_SIGN if len(signs) == 1 else SignCase.MIXED_SIGNS

    def residual(self) -> RationalVector:
        dim = len(self.rows[0]) if self.rows else 0
        return tuple(
            sum((a * row[c] for a, row in zip(self.coefficients, self.rows)), Fraction(0))
            for c in range(dim)
        )

    def is_exact(self) -> bool:
        return (
            len(self.coefficients) == len(self.rows)
            and self.nonzero_count > 0
            and all(value == 0 for value in self.residual())
        )


@dataclass(frozen=True)
class Counterexample:
    doc_left: Document
    doc_right: Document
    true_label_left: int
    true_label_right: int
    shared_direction: RationalVector
    sign_case: SignCase


@dataclass(frozen=True)
class FailureReport:
    """
    Outcome of classifying a counterexample pair.

    Attributes:
        prediction (int): class given to both documents (exact arithmetic).
        true_label_left (int): MFW class of the left document.
        true_label_right (int): MFW class of the right document.
        float_predictions (tuple[int, int]): the floating-point predictions.
        misclassified (int): how many of the two documents get a wrong class (>= 1).
    """

    prediction: int
    true_label_left: int
    true_label_right: int
    float_predictions: tuple[int, int]
    misclassified: int


@dataclass(frozen=True)
class AdversarialResult:
    certificate: DependenceCertificate
    counterexample: Counterexample
    report: FailureReport


def embedding_rows(model: LBoWModel, m: int | None = None) -> tuple[RationalVector, ...]:
    """The first m word vectors as exact rationals."""
    m = model.m if m is None else m
    if model.vocab_size < m:
        raise WrongDimensionality(f"model has {model.vocab_size} words, need at least {m}")
    return tuple(tuple(Fraction(float(value)) for value in row) for row in model.embeddings[:m])


def _integer_system(rows: Sequence[RationalVector], dim: int) -> list[list[int]]:
    # one equation per coordinate, one unknown per row; scaling an equation keeps the nullspace
    system = []
    for c in range(dim):
        equation = [row[c] for row in rows]
        scale = lcm(*(value.denominator for value in equation))
        system.append([int(value * scale) for value in equation])
    return system


def _fraction_free_echelon(matrix: list[list[int]]) -> tuple[list[list[int]], list[tuple[int, int]]]:
    """Bareiss elimination to row echelon form; every division is exact."""
    a = [row[:] for row in matrix]
    n_rows = len(a)
    n_cols = len(a[0]) if a else 0
    pivots: list[tuple[int, int]] = []
    previous = 1
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot_row = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        p = a[r][c]
        for i in range(r + 1, n_rows):
            for j in range(c + 1, n_cols):
                value, remainder = divmod(p * a[i][j] - a[i][c] * a[r][j], previous)
                if remainder:
                    raise ArithmeticError("inexact division in fraction-free elimination")
                a[i][j] = value
            a[i][c] = 0
        previous = p
        pivots.append((r, c))
        r += 1
    return a, pivots


def _canonical(solution: Sequence[Fraction]) -> tuple[int, ...]:
    scale = lcm(*(value.denominator for value in solution))
    integers = [int(value * scale) for value in solution]
    divisor = gcd(*integers)
    integers = [value // divisor for value in integers]
    first = next(value for value in integers if value != 0)
    if first < 0:
        integers = [-value for value in integers]
    return tuple(integers)


def find_integer_dependence(rows: Sequence[Sequence[Fraction]]) -> DependenceCertificate:
    """
    Exact integer coefficients a != 0 with sum_i a_i x_i = 0.

    The system is scaled to integers, brought to echelon form by fraction-free
    elimination, and the nullspace vector of the first free column is taken. Its
    denominators are cleared by their LCM and the result divided by the GCD, with the
    first nonzero coefficient positive.

    Args:
        rows (Sequence[Sequence[Fraction]]): m vectors of dimension q < m.

    Returns:
        DependenceCertificate: a verified certificate.

    Raises:
        WrongDimensionality: q >= m.
    """
    rows = tuple(tuple(Fraction(value) for value in row) for row in rows)
    m = len(rows)
    dim = len(rows[0]) if rows else 0
    if any(len(row) != dim for row in rows):
        raise DimensionMismatch("all rows must have the same dimension")
    if dim >= m:
        raise WrongDimensionality(f"need fewer coordinates than rows, got q={dim}, m={m}")

    echelon, pivots = _fraction_free_echelon(_integer_system(rows, dim))
    pivot_columns = {c for _, c in pivots}
    free = next(c for c in range(m) if c not in pivot_columns)

    solution = [Fraction(0)] * m
    solution[free] = Fraction(1)
    for r, c in reversed(pivots):
        rest = sum((echelon[r][j] * solution[j] for j in range(c + 1, m)), Fraction(0))
        solution[c] = -rest / echelon[r][c]

    certificate = DependenceCertificate(_canonical(solution), rows)
    if not certificate.is_exact():
        raise ArithmeticError("nullspace vector does not annihilate the rows")
    logger.debug(
        f"Dependence {certificate.coefficients} ({certificate.sign_case.value}) over {m} rows of dimension {dim}"
    )
    return certificate


def _vector_sum(rows: Sequence[RationalVector], doc: Document) -> RationalVector:
    dim = len(rows[0])
    total = [Fraction(0)] * dim
    for idx, count in Counter(doc.word_indices).items():
        for c in range(dim):
            total[c] += count * rows[idx][c]
    return tuple(total)


def _expand(coefficients: Sequence[int]) -> Document:
    return Document(tuple(i for i, count in enumerate(coefficients) for _ in range(count)))


def _copies_needed(top: int, word: int, coefficients: Sequence[int]) -> int:
    # counts in d_1 + k * d_0: top has k * a_top, word has k * a_word + 1
    gap = coefficients[top] - coefficients[word]
    if word < top:
        return 1 // gap + 1
    return 1


def _check_length(length: int, max_length: int) -> None:
    if length > max_length:
        raise CounterexampleTooLong(
            f"counterexample needs {length} words, limit is {max_length}; "
            "word vectors with small denominators give short certificates"
        )


def construct_counterexample(
    cert: DependenceCertificate,
    problem: MfwProblem,
    max_length: int = MAX_COUNTEREXAMPLE_LENGTH,
) -> Counterexample:
    """
    Two documents with different MFW classes and equal summed word vectors.

    Mixed signs: the left document holds word j a_j times for a_j > 0, the right one
    word k |a_k| times for a_k < 0.
    Same sign: d_0 holds word i |a_i| times and sums to zero. The left document is a
    single word w of another class; the right one is w followed by the fewest copies
    of d_0 that make d_0's top word the most frequent.

    Raises:
        DegenerateCertificate: the certificate does not hold or both documents would
            get the same MFW class.
        CounterexampleTooLong: a document would exceed max_length words.
    """
    m = problem.m
    if len(cert.coefficients) != m:
        raise DegenerateCertificate(f"certificate has {len(cert.coefficients)} coefficients for {m} words")
    if not cert.is_exact():
        raise DegenerateCertificate("coefficients do not sum the word vectors to zero")

    if cert.sign_case is SignCase.MIXED_SIGNS:
        positive = [max(a, 0) for a in cert.coefficients]
        negative = [max(-a, 0) for a in cert.coefficients]
        _check_length(max(sum(positive), sum(negative)), max_length)
        doc_left = _expand(positive)
        doc_right = _expand(negative)
    else:
        counts = [abs(a) for a in cert.coefficients]
        # first index of the largest count, as mfw_label would pick
        top = counts.index(max(counts))
        candidates = [
            (_copies_needed(top, word, counts), word)
            for word in range(m)
            if counts[word] < counts[top]
        ]
        if not candidates:
            raise DegenerateCertificate(
                "every word has the same coefficient; no single-word document changes class"
            )
        copies, word = min(candidates)
        _check_length(1 + copies * sum(counts), max_length)
        doc_left = Document((word,))
        doc_right = doc_left.concat(_expand(counts).repeated(copies))

    label_left, label_right = mfw_label(doc_left, m), mfw_label(doc_right, m)
    if label_left == label_right:
        raise DegenerateCertificate(f"both documents have MFW class {label_left}")

    return Counterexample(
        doc_left=doc_left,
        doc_right=doc_right,
        true_label_left=label_left,
        true_label_right=label_right,
        shared_direction=_vector_sum(cert.rows, doc_left),
        sign_case=cert.sign_case,
    )


def _exact_logits(model: LBoWModel, doc: Document) -> list[Fraction]:
    # the 1/N factor is a positive scale and cannot move the argmax
    rows = embedding_rows(model, max(doc.word_indices) + 1)
    total = _vector_sum(rows, doc)
    if model.hidden is not None:
        return [
            sum((Fraction(float(b)) * y for b, y in zip(hidden_row, total)), Fraction(0))
            for hidden_row in model.hidden
        ]
    if model.variant is SoftmaxVariant.REDUCED:
        return [*total, Fraction(0)]
    return list(total)


def exact_predict(model: LBoWModel, doc: Document) -> int:
    """The model's prediction computed in exact rational arithmetic."""
    if len(doc) == 0:
        raise EmptyDocument("cannot classify an empty document")
    z = _exact_logits(model, doc)
    best = 0
    for j, value in enumerate(z):
        if value > z[best]:
            best = j
    return best


def demonstrate_failure(model: LBoWModel, cx: Counterexample) -> FailureReport:
    """
    Classify both documents of a counterexample and confirm the forced error.

    Raises:
        WrongDimensionality: the model's word dimension is not below its class count.
        InvalidCounterexample: the documents get different predictions or share a true
            class, which means the counterexample was not built from this model.
    """
    if model.n >= model.m:
        raise WrongDimensionality(
            f"word dimension {model.n} is not below the {model.m} classes; no forced error exists"
        )
    if cx.true_label_left == cx.true_label_right:
        raise InvalidCounterexample("both documents have the same true class")

    left, right = exact_predict(model, cx.doc_left), exact_predict(model, cx.doc_right)
    if left != right:
        raise InvalidCounterexample(f"documents are classified {left} and {right}")

    misclassified = int(left != cx.true_label_left) + int(right != cx.true_label_right)
    return FailureReport(
        prediction=left,
        true_label_left=cx.true_label_left,
        true_label_right=cx.true_label_right,
        float_predictions=(predict(model, cx.doc_left), predict(model, cx.doc_right)),
        misclassified=misclassified,
    )


def find_forced_error(model: LBoWModel) -> AdversarialResult:
    """
    Run dependence -> counterexample -> failure on the model's first m word vectors,
    m being the model's class count (word i stands for class i).
    """
    if model.n >= model.m:
        raise WrongDimensionality(f"word dimension {model.n} is not below m={model.m}")
    certificate = find_integer_dependence(embedding_rows(model))
    counterexample = construct_counterexample(certificate, MfwProblem(model.m))
    report = demonstrate_failure(model, counterexample)
    logger.info(
        f"Forced error: documents of classes {report.true_label_left} and "
        f"{report.true_label_right} both classified {report.prediction}"
    )
    return AdversarialResult(certificate, counterexample, report)


def random_underdimensioned_model(m: int, q: int, seed: int = 0) -> LBoWModel:
    """
    A seeded model over the m MFW words with q-dimensional word vectors and an m x q
    hidden layer.

    Word vector entries are quarters in [-3/4, 3/4]. They are exact in float64 and keep
    the dependence coefficients, and so the counterexample documents, short; arbitrary
    floats have denominators near 2^52. Draws whose word vectors sum to zero are
    redrawn: their all-ones dependence gives no counterexample pair.
    """
    if not 1 <= q < m:
        raise WrongDimensionality(f"need 1 <= q < m, got q={q}, m={m}")
    rng = np.random.default_rng(seed)
    words = MfwProblem(m).words
    embeddings = rng.integers(-3, 4, size=(m, q)) / 4
    while not embeddings.sum(axis=0).any():
        embeddings = rng.integers(-3, 4, size=(m, q)) / 4
    hidden = rng.uniform(-1.0, 1.0, size=(m, q))
    return LBoWModel(embeddings, words, words, hidden)
