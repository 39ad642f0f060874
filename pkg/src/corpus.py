"""
corpus.py

Ingests labeled text, builds the dictionary and encodes documents as sequences of
word-occurrence indices.

Labeled-text format: UTF-8, one document per line, label tokens of the form
`__label__<name>` anywhere in the line, every other token is text.
"""

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from loguru import logger

from src.errors import (
    DuplicateLabel,
    EmptyDocument,
    EmptyVocabulary,
    MissingLabel,
    TooFewLabels,
    UnknownLabel,
)

LABEL_PREFIX = "__label__"


def tokenize(text: str, lowercase: bool = False) -> list[str]:
    """
    Split text on Unicode whitespace, optionally lowercasing every token.

    Args:
        text (str): raw text.
        lowercase (bool): lowercase the tokens.

    Returns:
        list[str]: tokens in order, duplicates preserved. Empty for empty input.
    """
    tokens = text.split()
    if lowercase:
        return [token.lower() for token in tokens]
    return tokens


@dataclass(frozen=True)
class Vocabulary:
    """
    Bijection between dictionary words and dense indices, with occurrence counts.

    Attributes:
        words (tuple[str, ...]): distinct words; position is the word index.
        counts (tuple[int, ...]): corpus count of each word.
        min_count (int): the filter threshold the vocabulary was built with.
    """

    words: tuple[str, ...]
    counts: tuple[int, ...]
    min_count: int = 1
    index_of: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.words) != len(self.counts):
            raise ValueError("words and counts must have the same length")
        index_of = {word: idx for idx, word in enumerate(self.words)}
        if len(index_of) != len(self.words):
            raise ValueError("vocabulary words must be distinct")
        if any(count < self.min_count for count in self.counts):
            raise ValueError(f"every count must be at least min_count={self.min_count}")
        object.__setattr__(self, "index_of", MappingProxyType(index_of))

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Vocabulary":
        words = tuple(words)
        return cls(words, (1,) * len(words), 1)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index_of

    def count_of(self, word: str) -> int:
        return self.counts[self.index_of[word]]


@dataclass(frozen=True)
class Document:
    """
    A document as word-occurrence indices (order preserved) with an optional gold label.
    """

    word_indices: tuple[int, ...]
    label: int | None = None

    def __len__(self) -> int:
        return len(self.word_indices)

    def repeated(self, times: int) -> "Document":
        """The document concatenated with itself `times` times."""
        if times < 1:
            raise ValueError("times must be at least 1")
        return Document(self.word_indices * times, self.label)

    def concat(self, other: "Document") -> "Document":
        return Document(self.word_indices + other.word_indices, self.label)


@dataclass(frozen=True)
class Dataset:
    vocabulary: Vocabulary
    documents: tuple[Document, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 2:
            raise TooFewLabels(f"a dataset needs at least 2 labels, got {len(self.labels)}")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("label names must be distinct")
        for doc in self.documents:
            if doc.label is not None and not 0 <= doc.label < len(self.labels):
                raise UnknownLabel(f"label index {doc.label} outside [0, {len(self.labels)})")

    @property
    def m(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.documents)


@dataclass(frozen=True)
class EncodingSummary:
    n_lines: int
    n_documents: int
    n_tokens: int
    n_oov_tokens: int
    n_dropped: int


class LabeledLine(NamedTuple):
    label: str | None
    tokens: list[str]
    line_number: int = 0


def build_vocabulary(corpus: Iterable[Sequence[str]], min_count: int = 1) -> Vocabulary:
    """
    Count tokens and keep those seen at least `min_count` times.

    Indices follow the order of first appearance in the corpus.

    Raises:
        EmptyVocabulary: when no token survives the filter.
    """
    if min_count < 1:
        raise ValueError("min_count must be at least 1")
    counter: Counter[str] = Counter()
    for tokens in corpus:
        counter.update(tokens)

    kept = [(word, count) for word, count in counter.items() if count >= min_count]
    if not kept:
        raise EmptyVocabulary(f"no token occurs at least {min_count} times")

    words, counts = zip(*kept)
    logger.debug(f"Vocabulary: kept {len(words)} of {len(counter)} distinct tokens")
    return Vocabulary(tuple(words), tuple(counts), min_count)


def count_oov(tokens: Iterable[str], vocab: Vocabulary) -> int:
    return sum(1 for token in tokens if token not in vocab)


def encode_document(
    tokens: Sequence[str],
    vocab: Vocabulary,
    label: str | None = None,
    labels: Sequence[str] = (),
    distinct: bool = False,
) -> Document:
    """
    Encode a token sequence, dropping out-of-vocabulary tokens.

    Args:
        tokens (Sequence[str]): the document tokens.
        vocab (Vocabulary): dictionary to encode against.
        label (str | None): gold label name, resolved against `labels`.
        labels (Sequence[str]): the dataset label list.
        distinct (bool): keep only the first occurrence of every word.

    Returns:
        Document: one index per in-vocabulary occurrence, order preserved.

    Raises:
        EmptyDocument: no token is in the vocabulary.
        UnknownLabel: `label` is not in `labels`.
    """
    label_index = None
    if label is not None:
        try:
            label_index = list(labels).index(label)
        except ValueError as err:
            raise UnknownLabel(f"unknown label {label!r}") from err

    indices = [vocab.index_of[token] for token in tokens if token in vocab.index_of]
    if distinct:
        indices = list(dict.fromkeys(indices))
    if not indices:
        raise EmptyDocument("no token of the document is in the vocabulary")
    return Document(tuple(indices), label_index)


def encode_lines(
    records: Iterable[tuple[str | None, Sequence[str]]],
    vocab: Vocabulary,
    labels: Sequence[str] | None = None,
    distinct: bool = False,
) -> list[Document | None]:
    """
    Encode labeled records one by one, keeping their positions.

    A record with no in-vocabulary word gives None in its slot. Record labels are
    resolved against `labels` when it is given and ignored otherwise.

    Raises:
        UnknownLabel: a record label is not in `labels`.
    """
    documents: list[Document | None] = []
    for record in records:
        label, tokens = record[0], record[1]
        try:
            if labels is None:
                documents.append(encode_document(tokens, vocab, distinct=distinct))
            else:
                documents.append(encode_document(tokens, vocab, label, labels, distinct))
        except EmptyDocument:
            documents.append(None)
    return documents


def parse_labeled_line(
    line: str, require_label: bool = True, lowercase: bool = False
) -> tuple[str | None, list[str]]:
    """
    Split a line of the labeled-text format into its label and text tokens.

    The first label token wins; a label token repeated on the same line is rejected.
    Label names are never lowercased.

    Raises:
        MissingLabel: `require_label` is set and the line has no label token.
        DuplicateLabel: the same label token occurs twice.
    """
    label_names: list[str] = []
    text: list[str] = []
    for token in line.split():
        if token.startswith(LABEL_PREFIX) and len(token) > len(LABEL_PREFIX):
            label_names.append(token[len(LABEL_PREFIX) :])
        else:
            text.append(token)

    if len(set(label_names)) != len(label_names):
        raise DuplicateLabel(f"label token repeated in line: {line.strip()!r}")
    if len(label_names) > 1:
        logger.debug(f"Several labels on one line, keeping {label_names[0]!r}")
    if require_label and not label_names:
        raise MissingLabel(f"line has no {LABEL_PREFIX} token: {line.strip()!r}")

    tokens = tokenize(" ".join(text), lowercase=lowercase)
    return (label_names[0] if label_names else None), tokens


def read_labeled_file(
    path: str | Path, require_label: bool = True, lowercase: bool = False
) -> list[LabeledLine]:
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            try:
                label, tokens = parse_labeled_line(line, require_label, lowercase)
            except (MissingLabel, DuplicateLabel) as err:
                raise type(err)(f"{path}:{line_number}: {err}") from err
            records.append(LabeledLine(label, tokens, line_number))
    return records


def build_dataset(
    records: Sequence[tuple[str | None, Sequence[str]]],
    min_count: int = 1,
    distinct: bool = False,
) -> tuple[Dataset, EncodingSummary]:
    """
    Build the vocabulary and encode every labeled record.

    Records that become empty after the min_count filter are dropped and counted.

    Returns:
        tuple[Dataset, EncodingSummary]: the dataset and its encoding summary.
    """
    labels: list[str] = []
    for record in records:
        label = record[0]
        if label is None:
            raise MissingLabel("every training record needs a label")
        if label not in labels:
            labels.append(label)

    vocab = build_vocabulary((record[1] for record in records), min_count)

    n_tokens = sum(len(record[1]) for record in records)
    n_oov = sum(count_oov(record[1], vocab) for record in records)
    encoded = encode_lines(records, vocab, labels, distinct)
    documents = [doc for doc in encoded if doc is not None]
    n_dropped = len(encoded) - len(documents)

    if n_dropped:
        logger.warning(f"Dropped {n_dropped} documents with no in-vocabulary word")
    if not documents:
        raise EmptyDocument("no document has an in-vocabulary word")

    summary = EncodingSummary(
        n_lines=len(records),
        n_documents=len(documents),
        n_tokens=n_tokens,
        n_oov_tokens=n_oov,
        n_dropped=n_dropped,
    )
    return Dataset(vocab, tuple(documents), tuple(labels)), summary


def load_dataset(
    path: str | Path,
    min_count: int = 1,
    lowercase: bool = False,
    distinct: bool = False,
) -> tuple[Dataset, EncodingSummary]:
    records = read_labeled_file(path, require_label=True, lowercase=lowercase)
    dataset, summary = build_dataset(records, min_count=min_count, distinct=distinct)
    logger.info(
        f"Loaded {summary.n_documents} documents, {len(dataset.vocabulary)} words, "
        f"{dataset.m} labels from {path}"
    )
    return dataset, summary
