"""
bench.py

Measures how much work compression saves: exact multiply counts per document from the
counted forward pass, and wall-clock documents per second for a model and its
compressed equivalent.
"""

import time
from dataclasses import dataclass
from typing import Sequence

from tqdm import tqdm

from src.corpus import Document
from src.model import LBoWModel, MultiplyCounter, closed_form_multiplies, forward_counted, predict_proba
from src.transforms import compress


@dataclass(frozen=True)
class BenchReport:
    """
    Attributes:
        n_documents (int): documents per pass.
        repeat (int): timed passes per model.
        precursor_docs_per_second (float): throughput of the given model.
        compressed_docs_per_second (float): throughput of its compressed form.
        precursor_multiplies (tuple[int, ...]): counted multiplies per document.
        compressed_multiplies (tuple[int, ...]): counted multiplies per document.
        counts_match_closed_form (bool): every count equals its closed form.
    """

    n_documents: int
    repeat: int
    precursor_docs_per_second: float
    compressed_docs_per_second: float
    precursor_multiplies: tuple[int, ...]
    compressed_multiplies: tuple[int, ...]
    counts_match_closed_form: bool

    @property
    def multiply_ratio(self) -> float:
        return sum(self.precursor_multiplies) / sum(self.compressed_multiplies)

    @property
    def speedup(self) -> float:
        return self.compressed_docs_per_second / self.precursor_docs_per_second


def count_multiplies(model: LBoWModel, doc: Document) -> int:
    counter = MultiplyCounter()
    forward_counted(model, doc, counter)
    return counter.multiplies


def docs_per_second(model: LBoWModel, docs: Sequence[Document], repeat: int = 1, progress: bool = False) -> float:
    start = time.perf_counter()
    for _ in tqdm(range(repeat), desc="Benchmarking", disable=not progress):
        for doc in docs:
            predict_proba(model, doc)
    elapsed = time.perf_counter() - start
    return len(docs) * repeat / elapsed if elapsed > 0 else float("inf")


def run_benchmark(model: LBoWModel, docs: Sequence[Document], repeat: int = 1, progress: bool = False) -> BenchReport:
    if not docs:
        raise ValueError("benchmark needs at least one document")
    if repeat < 1:
        raise ValueError("repeat must be at least 1")
    compressed = compress(model)

    precursor_counts = tuple(count_multiplies(model, doc) for doc in docs)
    compressed_counts = tuple(count_multiplies(compressed, doc) for doc in docs)
    matches = all(
        counted == closed_form_multiplies(model, len(doc))
        for counted, doc in zip(precursor_counts, docs)
    ) and all(
        counted == closed_form_multiplies(compressed, len(doc))
        for counted, doc in zip(compressed_counts, docs)
    )

    return BenchReport(
        n_documents=len(docs),
        repeat=repeat,
        precursor_docs_per_second=docs_per_second(model, docs, repeat, progress),
        compressed_docs_per_second=docs_per_second(compressed, docs, repeat, progress),
        precursor_multiplies=precursor_counts,
        compressed_multiplies=compressed_counts,
        counts_match_closed_form=matches,
    )
