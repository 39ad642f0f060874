import numpy as np
import pytest
from loguru import logger

from src.config import get_settings
from src.corpus import Document
from src.model import LBoWModel, SoftmaxVariant


@pytest.fixture(autouse=True)
def fresh_environment():
    get_settings.cache_clear()
    yield
    # sinks added by the CLI point at streams pytest closes after each test
    logger.remove()
    get_settings.cache_clear()


def random_model(
    rng: np.random.Generator,
    m: int = 5,
    n: int = 50,
    vocab_size: int = 200,
    hidden: bool = True,
    variant: SoftmaxVariant = SoftmaxVariant.FULL,
) -> LBoWModel:
    if not hidden:
        n = m - 1 if variant is SoftmaxVariant.REDUCED else m
    words = tuple(f"t{i}" for i in range(vocab_size))
    labels = tuple(f"c{j}" for j in range(m))
    embeddings = rng.normal(size=(vocab_size, n))
    matrix = rng.normal(size=(m, n)) if hidden else None
    return LBoWModel(embeddings, labels, words, matrix, variant)


def random_document(rng: np.random.Generator, vocab_size: int, max_length: int = 50) -> Document:
    length = int(rng.integers(1, max_length + 1))
    return Document(tuple(int(i) for i in rng.integers(0, vocab_size, size=length)))


@pytest.fixture
def make_model():
    return random_model


@pytest.fixture
def make_document():
    return random_document


@pytest.fixture
def dependent_model() -> LBoWModel:
    """Word vectors (1,0), (0,1), (1,1) behind a hidden layer that ignores class 2."""
    words = ("w0", "w1", "w2")
    return LBoWModel(
        np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
        ("c0", "c1", "c2"),
        words,
        np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]),
    )


@pytest.fixture
def integer_hidden_model() -> LBoWModel:
    return LBoWModel(
        np.array([[1.0, 2.0], [3.0, -1.0], [0.0, 1.0]]),
        ("c0", "c1", "c2"),
        ("a", "b", "c"),
        np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
    )


@pytest.fixture
def sentiment_model() -> LBoWModel:
    return LBoWModel(np.eye(2), ("pos", "neg"), ("good", "bad"))


@pytest.fixture
def write_lines(tmp_path):
    def write(name: str, lines: list[str]):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return write
