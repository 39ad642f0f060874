import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from src.corpus import Document
from src.errors import DimensionMismatch, EmptyDocument, InvalidModel
from src.model import (
    LBoWModel,
    MultiplyCounter,
    SoftmaxVariant,
    classification_vector,
    closed_form_multiplies,
    document_vector,
    forward_counted,
    logits,
    predict,
    predict_label,
    predict_proba,
    reduced_softmax,
    softmax,
)
from src.transforms import fold_hidden_layer

finite_vectors = arrays(
    np.float64,
    st.integers(2, 8),
    elements=st.floats(-50, 50, allow_nan=False, allow_infinity=False),
)


def test_document_vector_is_occurrence_mean():
    model = LBoWModel(np.array([[1.0, 2.0], [4.0, -1.0]]), ("a", "b"), ("x", "y"))
    y = document_vector(Document((0, 0, 1)), model)
    np.testing.assert_allclose(y, [2.0, 1.0])


def test_hidden_layer_maps_to_classes(integer_hidden_model):
    doc = Document((0, 1))
    np.testing.assert_allclose(logits(integer_hidden_model, doc), [2.0, 0.5, 2.5])
    assert predict(integer_hidden_model, doc) == 2
    assert predict_label(integer_hidden_model, doc) == "c2"


def test_ties_go_to_lowest_index():
    model = LBoWModel(np.ones((2, 3)), ("a", "b", "c"), ("x", "y"))
    assert predict(model, Document((0, 1))) == 0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(embeddings=np.eye(1), labels=("a",), vocabulary=("x",)),
        dict(embeddings=np.eye(2), labels=("a", "b", "c"), vocabulary=("x", "y")),
        dict(embeddings=np.eye(2), labels=("a", "b"), vocabulary=("x",)),
        dict(embeddings=np.eye(2), labels=("a", "b"), vocabulary=("x", "x")),
        dict(embeddings=np.array([[np.nan, 0.0], [0.0, 1.0]]), labels=("a", "b"), vocabulary=("x", "y")),
        dict(embeddings=np.ones((2, 3)), labels=("a", "b"), vocabulary=("x", "y"), hidden=np.ones((3, 3))),
        dict(
            embeddings=np.ones((2, 1)),
            labels=("a", "b"),
            vocabulary=("x", "y"),
            hidden=np.ones((2, 1)),
            variant=SoftmaxVariant.REDUCED,
        ),
        dict(embeddings=np.ones((2, 2)), labels=("a", "b"), vocabulary=("x", "y"), variant="reduced"),
    ],
)
def test_invalid_models_are_rejected(kwargs):
    with pytest.raises(InvalidModel):
        LBoWModel(**kwargs)


def test_model_matrices_are_read_only(integer_hidden_model):
    with pytest.raises(ValueError):
        integer_hidden_model.embeddings[0, 0] = 5.0
    assert integer_hidden_model.parameter_count == 3 * 2 + 3 * 2


def test_forward_pass_errors(integer_hidden_model):
    with pytest.raises(EmptyDocument):
        predict(integer_hidden_model, Document(()))
    with pytest.raises(DimensionMismatch):
        predict(integer_hidden_model, Document((3,)))
    with pytest.raises(DimensionMismatch):
        classification_vector(np.ones(3), integer_hidden_model.hidden)


@given(finite_vectors)
def test_softmax_is_a_distribution(z):
    p = softmax(z)
    assert np.all(p >= 0)
    assert p.sum() == pytest.approx(1.0)
    assert p[int(np.argmax(z))] == p.max()


@given(finite_vectors, st.floats(-100, 100))
def test_softmax_ignores_constant_shift(z, shift):
    np.testing.assert_allclose(softmax(z + shift), softmax(z), atol=1e-12)


@given(finite_vectors)
def test_reduced_softmax_matches_closed_form(y):
    p = reduced_softmax(y)
    denominator = 1.0 + np.exp(y).sum()
    assert p.shape == (len(y) + 1,)
    np.testing.assert_allclose(p[:-1], np.exp(y) / denominator, rtol=1e-9, atol=1e-300)
    assert p[-1] == pytest.approx(1.0 / denominator, rel=1e-9)


def test_repeated_document_keeps_prediction(make_model, make_document):
    rng = np.random.default_rng(7)
    models = [
        make_model(rng, m=5, n=8, vocab_size=40),
        make_model(rng, m=5, vocab_size=40, hidden=False),
        make_model(rng, m=5, vocab_size=40, hidden=False, variant=SoftmaxVariant.REDUCED),
    ]
    for trial in range(1000):
        model = models[trial % len(models)]
        doc = make_document(rng, model.vocab_size)
        k = int(rng.integers(1, 11))
        assert predict(model, doc.repeated(k)) == predict(model, doc)
        np.testing.assert_array_equal(predict_proba(model, doc.repeated(k)), predict_proba(model, doc))


def test_multiply_counts_match_closed_form(make_model, make_document):
    rng = np.random.default_rng(3)
    model = make_model(rng, m=5, n=50, vocab_size=200)
    folded = fold_hidden_layer(model)
    for _ in range(100):
        doc = make_document(rng, model.vocab_size)
        n_occ = len(doc)

        counter = MultiplyCounter()
        z = forward_counted(model, doc, counter)
        assert counter.multiplies == n_occ * model.n + model.m * model.n
        assert counter.multiplies == closed_form_multiplies(model, n_occ)
        np.testing.assert_allclose(z, logits(model, doc), atol=1e-10)

        counter = MultiplyCounter()
        forward_counted(folded, doc, counter)
        assert counter.multiplies == n_occ * model.m
        assert counter.multiplies == closed_form_multiplies(folded, n_occ)


def test_as_vocabulary_encodes_model_words(integer_hidden_model):
    vocab = integer_hidden_model.as_vocabulary()
    assert vocab.words == ("a", "b", "c")
    assert vocab.index_of["c"] == 2


def test_document_vector_ignores_occurrence_order(make_model, make_document):
    rng = np.random.default_rng(17)
    model = make_model(rng, m=4, n=6, vocab_size=30)
    for _ in range(500):
        doc = make_document(rng, model.vocab_size)
        shuffled = Document(tuple(int(i) for i in rng.permutation(doc.word_indices)))
        assert np.array_equal(document_vector(shuffled, model), document_vector(doc, model))
        assert np.array_equal(predict_proba(model, shuffled), predict_proba(model, doc))
