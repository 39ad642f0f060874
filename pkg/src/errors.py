"""
errors.py

Exception hierarchy for the LBoW toolkit. Every error names the module that owns it
through its intermediate base class, so the CLI can report `<ErrorName>: <message>`.
"""


class LBoWError(Exception):
    """Base class for every domain error raised by the toolkit."""

    @property
    def name(self) -> str:
        return type(self).__name__


# corpus


class CorpusError(LBoWError):
    pass


class EmptyVocabulary(CorpusError):
    pass


class EmptyDocument(CorpusError):
    pass


class UnknownLabel(CorpusError):
    pass


class MissingLabel(CorpusError):
    pass


class DuplicateLabel(CorpusError):
    pass


class TooFewLabels(CorpusError):
    pass


# model


class ModelError(LBoWError):
    pass


class InvalidModel(ModelError):
    pass


class DimensionMismatch(ModelError):
    pass


# transforms


class TransformError(LBoWError):
    pass


class NoHiddenLayer(TransformError):
    pass


class HasHiddenLayer(TransformError):
    pass


class WrongDimensionality(TransformError):
    pass


class LabelCountMismatch(TransformError):
    pass


class VocabularyMismatch(TransformError):
    pass


# adversarial


class AdversarialError(LBoWError):
    pass


class DegenerateCertificate(AdversarialError):
    pass


class InvalidCounterexample(AdversarialError):
    pass


class CounterexampleTooLong(AdversarialError):
    pass


# persistence


class PersistenceError(LBoWError):
    pass


class BadMagic(PersistenceError):
    pass


class UnsupportedVersion(PersistenceError):
    pass


class CorruptDimensions(PersistenceError):
    pass


class TruncatedFile(PersistenceError):
    pass
