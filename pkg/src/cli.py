"""
cli.py

Command-line surface: python -m src.cli <command> [options]

Exit codes: 0 success, 1 domain error (name of the error on stderr), 2 usage error.
"""

import argparse
import sys
from fractions import Fraction
from typing import Sequence

from loguru import logger
from pydantic import ValidationError

from src.adversarial import AdversarialResult, find_forced_error, random_underdimensioned_model
from src.bench import BenchReport, run_benchmark
from src.config import TrainConfig, get_settings
from src.corpus import Document, encode_lines, load_dataset, read_labeled_file
from src.errors import EmptyDocument, LBoWError
from src.logging_config import configure_logging
from src.model import LBoWModel, predict, predict_proba
from src.persistence import load_model, save_model
from src.train import accuracy, history_frame, train
from src.transforms import EquivalenceReport, ModelSummary, compress, describe, fold_hidden_layer, shift_reduce, verify_equivalence

EMPTY_MARKER = "!EmptyDocument"


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _words(model: LBoWModel, doc: Document) -> str:
    return " ".join(model.vocabulary[idx] for idx in doc.word_indices)


def _rationals(values: Sequence[Fraction]) -> str:
    return " ".join(str(value) for value in values)


def format_equivalence(report: EquivalenceReport) -> str:
    return "\n".join(
        [
            f"documents: {report.n_documents}",
            f"max abs prob diff: {report.max_abs_prob_diff:.3e}",
            f"label disagreements: {report.n_label_disagreements}",
            f"tolerance: {report.tol:.1e}",
            f"strict: {_yes(report.strict)}",
            f"plain: {_yes(report.plain)}",
        ]
    )


def format_adversarial(model: LBoWModel, result: AdversarialResult) -> str:
    cx, report = result.counterexample, result.report
    return "\n".join(
        [
            f"classes: {model.m}",
            f"word dimension: {model.n}",
            f"certificate: {' '.join(str(a) for a in result.certificate.coefficients)}",
            f"sign case: {result.certificate.sign_case.value}",
            f"left document: {_words(model, cx.doc_left)}",
            f"right document: {_words(model, cx.doc_right)}",
            f"left label: {cx.true_label_left} ({model.vocabulary[cx.true_label_left]})",
            f"right label: {cx.true_label_right} ({model.vocabulary[cx.true_label_right]})",
            f"shared direction: {_rationals(cx.shared_direction)}",
            f"prediction: {report.prediction} ({model.labels[report.prediction]})",
            f"float predictions: {report.float_predictions[0]} {report.float_predictions[1]}",
            f"forced error: {_yes(report.misclassified >= 1)}",
        ]
    )


def format_bench(report: BenchReport) -> str:
    n = report.n_documents
    return "\n".join(
        [
            f"documents: {n}",
            f"repeat: {report.repeat}",
            f"precursor docs/s: {report.precursor_docs_per_second:.1f}",
            f"compressed docs/s: {report.compressed_docs_per_second:.1f}",
            f"measured speedup: {report.speedup:.3f}",
            f"precursor multiplies/doc: {sum(report.precursor_multiplies) / n:.2f}",
            f"compressed multiplies/doc: {sum(report.compressed_multiplies) / n:.2f}",
            f"multiply ratio: {report.multiply_ratio:.4f}",
            f"counts match closed form: {_yes(report.counts_match_closed_form)}",
        ]
    )


def format_summary(summary: ModelSummary) -> str:
    return "\n".join(
        [
            f"classes: {summary.m}",
            f"word dimension: {summary.n}",
            f"vocabulary size: {summary.vocab_size}",
            f"hidden layer: {_yes(summary.has_hidden)}",
            f"softmax: {summary.variant.value}",
            f"parameters: {summary.parameter_count}",
            f"compressed word dimension: {summary.compressed_n}",
            f"compressed parameters: {summary.compressed_parameter_count}",
            f"compression ratio: {summary.compression_ratio:.4f}",
        ]
    )


def _read_documents(model: LBoWModel, path: str, lowercase: bool, distinct: bool) -> list[Document]:
    records = read_labeled_file(path, require_label=False, lowercase=lowercase)
    encoded = encode_lines(records, model.as_vocabulary(), distinct=distinct)
    docs = [doc for doc in encoded if doc is not None]
    skipped = len(encoded) - len(docs)
    if skipped:
        logger.warning(f"Skipped {skipped} lines with no in-vocabulary word")
    if not docs:
        raise EmptyDocument(f"no line of {path} has an in-vocabulary word")
    return docs


def cmd_train(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg = TrainConfig.from_settings(
        dim=args.dim,
        epochs=args.epochs,
        learning_rate=args.lr,
        min_count=args.min_count,
        seed=args.seed,
        use_hidden=args.hidden,
        lowercase=args.lowercase,
        distinct=args.distinct,
    )
    dataset, summary = load_dataset(args.input, cfg.min_count, cfg.lowercase, cfg.distinct)
    logger.info(f"{summary.n_oov_tokens} of {summary.n_tokens} tokens filtered by min_count={cfg.min_count}")

    history = []
    model = train(dataset, cfg, on_epoch=history.append, progress=True)
    save_model(model, args.output)

    frame = history_frame(history)
    if args.history:
        frame.to_csv(args.history, index=False)
    print(frame.to_string(index=False))
    print(f"train accuracy: {accuracy(model, dataset.documents):.4f}")
    return 0


def cmd_predict(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    model = load_model(args.model)
    records = read_labeled_file(args.input, require_label=False, lowercase=args.lowercase)
    failed = 0
    for doc in encode_lines(records, model.as_vocabulary(), distinct=args.distinct):
        if doc is None:
            print(EMPTY_MARKER)
            failed += 1
            continue
        line = model.labels[predict(model, doc)]
        if args.probs:
            probs = predict_proba(model, doc)
            line += " " + " ".join(f"{label}:{p:.6f}" for label, p in zip(model.labels, probs))
        print(line)
    if failed:
        logger.error(f"EmptyDocument: {failed} lines had no in-vocabulary word")
    return 1 if failed else 0


def _transform(args: argparse.Namespace, transform) -> int:
    model = load_model(args.model)
    result = transform(model)
    save_model(result, args.output)
    print(
        f"{args.command}: n {model.n} -> {result.n}, hidden {_yes(model.has_hidden)} -> "
        f"{_yes(result.has_hidden)}, softmax {model.variant.value} -> {result.variant.value}"
    )
    return 0


def cmd_fold(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    return _transform(args, fold_hidden_layer)


def cmd_reduce(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    return _transform(args, shift_reduce)


def cmd_compress(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    return _transform(args, compress)


def cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    settings = get_settings()
    model_a, model_b = load_model(args.model_a), load_model(args.model_b)
    docs = _read_documents(model_a, args.input, args.lowercase, args.distinct)
    tol = settings.tol if args.tol is None else args.tol
    workers = settings.workers if args.workers is None else args.workers
    report = verify_equivalence(model_a, model_b, docs, tol=tol, workers=workers)
    print(format_equivalence(report))
    return 0 if report.strict else 1


def cmd_adversarial(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.model:
        model = load_model(args.model)
    else:
        if args.m is None or args.dim is None:
            parser.error("adversarial needs --m and --dim (or --model)")
        if not 1 <= args.dim < args.m:
            parser.error(f"--dim must satisfy 1 <= Q < M, got Q={args.dim}, M={args.m}")
        model = random_underdimensioned_model(args.m, args.dim, args.seed)
    result = find_forced_error(model)
    print(format_adversarial(model, result))
    return 0 if result.report.misclassified >= 1 else 1


def cmd_bench(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    model = load_model(args.model)
    docs = _read_documents(model, args.input, args.lowercase, args.distinct)
    print(format_bench(run_benchmark(model, docs, args.repeat, progress=True)))
    return 0


def cmd_info(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    print(format_summary(describe(load_model(args.model))))
    return 0


def _add_encoding_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--lowercase", action="store_true", default=None, help="lowercase text tokens")
    sub.add_argument("--distinct", action="store_true", default=None, help="ignore repeated words")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        "lbow",
        description="Linear bag-of-words text classifier with exact model compression.",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sub = subparsers.add_parser("train", help="train a model on labeled text")
    sub.add_argument("--input", required=True)
    sub.add_argument("--output", required=True)
    sub.add_argument("--dim", type=int)
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--lr", type=float)
    sub.add_argument("--min-count", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--hidden", action="store_true", help="train a hidden layer")
    sub.add_argument("--history", help="write per-epoch loss and accuracy to this CSV")
    _add_encoding_flags(sub)
    sub.set_defaults(handler=cmd_train)

    sub = subparsers.add_parser("predict", help="one predicted label per input line")
    sub.add_argument("--model", required=True)
    sub.add_argument("--input", required=True)
    sub.add_argument("--probs", action="store_true", help="append the class distribution")
    _add_encoding_flags(sub)
    sub.set_defaults(handler=cmd_predict)

    for name, handler, text in [
        ("fold", cmd_fold, "fold the hidden layer into the word vectors"),
        ("reduce", cmd_reduce, "shift-reduce a flat model to m-1 dimensions"),
        ("compress", cmd_compress, "fold then shift-reduce"),
    ]:
        sub = subparsers.add_parser(name, help=text)
        sub.add_argument("--model", required=True)
        sub.add_argument("--output", required=True)
        sub.set_defaults(handler=handler)

    sub = subparsers.add_parser("verify", help="check two models for equivalence")
    sub.add_argument("--model-a", required=True)
    sub.add_argument("--model-b", required=True)
    sub.add_argument("--input", required=True)
    sub.add_argument("--tol", type=float)
    sub.add_argument("--workers", type=int)
    _add_encoding_flags(sub)
    sub.set_defaults(handler=cmd_verify)

    sub = subparsers.add_parser("adversarial", help="force an error on an under-dimensioned model")
    sub.add_argument("--m", type=int, help="number of classes (and words)")
    sub.add_argument("--dim", type=int, help="word vector dimension Q < M")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--model", help="use this model file instead of a random one")
    sub.set_defaults(handler=cmd_adversarial)

    sub = subparsers.add_parser("bench", help="compare a model with its compressed form")
    sub.add_argument("--model", required=True)
    sub.add_argument("--input", required=True)
    sub.add_argument("--repeat", type=int, default=1)
    _add_encoding_flags(sub)
    sub.set_defaults(handler=cmd_bench)

    sub = subparsers.add_parser("info", help="describe a model and its compressed form")
    sub.add_argument("--model", required=True)
    sub.set_defaults(handler=cmd_info)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = get_settings()
        configure_logging("DEBUG" if args.verbose else settings.log_level)
        for flag in ("lowercase", "distinct"):
            if getattr(args, flag, False) is None:
                setattr(args, flag, getattr(settings, flag))
        return args.handler(args, parser)
    except ValidationError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except LBoWError as err:
        print(f"{err.name}: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
