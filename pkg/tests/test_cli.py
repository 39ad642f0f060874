from pathlib import Path

import pandas as pd
import pytest

from src.cli import main
from src.persistence import load_model, save_model

GOLDEN = Path(__file__).parent / "golden"

TRAIN_LINES = [
    "__label__pos good great film",
    "__label__neg bad awful film",
    "__label__pos great fun",
    "__label__neg awful boring",
    "__label__pos good fun plot",
    "__label__neg bad boring plot",
]


def test_train_and_predict(tmp_path, write_lines, capsys):
    data = write_lines("train.txt", TRAIN_LINES)
    model_path = tmp_path / "model.bin"
    history_path = tmp_path / "history.csv"

    code = main(
        ["train", "--input", str(data), "--output", str(model_path), "--epochs", "30", "--lr", "0.5",
         "--history", str(history_path)]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "train accuracy: 1.0000" in out

    model = load_model(model_path)
    assert model.labels == ("pos", "neg")
    assert model.n == 2
    assert len(pd.read_csv(history_path)) == 30

    queries = write_lines("queries.txt", ["great fun", "awful boring", "zzz unknown"])
    code = main(["predict", "--model", str(model_path), "--input", str(queries)])
    assert code == 1
    assert capsys.readouterr().out.splitlines() == ["pos", "neg", "!EmptyDocument"]


def test_predict_probabilities(tmp_path, write_lines, sentiment_model, capsys):
    model_path = tmp_path / "model.bin"
    save_model(sentiment_model, model_path)
    queries = write_lines("queries.txt", ["good", "__label__neg bad bad good"])
    assert main(["predict", "--model", str(model_path), "--input", str(queries), "--probs"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "pos pos:0.731059 neg:0.268941"
    assert lines[1].startswith("neg ")


def test_compress_and_verify(tmp_path, write_lines, integer_hidden_model, capsys):
    original = tmp_path / "original.bin"
    folded = tmp_path / "folded.bin"
    compressed = tmp_path / "compressed.bin"
    save_model(integer_hidden_model, original)

    assert main(["fold", "--model", str(original), "--output", str(folded)]) == 0
    assert "fold: n 2 -> 3" in capsys.readouterr().out
    assert main(["compress", "--model", str(original), "--output", str(compressed)]) == 0
    capsys.readouterr()
    assert load_model(compressed).n == 2

    docs = write_lines("docs.txt", ["a", "a b", "b c c c"])
    assert main(["verify", "--model-a", str(original), "--model-b", str(folded), "--input", str(docs)]) == 0
    assert capsys.readouterr().out == (GOLDEN / "verify.txt").read_text()

    assert main(
        ["verify", "--model-a", str(original), "--model-b", str(compressed), "--input", str(docs), "--workers", "2"]
    ) == 0
    assert "strict: yes" in capsys.readouterr().out


def test_reduce_needs_flat_model(tmp_path, integer_hidden_model, capsys):
    path = tmp_path / "model.bin"
    save_model(integer_hidden_model, path)
    assert main(["reduce", "--model", str(path), "--output", str(tmp_path / "out.bin")]) == 1
    assert "HasHiddenLayer:" in capsys.readouterr().err


def test_adversarial_on_model_file(tmp_path, dependent_model, capsys):
    path = tmp_path / "dependent.bin"
    save_model(dependent_model, path)
    assert main(["adversarial", "--model", str(path)]) == 0
    assert capsys.readouterr().out == (GOLDEN / "adversarial.txt").read_text()


def test_adversarial_on_random_model(capsys):
    assert main(["adversarial", "--m", "5", "--dim", "3", "--seed", "4"]) == 0
    out = capsys.readouterr().out
    assert "classes: 5" in out
    assert "word dimension: 3" in out
    assert out.rstrip().endswith("forced error: yes")

    assert main(["adversarial", "--m", "5", "--dim", "3", "--seed", "4"]) == 0
    assert capsys.readouterr().out == out


@pytest.mark.parametrize("argv", [["adversarial", "--m", "4", "--dim", "4"], ["adversarial", "--m", "4"], ["nope"]])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == 2


def test_invalid_hyper_parameter_exits_2(write_lines, tmp_path, capsys):
    data = write_lines("train.txt", TRAIN_LINES)
    assert main(["train", "--input", str(data), "--output", str(tmp_path / "m.bin"), "--lr", "0"]) == 2
    assert "usage error" in capsys.readouterr().err


def test_corrupt_model_file_exits_1(tmp_path, write_lines, capsys):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"definitely not a model")
    queries = write_lines("queries.txt", ["good"])
    assert main(["predict", "--model", str(path), "--input", str(queries)]) == 1
    assert "BadMagic:" in capsys.readouterr().err


def test_info_and_bench(tmp_path, write_lines, integer_hidden_model, capsys):
    path = tmp_path / "model.bin"
    save_model(integer_hidden_model, path)

    assert main(["info", "--model", str(path)]) == 0
    out = capsys.readouterr().out
    assert "hidden layer: yes" in out
    assert "parameters: 12" in out
    assert "compressed parameters: 6" in out

    docs = write_lines("docs.txt", ["a b", "c", "nothing known"])
    assert main(["bench", "--model", str(path), "--input", str(docs), "--repeat", "2"]) == 0
    out = capsys.readouterr().out
    assert "documents: 2" in out
    assert "counts match closed form: yes" in out


def test_compressed_model_predicts_like_the_original(tmp_path, write_lines, capsys):
    data = write_lines("train.txt", TRAIN_LINES)
    original = tmp_path / "original.bin"
    compressed = tmp_path / "compressed.bin"
    assert main(
        ["train", "--input", str(data), "--output", str(original), "--hidden", "--dim", "6", "--epochs", "20",
         "--lr", "0.5"]
    ) == 0
    assert main(["compress", "--model", str(original), "--output", str(compressed)]) == 0
    capsys.readouterr()

    queries = write_lines(
        "queries.txt", [*TRAIN_LINES, "good", "bad plot", "fun fun boring", "great", "awful fun"]
    )
    assert main(["predict", "--model", str(original), "--input", str(queries)]) == 0
    before = capsys.readouterr().out.splitlines()
    assert main(["predict", "--model", str(compressed), "--input", str(queries)]) == 0
    after = capsys.readouterr().out.splitlines()

    assert len(before) == len(TRAIN_LINES) + 5
    assert after == before


def test_malformed_setting_exits_2(tmp_path, sentiment_model, monkeypatch, capsys):
    path = tmp_path / "model.bin"
    save_model(sentiment_model, path)
    monkeypatch.setenv("LBOW_EPOCHS", "abc")
    assert main(["info", "--model", str(path)]) == 2
    assert "usage error" in capsys.readouterr().err
