import pandas as pd
import pytest

from src.compare_results import compare, load_results, summarize_results


def _history(path, losses, accuracies):
    pd.DataFrame(
        {
            "epoch": range(1, len(losses) + 1),
            "loss": losses,
            "accuracy": accuracies,
            "learning_rate": [0.1] * len(losses),
        }
    ).to_csv(path, index=False)
    return path


def test_summarize_results(tmp_path):
    path = _history(tmp_path / "a.csv", [1.2, 0.6, 0.7], [0.5, 0.9, 0.8])
    summary = summarize_results(load_results(path))
    assert summary["Epochs"] == 3
    assert summary["Final Loss"] == pytest.approx(0.7)
    assert summary["Best Loss"] == pytest.approx(0.6)
    assert summary["Best Accuracy"] == pytest.approx(0.9)


def test_compare_prefers_lower_loss(tmp_path, capsys):
    first = _history(tmp_path / "flat.csv", [1.0, 0.5], [0.6, 0.9])
    second = _history(tmp_path / "hidden.csv", [1.1, 0.8], [0.5, 0.7])
    compare(first, second)
    out = capsys.readouterr().out
    assert "Final Loss          : 0.5000 vs 0.8000 --> File 1" in out
    assert "Final Accuracy      : 0.9000 vs 0.7000 --> File 1" in out
    assert "Per epoch:" in out


def test_load_results_rejects_other_csv(tmp_path):
    path = tmp_path / "other.csv"
    pd.DataFrame({"x": [1]}).to_csv(path, index=False)
    with pytest.raises(ValueError):
        load_results(path)
