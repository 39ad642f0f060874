import sys

import pandas as pd

HISTORY_COLUMNS = ["epoch", "loss", "accuracy", "learning_rate"]


def load_results(path):
    frame = pd.read_csv(path)
    missing = [column for column in HISTORY_COLUMNS if column not in frame.columns]
    if missing:
        raise ValueError(f"{path} is not a training history, missing columns {missing}")
    return frame.sort_values("epoch").reset_index(drop=True)


def summarize_results(results):
    final = results.iloc[-1]
    return {
        "Epochs": int(len(results)),
        "Final Loss": float(final["loss"]),
        "Best Loss": float(results["loss"].min()),
        "Final Accuracy": float(final["accuracy"]),
        "Best Accuracy": float(results["accuracy"].max()),
    }


def _better(metric, val1, val2):
    if val1 == val2:
        return "Tie"
    # lower is better for losses
    first_wins = val1 < val2 if "Loss" in metric else val1 > val2
    return "File 1" if first_wins else "File 2"


def compare(file1, file2):
    results1 = load_results(file1)
    results2 = load_results(file2)

    summary1 = summarize_results(results1)
    summary2 = summarize_results(results2)

    print("\n--- Training History Comparison ---\n")
    print(f"File 1: {file1}")
    print(f"File 2: {file2}\n")

    for metric in summary1.keys():
        val1, val2 = summary1[metric], summary2[metric]
        if metric == "Epochs":
            print(f"{metric:20s}: {val1} vs {val2}")
            continue
        print(f"{metric:20s}: {val1:.4f} vs {val2:.4f} --> {_better(metric, val1, val2)}")

    joined = results1.merge(results2, on="epoch", suffixes=(" 1", " 2"))
    if not joined.empty:
        print("\nPer epoch:")
        print(joined[["epoch", "loss 1", "loss 2", "accuracy 1", "accuracy 2"]].to_string(index=False))
    return summary1, summary2


if __name__ == "__main__":
    if len(sys.argv) != 3:
        print("Usage: python -m src.compare_results history1.csv history2.csv")
    else:
        compare(sys.argv[1], sys.argv[2])
