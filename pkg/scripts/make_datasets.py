"""Regenerate the bundled CSV datasets from scikit-learn's copies.

Development utility; the package itself never downloads or imports sklearn.

Run: python scripts/make_datasets.py
"""

from pathlib import Path

from sklearn import datasets

OUT = Path(__file__).resolve().parent.parent / "src" / "qgbounds" / "data"


def write_iris() -> None:
    iris = datasets.load_iris()
    lines = ["sepal_length,sepal_width,petal_length,petal_width,class"]
    for row, cls in zip(iris.data, iris.target):
        lines.append(",".join(f"{v:.4f}" for v in row) + f",{cls}")
    (OUT / "iris.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_digits() -> None:
    digits = datasets.load_digits()
    lines = [",".join([f"p{i}" for i in range(64)] + ["label"])]
    for row, label in zip(digits.data, digits.target):
        lines.append(",".join(str(int(v)) for v in row) + f",{label}")
    (OUT / "digits.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write_iris()
    write_digits()
    print(f"wrote {OUT / 'iris.csv'} and {OUT / 'digits.csv'}")
