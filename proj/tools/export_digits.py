"""Write the scikit-learn 8x8 digits set as CSV: label followed by 64 values in 0..16."""
import sys

from sklearn.datasets import load_digits


def main(path: str) -> None:
    digits = load_digits()
    with open(path, "w", encoding="utf-8") as out:
        for image, label in zip(digits.data.astype(int), digits.target):
            out.write(",".join([str(int(label))] + [str(v) for v in image]) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/digits.csv")
