"""Generate the bundled credit-approval fixture.

Synthesizes a 690-sample credit screening dataset (6 numeric + 8
categorical attributes, 307 approved / 383 rejected, 75/25 split),
trains a 200-tree random forest of depth <= 10 on the training split,
and writes schema + data + model under fixtures/credit/ in the formats
the package ingests. Deterministic: re-running reproduces identical
files.
"""

import csv
import json
import pathlib
import sys

import numpy as np
from sklearn.ensemble import RandomForestClassifier

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures" / "credit"

SEED = 20240817
N = 690
N_APPROVED = 307
TRAIN_FRACTION = 0.75
N_TREES = 200
MAX_DEPTH = 10
MAX_LEAVES = 36
# keeps labels mostly but not fully recoverable from the attributes, so
# leaf purity varies enough for the score model to separate typical rules
NOISE = 0.25

CATEGORIES = {
    "Sex": ["female", "male"],
    "Married": ["single", "married", "divorced"],
    "BankCustomer": ["none", "basic", "premium"],
    "EducationLevel": ["none", "highschool", "vocational", "college", "graduate"],
    "Ethnicity": ["groupA", "groupB", "groupC", "groupD", "groupE"],
    "PriorDefault": ["no", "yes"],
    "Employed": ["no", "yes"],
    "Citizen": ["by-birth", "by-other", "temporary"],
}

ATTRIBUTES = [
    ("Sex", "categorical"),
    ("Age", "numeric"),
    ("Debt", "numeric"),
    ("Married", "categorical"),
    ("BankCustomer", "categorical"),
    ("EducationLevel", "categorical"),
    ("Ethnicity", "categorical"),
    ("YearsEmployed", "numeric"),
    ("PriorDefault", "categorical"),
    ("Employed", "categorical"),
    ("CreditScore", "numeric"),
    ("Citizen", "categorical"),
    ("ZipCode", "numeric"),
    ("Income", "numeric"),
]

CLASSES = ["rejected", "approved"]


def synthesize():
    rng = np.random.default_rng(SEED)
    cols = {}
    cols["Sex"] = rng.integers(2, size=N)
    # shifted gamma: right-skewed adult ages with no point mass at the floor
    cols["Age"] = np.round(16.0 + rng.gamma(3.2, 5.5, N), 2)
    cols["Debt"] = np.round(rng.gamma(1.6, 3.0, N), 3)
    cols["Married"] = rng.choice(3, size=N, p=[0.45, 0.40, 0.15])
    cols["BankCustomer"] = rng.choice(3, size=N, p=[0.25, 0.55, 0.20])
    cols["EducationLevel"] = rng.choice(5, size=N, p=[0.08, 0.33, 0.22, 0.25, 0.12])
    cols["Ethnicity"] = rng.choice(5, size=N, p=[0.40, 0.22, 0.18, 0.12, 0.08])
    employed = (rng.random(N) < 0.57).astype(np.int64)
    cols["Employed"] = employed
    years = rng.gamma(1.3, 2.4, N) * (0.4 + 0.9 * employed)
    cols["YearsEmployed"] = np.round(years, 3)
    # prior defaults are rarer among the long-employed
    p_default = np.clip(0.52 - 0.04 * years, 0.08, 0.6)
    cols["PriorDefault"] = (rng.random(N) < p_default).astype(np.int64)
    # sub-unit jitter keeps the integer-like score free of training-value
    # ties, which would put visible steps in its quantile transform
    score_base = rng.poisson(2.2, N) + 2 * employed
    cols["CreditScore"] = np.round(score_base + rng.uniform(0.0, 1.0, N), 3)
    cols["Citizen"] = rng.choice(3, size=N, p=[0.72, 0.18, 0.10])
    cols["ZipCode"] = np.round(rng.uniform(100, 999, N), 0)
    income = rng.lognormal(6.2, 1.1, N) * (0.6 + 0.5 * employed)
    cols["Income"] = np.round(income, 2)

    # latent creditworthiness; approve the top slice to pin class balance
    z = (
        2.6 * (cols["PriorDefault"] == 0)
        + 1.3 * employed
        + 0.45 * cols["CreditScore"]
        + 0.55 * np.log1p(cols["Income"]) / 3.0
        + 0.35 * np.log1p(cols["YearsEmployed"])
        - 0.06 * cols["Debt"]
        + 0.15 * (cols["BankCustomer"] == 2)
        + rng.normal(0, NOISE, N)
    )
    order = np.argsort(-z, kind="stable")
    labels = np.zeros(N, dtype=np.int64)
    labels[order[:N_APPROVED]] = 1

    n_train = round(N * TRAIN_FRACTION)
    is_train = np.zeros(N, dtype=bool)
    is_train[rng.permutation(N)[:n_train]] = True
    return cols, labels, is_train


def feature_matrix(cols):
    return np.column_stack([cols[name].astype(np.float64) for name, _ in ATTRIBUTES])


def tree_to_nodes(tree):
    t = tree.tree_
    nodes = []
    for i in range(t.node_count):
        if t.children_left[i] == -1:
            counts = t.value[i][0]
            nodes.append({"leaf": [float(c) for c in counts]})
        else:
            nodes.append({
                "attr": int(t.feature[i]),
                "kind": "numeric",
                "threshold": float(t.threshold[i]),
                "left": int(t.children_left[i]),
                "right": int(t.children_right[i]),
            })
    return nodes


def main():
    cols, labels, is_train = synthesize()
    X = feature_matrix(cols)
    model = RandomForestClassifier(
        n_estimators=N_TREES, max_depth=MAX_DEPTH, max_leaf_nodes=MAX_LEAVES,
        random_state=SEED, n_jobs=1,
    )
    model.fit(X[is_train], labels[is_train])
    train_acc = model.score(X[is_train], labels[is_train])
    test_acc = model.score(X[~is_train], labels[~is_train])
    n_leaves = sum(est.get_n_leaves() for est in model.estimators_)

    OUT.mkdir(parents=True, exist_ok=True)
    schema = {
        "attributes": [
            {"name": name, "kind": kind, **({"categories": CATEGORIES[name]}
                                            if kind == "categorical" else {})}
            for name, kind in ATTRIBUTES
        ],
        "classes": CLASSES,
    }
    with open(OUT / "schema.json", "w") as fh:
        json.dump(schema, fh, indent=2)
        fh.write("\n")

    with open(OUT / "data.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([name for name, _ in ATTRIBUTES] + ["__label__", "__split__"])
        for i in range(N):
            row = []
            for name, kind in ATTRIBUTES:
                v = cols[name][i]
                row.append(CATEGORIES[name][int(v)] if kind == "categorical"
                           else format(float(v), "g"))
            row.append(CLASSES[labels[i]])
            row.append("train" if is_train[i] else "test")
            writer.writerow(row)

    doc = {
        "model_kind": "random_forest",
        "trees": [{"nodes": tree_to_nodes(est)} for est in model.estimators_],
    }
    with open(OUT / "rf_model.json", "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")

    print(f"samples: {N} ({labels.sum()} approved), train: {is_train.sum()}")
    print(f"forest: {N_TREES} trees, {n_leaves} leaves (= rules)")
    print(f"accuracy: train {train_acc:.4f}, test {test_acc:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
