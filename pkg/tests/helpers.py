"""Builders shared by the test modules.

These construct package inputs (schemas, tables, models, rules) and
convert package objects to the plain structures the oracles consume.
All randomness is seeded by the caller.
"""

import csv
import json
import math

import numpy as np

from rulegrid.ingest import (
    CategorySet,
    DatasetSchema,
    Interval,
    Rule,
    SampleTable,
    parse_ensemble,
    schema_from_dict,
)


def make_schema(numeric=(), categorical=None, classes=("no", "yes")) -> DatasetSchema:
    attrs = [{"name": n, "kind": "numeric"} for n in numeric]
    for name, cats in (categorical or {}).items():
        attrs.append({"name": name, "kind": "categorical", "categories": list(cats)})
    return schema_from_dict({"attributes": attrs, "classes": list(classes)})


def make_table(schema: DatasetSchema, rows, labels, is_train=None) -> SampleTable:
    """rows: list of dicts (numeric floats, categorical ints)."""
    n = len(rows)
    columns = {}
    for spec in schema.attributes:
        dtype = np.float64 if spec.kind == "numeric" else np.int64
        columns[spec.name] = np.array([row[spec.name] for row in rows], dtype=dtype)
    if is_train is None:
        is_train = [True] * n
    return SampleTable(schema, columns,
                       np.asarray(labels, dtype=np.int64),
                       np.asarray(is_train, dtype=bool))


def random_table(rng, schema: DatasetSchema, n: int, train_fraction=1.0) -> SampleTable:
    rows = []
    for _ in range(n):
        row = {}
        for spec in schema.attributes:
            if spec.kind == "numeric":
                row[spec.name] = float(rng.normal())
            else:
                row[spec.name] = int(rng.integers(len(spec.categories)))
        rows.append(row)
    labels = rng.integers(schema.n_classes, size=n)
    is_train = rng.random(n) < train_fraction
    if not is_train.any():
        is_train[0] = True
    return make_table(schema, rows, labels, is_train)


def random_rules(rng, schema: DatasetSchema, m: int, max_conditions=2,
                 weights="unit") -> list[Rule]:
    """Random conjunction rules over the schema; ids are 0..m-1."""
    rules = []
    attr_names = [s.name for s in schema.attributes]
    for j in range(m):
        k = int(rng.integers(1, max_conditions + 1))
        chosen = rng.choice(len(attr_names), size=min(k, len(attr_names)), replace=False)
        conditions = {}
        for a in chosen:
            spec = schema.attributes[int(a)]
            if spec.kind == "numeric":
                lo, hi = sorted(rng.normal(size=2))
                bounds = [(-math.inf, hi), (lo, math.inf), (lo, hi)][int(rng.integers(3))]
                conditions[spec.name] = Interval(*bounds)
            else:
                size = int(rng.integers(1, len(spec.categories)))
                members = rng.choice(len(spec.categories), size=size, replace=False)
                conditions[spec.name] = CategorySet(frozenset(int(c) for c in members))
        weight = 1.0 if weights == "unit" else float(rng.uniform(0.1, 2.0))
        rules.append(Rule(id=j, conditions=conditions,
                          label=int(rng.integers(schema.n_classes)),
                          weight=weight, source=(0, j)))
    return rules


def rule_to_plain(rule: Rule) -> dict:
    conditions = {}
    for attr, cond in rule.conditions.items():
        if isinstance(cond, Interval):
            conditions[attr] = ("num", cond.lower, cond.upper)
        else:
            conditions[attr] = ("cat", set(cond.members))
    return {"id": rule.id, "conditions": conditions,
            "label": rule.label, "weight": rule.weight}


def table_to_plain(table: SampleTable, indices=None) -> list[dict]:
    idx = range(table.n) if indices is None else indices
    out = []
    for i in idx:
        out.append({spec.name: (float(table.columns[spec.name][i])
                                if spec.kind == "numeric"
                                else int(table.columns[spec.name][i]))
                    for spec in table.schema.attributes})
    return out


def train_values_by_attr(table: SampleTable) -> dict:
    train = table.train_indices
    return {spec.name: [float(v) for v in table.columns[spec.name][train]]
            for spec in table.schema.attributes if spec.kind == "numeric"}


def write_csv(path, schema: DatasetSchema, table: SampleTable):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        names = [s.name for s in schema.attributes]
        writer.writerow(names + ["__label__", "__split__"])
        for i in range(table.n):
            row = []
            for spec in schema.attributes:
                v = table.columns[spec.name][i]
                row.append(spec.categories[int(v)] if spec.kind == "categorical"
                           else repr(float(v)))
            row.append(schema.classes[int(table.labels[i])])
            row.append("train" if table.is_train[i] else "test")
            writer.writerow(row)


def write_model(path, doc: dict):
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_model(path, schema: DatasetSchema, format="json"):
    return parse_ensemble(str(path), format, schema)


def leaf(*value):
    return {"leaf": list(value) if len(value) > 1 else value[0]}


def num_split(attr, threshold, left, right):
    return {"attr": attr, "kind": "numeric", "threshold": threshold,
            "left": left, "right": right}


def cat_split(attr, categories, left, right):
    return {"attr": attr, "kind": "categorical", "categories": list(categories),
            "left": left, "right": right}


def rf_doc(trees):
    return {"model_kind": "random_forest",
            "trees": [{"nodes": nodes} for nodes in trees]}


def gbt_doc(trees, targets=None, base_scores=None):
    out = {"model_kind": "gradient_boosted", "trees": []}
    for t, nodes in enumerate(trees):
        entry = {"nodes": nodes}
        if targets is not None:
            entry["target_class"] = targets[t]
        out["trees"].append(entry)
    if base_scores is not None:
        out["base_scores"] = list(base_scores)
    return out


def ensemble_to_plain_trees(ensemble):
    """Convert package trees to the oracle walker's node dicts."""
    from rulegrid.ingest import LeafNode

    plain = []
    for tree in ensemble.trees:
        nodes = []
        for node in tree.nodes:
            if isinstance(node, LeafNode):
                nodes.append({"leaf": list(node.value)})
            elif node.kind == "numeric":
                nodes.append({"attr": node.attr, "threshold": node.threshold,
                              "left": node.left, "right": node.right})
            else:
                nodes.append({"attr": node.attr, "threshold": None,
                              "categories": set(node.categories),
                              "left": node.left, "right": node.right})
        plain.append(nodes)
    return plain


def random_tree_nodes(rng, schema: DatasetSchema, max_depth=3, leaf_kind="rf",
                      value_range=(-3.0, 3.0)):
    """Random JSON-format tree whose every root-to-leaf path is satisfiable.

    Numeric thresholds are drawn inside the bounds accumulated along the
    path and categorical splits take a proper subset of the categories
    still reachable, so extraction never sees an empty condition.
    """
    nodes = []

    def emit_leaf():
        if leaf_kind == "rf":
            counts = [int(c) for c in rng.integers(0, 20, size=schema.n_classes)]
            nodes.append({"leaf": counts})
        else:
            nodes.append({"leaf": round(float(rng.normal()), 6)})
        return len(nodes) - 1

    def grow(depth, bounds, members):
        if depth >= max_depth or rng.random() < 0.2:
            return emit_leaf()
        for a in rng.permutation(len(schema.attributes)):
            a = int(a)
            spec = schema.attributes[a]
            if spec.kind == "numeric":
                lo, hi = bounds.get(a, value_range)
                if hi - lo < 1e-3:
                    continue
                t = round(float(rng.uniform(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo))), 6)
                idx = len(nodes)
                nodes.append({"attr": a, "kind": "numeric", "threshold": t})
                nodes[idx]["left"] = grow(depth + 1, {**bounds, a: (lo, t)}, members)
                nodes[idx]["right"] = grow(depth + 1, {**bounds, a: (t, hi)}, members)
                return idx
            current = members.get(a, frozenset(range(len(spec.categories))))
            if len(current) < 2:
                continue
            size = int(rng.integers(1, len(current)))
            chosen = frozenset(int(c) for c in rng.choice(sorted(current), size=size,
                                                          replace=False))
            idx = len(nodes)
            nodes.append({"attr": a, "kind": "categorical", "categories": sorted(chosen)})
            nodes[idx]["left"] = grow(depth + 1, bounds, {**members, a: chosen})
            nodes[idx]["right"] = grow(depth + 1, bounds, {**members, a: current - chosen})
            return idx
        return emit_leaf()

    grow(0, {}, {})
    return nodes
