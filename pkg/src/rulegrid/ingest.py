"""Dataset and tree-ensemble ingestion.

Parses dataset schemas (JSON), sample tables (CSV), and trained tree
ensembles (a JSON interchange format or a line-oriented gradient-boosted
text dump), extracts the complete rule set as one rule per leaf, and
evaluates the original ensemble so downstream reduction has a fixed
reference prediction for every sample.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"
RANDOM_FOREST = "random_forest"
GRADIENT_BOOSTED = "gradient_boosted"

LABEL_COLUMN = "__label__"
SPLIT_COLUMN = "__split__"


class SchemaError(ValueError):
    """Malformed or inconsistent schema document."""


class DataError(ValueError):
    """Sample table violates the schema."""


class ModelError(ValueError):
    """Model file is malformed or references unknown attributes."""


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class DatasetSchema:
    """Ordered attribute specs plus the ordered class labels."""

    attributes: tuple[AttributeSpec, ...]
    classes: tuple[str, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate attribute names in schema")
        for a in self.attributes:
            if a.kind not in (NUMERIC, CATEGORICAL):
                raise SchemaError(f"attribute {a.name!r}: unknown kind {a.kind!r}")
            if a.kind == CATEGORICAL and len(a.categories) < 2:
                raise SchemaError(f"attribute {a.name!r}: categorical needs >= 2 categories")
            if a.kind == NUMERIC and a.categories:
                raise SchemaError(f"attribute {a.name!r}: numeric attribute lists categories")
        if not 2 <= len(self.classes) <= 10:
            raise SchemaError(f"need between 2 and 10 classes, got {len(self.classes)}")
        if len(set(self.classes)) != len(self.classes):
            raise SchemaError("duplicate class labels")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def attribute_index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise SchemaError(f"unknown attribute {name!r}")

    def attribute(self, name: str) -> AttributeSpec:
        return self.attributes[self.attribute_index(name)]

    def to_dict(self) -> dict:
        attrs = []
        for a in self.attributes:
            entry: dict = {"name": a.name, "kind": a.kind}
            if a.kind == CATEGORICAL:
                entry["categories"] = list(a.categories)
            attrs.append(entry)
        return {"attributes": attrs, "classes": list(self.classes)}


def schema_from_dict(doc: Mapping) -> DatasetSchema:
    try:
        raw_attrs = doc["attributes"]
        raw_classes = doc["classes"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"schema document missing key: {exc}") from exc
    attrs = []
    for entry in raw_attrs:
        try:
            name = entry["name"]
            kind = entry["kind"]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"attribute entry missing key: {exc}") from exc
        cats = tuple(entry.get("categories", ()))
        attrs.append(AttributeSpec(name=name, kind=kind, categories=cats))
    return DatasetSchema(attributes=tuple(attrs), classes=tuple(raw_classes))


def load_schema(path: str) -> DatasetSchema:
    """Load and validate a schema JSON document."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return schema_from_dict(doc)


@dataclass
class SampleTable:
    """Column-major sample storage.

    Numeric columns are float64; categorical columns hold category indices
    as int64. ``labels`` holds ground-truth class indices with -1 for
    missing. ``is_train`` marks the train split (rows without a split tag
    default to train).
    """

    schema: DatasetSchema
    columns: dict[str, np.ndarray]
    labels: np.ndarray
    is_train: np.ndarray

    @property
    def n(self) -> int:
        return len(self.labels)

    def split_indices(self, split: str) -> np.ndarray:
        if split == "train":
            return np.flatnonzero(self.is_train)
        if split == "test":
            return np.flatnonzero(~self.is_train)
        raise ValueError(f"unknown split {split!r}")

    @property
    def train_indices(self) -> np.ndarray:
        return self.split_indices("train")

    @property
    def test_indices(self) -> np.ndarray:
        return self.split_indices("test")

    def row_values(self, i: int) -> list[float]:
        """Row as model-space values (category indices for categoricals)."""
        return [float(self.columns[a.name][i]) for a in self.schema.attributes]

    def row_record(self, i: int) -> dict:
        """Row as human-readable values plus label/split metadata."""
        rec: dict = {}
        for a in self.schema.attributes:
            v = self.columns[a.name][i]
            rec[a.name] = a.categories[int(v)] if a.kind == CATEGORICAL else float(v)
        label = int(self.labels[i])
        rec[LABEL_COLUMN] = self.schema.classes[label] if label >= 0 else None
        rec[SPLIT_COLUMN] = "train" if self.is_train[i] else "test"
        return rec

    def subset(self, indices: np.ndarray) -> "SampleTable":
        idx = np.asarray(indices, dtype=np.intp)
        cols = {name: col[idx] for name, col in self.columns.items()}
        return SampleTable(self.schema, cols, self.labels[idx], self.is_train[idx])


def load_samples(path: str, schema: DatasetSchema) -> SampleTable:
    """Load a CSV sample table.

    The header must contain every schema attribute; ``__label__`` and
    ``__split__`` columns are optional. Rows with empty cells are rejected.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)
    if not rows:
        raise DataError(f"{path}: no data rows (need at least one sample)")

    positions = {name: i for i, name in enumerate(header)}
    for a in schema.attributes:
        if a.name not in positions:
            raise DataError(f"{path}: missing column {a.name!r}")
    label_pos = positions.get(LABEL_COLUMN)
    split_pos = positions.get(SPLIT_COLUMN)

    n = len(rows)
    columns = {
        a.name: np.empty(n, dtype=np.float64 if a.kind == NUMERIC else np.int64)
        for a in schema.attributes
    }
    labels = np.full(n, -1, dtype=np.int64)
    is_train = np.ones(n, dtype=bool)
    class_index = {c: i for i, c in enumerate(schema.classes)}

    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"{path}: row {r + 1} has {len(row)} cells, header has {len(header)}")
        for a in schema.attributes:
            token = row[positions[a.name]].strip()
            if token == "":
                raise DataError(f"{path}: row {r + 1}, column {a.name!r}: empty cell")
            if a.kind == NUMERIC:
                try:
                    columns[a.name][r] = float(token)
                except ValueError:
                    raise DataError(
                        f"{path}: row {r + 1}, column {a.name!r}: non-numeric value {token!r}"
                    ) from None
            else:
                try:
                    columns[a.name][r] = a.categories.index(token)
                except ValueError:
                    raise DataError(
                        f"{path}: row {r + 1}, column {a.name!r}: unknown category {token!r}"
                    ) from None
        if label_pos is not None:
            token = row[label_pos].strip()
            if token:
                if token in class_index:
                    labels[r] = class_index[token]
                else:
                    try:
                        idx = int(token)
                    except ValueError:
                        raise DataError(
                            f"{path}: row {r + 1}: unknown class label {token!r}"
                        ) from None
                    if not 0 <= idx < schema.n_classes:
                        raise DataError(f"{path}: row {r + 1}: class index {idx} out of range")
                    labels[r] = idx
        if split_pos is not None:
            token = row[split_pos].strip().lower()
            if token == "test":
                is_train[r] = False
            elif token in ("", "train"):
                is_train[r] = True
            else:
                raise DataError(f"{path}: row {r + 1}: unknown split tag {token!r}")

    return SampleTable(schema, columns, labels, is_train)


@dataclass(frozen=True)
class SplitNode:
    attr: int
    kind: str
    left: int
    right: int
    threshold: float | None = None
    categories: frozenset[int] | None = None


@dataclass(frozen=True)
class LeafNode:
    # per-class counts for random forests; 1-tuple contribution for GBTs
    value: tuple[float, ...]


TreeNode = Union[SplitNode, LeafNode]


@dataclass(frozen=True)
class Tree:
    nodes: tuple[TreeNode, ...]
    target_class: int | None = None


@dataclass(frozen=True)
class TreeEnsemble:
    model_kind: str
    trees: tuple[Tree, ...]
    base_scores: tuple[float, ...]
    n_classes: int

    def leaf_count(self) -> int:
        return sum(1 for t in self.trees for nd in t.nodes if isinstance(nd, LeafNode))


@dataclass(frozen=True)
class Interval:
    """Half-open numeric condition (lower, upper]; infinities allowed."""

    lower: float
    upper: float


@dataclass(frozen=True)
class CategorySet:
    """Categorical condition: sample's category must be in ``members``."""

    members: frozenset[int]


Condition = Union[Interval, CategorySet]


@dataclass(frozen=True)
class Rule:
    id: int
    conditions: Mapping[str, Condition]
    label: int
    weight: float
    source: tuple[int, int]  # (tree index, leaf node index)

    def uses(self, attr: str) -> bool:
        return attr in self.conditions


def _validate_json_node(node: Mapping, i: int, tree_i: int, schema: DatasetSchema,
                        model_kind: str) -> TreeNode:
    where = f"tree {tree_i} node {i}"
    if "leaf" in node:
        value = node["leaf"]
        if value is None:
            raise ModelError(f"{where}: missing leaf value")
        if isinstance(value, (int, float)):
            if model_kind == RANDOM_FOREST:
                raise ModelError(f"{where}: random forest leaf needs per-class counts")
            return LeafNode(value=(float(value),))
        counts = tuple(float(v) for v in value)
        if model_kind == RANDOM_FOREST and len(counts) != schema.n_classes:
            raise ModelError(f"{where}: leaf has {len(counts)} counts for {schema.n_classes} classes")
        if model_kind == GRADIENT_BOOSTED:
            if len(counts) != 1:
                raise ModelError(f"{where}: gradient-boosted leaf must hold one value")
        return LeafNode(value=counts)
    for key in ("attr", "kind", "left", "right"):
        if key not in node:
            raise ModelError(f"{where}: split node missing {key!r} (nodes must be binary)")
    attr = int(node["attr"])
    if not 0 <= attr < len(schema.attributes):
        raise ModelError(f"{where}: unknown attribute index {attr}")
    kind = node["kind"]
    spec = schema.attributes[attr]
    if kind == NUMERIC:
        if "threshold" not in node:
            raise ModelError(f"{where}: numeric split missing threshold")
        threshold = float(node["threshold"])
        if spec.kind == CATEGORICAL:
            # ordinal-coded categorical split: codes <= threshold go left
            members = frozenset(c for c in range(len(spec.categories)) if c <= threshold)
            return SplitNode(attr=attr, kind=CATEGORICAL, categories=members,
                             left=int(node["left"]), right=int(node["right"]))
        return SplitNode(attr=attr, kind=NUMERIC, threshold=threshold,
                         left=int(node["left"]), right=int(node["right"]))
    if kind == CATEGORICAL:
        if spec.kind != CATEGORICAL:
            raise ModelError(f"{where}: categorical split on numeric attribute {spec.name!r}")
        if "categories" not in node:
            raise ModelError(f"{where}: categorical split missing categories")
        members = frozenset(int(c) for c in node["categories"])
        if not members:
            raise ModelError(f"{where}: empty category split")
        if any(not 0 <= c < len(spec.categories) for c in members):
            raise ModelError(f"{where}: category index out of range for {spec.name!r}")
        return SplitNode(attr=attr, kind=CATEGORICAL, categories=members,
                         left=int(node["left"]), right=int(node["right"]))
    raise ModelError(f"{where}: unknown split kind {kind!r}")


def _check_tree(tree: Tree, tree_i: int):
    n = len(tree.nodes)
    seen = set()
    stack = [0]
    while stack:
        i = stack.pop()
        if i in seen:
            raise ModelError(f"tree {tree_i}: node {i} reached twice (not a tree)")
        seen.add(i)
        nd = tree.nodes[i]
        if isinstance(nd, SplitNode):
            for child in (nd.left, nd.right):
                if not 0 <= child < n:
                    raise ModelError(f"tree {tree_i}: child index {child} out of range")
            stack.extend((nd.left, nd.right))
    if len(seen) != n:
        raise ModelError(f"tree {tree_i}: {n - len(seen)} unreachable nodes")


def _parse_json_interchange(doc: Mapping, schema: DatasetSchema) -> TreeEnsemble:
    try:
        model_kind = doc["model_kind"]
        raw_trees = doc["trees"]
    except (KeyError, TypeError) as exc:
        raise ModelError(f"model document missing key: {exc}") from exc
    if model_kind not in (RANDOM_FOREST, GRADIENT_BOOSTED):
        raise ModelError(f"unknown model_kind {model_kind!r}")
    base = doc.get("base_scores")
    if base is None:
        base_scores = tuple(0.0 for _ in schema.classes)
    else:
        base_scores = tuple(float(b) for b in base)
        if len(base_scores) != schema.n_classes:
            raise ModelError(f"base_scores has {len(base_scores)} entries for {schema.n_classes} classes")
    trees = []
    for t, raw in enumerate(raw_trees):
        nodes = tuple(
            _validate_json_node(nd, i, t, schema, model_kind)
            for i, nd in enumerate(raw.get("nodes", ()))
        )
        if not nodes:
            raise ModelError(f"tree {t}: no nodes")
        target = raw.get("target_class")
        if target is not None:
            target = int(target)
            if not 0 <= target < schema.n_classes:
                raise ModelError(f"tree {t}: target_class {target} out of range")
        elif model_kind == GRADIENT_BOOSTED:
            if schema.n_classes != 2:
                raise ModelError(f"tree {t}: multi-class boosted tree needs target_class")
            target = 1  # binary convention: trees score the positive class
        tree = Tree(nodes=nodes, target_class=target)
        _check_tree(tree, t)
        trees.append(tree)
    if not trees:
        raise ModelError("model has no trees")
    return TreeEnsemble(model_kind=model_kind, trees=tuple(trees),
                        base_scores=base_scores, n_classes=schema.n_classes)


def _split_kv(line: str) -> tuple[str, str]:
    key, _, value = line.partition("=")
    return key.strip(), value.strip()


def _bitset_members(words: Iterable[int]) -> frozenset[int]:
    members = set()
    for w, word in enumerate(words):
        for bit in range(32):
            if word & (1 << bit):
                members.add(32 * w + bit)
    return frozenset(members)


def _parse_gbt_text(text: str, schema: DatasetSchema) -> TreeEnsemble:
    """Parse the line-oriented gradient-boosted text dump.

    Blocks start with ``Tree=<k>`` followed by ``key=value`` lines where
    array values are space-separated. Child indices >= 0 point at internal
    nodes; negative ones encode leaves as ``-(index)-1``. Categorical
    splits store an index into ``cat_boundaries``/``cat_threshold``, whose
    32-bit words form the bitset of categories routed left.
    """
    header: dict[str, str] = {}
    tree_blocks: list[dict[str, str]] = []
    current: dict[str, str] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line == "end of trees":
            break
        if "=" not in line:
            continue
        key, value = _split_kv(line)
        if key == "Tree":
            current = {}
            tree_blocks.append(current)
        elif current is not None:
            current[key] = value
        else:
            header[key] = value
    if not tree_blocks:
        raise ModelError("text model contains no Tree blocks")

    num_class = int(header.get("num_class", "1"))
    if num_class > 1 and num_class != schema.n_classes:
        raise ModelError(f"model num_class={num_class} but schema has {schema.n_classes} classes")
    if num_class == 1 and schema.n_classes != 2:
        raise ModelError("binary text model requires a 2-class schema")

    def ints(block, key):
        return [int(v) for v in block.get(key, "").split()] if block.get(key) else []

    def floats(block, key):
        return [float(v) for v in block.get(key, "").split()] if block.get(key) else []

    trees = []
    for t, block in enumerate(tree_blocks):
        leaf_values = floats(block, "leaf_value")
        if not leaf_values:
            raise ModelError(f"tree {t}: missing leaf_value")
        split_feature = ints(block, "split_feature")
        n_internal = len(split_feature)
        if len(leaf_values) != n_internal + 1:
            raise ModelError(f"tree {t}: {len(leaf_values)} leaves for {n_internal} splits")
        thresholds = floats(block, "threshold")
        decision_types = ints(block, "decision_type") or [0] * n_internal
        left = ints(block, "left_child")
        right = ints(block, "right_child")
        cat_boundaries = ints(block, "cat_boundaries")
        cat_threshold = ints(block, "cat_threshold")

        def child_index(c: int) -> int:
            # leaves are appended after the internal nodes
            return c if c >= 0 else n_internal + (-c - 1)

        nodes: list[TreeNode] = []
        for i in range(n_internal):
            attr = split_feature[i]
            if not 0 <= attr < len(schema.attributes):
                raise ModelError(f"tree {t} node {i}: unknown attribute index {attr}")
            spec = schema.attributes[attr]
            categorical_split = bool(decision_types[i] & 1)
            if categorical_split:
                if spec.kind != CATEGORICAL:
                    raise ModelError(
                        f"tree {t} node {i}: categorical split on numeric attribute {spec.name!r}")
                slot = int(thresholds[i])
                if not 0 <= slot < len(cat_boundaries) - 1:
                    raise ModelError(f"tree {t} node {i}: cat_boundaries index {slot} out of range")
                words = cat_threshold[cat_boundaries[slot]:cat_boundaries[slot + 1]]
                members = _bitset_members(words)
                members = frozenset(c for c in members if c < len(spec.categories))
                if not members:
                    raise ModelError(f"tree {t} node {i}: empty categorical bitset")
                nodes.append(SplitNode(attr=attr, kind=CATEGORICAL, categories=members,
                                       left=child_index(left[i]), right=child_index(right[i])))
            elif spec.kind == CATEGORICAL:
                members = frozenset(c for c in range(len(spec.categories)) if c <= thresholds[i])
                nodes.append(SplitNode(attr=attr, kind=CATEGORICAL, categories=members,
                                       left=child_index(left[i]), right=child_index(right[i])))
            else:
                nodes.append(SplitNode(attr=attr, kind=NUMERIC, threshold=thresholds[i],
                                       left=child_index(left[i]), right=child_index(right[i])))
        nodes.extend(LeafNode(value=(v,)) for v in leaf_values)
        target = t % num_class if num_class > 1 else 1
        tree = Tree(nodes=tuple(nodes), target_class=target)
        _check_tree(tree, t)
        trees.append(tree)

    base_scores = tuple(0.0 for _ in schema.classes)
    return TreeEnsemble(model_kind=GRADIENT_BOOSTED, trees=tuple(trees),
                        base_scores=base_scores, n_classes=schema.n_classes)


def parse_ensemble(path: str, format: str, schema: DatasetSchema) -> TreeEnsemble:
    """Parse a trained ensemble from the JSON interchange format or the
    line-oriented boosted-tree text dump."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if format in ("json", "json_interchange"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: not valid JSON ({exc})") from exc
        return _parse_json_interchange(doc, schema)
    if format in ("gbt-text", "gbt_text"):
        return _parse_gbt_text(text, schema)
    raise ValueError(f"unknown model format {format!r}")


def _all_categories(spec: AttributeSpec) -> frozenset[int]:
    return frozenset(range(len(spec.categories)))


def extract_rules(ensemble: TreeEnsemble, schema: DatasetSchema) -> list[Rule]:
    """Extract one rule per leaf: the consolidated root-to-leaf conjunction.

    Random forests label each rule with the leaf's majority class (ties
    toward the lower class index) and weight 1. Binary boosted trees label
    by the sign of the leaf value with weight ``abs(value)``; multi-class
    boosted trees keep the tree's target class and the signed value.
    """
    rules: list[Rule] = []
    for t, tree in enumerate(ensemble.trees):
        # stack entries: (node index, numeric bounds, categorical members)
        stack: list[tuple[int, dict[int, tuple[float, float]], dict[int, frozenset[int]]]] = [
            (0, {}, {})
        ]
        while stack:
            i, bounds, members = stack.pop()
            node = tree.nodes[i]
            if isinstance(node, LeafNode):
                conditions: dict[str, Condition] = {}
                for attr, (lo, hi) in bounds.items():
                    if not lo < hi:
                        raise ModelError(f"tree {t} leaf {i}: unsatisfiable numeric path")
                    conditions[schema.attributes[attr].name] = Interval(lo, hi)
                for attr, ms in members.items():
                    if not ms:
                        raise ModelError(f"tree {t} leaf {i}: unsatisfiable categorical path")
                    conditions[schema.attributes[attr].name] = CategorySet(ms)
                label, weight = _leaf_label_weight(node, tree, ensemble)
                rules.append(Rule(id=len(rules), conditions=conditions, label=label,
                                  weight=weight, source=(t, i)))
                continue
            if node.kind == NUMERIC:
                lo, hi = bounds.get(node.attr, (-math.inf, math.inf))
                left_bounds = dict(bounds)
                left_bounds[node.attr] = (lo, min(hi, node.threshold))
                right_bounds = dict(bounds)
                right_bounds[node.attr] = (max(lo, node.threshold), hi)
                stack.append((node.right, right_bounds, members))
                stack.append((node.left, left_bounds, members))
            else:
                spec = schema.attributes[node.attr]
                current = members.get(node.attr, _all_categories(spec))
                left_members = dict(members)
                left_members[node.attr] = current & node.categories
                right_members = dict(members)
                right_members[node.attr] = current - node.categories
                stack.append((node.right, bounds, right_members))
                stack.append((node.left, bounds, left_members))
    return rules


def _leaf_label_weight(leaf: LeafNode, tree: Tree, ensemble: TreeEnsemble) -> tuple[int, float]:
    if ensemble.model_kind == RANDOM_FOREST:
        return int(np.argmax(leaf.value)), 1.0
    value = leaf.value[0]
    if ensemble.n_classes == 2 and _is_binary_boosted(ensemble):
        return (1, value) if value > 0 else (0, -value)
    return int(tree.target_class), value


def _is_binary_boosted(ensemble: TreeEnsemble) -> bool:
    return all(t.target_class == 1 for t in ensemble.trees)


def covers(rule: Rule, table: SampleTable, indices: np.ndarray | None = None) -> np.ndarray:
    """Boolean mask of the rows satisfying every condition of ``rule``."""
    if indices is None:
        mask = np.ones(table.n, dtype=bool)
        view = table.columns
    else:
        mask = np.ones(len(indices), dtype=bool)
        view = {name: col[indices] for name, col in table.columns.items()}
    for attr, cond in rule.conditions.items():
        col = view[attr]
        if isinstance(cond, Interval):
            if math.isfinite(cond.lower):
                mask &= col > cond.lower
            if math.isfinite(cond.upper):
                mask &= col <= cond.upper
        else:
            mask &= np.isin(col, np.fromiter(cond.members, dtype=np.int64))
    return mask


def _leaf_assignments(tree: Tree, table: SampleTable, indices: np.ndarray) -> np.ndarray:
    """Leaf node index reached by each of the given rows."""
    out = np.empty(len(indices), dtype=np.int64)
    stack = [(0, np.arange(len(indices)))]
    while stack:
        node_i, pos = stack.pop()
        if len(pos) == 0:
            continue
        node = tree.nodes[node_i]
        if isinstance(node, LeafNode):
            out[pos] = node_i
            continue
        col = table.columns[table.schema.attributes[node.attr].name][indices[pos]]
        if node.kind == NUMERIC:
            go_left = col <= node.threshold
        else:
            go_left = np.isin(col, np.fromiter(node.categories, dtype=np.int64))
        stack.append((node.left, pos[go_left]))
        stack.append((node.right, pos[~go_left]))
    return out


def predict_original_batch(ensemble: TreeEnsemble, table: SampleTable,
                           indices: np.ndarray | None = None) -> np.ndarray:
    """Original-model class predictions for the given rows.

    Random forests take a majority vote over per-tree leaf-majority
    classes; boosted models take the argmax of base scores plus the summed
    per-class tree contributions. Ties break toward the lower class index.
    """
    idx = np.arange(table.n) if indices is None else np.asarray(indices, dtype=np.intp)
    scores = np.zeros((len(idx), ensemble.n_classes))
    if ensemble.model_kind == RANDOM_FOREST:
        for tree in ensemble.trees:
            leaves = _leaf_assignments(tree, table, idx)
            for leaf_i in np.unique(leaves):
                leaf = tree.nodes[leaf_i]
                scores[leaves == leaf_i, int(np.argmax(leaf.value))] += 1.0
    else:
        scores += np.asarray(ensemble.base_scores)
        for tree in ensemble.trees:
            leaves = _leaf_assignments(tree, table, idx)
            for leaf_i in np.unique(leaves):
                leaf = tree.nodes[leaf_i]
                scores[leaves == leaf_i, int(tree.target_class)] += leaf.value[0]
    return np.argmax(scores, axis=1)


def predict_original(ensemble: TreeEnsemble, schema: DatasetSchema,
                     values: Sequence[float]) -> int:
    """Original-model prediction for one sample (values in schema order)."""
    scores = np.zeros(ensemble.n_classes)
    if ensemble.model_kind == GRADIENT_BOOSTED:
        scores += np.asarray(ensemble.base_scores)
    for tree in ensemble.trees:
        i = 0
        while True:
            node = tree.nodes[i]
            if isinstance(node, LeafNode):
                break
            v = values[node.attr]
            if node.kind == NUMERIC:
                i = node.left if v <= node.threshold else node.right
            else:
                i = node.left if int(v) in node.categories else node.right
        if ensemble.model_kind == RANDOM_FOREST:
            scores[int(np.argmax(node.value))] += 1.0
        else:
            scores[int(tree.target_class)] += node.value[0]
    return int(np.argmax(scores))


def rules_to_json(rules: Iterable[Rule], schema: DatasetSchema) -> dict:
    """Serialize rules for the ``extract`` CLI output."""
    out = []
    for r in rules:
        conds = {}
        for attr, cond in r.conditions.items():
            if isinstance(cond, Interval):
                conds[attr] = {
                    "lower": None if math.isinf(cond.lower) else cond.lower,
                    "upper": None if math.isinf(cond.upper) else cond.upper,
                }
            else:
                conds[attr] = {"categories": sorted(cond.members)}
        out.append({
            "id": r.id,
            "conditions": conds,
            "label": r.label,
            "label_name": schema.classes[r.label],
            "weight": r.weight,
            "source": list(r.source),
        })
    return {"rules": out}
