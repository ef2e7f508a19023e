"""Fixed-length feature vectors for rules.

Numeric condition bounds are pushed through per-attribute empirical CDFs
so every attribute lives on a common [0, 1] scale; categorical conditions
become training-frequency distribution vectors restricted to the allowed
categories. The concatenated vectors feed anomaly scoring and the
weighted distances used when assigning hidden rules to representatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ingest import (
    CATEGORICAL,
    NUMERIC,
    CategorySet,
    DatasetSchema,
    Interval,
    Rule,
    SampleTable,
)


@dataclass
class QuantileMaps:
    """Per-attribute value-to-quantile evaluators built from training rows.

    Numeric attributes use the empirical CDF with linear interpolation
    between order statistics (mean rank for ties, endpoints pinned to 0
    and 1); an attribute whose training values are all identical maps every
    finite value to 0.5 and is listed in ``constant_attributes``.
    Categorical attributes keep training counts per category.
    """

    numeric_values: dict[str, np.ndarray]
    numeric_positions: dict[str, np.ndarray]
    categorical_counts: dict[str, np.ndarray]
    constant_attributes: list[str] = field(default_factory=list)

    def evaluate(self, attr: str, x: float) -> float:
        """Map a raw numeric value to [0, 1]; -inf -> 0 and +inf -> 1."""
        if x == -math.inf:
            return 0.0
        if x == math.inf:
            return 1.0
        values = self.numeric_values[attr]
        if attr in self._constant_set:
            return 0.5
        return float(np.interp(x, values, self.numeric_positions[attr], left=0.0, right=1.0))

    def evaluate_many(self, attr: str, xs: np.ndarray) -> np.ndarray:
        if attr in self._constant_set:
            return np.full(len(xs), 0.5)
        return np.interp(xs, self.numeric_values[attr], self.numeric_positions[attr],
                         left=0.0, right=1.0)

    def counts(self, attr: str) -> tuple[np.ndarray, int]:
        c = self.categorical_counts[attr]
        return c, int(c.sum())

    @property
    def _constant_set(self) -> frozenset[str]:
        return frozenset(self.constant_attributes)


def build_quantile_maps(samples: SampleTable, schema: DatasetSchema) -> QuantileMaps:
    """Build quantile evaluators and category counts from the train split."""
    train = samples.train_indices
    if len(train) == 0:
        raise ValueError("no training rows to build quantile maps from")
    numeric_values: dict[str, np.ndarray] = {}
    numeric_positions: dict[str, np.ndarray] = {}
    categorical_counts: dict[str, np.ndarray] = {}
    constant: list[str] = []
    for a in schema.attributes:
        col = samples.columns[a.name][train]
        if a.kind == NUMERIC:
            values = np.sort(col)
            uniq, start = np.unique(values, return_index=True)
            if len(uniq) < 2:
                constant.append(a.name)
                numeric_values[a.name] = uniq
                numeric_positions[a.name] = np.array([0.5])
                continue
            n = len(values)
            counts = np.diff(np.append(start, n))
            # mean rank of each tied run, scaled to [0, 1]
            positions = (start + (counts - 1) / 2.0) / (n - 1)
            positions[0] = 0.0
            positions[-1] = 1.0
            numeric_values[a.name] = uniq
            numeric_positions[a.name] = positions
        else:
            categorical_counts[a.name] = np.bincount(
                col.astype(np.int64), minlength=len(a.categories)
            )
    return QuantileMaps(numeric_values, numeric_positions, categorical_counts, constant)


def vectorize_condition_categorical(members: frozenset[int] | set[int],
                                    counts: np.ndarray, total: int) -> np.ndarray:
    """Distribution vector: training share for allowed categories, 0 elsewhere."""
    if total == 0:
        raise ValueError("cannot vectorize against zero training samples")
    if not members:
        raise ValueError("empty category subset")
    out = np.zeros(len(counts))
    for k in members:
        out[k] = counts[k] / total
    return out


def attribute_slots(schema: DatasetSchema) -> list[tuple[str, slice]]:
    """Layout of each attribute's slots in the concatenated feature vector."""
    slots = []
    offset = 0
    for a in schema.attributes:
        width = 2 if a.kind == NUMERIC else len(a.categories)
        slots.append((a.name, slice(offset, offset + width)))
        offset += width
    return slots


def feature_dimension(schema: DatasetSchema) -> int:
    return sum(2 if a.kind == NUMERIC else len(a.categories) for a in schema.attributes)


def vectorize_rule(rule: Rule, schema: DatasetSchema, maps: QuantileMaps) -> np.ndarray:
    """Concatenated per-attribute encoding of a rule's conditions.

    Attributes the rule does not condition on get the weakest-condition
    encoding: the full [0, 1] interval for numerics and the complete
    training distribution for categoricals.
    """
    parts = []
    for a in schema.attributes:
        cond = rule.conditions.get(a.name)
        if a.kind == NUMERIC:
            if cond is None:
                parts.append(np.array([0.0, 1.0]))
            else:
                assert isinstance(cond, Interval)
                parts.append(np.array([
                    maps.evaluate(a.name, cond.lower),
                    maps.evaluate(a.name, cond.upper),
                ]))
        else:
            counts, total = maps.counts(a.name)
            members = cond.members if isinstance(cond, CategorySet) else frozenset(range(len(counts)))
            parts.append(vectorize_condition_categorical(members, counts, total))
    return np.concatenate(parts)


def vectorize_rules(rules: list[Rule], schema: DatasetSchema, maps: QuantileMaps) -> np.ndarray:
    if not rules:
        return np.zeros((0, feature_dimension(schema)))
    return np.stack([vectorize_rule(r, schema, maps) for r in rules])


def attribute_usage_weights(rules: list[Rule], schema: DatasetSchema) -> np.ndarray:
    """Per-attribute usage frequency among ``rules`` (schema order)."""
    if not rules:
        raise ValueError("need at least one rule")
    weights = np.zeros(len(schema.attributes))
    for i, a in enumerate(schema.attributes):
        weights[i] = sum(1 for r in rules if r.uses(a.name)) / len(rules)
    return weights


def broadcast_weights(weights: np.ndarray, schema: DatasetSchema) -> np.ndarray:
    """Expand per-attribute weights onto every slot of that attribute."""
    slot_weights = np.empty(feature_dimension(schema))
    for w, (_, sl) in zip(weights, attribute_slots(schema)):
        slot_weights[sl] = w
    return slot_weights


def weighted_distance(a: np.ndarray, b: np.ndarray, slot_weights: np.ndarray) -> float:
    """Weighted Euclidean distance between two rule feature vectors."""
    if a.shape != b.shape or a.shape != slot_weights.shape:
        raise ValueError(f"dimension mismatch: {a.shape}, {b.shape}, {slot_weights.shape}")
    d = a - b
    return float(np.sqrt(np.sum(slot_weights * d * d)))
