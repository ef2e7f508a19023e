"""Shared analysis state: model, data, rules, and derived artifacts.

Everything downstream (hierarchy, ordering, the HTTP service, the CLI)
works off one Workspace so the anomaly scores and original-model
predictions are computed once and stay consistent across zoom levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anomaly import LogisticConfig, LogisticModel, anomaly_scores, fit_logistic
from .features import QuantileMaps, build_quantile_maps, vectorize_rules
from .ingest import (
    DatasetSchema,
    Rule,
    SampleTable,
    TreeEnsemble,
    extract_rules,
    load_samples,
    load_schema,
    parse_ensemble,
    predict_original_batch,
)


@dataclass
class Workspace:
    schema: DatasetSchema
    samples: SampleTable
    ensemble: TreeEnsemble
    rules: list[Rule]
    maps: QuantileMaps
    features: np.ndarray  # one quantile-space vector per rule
    anomaly_model: LogisticModel
    scores: np.ndarray  # anomaly score per rule, aligned with ``rules``
    original_labels: np.ndarray  # original-model prediction per table row

    @property
    def rule_by_id(self) -> dict[int, Rule]:
        return {r.id: r for r in self.rules}

    def scores_by_id(self) -> dict[int, float]:
        return {r.id: float(s) for r, s in zip(self.rules, self.scores)}


def build_workspace(schema: DatasetSchema, samples: SampleTable, ensemble: TreeEnsemble,
                    logistic_config: LogisticConfig = LogisticConfig()) -> Workspace:
    rules = extract_rules(ensemble, schema)
    maps = build_quantile_maps(samples, schema)
    features = vectorize_rules(rules, schema, maps)
    labels = np.array([r.label for r in rules], dtype=np.int64)
    model = fit_logistic(features, labels, schema.n_classes, logistic_config)
    scores = anomaly_scores(model, features, labels)
    original = predict_original_batch(ensemble, samples)
    return Workspace(schema, samples, ensemble, rules, maps, features,
                     model, scores, original)


def load_workspace(model_path: str, data_path: str, schema_path: str,
                   model_format: str = "json",
                   logistic_config: LogisticConfig = LogisticConfig()) -> Workspace:
    """Read the three input files and derive the shared state."""
    schema = load_schema(schema_path)
    samples = load_samples(data_path, schema)
    ensemble = parse_ensemble(model_path, model_format, schema)
    return build_workspace(schema, samples, ensemble, logistic_config)
