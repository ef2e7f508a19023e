"""Rule-set analysis for tree ensemble classifiers.

Extracts one rule per root-to-leaf path, selects a small anomaly-biased
subset that preserves the ensemble's predictions, arranges the result
as a zoomable rule hierarchy, and serves the reorderable rule-by-
attribute matrix over HTTP for interactive exploration.
"""

from .ingest import (
    DatasetSchema,
    Rule,
    SampleTable,
    TreeEnsemble,
    extract_rules,
    load_samples,
    load_schema,
    parse_ensemble,
    predict_original,
    predict_original_batch,
)
from .reduction import Selection, reduce_rules
from .workspace import Workspace, build_workspace, load_workspace

__version__ = "0.1.0"

__all__ = [
    "DatasetSchema",
    "Rule",
    "SampleTable",
    "TreeEnsemble",
    "Selection",
    "Workspace",
    "build_workspace",
    "extract_rules",
    "load_samples",
    "load_schema",
    "load_workspace",
    "parse_ensemble",
    "predict_original",
    "predict_original_batch",
    "reduce_rules",
    "__version__",
]
