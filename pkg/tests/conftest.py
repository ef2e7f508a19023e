import json
import pathlib
import sys

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from helpers import make_schema, make_table, random_tree_nodes, rf_doc  # noqa: E402

from rulegrid.workspace import build_workspace, load_workspace  # noqa: E402
from rulegrid.ingest import parse_ensemble  # noqa: E402

CREDIT = pathlib.Path(__file__).parent.parent / "fixtures" / "credit"


@pytest.fixture(scope="session")
def credit_paths():
    return {
        "model": str(CREDIT / "rf_model.json"),
        "data": str(CREDIT / "data.csv"),
        "schema": str(CREDIT / "schema.json"),
    }


@pytest.fixture(scope="session")
def credit_ws(credit_paths):
    return load_workspace(credit_paths["model"], credit_paths["data"],
                          credit_paths["schema"])


def _small_inputs(tmp_dir: pathlib.Path):
    """A compact workspace whose labels actually follow the attributes,
    so reduction and zooming have structure to find."""
    rng = np.random.default_rng(42)
    schema = make_schema(numeric=("x", "y"),
                         categorical={"color": ("red", "green", "blue")},
                         classes=("no", "yes"))
    n = 140
    rows, labels = [], []
    for _ in range(n):
        x, y = float(rng.normal()), float(rng.normal())
        color = int(rng.integers(3))
        rows.append({"x": x, "y": y, "color": color})
        score = x + 0.5 * y + (0.8 if color == 2 else 0.0) + rng.normal(0, 0.4)
        labels.append(int(score > 0))
    is_train = rng.random(n) < 0.7
    if not is_train.any():
        is_train[0] = True
    table = make_table(schema, rows, labels, is_train)
    trees = [random_tree_nodes(rng, schema, max_depth=3) for _ in range(10)]
    model_path = tmp_dir / "model.json"
    model_path.write_text(json.dumps(rf_doc(trees)))
    ensemble = parse_ensemble(str(model_path), "json", schema)
    return schema, table, ensemble


@pytest.fixture(scope="session")
def small_ws(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("small-ws")
    schema, table, ensemble = _small_inputs(tmp)
    return build_workspace(schema, table, ensemble)
