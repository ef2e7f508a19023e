"""Record service responses for the frontend test suite.

Drives the in-process API on the bundled credit fixture through the
exact interaction sequence the frontend tests replay (group by
PriorDefault, zoom on two brushed rows, back, metric sort, pinning,
filtering, detail/info/samples reads, one rejected request), and writes
each response under frontend/tests/fixtures/. Deterministic, but slow:
the root level runs the full hyperparameter grid.
"""

import json
import pathlib
import sys

from starlette.testclient import TestClient

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from rulegrid.service import create_app  # noqa: E402
from rulegrid.workspace import load_workspace  # noqa: E402

CREDIT = ROOT / "fixtures" / "credit"
OUT = ROOT / "frontend" / "tests" / "fixtures"
BUDGET = 80


def main():
    ws = load_workspace(str(CREDIT / "rf_model.json"), str(CREDIT / "data.csv"),
                        str(CREDIT / "schema.json"))
    client = TestClient(create_app(ws, budget=BUDGET))
    OUT.mkdir(parents=True, exist_ok=True)
    written = []

    def save(name: str, body):
        path = OUT / f"{name}.json"
        with open(path, "w") as fh:
            json.dump(body, fh, indent=1)
            fh.write("\n")
        written.append(name)

    def level(resp):
        assert resp.status_code == 200, resp.text
        return resp.json()["level"]

    print("building root level (grid search, takes a few minutes)...")
    root = level(client.post("/sessions", json={}))
    sid = client.app.state.sessions and next(iter(client.app.state.sessions))
    save("root", root)
    print(f"root: {len(root['rules'])} rules, depth {root['depth']}")

    grouped = level(client.post(f"/sessions/{sid}/order",
                                json={"mode": "group", "attribute": "PriorDefault"}))
    save("group_priordefault", grouped)

    brushed = grouped["row_order"][:2]
    print(f"zooming on rows {brushed}...")
    zoomed = level(client.post(f"/sessions/{sid}/zoom", json={"selected": brushed}))
    save("zoom", zoomed)
    save("zoom_selected", {"selected": brushed})

    back = level(client.post(f"/sessions/{sid}/back"))
    assert back == grouped, "back must restore the grouped payload"
    save("back", back)

    sorted_ = level(client.post(f"/sessions/{sid}/order",
                                json={"mode": "metric", "metric": "anomaly",
                                      "direction": "desc"}))
    save("order_anomaly_desc", sorted_)

    pinned = level(client.post(f"/sessions/{sid}/order",
                               json={"mode": "metric", "metric": "coverage",
                                     "direction": "desc",
                                     "pinned": ["PriorDefault", "Income"]}))
    save("order_pinned", pinned)

    rid = root["row_order"][0]
    detail = client.get(f"/sessions/{sid}/rules/{rid}")
    assert detail.status_code == 200, detail.text
    save("rule_detail", detail.json())

    empty = client.post(f"/sessions/{sid}/filter", json={"predicates": []})
    assert empty.status_code == 200
    save("filter_empty", empty.json())

    filtered = client.post(f"/sessions/{sid}/filter", json={"predicates": [
        {"attribute": "PriorDefault", "categories": ["yes"]},
        {"attribute": "Age", "lower": 30},
    ]})
    assert filtered.status_code == 200
    save("filter_age_priordefault", filtered.json())

    info = client.get(f"/sessions/{sid}/info")
    assert info.status_code == 200
    save("info", info.json())

    samples = client.get(f"/sessions/{sid}/samples", params={"page": 0})
    assert samples.status_code == 200
    save("samples", samples.json())

    by_age = client.get(f"/sessions/{sid}/samples",
                        params={"sort": "Age", "dir": "desc", "page": 0})
    assert by_age.status_code == 200
    save("samples_age_desc", by_age.json())

    bad = client.post(f"/sessions/{sid}/order",
                      json={"mode": "metric", "metric": "zzz"})
    assert bad.status_code == 422
    save("error_unknown_metric", {"status": bad.status_code,
                                  "detail": bad.json()["detail"]})

    print(f"wrote {len(written)} fixtures to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
