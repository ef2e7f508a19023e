"""HTTP/JSON API for interactive rule exploration.

Sessions are in-memory: each one holds a workspace reference, the zoom
stack, and the current matrix ordering. Every response the UI renders
is built here; the client never recomputes scores or orders. Mutating
requests on one session are serialized (busy sessions answer 409), and
each level's last payload is cached so back-navigation and repeated
reads return byte-identical bodies.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .features import QuantileMaps
from .hierarchy import Explorer, HierarchyError, HierarchyLevel, build_root
from .ingest import (
    LABEL_COLUMN,
    SPLIT_COLUMN,
    DataError,
    Interval,
    ModelError,
    Rule,
    SchemaError,
    covers,
)
from .reduction import rule_confidence, rule_coverage
from .reorder import (
    PAGE_SIZE,
    TAU_DEFAULT,
    group_by_attribute,
    rank_increase_arrows,
    reorder_rules,
    sort_attributes,
    sort_rules_by_metric,
)
from .workspace import Workspace, load_workspace

SESSION_TTL_SECONDS = 3600.0
DATA_PAGE_SIZE = 50
HISTOGRAM_BINS = 10


def significant(value, digits: int = 6):
    """Round floats to a fixed number of significant digits, recursively
    through payload containers; ints and bools pass through."""
    if isinstance(value, bool) or isinstance(value, (int, str)) or value is None:
        return value
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: significant(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [significant(v, digits) for v in value]
    return value


@dataclass
class MatrixState:
    """Current ordering of the matrix for one level."""

    row_order: list  # rule ids in display order
    attr_order: list
    pages: list
    pinned: list
    boundaries: list  # [{"attribute": name, "groups": [[s, e], ...]}]
    mode: str


@dataclass
class Frame:
    """One entry of a session's level stack: the level, its ordering,
    and the exact payload last served for it."""

    level: HierarchyLevel
    state: MatrixState
    payload: dict
    parent_attr_order: list


@dataclass
class Session:
    id: str
    workspace: Workspace
    explorer: Explorer
    frames: list = field(default_factory=list)
    filters: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = field(default_factory=time.monotonic)

    @property
    def frame(self) -> Frame:
        return self.frames[-1]


class ZoomBody(BaseModel):
    selected: list[int]


class OrderBody(BaseModel):
    mode: str = "metric"
    metric: str = "coverage"
    direction: str = "desc"
    attribute: str | None = None
    attributes: list[str] | None = None
    pinned: list[str] = []
    tau: float = TAU_DEFAULT


class _MetricCache:
    """Coverage/confidence per rule are level-independent; compute once
    per workspace."""

    def __init__(self):
        self._store = {}

    def get(self, ws: Workspace, rule: Rule) -> tuple[int, float]:
        key = (id(ws), rule.id)
        if key not in self._store:
            self._store[key] = (rule_coverage(rule, ws.samples),
                                rule_confidence(rule, ws.samples))
        return self._store[key]


def _condition_payload(rule: Rule, ws: Workspace) -> dict:
    out = {}
    for attr, cond in rule.conditions.items():
        spec = ws.schema.attribute(attr)
        if isinstance(cond, Interval):
            out[attr] = {
                "kind": "numeric",
                "lower": None if cond.lower == -np.inf else cond.lower,
                "upper": None if cond.upper == np.inf else cond.upper,
                "lower_q": ws.maps.evaluate(attr, cond.lower),
                "upper_q": ws.maps.evaluate(attr, cond.upper),
            }
        else:
            members = sorted(cond.members)
            out[attr] = {
                "kind": "categorical",
                "categories": [spec.categories[k] for k in members],
                "indices": members,
            }
    return out


def _default_state(level: HierarchyLevel, ws: Workspace, metrics: _MetricCache,
                   pinned: list | None = None) -> MatrixState:
    """Fresh ordering for a level: coverage descending, columns by usage."""
    rules = [ws.rule_by_id[i] for i in level.representatives]
    coverage = [metrics.get(ws, r)[0] for r in rules]
    perm = sort_rules_by_metric(coverage, "desc")
    attr_order, pages = sort_attributes(rules, ws.schema, pinned or [])
    return MatrixState(
        row_order=[rules[p].id for p in perm],
        attr_order=attr_order,
        pages=pages,
        pinned=list(pinned or []),
        boundaries=[],
        mode="coverage",
    )


def _build_payload(level: HierarchyLevel, state: MatrixState, ws: Workspace,
                   metrics: _MetricCache, arrows: list) -> dict:
    by_id = ws.rule_by_id
    scores = ws.scores_by_id()
    assigned_counts = {}
    for rep in level.representatives:
        assigned_counts[rep] = 1
    for rep in level.assignments.values():
        assigned_counts[rep] = assigned_counts.get(rep, 0) + 1

    rows = []
    for rid in state.row_order:
        rule = by_id[rid]
        coverage, confidence = metrics.get(ws, rule)
        rows.append({
            "id": rid,
            "parent": level.parents.get(rid),
            "label": rule.label,
            "label_name": ws.schema.classes[rule.label],
            "weight": rule.weight,
            "conditions": _condition_payload(rule, ws),
            "coverage": coverage,
            "confidence": confidence,
            "anomaly": scores[rid],
            "neighborhood_size": assigned_counts[rid],
        })

    displayed = [by_id[i] for i in level.representatives]
    attributes = []
    for pos, attr in enumerate(state.attr_order):
        users = [r for r in displayed if r.uses(attr)]
        per_label = {name: 0 for name in ws.schema.classes}
        for r in users:
            per_label[ws.schema.classes[r.label]] += 1
        attributes.append({
            "name": attr,
            "kind": ws.schema.attribute(attr).kind,
            "usage": len(users),
            "rule_counts": per_label,
            "page": pos // PAGE_SIZE,
        })

    sel = level.selection
    payload = {
        "depth": level.depth,
        "budget_used": len(level.representatives),
        "neighborhood_size": len(level.neighborhood),
        "scope_size": int(len(level.scope)),
        "rules": rows,
        "row_order": list(state.row_order),
        "attributes": attributes,
        "attribute_order": list(state.attr_order),
        "pinned": list(state.pinned),
        "arrows": list(arrows),
        "boundaries": state.boundaries,
        "sort_mode": state.mode,
        "metrics": {
            "fidelity_train": sel.fidelity_train,
            "fidelity_test": sel.fidelity_test,
            "average_anomaly": sel.average_anomaly,
            "objective": sel.objective_value,
            "margin": sel.margin,
            "tradeoff": sel.tradeoff,
        },
    }
    return significant(payload)


def create_app(default_workspace: Workspace | None = None, budget: int = 80,
               margin: float | None = None, tradeoff: float | None = None) -> FastAPI:
    app = FastAPI(title="rule matrix service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions: dict[str, Session] = {}
    workspaces: dict[tuple, Workspace] = {}
    roots: dict[tuple, HierarchyLevel] = {}
    metrics = _MetricCache()
    app.state.sessions = sessions

    def _evict_idle():
        now = time.monotonic()
        for sid in [s for s, sess in sessions.items()
                    if now - sess.last_access > SESSION_TTL_SECONDS]:
            del sessions[sid]

    def _get_session(sid: str) -> Session:
        _evict_idle()
        sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(404, f"unknown session: {sid}")
        sess.last_access = time.monotonic()
        return sess

    def _acquire(sess: Session):
        if not sess.lock.acquire(blocking=False):
            raise HTTPException(409, "another update on this session is in flight")

    def _displayed_rules(sess: Session) -> list[Rule]:
        by_id = sess.workspace.rule_by_id
        return [by_id[i] for i in sess.frame.level.representatives]

    def _scope_covered(sess: Session) -> np.ndarray:
        """Rows of the level scope covered by at least one displayed rule."""
        ws = sess.workspace
        scope = sess.frame.level.scope
        mask = np.zeros(len(scope), dtype=bool)
        for rule in _displayed_rules(sess):
            mask |= covers(rule, ws.samples, scope)
        return scope[mask]

    def _push_frame(sess: Session, level: HierarchyLevel, parent_attr_order: list):
        ws = sess.workspace
        state = _default_state(level, ws, metrics)
        arrows = rank_increase_arrows(parent_attr_order, state.attr_order, ws.schema) \
            if parent_attr_order else []
        payload = _build_payload(level, state, ws, metrics, arrows)
        sess.frames.append(Frame(level, state, payload, list(parent_attr_order)))
        return payload

    @app.get("/health")
    def health():
        ws = default_workspace
        if ws is None:
            return {"status": "ok", "model": None}
        return {"status": "ok", "model": {
            "kind": ws.ensemble.model_kind,
            "trees": len(ws.ensemble.trees),
            "rules": len(ws.rules),
            "classes": list(ws.schema.classes),
            "attributes": len(ws.schema.attributes),
            "samples": ws.samples.n,
        }}

    @app.get("/sessions")
    def list_sessions():
        # sessions are opaque and private; the collection is not readable
        raise HTTPException(404, "sessions are not listable")

    @app.post("/sessions")
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(400, "request body is not valid JSON")
        if not isinstance(body, dict):
            raise HTTPException(400, "request body must be a JSON object")

        paths = {k: body.get(k) for k in ("model", "data", "schema")}
        given = [k for k, v in paths.items() if v is not None]
        if given and len(given) != 3:
            raise HTTPException(422, "model, data and schema paths go together")
        session_budget = int(body.get("budget", budget))
        session_margin = body.get("margin", margin)
        session_tradeoff = body.get("tradeoff", tradeoff)

        if given:
            fmt = body.get("format", "json")
            key = (paths["model"], paths["data"], paths["schema"], fmt)
            try:
                if key not in workspaces:
                    workspaces[key] = load_workspace(paths["model"], paths["data"],
                                                     paths["schema"], fmt)
            except FileNotFoundError as exc:
                raise HTTPException(400, f"missing input file: {exc}")
            except ModelError as exc:
                raise HTTPException(400, f"model parse error: {exc}")
            except (SchemaError, DataError) as exc:
                raise HTTPException(422, str(exc))
            ws = workspaces[key]
        elif default_workspace is not None:
            key = ("default",)
            ws = default_workspace
        else:
            raise HTTPException(422, "no model loaded; pass model, data and schema paths")

        root_key = key + (session_budget, session_margin, session_tradeoff)
        if root_key not in roots:
            roots[root_key] = build_root(ws, session_budget, session_margin,
                                         session_tradeoff)
        explorer = Explorer(ws, session_budget, session_margin, session_tradeoff,
                            levels=[roots[root_key]])
        sess = Session(id=uuid.uuid4().hex, workspace=ws, explorer=explorer)
        payload = _push_frame(sess, explorer.current, [])
        sessions[sess.id] = sess
        return {"session": sess.id, "level": payload}

    @app.get("/sessions/{sid}/level")
    def current_level(sid: str):
        sess = _get_session(sid)
        return {"session": sid, "level": sess.frame.payload}

    @app.post("/sessions/{sid}/zoom")
    def zoom(sid: str, body: ZoomBody):
        sess = _get_session(sid)
        _acquire(sess)
        try:
            try:
                level = sess.explorer.zoom_in(body.selected)
            except HierarchyError as exc:
                raise HTTPException(422, str(exc))
            payload = _push_frame(sess, level, sess.frames[-1].state.attr_order)
            return {"session": sid, "level": payload}
        finally:
            sess.lock.release()

    @app.post("/sessions/{sid}/back")
    def back(sid: str):
        sess = _get_session(sid)
        _acquire(sess)
        try:
            try:
                sess.explorer.zoom_out()
            except HierarchyError as exc:
                raise HTTPException(409, str(exc))
            sess.frames.pop()
            return {"session": sid, "level": sess.frame.payload}
        finally:
            sess.lock.release()

    @app.post("/sessions/{sid}/order")
    def order(sid: str, body: OrderBody):
        sess = _get_session(sid)
        _acquire(sess)
        try:
            ws = sess.workspace
            frame = sess.frame
            rules = _displayed_rules(sess)
            try:
                for name in body.pinned:
                    ws.schema.attribute_index(name)
                if len(set(body.pinned)) != len(body.pinned):
                    raise HTTPException(422, "pinned attributes repeat")
                if body.mode == "metric":
                    if body.metric not in ("coverage", "confidence", "anomaly"):
                        raise HTTPException(422, f"unknown metric: {body.metric}")
                    scores = ws.scores_by_id()
                    values = []
                    for r in rules:
                        cov, conf = metrics.get(ws, r)
                        values.append({"coverage": cov, "confidence": conf,
                                       "anomaly": scores[r.id]}[body.metric])
                    perm = sort_rules_by_metric(values, body.direction)
                    boundaries = []
                    mode = body.metric
                elif body.mode == "group":
                    if body.attribute is None:
                        raise HTTPException(422, "group mode needs an attribute")
                    groups = group_by_attribute(rules, body.attribute, ws.schema, ws.maps)
                    perm = [p for g in groups for p in g]
                    spans, start = [], 0
                    for g in groups:
                        spans.append([start, start + len(g)])
                        start += len(g)
                    boundaries = [{"attribute": body.attribute, "groups": spans}]
                    mode = f"group:{body.attribute}"
                elif body.mode == "reorder":
                    attrs = body.attributes or ([body.attribute] if body.attribute else None)
                    if not attrs:
                        raise HTTPException(422, "reorder mode needs attributes")
                    for name in attrs:
                        ws.schema.attribute_index(name)
                    if not 0 <= body.tau <= 1:
                        raise HTTPException(422, "tau must be within [0, 1]")
                    perm, nested = reorder_rules(rules, attrs, body.tau, ws.maps)
                    boundaries = [
                        {"attribute": attr, "groups": [[s, e] for s, e in spans]}
                        for attr, spans in zip(attrs, nested)
                    ]
                    mode = "reorder:" + ",".join(attrs)
                else:
                    raise HTTPException(422, f"unknown order mode: {body.mode}")
            except SchemaError as exc:
                raise HTTPException(422, str(exc))

            attr_order, pages = sort_attributes(rules, ws.schema, body.pinned)
            state = MatrixState(
                row_order=[rules[p].id for p in perm],
                attr_order=attr_order,
                pages=pages,
                pinned=list(body.pinned),
                boundaries=boundaries,
                mode=mode,
            )
            arrows = rank_increase_arrows(frame.parent_attr_order, attr_order, ws.schema) \
                if frame.parent_attr_order else []
            frame.state = state
            frame.payload = _build_payload(frame.level, state, ws, metrics, arrows)
            return {"session": sid, "level": frame.payload}
        finally:
            sess.lock.release()

    @app.get("/sessions/{sid}/rules/{rid}")
    def rule_detail(sid: str, rid: int):
        sess = _get_session(sid)
        ws = sess.workspace
        if rid not in set(sess.frame.level.representatives):
            raise HTTPException(404, f"rule {rid} is not displayed")
        rule = ws.rule_by_id[rid]
        train = ws.samples.train_indices
        covered = train[covers(rule, ws.samples, train)]
        coverage, confidence = metrics.get(ws, rule)
        detail = {
            "id": rid,
            "label": rule.label,
            "label_name": ws.schema.classes[rule.label],
            "conditions": _condition_payload(rule, ws),
            "coverage": coverage,
            "confidence": confidence,
            "anomaly": ws.scores_by_id()[rid],
            "covered_sample_ids": [int(i) for i in covered],
            "distributions": _distributions(ws, covered),
        }
        return significant(detail)

    def _distributions(ws: Workspace, covered: np.ndarray) -> dict:
        """Per-attribute histograms of the covered training rows, with the
        full training distribution alongside for overlay rendering."""
        train = ws.samples.train_indices
        out = {}
        for spec in ws.schema.attributes:
            if spec.kind == "numeric":
                edges = np.linspace(0.0, 1.0, HISTOGRAM_BINS + 1)
                values = ws.samples.columns[spec.name]
                q_cov = ws.maps.evaluate_many(spec.name, values[covered])
                q_all = ws.maps.evaluate_many(spec.name, values[train])
                cov_hist = np.histogram(q_cov, bins=edges)[0]
                all_hist = np.histogram(q_all, bins=edges)[0]
                out[spec.name] = {
                    "kind": "numeric",
                    "bin_edges": [float(e) for e in edges],
                    "covered": [int(c) for c in cov_hist],
                    "training": [int(c) for c in all_hist],
                }
            else:
                codes = ws.samples.columns[spec.name].astype(np.int64)
                k = len(spec.categories)
                cov_counts = np.bincount(codes[covered], minlength=k)
                all_counts = np.bincount(codes[train], minlength=k)
                out[spec.name] = {
                    "kind": "categorical",
                    "categories": list(spec.categories),
                    "covered": [int(c) for c in cov_counts],
                    "training": [int(c) for c in all_counts],
                }
        return out

    @app.post("/sessions/{sid}/filter")
    async def filter_samples(sid: str, request: Request):
        sess = _get_session(sid)
        _acquire(sess)
        try:
            ws = sess.workspace
            try:
                body = await request.json()
            except Exception:
                raise HTTPException(400, "request body is not valid JSON")
            predicates = body.get("predicates") if isinstance(body, dict) else None
            if not isinstance(predicates, list):
                raise HTTPException(422, "predicates must be a list")

            train = ws.samples.train_indices
            mask = np.ones(len(train), dtype=bool)
            for pred in predicates:
                mask &= _predicate_mask(ws, pred, train)
            matched = train[mask]

            def distribution(rows):
                counts = np.bincount(ws.samples.labels[rows],
                                     minlength=ws.schema.n_classes) \
                    if len(rows) else np.zeros(ws.schema.n_classes, dtype=int)
                return {name: int(c) for name, c in zip(ws.schema.classes, counts)}

            sess.filters = predicates
            return {
                "before": distribution(train),
                "after": distribution(matched),
                "matching_sample_ids": [int(i) for i in matched],
            }
        finally:
            sess.lock.release()

    def _predicate_mask(ws: Workspace, pred, train: np.ndarray) -> np.ndarray:
        if not isinstance(pred, dict) or "attribute" not in pred:
            raise HTTPException(422, "each predicate needs an attribute")
        name = pred["attribute"]
        try:
            spec = ws.schema.attribute(name)
        except SchemaError as exc:
            raise HTTPException(422, str(exc))
        if spec.kind == "numeric":
            if "categories" in pred:
                raise HTTPException(422, f"{name} is numeric; categories not allowed")
            lower, upper = pred.get("lower"), pred.get("upper")
            if lower is None and upper is None:
                raise HTTPException(422, f"predicate on {name} needs lower or upper")
            for bound in (lower, upper):
                if bound is not None and not isinstance(bound, (int, float)):
                    raise HTTPException(422, f"bounds on {name} must be numbers")
            values = ws.samples.columns[name][train]
            mask = np.ones(len(train), dtype=bool)
            if lower is not None:
                mask &= values >= lower
            if upper is not None:
                mask &= values <= upper
            return mask
        cats = pred.get("categories")
        if not isinstance(cats, list) or not cats:
            raise HTTPException(422, f"predicate on {name} needs a category list")
        indices = []
        for c in cats:
            if c not in spec.categories:
                raise HTTPException(422, f"unknown category for {name}: {c}")
            indices.append(spec.categories.index(c))
        codes = ws.samples.columns[name][train].astype(np.int64)
        return np.isin(codes, indices)

    @app.get("/sessions/{sid}/samples")
    def samples_page(sid: str, sort: str | None = None, dir: str = "asc", page: int = 0):
        sess = _get_session(sid)
        ws = sess.workspace
        if dir not in ("asc", "desc"):
            raise HTTPException(422, f"unknown sort direction: {dir}")
        if page < 0:
            raise HTTPException(422, "page must be non-negative")
        rows = _scope_covered(sess)
        if sort is not None:
            try:
                ws.schema.attribute_index(sort)
            except SchemaError as exc:
                raise HTTPException(422, str(exc))
            keys = ws.samples.columns[sort][rows].astype(float)
            if dir == "desc":
                keys = -keys
            rows = rows[np.argsort(keys, kind="stable")]
        start = page * DATA_PAGE_SIZE
        chunk = rows[start:start + DATA_PAGE_SIZE]
        records = []
        for i in chunk:
            rec = ws.samples.row_record(int(i))
            label = rec.pop(LABEL_COLUMN)
            split = rec.pop(SPLIT_COLUMN)
            records.append({"id": int(i), "values": rec, "label": label, "split": split})
        return significant({
            "total": int(len(rows)),
            "page": page,
            "page_size": DATA_PAGE_SIZE,
            "rows": records,
        })

    @app.get("/sessions/{sid}/info")
    def info(sid: str):
        sess = _get_session(sid)
        ws = sess.workspace
        level = sess.frame.level
        rules = _displayed_rules(sess)
        per_label = {name: 0 for name in ws.schema.classes}
        for r in rules:
            per_label[ws.schema.classes[r.label]] += 1
        covered = _scope_covered(sess)
        class_counts = np.bincount(ws.samples.labels[covered],
                                   minlength=ws.schema.n_classes) \
            if len(covered) else np.zeros(ws.schema.n_classes, dtype=int)
        scores = ws.scores_by_id()
        confidences = [metrics.get(ws, r)[1] for r in rules]
        return significant({
            "depth": level.depth,
            "displayed_rules": len(rules),
            "rule_counts": per_label,
            "covered_samples": {name: int(c) for name, c
                                in zip(ws.schema.classes, class_counts)},
            "scope_size": int(len(level.scope)),
            "mean_confidence": float(np.mean(confidences)) if confidences else 0.0,
            "mean_anomaly": float(np.mean([scores[r.id] for r in rules])) if rules else 0.0,
        })

    return app
