"""Zoomable level-of-detail structure over the rule set.

Each level shows at most ``budget`` representative rules; every other
rule in the level's neighborhood is hidden behind its nearest
representative (weighted Euclidean distance in quantile space, weights
from attribute usage at that level). Zooming into a selection re-runs
the reduction on the selection's neighborhood with the selected rules
force-included; levels are immutable, so back-navigation just pops a
stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .features import attribute_usage_weights, broadcast_weights
from .ingest import covers
from .reduction import Selection, reduce_rules
from .workspace import Workspace


class HierarchyError(ValueError):
    """Invalid zoom request or a level with nothing to work on."""


@dataclass(frozen=True)
class HierarchyLevel:
    """One immutable level: representatives, hidden assignment, scope."""

    depth: int
    representatives: tuple[int, ...]  # ascending rule ids
    parents: dict  # representative id -> parent representative id (None at root)
    assignments: dict  # hidden rule id -> representative id
    neighborhood: tuple[int, ...]  # every rule id present at this level
    scope: np.ndarray  # sample row indices this level explains
    attribute_weights: np.ndarray  # per-attribute assignment weights
    selection: Selection

    @property
    def hidden(self) -> tuple[int, ...]:
        reps = set(self.representatives)
        return tuple(i for i in self.neighborhood if i not in reps)

    def __post_init__(self):
        reps = set(self.representatives)
        hidden = set(self.assignments)
        if reps & hidden:
            raise HierarchyError("a rule cannot be representative and hidden at once")
        if reps | hidden != set(self.neighborhood):
            raise HierarchyError("representatives and hidden rules must cover the neighborhood")


def assign_hidden(rep_ids, hidden_ids, features: np.ndarray, id_index: dict,
                  slot_weights: np.ndarray) -> dict:
    """Map each hidden rule to its nearest representative.

    Distance ties break toward the lower representative id (reps are
    scanned in ascending order and argmin keeps the first minimum).
    """
    reps = sorted(rep_ids)
    hidden = sorted(hidden_ids)
    if not reps:
        raise HierarchyError("cannot assign hidden rules without representatives")
    if not hidden:
        return {}
    H = features[[id_index[i] for i in hidden]]
    dists = np.empty((len(hidden), len(reps)))
    for k, rid in enumerate(reps):
        diff = H - features[id_index[rid]]
        dists[:, k] = (diff * diff) @ slot_weights
    nearest = np.argmin(dists, axis=1)
    return {h: reps[nearest[k]] for k, h in enumerate(hidden)}


def _level_weights(rule_ids, ws: Workspace) -> tuple[np.ndarray, np.ndarray]:
    """Attribute usage weights over every rule at the level, plus their
    per-slot broadcast for distance computations."""
    by_id = ws.rule_by_id
    weights = attribute_usage_weights([by_id[i] for i in rule_ids], ws.schema)
    return weights, broadcast_weights(weights, ws.schema)


def build_root(ws: Workspace, budget: int = 80,
               margin: float | None = None, tradeoff: float | None = None) -> HierarchyLevel:
    """Level 0: reduce the full rule set against every sample."""
    base = np.asarray(ws.ensemble.base_scores, dtype=float)
    selection = reduce_rules(ws.rules, ws.samples, ws.schema, base, ws.original_labels,
                             budget=budget, scores=ws.scores,
                             margin=margin, tradeoff=tradeoff)
    neighborhood = tuple(sorted(r.id for r in ws.rules))
    reps = tuple(sorted(selection.rule_ids))
    hidden = [i for i in neighborhood if i not in set(reps)]
    attr_weights, slot_weights = _level_weights(neighborhood, ws)
    id_index = {r.id: k for k, r in enumerate(ws.rules)}
    assignments = assign_hidden(reps, hidden, ws.features, id_index, slot_weights)
    return HierarchyLevel(
        depth=0,
        representatives=reps,
        parents={i: None for i in reps},
        assignments=assignments,
        neighborhood=neighborhood,
        scope=np.arange(ws.samples.n),
        attribute_weights=attr_weights,
        selection=selection,
    )


def zoom_in(level: HierarchyLevel, selected_ids, ws: Workspace, budget: int = 80,
            margin: float | None = None, tradeoff: float | None = None) -> HierarchyLevel:
    """Build the next level from a selection of current representatives.

    The new neighborhood is the selection plus its assigned hidden rules;
    the new scope is every sample (within the current scope) covered by at
    least one neighborhood rule. Selected rules are force-included, so
    they stay visible after the zoom.
    """
    sel = sorted(set(int(i) for i in selected_ids))
    if not sel:
        raise HierarchyError("zoom selection is empty")
    reps = set(level.representatives)
    strangers = [i for i in sel if i not in reps]
    if strangers:
        raise HierarchyError(f"not current representatives: {strangers}")

    sel_set = set(sel)
    neighborhood = tuple(sorted(sel_set | {h for h, r in level.assignments.items()
                                           if r in sel_set}))
    by_id = ws.rule_by_id
    rules = [by_id[i] for i in neighborhood]
    covered = np.zeros(len(level.scope), dtype=bool)
    for rule in rules:
        covered |= covers(rule, ws.samples, level.scope)
    scope = level.scope[covered]
    if len(scope) == 0:
        raise HierarchyError("selected neighborhood covers no samples")
    if not ws.samples.is_train[scope].any():
        raise HierarchyError("selected neighborhood covers no training samples")

    id_index = {r.id: k for k, r in enumerate(ws.rules)}
    scores = ws.scores[[id_index[i] for i in neighborhood]]
    base = np.asarray(ws.ensemble.base_scores, dtype=float)
    selection = reduce_rules(rules, ws.samples, ws.schema, base, ws.original_labels,
                             budget=budget, scores=scores, forced_ids=sel,
                             sample_indices=scope, margin=margin, tradeoff=tradeoff)
    new_reps = tuple(sorted(selection.rule_ids))
    hidden = [i for i in neighborhood if i not in set(new_reps)]
    attr_weights, slot_weights = _level_weights(neighborhood, ws)
    assignments = assign_hidden(new_reps, hidden, ws.features, id_index, slot_weights)
    parents = {i: (i if i in sel_set else level.assignments[i]) for i in new_reps}
    return HierarchyLevel(
        depth=level.depth + 1,
        representatives=new_reps,
        parents=parents,
        assignments=assignments,
        neighborhood=neighborhood,
        scope=scope,
        attribute_weights=attr_weights,
        selection=selection,
    )


def zoom_out(levels) -> HierarchyLevel:
    """Return the retained previous level; levels are never rebuilt."""
    if len(levels) < 2:
        raise HierarchyError("already at the root level")
    return levels[-2]


@dataclass
class Explorer:
    """Navigation state for one exploration: a stack of immutable levels
    plus the selection log that can replay it."""

    workspace: Workspace
    budget: int = 80
    margin: float | None = None
    tradeoff: float | None = None
    levels: list = field(default_factory=list)
    log: list = field(default_factory=list)

    def __post_init__(self):
        if not self.levels:
            self.levels = [build_root(self.workspace, self.budget,
                                      self.margin, self.tradeoff)]

    @property
    def current(self) -> HierarchyLevel:
        return self.levels[-1]

    @property
    def depth(self) -> int:
        return self.current.depth

    def zoom_in(self, selected_ids) -> HierarchyLevel:
        level = zoom_in(self.current, selected_ids, self.workspace, self.budget,
                        self.margin, self.tradeoff)
        self.levels.append(level)
        self.log.append(tuple(sorted(set(int(i) for i in selected_ids))))
        return level

    def zoom_out(self) -> HierarchyLevel:
        previous = zoom_out(self.levels)
        self.levels.pop()
        self.log.append(None)
        return previous
