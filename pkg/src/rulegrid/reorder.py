"""Row and column ordering for the rule matrix.

Rows: maximize runs of adjacent rules that share a label and have
similar conditions, one attribute at a time; each later attribute is
optimized strictly inside the groups the earlier ones formed, and must
leave the earlier run counts exactly as they were (numeric similarity
is not transitive, so this has to be checked, not assumed). Columns:
attribute importance ordering with pinning and paging, plus metric
sorts, per-attribute grouping, and rank-increase arrows.
"""

from __future__ import annotations

import itertools

import numpy as np

from .features import QuantileMaps
from .ingest import CategorySet, DatasetSchema, Interval, Rule

TAU_DEFAULT = 0.1
PAGE_SIZE = 15  # attribute columns per page
EXACT_LIMIT = 8  # enumerate permutations up to this many rows


def condition_similar(a: Rule, b: Rule, attr: str, tau: float, maps: QuantileMaps) -> bool:
    """True when both rules condition on ``attr`` with near-identical
    conditions: equal category subsets, or numeric endpoints within
    ``tau`` of each other in quantile space."""
    ca, cb = a.conditions.get(attr), b.conditions.get(attr)
    if ca is None or cb is None:
        return False
    if isinstance(ca, CategorySet) or isinstance(cb, CategorySet):
        return ca.members == cb.members
    lo_a, hi_a = maps.evaluate(attr, ca.lower), maps.evaluate(attr, ca.upper)
    lo_b, hi_b = maps.evaluate(attr, cb.lower), maps.evaluate(attr, cb.upper)
    return abs(lo_a - lo_b) <= tau and abs(hi_a - hi_b) <= tau


def score_sj(order, rules: list[Rule], attr: str, tau: float, maps: QuantileMaps) -> int:
    """Count of adjacent pairs with equal labels and similar conditions."""
    total = 0
    for t in range(len(order) - 1):
        a, b = rules[order[t]], rules[order[t + 1]]
        if a.label == b.label and condition_similar(a, b, attr, tau, maps):
            total += 1
    return total


def _pair_matrix(rules: list[Rule], attr: str, tau: float, maps: QuantileMaps) -> np.ndarray:
    """Symmetric indicator: same label and similar condition on attr."""
    n = len(rules)
    mat = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for k in range(i + 1, n):
            if rules[i].label == rules[k].label and \
                    condition_similar(rules[i], rules[k], attr, tau, maps):
                mat[i, k] = mat[k, i] = True
    return mat


def _chain_score(order, mat: np.ndarray) -> int:
    return int(sum(mat[order[t], order[t + 1]] for t in range(len(order) - 1)))


def _label_blocks(rules: list[Rule]) -> list[list[int]]:
    """Partition row positions by label, blocks ordered by first occurrence."""
    blocks: dict[int, list[int]] = {}
    for pos, rule in enumerate(rules):
        blocks.setdefault(rule.label, []).append(pos)
    return list(blocks.values())


def _edge_sums(order, mats) -> list[int]:
    return [_chain_score(order, m) for m in mats]


def _joint_exact(order, groups, mat, earlier_mats):
    """Enumerate every within-group arrangement jointly; keep the best
    stage score among those leaving all earlier scores untouched.

    Identity comes first in each group's permutation stream and only a
    strictly better score replaces the incumbent, so ties keep the
    input order.
    """
    baseline = _edge_sums(order, earlier_mats)
    segments = [tuple(order[s:e]) for s, e in groups]
    best_order, best_score = list(order), _chain_score(order, mat)
    for combo in itertools.product(*(itertools.permutations(seg) for seg in segments)):
        cand = [p for seg in combo for p in seg]
        if _edge_sums(cand, earlier_mats) != baseline:
            continue
        score = _chain_score(cand, mat)
        if score > best_score:
            best_order, best_score = cand, score
    return best_order


def _group_edges(order, s, e):
    """Edge index pairs whose score can change when order[s:e] permutes:
    the internal edges plus the cross edges to fixed neighbors."""
    lo = s - 1 if s > 0 else s
    hi = e if e < len(order) else e - 1
    return lo, hi  # edges run between positions t and t+1 for t in [lo, hi)


def _local_sums(order, lo, hi, mats) -> list[int]:
    return [int(sum(m[order[t], order[t + 1]] for t in range(lo, hi))) for m in mats]


def _group_exact(order, s, e, mat, earlier_mats):
    """Best permutation of order[s:e] with the neighbors held fixed."""
    lo, hi = _group_edges(order, s, e)
    baseline = _local_sums(order, lo, hi, earlier_mats)
    best = list(order)
    best_score = _local_sums(order, lo, hi, [mat])[0]
    for perm in itertools.permutations(order[s:e]):
        cand = list(order)
        cand[s:e] = perm
        if _local_sums(cand, lo, hi, earlier_mats) != baseline:
            continue
        score = _local_sums(cand, lo, hi, [mat])[0]
        if score > best_score:
            best, best_score = cand, score
    return best


def _greedy_chain(rows, rules, mat):
    """Nearest-neighbor chain from the lowest rule id; prefer a similar
    successor, then the lower rule id."""
    remaining = sorted(rows, key=lambda p: rules[p].id)
    chain = [remaining.pop(0)]
    while remaining:
        last = chain[-1]
        pick = min(remaining, key=lambda p: (not mat[last, p], rules[p].id))
        remaining.remove(pick)
        chain.append(pick)
    return chain


def _edge(mat, a, b) -> int:
    if a is None or b is None:
        return 0
    return int(mat[a, b])


def _two_opt(order, s, e, rules, mat, earlier_mats):
    """First-improvement segment reversals inside order[s:e].

    A reversal only changes the two edges at the segment ends (the
    indicator is symmetric), so the stage delta and the earlier-score
    deltas are O(1) per candidate; moves must improve the stage score
    and leave every earlier score exactly unchanged.
    """
    order = list(order)
    chain = order[s:e]
    left = order[s - 1] if s > 0 else None
    right = order[e] if e < len(order) else None
    improved = True
    while improved:
        improved = False
        g = len(chain)
        for i in range(g - 1):
            for k in range(i + 1, g):
                if i == 0 and k == g - 1 and left is None and right is None:
                    continue  # full reversal with no anchors changes nothing
                prev_row = chain[i - 1] if i > 0 else left
                next_row = chain[k + 1] if k + 1 < g else right
                removed = [(prev_row, chain[i]), (chain[k], next_row)]
                added = [(prev_row, chain[k]), (chain[i], next_row)]
                delta = sum(_edge(mat, a, b) for a, b in added) \
                    - sum(_edge(mat, a, b) for a, b in removed)
                if delta <= 0:
                    continue
                if any(sum(_edge(m, a, b) for a, b in added)
                       != sum(_edge(m, a, b) for a, b in removed)
                       for m in earlier_mats):
                    continue
                chain[i:k + 1] = reversed(chain[i:k + 1])
                improved = True
                break
            if improved:
                break
    order[s:e] = chain
    return order


def _optimize_stage(order, groups, rules, mat, earlier_mats):
    if len(order) <= EXACT_LIMIT:
        return _joint_exact(order, groups, mat, earlier_mats)
    for s, e in groups:
        if e - s < 2:
            continue
        if e - s <= EXACT_LIMIT:
            order = _group_exact(order, s, e, mat, earlier_mats)
        else:
            chain = _greedy_chain(order[s:e], rules, mat)
            cand = list(order)
            cand[s:e] = chain
            lo, hi = _group_edges(order, s, e)
            if _local_sums(cand, lo, hi, earlier_mats) == _local_sums(order, lo, hi, earlier_mats):
                base = _local_sums(order, lo, hi, [mat])[0]
                if _local_sums(cand, lo, hi, [mat])[0] > base:
                    order = cand
            order = _two_opt(order, s, e, rules, mat, earlier_mats)
    return order


def _refine(order, groups, mat) -> list[tuple[int, int]]:
    """Split each group at adjacent pairs that are not similar."""
    refined = []
    for s, e in groups:
        start = s
        for t in range(s, e - 1):
            if not mat[order[t], order[t + 1]]:
                refined.append((start, t + 1))
                start = t + 1
        refined.append((start, e))
    return refined


def reorder_rules(rules: list[Rule], attr_order: list[str], tau: float,
                  maps: QuantileMaps) -> tuple[list[int], list[list[tuple[int, int]]]]:
    """Order rows to maximize similarity runs, one attribute at a time.

    Returns the row permutation (original positions in display order)
    and, per optimized attribute, the nested group boundaries as
    half-open (start, end) position intervals.
    """
    if not attr_order:
        raise ValueError("need at least one attribute to reorder on")
    if not rules:
        return [], [[] for _ in attr_order]
    order: list[int] = []
    groups: list[tuple[int, int]] = []
    for block in _label_blocks(rules):
        groups.append((len(order), len(order) + len(block)))
        order.extend(block)

    boundaries: list[list[tuple[int, int]]] = []
    earlier_mats: list[np.ndarray] = []
    for attr in attr_order:
        mat = _pair_matrix(rules, attr, tau, maps)
        order = _optimize_stage(order, groups, rules, mat, earlier_mats)
        groups = _refine(order, groups, mat)
        boundaries.append(groups)
        earlier_mats.append(mat)
    return order, boundaries


def sort_attributes(rules: list[Rule], schema: DatasetSchema,
                    pinned: list[str] = ()) -> tuple[list[str], list[list[str]]]:
    """Column order: pinned attributes first (user order), then by usage
    count among the displayed rules, descending, ties by schema order.
    Also returns the fixed-size pages."""
    for name in pinned:
        schema.attribute_index(name)  # raises SchemaError on unknowns
    seen = set(pinned)
    if len(seen) != len(pinned):
        raise ValueError("pinned attributes repeat")
    usage = {spec.name: 0 for spec in schema.attributes}
    for rule in rules:
        for attr in rule.conditions:
            usage[attr] += 1
    rest = [spec.name for spec in schema.attributes if spec.name not in seen]
    rest.sort(key=lambda a: (-usage[a], schema.attribute_index(a)))
    order = list(pinned) + rest
    pages = [order[i:i + PAGE_SIZE] for i in range(0, len(order), PAGE_SIZE)]
    return order, pages


def group_by_attribute(rules: list[Rule], attr: str, schema: DatasetSchema,
                       maps: QuantileMaps) -> list[list[int]]:
    """Group row positions by their condition on one attribute.

    Numeric: one block of users ordered by (lower, upper). Categorical:
    a block per distinct category subset, ordered by the subset's sorted
    indices. Rows not using the attribute keep their order in a final
    block.
    """
    spec = schema.attribute(attr)
    users = [p for p, r in enumerate(rules) if r.uses(attr)]
    unused = [p for p, r in enumerate(rules) if not r.uses(attr)]
    groups: list[list[int]] = []
    if spec.kind == "numeric":
        if users:
            groups.append(sorted(users, key=lambda p: (
                rules[p].conditions[attr].lower, rules[p].conditions[attr].upper, p)))
    else:
        by_subset: dict[tuple[int, ...], list[int]] = {}
        for p in users:
            key = tuple(sorted(rules[p].conditions[attr].members))
            by_subset.setdefault(key, []).append(p)
        for key in sorted(by_subset):
            groups.append(by_subset[key])
    if unused:
        groups.append(unused)
    return groups


def sort_rules_by_metric(values, direction: str = "desc") -> list[int]:
    """Stable permutation of positions by a metric column."""
    if direction not in ("asc", "desc"):
        raise ValueError(f"unknown sort direction: {direction}")
    keys = np.asarray(values, dtype=float)
    if direction == "desc":
        keys = -keys
    return [int(p) for p in np.argsort(keys, kind="stable")]


def rank_increase_arrows(prev_order: list[str], curr_order: list[str],
                         schema: DatasetSchema) -> list[str]:
    """Attributes with the three largest rank increases (ties by schema
    order); attributes that did not move up are never reported."""
    prev_pos = {a: i for i, a in enumerate(prev_order)}
    curr_pos = {a: i for i, a in enumerate(curr_order)}
    movers = []
    for attr in curr_order:
        if attr not in prev_pos:
            continue
        delta = prev_pos[attr] - curr_pos[attr]
        if delta > 0:
            movers.append((attr, delta))
    movers.sort(key=lambda t: (-t[1], schema.attribute_index(t[0])))
    return [attr for attr, _ in movers[:3]]
