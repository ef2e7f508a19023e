"""Anomaly-biased rule subset selection.

Chooses at most ``budget`` rules whose votes approximate the original
model's per-sample predictions while preferring rules with high anomaly
scores. The selection indicator is relaxed to [0, 1], which turns the
hinge-loss objective into a linear program (per-sample slack variables
encode the hinge max), and the fractional optimum is discretized by
deterministic top-``budget`` rounding. A two-stage grid search tunes the
margin and the anomaly trade-off.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .anomaly import LogisticConfig, anomaly_scores, fit_logistic
from .features import build_quantile_maps, vectorize_rules
from .ingest import DatasetSchema, Rule, SampleTable, covers

GRID_VALUES = [round(0.1 * k, 1) for k in range(1, 11)]
FIDELITY_BAND = 0.01  # acceptable training-fidelity loss when raising the trade-off
Z_DECIMALS = 12  # quantization for tie detection in rounding
REFINE_POOL_FACTOR = 8  # swap-in candidates kept per budget slot on large rule sets
REFINE_MAX_PASSES = 16


class SolverError(RuntimeError):
    """LP solve failed; carries the best incumbent when one exists."""

    def __init__(self, message: str, incumbent: np.ndarray | None = None):
        super().__init__(message)
        self.incumbent = incumbent


@dataclass
class CoverageIndex:
    """Bidirectional rule/sample cover relation over a fixed row subset.

    ``covering[i]`` lists rule positions covering local sample ``i``;
    ``covered[j]`` lists local sample positions covered by rule ``j``.
    Positions index the rule list the index was built from.
    """

    rule_ids: np.ndarray
    labels: np.ndarray
    weights: np.ndarray
    covering: list[np.ndarray]
    covered: list[np.ndarray]
    sample_indices: np.ndarray
    base_scores: np.ndarray
    n_classes: int

    @property
    def m(self) -> int:
        return len(self.rule_ids)

    @property
    def n(self) -> int:
        return len(self.sample_indices)


def build_coverage(rules: list[Rule], samples: SampleTable, schema: DatasetSchema,
                   sample_indices: np.ndarray | None = None,
                   base_scores: np.ndarray | None = None) -> CoverageIndex:
    """Evaluate every rule's conditions against the given rows."""
    idx = np.arange(samples.n) if sample_indices is None else np.asarray(sample_indices, dtype=np.intp)
    covering: list[list[int]] = [[] for _ in range(len(idx))]
    covered: list[np.ndarray] = []
    for j, rule in enumerate(rules):
        mask = covers(rule, samples, idx)
        pos = np.flatnonzero(mask)
        covered.append(pos)
        for i in pos:
            covering[i].append(j)
    base = np.zeros(schema.n_classes) if base_scores is None else np.asarray(base_scores, dtype=float)
    return CoverageIndex(
        rule_ids=np.array([r.id for r in rules], dtype=np.int64),
        labels=np.array([r.label for r in rules], dtype=np.int64),
        weights=np.array([r.weight for r in rules], dtype=np.float64),
        covering=[np.array(c, dtype=np.int64) for c in covering],
        covered=covered,
        sample_indices=idx,
        base_scores=base,
        n_classes=schema.n_classes,
    )


def vote_scores(z: np.ndarray, coverage: CoverageIndex, i: int) -> np.ndarray:
    """Per-class vote vector for local sample ``i`` under inclusion ``z``."""
    scores = coverage.base_scores.copy()
    for j in coverage.covering[i]:
        scores[coverage.labels[j]] += z[j] * coverage.weights[j]
    return scores


def vote_matrix(z: np.ndarray, coverage: CoverageIndex) -> np.ndarray:
    """Vote vectors for every local sample at once (n x C)."""
    scores = np.tile(coverage.base_scores, (coverage.n, 1))
    for j in range(coverage.m):
        zw = z[j] * coverage.weights[j]
        if zw != 0.0:
            scores[coverage.covered[j], coverage.labels[j]] += zw
    return scores


def selection_vote_matrix(positions, coverage: CoverageIndex) -> np.ndarray:
    """Vote vectors when exactly the given rule positions are selected."""
    scores = np.tile(coverage.base_scores, (coverage.n, 1))
    for j in positions:
        scores[coverage.covered[j], coverage.labels[j]] += coverage.weights[j]
    return scores


def hinge_loss(vote: np.ndarray, label: int, margin: float) -> float:
    """Multi-class hinge: penalize when the labeled class does not beat
    every other class by at least ``margin``."""
    others = np.delete(vote, label)
    return float(max(margin - (vote[label] - others.max()), 0.0))


@dataclass
class ReductionProblem:
    """One subset-selection instance over a coverage index."""

    coverage: CoverageIndex
    original_labels: np.ndarray  # original-model prediction per local sample
    scores: np.ndarray  # anomaly score per rule position
    budget: int
    margin: float
    tradeoff: float
    forced: frozenset[int] = frozenset()  # rule positions pinned to z = 1

    def __post_init__(self):
        if not 1 <= self.budget:
            raise ValueError("budget must be >= 1")
        if self.margin < 0 or self.tradeoff < 0:
            raise ValueError("margin and trade-off must be non-negative")

    @property
    def m(self) -> int:
        return self.coverage.m

    @property
    def n(self) -> int:
        return self.coverage.n


def objective(z: np.ndarray, problem: ReductionProblem) -> float:
    """Mean hinge loss minus the scaled anomaly bonus of the inclusion."""
    cov = problem.coverage
    votes = vote_matrix(z, cov)
    total = 0.0
    for i in range(cov.n):
        total += hinge_loss(votes[i], int(problem.original_labels[i]), problem.margin)
    bonus = float(np.dot(z, problem.scores)) / problem.budget
    return total / cov.n - problem.tradeoff * bonus


def solve_lp_relaxation(problem: ReductionProblem) -> np.ndarray:
    """Solve the relaxed selection problem; returns fractional inclusion z.

    Variables are z (one per rule, in [0, 1], forced ones fixed at 1) and
    one slack per sample bounding its hinge loss from above. The budget
    constrains the non-forced inclusion mass to what the forced rules
    leave over.
    """
    cov = problem.coverage
    m, n = cov.m, cov.n
    labels = cov.labels
    weights = cov.weights
    ell = problem.original_labels
    base = cov.base_scores

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    rhs: list[float] = []
    row = 0
    for i in range(n):
        li = int(ell[i])
        cover = cov.covering[i]
        for c in range(cov.n_classes):
            if c == li:
                continue
            rows.append(row)
            cols.append(m + i)
            vals.append(-1.0)
            for j in cover:
                if labels[j] == li:
                    rows.append(row)
                    cols.append(int(j))
                    vals.append(-weights[j])
                elif labels[j] == c:
                    rows.append(row)
                    cols.append(int(j))
                    vals.append(weights[j])
            rhs.append(-problem.margin + base[li] - base[c])
            row += 1
    free = [j for j in range(m) if j not in problem.forced]
    remaining = max(problem.budget - len(problem.forced), 0)
    for j in free:
        rows.append(row)
        cols.append(j)
        vals.append(1.0)
    rhs.append(float(remaining))
    row += 1

    a_ub = sparse.coo_matrix((vals, (rows, cols)), shape=(row, m + n)).tocsr()
    c_vec = np.concatenate([
        -(problem.tradeoff / problem.budget) * problem.scores,
        np.full(n, 1.0 / n),
    ])
    bounds = [(1.0, 1.0) if j in problem.forced else (0.0, 1.0) for j in range(m)]
    bounds += [(0.0, None)] * n

    res = linprog(c=c_vec, A_ub=a_ub, b_ub=np.array(rhs), bounds=bounds, method="highs")
    if res.status == 1:
        raise SolverError("iteration limit exceeded",
                          incumbent=None if res.x is None else res.x[:m])
    if res.status != 0:
        raise SolverError(f"LP solve failed: {res.message}")
    return res.x[:m]


def round_selection(z: np.ndarray, budget: int, scores: np.ndarray,
                    rule_ids: np.ndarray, forced: frozenset[int] = frozenset()) -> list[int]:
    """Deterministic rounding: the ``budget`` largest z, dropping zeros.

    Ties break toward the higher anomaly score, then the lower rule id.
    Forced positions are always selected and do not consume the shared
    budget ordering. Returns sorted rule positions.
    """
    zq = np.round(z, Z_DECIMALS)
    candidates = [j for j in range(len(z)) if j not in forced and zq[j] > 0.0]
    candidates.sort(key=lambda j: (-zq[j], -scores[j], rule_ids[j]))
    remaining = max(budget - len(forced), 0)
    chosen = set(forced) | set(candidates[:remaining])
    return sorted(chosen)


def _rule_votes(coverage: CoverageIndex, j: int) -> np.ndarray:
    """Dense (n x C) additive vote contribution of one rule position."""
    v = np.zeros((coverage.n, coverage.n_classes))
    rows = coverage.covered[j]
    if len(rows):
        v[rows, coverage.labels[j]] = coverage.weights[j]
    return v


def _mean_hinge_batch(votes: np.ndarray, labels: np.ndarray, margin: float) -> np.ndarray:
    """Mean hinge loss for a (P x n x C) stack of candidate vote matrices."""
    idx = np.arange(votes.shape[1])
    own = votes[:, idx, labels]
    masked = votes.copy()
    masked[:, idx, labels] = -np.inf
    return np.maximum(margin - (own - masked.max(axis=2)), 0.0).mean(axis=1)


def refine_selection(positions, problem: ReductionProblem,
                     z: np.ndarray | None = None) -> list[int]:
    """Deterministic single-swap descent on the selection objective.

    Magnitude rounding cannot tell apart rules the relaxation left tied or
    at zero, so the rounded subset is walked downhill: each pass applies the
    in/out swap with the largest objective decrease, until none strictly
    improves. Forced positions never leave. On large rule sets the swap-in
    pool is capped by (z, score, id) strength to bound the pass cost; at
    small sizes every rule competes. Returns sorted rule positions.
    """
    cov = problem.coverage
    m = cov.m
    chosen = sorted(int(j) for j in positions)
    movable = [j for j in chosen if j not in problem.forced]
    if cov.n == 0 or not movable or m <= len(chosen):
        return chosen
    scores = problem.scores
    ell = problem.original_labels
    penalty_rate = problem.tradeoff / problem.budget
    zq = None if z is None else np.round(np.asarray(z, dtype=float), Z_DECIMALS)
    cap = REFINE_POOL_FACTOR * max(problem.budget, 1)

    votes = selection_vote_matrix(chosen, cov)
    current = float(_mean_hinge_batch(votes[None], ell, problem.margin)[0]) \
        - penalty_rate * float(scores[chosen].sum())

    for _ in range(REFINE_MAX_PASSES):
        inside = set(chosen)
        pool = [j for j in range(m) if j not in inside]
        if len(pool) > cap:
            if zq is None:
                pool.sort(key=lambda j: (-scores[j], cov.rule_ids[j]))
            else:
                pool.sort(key=lambda j: (-zq[j], -scores[j], cov.rule_ids[j]))
            pool = pool[:cap]
        pool_votes = np.stack([_rule_votes(cov, j) for j in pool])
        pool_scores = scores[pool]

        best_gain, best_swap = 1e-12, None
        for a in [j for j in chosen if j not in problem.forced]:
            base = votes - _rule_votes(cov, a)
            hinges = _mean_hinge_batch(base[None] + pool_votes, ell, problem.margin)
            objs = hinges - penalty_rate * (float(scores[chosen].sum())
                                            - scores[a] + pool_scores)
            k = int(np.argmin(objs))
            gain = current - float(objs[k])
            if gain > best_gain:
                best_gain, best_swap = gain, (a, pool[k])
        if best_swap is None:
            break
        a, b = best_swap
        votes = votes - _rule_votes(cov, a) + _rule_votes(cov, b)
        chosen = sorted(set(chosen) - {a} | {b})
        current -= best_gain
    return chosen


def selection_fidelity(positions, coverage: CoverageIndex, original_labels: np.ndarray) -> float:
    """Share of samples where the selected rules' vote matches the original
    prediction; argmax ties break toward the lower class index."""
    if coverage.n == 0:
        return 1.0
    votes = selection_vote_matrix(positions, coverage)
    predicted = np.argmax(votes, axis=1)
    return float(np.mean(predicted == original_labels))


def grid_search(problem: ReductionProblem) -> tuple[float, float, np.ndarray, list[int]]:
    """Two-stage hyperparameter sweep over {0.1, ..., 1.0}.

    Stage 1 fixes the trade-off at 0 and picks the margin with the best
    training fidelity (ties to the smaller margin). Stage 2 keeps that
    margin and picks the largest trade-off whose fidelity stays within
    ``FIDELITY_BAND`` of the stage-1 result, or 0 if none qualifies.
    """
    best_margin, best_fid, best_z, best_sel = None, -1.0, None, None
    for margin in GRID_VALUES:
        p = dataclasses.replace(problem, margin=margin, tradeoff=0.0)
        z = solve_lp_relaxation(p)
        sel = round_selection(z, p.budget, p.scores, p.coverage.rule_ids, p.forced)
        sel = refine_selection(sel, p, z)
        fid = selection_fidelity(sel, p.coverage, p.original_labels)
        if fid > best_fid:
            best_margin, best_fid, best_z, best_sel = margin, fid, z, sel

    chosen_tradeoff, chosen_z, chosen_sel = 0.0, best_z, best_sel
    for tradeoff in GRID_VALUES:
        p = dataclasses.replace(problem, margin=best_margin, tradeoff=tradeoff)
        z = solve_lp_relaxation(p)
        sel = round_selection(z, p.budget, p.scores, p.coverage.rule_ids, p.forced)
        sel = refine_selection(sel, p, z)
        fid = selection_fidelity(sel, p.coverage, p.original_labels)
        if fid >= best_fid - FIDELITY_BAND:
            chosen_tradeoff, chosen_z, chosen_sel = tradeoff, z, sel
    return best_margin, chosen_tradeoff, chosen_z, chosen_sel


@dataclass(frozen=True)
class Selection:
    """Chosen rule subset plus the diagnostics the report and UI need."""

    rule_ids: tuple[int, ...]
    z: np.ndarray
    objective_value: float
    margin: float
    tradeoff: float
    fidelity_train: float
    fidelity_test: float | None
    average_anomaly: float


def compute_rule_scores(rules: list[Rule], samples: SampleTable, schema: DatasetSchema,
                        maps=None, config: LogisticConfig = LogisticConfig()) -> np.ndarray:
    """Fit the anomaly model on the given rules and score them."""
    if maps is None:
        maps = build_quantile_maps(samples, schema)
    X = vectorize_rules(rules, schema, maps)
    labels = np.array([r.label for r in rules], dtype=np.int64)
    model = fit_logistic(X, labels, schema.n_classes, config)
    return anomaly_scores(model, X, labels)


def reduce_rules(rules: list[Rule], samples: SampleTable, schema: DatasetSchema,
                 base_scores: np.ndarray, original_labels: np.ndarray,
                 budget: int = 80, scores: np.ndarray | None = None,
                 forced_ids=(), sample_indices: np.ndarray | None = None,
                 margin: float | None = None, tradeoff: float | None = None) -> Selection:
    """Full reduction: score, sweep hyperparameters (unless fixed), round,
    then locally refine the rounded subset.

    ``original_labels`` holds the original model's prediction for every
    table row. Optimization runs over the train rows of ``sample_indices``
    (default: all rows); test fidelity is reported on the test rows.
    When the rule set already fits the budget, everything is selected.
    """
    if (margin is None) != (tradeoff is None):
        raise ValueError("fix margin and trade-off together, or neither")
    rules = sorted(rules, key=lambda r: r.id)
    scope = np.arange(samples.n) if sample_indices is None else np.asarray(sample_indices, dtype=np.intp)
    train_rows = scope[samples.is_train[scope]]
    test_rows = scope[~samples.is_train[scope]]
    if len(train_rows) == 0:
        raise ValueError("scope contains no training rows to optimize over")
    if scores is None:
        scores = compute_rule_scores(rules, samples, schema)
    scores = np.asarray(scores, dtype=np.float64)

    cov_train = build_coverage(rules, samples, schema, train_rows, base_scores)
    ell_train = original_labels[train_rows]
    id_to_pos = {r.id: j for j, r in enumerate(rules)}
    forced = frozenset(id_to_pos[i] for i in forced_ids)

    if len(rules) <= budget:
        positions = list(range(len(rules)))
        z = np.ones(len(rules))
        chosen_margin = margin if margin is not None else 0.0
        chosen_tradeoff = tradeoff if tradeoff is not None else 0.0
    elif margin is not None:
        problem = ReductionProblem(cov_train, ell_train, scores, budget,
                                   margin, tradeoff, forced)
        z = solve_lp_relaxation(problem)
        positions = round_selection(z, budget, scores, cov_train.rule_ids, forced)
        positions = refine_selection(positions, problem, z)
        chosen_margin, chosen_tradeoff = margin, tradeoff
    else:
        problem = ReductionProblem(cov_train, ell_train, scores, budget,
                                   0.0, 0.0, forced)
        chosen_margin, chosen_tradeoff, z, positions = grid_search(problem)

    eval_problem = ReductionProblem(cov_train, ell_train, scores, budget,
                                    chosen_margin, chosen_tradeoff, forced)
    z01 = np.zeros(len(rules))
    z01[positions] = 1.0
    fid_train = selection_fidelity(positions, cov_train, ell_train)
    fid_test = None
    if len(test_rows):
        cov_test = build_coverage([rules[j] for j in positions], samples, schema,
                                  test_rows, base_scores)
        fid_test = selection_fidelity(range(len(positions)), cov_test,
                                      original_labels[test_rows])
    return Selection(
        rule_ids=tuple(int(cov_train.rule_ids[j]) for j in positions),
        z=z,
        objective_value=objective(z01, eval_problem),
        margin=chosen_margin,
        tradeoff=chosen_tradeoff,
        fidelity_train=fid_train,
        fidelity_test=fid_test,
        average_anomaly=average_anomaly_score(positions, scores),
    )


def fidelity(selected_ids, rules: list[Rule], samples: SampleTable, schema: DatasetSchema,
             base_scores: np.ndarray, original_labels: np.ndarray, split: str = "train") -> float:
    """Fraction of split rows where the selection's vote argmax matches the
    original model's prediction."""
    rows = samples.split_indices(split)
    if len(rows) == 0:
        return 1.0
    by_id = {r.id: r for r in rules}
    chosen = [by_id[i] for i in selected_ids]
    cov = build_coverage(chosen, samples, schema, rows, base_scores)
    return selection_fidelity(range(len(chosen)), cov, original_labels[rows])


def average_anomaly_score(positions, scores: np.ndarray) -> float:
    positions = list(positions)
    if not positions:
        raise ValueError("empty selection has no mean anomaly score")
    return float(np.mean(scores[positions]))


def rule_coverage(rule: Rule, samples: SampleTable) -> int:
    """Number of train rows the rule covers."""
    return int(covers(rule, samples, samples.train_indices).sum())


def rule_confidence(rule: Rule, samples: SampleTable) -> float:
    """Share of covered train rows whose ground-truth label matches the
    rule's label; 0 for zero-coverage rules."""
    rows = samples.train_indices
    mask = covers(rule, samples, rows)
    covered = rows[mask]
    if len(covered) == 0:
        return 0.0
    return float(np.mean(samples.labels[covered] == rule.label))


def random_selection(rule_ids, budget: int, rng: np.random.Generator) -> list[int]:
    """Uniform random size-``budget`` baseline used by the evaluate command."""
    ids = np.asarray(sorted(rule_ids))
    if len(ids) <= budget:
        return [int(i) for i in ids]
    return sorted(int(i) for i in rng.choice(ids, size=budget, replace=False))
