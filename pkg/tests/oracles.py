"""Independent reference implementations used to check the package.

Everything here is written as plain loops over plain Python structures,
on purpose: no imports from the package under test, no vectorization,
no shared helpers. Rules are dicts

    {"conditions": {attr: ("num", lo, hi) | ("cat", set_of_indices)},
     "label": int, "weight": float, "id": int}

and samples are dicts mapping attribute name to a float (numeric) or an
int category index, so any disagreement points at the package, not at a
shared bug.
"""

import itertools
import math


def covers(rule, sample):
    for attr, cond in rule["conditions"].items():
        v = sample[attr]
        if cond[0] == "num":
            lo, hi = cond[1], cond[2]
            if not (v > lo and v <= hi):
                return False
        else:
            if int(v) not in cond[1]:
                return False
    return True


def vote(rules, z, sample, n_classes, base=None):
    scores = [0.0] * n_classes if base is None else list(base)
    for j, rule in enumerate(rules):
        if covers(rule, sample):
            scores[rule["label"]] += z[j] * rule["weight"]
    return scores


def hinge(scores, label, margin):
    best_other = max(s for c, s in enumerate(scores) if c != label)
    gap = scores[label] - best_other
    loss = margin - gap
    if loss < 0:
        loss = 0.0
    return loss


def objective(rules, samples, labels, z, scores_anomaly, budget, margin, tradeoff,
              n_classes, base=None):
    total = 0.0
    for i, sample in enumerate(samples):
        total += hinge(vote(rules, z, sample, n_classes, base), labels[i], margin)
    bonus = 0.0
    for j in range(len(rules)):
        bonus += z[j] * scores_anomaly[j]
    return total / len(samples) - tradeoff * bonus / budget


def argmax_lowest(scores):
    best, best_c = None, None
    for c, s in enumerate(scores):
        if best is None or s > best:
            best, best_c = s, c
    return best_c


def fidelity(rules, selected_positions, samples, labels, n_classes, base=None):
    if not samples:
        return 1.0
    z = [1.0 if j in set(selected_positions) else 0.0 for j in range(len(rules))]
    agree = 0
    for i, sample in enumerate(samples):
        if argmax_lowest(vote(rules, z, sample, n_classes, base)) == labels[i]:
            agree += 1
    return agree / len(samples)


def best_integral_selection(rules, samples, labels, scores_anomaly, budget, margin,
                            tradeoff, n_classes, base=None):
    """Exhaustive search over every subset of size <= budget."""
    m = len(rules)
    best_val, best_subset = None, None
    for size in range(0, budget + 1):
        for subset in itertools.combinations(range(m), size):
            z = [1.0 if j in subset else 0.0 for j in range(m)]
            val = objective(rules, samples, labels, z, scores_anomaly, budget,
                            margin, tradeoff, n_classes, base)
            if best_val is None or val < best_val:
                best_val, best_subset = val, subset
    return best_val, best_subset


def quantile_position(train_values, x):
    """Mean-rank empirical CDF with endpoints pinned to 0 and 1, linear
    interpolation between distinct training values."""
    if x == float("-inf"):
        return 0.0
    if x == float("inf"):
        return 1.0
    values = sorted(train_values)
    n = len(values)
    distinct = []
    for v in values:
        if not distinct or v != distinct[-1]:
            distinct.append(v)
    if len(distinct) == 1:
        return 0.5
    positions = []
    for v in distinct:
        ranks = [i for i, u in enumerate(values) if u == v]
        positions.append(sum(ranks) / len(ranks) / (n - 1))
    positions[0] = 0.0
    positions[-1] = 1.0
    if x <= distinct[0]:
        return 0.0
    if x >= distinct[-1]:
        return 1.0
    for k in range(len(distinct) - 1):
        if distinct[k] <= x <= distinct[k + 1]:
            frac = (x - distinct[k]) / (distinct[k + 1] - distinct[k])
            return positions[k] + frac * (positions[k + 1] - positions[k])
    raise AssertionError("unreachable")


def condition_similar(rule_a, rule_b, attr, tau, train_values_by_attr):
    ca = rule_a["conditions"].get(attr)
    cb = rule_b["conditions"].get(attr)
    if ca is None or cb is None:
        return False
    if ca[0] == "cat" or cb[0] == "cat":
        return ca[1] == cb[1]
    train = train_values_by_attr[attr]
    lo_a = quantile_position(train, ca[1])
    hi_a = quantile_position(train, ca[2])
    lo_b = quantile_position(train, cb[1])
    hi_b = quantile_position(train, cb[2])
    return abs(lo_a - lo_b) <= tau and abs(hi_a - hi_b) <= tau


def similarity_score(order, rules, attr, tau, train_values_by_attr):
    total = 0
    for t in range(len(order) - 1):
        a, b = rules[order[t]], rules[order[t + 1]]
        if a["label"] == b["label"] and \
                condition_similar(a, b, attr, tau, train_values_by_attr):
            total += 1
    return total


def max_similarity_over_permutations(rules, attr, tau, train_values_by_attr):
    best = 0
    for perm in itertools.permutations(range(len(rules))):
        s = similarity_score(list(perm), rules, attr, tau, train_values_by_attr)
        if s > best:
            best = s
    return best


def max_constrained_stage2(order, groups, rules, attr1, attr2, tau,
                           train_values_by_attr):
    """Max S_2 over arrangements permuting rows only within the given
    groups while keeping S_1 exactly unchanged."""
    s1_before = similarity_score(order, rules, attr1, tau, train_values_by_attr)
    segments = [tuple(order[s:e]) for s, e in groups]
    best = None
    for combo in itertools.product(*(itertools.permutations(seg) for seg in segments)):
        cand = [p for seg in combo for p in seg]
        if similarity_score(cand, rules, attr1, tau, train_values_by_attr) != s1_before:
            continue
        s2 = similarity_score(cand, rules, attr2, tau, train_values_by_attr)
        if best is None or s2 > best:
            best = s2
    return best


def nearest_representative(hidden_vec, rep_vectors, rep_ids, weights):
    best_d, best_id = None, None
    for vec, rid in sorted(zip(rep_vectors, rep_ids), key=lambda t: t[1]):
        d = 0.0
        for w, a, b in zip(weights, hidden_vec, vec):
            d += w * (a - b) ** 2
        d = math.sqrt(d)
        if best_d is None or d < best_d - 1e-12:
            best_d, best_id = d, rid
    return best_id


def walk_tree(nodes, sample_values):
    """nodes: list of dicts with either {"leaf": [...]} or
    {"attr": col, "threshold": t} / {"attr": col, "categories": set},
    plus "left"/"right". Returns the leaf dict."""
    i = 0
    while True:
        node = nodes[i]
        if "leaf" in node:
            return node
        v = sample_values[node["attr"]]
        if "threshold" in node and node["threshold"] is not None:
            go_left = v <= node["threshold"]
        else:
            go_left = int(v) in node["categories"]
        i = node["left"] if go_left else node["right"]


def predict_rf(trees, sample_values, n_classes):
    votes = [0] * n_classes
    for nodes in trees:
        leaf = walk_tree(nodes, sample_values)["leaf"]
        votes[argmax_lowest(leaf)] += 1
    return argmax_lowest(votes)


def predict_gbt(trees, targets, sample_values, n_classes, base):
    scores = list(base)
    for nodes, target in zip(trees, targets):
        leaf = walk_tree(nodes, sample_values)["leaf"]
        scores[target] += leaf[0]
    return argmax_lowest(scores)


def softmax_loss_and_grad(weights, bias, X, labels, l2):
    """Straight-line multinomial logistic loss with L2 on weights only."""
    m = len(X)
    n_classes = len(weights)
    dim = len(weights[0])
    loss = 0.0
    grad_w = [[0.0] * dim for _ in range(n_classes)]
    grad_b = [0.0] * n_classes
    for i in range(m):
        scores = []
        for c in range(n_classes):
            s = bias[c]
            for d in range(dim):
                s += weights[c][d] * X[i][d]
            scores.append(s)
        mx = max(scores)
        exps = [math.exp(s - mx) for s in scores]
        total = sum(exps)
        probs = [e / total for e in exps]
        loss -= math.log(probs[labels[i]])
        for c in range(n_classes):
            delta = probs[c] - (1.0 if c == labels[i] else 0.0)
            grad_b[c] += delta / m
            for d in range(dim):
                grad_w[c][d] += delta * X[i][d] / m
    loss /= m
    for c in range(n_classes):
        for d in range(dim):
            loss += 0.5 * l2 * weights[c][d] ** 2
            grad_w[c][d] += l2 * weights[c][d]
    return loss, grad_w, grad_b
