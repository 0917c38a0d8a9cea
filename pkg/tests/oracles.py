"""Naive reference implementations used only by the tests.

Everything here is written from the textbook definitions with plain Python
loops and ``math``; nothing is imported from ``profilecast``.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class OracleReport:
    case_id: str
    optimized: float
    oracle: float
    tolerance: float

    @property
    def difference(self) -> float:
        return abs(self.optimized - self.oracle)

    @property
    def passed(self) -> bool:
        return self.difference <= self.tolerance


def _rows(points):
    return [[float(v) for v in row] for row in points]


def dist(p, q):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


def mean_vector(rows):
    n = len(rows)
    return [sum(r[j] for r in rows) / n for j in range(len(rows[0]))]


def _clusters(points, labels):
    groups = {}
    for p, lab in zip(_rows(points), list(labels)):
        groups.setdefault(lab, []).append(p)
    return groups


def oracle_silhouette(points, labels):
    pts = _rows(points)
    labels = list(labels)
    n = len(pts)
    total = 0.0
    for i in range(n):
        same = [dist(pts[i], pts[j]) for j in range(n) if j != i and labels[j] == labels[i]]
        if not same:
            continue  # singleton: s(i) = 0
        a = sum(same) / len(same)
        b = math.inf
        for other in set(labels):
            if other == labels[i]:
                continue
            ds = [dist(pts[i], pts[j]) for j in range(n) if labels[j] == other]
            b = min(b, sum(ds) / len(ds))
        m = max(a, b)
        total += 0.0 if m == 0 else (b - a) / m
    return total / n


def oracle_davies_bouldin(points, labels):
    groups = _clusters(points, labels)
    keys = list(groups)
    cents = {c: mean_vector(groups[c]) for c in keys}
    scat = {c: sum(dist(p, cents[c]) for p in groups[c]) / len(groups[c]) for c in keys}
    total = 0.0
    for i in keys:
        total += max((scat[i] + scat[j]) / dist(cents[i], cents[j]) for j in keys if j != i)
    return total / len(keys)


def oracle_calinski_harabasz(points, labels):
    pts = _rows(points)
    groups = _clusters(pts, labels)
    n, k = len(pts), len(groups)
    grand = mean_vector(pts)
    between = 0.0
    within = 0.0
    for members in groups.values():
        c = mean_vector(members)
        between += len(members) * dist(c, grand) ** 2
        within += sum(dist(p, c) ** 2 for p in members)
    return (between / (k - 1)) / (within / (n - k))


def oracle_validity(points, labels):
    return (
        oracle_silhouette(points, labels),
        oracle_davies_bouldin(points, labels),
        oracle_calinski_harabasz(points, labels),
    )


def oracle_covariance(points):
    pts = _rows(points)
    n, d = len(pts), len(pts[0])
    mu = mean_vector(pts)
    out = [[0.0] * d for _ in range(d)]
    for a in range(d):
        for b in range(d):
            out[a][b] = sum((pts[i][a] - mu[a]) * (pts[i][b] - mu[b]) for i in range(n)) / (n - 1)
    return out


def oracle_pearson(x, y):
    """Two-pass Pearson correlation of two sequences."""
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    mx = sum(x) / len(x)
    my = sum(y) / len(y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def oracle_correlation_matrix(points):
    pts = _rows(points)
    d = len(pts[0])
    cols = [[r[j] for r in pts] for j in range(d)]
    return [[oracle_pearson(cols[a], cols[b]) for b in range(d)] for a in range(d)]


def oracle_stats(values):
    """max, min, range, population std, mean, median of a sequence, via sorting."""
    v = sorted(float(x) for x in values)
    n = len(v)
    mean = sum(v) / n
    med = v[n // 2] if n % 2 else (v[n // 2 - 1] + v[n // 2]) / 2
    std = math.sqrt(sum((x - mean) ** 2 for x in v) / n)
    return v[-1], v[0], v[-1] - v[0], std, mean, med


def oracle_assignments(points, centroids):
    """Exhaustive nearest-centroid labels; strict '<' keeps the lowest index on ties."""
    labels = []
    for p in _rows(points):
        best, best_d = 0, math.inf
        for j, c in enumerate(_rows(centroids)):
            d = sum((a - b) ** 2 for a, b in zip(p, c))
            if d < best_d:
                best, best_d = j, d
        labels.append(best)
    return labels


def oracle_inertia(points, centroids, labels):
    cents = _rows(centroids)
    return sum(sum((a - b) ** 2 for a, b in zip(p, cents[lab])) for p, lab in zip(_rows(points), labels))
