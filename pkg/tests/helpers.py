"""Shared test utilities: two-sample law tests, independent brute-force oracles."""

from __future__ import annotations

import math
from collections import Counter, deque

import numpy as np
from scipy import stats


def assert_within(value, target, sigma, k=3.0, label=""):
    band = k * sigma
    assert abs(value - target) <= band, \
        f"{label}: {value} not within {k} sigma ({band}) of {target}"


def two_sample_pvalue(a, b, min_expected=5.0) -> float:
    """Chi-square homogeneity p-value for two samples of hashable categories.

    Adjacent categories (sorted order) are pooled until each pooled cell has
    expected count at least ``min_expected`` in both samples.
    """
    ca, cb = Counter(a), Counter(b)
    cats = sorted(set(ca) | set(cb))
    na, nb = sum(ca.values()), sum(cb.values())
    share_a = na / (na + nb)
    share_b = nb / (na + nb)
    pooled = []
    acc_a = acc_b = 0
    for c in cats:
        acc_a += ca.get(c, 0)
        acc_b += cb.get(c, 0)
        tot = acc_a + acc_b
        if tot * share_a >= min_expected and tot * share_b >= min_expected:
            pooled.append((acc_a, acc_b))
            acc_a = acc_b = 0
    if acc_a or acc_b:
        if pooled:
            last = pooled.pop()
            pooled.append((last[0] + acc_a, last[1] + acc_b))
        else:
            pooled.append((acc_a, acc_b))
    if len(pooled) < 2:
        return 1.0
    chi2 = 0.0
    for ra, rb in pooled:
        tot = ra + rb
        ea, eb = tot * share_a, tot * share_b
        chi2 += (ra - ea) ** 2 / ea + (rb - eb) ** 2 / eb
    return float(stats.chi2.sf(chi2, len(pooled) - 1))


def quantile_categories(values_a, values_b, bins=20):
    """Map two numeric samples onto shared quantile-bin labels for the chi-square test."""
    pooled = np.concatenate([values_a, values_b])
    edges = np.unique(np.quantile(pooled, np.linspace(0, 1, bins + 1)[1:-1]))
    return np.searchsorted(edges, values_a).tolist(), np.searchsorted(edges, values_b).tolist()


# ---------------------------------------------------------------------------
# Independent oracles (deliberately naive implementations)
# ---------------------------------------------------------------------------

def per_individual_bgw(law: str, m: float, depth: int, rng: np.random.Generator,
                       n: int | None = None) -> list[int]:
    """Individual-by-individual branching simulation: every member draws its own
    offspring count.  Brute-force oracle for the additivity-based simulator."""
    counts = [1]
    population = 1
    for _ in range(depth):
        children = 0
        for _ in range(population):
            if law == "poisson":
                children += int(rng.poisson(m))
            else:
                children += int(rng.binomial(n - 1, m / n))
        counts.append(children)
        population = children
    return counts


def per_individual_tri_bgw(m: float, theta: float, depth: int,
                           rng: np.random.Generator) -> list[tuple[int, int, int]]:
    """Individual-level 3-type simulation with independent typed offspring."""
    m0 = 0.5 * m * (1 + theta)
    m1 = 0.5 * m * (1 - theta)
    mth = m * theta
    z = (0, 0, 1)
    out = [z]
    for _ in range(depth):
        n1 = n2 = n3 = 0
        for _ in range(z[0]):
            n1 += int(rng.poisson(m0))
        for _ in range(z[1]):
            n2 += int(rng.poisson(m0))
        for _ in range(z[2]):
            n1 += int(rng.poisson(m1))
            n2 += int(rng.poisson(m1))
            n3 += int(rng.poisson(mth))
        z = (n1, n2, n3)
        out.append(z)
    return out


def triangle_count(graph) -> int:
    """Dense-matrix triangle count; fine for the small graphs used in tests."""
    n = graph.n
    a = np.zeros((n, n), dtype=np.float64)
    for v in range(n):
        a[v, graph.neighbours(v)] = 1.0
    return int(round(np.trace(a @ a @ a) / 6.0))


def arcs_of(dg) -> list[tuple[int, int]]:
    tails = np.repeat(np.arange(dg.n), np.diff(dg.out_indptr))
    return list(zip(tails.tolist(), dg.out_indices.tolist()))


def naive_all_pairs_directed(arcs: list[tuple[int, int]], n: int) -> dict:
    """Plain dict/deque BFS over arc lists: independent of the package's CSR BFS."""
    adj: dict[int, list[int]] = {}
    for a, b in arcs:
        adj.setdefault(a, []).append(b)
    dists = {}
    for src in range(n):
        seen = {src: 0}
        queue = deque([src])
        while queue:
            x = queue.popleft()
            for y in adj.get(x, ()):
                if y not in seen:
                    seen[y] = seen[x] + 1
                    queue.append(y)
        dists[src] = seen
    return dists


def sample_se(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1) / math.sqrt(len(x)))


def corr_with_se(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Pearson correlation and its influence-function standard error."""
    xs = (x - x.mean()) / x.std()
    ys = (y - y.mean()) / y.std()
    rho = float(np.mean(xs * ys))
    psi = xs * ys - 0.5 * rho * (xs * xs + ys * ys)
    return rho, float(np.std(psi, ddof=1) / math.sqrt(len(x)))


def freq_sigma(q: float, count: int) -> float:
    return math.sqrt(q * (1.0 - q) / count)
