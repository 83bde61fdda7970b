"""BFS ring structure of vertices: undirected, directed, restricted, and the
pruned single-edge ("hat") decomposition used by the 3-type branching coupling,
plus the Reed-Frost chain-binomial ring-size process.

Distance conventions
--------------------
For a digraph and a start vertex v, three metrics matter:

* out-distance ``d_out(w)``: shortest path v -> w along out- or bidirectional
  edges;
* in-distance ``d_in(w)``: shortest path w -> v along in- or bidirectional
  edges (followed here from v over the in-adjacency);
* bi-distance ``d_bi(w)``: shortest path using bidirectional edges only.

``d_bi >= max(d_out, d_in)`` always.  A vertex is *reached* at radius
``min(d_out, d_in)``; the neighbourhood at radius r collects everything
reached by then, and its size is the cumulative count reported in profiles.

Ring accounting for the triple decomposition is tied to the exploration: the
bidirectional ring at radius r counts vertices whose bi-distance equals r
*and* which are newly reached at r, so the identity
``ring_out == tilde_out + ring_bi`` holds exactly at every radius, and the hat
rings are honest subsets of the corresponding plain rings.  Vertices whose
bi-distance is realised strictly later than their reach radius are a
measure-O(1/n) corner; the exploration convention keeps every pathwise
invariant exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graph_model import Digraph, Graph, _row_contains
from .rand_kit import RandomStream, _check_probability

UNREACHED = np.iinfo(np.int64).max


@dataclass(frozen=True)
class RingProfile:
    """Per-radius ring sizes around a centre vertex.

    ``variant`` selects the meaning of ``ring_sizes`` entries:

    * ``"undirected"``: int ``I_r``;
    * ``"directed"``: pair ``(I_out_r, I_in_r)``;
    * ``"hat"``: triple ``(hat_out_r, hat_in_r, bi_r)``; ``tilde_sizes`` then
      carries the pairs ``(I_out_r - bi_r, I_in_r - bi_r)`` and
      ``plain_sizes`` the raw ``(I_out_r, I_in_r)``.

    ``cumulative[r]`` is the number of vertices reached within radius r.
    ``ring_sets`` (optional) holds the per-radius vertex sets, in the same
    per-variant shape.
    """

    center: int
    radius: int
    variant: str
    ring_sizes: tuple
    cumulative: tuple[int, ...]
    tilde_sizes: tuple | None = None
    plain_sizes: tuple | None = None
    ring_sets: tuple | None = None


def _check_vertex(v: int, n: int) -> int:
    if not 0 <= v < n:
        raise ParameterError(f"vertex {v} out of range [0, {n})")
    return int(v)


def _gather_rows(indptr: np.ndarray, indices: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Concatenation of the CSR rows of ``verts`` (vectorised multi-slice)."""
    starts = indptr[verts]
    counts = indptr[verts + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offs = np.repeat(np.cumsum(counts) - counts, counts)
    idx = np.arange(total, dtype=np.int64) - offs + np.repeat(starts, counts)
    return indices[idx]


def bfs_distances(indptr: np.ndarray, indices: np.ndarray, source: int, cap: int,
                  blocked: np.ndarray | None = None) -> np.ndarray:
    """Distances from ``source`` along CSR adjacency, capped at ``cap``.

    Unreached (or beyond-cap) vertices hold the ``UNREACHED`` sentinel.
    ``blocked`` marks vertices excluded from the graph entirely.
    """
    n = len(indptr) - 1
    dist = np.full(n, UNREACHED, dtype=np.int64)
    if blocked is not None and blocked[source]:
        raise ParameterError("source vertex is excluded")
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while len(frontier) and d < cap:
        nbrs = _gather_rows(indptr, indices, frontier)
        if blocked is not None:
            nbrs = nbrs[~blocked[nbrs]]
        nbrs = nbrs[dist[nbrs] == UNREACHED]
        if len(nbrs) == 0:
            break
        frontier = np.unique(nbrs)
        d += 1
        dist[frontier] = d
    return dist


def bfs_distance_to(indptr: np.ndarray, indices: np.ndarray, source: int,
                    target: int, cap: int) -> float:
    """Shortest-path length source -> target along CSR adjacency, or inf beyond cap."""
    if source == target:
        return 0.0
    n = len(indptr) - 1
    seen = np.zeros(n, dtype=bool)
    seen[source] = True
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while len(frontier) and d < cap:
        nbrs = _gather_rows(indptr, indices, frontier)
        nbrs = nbrs[~seen[nbrs]]
        if len(nbrs) == 0:
            return math.inf
        frontier = np.unique(nbrs)
        seen[frontier] = True
        d += 1
        if seen[target]:
            return float(d)
    return math.inf


def _ring_counts(dist: np.ndarray, max_r: int) -> np.ndarray:
    reached = dist[dist != UNREACHED]
    return np.bincount(reached, minlength=max_r + 1)[:max_r + 1]


def _ring_set(dist: np.ndarray, r: int) -> frozenset:
    return frozenset(np.flatnonzero(dist == r).tolist())


def undirected_rings(graph: Graph, v: int, max_r: int,
                     keep_sets: bool = False,
                     _blocked: np.ndarray | None = None) -> RingProfile:
    """Ring sizes around v: ring r holds the vertices at graph distance exactly r.

    Stops early once a ring comes out empty (the first empty ring is included
    when reached before ``max_r``).
    """
    v = _check_vertex(v, graph.n)
    if max_r < 0:
        raise ParameterError("max_r must be >= 0")
    dist = bfs_distances(graph.indptr, graph.indices, v, max_r, blocked=_blocked)
    counts = _ring_counts(dist, max_r)
    radius = max_r
    for r in range(1, max_r + 1):
        if counts[r] == 0:
            radius = r
            break
    sizes = tuple(int(c) for c in counts[:radius + 1])
    cumulative = tuple(np.cumsum(sizes).tolist())
    sets = tuple(_ring_set(dist, r) for r in range(radius + 1)) if keep_sets else None
    return RingProfile(v, radius, "undirected", sizes, cumulative, ring_sets=sets)


def directed_rings(dg: Digraph, v: int, max_r: int,
                   keep_sets: bool = False,
                   _blocked: np.ndarray | None = None) -> RingProfile:
    """Out/in ring-size pairs around v; bidirectional edges count for both passes."""
    v = _check_vertex(v, dg.n)
    if max_r < 0:
        raise ParameterError("max_r must be >= 0")
    d_out = bfs_distances(dg.out_indptr, dg.out_indices, v, max_r, blocked=_blocked)
    d_in = bfs_distances(dg.in_indptr, dg.in_indices, v, max_r, blocked=_blocked)
    out_counts = _ring_counts(d_out, max_r)
    in_counts = _ring_counts(d_in, max_r)
    radius = max_r
    for r in range(1, max_r + 1):
        if out_counts[r] == 0 and in_counts[r] == 0:
            radius = r
            break
    sizes = tuple((int(out_counts[r]), int(in_counts[r])) for r in range(radius + 1))
    step = np.minimum(d_out, d_in)
    cumulative = tuple(int(np.sum(step <= r)) for r in range(radius + 1))
    sets = None
    if keep_sets:
        sets = tuple((_ring_set(d_out, r), _ring_set(d_in, r)) for r in range(radius + 1))
    return RingProfile(v, radius, "directed", sizes, cumulative, ring_sets=sets)


def _any_direction_neighbours(dg: Digraph, w: int) -> np.ndarray:
    """Vertices adjacent to w by an edge of any direction (each once)."""
    return np.union1d(dg.out_neighbours(w), dg.in_neighbours(w))


def hat_ring_decomposition(dg: Digraph, v: int, max_r: int,
                           keep_sets: bool = False,
                           _blocked: np.ndarray | None = None) -> RingProfile:
    """Triple ring decomposition ``(hat_out_r, hat_in_r, bi_r)`` around v.

    ``bi_r`` counts the vertices newly reached at radius r whose
    bidirectional-only distance is exactly r.  ``hat_out_r`` counts the newly
    reached vertices whose *single* incident edge from the radius-(r-1)
    neighbourhood is an out- or bidirectional edge from a hat-out vertex of
    ring r-1, or a strict out-edge from a bi-ring vertex of ring r-1; vertices
    touched by any other edge from the neighbourhood, whatever its direction,
    are excluded.  ``hat_in_r`` is defined symmetrically.  The three sets at
    each radius are pairwise disjoint.
    """
    v = _check_vertex(v, dg.n)
    if max_r < 0:
        raise ParameterError("max_r must be >= 0")
    d_out = bfs_distances(dg.out_indptr, dg.out_indices, v, max_r, blocked=_blocked)
    d_in = bfs_distances(dg.in_indptr, dg.in_indices, v, max_r, blocked=_blocked)
    d_bi = bfs_distances(dg.bi_indptr, dg.bi_indices, v, max_r, blocked=_blocked)
    step = np.minimum(d_out, d_in)

    out_counts = _ring_counts(d_out, max_r)
    in_counts = _ring_counts(d_in, max_r)
    radius = max_r
    for r in range(1, max_r + 1):
        if out_counts[r] == 0 and in_counts[r] == 0:
            radius = r
            break

    hat_o_prev: set[int] = set()
    hat_i_prev: set[int] = set()
    bi_prev: set[int] = {v}
    triples = [(0, 0, 1)]
    triple_sets = [(frozenset(), frozenset(), frozenset({v}))]
    for r in range(1, radius + 1):
        new_vertices = np.flatnonzero(step == r)
        bi_now = {int(w) for w in new_vertices if d_bi[w] == r}
        hat_o_now: set[int] = set()
        hat_i_now: set[int] = set()
        for w in new_vertices.tolist():
            nbrs = _any_direction_neighbours(dg, w)
            inside = nbrs[step[nbrs] <= r - 1]
            if len(inside) != 1:
                continue
            x = int(inside[0])
            to_w = _row_contains(dg.out_indptr, dg.out_indices, x, w)
            from_w = _row_contains(dg.in_indptr, dg.in_indices, x, w)
            is_bi = _row_contains(dg.bi_indptr, dg.bi_indices, x, w)
            if x in hat_o_prev and to_w:
                hat_o_now.add(w)
            elif x in hat_i_prev and from_w:
                hat_i_now.add(w)
            elif x in bi_prev and to_w and not is_bi:
                hat_o_now.add(w)
            elif x in bi_prev and from_w and not is_bi:
                hat_i_now.add(w)
        triples.append((len(hat_o_now), len(hat_i_now), len(bi_now)))
        if keep_sets:
            triple_sets.append((frozenset(hat_o_now), frozenset(hat_i_now), frozenset(bi_now)))
        hat_o_prev, hat_i_prev, bi_prev = hat_o_now, hat_i_now, bi_now

    plain = tuple((int(out_counts[r]), int(in_counts[r])) for r in range(radius + 1))
    tilde = tuple((plain[r][0] - triples[r][2], plain[r][1] - triples[r][2])
                  for r in range(radius + 1))
    cumulative = tuple(int(np.sum(step <= r)) for r in range(radius + 1))
    sets = tuple(triple_sets) if keep_sets else None
    return RingProfile(v, radius, "hat", tuple(triples), cumulative,
                       tilde_sizes=tilde, plain_sizes=plain, ring_sets=sets)


def restricted_rings(g, v2: int, excluded, max_r: int, variant: str = "directed",
                     keep_sets: bool = False) -> RingProfile:
    """Ring profile of v2 computed on the induced subgraph without ``excluded``.

    ``variant`` picks the unrestricted operation to mirror: ``"undirected"``
    (Graph input), ``"directed"`` or ``"hat"`` (Digraph input).
    """
    excluded = set(int(x) for x in excluded)
    if int(v2) in excluded:
        raise ParameterError(f"start vertex {v2} is in the excluded set")
    blocked = np.zeros(g.n, dtype=bool)
    for x in excluded:
        _check_vertex(x, g.n)
        blocked[x] = True
    if variant == "undirected":
        if not isinstance(g, Graph):
            raise ParameterError("undirected variant needs a Graph")
        return undirected_rings(g, v2, max_r, keep_sets=keep_sets, _blocked=blocked)
    if not isinstance(g, Digraph):
        raise ParameterError(f"{variant} variant needs a Digraph")
    if variant == "directed":
        return directed_rings(g, v2, max_r, keep_sets=keep_sets, _blocked=blocked)
    if variant == "hat":
        return hat_ring_decomposition(g, v2, max_r, keep_sets=keep_sets, _blocked=blocked)
    raise ParameterError(f"unknown variant {variant!r}")


def joint_distance(dg: Digraph, v: int, v2: int, cap: int | None = None) -> tuple[float, float]:
    """Pair (d_out, d_in): directed distances v -> v2 and v2 -> v, inf if unreachable."""
    v = _check_vertex(v, dg.n)
    v2 = _check_vertex(v2, dg.n)
    cap = dg.n if cap is None else cap
    d_out = bfs_distance_to(dg.out_indptr, dg.out_indices, v, v2, cap)
    d_in = bfs_distance_to(dg.in_indptr, dg.in_indices, v, v2, cap)
    return d_out, d_in


def reed_frost_trajectory(n: int, p: float, max_r: int, stream: RandomStream) -> list[int]:
    """Chain-binomial ring-size sequence: I_0 = 1 and, given (S_r, I_r),
    ``I_{r+1} ~ Binomial(S_r, 1 - (1-p)^{I_r})`` with ``S_{r+1} = S_r - I_{r+1}``.

    Stops at ``max_r`` or at absorption (first zero ring, which is included).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    p = _check_probability(p, "p")
    if max_r < 0:
        raise ParameterError("max_r must be >= 0")
    sizes = [1]
    susceptible = n - 1
    for _ in range(max_r):
        hit_prob = -math.expm1(sizes[-1] * math.log1p(-p)) if p < 1.0 else 1.0
        nxt = int(stream.gen.binomial(susceptible, hit_prob))
        sizes.append(nxt)
        susceptible -= nxt
        if nxt == 0:
            break
    return sizes


def reed_frost_batch(n: int, p: float, max_r: int, replicas: int,
                     stream: RandomStream) -> np.ndarray:
    """Vectorised Reed-Frost rings: array of shape (replicas, max_r + 1)."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    p = _check_probability(p, "p")
    out = np.zeros((replicas, max_r + 1), dtype=np.int64)
    current = np.ones(replicas, dtype=np.int64)
    out[:, 0] = current
    susceptible = np.full(replicas, n - 1, dtype=np.int64)
    log_miss = math.log1p(-p) if p < 1.0 else -math.inf
    for r in range(1, max_r + 1):
        hit_prob = -np.expm1(current * log_miss) if p < 1.0 else np.ones(replicas)
        nxt = stream.gen.binomial(susceptible, hit_prob)
        out[:, r] = nxt
        susceptible -= nxt
        current = nxt
    return out
