"""Bernoulli graphs and directed Bernoulli digraphs: sampling, storage, edge-list I/O.

The sampled objects live in the sparse regime (p of order 1/n), so storage is
adjacency lists in CSR form (``indptr``/``indices`` pairs with sorted rows) and
pair sampling walks the ``n(n-1)/2`` unordered pair indices with a vectorised
geometric skip, touching only the pairs that actually carry an edge.

A digraph keeps three adjacency views: ``out`` (arcs leaving a vertex,
bidirectional edges included), ``in`` (arcs entering, bidirectional included)
and ``bi`` (the symmetric bidirectional-only subgraph).
"""

from __future__ import annotations

import csv
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import IngestionError, ParameterError
from .rand_kit import RandomStream, _check_probability

_EMPTY = np.empty(0, dtype=np.int64)
_INT_TOKEN = re.compile(r"[0-9]+")


# ---------------------------------------------------------------------------
# CSR plumbing
# ---------------------------------------------------------------------------

def _arc_keys(n: int, tails: np.ndarray, heads: np.ndarray) -> np.ndarray:
    """Arcs packed as int64 scalar keys tail*n + head (sortable, searchable)."""
    return tails.astype(np.int64, copy=False) * np.int64(n) + heads


def _csr_from_keys(n: int, keys: np.ndarray):
    """CSR (indptr, indices) from *sorted* packed arc keys."""
    if len(keys) == 0:
        return np.zeros(n + 1, dtype=np.int64), _EMPTY.copy()
    counts = np.bincount(keys // n, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, keys % n


def _csr_from_arcs(n: int, tails: np.ndarray, heads: np.ndarray):
    """Sorted-row CSR (indptr, indices) from parallel arc arrays."""
    if len(tails) == 0:
        return np.zeros(n + 1, dtype=np.int64), _EMPTY.copy()
    return _csr_from_keys(n, np.sort(_arc_keys(n, tails, heads)))


def _row(indptr: np.ndarray, indices: np.ndarray, v: int) -> np.ndarray:
    return indices[indptr[v]:indptr[v + 1]]


def _row_contains(indptr: np.ndarray, indices: np.ndarray, v: int, w: int) -> bool:
    lo, hi = indptr[v], indptr[v + 1]
    pos = np.searchsorted(indices[lo:hi], w)
    return pos < hi - lo and indices[lo + pos] == w


# ---------------------------------------------------------------------------
# Graph types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with symmetric sorted adjacency."""

    n: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    def neighbours(self, v: int) -> np.ndarray:
        return _row(self.indptr, self.indices, v)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def validate(self) -> None:
        """Check symmetry, absence of self-loops and duplicates; raises on violation."""
        for v in range(self.n):
            row = self.neighbours(v)
            if len(row) != len(np.unique(row)):
                raise AssertionError(f"duplicate neighbours at vertex {v}")
            if np.any(row == v):
                raise AssertionError(f"self-loop at vertex {v}")
            for w in row:
                if not _row_contains(self.indptr, self.indices, int(w), v):
                    raise AssertionError(f"asymmetric edge {v}->{w}")


@dataclass(frozen=True)
class Digraph:
    """Directed graph over ordered pairs with per-pair state none/out/in/bidirectional.

    ``out``/``in`` rows both include bidirectional edges; ``bi`` rows hold the
    bidirectional-only adjacency.  Rows are sorted, duplicate-free, loop-free.
    """

    n: int
    out_indptr: np.ndarray = field(repr=False)
    out_indices: np.ndarray = field(repr=False)
    in_indptr: np.ndarray = field(repr=False)
    in_indices: np.ndarray = field(repr=False)
    bi_indptr: np.ndarray = field(repr=False)
    bi_indices: np.ndarray = field(repr=False)

    def out_neighbours(self, v: int) -> np.ndarray:
        return _row(self.out_indptr, self.out_indices, v)

    def in_neighbours(self, v: int) -> np.ndarray:
        return _row(self.in_indptr, self.in_indices, v)

    def bi_neighbours(self, v: int) -> np.ndarray:
        return _row(self.bi_indptr, self.bi_indices, v)

    @property
    def arc_count(self) -> int:
        """Number of ordered adjacencies (a bidirectional edge counts twice)."""
        return len(self.out_indices)

    @property
    def bi_edge_count(self) -> int:
        return len(self.bi_indices) // 2

    @property
    def single_arc_count(self) -> int:
        return len(self.out_indices) - len(self.bi_indices)

    def pair_state(self, i: int, j: int) -> str:
        """State of the ordered pair (i, j): 'none', 'out' (i->j), 'in' (j->i) or 'bi'."""
        if i == j:
            raise ParameterError("pair_state is undefined on the diagonal")
        if _row_contains(self.bi_indptr, self.bi_indices, i, j):
            return "bi"
        if _row_contains(self.out_indptr, self.out_indices, i, j):
            return "out"
        if _row_contains(self.out_indptr, self.out_indices, j, i):
            return "in"
        return "none"

    def validate(self) -> None:
        """Check transpose consistency of out/in views and structural invariants."""
        if len(self.out_indices) != len(self.in_indices):
            raise AssertionError("out/in adjacency sizes differ")
        for v in range(self.n):
            for name, indptr, indices in (("out", self.out_indptr, self.out_indices),
                                          ("in", self.in_indptr, self.in_indices),
                                          ("bi", self.bi_indptr, self.bi_indices)):
                row = _row(indptr, indices, v)
                if len(row) != len(np.unique(row)):
                    raise AssertionError(f"duplicate {name}-neighbours at vertex {v}")
                if np.any(row == v):
                    raise AssertionError(f"self-loop in {name} adjacency at vertex {v}")
            for w in self.out_neighbours(v):
                if not _row_contains(self.in_indptr, self.in_indices, int(w), v):
                    raise AssertionError(f"arc {v}->{w} missing from in-adjacency")
            for w in self.bi_neighbours(v):
                if not (_row_contains(self.out_indptr, self.out_indices, v, int(w))
                        and _row_contains(self.in_indptr, self.in_indices, v, int(w))):
                    raise AssertionError(f"bi edge {v}~{w} not present in both directions")


def digraph_from_arcs(n: int, tails: np.ndarray, heads: np.ndarray) -> Digraph:
    """Build a digraph from ordered arc arrays; reciprocal arcs become bidirectional."""
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    keys = np.unique(_arc_keys(n, tails, heads)) if len(tails) else _EMPTY.copy()
    rev_sorted = np.sort((keys % n) * np.int64(n) + keys // n)
    out_indptr, out_indices = _csr_from_keys(n, keys)
    in_indptr, in_indices = _csr_from_keys(n, rev_sorted)
    # bidirectional arcs: those whose reverse is also present
    if len(keys):
        pos = np.minimum(np.searchsorted(rev_sorted, keys), len(rev_sorted) - 1)
        bi_keys = keys[rev_sorted[pos] == keys]
    else:
        bi_keys = _EMPTY.copy()
    bi_indptr, bi_indices = _csr_from_keys(n, bi_keys)
    return Digraph(n, out_indptr, out_indices, in_indptr, in_indices, bi_indptr, bi_indices)


def graph_from_edges(n: int, a: np.ndarray, b: np.ndarray) -> Graph:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    keys = np.concatenate([_arc_keys(n, a, b), _arc_keys(n, b, a)])
    keys = np.unique(keys) if len(keys) else _EMPTY.copy()
    indptr, indices = _csr_from_keys(n, keys)
    return Graph(n, indptr, indices)


def undirected_projection(dg: Digraph) -> Graph:
    """Forget directions: every pair carrying any arc becomes an undirected edge."""
    tails = np.repeat(np.arange(dg.n, dtype=np.int64), np.diff(dg.out_indptr))
    heads = dg.out_indices
    lo = np.minimum(tails, heads)
    hi = np.maximum(tails, heads)
    if len(lo):
        key = np.unique(lo * np.int64(dg.n) + hi)
        lo, hi = key // dg.n, key % dg.n
    return graph_from_edges(dg.n, lo, hi)


# ---------------------------------------------------------------------------
# Bernoulli sampling
# ---------------------------------------------------------------------------

def edge_probability_out(p: float, theta: float) -> float:
    """Probability that an ordered pair carries a directed (possibly bidirectional) edge."""
    p = _check_probability(p, "p")
    theta = _check_probability(theta, "theta")
    return 0.5 * p * (1.0 + theta)


def _sample_pair_indices(n_pairs: int, p: float, gen: np.random.Generator) -> np.ndarray:
    """Indices of the pairs carrying an edge, via geometric skips over [0, n_pairs)."""
    if p <= 0.0 or n_pairs == 0:
        return _EMPTY.copy()
    if p >= 1.0:
        return np.arange(n_pairs, dtype=np.int64)
    expected = n_pairs * p
    batch = int(expected + 10.0 * np.sqrt(expected + 1.0) + 16)
    chunks = []
    pos = -1
    while True:
        steps = gen.geometric(p, size=batch).astype(np.int64)
        # steps beyond the index range (including int64 overflow markers from
        # minuscule p) all mean "no further pair": clamp to a safe exit value
        steps = np.where(steps <= 0, n_pairs + 1, np.minimum(steps, n_pairs + 1))
        positions = pos + np.cumsum(steps)
        inside = positions[positions < n_pairs]
        if len(inside) < len(positions):
            chunks.append(inside)
            break
        chunks.append(positions)
        pos = int(positions[-1])
    return np.concatenate(chunks) if len(chunks) > 1 else chunks[0]


def _pairs_from_indices(ks: np.ndarray, n: int):
    """Map sorted pair indices to (i, j) with i < j, row-major in i."""
    if len(ks) == 0:
        return _EMPTY.copy(), _EMPTY.copy()
    b = 2.0 * n - 1.0
    i = np.floor((b - np.sqrt(b * b - 8.0 * ks.astype(np.float64))) / 2.0).astype(np.int64)
    i = np.clip(i, 0, n - 2)
    # fix float rounding: offset(i) <= k < offset(i+1)
    for _ in range(3):
        off = i * (2 * n - i - 1) // 2
        too_big = off > ks
        i = np.where(too_big, i - 1, i)
        off = i * (2 * n - i - 1) // 2
        nxt = (i + 1) * (2 * n - i - 2) // 2
        too_small = ks >= nxt
        i = np.where(too_small, i + 1, i)
        if not (np.any(too_big) or np.any(too_small)):
            break
    off = i * (2 * n - i - 1) // 2
    j = ks - off + i + 1
    return i, j


def sample_graph(n: int, p: float, stream: RandomStream) -> Graph:
    """Sample the Bernoulli random graph: each unordered pair carries an edge w.p. p."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    p = _check_probability(p, "p")
    ks = _sample_pair_indices(n * (n - 1) // 2, p, stream.gen)
    a, b = _pairs_from_indices(ks, n)
    return graph_from_edges(n, a, b)


def sample_digraph(n: int, p: float, theta: float, stream: RandomStream) -> Digraph:
    """Sample the directed Bernoulli digraph.

    Each unordered pair independently carries no edge w.p. 1-p; a present edge
    is bidirectional w.p. theta and takes either single direction w.p.
    (1-theta)/2 each.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    p = _check_probability(p, "p")
    theta = _check_probability(theta, "theta")
    ks = _sample_pair_indices(n * (n - 1) // 2, p, stream.gen)
    i, j = _pairs_from_indices(ks, n)
    u = stream.gen.random(len(ks))
    is_bi = u < theta
    is_fwd = (~is_bi) & (u < theta + 0.5 * (1.0 - theta))
    is_rev = ~(is_bi | is_fwd)
    # arcs are distinct by construction: build the three CSR views directly
    fwd = _arc_keys(n, i, j)
    rev = _arc_keys(n, j, i)
    out_keys = np.sort(np.concatenate([fwd[is_bi], rev[is_bi], fwd[is_fwd], rev[is_rev]]))
    in_keys = np.sort(np.concatenate([rev[is_bi], fwd[is_bi], rev[is_fwd], fwd[is_rev]]))
    bi_keys = np.sort(np.concatenate([fwd[is_bi], rev[is_bi]]))
    out_indptr, out_indices = _csr_from_keys(n, out_keys)
    in_indptr, in_indices = _csr_from_keys(n, in_keys)
    bi_indptr, bi_indices = _csr_from_keys(n, bi_keys)
    return Digraph(n, out_indptr, out_indices, in_indptr, in_indices, bi_indptr, bi_indices)


def count_pair_states(dg: Digraph) -> tuple[int, int, int, int]:
    """Unordered-pair state counts (none, low->high only, high->low only, bidirectional)."""
    total = dg.n * (dg.n - 1) // 2
    tails = np.repeat(np.arange(dg.n, dtype=np.int64), np.diff(dg.out_indptr))
    heads = dg.out_indices
    bi = dg.bi_edge_count
    fwd = int(np.sum((tails < heads)) - bi)  # bi arcs contribute one low->high arc each
    rev = int(np.sum((tails > heads)) - bi)
    return total - fwd - rev - bi, fwd, rev, bi


# ---------------------------------------------------------------------------
# Edge-list I/O
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IngestReport:
    rows: int
    self_loops_dropped: int
    duplicates_collapsed: int


def load_edge_list(path, directed: bool = True, return_report: bool = False):
    """Load a CSV edge list ``src,dst`` (optionally ``src,dst,kind``) into a Digraph.

    Vertex ids are arbitrary tokens, re-indexed densely to 0..n-1 in sorted
    token order (numeric when every token is an integer, lexicographic
    otherwise); loading a file previously written by :func:`export_edge_list`
    therefore reproduces the exported digraph exactly.  Duplicate rows
    collapse to one arc; self-loops are dropped with a warning.  With
    ``directed=False`` every row induces a bidirectional pair.  A ``kind``
    column must hold ``out`` (row direction) or ``bi``.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot open edge list {path!r}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: line 1: missing header") from None
        header = [h.strip() for h in header]
        if header[:2] != ["src", "dst"] or len(header) > 3 or \
                (len(header) == 3 and header[2] != "kind"):
            raise IngestionError(f"{path}: line 1: expected header 'src,dst[,kind]', got {','.join(header)!r}")
        want = len(header)
        tokens: set[str] = set()
        loops = 0
        rows = 0
        raw_rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != want:
                raise IngestionError(f"{path}: line {lineno}: expected {want} fields, got {len(row)}")
            rows += 1
            src, dst = row[0], row[1]
            kind = row[2].strip() if want == 3 else "out"
            if kind not in ("out", "bi"):
                raise IngestionError(f"{path}: line {lineno}: kind must be 'out' or 'bi', got {kind!r}")
            tokens.add(src)
            tokens.add(dst)
            if src == dst:
                loops += 1
                continue
            raw_rows.append((src, dst, kind))
    if loops:
        warnings.warn(f"{path}: dropped {loops} self-loop row(s)", stacklevel=2)
    if tokens and all(_INT_TOKEN.fullmatch(t) for t in tokens):
        ordered = sorted(tokens, key=int)
    else:
        ordered = sorted(tokens)
    ids = {tok: k for k, tok in enumerate(ordered)}
    arcs: set[tuple[int, int]] = set()
    dupes = 0
    for src, dst, kind in raw_rows:
        a, b = ids[src], ids[dst]
        new = [(a, b)]
        if kind == "bi" or not directed:
            new.append((b, a))
        for arc in new:
            if arc in arcs:
                dupes += 1
            else:
                arcs.add(arc)
    n = len(ids)
    if arcs:
        tails, heads = map(np.array, zip(*sorted(arcs)))
    else:
        tails = heads = _EMPTY
    dg = digraph_from_arcs(n, tails, heads)
    if return_report:
        return dg, IngestReport(rows, loops, dupes)
    return dg


def export_edge_list(dg: Digraph, path, keep_kinds: bool = False) -> None:
    """Write a digraph back to CSV; inverse of :func:`load_edge_list`.

    Without ``keep_kinds`` every arc is one row, so bidirectional edges appear
    as two rows.  With ``keep_kinds`` each edge is one row ``src,dst,kind``;
    bidirectional rows are keyed to the smaller-index endpoint.
    """
    tails = np.repeat(np.arange(dg.n, dtype=np.int64), np.diff(dg.out_indptr))
    heads = dg.out_indices
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if keep_kinds:
            writer.writerow(["src", "dst", "kind"])
            rows = []
            for t, h in zip(tails.tolist(), heads.tolist()):
                if _row_contains(dg.bi_indptr, dg.bi_indices, t, h):
                    if t < h:
                        rows.append((t, h, "bi"))
                else:
                    rows.append((t, h, "out"))
            for t, h, kind in sorted(rows):
                writer.writerow([t, h, kind])
        else:
            writer.writerow(["src", "dst"])
            for t, h in sorted(zip(tails.tolist(), heads.tolist())):
                writer.writerow([t, h])
