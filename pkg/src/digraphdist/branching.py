"""Single-type and 3-type Bienayme-Galton-Watson processes, their martingale
approximants, the 3x3 mean-matrix algebra, and joint graph/branching couplings
with pathwise domination.

Generation counts are simulated without genealogy, through conditional
additivity: a Poisson process satisfies ``Z_{r+1} | Z_r ~ Poisson(m Z_r)`` and
a binomial one ``Z_{r+1} | Z_r ~ Binomial((n-1) Z_r, m/n)``, which is exact in
law and costs O(depth) rather than O(population).

The couplings realise the per-parent restricted offspring counts by
hypergeometric conditioning of the full binomial totals (identical joint law
to an explicit indicator-array construction, O(1) memory per parent), and
assign ring vertices by sampling without replacement from the complement of
the current neighbourhood.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, ParameterError
from .graph_model import sample_digraph, _row_contains
from .neighbourhoods import RingProfile, bfs_distances, UNREACHED
from .rand_kit import RandomStream

_CAPACITY_LIMIT = float(2 ** 63)
_CAPACITY_MARGIN = 1.0e3


def check_capacity(base: float, depth: int) -> None:
    """Refuse depths whose expected population would overflow 64-bit counts."""
    if depth < 0:
        raise ParameterError("depth must be >= 0")
    if base <= 1.0:
        return
    if depth * math.log(base) + math.log(_CAPACITY_MARGIN) >= math.log(_CAPACITY_LIMIT):
        raise CapacityError(
            f"depth {depth} at mean {base} risks 64-bit overflow "
            f"(need base**depth * {_CAPACITY_MARGIN:g} < 2**63)")


def truncation_depth(base: float, tol: float = 1e-3) -> int:
    """Depth R making the L2 truncation error of the martingale at most tol.

    Chosen so ``base**(-R) / (base - 1) <= tol**2``, capped by the 64-bit
    capacity rule.
    """
    if base <= 1.0:
        raise DomainError(f"truncation depth needs a supercritical base, got {base}")
    depth = max(0, math.ceil(math.log(1.0 / ((base - 1.0) * tol * tol)) / math.log(base)))
    cap = int((math.log(_CAPACITY_LIMIT) - math.log(_CAPACITY_MARGIN)) / math.log(base)) - 1
    return min(depth, cap)


# ---------------------------------------------------------------------------
# Generation sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenerationSeq:
    """Generation counts Z_0..Z_R of a single-type branching process."""

    counts: tuple[int, ...]
    law: str          # "poisson" or "binomial"
    m: float          # mean offspring (binomial law: Binomial(n-1, m/n))
    n: int | None = None

    @property
    def depth(self) -> int:
        return len(self.counts) - 1


@dataclass(frozen=True)
class TriGenerationSeq:
    """Generation count triples of the 3-type process started from one type-3 individual."""

    counts: tuple[tuple[int, int, int], ...]
    m: float
    theta: float
    law: str = "poisson"
    n: int | None = None

    @property
    def depth(self) -> int:
        return len(self.counts) - 1

    @property
    def params(self) -> tuple[float, float, float]:
        return 0.5 * self.m * (1 + self.theta), 0.5 * self.m * (1 - self.theta), self.m * self.theta


@dataclass(frozen=True)
class LimitSample:
    """Truncated martingale approximant(s) at a given depth.

    ``values`` is ``W_R`` (single-type) or ``(W*_1R, W*_2R, W_3R)`` (3-type);
    ``plus`` optionally carries the discounted cumulative sums.
    """

    values: float | tuple[float, float, float]
    depth: int
    plus: float | tuple[float, float, float] | None = None


def bgw_generations(law: str, m: float, depth: int, stream: RandomStream,
                    n: int | None = None) -> GenerationSeq:
    """Simulate Z_0..Z_depth by conditional additivity.

    ``law`` is ``"poisson"`` (offspring mean m) or ``"binomial"`` (offspring
    Binomial(n-1, m/n), which requires ``n``).
    """
    if m < 0:
        raise ParameterError(f"m must be >= 0, got {m}")
    check_capacity(m, depth)
    gen = stream.gen
    z = 1
    counts = [1]
    if law == "poisson":
        for _ in range(depth):
            z = int(gen.poisson(m * z)) if z else 0
            counts.append(z)
    elif law == "binomial":
        if n is None or n < 2:
            raise ParameterError("binomial law needs n >= 2")
        p = m / n
        if p > 1:
            raise ParameterError(f"m/n = {p} exceeds 1")
        for _ in range(depth):
            z = int(gen.binomial((n - 1) * z, p)) if z else 0
            counts.append(z)
    else:
        raise ParameterError(f"unknown offspring law {law!r}")
    return GenerationSeq(tuple(counts), law, float(m), n)


def tri_params(m: float, theta: float) -> tuple[float, float, float]:
    """Offspring scale triple (m0, m1, m*theta) = (m(1+theta)/2, m(1-theta)/2, m theta)."""
    return 0.5 * m * (1 + theta), 0.5 * m * (1 - theta), m * theta


def tri_generations(m: float, theta: float, depth: int, stream: RandomStream) -> TriGenerationSeq:
    """Simulate the 3-type Poisson process from initial state (0, 0, 1).

    Types 1 and 2 beget Poisson(m0) of their own type; type 3 begets
    independent Poisson(m1), Poisson(m1), Poisson(m theta) counts of types
    1, 2, 3.  By Poisson additivity the generation evolves as
    ``Z1' ~ Po(m0 Z1 + m1 Z3)``, ``Z2' ~ Po(m0 Z2 + m1 Z3)``,
    ``Z3' ~ Po(m theta Z3)`` independently given the current generation.
    """
    if m < 0 or not 0 <= theta <= 1:
        raise ParameterError(f"need m >= 0 and theta in [0, 1], got m={m}, theta={theta}")
    m0, m1, mth = tri_params(m, theta)
    check_capacity(max(m0, 1.0), depth)
    gen = stream.gen
    z1, z2, z3 = 0, 0, 1
    counts = [(0, 0, 1)]
    for _ in range(depth):
        lam1 = m0 * z1 + m1 * z3
        lam2 = m0 * z2 + m1 * z3
        lam3 = mth * z3
        z1 = int(gen.poisson(lam1)) if lam1 > 0 else 0
        z2 = int(gen.poisson(lam2)) if lam2 > 0 else 0
        z3 = int(gen.poisson(lam3)) if lam3 > 0 else 0
        counts.append((z1, z2, z3))
    return TriGenerationSeq(tuple(counts), float(m), float(theta))


# ---------------------------------------------------------------------------
# Mean matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeanMatrix:
    """3x3 expected-offspring matrix of the 3-type process."""

    matrix: np.ndarray
    m0: float
    gamma: float


def mean_matrix(m: float, theta: float) -> MeanMatrix:
    """Mean matrix M = m0 [[1,0,0],[0,1,0],[1-g,1-g,g]] with g = m*theta/m0."""
    m0, m1, mth = tri_params(m, theta)
    if m0 <= 0:
        raise DomainError(f"mean matrix needs m0 > 0, got {m0}")
    gamma = mth / m0
    mat = np.array([[m0, 0.0, 0.0],
                    [0.0, m0, 0.0],
                    [m1, m1, mth]])
    return MeanMatrix(mat, m0, gamma)


def mean_matrix_power(mm: MeanMatrix, r: int) -> np.ndarray:
    """Closed-form r-th power: m0^r [[1,0,0],[0,1,0],[1-g^r,1-g^r,g^r]]."""
    if r < 0:
        raise ParameterError("power must be >= 0")
    if r == 0:
        return np.eye(3)
    scale = mm.m0 ** r
    gr = mm.gamma ** r
    return scale * np.array([[1.0, 0.0, 0.0],
                             [0.0, 1.0, 0.0],
                             [1.0 - gr, 1.0 - gr, gr]])


def tri_mean_vector(m: float, theta: float, r: int) -> np.ndarray:
    """Expected generation-r triple for the start state (0, 0, 1): e3^T M^r."""
    return mean_matrix_power(mean_matrix(m, theta), r)[2]


# ---------------------------------------------------------------------------
# Martingale approximants
# ---------------------------------------------------------------------------

def w_sample_batch(m: float, depth: int, count: int, stream: RandomStream,
                   with_plus: bool = False):
    """``count`` independent truncated martingale values W_R = m^-R Z_R (Poisson law).

    With ``with_plus`` also returns the discounted sums ``m^-R sum_{l<=R} Z_l``.
    """
    if m <= 0:
        raise ParameterError(f"m must be > 0, got {m}")
    check_capacity(m, depth)
    gen = stream.gen
    z = np.ones(count, dtype=np.int64)
    acc = np.ones(count, dtype=np.int64) if with_plus else None
    for _ in range(depth):
        z = gen.poisson(m * z)
        if with_plus:
            acc += z
    scale = m ** (-depth)
    w = z * scale
    if with_plus:
        return w, acc * scale
    return w


def w_sample(m: float, depth: int, stream: RandomStream, with_plus: bool = False) -> LimitSample:
    """One truncated martingale approximant W_R (Poisson offspring, mean m)."""
    if with_plus:
        w, plus = w_sample_batch(m, depth, 1, stream, with_plus=True)
        return LimitSample(float(w[0]), depth, float(plus[0]))
    w = w_sample_batch(m, depth, 1, stream)
    return LimitSample(float(w[0]), depth)


def tri_w_sample_batch(m: float, theta: float, depth: int, count: int,
                       stream: RandomStream, with_plus: bool = False):
    """``count`` independent truncated triples (W*_1R, W*_2R, W_3R).

    ``W*_jR = m0^-R (Z_j + Z_3)`` and ``W_3R = (m theta)^-R Z_3``; with
    ``with_plus`` the discounted star-sums and type-3 sum come too.
    """
    if m <= 0 or not 0 <= theta <= 1:
        raise ParameterError(f"need m > 0 and theta in [0, 1], got m={m}, theta={theta}")
    m0, m1, mth = tri_params(m, theta)
    check_capacity(max(m0, 1.0), depth)
    gen = stream.gen
    z1 = np.zeros(count, dtype=np.int64)
    z2 = np.zeros(count, dtype=np.int64)
    z3 = np.ones(count, dtype=np.int64)
    if with_plus:
        acc1 = z1 + z3
        acc2 = z2 + z3
        acc3 = z3.copy()
    for _ in range(depth):
        lam1 = m0 * z1 + m1 * z3
        lam2 = m0 * z2 + m1 * z3
        z1 = gen.poisson(lam1)
        z2 = gen.poisson(lam2)
        z3 = gen.poisson(mth * z3) if mth > 0 else np.zeros(count, dtype=np.int64)
        if with_plus:
            acc1 += z1 + z3
            acc2 += z2 + z3
            acc3 += z3
    scale0 = m0 ** (-depth)
    w1 = (z1 + z3) * scale0
    w2 = (z2 + z3) * scale0
    if mth > 0:
        w3 = z3 * (mth ** (-depth))
    else:
        w3 = z3.astype(np.float64)  # zero beyond depth 0
    if with_plus:
        p3 = acc3 * (mth ** (-depth)) if mth > 0 else acc3.astype(np.float64)
        return (w1, w2, w3), (acc1 * scale0, acc2 * scale0, p3)
    return w1, w2, w3


def tri_w_sample(m: float, theta: float, depth: int, stream: RandomStream,
                 with_plus: bool = False) -> LimitSample:
    """One truncated 3-type approximant triple."""
    if with_plus:
        (w1, w2, w3), (p1, p2, p3) = tri_w_sample_batch(m, theta, depth, 1, stream, with_plus=True)
        return LimitSample((float(w1[0]), float(w2[0]), float(w3[0])), depth,
                           (float(p1[0]), float(p2[0]), float(p3[0])))
    w1, w2, w3 = tri_w_sample_batch(m, theta, depth, 1, stream)
    return LimitSample((float(w1[0]), float(w2[0]), float(w3[0])), depth)


# ---------------------------------------------------------------------------
# Couplings
# ---------------------------------------------------------------------------

def coupled_graph_bgw(n: int, m: float, max_r: int, stream: RandomStream
                      ) -> tuple[RingProfile, GenerationSeq]:
    """Jointly sample Bernoulli-graph ring sizes and a dominating binomial BGW.

    Each ring vertex of generation r-1 is paired with a branching individual;
    the individual draws its full Binomial(n-1, m/n) offspring count U, the
    ring vertex keeps the hypergeometric-conditioned restricted count
    (edges landing outside the current neighbourhood), and the restricted
    edges choose distinct uniform targets among the unreached vertices.
    Domination ``Z_r >= I_r`` holds pathwise on every run; both marginals are
    exact (ring sizes match a BFS of a fresh graph, Z matches the binomial
    branching law).
    """
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    if m < 0 or m > n:
        raise ParameterError(f"need 0 <= m <= n, got m={m}")
    check_capacity(m, max_r)
    gen = stream.gen
    p = m / n
    rings = [1]
    zs = [1]
    reached = 1
    ring_prev, z_prev = 1, 1
    for _ in range(max_r):
        if z_prev == 0:
            rings.append(0)
            zs.append(0)
            continue
        totals = gen.binomial(n - 1, p, size=z_prev)
        z_next = int(totals.sum())
        outside = n - reached
        hit = 0
        for j in range(ring_prev):
            u = int(totals[j])
            if u == 0 or outside == 0:
                continue
            restricted = int(gen.hypergeometric(u, n - 1 - u, outside)) if u < n - 1 else outside
            if restricted == 0:
                continue
            fresh = int(gen.hypergeometric(outside - hit, hit, restricted)) if hit else restricted
            hit += fresh
        rings.append(hit)
        zs.append(z_next)
        reached += hit
        ring_prev, z_prev = hit, z_next
    sizes = tuple(rings)
    cumulative = tuple(np.cumsum(sizes).tolist())
    profile = RingProfile(0, max_r, "undirected", sizes, cumulative)
    return profile, GenerationSeq(tuple(zs), "binomial", float(m), n)


def coupled_digraph_tribgw(n: int, m: float, theta: float, max_r: int,
                           stream: RandomStream) -> tuple[RingProfile, TriGenerationSeq]:
    """Jointly sample digraph hat-ring triples and a dominating 3-type process.

    The digraph is sampled outright and its hat decomposition taken around
    vertex 0; the 3-type process extends each hat/bi parent's restricted
    offspring counts (read off the graph) by independent padding over the
    already-explored portion, so type-1/2 individuals carry Binomial(n-1,
    m0/n) offspring and type-3 individuals the null-padded multinomial with
    cell probabilities (m1/n, m1/n, m theta/n).  Componentwise domination
    ``Z_r >= hat_r`` holds pathwise on every run.
    """
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    if m < 0 or m > n:
        raise ParameterError(f"need 0 <= m <= n, got m={m}")
    if not 0 <= theta <= 1:
        raise ParameterError(f"theta must be in [0, 1], got {theta}")
    m0, m1, mth = tri_params(m, theta)
    check_capacity(max(m0, 1.0), max_r)
    gen = stream.gen
    dg = sample_digraph(n, m / n, theta, stream)
    v = 0
    d_out = bfs_distances(dg.out_indptr, dg.out_indices, v, max_r)
    d_in = bfs_distances(dg.in_indptr, dg.in_indices, v, max_r)
    d_bi = bfs_distances(dg.bi_indptr, dg.bi_indices, v, max_r)
    step = np.minimum(d_out, d_in)

    p0 = m0 / n
    tri_probs = [m1 / n, m1 / n, mth / n]
    tri_probs.append(max(0.0, 1.0 - sum(tri_probs)))

    hat_o: set[int] = set()
    hat_i: set[int] = set()
    bi_ring: set[int] = {v}
    z1, z2, z3 = 0, 0, 1
    triples = [(0, 0, 1)]
    z_counts = [(0, 0, 1)]
    reached = 1

    def outside_counts(x: int, r: int):
        """Restricted typed edge counts of parent x into the unreached set."""
        out_row = dg.out_neighbours(x)
        in_row = dg.in_neighbours(x)
        bi_row = dg.bi_neighbours(x)
        out_new = out_row[step[out_row] >= r]
        in_new = in_row[step[in_row] >= r]
        bi_new = int(np.sum(step[bi_row] >= r))
        strict_out = len(out_new) - bi_new
        strict_in = len(in_new) - bi_new
        return strict_out, strict_in, bi_new

    for r in range(1, max_r + 1):
        pad = reached - 1  # explored slots beyond self, padded independently
        nz1 = nz2 = nz3 = 0
        # paired type-1 individuals (hat-out parents): out/bi edges to unreached + padding
        for x in sorted(hat_o):
            out_row = dg.out_neighbours(x)
            q = int(np.sum(step[out_row] >= r))
            nz1 += q + (int(gen.binomial(pad, p0)) if pad else 0)
        for x in sorted(hat_i):
            in_row = dg.in_neighbours(x)
            q = int(np.sum(step[in_row] >= r))
            nz2 += q + (int(gen.binomial(pad, p0)) if pad else 0)
        for x in sorted(bi_ring):
            a_o, a_i, a_b = outside_counts(x, r)
            if pad:
                extra = gen.multinomial(pad, tri_probs)
                a_o += int(extra[0])
                a_i += int(extra[1])
                a_b += int(extra[2])
            nz1 += a_o
            nz2 += a_i
            nz3 += a_b
        # unpaired individuals draw fresh full offspring
        for count, add_to in ((z1 - len(hat_o), 1), (z2 - len(hat_i), 2)):
            if count > 0:
                fresh = int(gen.binomial(n - 1, p0, size=count).sum())
                if add_to == 1:
                    nz1 += fresh
                else:
                    nz2 += fresh
        extra3 = z3 - len(bi_ring)
        if extra3 > 0:
            fresh = gen.multinomial(n - 1, tri_probs, size=extra3).sum(axis=0)
            nz1 += int(fresh[0])
            nz2 += int(fresh[1])
            nz3 += int(fresh[2])
        z1, z2, z3 = nz1, nz2, nz3
        z_counts.append((z1, z2, z3))

        # graph side: classify the newly reached vertices
        new_vertices = np.flatnonzero(step == r)
        bi_now = {int(w) for w in new_vertices if d_bi[w] == r}
        hat_o_now: set[int] = set()
        hat_i_now: set[int] = set()
        for w in new_vertices.tolist():
            nbrs = np.union1d(dg.out_neighbours(w), dg.in_neighbours(w))
            inside = nbrs[step[nbrs] <= r - 1]
            if len(inside) != 1:
                continue
            x = int(inside[0])
            to_w = _row_contains(dg.out_indptr, dg.out_indices, x, w)
            from_w = _row_contains(dg.in_indptr, dg.in_indices, x, w)
            is_bi = _row_contains(dg.bi_indptr, dg.bi_indices, x, w)
            if x in hat_o and to_w:
                hat_o_now.add(w)
            elif x in hat_i and from_w:
                hat_i_now.add(w)
            elif x in bi_ring and to_w and not is_bi:
                hat_o_now.add(w)
            elif x in bi_ring and from_w and not is_bi:
                hat_i_now.add(w)
        triples.append((len(hat_o_now), len(hat_i_now), len(bi_now)))
        reached += len(new_vertices)
        hat_o, hat_i, bi_ring = hat_o_now, hat_i_now, bi_now

    out_counts = np.bincount(d_out[d_out != UNREACHED], minlength=max_r + 1)[:max_r + 1]
    in_counts = np.bincount(d_in[d_in != UNREACHED], minlength=max_r + 1)[:max_r + 1]
    plain = tuple((int(out_counts[r]), int(in_counts[r])) for r in range(max_r + 1))
    tilde = tuple((plain[r][0] - triples[r][2], plain[r][1] - triples[r][2])
                  for r in range(max_r + 1))
    cumulative = tuple(int(np.sum(step <= r)) for r in range(max_r + 1))
    profile = RingProfile(v, max_r, "hat", tuple(triples), cumulative,
                          tilde_sizes=tilde, plain_sizes=plain)
    return profile, TriGenerationSeq(tuple(z_counts), float(m), float(theta),
                                     law="binomial", n=n)


# ---------------------------------------------------------------------------
# Gap bounds (test oracles)
# ---------------------------------------------------------------------------

def gap_bounds(kind: str, r: int, m: float, n: int | None = None,
               reached: int | None = None) -> float:
    """Closed-form expected-gap bounds for the couplings; used in test assertions.

    * ``"binomial"``: bound on E|Z_r - I_r| for the ring/binomial-branching
      coupling, ``m^{2r} (m/(m-1))^3 / n``.
    * ``"poisson"``: bound on E|Z_r - I_r| against the Poisson branching
      process, ``(m/n) * 4 m^{2r} (m/(m-1))^3`` for r >= 1, and 0 at r = 0.
    * ``"restricted"``: the restricted-graph bracket
      ``m^{2r-1}(m/(m-1))^3 + 3 r m^{3r/2} + r m^{r-1} * reached`` (the caller
      scales by m/n to bound the conditional expected gap).
    """
    if m <= 1:
        raise DomainError(f"gap bounds are stated for m > 1, got m={m}")
    if r < 0:
        raise ParameterError("r must be >= 0")
    ratio = (m / (m - 1.0)) ** 3
    if kind == "binomial":
        if n is None:
            raise ParameterError("binomial-coupling bound needs n")
        return m ** (2 * r) * ratio / n
    if kind == "poisson":
        if n is None:
            raise ParameterError("poisson-coupling bound needs n")
        if r == 0:
            return 0.0
        return (m / n) * 4.0 * m ** (2 * r) * ratio
    if kind == "restricted":
        if reached is None:
            raise ParameterError("restricted bound needs the neighbourhood size `reached`")
        if r == 0:
            return 0.0
        return m ** (2 * r - 1) * ratio + 3.0 * r * m ** (1.5 * r) + r * m ** (r - 1) * reached
    raise ParameterError(f"unknown bound kind {kind!r}")
