"""Scale parameters and Monte Carlo evaluation of the limiting tail functionals,
plus Laplace-transform and extinction-probability oracles.

The undirected tail approximant at offset u is
``E exp{ -m^{u+1} W W~ / ((m-1) chi_n^2) }`` over independent copies of the
martingale limit W; the joint directed approximant is
``E exp{ -(m0/chi_n^2) What(u1, u2, eps_n) }`` over independent copies of the
3-type limit triple.  Both are evaluated by vectorised Monte Carlo over
truncated approximants, with block-parallel evaluation over derived streams
merged in fixed block order for bit-reproducibility.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .branching import check_capacity, tri_params, tri_w_sample_batch, truncation_depth, w_sample_batch
from .errors import DomainError, NumericalError, ParameterError
from .rand_kit import RandomStream

_DEFAULT_BLOCK = 1 << 17


@dataclass(frozen=True)
class ApproxParams:
    """Derived scale quantities for a given (n, m[, theta]).

    ``base`` is the branching growth rate the depth scale is measured in: m
    for the undirected model, m0 = m(1+theta)/2 for the digraph.  ``r_n`` is
    the radius at which expected neighbourhood size is about sqrt(n), and
    ``chi_n = base^{-r_n} sqrt(n)`` lies in [1, base].  ``eps_n`` weights the
    bidirectional-overlap correction and vanishes unless
    ``m theta > sqrt(m0)``.
    """

    n: int
    m: float
    theta: float | None
    base: float
    m0: float
    m1: float | None
    gamma: float | None
    r_n: int
    chi_n: float
    eps_n: float

    @property
    def mtheta(self) -> float | None:
        return None if self.theta is None else self.m * self.theta


@dataclass(frozen=True)
class TailEstimate:
    """Monte Carlo tail-probability estimate with its standard error."""

    value: float
    std_error: float
    samples: int
    depth: int
    clamp_fraction: float = 0.0


def scale_params(n: int, m: float, theta: float | None = None) -> ApproxParams:
    """Populate (m0, m1, gamma, r_n, chi_n, eps_n) for the given model.

    Requires the relevant growth base (m undirected, m0 digraph) to exceed 1.
    """
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    if theta is None:
        base = float(m)
        if base <= 1.0:
            raise DomainError(f"undirected model needs m > 1, got m={m}")
        m0, m1, gamma = base, None, None
        eps = 0.0
    else:
        if not 0.0 <= theta <= 1.0:
            raise ParameterError(f"theta must be in [0, 1], got {theta}")
        m0, m1, mth = tri_params(m, theta)
        if m0 <= 1.0:
            raise DomainError(f"digraph model needs m0 = m(1+theta)/2 > 1, got m0={m0}")
        base = m0
        gamma = mth / m0
        eps = 0.0
    r_n = int(math.floor(0.5 * math.log(n) / math.log(base)))
    chi_n = base ** (-r_n) * math.sqrt(n)
    if theta is not None:
        mth = m * theta
        if mth > math.sqrt(m0):
            eps = (mth / m0) ** (2 * r_n)
    return ApproxParams(int(n), float(m), None if theta is None else float(theta),
                        base, float(m0), m1, gamma, r_n, chi_n, eps)


def _blocks(total: int, block: int) -> list[int]:
    sizes = [block] * (total // block)
    if total % block:
        sizes.append(total % block)
    return sizes


def _map_blocks(total: int, stream: RandomStream, worker, threads: int = 1,
                block: int = _DEFAULT_BLOCK) -> list:
    """Run ``worker(child_stream, count)`` over fixed-size blocks.

    Block layout depends only on ``total``; results are merged in block order,
    so the outcome is invariant to the thread count.
    """
    sizes = _blocks(total, block)
    children = stream.spawn(len(sizes))
    if threads <= 1 or len(sizes) == 1:
        return [worker(child, size) for child, size in zip(children, sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(worker, child, size) for child, size in zip(children, sizes)]
        return [f.result() for f in futures]


def _pooled_estimate(parts: list[tuple[int, float, float, int]], samples: int,
                     depth: int) -> TailEstimate:
    """Combine per-block (count, sum, sum of squares, clamped) into an estimate."""
    count = sum(p[0] for p in parts)
    total = sum(p[1] for p in parts)
    total_sq = sum(p[2] for p in parts)
    clamped = sum(p[3] for p in parts)
    mean = total / count
    var = max(0.0, total_sq / count - mean * mean) * count / max(1, count - 1)
    se = math.sqrt(var / count)
    return TailEstimate(min(1.0, max(0.0, mean)), se, samples, depth, clamped / count)


def undirected_tail(params: ApproxParams, u: int, samples: int,
                    depth: int | None = None, stream: RandomStream | None = None,
                    threads: int = 1) -> TailEstimate:
    """Monte Carlo value of the undirected tail approximant at offset u.

    Averages ``exp{-m^{u+1} W W~ / ((m-1) chi_n^2)}`` over independent pairs of
    truncated martingale approximants.
    """
    if u <= -2 * params.r_n:
        raise DomainError(f"u must exceed -2 r_n = {-2 * params.r_n}, got {u}")
    if stream is None:
        raise ParameterError("undirected_tail needs a stream")
    m = params.base
    if depth is None:
        depth = truncation_depth(m)
    check_capacity(m, depth)
    coeff = m ** (u + 1) / ((m - 1.0) * params.chi_n ** 2)

    def block(child: RandomStream, count: int):
        w = w_sample_batch(m, depth, count, child)
        wt = w_sample_batch(m, depth, count, child)
        x = np.exp(-coeff * w * wt)
        return count, float(x.sum()), float((x * x).sum()), 0

    parts = _map_blocks(samples, stream, block, threads=threads)
    return _pooled_estimate(parts, samples, depth)


def _w_hat_values(u1: int, u2: int, eps: float, w1, w2, w3, t1, t2, t3,
                  m0: float, mtheta: float):
    """Vectorised joint-tail exponent variable over limit-sample arrays."""
    c0 = m0 / (m0 - 1.0)
    val = (m0 ** (u1 - 1) * w1 * t2 + m0 ** (u2 - 1) * w2 * t1) * c0
    if eps > 0.0:
        c3 = mtheta / (mtheta - 1.0)
        val = val - eps * mtheta ** (min(u1, u2) - 1) * w3 * t3 * c3
    return val


def w_hat(u1: int, u2: int, eps: float, limits, tilde_limits,
          params: ApproxParams) -> float:
    """The joint-tail exponent variable for one pair of limit triples.

    ``(m0^{u1-1} W*_1 W~*_2 + m0^{u2-1} W*_2 W~*_1) m0/(m0-1)
    - eps (m theta)^{(u1 ^ u2)-1} W_3 W~_3 (m theta)/(m theta - 1)``.

    ``limits``/``tilde_limits`` are 3-type ``LimitSample`` objects or plain
    triples.  Requires ``m theta > 1`` whenever ``eps > 0``.
    """
    if params.theta is None:
        raise ParameterError("w_hat needs digraph scale parameters (theta set)")
    mtheta = params.m * params.theta
    if eps > 0.0 and mtheta <= 1.0:
        raise DomainError(f"eps > 0 needs m theta > 1, got m theta = {mtheta}")
    w = getattr(limits, "values", limits)
    t = getattr(tilde_limits, "values", tilde_limits)
    return float(_w_hat_values(u1, u2, eps, w[0], w[1], w[2], t[0], t[1], t[2],
                               params.m0, mtheta if mtheta > 0 else 1.0))


def joint_tail(params: ApproxParams, u1: int, u2: int, samples: int,
               depth: int | None = None, stream: RandomStream | None = None,
               threads: int = 1) -> TailEstimate:
    """Monte Carlo value of the joint directed tail approximant at (u1, u2).

    Averages ``exp{-(m0/chi_n^2) What(u1, u2, eps_n)}`` over independent pairs
    of truncated 3-type approximant triples.  Per-sample exponentials above 1
    (possible only when the exponent variable goes negative) are clamped to 1
    and the clamp frequency is reported.
    """
    if params.theta is None:
        raise ParameterError("joint_tail needs digraph scale parameters (theta set)")
    for name, u in (("u1", u1), ("u2", u2)):
        if u <= -2 * params.r_n:
            raise DomainError(f"{name} must exceed -2 r_n = {-2 * params.r_n}, got {u}")
    if stream is None:
        raise ParameterError("joint_tail needs a stream")
    m0 = params.m0
    mtheta = params.m * params.theta
    if depth is None:
        depth = truncation_depth(m0)
    check_capacity(m0, depth)
    scale = m0 / params.chi_n ** 2
    eps = params.eps_n

    def block(child: RandomStream, count: int):
        w1, w2, w3 = tri_w_sample_batch(params.m, params.theta, depth, count, child)
        t1, t2, t3 = tri_w_sample_batch(params.m, params.theta, depth, count, child)
        val = _w_hat_values(u1, u2, eps, w1, w2, w3, t1, t2, t3, m0,
                            mtheta if mtheta > 0 else 1.0)
        x = np.exp(-scale * val)
        clamped = int(np.sum(x > 1.0))
        np.minimum(x, 1.0, out=x)
        return count, float(x.sum()), float((x * x).sum()), clamped

    parts = _map_blocks(samples, stream, block, threads=threads)
    return _pooled_estimate(parts, samples, depth)


def undirected_tail_grid(params: ApproxParams, u_list, samples: int,
                         depth: int | None = None, stream: RandomStream | None = None,
                         threads: int = 1) -> dict[int, TailEstimate]:
    """Undirected tail at every offset in ``u_list`` from one shared W sample set.

    Common random numbers across the grid make the estimates pathwise
    nonincreasing in u and cheaper than independent calls.
    """
    m = params.base
    if depth is None:
        depth = truncation_depth(m)
    check_capacity(m, depth)
    for u in u_list:
        if u <= -2 * params.r_n:
            raise DomainError(f"u must exceed -2 r_n = {-2 * params.r_n}, got {u}")
    if stream is None:
        raise ParameterError("undirected_tail_grid needs a stream")

    def block(child: RandomStream, count: int):
        w = w_sample_batch(m, depth, count, child)
        wt = w_sample_batch(m, depth, count, child)
        prod = w * wt
        out = {}
        for u in u_list:
            coeff = m ** (u + 1) / ((m - 1.0) * params.chi_n ** 2)
            x = np.exp(-coeff * prod)
            out[u] = (count, float(x.sum()), float((x * x).sum()), 0)
        return out

    parts = _map_blocks(samples, stream, block, threads=threads)
    return {u: _pooled_estimate([p[u] for p in parts], samples, depth) for u in u_list}


def joint_tail_grid(params: ApproxParams, cells, samples: int,
                    depth: int | None = None, stream: RandomStream | None = None,
                    threads: int = 1) -> dict[tuple[int, int], TailEstimate]:
    """Joint tail at every (u1, u2) cell from one shared 3-type sample set."""
    if params.theta is None:
        raise ParameterError("joint_tail_grid needs digraph scale parameters")
    m0 = params.m0
    mtheta = params.m * params.theta
    if depth is None:
        depth = truncation_depth(m0)
    check_capacity(m0, depth)
    for u1, u2 in cells:
        for u in (u1, u2):
            if u <= -2 * params.r_n:
                raise DomainError(f"offsets must exceed -2 r_n = {-2 * params.r_n}, got {u}")
    if stream is None:
        raise ParameterError("joint_tail_grid needs a stream")
    scale = m0 / params.chi_n ** 2
    eps = params.eps_n

    def block(child: RandomStream, count: int):
        w1, w2, w3 = tri_w_sample_batch(params.m, params.theta, depth, count, child)
        t1, t2, t3 = tri_w_sample_batch(params.m, params.theta, depth, count, child)
        out = {}
        for u1, u2 in cells:
            val = _w_hat_values(u1, u2, eps, w1, w2, w3, t1, t2, t3, m0,
                                mtheta if mtheta > 0 else 1.0)
            x = np.exp(-scale * val)
            clamped = int(np.sum(x > 1.0))
            np.minimum(x, 1.0, out=x)
            out[(u1, u2)] = (count, float(x.sum()), float((x * x).sum()), clamped)
        return out

    parts = _map_blocks(samples, stream, block, threads=threads)
    return {cell: _pooled_estimate([p[cell] for p in parts], samples, depth)
            for cell in cells}


# ---------------------------------------------------------------------------
# Closed-form oracles
# ---------------------------------------------------------------------------

def extinction_prob(m: float) -> float:
    """Smallest root of q = exp(m (q-1)): the atom at zero of the martingale limit.

    Returns 1 for m <= 1; for m > 1 the root is located by bisection to 1e-10.
    """
    if m <= 0:
        raise ParameterError(f"m must be > 0, got {m}")
    if m <= 1.0:
        return 1.0
    lo, hi = 0.0, 1.0 - 1e-9
    f = lambda q: math.exp(m * (q - 1.0)) - q
    if f(hi) >= 0:
        return 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return 0.5 * (lo + hi)


def laplace_w(m: float, s: float, tol: float = 1e-9) -> float:
    """Laplace transform phi(s) = E exp(-s W) of the martingale limit (Poisson law).

    Solves the fixed-point relation ``phi(s) = exp(m (phi(s/m) - 1))`` by
    scaling s down geometrically to where a second-order expansion is accurate
    and iterating back up; the functional-equation residual is verified
    against ``tol``.
    """
    vals = laplace_w_batch(m, np.array([s], dtype=np.float64), tol=tol)
    return float(vals[0])


def _laplace_up(m: float, s: np.ndarray, levels: int) -> np.ndarray:
    """Second-order seed at argument s/m^levels, iterated back up the recursion."""
    x = s * (m ** float(-levels))
    phi = 1.0 - x + 0.5 * (m / (m - 1.0)) * x * x
    for _ in range(levels):
        phi = np.exp(m * (phi - 1.0))
    return phi


def laplace_w_batch(m: float, s: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Vectorised :func:`laplace_w` over an array of transform arguments.

    Each element is scaled down just far enough (rounding amplification along
    the up-iteration grows with the level count, so levels are per-element).
    """
    if m <= 1.0:
        raise DomainError(f"laplace_w needs m > 1, got m={m}")
    s = np.asarray(s, dtype=np.float64)
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise ParameterError("transform arguments must be finite and nonnegative")
    base = 1e-5
    log_m = math.log(m)
    levels = np.zeros(s.shape, dtype=np.int64)
    big = s > base
    if np.any(big):
        levels[big] = np.ceil(np.log(s[big] / base) / log_m).astype(np.int64)
    max_level = int(levels.max(initial=0))
    if max_level > 4000:
        raise NumericalError(f"laplace_w iteration cap exceeded for s={s.max()}")
    phi = np.empty_like(s)
    refined = np.empty_like(s)
    for k in np.unique(levels):
        sel = levels == k
        phi[sel] = _laplace_up(m, s[sel], int(k))
        refined[sel] = _laplace_up(m, s[sel], int(k) + 4)
    residual = float(np.max(np.abs(phi - refined), initial=0.0))
    if residual >= tol:
        raise NumericalError(f"laplace_w truncation residual {residual} above tol {tol}")
    return refined
