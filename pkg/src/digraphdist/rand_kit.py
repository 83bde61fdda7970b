"""Deterministic random streams and the exact discrete samplers used everywhere else.

Streams are derived from a ``(master_seed, replica_index)`` pair through numpy's
``SeedSequence`` machinery, so distinct replica indices give statistically
independent streams without any coordination, and the same pair always
reproduces the same outputs.  All samplers are exact-law: binomial/Poisson/
hypergeometric generation relies on numpy's rejection-based generators, never
on normal approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import ParameterError

_U64 = 1 << 64


@dataclass(frozen=True)
class StreamOrigin:
    master_seed: int
    replica_index: int


@dataclass
class RandomStream:
    """A self-describing deterministic generator.

    ``gen`` is the underlying ``numpy.random.Generator``; ``origin`` records the
    ``(master_seed, replica_index)`` pair the stream was derived from.  Streams
    are single-owner: never share one across concurrent tasks, derive one per
    worker instead.
    """

    gen: np.random.Generator
    origin: StreamOrigin
    seq: np.random.SeedSequence = field(repr=False)

    def spawn(self, count: int) -> list["RandomStream"]:
        """Split off ``count`` child streams, deterministically and independently."""
        children = self.seq.spawn(count)
        return [RandomStream(np.random.Generator(np.random.PCG64(c)), self.origin, c)
                for c in children]

    def bytes(self, length: int) -> bytes:
        return self.gen.bytes(length)


def derive_stream(master_seed: int, replica_index: int) -> RandomStream:
    """Derive the deterministic stream keyed by ``(master_seed, replica_index)``.

    Identical arguments always reproduce the identical output sequence, across
    process runs; distinct replica indices give independent streams.
    """
    for name, value in (("master_seed", master_seed), ("replica_index", replica_index)):
        if not isinstance(value, (int, np.integer)):
            raise ParameterError(f"{name} must be an integer, got {value!r}")
        if not 0 <= int(value) < _U64:
            raise ParameterError(f"{name} must fit in 64 bits, got {value}")
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(replica_index),))
    return RandomStream(np.random.Generator(np.random.PCG64(seq)), StreamOrigin(int(master_seed), int(replica_index)), seq)


def _check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ParameterError(f"{name} must lie in [0, 1], got {p}")
    return p


def _check_count(k: int, name: str) -> int:
    if int(k) != k or k < 0:
        raise ParameterError(f"{name} must be a nonnegative integer, got {k!r}")
    return int(k)


def sample_binomial(trials: int, p: float, stream: RandomStream) -> int:
    """One draw from Binomial(trials, p)."""
    trials = _check_count(trials, "trials")
    p = _check_probability(p)
    return int(stream.gen.binomial(trials, p))


def sample_poisson(lam: float, stream: RandomStream) -> int:
    """One draw from Poisson(lam); exact for all finite means."""
    lam = float(lam)
    if lam < 0 or not math.isfinite(lam):
        raise ParameterError(f"lambda must be finite and nonnegative, got {lam}")
    return int(stream.gen.poisson(lam))


def sample_multinomial0(trials: int, p1: float, p2: float, p3: float,
                        stream: RandomStream) -> tuple[int, int, int]:
    """One draw of the three tracked category counts of a null-padded multinomial.

    Each of ``trials`` independent trials lands in category k with probability
    ``p_k`` and in an untracked null category with the remaining probability
    ``1 - p1 - p2 - p3``.
    """
    trials = _check_count(trials, "trials")
    probs = [float(p1), float(p2), float(p3)]
    if any(q < 0 or math.isnan(q) for q in probs):
        raise ParameterError(f"probabilities must be nonnegative, got {probs}")
    total = sum(probs)
    if total > 1.0 + 1e-12:
        raise ParameterError(f"probabilities sum to {total} > 1")
    rest = max(0.0, 1.0 - total)
    draw = stream.gen.multinomial(trials, probs + [rest])
    return int(draw[0]), int(draw[1]), int(draw[2])


def sample_hypergeometric(population: int, successes: int, draws: int,
                          stream: RandomStream) -> int:
    """One draw from Hypergeometric(population, successes, draws).

    Counts the successes in a uniform without-replacement sample of ``draws``
    items from a population containing ``successes`` marked items.
    """
    population = _check_count(population, "population")
    successes = _check_count(successes, "successes")
    draws = _check_count(draws, "draws")
    if successes > population:
        raise ParameterError(f"successes={successes} exceeds population={population}")
    if draws > population:
        raise ParameterError(f"draws={draws} exceeds population={population}")
    if draws == 0 or successes == 0:
        return 0
    return int(stream.gen.hypergeometric(successes, population - successes, draws))


def sample_binomial_coupled(trials: int, p_low: float, p_high: float,
                            stream: RandomStream, size: int | None = None):
    """Monotone-coupled binomial pair(s) from one shared uniform per draw.

    Inverse-transform from a common uniform guarantees the pathwise ordering
    ``low <= high`` whenever ``p_low <= p_high``.
    """
    trials = _check_count(trials, "trials")
    p_low = _check_probability(p_low, "p_low")
    p_high = _check_probability(p_high, "p_high")
    u = stream.gen.random(size) if size is not None else stream.gen.random()
    low = stats.binom.ppf(u, trials, p_low)
    high = stats.binom.ppf(u, trials, p_high)
    if size is None:
        return int(low), int(high)
    return low.astype(np.int64), high.astype(np.int64)


def sample_poisson_coupled(lam_low: float, lam_high: float,
                           stream: RandomStream, size: int | None = None):
    """Monotone-coupled Poisson pair(s) by inverse transform from shared uniforms."""
    for name, lam in (("lam_low", lam_low), ("lam_high", lam_high)):
        if lam < 0 or not math.isfinite(lam):
            raise ParameterError(f"{name} must be finite and nonnegative, got {lam}")
    u = stream.gen.random(size) if size is not None else stream.gen.random()
    low = stats.poisson.ppf(u, lam_low)
    high = stats.poisson.ppf(u, lam_high)
    if size is None:
        return int(low), int(high)
    return low.astype(np.int64), high.astype(np.int64)
