"""
Sampling exchangeable binary sequences, and Monte Carlo checks of the probability that the
frequency over n trials falls in an interval.

Sequences are drawn through the predictive route: after r successes and s failures the next trial
succeeds with probability Δ^s a_{r+1} / Δ^s a_r, which works for truncated moment sequences as well
as atomic mixtures. Atomic mixtures can also be drawn in two stages (pick an atom, then flip).

Randomness comes from numpy's Philox4x64-10 counter-based generator. Trials
are split into chunks of CHUNK_SIZE sequences and chunk k always uses the stream
SeedSequence(seed, spawn_key=(k,)), so a run depends on the seed and never on how many workers
process the chunks.
"""
import logging
import math

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np

from pydantic import BaseModel, ConfigDict
from scipy.special import logsumexp
from scipy.stats import chisquare

from phenocalc.src.config import settings
from phenocalc.src.errors import InvalidArgument, NotAtomic
from phenocalc.src.limitdist import interval_probability, read_point
from phenocalc.src.moments import check_float_resolution, difference_table
from phenocalc.src.occupancy import occupancy_row
from phenocalc.src.primitives.phenomenon import AtomicMixture, Phenomenon
from phenocalc.src.primitives.scalar import binomial, to_json_value

logger = logging.getLogger(__name__)

Method = Literal["predictive", "two-stage"]


class SampleRun(BaseModel):
    """Success counts of `sequences` independent sequences of `length` trials each."""

    model_config = ConfigDict(frozen=True)

    seed: int
    length: int
    sequences: int
    method: Method = "predictive"
    results: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "n": self.length,
            "sequences": self.sequences,
            "method": self.method,
            "results": list(self.results),
        }


class MonteCarloReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    seed: int
    n: int
    trials: int
    xi1: Any
    xi2: Any
    hits: int
    empirical: float
    exact: Any
    stderr: float

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.empirical == float(self.exact) else math.inf
        return (self.empirical - float(self.exact)) / self.stderr

    def within(self, standard_errors: float = 3.0) -> bool:
        return abs(self.z_score) <= standard_errors

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "n": self.n,
            "trials": self.trials,
            "xi1": to_json_value(self.xi1),
            "xi2": to_json_value(self.xi2),
            "hits": self.hits,
            "empirical": self.empirical,
            "exact": to_json_value(self.exact),
            "stderr": self.stderr,
        }


class PatternFrequency(BaseModel):
    model_config = ConfigDict(frozen=True)

    pattern: str
    successes: int
    expected: float
    empirical: float
    z_score: float


class ExchangeabilityReport(BaseModel):
    """
    Observed frequency of every 0/1 pattern of length n against ω_h^(n) / C(n, h), plus, for each
    success count h, a chi-square test that the C(n, h) orderings occur equally often.
    """

    model_config = ConfigDict(frozen=True)

    seed: int
    n: int
    trials: int
    patterns: List[PatternFrequency]
    class_p_values: Dict[int, float]

    @property
    def max_abs_z(self) -> float:
        return max(abs(p.z_score) for p in self.patterns)

    def passes(self, z_limit: float = 4.0, p_threshold: float = 0.001) -> bool:
        return self.max_abs_z <= z_limit and all(p >= p_threshold for p in self.class_p_values.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "n": self.n,
            "trials": self.trials,
            "patterns": [p.model_dump() for p in self.patterns],
            "class_p_values": {str(h): p for h, p in self.class_p_values.items()},
        }


def stream(seed: int, index: int) -> np.random.Generator:
    """Generator for chunk `index` of a run seeded with `seed`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def predictive_table(ph: Phenomenon, n: int) -> np.ndarray:
    """
    table[r, s] = probability that the next trial succeeds after r successes and s failures, for
    r + s < n. States the phenomenon cannot reach hold 0.
    """
    if n < 0:
        raise InvalidArgument(f"Sequence length must be nonnegative, got {n}.")
    table = np.zeros((max(n, 1), max(n, 1)))
    if n == 0:
        return table
    if isinstance(ph, AtomicMixture):
        points = np.array([float(p) for p in ph.points])
        weights = np.array([float(w) for w in ph.weights])
        counts = np.arange(n)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_p, log_q = np.log(points), np.log1p(-points)
            # 0 * log 0 counts as 0
            success_part = np.where(counts[:, None] == 0, 0.0, counts[:, None] * log_p[None, :])
            failure_part = np.where(counts[:, None] == 0, 0.0, counts[:, None] * log_q[None, :])
            logits = np.log(weights)[None, None, :] + success_part[:, None, :] + failure_part[None, :, :]
            numerator = logsumexp(logits + log_p[None, None, :], axis=-1)
            denominator = logsumexp(logits, axis=-1)
            table = np.exp(numerator - denominator)
        table = np.nan_to_num(table, nan=0.0)
    else:
        ph.require_depth(n)
        check_float_resolution(ph, n)
        differences = difference_table(ph, n)
        for r in range(n):
            for s in range(n - r):
                below = differences[s][r]
                if below > 0:
                    table[r, s] = float(differences[s][r + 1] / below)
    return table


def _draw(table: np.ndarray, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Bits of `size` sequences, drawn trial by trial from the predictive table."""
    bits = np.zeros((size, n), dtype=np.int8)
    successes = np.zeros(size, dtype=np.int64)
    for t in range(n):
        probability = table[successes, t - successes]
        outcome = rng.random(size) < probability
        bits[:, t] = outcome
        successes += outcome
    return bits


def _draw_two_stage(ph: AtomicMixture, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    points = np.array([float(p) for p in ph.points])
    weights = np.array([float(w) for w in ph.weights])
    chosen = rng.choice(points, size=size, p=weights / weights.sum())
    return (rng.random((size, n)) < chosen[:, None]).astype(np.int8)


def sample_sequence(ph: Phenomenon, n: int, rng: Optional[np.random.Generator] = None) -> List[bool]:
    """One exchangeable sequence of n trials."""
    rng = stream(settings.seed, 0) if rng is None else rng
    return [bool(b) for b in _draw(predictive_table(ph, n), n, 1, rng)[0]]


def _chunks(trials: int) -> List[Tuple[int, int]]:
    size = settings.chunk_size
    return [(k, min(size, trials - k * size)) for k in range(math.ceil(trials / size))]


def sample_bits(ph: Phenomenon, n: int, trials: int, seed: Optional[int] = None, method: Method = "predictive",
                workers: Optional[int] = None) -> np.ndarray:
    """
    Bits of `trials` sequences as a (trials, n) array. Chunks run on a thread pool and are
    concatenated in chunk order.
    """
    if trials < 1:
        raise InvalidArgument(f"Need at least one sequence, got {trials}.")
    seed = settings.seed if seed is None else seed
    workers = settings.max_workers if workers is None else workers
    if method == "two-stage":
        if not isinstance(ph, AtomicMixture):
            raise NotAtomic("Two-stage sampling draws an atom first, so it needs an atomic mixture.")

        def run(chunk):
            return _draw_two_stage(ph, n, chunk[1], stream(seed, chunk[0]))
    else:
        table = predictive_table(ph, n)

        def run(chunk):
            return _draw(table, n, chunk[1], stream(seed, chunk[0]))

    chunks = _chunks(trials)
    logger.info(f"Sampling {trials} sequences of length {n} in {len(chunks)} chunks with seed {seed}.")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run, chunks))
    return np.concatenate(parts, axis=0)


def sample_run(ph: Phenomenon, n: int, trials: int, seed: Optional[int] = None, method: Method = "predictive",
               workers: Optional[int] = None) -> SampleRun:
    seed = settings.seed if seed is None else seed
    bits = sample_bits(ph, n, trials, seed, method, workers)
    return SampleRun(seed=seed, length=n, sequences=trials, method=method, results=tuple(int(c) for c in bits.sum(axis=1)))


def monte_carlo_theorem1(ph: Phenomenon, n: int, trials: int, xi1, xi2, seed: Optional[int] = None,
                         workers: Optional[int] = None) -> MonteCarloReport:
    """
    Fraction of sampled sequences whose frequency lies in (ξ1, ξ2], against the exact probability
    of that event over n trials. The standard error is sqrt(q (1 - q) / T) with q the exact value.
    """
    xi1, xi2 = read_point(xi1), read_point(xi2)
    if xi1 >= xi2:
        raise InvalidArgument(f"Need xi1 < xi2, got {xi1} and {xi2}.")
    if trials < 1:
        raise InvalidArgument(f"Need at least one trial, got {trials}.")
    ph.require_depth(n)
    run = sample_run(ph, n, trials, seed, workers=workers)
    counts = np.array(run.results)
    inside = np.array([n * xi1 < h <= n * xi2 for h in range(n + 1)])
    hits = int(np.count_nonzero(inside[counts]))
    exact = interval_probability(ph, xi1, xi2, n)
    q = float(exact)
    return MonteCarloReport(
        seed=run.seed,
        n=n,
        trials=trials,
        xi1=xi1,
        xi2=xi2,
        hits=hits,
        empirical=hits / trials,
        exact=exact,
        stderr=math.sqrt(max(q * (1 - q), 0.0) / trials),
    )


def exchangeability_check(ph: Phenomenon, n: int, trials: int, seed: Optional[int] = None,
                          method: Method = "predictive", workers: Optional[int] = None) -> ExchangeabilityReport:
    if n < 1 or n > 12:
        raise InvalidArgument(f"Pattern tables are built for 1 <= n <= 12, got {n}.")
    seed = settings.seed if seed is None else seed
    bits = sample_bits(ph, n, trials, seed, method, workers)
    codes = bits.astype(np.int64) @ (1 << np.arange(n - 1, -1, -1))
    observed = np.bincount(codes, minlength=2 ** n)
    row = occupancy_row(ph, n)

    patterns = []
    by_class: Dict[int, List[int]] = {}
    for code in range(2 ** n):
        pattern = format(code, f"0{n}b")
        h = pattern.count("1")
        q = float(row[h]) / binomial(n, h)
        spread = math.sqrt(q * (1 - q) / trials)
        empirical = observed[code] / trials
        if spread > 0:
            z = (empirical - q) / spread
        else:
            z = 0.0 if empirical == q else math.inf
        patterns.append(PatternFrequency(pattern=pattern, successes=h, expected=q, empirical=float(empirical), z_score=float(z)))
        by_class.setdefault(h, []).append(int(observed[code]))

    class_p_values = {}
    for h, counts in by_class.items():
        if len(counts) > 1 and sum(counts) > 0:
            class_p_values[h] = float(chisquare(counts).pvalue)
    return ExchangeabilityReport(seed=seed, n=n, trials=trials, patterns=patterns, class_p_values=class_p_values)
