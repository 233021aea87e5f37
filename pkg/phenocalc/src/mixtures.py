"""
Building phenomena from causes: atomic mixtures, the constant and uniform phenomena, independent
products, mixtures of hypotheses, posterior probabilities of hypotheses and their limits, and the
two-hypothesis urn scenario.
"""
import logging
import math

from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, Union

import mpmath

from pydantic import BaseModel, ConfigDict

from phenocalc.src.config import settings
from phenocalc.src.errors import (
    DepthExceeded,
    ImpossibleEvidence,
    InvalidArgument,
    InvalidUrnGeometry,
    MixedBackend,
    NotAtomic,
)
from phenocalc.src.operators import bracket, condition_evidence
from phenocalc.src.primitives.evidence import EvidenceCount
from phenocalc.src.primitives.hypotheses import HypothesisModel
from phenocalc.src.primitives.phenomenon import AtomicMixture, MomentSequence, Phenomenon, tolerance_for
from phenocalc.src.primitives.scalar import EXACT, FLOAT, Backend, Scalar, binomial, coerce, parse_scalar, zero

logger = logging.getLogger(__name__)

Frequency = Union[Fraction, float, int, str]


class PosteriorStep(BaseModel):
    """Posterior of every hypothesis after the first `step` draws, and the chance the next draw succeeds."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    step: int
    outcome: Optional[bool]
    evidence: EvidenceCount
    posteriors: Tuple[Tuple[str, Any], ...]
    predictive: Any

    def weight(self, label: str) -> Scalar:
        return dict(self.posteriors)[label]


class LimitThreshold(BaseModel):
    """Frequency at which the dominant atom switches from `lower` to `upper`."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lower: Any
    upper: Any
    frequency: float


def atomic_mixture(atoms: Sequence, backend: Optional[Backend] = None) -> AtomicMixture:
    """ψ(t) = Σ λ_i e^{i p_i t}: atoms given as (p, weight) pairs or {"p", "weight"} dicts."""
    return AtomicMixture(atoms=tuple(atoms), backend=backend)


def constant_phenomenon(p, backend: Optional[Backend] = None) -> AtomicMixture:
    """Probability p, known and the same in every trial: ψ(t) = e^{ipt}."""
    if backend is None:
        backend = FLOAT if isinstance(p, float) else EXACT
    return AtomicMixture(atoms=((p, 1),), backend=backend)


def uniform_phenomenon(depth: Optional[int] = None, backend: Backend = EXACT) -> MomentSequence:
    """All frequencies equally likely: ω_h^(h) = 1/(h+1), truncated at `depth`."""
    depth = settings.depth if depth is None else depth
    if depth < 0:
        raise InvalidArgument(f"Depth must be nonnegative, got {depth}.")
    if backend == EXACT:
        values = [Fraction(1, h + 1) for h in range(depth + 1)]
    else:
        values = [1.0 / (h + 1) for h in range(depth + 1)]
    return MomentSequence.trusted(values, backend, family="uniform")


def uniform_grid_phenomenon(points: int, backend: Backend = EXACT) -> AtomicMixture:
    """Atomic stand-in for the uniform phenomenon: equal weights at k/(points-1)."""
    if points < 2:
        raise InvalidArgument(f"A grid needs at least two points, got {points}.")
    atoms = [(Fraction(k, points - 1), Fraction(1, points)) for k in range(points)]
    if backend == FLOAT:
        atoms = [(float(p), float(w)) for p, w in atoms]
    return AtomicMixture.trusted(atoms, backend)


def _common_backend(phenomena: Sequence[Phenomenon]) -> Backend:
    backends = {ph.backend for ph in phenomena}
    if len(backends) > 1:
        raise MixedBackend("Cannot combine exact and float phenomena.")
    return backends.pop()


def product_independent(*phenomena: Phenomenon) -> Phenomenon:
    """
    The event that independent phenomena all succeed: moments multiply index-wise (a_h b_h ...).
    Atomic factors multiply atoms and weights; with a moment factor the result is a moment
    sequence as deep as the shallowest factor.
    """
    if not phenomena:
        raise InvalidArgument("A product needs at least one phenomenon.")
    backend = _common_backend(phenomena)
    if all(isinstance(ph, AtomicMixture) for ph in phenomena):
        atoms = [(1, 1)] if backend == EXACT else [(1.0, 1.0)]
        for ph in phenomena:
            atoms = [(p * q, w * v) for p, w in atoms for q, v in ph.atoms]
        return AtomicMixture.trusted([(coerce(p, backend), coerce(w, backend)) for p, w in atoms], backend)
    depth = min(ph.depth for ph in phenomena if ph.depth is not None)
    values = []
    for h in range(depth + 1):
        value = phenomena[0].moment(h)
        for ph in phenomena[1:]:
            value = value * ph.moment(h)
        values.append(value)
    return MomentSequence.trusted(values, backend)


def mixture_of_hypotheses(model: HypothesisModel, depth: Optional[int] = None) -> Phenomenon:
    """
    ψ = λ_1 ψ^(1) + ... + λ_m ψ^(m). All-atomic models give an atomic mixture; otherwise the
    moments are mixed up to `depth` (default: the shallowest component).
    """
    backend = model.backend
    components = model.components
    if all(isinstance(c.phenomenon, AtomicMixture) for c in components) and depth is None:
        return AtomicMixture.trusted([(p, c.prior * w) for c in components for p, w in c.phenomenon.atoms], backend)
    depths = [c.phenomenon.depth for c in components if c.phenomenon.depth is not None]
    available = min(depths) if depths else None
    if depth is None:
        depth = available
    elif available is not None and depth > available:
        raise DepthExceeded(depth, available)
    values = [sum((c.prior * c.phenomenon.moment(h) for c in components), zero(backend)) for h in range(depth + 1)]
    return MomentSequence.trusted(values, backend)


def _likelihoods(model: HypothesisModel, ev: EvidenceCount) -> List[Scalar]:
    return [c.prior * bracket(c.phenomenon, ev.r, ev.total) for c in model.components]


def hypothesis_posterior(model: HypothesisModel, ev: EvidenceCount) -> List[Tuple[str, Scalar]]:
    """
    Probability of each cause after the evidence:
    λ_i [r over r+s] ψ^(i) / [r over r+s] ψ, where the denominator is the mixture's bracket.
    """
    likelihoods = _likelihoods(model, ev)
    total = sum(likelihoods, zero(model.backend))
    if total <= 0:
        raise ImpossibleEvidence(ev.r, ev.s)
    return [(label, l / total) for label, l in zip(model.labels, likelihoods)]


def urn_scenario(N: int, H: int, n: int, alpha, beta, backend: Backend = EXACT) -> HypothesisModel:
    """
    An urn of n balls filled from N = c n balls (c > 1 an integer), H of them white. Hypothesis
    "a": the n balls were drawn at random, so the urn holds l white balls with hypergeometric
    probability C(H, l) C(N-H, n-l) / C(N, n). Hypothesis "b": the proportion H/N was kept.
    Draws are with replacement, so each hypothesis gives an atomic phenomenon.
    """
    if n < 1 or N <= n or N % n != 0:
        raise InvalidUrnGeometry(f"N={N} must be an integer multiple c*n of n={n} with c > 1.")
    if H < 0 or H > N:
        raise InvalidUrnGeometry(f"H={H} white balls cannot come from N={N}.")
    if (H * n) % N != 0:
        raise InvalidUrnGeometry(f"H*n/N = {H}*{n}/{N} is not an integer.")
    alpha, beta = parse_scalar(alpha, backend), parse_scalar(beta, backend)
    if alpha <= 0 or beta <= 0 or abs(alpha + beta - 1) > tolerance_for(backend):
        raise InvalidUrnGeometry(f"Priors alpha={alpha}, beta={beta} must be positive and sum to 1.")

    total = binomial(N, n)
    random_choice = [(Fraction(l, n), Fraction(binomial(H, l) * binomial(N - H, n - l), total)) for l in range(n + 1)]
    kept_proportion = Fraction(H, N)
    if backend == FLOAT:
        random_choice = [(float(p), float(w)) for p, w in random_choice]
        kept_proportion = float(kept_proportion)
    logger.debug(f"Urn scenario N={N}, H={H}, n={n}: random-choice atoms {random_choice}.")
    return HypothesisModel.from_pairs([
        ("a", AtomicMixture.trusted(random_choice, backend), alpha),
        ("b", constant_phenomenon(kept_proportion, backend), beta),
    ])


def posterior_trajectory(model: HypothesisModel, outcomes: Sequence[bool]) -> List[PosteriorStep]:
    """
    Posterior of every hypothesis along a stream of draws. Entry 0 is the prior; entry k follows
    the first k draws and equals hypothesis_posterior at the cumulative counts. Each step
    reweights the hypotheses by their own predictive probability of the observed outcome.
    """
    backend = model.backend
    phenomena = [c.phenomenon for c in model.components]
    weights = list(model.priors)
    evidence = EvidenceCount()
    steps = []
    for step in range(len(outcomes) + 1):
        outcome = outcomes[step - 1] if step > 0 else None
        if outcome is not None:
            likes = [w * (ph.moment(1) if outcome else 1 - ph.moment(1)) for w, ph in zip(weights, phenomena)]
            total = sum(likes, zero(backend))
            evidence = evidence.add(outcome)
            if total <= 0:
                raise ImpossibleEvidence(evidence.r, evidence.s)
            weights = [l / total for l in likes]
            single = EvidenceCount(r=1, s=0) if outcome else EvidenceCount(r=0, s=1)
            phenomena = [condition_evidence(ph, single) if w > 0 else ph for w, ph in zip(weights, phenomena)]
        predictive = sum((w * ph.moment(1) for w, ph in zip(weights, phenomena)), zero(backend))
        steps.append(PosteriorStep(
            step=step,
            outcome=outcome,
            evidence=evidence,
            posteriors=tuple(zip(model.labels, weights)),
            predictive=predictive,
        ))
    logger.info(f"Posterior trajectory over {len(outcomes)} draws, evidence ({evidence.r}, {evidence.s}).")
    return steps


def _require_atomic(model: HypothesisModel) -> List[AtomicMixture]:
    components = [c.phenomenon for c in model.components]
    if not all(isinstance(ph, AtomicMixture) for ph in components):
        raise NotAtomic("Posterior limits need every hypothesis to be an atomic mixture.")
    return components


def _read_frequency(f: Frequency):
    if isinstance(f, str):
        f = parse_scalar(f)
    if isinstance(f, int):
        f = Fraction(f)
    if f < 0 or f > 1:
        raise InvalidArgument(f"A frequency lies in [0, 1], got {f}.")
    return f


def dominant_atoms(points: Sequence[Scalar], f: Frequency) -> List[Scalar]:
    """
    Atoms with the largest log-likelihood rate f log p + (1 - f) log(1 - p) (0 log 0 = 0), i.e.
    those that keep posterior mass as the number of draws at frequency f grows.

    Rational f with a small denominator a/b is compared exactly through p^a (1-p)^(b-a); every
    other case goes through mpmath with the configured tie tolerance.
    """
    f = _read_frequency(f)
    points = list(points)
    exact_points = all(isinstance(p, Fraction) for p in points)
    if isinstance(f, Fraction) and exact_points and f.denominator <= settings.exact_rate_max_denominator:
        a, b = f.numerator, f.denominator
        keys = [p ** a * (1 - p) ** (b - a) for p in points]
        best = max(keys)
        return [p for p, key in zip(points, keys) if key == best]

    with mpmath.workdps(settings.limit_precision_digits):
        mf = mpmath.mpf(f.numerator) / f.denominator if isinstance(f, Fraction) else mpmath.mpf(f)
        rates = []
        for p in points:
            mp = mpmath.mpf(p.numerator) / p.denominator if isinstance(p, Fraction) else mpmath.mpf(p)
            rate = mpmath.mpf(0)
            if mf > 0:
                rate += mf * mpmath.log(mp) if mp > 0 else mpmath.ninf
            if mf < 1:
                rate += (1 - mf) * mpmath.log(1 - mp) if mp < 1 else mpmath.ninf
            rates.append(rate)
        best = max(rates)
        if best == mpmath.ninf:
            # only the atoms 0 and 1 are present and f is strictly between them
            return points
        return [p for p, rate in zip(points, rates) if rate != mpmath.ninf and best - rate <= settings.tie_tolerance]


def posterior_limit(model: HypothesisModel, f: Frequency) -> List[Tuple[str, Scalar]]:
    """
    Limit of the hypothesis posteriors as the number of draws grows with frequency f. Mass
    concentrates on the dominant atoms; hypothesis i keeps λ_i times its own weight on them,
    renormalized across hypotheses.
    """
    components = _require_atomic(model)
    all_points = sorted({p for ph in components for p in ph.points})
    winners = set(dominant_atoms(all_points, f))
    kept = [
        c.prior * sum((w for p, w in ph.atoms if p in winners), zero(model.backend))
        for c, ph in zip(model.components, components)
    ]
    total = sum(kept, zero(model.backend))
    logger.debug(f"Dominant atoms at f={f}: {sorted(winners)}.")
    return [(label, k / total) for label, k in zip(model.labels, kept)]


def limit_thresholds(model: HypothesisModel) -> List[LimitThreshold]:
    """
    Frequencies where the dominant atom changes. Between consecutive atoms p1 < p2 the switch is at
    log((1-p1)/(1-p2)) / log(p2(1-p1) / (p1(1-p2))); the atoms 0 and 1 dominate only at f = 0, 1.
    """
    components = _require_atomic(model)
    points = sorted({p for ph in components for p in ph.points})
    thresholds = []
    for p1, p2 in zip(points, points[1:]):
        if p1 == 0:
            frequency = 0.0
        elif p2 == 1:
            frequency = 1.0
        else:
            frequency = math.log((1 - p1) / (1 - p2)) / math.log(p2 * (1 - p1) / (p1 * (1 - p2)))
        thresholds.append(LimitThreshold(lower=p1, upper=p2, frequency=frequency))
    return thresholds


def near_threshold(model: HypothesisModel, f: Frequency, tolerance: Optional[float] = None) -> Optional[LimitThreshold]:
    """The threshold within `tolerance` of f, if any: there a float f cannot settle the tie."""
    tolerance = settings.near_tie_tolerance if tolerance is None else tolerance
    f = float(_read_frequency(f))
    for threshold in limit_thresholds(model):
        if abs(threshold.frequency - f) <= tolerance:
            return threshold
    return None
