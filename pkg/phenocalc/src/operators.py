"""
Operator algebra on phenomena.

K (complement) swaps success and failure. R and S condition on one observed success or failure;
after r successes and s failures, in any order, the phenomenon becomes R^r S^s. Every operator is
a distributive map followed by U, the normalization that restores ψ(0) = 1.

The differentiation operator D that the derivation works with has no value of its own here: on
coefficients it is a shift by one, and that shift is what the conditioning formulas below apply.
"""
import logging

from fractions import Fraction
from typing import List, Sequence

from phenocalc.src.errors import ImpossibleEvidence, IndexOutOfRange
from phenocalc.src.moments import difference_table
from phenocalc.src.occupancy import occupancy_probability
from phenocalc.src.primitives.evidence import EvidenceCount
from phenocalc.src.primitives.phenomenon import AtomicMixture, MomentSequence, Phenomenon
from phenocalc.src.primitives.scalar import Scalar, binomial

logger = logging.getLogger(__name__)


def normalize(coefficients: Sequence[Scalar]) -> List[Scalar]:
    """U: divides a coefficient sequence by its value at zero."""
    if coefficients[0] == 0:
        raise ZeroDivisionError("Cannot normalize a sequence whose leading coefficient is zero.")
    return [c / coefficients[0] for c in coefficients]


def complement(ph: Phenomenon) -> Phenomenon:
    """
    K: the phenomenon of the complementary event. Atoms reflect p -> 1 - p; moments become
    ω_0^(h) = Δ^h a_0, which uses no extra depth. K is an involution.
    """
    if isinstance(ph, AtomicMixture):
        return AtomicMixture.trusted([(1 - p, w) for p, w in ph.atoms], ph.backend)
    table = difference_table(ph, ph.depth)
    return MomentSequence.trusted([table[h][0] for h in range(ph.depth + 1)], ph.backend, family=ph.family)


def condition_evidence(ph: Phenomenon, ev: EvidenceCount) -> Phenomenon:
    """
    R^r S^s: the phenomenon after r successes and s failures.

    Atoms are reweighted by λ_i p_i^r (1 - p_i)^s. Moments become Δ^s a_{r+h} / Δ^s a_r, which
    consumes r + s orders of depth.
    """
    r, s = ev.r, ev.s
    if isinstance(ph, AtomicMixture):
        likelihoods = [(p, w * p ** r * (1 - p) ** s) for p, w in ph.atoms]
        total = sum(l for _, l in likelihoods)
        if total == 0:
            logger.debug(f"Evidence ({r}, {s}) impossible for atoms {ph.points}.")
            raise ImpossibleEvidence(r, s)
        return AtomicMixture.trusted([(p, l / total) for p, l in likelihoods], ph.backend)

    ph.require_depth(r + s)
    level = difference_table(ph, ph.depth)[s]
    shifted = level[r:]
    if shifted[0] <= 0:
        logger.debug(f"Evidence ({r}, {s}) impossible for a moment sequence of depth {ph.depth}.")
        raise ImpossibleEvidence(r, s)
    return MomentSequence.trusted(normalize(shifted), ph.backend)


def condition_success(ph: Phenomenon) -> Phenomenon:
    """R = UD: coefficients ω_{h+1}^(h+1) / ω_1^(1)."""
    return condition_evidence(ph, EvidenceCount(r=1, s=0))


def condition_failure(ph: Phenomenon) -> Phenomenon:
    """S = U(i - D): coefficients (ω_h^(h) - ω_{h+1}^(h+1)) / (1 - ω_1^(1))."""
    return condition_evidence(ph, EvidenceCount(r=0, s=1))


def bracket(ph: Phenomenon, h: int, n: int) -> Scalar:
    """[h over n] ψ = ω_h^(n). In particular [n over n] ψ = ω_n^(n)."""
    return occupancy_probability(ph, n, h)


def conditional_occupancy(ph: Phenomenon, ev: EvidenceCount, n: int, h: int) -> Scalar:
    """
    Probability of h successes in the next n trials after the evidence, by the closed form

        C(h+r, r) C(n-h+s, s) / C(n+r+s, n) * [h+r over n+r+s] ψ / [r over r+s] ψ

    which needs depth n + r + s but never builds the conditioned phenomenon.
    """
    r, s = ev.r, ev.s
    if n < 0 or h < 0 or h > n:
        raise IndexOutOfRange(f"Need 0 <= h <= n, got h={h}, n={n}.")
    ph.require_depth(n + r + s)
    evidence_probability = bracket(ph, r, r + s)
    if evidence_probability <= 0:
        raise ImpossibleEvidence(r, s)
    ratio = Fraction(binomial(h + r, r) * binomial(n - h + s, s), binomial(n + r + s, n))
    if ph.backend == "float":
        ratio = float(ratio)
    return ratio * bracket(ph, h + r, n + r + s) / evidence_probability


def predictive_probability(ph: Phenomenon, ev: EvidenceCount) -> Scalar:
    """Probability that trial r+s+1 succeeds given r successes and s failures."""
    return conditional_occupancy(ph, ev, 1, 1)
