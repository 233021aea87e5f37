"""
All-success probability sequences ω_0^(0) = 1, ω_1^(1), ω_2^(2), ... and their finite differences.

The sequence of a random phenomenon is the moment sequence of its mixing measure on [0, 1], so it
must be completely monotone: Δ^j a_h >= 0 for every available h + j, where Δa_h = a_h - a_{h+1}.
"""
import logging

from fractions import Fraction
from typing import List, Optional, Sequence

from scipy.special import comb

from phenocalc.src.config import settings
from phenocalc.src.errors import DepthExceeded, IndexOutOfRange, PrecisionLost
from phenocalc.src.primitives.phenomenon import HALF_ULP, MomentSequence, Phenomenon
from phenocalc.src.primitives.scalar import EXACT, Backend, Scalar, binomial

logger = logging.getLogger(__name__)


def new_moment_sequence(values: Sequence, backend: Optional[Backend] = None) -> MomentSequence:
    """
    Validates a list of moments to its full depth.

    Raises NotAProbability, NotUnitAtZero or NotCompletelyMonotone (with the (h, j) witness).
    """
    return MomentSequence(values=tuple(values), backend=backend)


def finite_difference(ph: Phenomenon, order: int, index: int) -> Scalar:
    """Δ^j a_h = Σ_{i=0}^{j} (-1)^i C(j, i) a_{h+i}."""
    if order < 0 or index < 0:
        raise IndexOutOfRange(f"Order and index must be nonnegative, got j={order}, h={index}.")
    if ph.depth is not None and index + order > ph.depth:
        raise DepthExceeded(index + order, ph.depth)
    total = Fraction(0)
    for i in range(order + 1):
        term = binomial(order, i) * _exact_moment(ph, index + i)
        total = total - term if i % 2 else total + term
    return total if ph.backend == EXACT else float(total)


def _exact_moment(ph: Phenomenon, h: int) -> Fraction:
    if getattr(ph, "family", None) == "uniform":
        return Fraction(1, h + 1)
    return Fraction(ph.moment(h))


def mixing_moment(ph: Phenomenon, m: int) -> Scalar:
    """The m-th moment of the limiting frequency, i.e. the probability that m trials all succeed."""
    return ph.moment(m)


def _differences(values: List[Scalar]) -> List[List[Scalar]]:
    table = [values]
    for _ in range(len(values) - 1):
        previous = table[-1]
        table.append([previous[h] - previous[h + 1] for h in range(len(previous) - 1)])
    return table


def rounding_bound(values: Sequence[float]) -> List[float]:
    """
    bound[m] bounds the error on any ω_h^(m) computed from float moments that each carry half an
    ulp of relative error: C(m, h) Σ_i C(m-h, i) ε a_{h+i}, maximised over h.
    """
    level = [HALF_ULP * abs(float(v)) for v in values]
    bound = [0.0] * len(values)
    for j in range(len(values)):
        for h, e in enumerate(level):
            bound[h + j] = max(bound[h + j], float(comb(h + j, h)) * e)
        level = [level[h] + level[h + 1] for h in range(len(level) - 1)]
    return bound


def check_float_resolution(ph: Phenomenon, n: int):
    """
    Raises PrecisionLost at the first order m <= n whose occupancy probabilities could move by more
    than the float tolerance under input rounding. Exact and uniform phenomena always pass.
    """
    if ph.backend == EXACT or getattr(ph, "family", None) == "uniform":
        return
    for m, bound in enumerate(rounding_bound(ph.moments(n))):
        if bound > settings.float_tolerance:
            logger.debug(f"Float moments lose resolution at order {m}, bound {bound}.")
            raise PrecisionLost(m, bound)


def difference_table(ph: Phenomenon, n: int) -> List[List[Scalar]]:
    """
    table[j][h] = Δ^j a_h for every h + j <= n, built level by level with
    Δ^{j+1} a_h = Δ^j a_h - Δ^j a_{h+1}.

    Float moments are differenced exactly as rationals and rounded once at the end; the uniform
    family uses its exact moments 1/(h+1). Callers that scale entries by binomials run
    check_float_resolution first.
    """
    values = ph.moments(n)
    if ph.backend == EXACT:
        table = _differences(values)
    else:
        exact = [_exact_moment(ph, h) for h in range(n + 1)]
        table = [[float(v) for v in level] for level in _differences(exact)]
    logger.debug(f"Built difference table of size {n} for a {ph.backend} phenomenon.")
    return table
