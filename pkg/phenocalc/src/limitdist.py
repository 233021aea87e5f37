"""
The limiting distribution Φ of the frequency x_n / n: its finite-n approximations, exact
evaluation for atomic and uniform phenomena, the complement and conditioning transforms acting on
Φ, convergence of the moments of the frequency, and concentration under repeated evidence.

Every distribution function here puts half of an atom's mass at the atom itself, so
Φ(p) = 1/2 for the constant phenomenon p and Φ_n(h) = (h + 1/2) / (n + 1) for the uniform one.
"""
import logging
import warnings

from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict

from phenocalc.src.config import settings
from phenocalc.src.errors import HypothesisViolated, IndexOutOfRange, InvalidArgument, NotAtomic
from phenocalc.src.occupancy import occupancy_row
from phenocalc.src.operators import condition_evidence
from phenocalc.src.primitives.evidence import EvidenceCount
from phenocalc.src.primitives.limit_cdf import LimitCdf
from phenocalc.src.primitives.phenomenon import AtomicMixture, MomentSequence, OccupancyRow, Phenomenon
from phenocalc.src.primitives.scalar import EXACT, Scalar, one, parse_scalar, to_json_value, zero

logger = logging.getLogger(__name__)

Point = Union[Fraction, float, int, str]


class IntervalReport(BaseModel):
    """
    Probability that the frequency over n trials lies between ξ1 and ξ2, with its limit.

    `midpoint` is Φ_n(nξ2) - Φ_n(nξ1) under the half-mass convention, `half_open` the exact mass of
    ξ1 < x_n/n <= ξ2, and `limit` is Φ(ξ2) - Φ(ξ1) when Φ is known exactly.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    lower: Any
    upper: Any
    midpoint: Any
    half_open: Any
    limit: Optional[Any] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "xi1": to_json_value(self.lower),
            "xi2": to_json_value(self.upper),
            "midpoint": to_json_value(self.midpoint),
            "half_open": to_json_value(self.half_open),
            "limit": None if self.limit is None else to_json_value(self.limit),
        }


class MomentConvergence(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m: int
    n: int
    finite: Any
    limit: Any

    @property
    def gap(self) -> float:
        return abs(float(self.finite) - float(self.limit))

    def to_dict(self) -> Dict[str, Any]:
        return {"m": self.m, "n": self.n, "finite": to_json_value(self.finite), "limit": to_json_value(self.limit)}


class ConcentrationReport(BaseModel):
    """Outcome of applying R^r S^s repeatedly: the resulting phenomenon and where its mass sits."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    phenomenon: AtomicMixture
    frequency: Any
    rounds: int
    delta: float
    weight_near_f: Any
    hypothesis_holds: bool
    dominant_atoms: List[Any]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "phenomenon": self.phenomenon.to_dict(),
            "f": to_json_value(self.frequency),
            "rounds": self.rounds,
            "delta": self.delta,
            "weight_near_f": to_json_value(self.weight_near_f),
            "hypothesis_holds": self.hypothesis_holds,
            "dominant_atoms": [to_json_value(p) for p in self.dominant_atoms],
        }


def read_point(xi: Point):
    if isinstance(xi, str):
        return parse_scalar(xi)
    if isinstance(xi, int):
        return Fraction(xi)
    return xi


def _check_trials(n: int):
    if n < 1:
        raise IndexOutOfRange(f"The frequency needs at least one trial, got n={n}.")


def limiting_cdf(ph: Phenomenon) -> LimitCdf:
    """Φ in closed form; available for atomic mixtures and the uniform phenomenon."""
    if isinstance(ph, AtomicMixture):
        return LimitCdf.from_mixture(ph)
    if isinstance(ph, MomentSequence) and ph.family == "uniform":
        return LimitCdf(kind="uniform", backend=ph.backend)
    raise NotAtomic("The limiting distribution of a truncated moment sequence is not known exactly.")


def limiting_cdf_exact(ph: Phenomenon, xi: Point) -> Scalar:
    """Φ(ξ) = Σ_{p_i < ξ} λ_i + 1/2 Σ_{p_i = ξ} λ_i."""
    return limiting_cdf(ph).evaluate(read_point(xi))


def _row_cdf(row: OccupancyRow, xi) -> Scalar:
    n = row.n
    if xi < 0:
        return zero(row.backend)
    if xi > 1:
        return one(row.backend)
    position = n * xi
    below = sum((row[h] for h in range(n + 1) if h < position), zero(row.backend))
    at = sum((row[h] for h in range(n + 1) if h == position), zero(row.backend))
    return below + at / 2


def _row_interval(row: OccupancyRow, xi1, xi2) -> Scalar:
    n = row.n
    return sum((row[h] for h in range(n + 1) if n * xi1 < h <= n * xi2), zero(row.backend))


def cdf_finite_n(ph: Phenomenon, xi: Point, n: int) -> Scalar:
    """Φ_n(nξ) = Σ_{h < nξ} ω_h^(n) + 1/2 Σ_{h = nξ} ω_h^(n)."""
    _check_trials(n)
    return _row_cdf(occupancy_row(ph, n), read_point(xi))


def interval_probability(ph: Phenomenon, xi1: Point, xi2: Point, n: int) -> Scalar:
    """P(ξ1 < x_n/n <= ξ2), the mass an empirical count over n trials estimates."""
    _check_trials(n)
    xi1, xi2 = read_point(xi1), read_point(xi2)
    return _row_interval(occupancy_row(ph, n), xi1, xi2)


def theorem1_interval(ph: Phenomenon, xi1: Point, xi2: Point, n: int) -> IntervalReport:
    """
    Probability that the frequency over n trials lies within ξ1 and ξ2, which tends to
    Φ(ξ2) - Φ(ξ1) as n grows.
    """
    xi1, xi2 = read_point(xi1), read_point(xi2)
    if xi1 >= xi2:
        raise InvalidArgument(f"Need xi1 < xi2, got {xi1} and {xi2}.")
    _check_trials(n)
    row = occupancy_row(ph, n)
    midpoint = _row_cdf(row, xi2) - _row_cdf(row, xi1)
    half_open = _row_interval(row, xi1, xi2)
    limit = None
    if isinstance(ph, AtomicMixture) or getattr(ph, "family", None) == "uniform":
        cdf = limiting_cdf(ph)
        limit = cdf.evaluate(xi2) - cdf.evaluate(xi1)
    return IntervalReport(n=n, lower=xi1, upper=xi2, midpoint=midpoint, half_open=half_open, limit=limit)


def sampled_cdf(ph: Phenomenon, n: int, points: Optional[int] = None) -> LimitCdf:
    """Φ_n(nξ) tabulated on `points` equally spaced ξ in [0, 1], for export and plotting."""
    _check_trials(n)
    points = settings.cdf_grid_points if points is None else points
    if points < 2:
        raise InvalidArgument(f"A grid needs at least two points, got {points}.")
    row = occupancy_row(ph, n)
    grid = []
    for k in range(points):
        xi = Fraction(k, points - 1) if ph.backend == EXACT else k / (points - 1)
        grid.append((float(xi), float(_row_cdf(row, xi))))
    return LimitCdf(kind="sampled", backend=ph.backend, grid=tuple(grid), n=n)


def cdf_complement(cdf: LimitCdf) -> LimitCdf:
    """K_Φ Φ(ξ) = 1 - Φ(1 - ξ): atoms reflect, the uniform distribution is its own complement."""
    if cdf.kind == "atomic":
        return LimitCdf(kind="atomic", backend=cdf.backend, atoms=AtomicMixture.trusted(
            [(1 - p, w) for p, w in cdf.atoms], cdf.backend).atoms)
    if cdf.kind == "uniform":
        return cdf
    grid = tuple((1.0 - x, 1.0 - y) for x, y in reversed(cdf.grid))
    return LimitCdf(kind="sampled", backend=cdf.backend, grid=grid, n=cdf.n)


def cdf_condition(cdf: LimitCdf, ev: EvidenceCount) -> LimitCdf:
    """
    R_Φ^r S_Φ^s Φ: the distribution reweighted by ξ^r (1 - ξ)^s and renormalized. On atoms this is
    the same transform as condition_evidence on the mixture.
    """
    if cdf.kind != "atomic":
        raise NotAtomic(f"Conditioning a {cdf.kind} limit is only supported for atomic ones.")
    return LimitCdf.from_mixture(condition_evidence(cdf.to_mixture(), ev))


def moment_convergence(ph: Phenomenon, m: int, n: int) -> MomentConvergence:
    """E[(x_n/n)^m] = Σ_h (h/n)^m ω_h^(n), which tends to ω_m^(m)."""
    _check_trials(n)
    if m < 0:
        raise IndexOutOfRange(f"Moment order must be nonnegative, got {m}.")
    ph.require_depth(max(m, n))
    row = occupancy_row(ph, n)
    if ph.backend == EXACT:
        finite = sum((Fraction(h, n) ** m * row[h] for h in range(n + 1)), zero(ph.backend))
    else:
        finite = sum((h / n) ** m * row[h] for h in range(n + 1))
    return MomentConvergence(m=m, n=n, finite=finite, limit=ph.moment(m))


def concentration(ph: Phenomenon, ev: EvidenceCount, rounds: int, delta: Optional[float] = None) -> ConcentrationReport:
    """
    (R^r S^s)^rounds applied to an atomic phenomenon. As rounds grow the mass gathers at the atoms
    closest in likelihood rate to f = r / (r + s), and the phenomenon tends to the constant f when
    Φ is not flat around f. That condition holds when the atoms bracket f (an atom at f counts) or
    one lies within `delta` of it; when it fails the reweighting still runs and
    HypothesisViolated is issued as a warning. `weight_near_f` is the mass within `delta` of f.
    """
    if not isinstance(ph, AtomicMixture):
        raise NotAtomic("Concentration is computed on atomic mixtures.")
    if rounds < 0:
        raise InvalidArgument(f"Rounds must be nonnegative, got {rounds}.")
    delta = settings.concentration_delta if delta is None else delta
    f = ev.frequency

    current = ph
    for _ in range(rounds):
        current = condition_evidence(current, ev)

    near = [(p, w) for p, w in current.atoms if abs(p - f) <= delta]
    brackets = min(ph.points) <= f <= max(ph.points)
    holds = brackets or any(abs(p - f) <= delta for p in ph.points)
    if not holds:
        message = f"No atom lies within {delta} of f={f} and none bracket it; the limit need not be the constant f."
        logger.warning(message)
        warnings.warn(message, HypothesisViolated)
    heaviest = max(current.weights)
    dominant = [p for p, w in current.atoms if w == heaviest]
    return ConcentrationReport(
        phenomenon=current,
        frequency=f,
        rounds=rounds,
        delta=delta,
        weight_near_f=sum((w for _, w in near), zero(current.backend)),
        hypothesis_holds=holds,
        dominant_atoms=dominant,
    )
