import logging
import sys

from abc import ABC, abstractmethod
from collections import OrderedDict
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from phenocalc.src.config import settings
from phenocalc.src.errors import (
    AtomOutOfRange,
    DepthExceeded,
    IndexOutOfRange,
    NotAProbability,
    NotCompletelyMonotone,
    NotUnitAtZero,
    SpecParseError,
    WeightsNotNormalized,
)
from phenocalc.src.primitives.scalar import (
    EXACT,
    Backend,
    Scalar,
    coerce,
    coerce_all,
    infer_backend,
    one,
    to_json_value,
    zero,
)

logger = logging.getLogger(__name__)

HALF_ULP = sys.float_info.epsilon / 2


def tolerance_for(backend: Backend) -> float:
    return 0.0 if backend == EXACT else settings.float_tolerance


class Phenomenon(BaseModel, ABC):
    """
    A random phenomenon: an exchangeable binary process, known through its all-success
    probabilities ω_h^(h) (the moments of its mixing measure on [0, 1]).

    Two representations exist. MomentSequence holds a truncated sequence of moments and refuses
    any query that needs moments beyond its depth. AtomicMixture holds finitely many probability
    atoms with weights and answers every query exactly, at any depth.

    Values are immutable; every operation returns a new phenomenon.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    backend: Backend = EXACT

    @property
    @abstractmethod
    def depth(self) -> Optional[int]:
        """Highest available moment order, None when unbounded."""

    @abstractmethod
    def moment(self, h: int) -> Scalar:
        """ω_h^(h), the probability that h trials are all successes."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    def require_depth(self, needed: int):
        if self.depth is not None and needed > self.depth:
            logger.debug(f"Depth {needed} requested from a sequence of depth {self.depth}.")
            raise DepthExceeded(needed, self.depth)

    def moments(self, upto: int) -> List[Scalar]:
        self.require_depth(upto)
        return [self.moment(h) for h in range(upto + 1)]

    @property
    def tolerance(self) -> float:
        return tolerance_for(self.backend)


class MomentSequence(Phenomenon):
    """
    Truncated moment sequence [ω_0^(0), ω_1^(1), ..., ω_N^(N)] with depth N.

    Construction validates the full Hausdorff condition: every finite difference
    Δ^j ω at index h with h + j <= N must be nonnegative.
    """

    kind: Literal["moments"] = "moments"
    values: Tuple[Any, ...]
    family: Optional[Literal["uniform"]] = None

    @model_validator(mode="before")
    @classmethod
    def convert_values(cls, data):
        if not isinstance(data, dict):
            return data
        values = data.get("values")
        if values is None or len(values) == 0:
            raise SpecParseError("A moment sequence needs at least one value.")
        backend = data.get("backend") or infer_backend(values)
        return {**data, "backend": backend, "values": tuple(coerce_all(values, backend))}

    @model_validator(mode="after")
    def check_sequence(self):
        check_range_and_unit(self.values, self.backend)
        if self.family == "uniform":
            tol = tolerance_for(self.backend)
            for h, v in enumerate(self.values):
                if abs(v - Fraction(1, h + 1)) > tol:
                    raise SpecParseError(f"A sequence tagged uniform needs moment {h} = 1/{h + 1}, got {v}.")
        witness = complete_monotonicity_witness(self.values, self.backend)
        if witness is not None:
            h, j, value = witness
            logger.debug(f"Rejected moment sequence, Δ^{j} at {h} is {value}.")
            raise NotCompletelyMonotone(h=h, j=j, value=value)
        return self

    @classmethod
    def trusted(cls, values: Sequence[Scalar], backend: Backend, family: Optional[str] = None) -> "MomentSequence":
        """
        Builds a sequence produced by an operation on a valid one. Only the range and
        monotonicity are re-checked; the full difference table is not.
        """
        values = tuple(values)
        check_range_and_unit(values, backend)
        tol = tolerance_for(backend)
        for h in range(len(values) - 1):
            if values[h + 1] > values[h] + tol:
                raise NotCompletelyMonotone(h=h, j=1, value=values[h] - values[h + 1])
        return cls.model_construct(values=values, backend=backend, family=family)

    @property
    def depth(self) -> int:
        return len(self.values) - 1

    def moment(self, h: int) -> Scalar:
        if h < 0:
            raise IndexOutOfRange(f"Moment order must be nonnegative, got {h}.")
        self.require_depth(h)
        return self.values[h]

    def truncate(self, depth: int) -> "MomentSequence":
        self.require_depth(depth)
        return MomentSequence.model_construct(values=self.values[:depth + 1], backend=self.backend, family=self.family)

    def to_dict(self) -> Dict[str, Any]:
        data = {"kind": self.kind, "backend": self.backend, "values": [to_json_value(v) for v in self.values]}
        if self.family is not None:
            data["family"] = self.family
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "MomentSequence":
        return cls(values=data["values"], backend=data.get("backend"), family=data.get("family"))


class AtomicMixture(Phenomenon):
    """
    Finite mixture of constant-probability phenomena: atoms p_i in [0, 1] with positive weights
    summing to one. Atoms are kept sorted and distinct; duplicates merge and zero weights drop.
    """

    kind: Literal["atomic"] = "atomic"
    atoms: Tuple[Tuple[Any, Any], ...]

    @model_validator(mode="before")
    @classmethod
    def convert_atoms(cls, data):
        if not isinstance(data, dict):
            return data
        raw = [(a["p"], a["weight"]) if isinstance(a, dict) else tuple(a) for a in data.get("atoms", ())]
        if any(len(pair) != 2 for pair in raw):
            raise SpecParseError("Atoms are (p, weight) pairs.")
        flat = [x for pair in raw for x in pair]
        backend = data.get("backend") or infer_backend(flat)
        pairs = [(coerce(p, backend), coerce(w, backend)) for p, w in raw]
        for p, w in pairs:
            if p < 0 or p > 1:
                raise AtomOutOfRange(f"Atom {p} is not a probability.")
            if w < 0:
                raise WeightsNotNormalized(f"Atom {p} has negative weight {w}.")
        return {**data, "backend": backend, "atoms": tidy_atoms(pairs)}

    @model_validator(mode="after")
    def check_weights(self):
        if not self.atoms:
            raise WeightsNotNormalized("A mixture needs at least one atom with positive weight.")
        total = sum((w for _, w in self.atoms), zero(self.backend))
        if abs(total - 1) > self.tolerance:
            raise WeightsNotNormalized(f"Weights sum to {total}, not 1.")
        return self

    @classmethod
    def trusted(cls, pairs: Sequence[Tuple[Scalar, Scalar]], backend: Backend) -> "AtomicMixture":
        """Builds a mixture from weights that an operation has already normalized."""
        atoms = tidy_atoms(pairs)
        if not atoms:
            raise WeightsNotNormalized("A mixture needs at least one atom with positive weight.")
        return cls.model_construct(atoms=atoms, backend=backend)

    @property
    def depth(self) -> None:
        return None

    @property
    def points(self) -> List[Scalar]:
        return [p for p, _ in self.atoms]

    @property
    def weights(self) -> List[Scalar]:
        return [w for _, w in self.atoms]

    def moment(self, h: int) -> Scalar:
        if h < 0:
            raise IndexOutOfRange(f"Moment order must be nonnegative, got {h}.")
        return sum((w * p ** h for p, w in self.atoms), zero(self.backend))

    def to_moments(self, depth: int) -> MomentSequence:
        """The first depth+1 moments Σ λ_i p_i^h, valid by construction."""
        return MomentSequence.trusted(self.moments(depth), self.backend)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "backend": self.backend,
            "atoms": [{"p": to_json_value(p), "weight": to_json_value(w)} for p, w in self.atoms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AtomicMixture":
        return cls(atoms=data["atoms"], backend=data.get("backend"))


class OccupancyRow(BaseModel):
    """Distribution {ω_h^(n)} of the number of successes in n trials."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    probs: Tuple[Any, ...]
    backend: Backend = EXACT

    @model_validator(mode="after")
    def check_row(self):
        if len(self.probs) != self.n + 1:
            raise IndexOutOfRange(f"A row over {self.n} trials has {self.n + 1} entries, got {len(self.probs)}.")
        tol = tolerance_for(self.backend)
        if any(p < -tol for p in self.probs):
            raise NotAProbability(f"Negative occupancy probability in row n={self.n}.")
        total = sum(self.probs, zero(self.backend))
        if abs(total - 1) > tol * max(1, self.n):
            raise NotAProbability(f"Occupancy row n={self.n} sums to {total}.")
        return self

    def __getitem__(self, h: int) -> Scalar:
        return self.probs[h]

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "backend": self.backend, "probs": [to_json_value(p) for p in self.probs]}


def tidy_atoms(pairs: Sequence[Tuple[Scalar, Scalar]]) -> Tuple[Tuple[Scalar, Scalar], ...]:
    merged: "OrderedDict[Scalar, Scalar]" = OrderedDict()
    for p, w in pairs:
        if w == 0:
            continue
        merged[p] = merged[p] + w if p in merged else w
    return tuple(sorted(merged.items(), key=lambda item: item[0]))


def check_range_and_unit(values: Sequence[Scalar], backend: Backend):
    tol = tolerance_for(backend)
    for h, v in enumerate(values):
        if v < -tol or v > 1 + tol:
            raise NotAProbability(f"Moment {h} is {v}, outside [0, 1].")
    if abs(values[0] - one(backend)) > tol:
        raise NotUnitAtZero(f"Moment 0 must be 1, got {values[0]}.")


def complete_monotonicity_witness(values: Sequence[Scalar], backend: Backend) -> Optional[Tuple[int, int, Scalar]]:
    """
    First (h, j, Δ^j a_h) with a negative difference, scanning orders j = 1, 2, ... in turn.

    Float values are differenced exactly as rationals; a difference counts as negative only past
    the tolerance plus the rounding its inputs may carry.
    """
    tol = tolerance_for(backend)
    if backend == EXACT:
        level = list(values)
        slack = [0.0] * len(values)
    else:
        level = [Fraction(v) for v in values]
        slack = [HALF_ULP * abs(v) for v in values]
    for j in range(1, len(values)):
        level = [level[h] - level[h + 1] for h in range(len(level) - 1)]
        slack = [slack[h] + slack[h + 1] for h in range(len(slack) - 1)]
        for h, v in enumerate(level):
            if v < -(tol + slack[h]):
                return h, j, v if backend == EXACT else float(v)
    return None


def phenomenon_from_dict(data: dict) -> Phenomenon:
    if not isinstance(data, dict):
        raise SpecParseError("A phenomenon spec must be a JSON object.")
    kind = data.get("kind")
    try:
        if kind == "moments":
            return MomentSequence.from_dict(data)
        if kind == "atomic":
            return AtomicMixture.from_dict(data)
    except KeyError as e:
        raise SpecParseError(f"Phenomenon spec of kind {kind!r} is missing {e}.")
    raise SpecParseError(f"Unknown phenomenon kind {kind!r}.")
