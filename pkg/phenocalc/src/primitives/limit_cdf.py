from fractions import Fraction
from typing import Any, Dict, Literal, Optional, Tuple

import numpy as np

from pydantic import BaseModel, ConfigDict, model_validator

from phenocalc.src.errors import NotAProbability, SpecParseError
from phenocalc.src.primitives.phenomenon import AtomicMixture
from phenocalc.src.primitives.scalar import EXACT, Backend, Scalar, one, to_json_value, zero


class LimitCdf(BaseModel):
    """
    Limiting distribution Φ of the frequency. Zero below 0, one above 1, nondecreasing.

    - "atomic": exact, with a jump of the atom's mass at each atom and Φ(p) = Φ(p-) + m/2.
    - "uniform": Φ(ξ) = ξ on [0, 1].
    - "sampled": a grid of (ξ, Φ(ξ)) pairs taken from the distribution over n trials,
      linearly interpolated between grid points.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["atomic", "uniform", "sampled"]
    backend: Backend = EXACT
    atoms: Tuple[Tuple[Any, Any], ...] = ()
    grid: Tuple[Tuple[float, float], ...] = ()
    n: Optional[int] = None

    @model_validator(mode="after")
    def check_representation(self):
        if self.kind == "atomic" and not self.atoms:
            raise SpecParseError("An atomic limit needs at least one atom.")
        if self.kind == "sampled":
            if len(self.grid) < 2 or self.n is None:
                raise SpecParseError("A sampled limit needs n and at least two grid points.")
            values = [phi for _, phi in self.grid]
            if any(b < a for a, b in zip(values, values[1:])):
                raise NotAProbability("A sampled distribution function must be nondecreasing.")
        return self

    @classmethod
    def from_mixture(cls, ph: AtomicMixture) -> "LimitCdf":
        return cls(kind="atomic", backend=ph.backend, atoms=ph.atoms)

    def to_mixture(self) -> AtomicMixture:
        return AtomicMixture.trusted(self.atoms, self.backend)

    def evaluate(self, xi) -> Scalar:
        if self.kind == "atomic":
            if not isinstance(xi, float):
                xi = Fraction(xi)
            below = sum((w for p, w in self.atoms if p < xi), zero(self.backend))
            at = sum((w for p, w in self.atoms if p == xi), zero(self.backend))
            return below + at / 2
        if self.kind == "uniform":
            if not isinstance(xi, float):
                xi = Fraction(xi)
            if xi <= 0:
                return zero(self.backend)
            if xi >= 1:
                return one(self.backend)
            return xi if self.backend == EXACT else float(xi)
        xs = np.array([x for x, _ in self.grid])
        ys = np.array([y for _, y in self.grid])
        return float(np.interp(float(xi), xs, ys, left=0.0, right=1.0))

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind, "backend": self.backend}
        if self.kind == "atomic":
            data["atoms"] = [{"p": to_json_value(p), "weight": to_json_value(w)} for p, w in self.atoms]
        if self.kind == "sampled":
            data["n"] = self.n
            data["grid"] = [{"xi": x, "phi": y} for x, y in self.grid]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "LimitCdf":
        kind = data.get("kind")
        try:
            if kind == "atomic":
                return cls.from_mixture(AtomicMixture(atoms=data["atoms"], backend=data.get("backend")))
            if kind == "uniform":
                return cls(kind="uniform", backend=data.get("backend", EXACT))
            if kind == "sampled":
                grid = tuple((float(g["xi"]), float(g["phi"])) for g in data["grid"])
                return cls(kind="sampled", backend=data.get("backend", EXACT), grid=grid, n=data["n"])
        except (KeyError, TypeError) as e:
            raise SpecParseError(f"Malformed limit spec: {e}")
        raise SpecParseError(f"Unknown limit kind {kind!r}.")
