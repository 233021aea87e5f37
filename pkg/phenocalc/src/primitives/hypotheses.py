from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from phenocalc.src.errors import MixedBackend, SpecParseError, WeightsNotNormalized
from phenocalc.src.primitives.phenomenon import Phenomenon, phenomenon_from_dict, tolerance_for
from phenocalc.src.primitives.scalar import Backend, Scalar, coerce, to_json_value, zero


class HypothesisComponent(BaseModel):
    """One mutually exclusive cause: its label, prior probability and the phenomenon it implies."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str
    prior: Any
    phenomenon: Phenomenon

    @model_validator(mode="before")
    @classmethod
    def convert_prior(cls, data):
        if isinstance(data, dict) and isinstance(data.get("phenomenon"), Phenomenon):
            data = {**data, "prior": coerce(data.get("prior"), data["phenomenon"].backend)}
        return data


class HypothesisModel(BaseModel):
    """
    A phenomenon that depends on one of several causes with known priors. Priors are positive
    and sum to one; labels are unique; every component uses the same arithmetic backend.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    components: Tuple[HypothesisComponent, ...]

    @model_validator(mode="after")
    def check_components(self):
        if not self.components:
            raise SpecParseError("A hypothesis model needs at least one component.")
        backends = {c.phenomenon.backend for c in self.components}
        if len(backends) > 1:
            raise MixedBackend("All hypotheses must use the same backend.")
        labels = [c.label for c in self.components]
        if len(set(labels)) != len(labels):
            raise SpecParseError(f"Hypothesis labels must be unique, got {labels}.")
        if any(c.prior <= 0 for c in self.components):
            raise WeightsNotNormalized("Every hypothesis needs a positive prior.")
        total = sum((c.prior for c in self.components), zero(self.backend))
        if abs(total - 1) > tolerance_for(self.backend):
            raise WeightsNotNormalized(f"Priors sum to {total}, not 1.")
        return self

    @property
    def backend(self) -> Backend:
        return self.components[0].phenomenon.backend

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.components]

    @property
    def priors(self) -> List[Scalar]:
        return [c.prior for c in self.components]

    @classmethod
    def from_pairs(cls, pairs: List[Tuple[str, Phenomenon, Any]]) -> "HypothesisModel":
        return cls(components=tuple(HypothesisComponent(label=l, phenomenon=ph, prior=w) for l, ph, w in pairs))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "hypotheses",
            "components": [
                {"label": c.label, "prior": to_json_value(c.prior), "phenomenon": c.phenomenon.to_dict()}
                for c in self.components
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HypothesisModel":
        if data.get("kind") != "hypotheses":
            raise SpecParseError(f"Expected a hypotheses spec, got kind {data.get('kind')!r}.")
        try:
            return cls.from_pairs([
                (str(c["label"]), phenomenon_from_dict(c["phenomenon"]), c["prior"]) for c in data["components"]
            ])
        except (KeyError, TypeError) as e:
            raise SpecParseError(f"Malformed hypotheses spec: {e}")
