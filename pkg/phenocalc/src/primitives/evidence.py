from fractions import Fraction
from typing import Iterable, List

from pydantic import BaseModel, ConfigDict, field_validator

from phenocalc.src.errors import InvalidArgument, SpecParseError

SUCCESS_MARKS = {"W", "1", "S"}
FAILURE_MARKS = {"B", "0", "F"}


class EvidenceCount(BaseModel):
    """r observed successes and s observed failures. Order does not matter for a random phenomenon."""

    model_config = ConfigDict(frozen=True)

    r: int = 0
    s: int = 0

    @field_validator("r", "s")
    @classmethod
    def check_count(cls, v):
        if v < 0:
            raise InvalidArgument(f"Evidence counts must be nonnegative, got {v}.")
        return v

    @property
    def total(self) -> int:
        return self.r + self.s

    @property
    def frequency(self):
        if self.total == 0:
            raise InvalidArgument("Empty evidence has no frequency.")
        return Fraction(self.r, self.total)

    def add(self, success: bool) -> "EvidenceCount":
        return EvidenceCount(r=self.r + 1, s=self.s) if success else EvidenceCount(r=self.r, s=self.s + 1)

    @classmethod
    def from_outcomes(cls, outcomes: Iterable[bool]) -> "EvidenceCount":
        outcomes = list(outcomes)
        return cls(r=sum(1 for o in outcomes if o), s=sum(1 for o in outcomes if not o))


def parse_outcomes(text: str) -> List[bool]:
    """Reads a draw record such as "WWBWBB" (W/1/S success, B/0/F failure) into booleans."""
    outcomes = []
    for char in text.strip().upper():
        if char in SUCCESS_MARKS:
            outcomes.append(True)
        elif char in FAILURE_MARKS:
            outcomes.append(False)
        elif char in " ,":
            continue
        else:
            raise SpecParseError(f"Unknown outcome {char!r} in {text!r}; use W for success and B for failure.")
    return outcomes
