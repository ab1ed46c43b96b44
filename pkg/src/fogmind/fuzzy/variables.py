"""Linguistic variables: named universes carrying ordered labeled membership
functions, plus fuzzification and threshold classification."""
from __future__ import annotations

from dataclasses import dataclass, field

from .membership import MembershipFunction, Singleton, membership_degree, mf_center

INPUT = "input"
OUTPUT = "output"

KIND_LINGUISTIC = "linguistic"
KIND_BOOLEAN = "boolean"
KIND_INTEGER = "integer"

# default classification threshold: a label below this degree is "no label"
DEFAULT_THRESHOLD = 0.25


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    direction: str                  # input | output
    value_kind: str                 # linguistic | boolean | integer
    unit: str
    universe: tuple[float, float]
    labels: tuple[tuple[str, MembershipFunction], ...]
    _by_name: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self) -> None:
        lo, hi = self.universe
        if not lo < hi:
            raise ValueError(f"{self.name}: universe must be a non-empty interval")
        names = [n for n, _ in self.labels]
        if len(names) != len(set(names)):
            raise ValueError(f"{self.name}: duplicate label names")
        object.__setattr__(self, "_by_name", dict(self.labels))

    def label(self, name: str) -> MembershipFunction:
        return self._by_name[name]

    def has_label(self, name: str) -> bool:
        return name in self._by_name

    def clamp(self, x: float) -> float:
        lo, hi = self.universe
        return lo if x < lo else hi if x > hi else x

    def singleton_value(self, value: int) -> str | None:
        """Label name whose singleton sits at `value`, if any."""
        for name, mf in self.labels:
            if isinstance(mf, Singleton) and mf.value == value:
                return name
        return None


def fuzzify(var: LinguisticVariable, x: float) -> dict[str, float]:
    """Degree of every label at crisp value x (clamped to the universe)."""
    x = var.clamp(x)
    return {name: membership_degree(mf, x) for name, mf in var.labels}


def classify(
    var: LinguisticVariable, x: float, threshold: float = DEFAULT_THRESHOLD
) -> str | None:
    """Label of maximal degree if it clears the threshold, else None.

    Ties go to the label with the smaller center.
    """
    x = var.clamp(x)
    best_name: str | None = None
    best_degree = -1.0
    best_center = 0.0
    for name, mf in var.labels:
        d = membership_degree(mf, x)
        c = mf_center(mf)
        if d > best_degree or (d == best_degree and c < best_center):
            best_name, best_degree, best_center = name, d, c
    if best_name is None or best_degree < threshold:
        return None
    return best_name
