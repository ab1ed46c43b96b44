"""Membership functions: Gaussian, triangular and singleton shapes.

Gaussians are constructed from a (lower, upper) bound pair so that the
membership degree is exactly 0.5 at both bounds (half-maximum convention).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

# degree at distance (upper-lower)/2 from the center must be 0.5:
# exp(-0.5*(d/sigma)^2) = 0.5  =>  sigma = (upper-lower) / (2*sqrt(2*ln 2))
_HALF_MAX_DIVISOR = 2.0 * math.sqrt(2.0 * math.log(2.0))

# support of a Gaussian is taken as +-4 sigma (degree ~3.4e-4 at the edge)
_SUPPORT_SIGMAS = 4.0


class InvalidBoundsError(ValueError):
    """Raised when a membership function is built from degenerate bounds."""


@dataclass(frozen=True)
class Gaussian:
    lower: float
    upper: float
    center: float
    sigma: float

    def degree(self, x: float) -> float:
        z = (x - self.center) / self.sigma
        return math.exp(-0.5 * z * z)

    @property
    def support(self) -> tuple[float, float]:
        half = _SUPPORT_SIGMAS * self.sigma
        return (self.center - half, self.center + half)


@dataclass(frozen=True)
class Triangular:
    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if not (self.a <= self.b <= self.c) or self.a == self.c:
            raise InvalidBoundsError(
                f"triangular needs a <= b <= c with a < c, got ({self.a}, {self.b}, {self.c})"
            )

    def degree(self, x: float) -> float:
        if x <= self.a or x >= self.c:
            # the peak may sit on an edge (right-angled triangle)
            if x == self.b:
                return 1.0
            return 0.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        if x == self.b:
            return 1.0
        return (self.c - x) / (self.c - self.b)

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.c)


@dataclass(frozen=True)
class Singleton:
    value: float

    def degree(self, x: float) -> float:
        return 1.0 if x == self.value else 0.0

    @property
    def support(self) -> tuple[float, float]:
        return (self.value, self.value)


MembershipFunction = Union[Gaussian, Triangular, Singleton]


def make_gaussian(lower: float, upper: float) -> Gaussian:
    """Build a Gaussian whose degree is 0.5 at `lower` and `upper`.

    The center is the midpoint of the bounds; sigma follows from the
    half-maximum convention.
    """
    if not (lower < upper):
        raise InvalidBoundsError(f"need lower < upper, got ({lower}, {upper})")
    center = (lower + upper) / 2.0
    sigma = (upper - lower) / _HALF_MAX_DIVISOR
    return Gaussian(lower=lower, upper=upper, center=center, sigma=sigma)


def membership_degree(mf: MembershipFunction, x: float) -> float:
    if not math.isfinite(x):
        raise ValueError(f"membership input must be finite, got {x}")
    return mf.degree(x)


def mf_center(mf: MembershipFunction) -> float:
    """Representative point of a membership function, used for tie-breaking."""
    if isinstance(mf, Gaussian):
        return mf.center
    if isinstance(mf, Triangular):
        return mf.b
    return mf.value
