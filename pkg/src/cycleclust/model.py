"""Core model types for the clustered-oscillator feedback system.

The system tracks k clusters of identical phase oscillators on the unit
circle [0, 1).  A cluster whose phase sits in the feedback window [r, 1)
runs at speed 1 + sigma, where sigma is the fraction of clusters currently
inside the signalling window [0, s).  Every other cluster runs at speed 1.

All arithmetic is exact.  Phases, parameters, and every derived quantity
are `fractions.Fraction` values, so results can be compared with `==`
rather than with tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Fraction

ScalarLike = Union[Fraction, int, float, str]


class ModelError(ValueError):
    """Base class for invalid model inputs."""


class OrderingViolation(ModelError):
    def __init__(self, i: int, j: int, xi: Scalar, xj: Scalar):
        self.i, self.j = i, j
        super().__init__(f"coordinates out of order: x{i}={xi} > x{j}={xj}")


class OutOfRange(ModelError):
    pass


class WedgeViolation(ModelError):
    pass


class SubcaseViolation(ModelError):
    pass


def frac(value: ScalarLike) -> Scalar:
    """Convert a number to an exact Fraction.

    Strings parse as "p/q" or decimal literals.  Floats convert via their
    repr so that a printed decimal like 0.8 becomes exactly 4/5 rather
    than the binary float it would otherwise denote.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"cannot parse scalar {value!r}") from exc
    raise ModelError(f"unsupported scalar type {type(value).__name__}")


@dataclass(frozen=True)
class Parameters:
    """Feedback window start r and signalling window width s.

    Windows on the circle: signalling region [0, s), neutral gap [s, r),
    feedback region [r, 1).  Requires 0 < s < r < 1.
    """

    r: Scalar
    s: Scalar

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", frac(self.r))
        object.__setattr__(self, "s", frac(self.s))
        if not (0 < self.s < self.r < 1):
            raise OutOfRange(f"need 0 < s < r < 1, got r={self.r}, s={self.s}")

    @property
    def in_wedge(self) -> bool:
        """Parameter wedge where the closed-form 3-cluster map is derived:
        2s < r < 1 - 5s/3."""
        return 2 * self.s < self.r < 1 - Fraction(5, 3) * self.s

    @property
    def subcase_a(self) -> bool:
        """Narrow sub-wedge 2s < r <= 1/2 - s/3 where the 13-piece domain
        chart below is valid without modification."""
        return 2 * self.s < self.r <= Fraction(1, 2) - self.s / 3

    def require_wedge(self) -> None:
        if not self.in_wedge:
            raise WedgeViolation(
                f"(r, s)=({self.r}, {self.s}) outside the wedge 2s < r < 1-5s/3"
            )

    def require_subcase_a(self) -> None:
        if not self.subcase_a:
            raise SubcaseViolation(
                f"(r, s)=({self.r}, {self.s}) outside 2s < r <= 1/2 - s/3"
            )


def mod1(x: Scalar) -> Scalar:
    """Fractional part of an exact rational."""
    return x - (x.numerator // x.denominator)


def circular_distance(a: Scalar, b: Scalar) -> Scalar:
    """Shorter arc length between two phases on the unit circle."""
    d = mod1(a - b)
    return min(d, 1 - d)


@dataclass(frozen=True)
class SimplexPoint:
    """Point of the ordered phase simplex with the leading phase pinned at 0.

    Stores the k-1 free coordinates 0 <= x1 <= ... <= x_{k-1} <= 1.  For
    the 3-cluster system this is the pair (x1, x2).
    """

    k: int
    coords: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        coords = tuple(frac(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if self.k < 2:
            raise ModelError(f"need at least 2 clusters, got k={self.k}")
        if len(coords) != self.k - 1:
            raise ModelError(
                f"expected {self.k - 1} coordinates for k={self.k}, got {len(coords)}"
            )
        validate_simplex(coords)

    @property
    def x1(self) -> Scalar:
        return self.coords[0]

    @property
    def x2(self) -> Scalar:
        return self.coords[1]

    def phases(self) -> tuple[Scalar, ...]:
        """Full phase vector including the pinned leading zero."""
        return (Fraction(0),) + self.coords

    def __iter__(self):
        return iter(self.coords)


def validate_simplex(coords: Sequence[Scalar]) -> None:
    prev = Fraction(0)
    for i, c in enumerate(coords, start=1):
        if c < 0 or c > 1:
            raise OutOfRange(f"x{i}={c} outside [0, 1]")
        if c < prev:
            raise OrderingViolation(i - 1, i, prev, c)
        prev = c


def point3(x1: ScalarLike, x2: ScalarLike) -> SimplexPoint:
    """Convenience constructor for the 3-cluster simplex."""
    return SimplexPoint(3, (frac(x1), frac(x2)))


def signal_fraction(phases: Iterable[Scalar], params: Parameters) -> Scalar:
    """Fraction of clusters currently inside the signalling window [0, s)."""
    phases = tuple(phases)
    count = sum(1 for p in phases if 0 <= mod1(p) < params.s)
    return Fraction(count, len(phases))


def velocity(phase: Scalar, sigma: Scalar, params: Parameters) -> Scalar:
    """Instantaneous speed of a cluster: 1 + sigma inside the feedback
    window [r, 1), plain 1 elsewhere (including the gap [s, r))."""
    return 1 + sigma if mod1(phase) >= params.r else Fraction(1)
