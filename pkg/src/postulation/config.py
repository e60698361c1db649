"""Scheme configurations: which components, in which ambient space, where.

A :class:`SchemeConfig` is pure data. It says nothing about coordinates;
:mod:`postulation.schemes` turns it into sampled geometry and condition rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable


class Kind(str, enum.Enum):
    LINE = "line"
    FAT_SPACE = "fat_space"
    FAT_POINT = "fat_point"
    COLLINEAR = "collinear"
    SUNDIAL = "sundial"
    # Two lines meeting in a point. Only produced as the residual or trace
    # of a sundial, but usable on its own.
    CONIC = "conic"


class Constraint(str, enum.Enum):
    FREE = "free"
    IN_HYPERPLANE = "in_hyperplane"
    FIRST_RULING = "first_ruling"
    SECOND_RULING = "second_ruling"
    ON_QUADRIC = "on_quadric"


class Hypersurface(str, enum.Enum):
    HYPERPLANE = "hyperplane"
    QUADRIC = "quadric"


@dataclass(frozen=True)
class ComponentSpec:
    """One component of a scheme.

    ``r`` is the dimension of the support for fat linear spaces, ``m`` the
    multiplicity for fat spaces and fat points, ``q`` the number of points
    for a collinear block.
    """

    kind: Kind
    r: int = 0
    m: int = 1
    q: int = 0
    constraint: Constraint = Constraint.FREE

    def __post_init__(self):
        if self.kind is Kind.FAT_SPACE and (self.r < 0 or self.m < 1):
            raise ValueError(f"fat linear space needs r >= 0 and m >= 1, got r={self.r}, m={self.m}")
        if self.kind is Kind.FAT_POINT and self.m < 1:
            raise ValueError(f"fat point needs m >= 1, got m={self.m}")
        if self.kind is Kind.COLLINEAR and self.q < 1:
            raise ValueError(f"collinear block needs at least one point, got q={self.q}")

    @classmethod
    def line(cls, constraint: Constraint = Constraint.FREE) -> ComponentSpec:
        return cls(Kind.LINE, r=1, constraint=constraint)

    @classmethod
    def fat_space(cls, r: int, m: int, constraint: Constraint = Constraint.FREE) -> ComponentSpec:
        return cls(Kind.FAT_SPACE, r=r, m=m, constraint=constraint)

    @classmethod
    def double_line(cls, constraint: Constraint = Constraint.FREE) -> ComponentSpec:
        return cls.fat_space(1, 2, constraint)

    @classmethod
    def fat_point(cls, m: int = 1, constraint: Constraint = Constraint.FREE) -> ComponentSpec:
        return cls(Kind.FAT_POINT, m=m, constraint=constraint)

    @classmethod
    def collinear(cls, q: int, constraint: Constraint = Constraint.FREE) -> ComponentSpec:
        return cls(Kind.COLLINEAR, q=q, constraint=constraint)

    @classmethod
    def sundial(cls, constraint: Constraint = Constraint.FREE) -> ComponentSpec:
        return cls(Kind.SUNDIAL, constraint=constraint)

    @classmethod
    def conic(cls, constraint: Constraint = Constraint.FREE) -> ComponentSpec:
        return cls(Kind.CONIC, constraint=constraint)

    def with_constraint(self, constraint: Constraint) -> ComponentSpec:
        return replace(self, constraint=constraint)

    def label(self) -> str:
        if self.kind is Kind.FAT_SPACE:
            body = f"{self.m}Pi^{self.r}"
        elif self.kind is Kind.FAT_POINT:
            body = f"{self.m}P"
        elif self.kind is Kind.COLLINEAR:
            body = f"{self.q} collinear pts"
        else:
            body = self.kind.value
        if self.constraint is not Constraint.FREE:
            body += f" [{self.constraint.value}]"
        return body


@dataclass(frozen=True)
class SchemeConfig:
    """A scheme in P^n together with the degree of the forms it is tested against."""

    n: int
    d: int
    components: tuple[ComponentSpec, ...] = ()
    hypersurface: Hypersurface | None = None

    def __post_init__(self):
        if self.n < 1 or self.d < 0:
            raise ValueError(f"need n >= 1 and d >= 0, got n={self.n}, d={self.d}")
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def build(
        cls,
        n: int,
        d: int,
        *,
        lines: int = 0,
        double_line: bool = False,
        fat: tuple[int, int] | None = None,
        fat_point: int | None = None,
        collinear: int = 0,
        sundials: int = 0,
    ) -> SchemeConfig:
        """Assemble the common free configurations from counts."""
        comps: list[ComponentSpec] = []
        if double_line:
            comps.append(ComponentSpec.double_line())
        if fat is not None:
            comps.append(ComponentSpec.fat_space(*fat))
        if fat_point is not None:
            comps.append(ComponentSpec.fat_point(fat_point))
        comps.extend(ComponentSpec.line() for _ in range(lines))
        if collinear:
            comps.append(ComponentSpec.collinear(collinear))
        comps.extend(ComponentSpec.sundial() for _ in range(sundials))
        return cls(n, d, tuple(comps))

    def with_degree(self, d: int) -> SchemeConfig:
        return replace(self, d=d)

    def with_components(self, components: Iterable[ComponentSpec]) -> SchemeConfig:
        return replace(self, components=tuple(components))

    def count(self, kind: Kind) -> int:
        return sum(1 for c in self.components if c.kind is kind)

    def describe(self) -> str:
        if not self.components:
            return f"empty scheme in P^{self.n}, d={self.d}"
        counts: dict[str, int] = {}
        for c in self.components:
            counts[c.label()] = counts.get(c.label(), 0) + 1
        parts = [f"{k}" if v == 1 else f"{v}x {k}" for k, v in counts.items()]
        return f"P^{self.n}, d={self.d}: " + " + ".join(parts)


@dataclass(frozen=True)
class QuadricConfig:
    """A scheme on a smooth quadric surface P^1 x P^1.

    ``alpha`` lines of the first ruling (type (1,0)), ``beta`` generic
    points, ``gamma`` points on one further first-ruling line, ``delta``
    double points, and ``alpha_second`` lines of the second ruling.
    """

    alpha: int = 0
    beta: int = 0
    gamma: int = 0
    delta: int = 0
    alpha_second: int = 0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta", "alpha_second"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def condition_count(self, a: int, b: int) -> int:
        return (
            self.alpha * (b + 1)
            + self.alpha_second * (a + 1)
            + self.beta
            + self.gamma
            + 3 * self.delta
        )

