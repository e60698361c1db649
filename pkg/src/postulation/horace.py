"""Residual/trace decomposition and condition rows on the quadric P^1 x P^1.

:func:`horace_split` is purely combinatorial: it maps each component of a
configuration to its residual (in P^n, degree dropped by the degree of the
hypersurface) and its trace (on the hypersurface). Only the component and
constraint pairs listed in the rule tables are accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .config import ComponentSpec, Constraint, Hypersurface, Kind, QuadricConfig, SchemeConfig
from .errors import ConstraintError, UnsupportedSplitError
from .linalg import PrimeField, as_field, rank

Trace = Union[SchemeConfig, QuadricConfig]


@dataclass(frozen=True)
class HoraceSplit:
    """Residual and trace of a configuration with respect to a hypersurface.

    For a hyperplane the trace lives in P^{n-1} at the same degree. For the
    quadric it is a :class:`QuadricConfig` tested in bidegree (d, d).
    """

    residual_config: SchemeConfig
    trace_config: Trace
    hypersurface: Hypersurface
    degree_drop: int

    @property
    def trace_degree(self) -> int:
        return self.residual_config.d + self.degree_drop


def _free(spec: ComponentSpec) -> ComponentSpec:
    return spec.with_constraint(Constraint.FREE)


def _hyperplane_rule(c: ComponentSpec) -> tuple[list[ComponentSpec], list[ComponentSpec]]:
    kind, inside = c.kind, c.constraint is Constraint.IN_HYPERPLANE
    if c.constraint not in (Constraint.FREE, Constraint.IN_HYPERPLANE):
        raise UnsupportedSplitError(f"{c.label()} has no hyperplane rule")
    if kind is Kind.LINE:
        return ([], [_free(c)]) if inside else ([c], [ComponentSpec.fat_point(1)])
    if kind is Kind.FAT_SPACE:
        if inside:
            res = [ComponentSpec.fat_space(c.r, c.m - 1, Constraint.IN_HYPERPLANE)] if c.m > 1 else []
            return res, [_free(c)]
        if c.r == 0:
            return [c], []
        if c.r == 1:
            return [c], [ComponentSpec.fat_point(c.m)]
        return [c], [ComponentSpec.fat_space(c.r - 1, c.m)]
    if kind is Kind.FAT_POINT:
        if not inside:
            return [c], []
        res = [ComponentSpec.fat_point(c.m - 1, Constraint.IN_HYPERPLANE)] if c.m > 1 else []
        return res, [_free(c)]
    if kind is Kind.COLLINEAR:
        return ([], [_free(c)]) if inside else ([c], [])
    if kind is Kind.SUNDIAL:
        if inside:
            # The conic lies in H; the embedded point sticks out along T.
            return [ComponentSpec.fat_point(1, Constraint.IN_HYPERPLANE)], [ComponentSpec.conic()]
        return [c], [ComponentSpec.fat_point(1), ComponentSpec.fat_point(1)]
    if kind is Kind.CONIC:
        if inside:
            return [], [ComponentSpec.conic()]
        return [c], [ComponentSpec.fat_point(1), ComponentSpec.fat_point(1)]
    raise UnsupportedSplitError(f"{c.label()} has no hyperplane rule")


def _quadric_rule(c: ComponentSpec, acc: dict[str, int]) -> list[ComponentSpec]:
    kind, con = c.kind, c.constraint
    if kind is Kind.LINE:
        if con is Constraint.FREE:
            acc["beta"] += 2
            return [c]
        if con is Constraint.FIRST_RULING:
            acc["alpha"] += 1
            return []
        if con is Constraint.SECOND_RULING:
            acc["alpha_second"] += 1
            return []
    elif kind is Kind.FAT_SPACE and con is Constraint.FREE and c.r == 1 and c.m <= 2:
        acc["beta" if c.m == 1 else "delta"] += 2
        return [c]
    elif kind is Kind.FAT_POINT:
        if con is Constraint.FREE:
            return [c]
        if con is Constraint.ON_QUADRIC and c.m == 1:
            acc["beta"] += 1
            return []
        if con is Constraint.ON_QUADRIC and c.m == 2:
            acc["delta"] += 1
            return [ComponentSpec.fat_point(1, Constraint.ON_QUADRIC)]
    elif kind is Kind.COLLINEAR:
        if con is Constraint.FREE:
            return [c]
        if con is Constraint.ON_QUADRIC:
            acc["beta"] += c.q
            return []
        if con is Constraint.FIRST_RULING:
            if acc["gamma"]:
                raise UnsupportedSplitError("only one block of points on a ruling line is supported")
            acc["gamma"] = c.q
            return []
    elif kind in (Kind.SUNDIAL, Kind.CONIC) and con is Constraint.FREE:
        acc["beta"] += 4
        return [c]
    elif kind is Kind.SUNDIAL and con is Constraint.ON_QUADRIC:
        # Vertex on Q: trace is a double point there plus the two other
        # intersection points of the lines; residual is the bare conic.
        acc["delta"] += 1
        acc["beta"] += 2
        return [ComponentSpec.conic(Constraint.ON_QUADRIC)]
    raise UnsupportedSplitError(f"{c.label()} has no quadric rule")


def horace_split(config: SchemeConfig, hypersurface: Hypersurface | str) -> HoraceSplit:
    """Split ``config`` along the declared hyperplane ``x_n = 0`` or the quadric of P^3.

    Raises:
        UnsupportedSplitError: a component/constraint pair without a rule.
        ConstraintError: the quadric split outside P^3, or d too small.
    """
    hs = Hypersurface(hypersurface)
    n, d = config.n, config.d
    if hs is Hypersurface.HYPERPLANE:
        if d < 1 or n < 2:
            raise ConstraintError("hyperplane split needs n >= 2 and d >= 1")
        res: list[ComponentSpec] = []
        tr: list[ComponentSpec] = []
        for c in config.components:
            a, b = _hyperplane_rule(c)
            res.extend(a)
            tr.extend(b)
        return HoraceSplit(
            SchemeConfig(n, d - 1, tuple(res), Hypersurface.HYPERPLANE),
            SchemeConfig(n - 1, d, tuple(tr)),
            hs,
            1,
        )
    if n != 3:
        raise ConstraintError("quadric splits are only defined in P^3")
    if d < 2:
        raise ConstraintError("quadric split needs d >= 2")
    acc = dict(alpha=0, beta=0, gamma=0, delta=0, alpha_second=0)
    res = []
    for c in config.components:
        res.extend(_quadric_rule(c, acc))
    return HoraceSplit(SchemeConfig(3, d - 2, tuple(res), Hypersurface.QUADRIC), QuadricConfig(**acc), hs, 2)


# --- bihomogeneous rows ----------------------------------------------------


def _powers(v: int, k: int, p: int) -> list[int]:
    out = [1]
    for _ in range(k):
        out.append(out[-1] * v % p)
    return out


def quadric_rows(spec: QuadricConfig, a: int, b: int, seed, field: PrimeField | int | None = None) -> np.ndarray:
    """Conditions imposed by ``spec`` on forms of bidegree (a, b) on P^1 x P^1.

    Columns are the monomials s0^(a-i) s1^i t0^(b-j) t1^j, flattened as
    ``i * (b+1) + j``. Geometry is sampled in the affine chart s0 = t0 = 1
    with coordinates (sigma, tau).
    """
    if a < 0 or b < 0:
        raise ValueError("bidegree must be nonnegative")
    F = as_field(field)
    p = F.p
    rng = np.random.default_rng(seed)
    ncols = (a + 1) * (b + 1)
    rows: list[list[int]] = []

    def params(k: int) -> list[int]:
        vals: set[int] = set()
        while len(vals) < k:
            vals.update(int(v) for v in F.random(rng, k - len(vals)))
        return sorted(vals)

    def point_row(sig: int, tau: int) -> list[int]:
        ps, pt = _powers(sig, a, p), _powers(tau, b, p)
        return [ps[i] * pt[j] % p for i in range(a + 1) for j in range(b + 1)]

    first = params(spec.alpha + (1 if spec.gamma else 0))
    for sig in first[: spec.alpha]:
        ps = _powers(sig, a, p)
        for j in range(b + 1):
            row = [0] * ncols
            for i in range(a + 1):
                row[i * (b + 1) + j] = ps[i]
            rows.append(row)
    for tau in params(spec.alpha_second):
        pt = _powers(tau, b, p)
        for i in range(a + 1):
            row = [0] * ncols
            for j in range(b + 1):
                row[i * (b + 1) + j] = pt[j]
            rows.append(row)
    for _ in range(spec.beta):
        rows.append(point_row(*(int(v) for v in F.random(rng, 2))))
    if spec.gamma:
        sig = first[-1]
        for tau in params(spec.gamma):
            rows.append(point_row(sig, tau))
    for _ in range(spec.delta):
        sig, tau = (int(v) for v in F.random(rng, 2))
        ps, pt = _powers(sig, a, p), _powers(tau, b, p)
        rows.append(point_row(sig, tau))
        rows.append([i * ps[i - 1] * pt[j] % p if i else 0 for i in range(a + 1) for j in range(b + 1)])
        rows.append([j * ps[i] * pt[j - 1] % p if j else 0 for i in range(a + 1) for j in range(b + 1)])
    if not rows:
        return np.zeros((0, ncols), dtype=F.dtype)
    return F.asarray(rows)


def quadric_rank(spec: QuadricConfig, a: int, b: int, seed, field: PrimeField | int | None = None) -> int:
    F = as_field(field)
    M = quadric_rows(spec, a, b, seed, F)
    if M.shape[0] == 0:
        return 0
    return rank(M, F)


def quadric_h0(spec: QuadricConfig, a: int, b: int, seed, field: PrimeField | int | None = None) -> int:
    if a < 0 or b < 0:
        return 0
    return (a + 1) * (b + 1) - quadric_rank(spec, a, b, seed, field)


__all__ = [
    "HoraceSplit",
    "horace_split",
    "quadric_rows",
    "quadric_rank",
    "quadric_h0",
]
