"""Sample generic geometry over GF(p) and emit the linear conditions it imposes.

Every component is realised by a *frame*: an invertible (n+1)x(n+1) matrix
whose leading columns are the component's distinguished points and whose
remaining columns are random. In frame coordinates ``y`` (so ``x = G y``)
each supported component has a monomial ideal, and its conditions on a
degree-d form F are "the coefficients of the standard monomials of F(G y)
vanish". Lines and collinear points take cheaper evaluation-based paths.

Hyperplane constraints refer to H = {x_n = 0}. Quadric constraints refer to
the smooth quadric Q = {x_0 x_3 = x_1 x_2} in P^3, parametrised by the Segre
map (s, t) -> (s0 t0, s0 t1, s1 t0, s1 t1); the first ruling has s fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .config import ComponentSpec, Constraint, Hypersurface, Kind, SchemeConfig
from .errors import ConstraintError, GenericityError
from .linalg import PrimeField, as_field, rank, small_rank
from .monomials import (
    Exponent,
    MonomialBasis,
    enumerate_basis,
    evaluate,
    normal_degree_targets,
    substitution_rows,
)

MAX_RESAMPLES = 16

_QUADRIC_CONSTRAINTS = (Constraint.FIRST_RULING, Constraint.SECOND_RULING, Constraint.ON_QUADRIC)


@dataclass
class SampledComponent:
    """Concrete coordinates for one component.

    ``points`` holds the distinguished points as rows:
      line/collinear: (A, B), plus the collinear points in ``extra``;
      fat space: its r+1 spanning points; fat point: the point;
      sundial: (P, A, B, C) with L = PA, M = PB, T = span(P, A, B, C);
      conic: (P, A, B).
    ``frame`` has these points as leading columns, completed to a basis.
    """

    spec: ComponentSpec
    points: np.ndarray
    frame: np.ndarray | None = None
    extra: np.ndarray | None = field(default=None, repr=False)

    @property
    def support(self) -> np.ndarray:
        """Spanning points of the linear span of the reduced support."""
        if self.spec.kind is Kind.SUNDIAL:
            return self.points[:3]
        return self.points


@dataclass(frozen=True)
class ConditionMatrix:
    """Stacked condition rows; columns follow ``enumerate_basis(n, d)``."""

    n: int
    d: int
    p: int
    data: np.ndarray
    owners: tuple[int, ...] = ()

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def rank(self) -> int:
        return rank(self.data, self.p)


# --- sampling --------------------------------------------------------------


def segre_point(s, t, p: int) -> list[int]:
    return [s[0] * t[0] % p, s[0] * t[1] % p, s[1] * t[0] % p, s[1] * t[1] % p]


def _rand(F: PrimeField, rng, n: int, k: int = 1) -> np.ndarray:
    return F.random(rng, (k, n + 1))


def _in_hyperplane(F: PrimeField, rng, n: int, k: int) -> np.ndarray:
    pts = _rand(F, rng, n, k)
    pts[:, n] = 0
    return pts


def _complete_frame(cols: np.ndarray, F: PrimeField, rng) -> np.ndarray:
    """Extend the rows of ``cols`` by random points to a basis; return it column-wise."""
    k, width = cols.shape
    if small_rank(cols.tolist(), F.p) < k:
        raise GenericityError("distinguished points are linearly dependent")
    for _ in range(MAX_RESAMPLES):
        G = np.concatenate([cols, _rand(F, rng, width - 1, width - k)]).T.copy()
        if rank(G, F) == width:
            return G
    raise GenericityError(f"could not complete a frame after {MAX_RESAMPLES} draws; enlarge p")


def _require_context(spec: ComponentSpec, config: SchemeConfig) -> None:
    c = spec.constraint
    if c is Constraint.FREE:
        return
    if c is Constraint.IN_HYPERPLANE:
        if config.hypersurface is not Hypersurface.HYPERPLANE:
            raise ConstraintError(f"{spec.label()} needs a declared hyperplane")
        return
    if config.hypersurface is not Hypersurface.QUADRIC or config.n != 3:
        raise ConstraintError(f"{spec.label()} needs a declared quadric surface in P^3")
    allowed = {
        Constraint.FIRST_RULING: (Kind.LINE, Kind.COLLINEAR),
        Constraint.SECOND_RULING: (Kind.LINE,),
        Constraint.ON_QUADRIC: (Kind.FAT_POINT, Kind.COLLINEAR, Kind.SUNDIAL, Kind.CONIC),
    }[c]
    if spec.kind not in allowed:
        raise ConstraintError(f"{spec.kind.value} cannot carry constraint {c.value}")
    if spec.kind is Kind.COLLINEAR and c is Constraint.ON_QUADRIC and spec.q > 2:
        raise ConstraintError("a line off the quadric meets it in at most 2 points")


def _distinct_params(F: PrimeField, rng, q: int) -> list[int]:
    if q > F.p:
        raise ConstraintError(f"cannot choose {q} distinct parameters in GF({F.p})")
    seen: set[int] = set()
    while len(seen) < q:
        seen.update(int(v) for v in F.random(rng, q - len(seen)))
    return sorted(seen)


def _sample_one(spec: ComponentSpec, config: SchemeConfig, F: PrimeField, rng) -> SampledComponent:
    n, p = config.n, F.p
    kind, c = spec.kind, spec.constraint
    quad = c in _QUADRIC_CONSTRAINTS

    def pts(k: int) -> np.ndarray:
        return _in_hyperplane(F, rng, n, k) if c is Constraint.IN_HYPERPLANE else _rand(F, rng, n, k)

    def on_q(k: int) -> np.ndarray:
        return np.array(
            [segre_point(F.random(rng, 2).tolist(), F.random(rng, 2).tolist(), p) for _ in range(k)],
            dtype=F.dtype,
        )

    def ruling_line(first: bool) -> np.ndarray:
        u0, u1 = (int(v) for v in F.random(rng, 2))
        if first:
            return np.array([[u0, 0, u1, 0], [0, u0, 0, u1]], dtype=F.dtype)
        return np.array([[u0, u1, 0, 0], [0, 0, u0, u1]], dtype=F.dtype)

    if kind is Kind.LINE:
        P = ruling_line(c is Constraint.FIRST_RULING) if quad else pts(2)
        return SampledComponent(spec, P)
    if kind is Kind.FAT_SPACE:
        if not 0 <= spec.r < n:
            raise ConstraintError(f"a {spec.r}-plane does not fit in P^{n}")
        if c is Constraint.IN_HYPERPLANE and spec.r > n - 2:
            raise ConstraintError(f"a {spec.r}-plane does not fit in a hyperplane of P^{n}")
        P = pts(spec.r + 1)
        return SampledComponent(spec, P, _complete_frame(P, F, rng))
    if kind is Kind.FAT_POINT:
        P = on_q(1) if quad else pts(1)
        return SampledComponent(spec, P, _complete_frame(P, F, rng))
    if kind is Kind.COLLINEAR:
        if c is Constraint.FIRST_RULING:
            AB = ruling_line(True)
        elif c is Constraint.ON_QUADRIC:
            AB = on_q(2)
        else:
            AB = pts(2)
        if c is Constraint.ON_QUADRIC:
            chosen = AB[: spec.q]
        else:
            ts = np.array(_distinct_params(F, rng, spec.q), dtype=F.dtype)
            chosen = (AB[0][None, :] + ts[:, None] * AB[1][None, :]) % p
        return SampledComponent(spec, AB, extra=chosen)
    if kind in (Kind.SUNDIAL, Kind.CONIC):
        if n < 3 and kind is Kind.SUNDIAL:
            raise ConstraintError("a sundial needs n >= 3")
        if c is Constraint.ON_QUADRIC:
            P = np.concatenate([on_q(1), _rand(F, rng, n, 2)])
        else:
            P = pts(3)
        if kind is Kind.SUNDIAL:
            # T is the span of the conic and one fresh point, never inside H.
            P = np.concatenate([P, _rand(F, rng, n, 1)])
        return SampledComponent(spec, P, _complete_frame(P, F, rng))
    raise ValueError(f"unknown component kind {kind!r}")


def _free_pairs_generic(comps: list[SampledComponent], n: int, p: int) -> bool:
    free = [c for c in comps if c.spec.constraint is Constraint.FREE]
    for a, b in combinations(free, 2):
        sa, sb = a.support, b.support
        want = min(len(sa) + len(sb), n + 1)
        if small_rank(np.concatenate([sa, sb]).tolist(), p) != want:
            return False
    return True


def _self_generic(c: SampledComponent, p: int) -> bool:
    if small_rank(c.points.tolist(), p) != len(c.points):
        return False
    if c.spec.kind is Kind.COLLINEAR and c.extra is not None:
        if len({tuple(int(v) for v in row) for row in c.extra}) != len(c.extra):
            return False
        if any(not np.any(row) for row in c.extra):
            return False
    return True


def sample_config(config: SchemeConfig, seed, field: PrimeField | int | None = None) -> list[SampledComponent]:
    """Draw coordinates for every component of ``config``.

    Deterministic in ``seed`` (anything ``numpy.random.default_rng`` accepts).
    Free components are checked pairwise for general position: the spans of
    their supports must have the largest possible joint rank. The whole
    configuration is redrawn up to ``MAX_RESAMPLES`` times.
    """
    F = as_field(field)
    for spec in config.components:
        _require_context(spec, config)
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RESAMPLES):
        try:
            comps = [_sample_one(s, config, F, rng) for s in config.components]
        except GenericityError:
            continue
        if all(_self_generic(c, F.p) for c in comps) and _free_pairs_generic(comps, config.n, F.p):
            return comps
    raise GenericityError(
        f"no sample in general position after {MAX_RESAMPLES} attempts; try a larger prime"
    )


# --- condition rows --------------------------------------------------------


@lru_cache(maxsize=64)
def _inverse_vandermonde(d: int, p: int) -> np.ndarray:
    """Inverse of V[j, k] = j^k (0 <= j, k <= d) over GF(p), by Gauss-Jordan in Python ints."""
    if p <= d:
        raise GenericityError(f"GF({p}) has too few elements to interpolate degree {d}")
    size = d + 1
    A = [[pow(j, k, p) for k in range(size)] + [int(i == j) for i in range(size)] for j in range(size)]
    for c in range(size):
        piv = next(i for i in range(c, size) if A[i][c])
        A[c], A[piv] = A[piv], A[c]
        inv = pow(A[c][c], p - 2, p)
        A[c] = [v * inv % p for v in A[c]]
        for i in range(size):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[c])]
    dtype = np.int64 if p <= 3_037_000_499 else object
    out = np.array([row[size:] for row in A], dtype=dtype)
    out.setflags(write=False)
    return out


def rows_for_lines(lines: list[np.ndarray], basis: MonomialBasis, field: PrimeField | int | None = None) -> np.ndarray:
    """Binary-form coefficient rows for many lines at once, ``d+1`` rows per line.

    Each line is a 2 x (n+1) array (A, B). Row k of a line's block maps the
    coefficients of F to the coefficient of t^k in F(A + tB), obtained by
    sampling at t = 0..d and inverting the Vandermonde matrix.
    """
    F = as_field(field)
    if not lines:
        return np.zeros((0, len(basis)), dtype=F.dtype)
    d, p = basis.d, F.p
    ts = np.arange(d + 1, dtype=np.int64)
    AB = F.asarray(np.stack(lines))  # (L, 2, n+1)
    if any(small_rank(ln.tolist(), p) < 2 for ln in AB):
        raise GenericityError("degenerate line: the two points coincide")
    pts = (AB[:, 0, None, :] + ts[None, :, None] * AB[:, 1, None, :]) % p
    vals = evaluate(pts.reshape(-1, basis.n + 1), basis, F).reshape(len(lines), d + 1, -1)
    Vinv = _inverse_vandermonde(d, p)
    out = np.zeros_like(vals)
    for j in range(d + 1):
        out = (out + Vinv[None, :, j, None] * vals[:, j, None, :]) % p
    return out.reshape(len(lines) * (d + 1), -1)


def rows_for_line(line: np.ndarray, basis: MonomialBasis, field: PrimeField | int | None = None) -> np.ndarray:
    return rows_for_lines([line], basis, field)


def rows_for_fat_space(frame: np.ndarray, r: int, m: int, basis: MonomialBasis, field: PrimeField | int | None = None) -> np.ndarray:
    """Rows cutting out forms vanishing to order ``m`` along the span of the first r+1 frame columns."""
    F = as_field(field)
    return substitution_rows(frame, normal_degree_targets(basis.n, basis.d, r, m), basis, F)


def rows_for_collinear_points(points: np.ndarray, basis: MonomialBasis, field: PrimeField | int | None = None) -> np.ndarray:
    return evaluate(points, basis, as_field(field))


def _conic_targets(n: int, d: int) -> list[Exponent]:
    out: list[Exponent] = []
    for b in range(d + 1):
        out.append((d - b, b) + (0,) * (n - 1))
    for b in range(1, d + 1):
        out.append((d - b, 0, b) + (0,) * (n - 2))
    return out


def sundial_targets(n: int, d: int) -> list[Exponent]:
    """Standard monomials of a sundial in its frame (P, A, B, C, ...).

    The ideal is (y1 y2, y1 y3, y2 y3, y3^2, y4, ..., yn), so the standard
    monomials are y0^a y1^b, y0^a y2^b and y0^(d-1) y3: 2(d+1) in all.
    """
    out = _conic_targets(n, d)
    if d >= 1:
        out.append((d - 1, 0, 0, 1) + (0,) * (n - 3))
    return out


def rows_for_sundial(comp: SampledComponent, basis: MonomialBasis, field: PrimeField | int | None = None) -> np.ndarray:
    F = as_field(field)
    if comp.frame is None or len(comp.points) != 4:
        raise GenericityError("a sundial needs P, A, B and a fourth point spanning T")
    if small_rank(comp.points.tolist(), F.p) != 4:
        raise GenericityError("sundial 3-space T is degenerate; it must not collapse onto the conic's plane")
    return substitution_rows(comp.frame, sundial_targets(basis.n, basis.d), basis, F)


def rows_for_conic(comp: SampledComponent, basis: MonomialBasis, field: PrimeField | int | None = None) -> np.ndarray:
    return substitution_rows(comp.frame, _conic_targets(basis.n, basis.d), basis, as_field(field))


def component_rows(comp: SampledComponent, basis: MonomialBasis, field: PrimeField | int | None = None) -> np.ndarray:
    F = as_field(field)
    kind = comp.spec.kind
    if kind is Kind.LINE:
        return rows_for_line(comp.points, basis, F)
    if kind is Kind.FAT_SPACE:
        return rows_for_fat_space(comp.frame, comp.spec.r, comp.spec.m, basis, F)
    if kind is Kind.FAT_POINT:
        return rows_for_fat_space(comp.frame, 0, comp.spec.m, basis, F)
    if kind is Kind.COLLINEAR:
        return rows_for_collinear_points(comp.extra, basis, F)
    if kind is Kind.SUNDIAL:
        return rows_for_sundial(comp, basis, F)
    if kind is Kind.CONIC:
        return rows_for_conic(comp, basis, F)
    raise ValueError(f"unknown component kind {kind!r}")


def assemble_matrix(config: SchemeConfig, seed, field: PrimeField | int | None = None) -> ConditionMatrix:
    """Sample ``config`` and stack every component's rows.

    Within the range of ``expected_counts`` the row count equals its HP.
    A multiplicity above d+1 simply selects every monomial. Lines are
    batched through one evaluation pass.
    """
    F = as_field(field)
    n, d = config.n, config.d
    basis = enumerate_basis(n, d)
    comps = sample_config(config, seed, F)
    blocks, owners = [], []
    line_idx = [i for i, c in enumerate(comps) if c.spec.kind is Kind.LINE]
    if line_idx:
        blocks.append(rows_for_lines([comps[i].points for i in line_idx], basis, F))
        for i in line_idx:
            owners.extend([i] * (d + 1))
    for i, c in enumerate(comps):
        if c.spec.kind is Kind.LINE:
            continue
        rows = component_rows(c, basis, F)
        blocks.append(rows)
        owners.extend([i] * len(rows))
    data = np.concatenate(blocks) if blocks else np.zeros((0, len(basis)), dtype=F.dtype)
    return ConditionMatrix(n, d, F.p, data, tuple(owners))
