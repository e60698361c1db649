"""Monomial bases of degree-d forms and exact linear substitution.

The central routine is :func:`substitution_rows`. Given a frame ``G`` (an
invertible matrix whose columns are points of P^n) it expresses selected
coefficients of ``F(G y)`` as linear functionals of the coefficients of
``F``. When a scheme's ideal is a monomial ideal in the frame coordinates
``y``, the scheme's conditions are exactly "the coefficients of the
standard monomials vanish", so these rows are the condition rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .linalg import PrimeField

Exponent = tuple[int, ...]


def _compositions(total: int, parts: int) -> Iterable[Exponent]:
    # Lexicographically decreasing: x0^d first.
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class MonomialBasis:
    """Degree-d monomials in x_0..x_n, graded lexicographic (x_0 > x_1 > ...)."""

    n: int
    d: int
    exponents: np.ndarray = field(repr=False, compare=False)

    def __len__(self) -> int:
        return self.exponents.shape[0]

    @property
    def monomials(self) -> list[Exponent]:
        return [tuple(int(v) for v in row) for row in self.exponents]

    def index(self, exponent: Sequence[int]) -> int:
        return _index_map(self.n, self.d)[tuple(exponent)]


@lru_cache(maxsize=None)
def enumerate_basis(n: int, d: int) -> MonomialBasis:
    if n < 0 or d < 0:
        raise ValueError(f"need n >= 0 and d >= 0, got n={n}, d={d}")
    exps = np.array(list(_compositions(d, n + 1)), dtype=np.int64).reshape(-1, n + 1)
    assert exps.shape[0] == comb(n + d, n)
    exps.setflags(write=False)
    return MonomialBasis(n, d, exps)


@lru_cache(maxsize=None)
def _index_map(n: int, d: int) -> dict[Exponent, int]:
    return {m: i for i, m in enumerate(enumerate_basis(n, d).monomials)}


@lru_cache(maxsize=None)
def _lift_table(n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """For each degree-d monomial e: a variable i with e_i > 0 and the index of e - e_i."""
    exps = enumerate_basis(n, d).exponents
    prev = _index_map(n, d - 1)
    ivar = np.argmax(exps > 0, axis=1)
    parent = np.empty(len(exps), dtype=np.int64)
    for k, (e, i) in enumerate(zip(exps, ivar)):
        e = list(int(v) for v in e)
        e[i] -= 1
        parent[k] = prev[tuple(e)]
    ivar.setflags(write=False)
    parent.setflags(write=False)
    return ivar, parent


def power_table(points: np.ndarray, d: int, field: PrimeField) -> np.ndarray:
    """``out[k, i, e] = points[k, i] ** e`` mod p for e = 0..d."""
    p = field.p
    K, m = points.shape
    out = np.empty((K, m, d + 1), dtype=field.dtype)
    out[:, :, 0] = 1
    for e in range(1, d + 1):
        out[:, :, e] = out[:, :, e - 1] * points % p
    return out


def evaluate(points, basis: MonomialBasis, field: PrimeField) -> np.ndarray:
    """Matrix of every basis monomial evaluated at every point (one row per point)."""
    pts = field.asarray(points).reshape(-1, basis.n + 1)
    pw = power_table(pts, basis.d, field)
    exps = basis.exponents
    out = pw[:, 0, exps[:, 0]]
    for i in range(1, basis.n + 1):
        out = out * pw[:, i, exps[:, i]] % field.p
    return out


def down_closure(targets: Iterable[Exponent]) -> list[list[Exponent]]:
    """Levels 0..d of the order ideal generated by ``targets`` (all of degree d)."""
    top = sorted(set(targets), reverse=True)
    if not top:
        return []
    levels = [top]
    while sum(levels[0][0]) > 0:
        below = set()
        for f in levels[0]:
            for j, fj in enumerate(f):
                if fj:
                    below.add(f[:j] + (fj - 1,) + f[j + 1:])
        levels.insert(0, sorted(below, reverse=True))
    return levels


def substitution_rows(frame, targets: Sequence[Exponent], basis: MonomialBasis, field: PrimeField) -> np.ndarray:
    """Rows R with ``R @ coeffs(F) == [coefficient of y^t in F(frame @ y) for t in targets]``.

    ``targets`` are exponent vectors of degree ``basis.d``; rows come back
    in the given order. Cost is linear in the size of the order ideal the
    targets generate, times the number of monomials per degree.
    """
    n, d, p = basis.n, basis.d, field.p
    G = field.asarray(frame)
    if G.shape != (n + 1, n + 1):
        raise ValueError(f"frame must be {(n + 1, n + 1)}, got {G.shape}")
    targets = [tuple(int(v) for v in t) for t in targets]
    if not targets:
        return np.zeros((0, len(basis)), dtype=field.dtype)
    if any(sum(t) != d or len(t) != n + 1 for t in targets):
        raise ValueError("every target must be an exponent vector of degree d in n+1 variables")
    levels = down_closure(targets)
    S = np.ones((1, 1), dtype=field.dtype)
    for k in range(1, d + 1):
        cur, prev = levels[k], levels[k - 1]
        prev_idx = {f: i for i, f in enumerate(prev)}
        ivar, parent = _lift_table(n, k)
        coeff = G[ivar, :]  # coeff[e, j] = G[i(e), j]
        S_new = np.zeros((len(cur), len(ivar)), dtype=field.dtype)
        for j in range(n + 1):
            rows = [a for a, f in enumerate(cur) if f[j]]
            if not rows:
                continue
            src = [prev_idx[cur[a][:j] + (cur[a][j] - 1,) + cur[a][j + 1:]] for a in rows]
            contrib = S[np.ix_(src, parent)] * coeff[None, :, j] % p
            S_new[rows] = (S_new[rows] + contrib) % p
        S = S_new
    order = {f: i for i, f in enumerate(levels[d])}
    return S[[order[t] for t in targets]]


def coordinate_targets(n: int, d: int, support: Sequence[int]) -> list[Exponent]:
    """Degree-d monomials using only the variables in ``support``."""
    out = []
    for m in enumerate_basis(n, d).monomials:
        if all(m[i] == 0 for i in range(n + 1) if i not in support):
            out.append(m)
    return out


def normal_degree_targets(n: int, d: int, r: int, m: int) -> list[Exponent]:
    """Degree-d monomials whose degree in y_{r+1}..y_n is below m."""
    return [e for e in enumerate_basis(n, d).monomials if sum(e[r + 1:]) < m]
