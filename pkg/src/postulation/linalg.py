"""Exact dense linear algebra over a prime field GF(p).

Matrices are plain 2-D numpy arrays whose entries lie in ``[0, p)``. For
``p*p < 2**63`` they are int64 and every product fits without overflow; for
larger primes the same code runs on Python-int object arrays (slow, exact).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

DEFAULT_PRIME = 2_147_483_647  # 2^31 - 1
PRIME_ENV_VAR = "POSTULATION_PRIME"

# Largest p with p*p < 2^63, so a*b and a - b*c stay inside int64.
_INT64_SAFE = 3_037_000_499

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin; exact for every p below 3.3e24."""
    if p < 2:
        return False
    for b in _MR_BASES:
        if p % b == 0:
            return p == b
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field GF(p). Immutable and safe to share between threads."""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if self.p >= 2**63:
            raise ValueError(f"prime must be below 2^63, got {self.p}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def dtype(self):
        return np.int64 if self.p <= _INT64_SAFE else object

    def asarray(self, a) -> np.ndarray:
        """Copy ``a`` into a fresh array of field elements, reduced mod p."""
        if self.dtype is object:
            arr = np.array(a, dtype=object)
            return np.vectorize(lambda v: int(v) % self.p, otypes=[object])(arr) if arr.size else arr
        return np.array(a, dtype=np.int64) % self.p

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Uniform field elements."""
        if self.dtype is object:
            flat = [int(v) for v in rng.integers(0, self.p, size=int(np.prod(shape)), dtype=np.uint64)]
            return np.array(flat, dtype=object).reshape(shape)
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def random_nonzero(self, rng: np.random.Generator, shape) -> np.ndarray:
        out = self.random(rng, shape)
        while True:
            zero = out == 0
            if not np.any(zero):
                return out
            out[zero] = self.random(rng, int(np.count_nonzero(zero)))

    def inverse(self, a: int) -> int:
        return field_inverse(a, self.p)


def default_field() -> PrimeField:
    """The field named by $POSTULATION_PRIME, or GF(2^31 - 1)."""
    raw = os.environ.get(PRIME_ENV_VAR)
    return PrimeField(int(raw)) if raw else PrimeField(DEFAULT_PRIME)


def as_field(field: PrimeField | int | None) -> PrimeField:
    if field is None:
        return default_field()
    if isinstance(field, PrimeField):
        return field
    return PrimeField(int(field))


def field_inverse(a: int, p: int) -> int:
    """Multiplicative inverse of ``a`` modulo the prime ``p``."""
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(p)")
    return pow(a, p - 2, p)


def rank(M, field: PrimeField | int | None = None) -> int:
    """Rank of ``M`` over GF(p), by Gaussian elimination on a private copy.

    The pivot in each column is the first nonzero entry at or below the
    current row. The input is never modified.
    """
    F = as_field(field)
    A = F.asarray(M)
    if A.ndim != 2:
        raise ValueError(f"rank needs a 2-D matrix, got shape {A.shape}")
    return _rank_inplace(A, F.p)


def _rank_inplace(A: np.ndarray, p: int) -> int:
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        prow = A[r, c:] * pow(int(A[r, c]), p - 2, p) % p
        A[r, c:] = prow
        below = r + 1 + np.flatnonzero(A[r + 1:, c])
        if below.size:
            f = A[below, c][:, None]
            A[below, c:] = (A[below, c:] - f * prow[None, :]) % p
        r += 1
    return r


def random_matrix(rows: int, cols: int, seed, field: PrimeField | int | None = None) -> np.ndarray:
    F = as_field(field)
    return F.random(np.random.default_rng(seed), (rows, cols))


def random_invertible(size: int, seed, field: PrimeField | int | None = None, max_tries: int = 64) -> np.ndarray:
    """A uniformly random invertible ``size x size`` matrix, deterministic in ``seed``."""
    if size < 1:
        raise ValueError("size must be at least 1")
    F = as_field(field)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        G = F.random(rng, (size, size))
        if rank(G, F) == size:
            return G
    raise RuntimeError(f"no invertible {size}x{size} matrix in {max_tries} draws; is p tiny?")


def matmul(A: np.ndarray, B: np.ndarray, field: PrimeField | int | None = None) -> np.ndarray:
    """Exact product mod p, accumulated one inner index at a time to avoid overflow."""
    F = as_field(field)
    p = F.p
    A = F.asarray(A)
    B = F.asarray(B)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    out = np.zeros((A.shape[0], B.shape[1]), dtype=F.dtype)
    for k in range(A.shape[1]):
        out = (out + A[:, k, None] * B[None, k, :]) % p
    return out


def small_rank(rows: list[list[int]], p: int) -> int:
    """Rank of a tiny matrix given as nested lists; pure Python, no numpy overhead."""
    A = [[v % p for v in row] for row in rows]
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], p - 2, p)
        prow = [v * inv % p for v in A[r]]
        A[r] = prow
        for i in range(r + 1, len(A)):
            f = A[i][c]
            if f:
                A[i] = [(a - f * b) % p for a, b in zip(A[i], prow)]
        r += 1
        if r == len(A):
            break
    return r
