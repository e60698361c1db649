"""Closed-form counting: expected dimensions and the induction schedules.

Everything here is exact integer arithmetic on Python ints, so there is no
overflow to detect. No floating point is used anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .config import ComponentSpec, Kind, SchemeConfig
from .errors import RangeError


def binom(a: int, b: int) -> int:
    """Binomial coefficient that is zero outside ``0 <= b <= a``."""
    if b < 0 or a < 0 or b > a:
        return 0
    return comb(a, b)


@dataclass(frozen=True)
class AmbientParams:
    n: int
    d: int

    def __post_init__(self):
        if self.n < 2 or self.d < 1:
            raise RangeError(f"ambient needs n >= 2 and d >= 1, got n={self.n}, d={self.d}")

    @property
    def N(self) -> int:
        return comb(self.n + self.d, self.n)


def form_count(n: int, d: int) -> int:
    """Dimension of the space of degree-d forms in n+1 variables."""
    if n < 0 or d < 0:
        raise RangeError(f"form_count needs n, d >= 0, got n={n}, d={d}")
    return comb(n + d, n)


def fat_space_conditions(n: int, d: int, r: int, m: int) -> int:
    """Number of conditions an m-fold r-plane imposes on degree-d forms in P^n.

    Sum over i < m of C(r+d-i, r) * C(n+i-r-1, i): the count of degree-d
    monomials whose degree in the n-r normal variables is below m.
    """
    if not 0 <= r < n:
        raise RangeError(f"need 0 <= r < n, got r={r}, n={n}")
    if not 1 <= m <= d + 1:
        raise RangeError(f"need 1 <= m <= d+1, got m={m}, d={d}")
    return sum(comb(r + d - i, r) * comb(n + i - r - 1, i) for i in range(m))


def component_conditions(spec: ComponentSpec, n: int, d: int) -> int:
    """Virtual number of conditions one component imposes in degree d."""
    kind = spec.kind
    if kind is Kind.LINE:
        return d + 1
    if kind is Kind.FAT_SPACE:
        return fat_space_conditions(n, d, spec.r, spec.m)
    if kind is Kind.FAT_POINT:
        if spec.m > d + 1:
            raise RangeError(f"fat point multiplicity {spec.m} exceeds d+1={d + 1}")
        return comb(spec.m - 1 + n, n)
    if kind is Kind.COLLINEAR:
        return spec.q
    if kind is Kind.SUNDIAL:
        return 2 * (d + 1)
    if kind is Kind.CONIC:
        return 2 * d + 1
    raise ValueError(f"unknown component kind {kind!r}")


@dataclass(frozen=True)
class ExpectedCounts:
    N: int
    HP: int

    @property
    def virtual_h0(self) -> int:
        return self.N - self.HP

    @property
    def exp_h0(self) -> int:
        return max(self.N - self.HP, 0)

    @property
    def exp_h1(self) -> int:
        return max(self.HP - self.N, 0)

    @property
    def expected_rank(self) -> int:
        return min(self.N, self.HP)

    def to_dict(self) -> dict:
        return dict(
            N=self.N,
            HP=self.HP,
            exp_h0=self.exp_h0,
            exp_h1=self.exp_h1,
            virtual_h0=self.virtual_h0,
        )


def expected_counts(config: SchemeConfig) -> ExpectedCounts:
    """Naive condition count for ``config``; constraints are ignored."""
    n, d = config.n, config.d
    if n < 2:
        raise RangeError(f"need n >= 2, got n={n}")
    hp = sum(component_conditions(c, n, d) for c in config.components)
    return ExpectedCounts(N=form_count(n, d), HP=hp)


# --- induction schedules -------------------------------------------------


def th2_parameters(n: int, d: int) -> tuple[int, int]:
    """(r, q) with C(d+n, n) = (nd+1) + r(d+1) + q and 0 <= q <= d."""
    if n < 3 or d < 3:
        raise RangeError(f"square-case parameters need n >= 3 and d >= 3, got n={n}, d={d}")
    return divmod(comb(d + n, n) - (n * d + 1), d + 1)


def _check_residual_range(n: int, d: int) -> None:
    if not ((n >= 5 and d >= 3) or (n == 4 and d >= 5)):
        raise RangeError(f"residual schedule needs n >= 5, d >= 3 or n = 4, d >= 5; got n={n}, d={d}")


def residual_parameters(n: int, d: int) -> tuple[int, int, int]:
    """(r', q', x) for the hyperplane step: lines kept, sundials, lines moved into H."""
    _check_residual_range(n, d)
    r, q = th2_parameters(n, d)
    r_prime, q_prime = divmod(comb(d - 1 + n, n) - (n * (d - 1) + 1) - q, d)
    return r_prime, q_prime, r - r_prime - 2 * q_prime


def trace_parameters_pn(n: int, d: int) -> tuple[int, int]:
    """(r_bar, q_bar) for the second hyperplane step when n >= 5."""
    if n < 5 or d < 3:
        raise RangeError(f"trace schedule in P^n needs n >= 5 and d >= 3, got n={n}, d={d}")
    r, _ = th2_parameters(n, d)
    r_prime, _, _ = residual_parameters(n, d)
    return divmod(comb(d + n - 2, n - 2) - (n - 1) - r + r_prime, d)


def trace_parameters_p4(d: int) -> tuple[int, int]:
    """(r_hat, q_hat) for the quadric step inside the hyperplane when n = 4."""
    if d < 5:
        raise RangeError(f"quadric schedule for n = 4 needs d >= 5, got d={d}")
    _, q_prime, x = residual_parameters(4, d)
    return divmod((d + 1) ** 2 - (d + 2) * q_prime - 2 * x, d - 1)


@dataclass(frozen=True)
class ProofSchedule:
    n: int
    d: int
    r: int
    q: int
    r_prime: int | None = None
    q_prime: int | None = None
    x: int | None = None
    r_bar: int | None = None
    q_bar: int | None = None
    r_hat: int | None = None
    q_hat: int | None = None
    checklist: dict[str, bool] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(self.checklist.values())

    def parameters(self) -> dict[str, int]:
        names = ("r", "q", "r_prime", "q_prime", "x", "r_bar", "q_bar", "r_hat", "q_hat")
        return {k: getattr(self, k) for k in names if getattr(self, k) is not None}


# The report type for verify_schedule is the schedule itself, checklist included.
ChecklistReport = ProofSchedule


def verify_schedule(n: int, d: int) -> ProofSchedule:
    """Compute every schedule parameter and check each inequality it relies on.

    Raises :class:`RangeError` outside n = 4, d >= 5 and n >= 5, d >= 3.
    """
    _check_residual_range(n, d)
    r, q = th2_parameters(n, d)
    rp, qp, x = residual_parameters(n, d)
    checks = {
        "0 <= q <= d": 0 <= q <= d,
        "0 <= q' <= d-1": 0 <= qp <= d - 1,
        "r' >= 0": rp >= 0,
        "x = r-r'-2q' >= 0": x >= 0,
    }
    if n >= 5:
        rb, qb = trace_parameters_pn(n, d)
        checks.update({
            "r_bar >= 0": rb >= 0,
            "r_bar <= x": rb <= x,
            "r' >= q'+q_bar": rp >= qp + qb,
            "C(d+n-2,n-1) - (r-r'-r_bar)d = r'-q'-q_bar+1":
                comb(d + n - 2, n - 1) - (r - rp - rb) * d == rp - qp - qb + 1,
        })
        return ProofSchedule(n, d, r, q, rp, qp, x, r_bar=rb, q_bar=qb, checklist=checks)
    rh, qh = trace_parameters_p4(d)
    checks.update({
        "r_hat >= 0": rh >= 0,
        "r_hat <= x": rh <= x,
        "q_hat <= r'": qh <= rp,
        "q'+r_hat <= d": qp + rh <= d,
        "r'-q_hat = C(d+1,3) - 4 - (d-1)(r-r'-r_hat-q')":
            rp - qh == comb(d + 1, 3) - 4 - (d - 1) * (r - rp - rh - qp),
    })
    return ProofSchedule(n, d, r, q, rp, qp, x, r_hat=rh, q_hat=qh, checklist=checks)


# --- quadric criterion ---------------------------------------------------


def hh_conditions(alpha: int, beta: int, gamma: int, delta: int, d: int) -> dict[str, bool]:
    """Evaluate the four admissibility conditions separately."""
    if min(alpha, beta, gamma, delta, d) < 0:
        raise RangeError("quadric criterion arguments must be nonnegative")
    if d > alpha:
        # delta <= (d+1-gamma)/2 + (d-alpha-1)*floor((d+1)/2), cleared of the halving
        cond4 = 2 * delta <= (d + 1 - gamma) + 2 * (d - alpha - 1) * ((d + 1) // 2)
    else:
        cond4 = delta == 0
    return {
        "count": alpha * (d + 1) + beta + gamma + 3 * delta == (d + 1) ** 2,
        "delta <= d+1": delta <= d + 1,
        "gamma <= d+1": gamma <= d + 1,
        "double-point bound": cond4,
    }


def hh_admissible(alpha: int, beta: int, gamma: int, delta: int, d: int) -> bool:
    """True iff the quadric vanishing criterion applies to (alpha, beta, gamma, delta, d).

    Boundary: when d == alpha, the double-point bound falls in the "otherwise" branch
    and requires delta == 0.
    """
    return all(hh_conditions(alpha, beta, gamma, delta, d).values())


def admissible_tuples(d: int) -> list[tuple[int, int, int, int]]:
    """Every (alpha, beta, gamma, delta) with nonnegative entries admissible at degree d.

    The count condition determines beta, so the enumeration is over the other three.
    """
    out = []
    total = (d + 1) ** 2
    for alpha in range(d + 2):
        for gamma in range(d + 2):
            for delta in range(d + 2):
                beta = total - alpha * (d + 1) - gamma - 3 * delta
                if beta >= 0 and hh_admissible(alpha, beta, gamma, delta, d):
                    out.append((alpha, beta, gamma, delta))
    return out


# --- exceptional cases ---------------------------------------------------


@dataclass(frozen=True)
class ExceptionClass:
    exceptional: bool
    virtual_defect: int


def classify_exception(n: int, d: int, r: int, m: int, s: int) -> ExceptionClass:
    """Classify s generic lines plus one m-fold r-plane in P^n against degree d.

    Exceptional exactly when n = r+3, m = d and 2 <= s <= d, with virtual
    defect C(s, 2). ``r = 0`` (a fat point in P^3) is accepted: the same
    projection argument gives the same list.
    """
    if r < 0 or n < r + 2 or n < 3:
        raise RangeError(f"need n >= r+2 >= 3 (or r = 0, n >= 3), got n={n}, r={r}")
    if m < 1 or s < 0:
        raise RangeError(f"need m >= 1 and s >= 0, got m={m}, s={s}")
    if n == r + 3 and m == d and 2 <= s <= d:
        return ExceptionClass(True, comb(s, 2))
    return ExceptionClass(False, 0)


def conjecture_virtual_h0(n: int, r: int, m: int) -> int:
    """C(n+m, n) - C(n+m-r-1, n-r-1): the degree-m fat-space count in closed form."""
    if not 0 <= r < n:
        raise RangeError(f"need 0 <= r < n, got r={r}, n={n}")
    return comb(n + m, n) - comb(n + m - r - 1, n - r - 1)


# --- embedded reference tables -------------------------------------------

# Reference values typed in from the published tables, not recomputed, so the
# comparison in regenerate_tables() is a genuine regression check.
HYPERPLANE_X_TABLE: dict[int, int] = {
    5: 7, 6: 9, 7: 2, 8: 10, 9: 9, 10: 10, 11: 17,
    12: 9, 13: 30, 14: 34, 15: 17, 16: 35, 17: 32,
}
QUADRIC_RHAT_TABLE: dict[int, tuple[int, int]] = {  # d -> (r_hat, r - r' - 2q')
    5: (5, 7), 6: (6, 9), 7: (2, 2), 8: (5, 10), 9: (4, 9),
}
QUADRIC_BUDGET_TABLE: dict[int, tuple[int, int, int]] = {  # d -> (q', r_hat, q' + r_hat)
    5: (0, 5, 5), 6: (0, 6, 6), 7: (5, 2, 7), 8: (2, 5, 7), 9: (4, 4, 8), 10: (5, 4, 9),
}


def regenerate_tables() -> dict[str, dict[int, tuple[int, ...]]]:
    """Recompute the three reference tables from the schedule formulas."""
    a1 = {d: (residual_parameters(4, d)[2],) for d in HYPERPLANE_X_TABLE}
    a3_ii = {}
    for d in QUADRIC_RHAT_TABLE:
        rh, _ = trace_parameters_p4(d)
        a3_ii[d] = (rh, residual_parameters(4, d)[2])
    a3_iv = {}
    for d in QUADRIC_BUDGET_TABLE:
        rh, _ = trace_parameters_p4(d)
        qp = residual_parameters(4, d)[1]
        a3_iv[d] = (qp, rh, qp + rh)
    return {"x_n4": a1, "r_hat_vs_x": a3_ii, "q_prime_plus_r_hat": a3_iv}


def embedded_tables() -> dict[str, dict[int, tuple[int, ...]]]:
    return {
        "x_n4": {d: (v,) for d, v in HYPERPLANE_X_TABLE.items()},
        "r_hat_vs_x": dict(QUADRIC_RHAT_TABLE),
        "q_prime_plus_r_hat": dict(QUADRIC_BUDGET_TABLE),
    }
