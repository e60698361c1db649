"""Trial orchestration, verdicts, and the cross-checking audits.

A trial samples the configuration afresh and computes the rank of its
condition matrix. Reaching the expected rank ``min(N, HP)`` in any trial
certifies maximal rank over GF(p) (and hence in characteristic zero, since
rank can only drop under reduction mod p). Falling short in every trial is
evidence of a defect, not a proof.

Trial ``t`` of a run with seed ``s`` draws from ``SeedSequence([s, t])``, so
every trial is reproducible on its own and independent of execution order.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import comb

import numpy as np

from .combinatorics import ExpectedCounts, classify_exception, expected_counts, hh_admissible
from .config import ComponentSpec, Kind, QuadricConfig, SchemeConfig
from .errors import RangeError
from .horace import HoraceSplit, horace_split, quadric_h0
from .linalg import PrimeField, as_field
from .monomials import enumerate_basis
from .schemes import assemble_matrix

CERTIFY_TRIALS = 3
DEFECT_TRIALS = 7

CHAR_P_CAVEAT = (
    "probable defect (evidence only): ranks were computed over GF({p}); "
    "a rank deficit mod p does not prove a deficit in characteristic zero"
)


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    """Counter-based seed split: trial ``t`` of run ``seed`` uses SeedSequence([seed, t])."""
    return np.random.SeedSequence([int(seed), int(trial)])


@dataclass(frozen=True)
class PostulationVerdict:
    """Outcome of :func:`verify_postulation`.

    ``observed_h0`` uses the best (largest) rank over the trials that ran.
    ``virtual_defect`` compares against the unclamped count N - HP.
    """

    expected: ExpectedCounts
    observed_h0: int
    observed_h1: int
    defect: int
    virtual_defect: int
    trials_run: int
    certified: bool
    per_trial_ranks: tuple[int, ...]
    p: int
    note: str = ""

    @property
    def best_rank(self) -> int:
        return self.expected.N - self.observed_h0

    def per_trial_h0(self) -> list[int]:
        return [self.expected.N - r for r in self.per_trial_ranks]

    def per_trial_virtual_defects(self) -> list[int]:
        return [self.expected.HP - r for r in self.per_trial_ranks]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["expected"] = self.expected.to_dict()
        out["per_trial_ranks"] = list(self.per_trial_ranks)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> PostulationVerdict:
        data = dict(data)
        exp = data.pop("expected")
        data["expected"] = ExpectedCounts(N=exp["N"], HP=exp["HP"])
        data["per_trial_ranks"] = tuple(data["per_trial_ranks"])
        return cls(**data)


def _trial_ranks(config: SchemeConfig, trials: int, seed: int, F: PrimeField, target: int | None):
    ranks: list[int] = []
    for t in range(trials):
        M = assemble_matrix(config, trial_seed(seed, t), F)
        rk = M.rank() if M.shape[0] else 0
        ranks.append(rk)
        if target is not None and rk == target:
            break
    return ranks


def verify_postulation(
    config: SchemeConfig,
    trials: int = CERTIFY_TRIALS,
    seed: int = 0,
    field: PrimeField | int | None = None,
    *,
    stop_early: bool = True,
) -> PostulationVerdict:
    """Compare the observed rank of ``config`` with its expected rank.

    With ``stop_early`` the run ends at the first trial that reaches the
    expected rank; ``trials_run`` records how many ran.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    F = as_field(field)
    exp = expected_counts(config)
    target = exp.expected_rank
    ranks = _trial_ranks(config, trials, seed, F, target if stop_early else None)
    best = max(ranks)
    observed_h0 = exp.N - best
    certified = best == target
    return PostulationVerdict(
        expected=exp,
        observed_h0=observed_h0,
        observed_h1=exp.HP - best,
        defect=observed_h0 - exp.exp_h0,
        virtual_defect=observed_h0 - exp.virtual_h0,
        trials_run=len(ranks),
        certified=certified,
        per_trial_ranks=tuple(ranks),
        p=F.p,
        note="" if certified else CHAR_P_CAVEAT.format(p=F.p),
    )


def observed_h0(config: SchemeConfig, trials: int = CERTIFY_TRIALS, seed: int = 0, field=None) -> int:
    """Smallest h0 seen over the trials, with no expected count needed.

    Negative degree gives 0. Multiplicities beyond d+1 are allowed here.
    """
    if config.d < 0:
        return 0
    F = as_field(field)
    N = len(enumerate_basis(config.n, config.d))
    return N - max(_trial_ranks(config, trials, seed, F, N))


# --- audits ----------------------------------------------------------------


@dataclass(frozen=True)
class CastelnuovoAudit:
    lhs_h0: int
    residual_h0: int
    trace_h0: int
    inequality_holds: bool

    def to_dict(self) -> dict:
        return asdict(self)


def castelnuovo_audit(
    config: SchemeConfig,
    split: HoraceSplit | None = None,
    trials: int = CERTIFY_TRIALS,
    seed: int = 0,
    field: PrimeField | int | None = None,
) -> CastelnuovoAudit:
    """Check h0(X, d) <= h0(Res, d - e) + h0(Tr, d) on sampled data.

    ``split`` defaults to splitting along ``config.hypersurface``. The
    residual and the trace are sampled independently as generic members of
    their own configuration types.
    """
    F = as_field(field)
    if split is None:
        if config.hypersurface is None:
            raise ValueError("config declares no hypersurface to split along")
        split = horace_split(config, config.hypersurface)
    lhs = observed_h0(config, trials, seed, F)
    res = observed_h0(split.residual_config, trials, seed + 1, F)
    tr_cfg = split.trace_config
    if isinstance(tr_cfg, QuadricConfig):
        d = config.d
        tr = min(quadric_h0(tr_cfg, d, d, trial_seed(seed + 2, t), F) for t in range(trials))
    else:
        tr = observed_h0(tr_cfg, trials, seed + 2, F)
    return CastelnuovoAudit(lhs, res, tr, lhs <= res + tr)


@dataclass(frozen=True)
class QuadricCheck:
    admissible: bool
    certified_vanishing: bool
    observed_h0: int

    def to_dict(self) -> dict:
        return asdict(self)


def hh_cross_check(
    alpha: int,
    beta: int,
    gamma: int,
    delta: int,
    d: int,
    trials: int = CERTIFY_TRIALS,
    seed: int = 0,
    field: PrimeField | int | None = None,
) -> QuadricCheck:
    """Combinatorial admissibility next to an actual rank test in bidegree (d, d)."""
    F = as_field(field)
    spec = QuadricConfig(alpha, beta, gamma, delta)
    best = None
    for t in range(trials):
        h = quadric_h0(spec, d, d, trial_seed(seed, t), F)
        best = h if best is None else min(best, h)
        if best == 0:
            break
    return QuadricCheck(hh_admissible(alpha, beta, gamma, delta, d), best == 0, best)


def sundial_audit(
    x: int, y: int, n: int, d: int, trials: int = CERTIFY_TRIALS, seed: int = 0, field=None
) -> PostulationVerdict:
    """Verdict for x generic sundials and y generic lines in P^n."""
    if n < 3:
        raise RangeError(f"sundials need n >= 3, got n={n}")
    return verify_postulation(SchemeConfig.build(n, d, lines=y, sundials=x), trials, seed, field)


@dataclass(frozen=True)
class ProjectionAudit:
    h0_full: int
    h0_projected: int
    equal: bool

    def to_dict(self) -> dict:
        return asdict(self)


def projection_audit_d2(
    n: int, s: int, trials: int = CERTIFY_TRIALS, seed: int = 0, field=None
) -> ProjectionAudit:
    """Quadrics through a double line and s lines in P^n versus quadrics through s lines in P^{n-2}.

    Projecting from the double line identifies the two linear systems.
    """
    if n < 4 or s < 0:
        raise RangeError(f"projection audit needs n >= 4 and s >= 0, got n={n}, s={s}")
    full = observed_h0(SchemeConfig.build(n, 2, lines=s, double_line=True), trials, seed, field)
    proj = observed_h0(SchemeConfig.build(n - 2, 2, lines=s), trials, seed, field)
    return ProjectionAudit(full, proj, full == proj)


@dataclass(frozen=True)
class ConjectureAudit:
    verdict: PostulationVerdict
    exceptional: bool
    predicted_virtual_defect: int
    matches_C_s_2: bool

    def to_dict(self) -> dict:
        return dict(
            verdict=self.verdict.to_dict(),
            exceptional=self.exceptional,
            predicted_virtual_defect=self.predicted_virtual_defect,
            matches_C_s_2=self.matches_C_s_2,
        )


def conjecture_audit(
    n: int, r: int, m: int, s: int, trials: int = DEFECT_TRIALS, seed: int = 0, field=None
) -> ConjectureAudit:
    """One m-fold r-plane and s lines in P^n, tested in degree d = m.

    In the exceptional range every trial must show virtual defect C(s, 2).
    Elsewhere the configuration must certify with defect 0.
    """
    if r < 0 or n < r + 2 or n < 3 or m < 2 or s < 0:
        raise RangeError(f"need n >= r+2 >= 3, m >= 2, s >= 0; got n={n}, r={r}, m={m}, s={s}")
    cls = classify_exception(n, m, r, m, s)
    spec = ComponentSpec.fat_point(m) if r == 0 else ComponentSpec.fat_space(r, m)
    lines = tuple(ComponentSpec.line() for _ in range(s))
    config = SchemeConfig(n, m, (spec,) + lines)
    verdict = verify_postulation(config, trials, seed, field, stop_early=not cls.exceptional)
    if cls.exceptional:
        ok = all(v == comb(s, 2) for v in verdict.per_trial_virtual_defects())
    else:
        ok = verdict.certified and verdict.defect == 0
    return ConjectureAudit(verdict, cls.exceptional, cls.virtual_defect, ok)


# --- expectations for whole configurations ---------------------------------


def expected_exception(config: SchemeConfig):
    """Classifier verdict when ``config`` is one fat linear space plus lines, else None.

    ``None`` means no exception list applies and certification is expected.
    """
    fats = [c for c in config.components if c.kind in (Kind.FAT_SPACE, Kind.FAT_POINT)]
    lines = [c for c in config.components if c.kind is Kind.LINE]
    if len(fats) != 1 or len(fats) + len(lines) != len(config.components):
        return None
    fat = fats[0]
    r = fat.r if fat.kind is Kind.FAT_SPACE else 0
    if config.n < max(r + 2, 3):
        return None
    return classify_exception(config.n, config.d, r, fat.m, len(lines))


def verdict_matches(verdict: PostulationVerdict, exception) -> bool:
    """True when the verdict agrees with the classifier (or certifies, if none applies)."""
    if exception is not None and exception.exceptional:
        return verdict.virtual_defect == exception.virtual_defect
    return verdict.certified
