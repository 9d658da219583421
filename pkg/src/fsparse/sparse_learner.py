"""Two-phase exact learner for k-Fourier-sparse Boolean functions.

Phase 1 grows the Fourier span from Fourier samples (one simulated quantum
example each, half of them rejected). Phase 2 moves to the span's basis, where
the target has only ``r`` influential variables, and recovers every
coefficient from uniform classical examples.

Phase 2 here is a desk-scale substitute for the list-decoding learner used in
the analysis: ``estimate_round`` takes m = ceil(8 k^2 (r ln 2 + ln(2 4^r/delta)))
examples, a Hoeffding budget for rounding radius 2^-floor(log2 k). That is
quadratic in k rather than k log k, by design. ``coupon_collector`` waits until
all 2^r reduced inputs are seen and transforms the table exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import f2linalg as f2
from .boolfourier import (
    SparseSpectrum,
    SpanBasis,
    TruthTable,
    fourier_dim,
    granularity_check,
    grid_step,
    is_boolean,
    lift,
    norm_k,
    spectra_equal,
    wht,
    wht_int,
)
from .errors import BudgetExhausted, NotBooleanResult
from .oracle_sim import ExampleOracle, SampleLog, split_rng

PHASE2_MODES = ("estimate_round", "coupon_collector")


@dataclass
class LearnerConfig:
    k: int
    r_bound: int | None = None
    delta: float = 1 / 3
    phase2_mode: str = "estimate_round"
    stall_factor: float = 3.0
    max_quantum_examples: int = 1_000_000
    max_classical_examples: int = 10_000_000

    def __post_init__(self):
        self.k = norm_k(self.k)
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.phase2_mode not in PHASE2_MODES:
            raise ValueError(f"phase2_mode must be one of {PHASE2_MODES}")
        if self.stall_factor <= 0:
            raise ValueError("stall_factor must be positive")


@dataclass
class LearnerResult:
    spectrum: SparseSpectrum
    span: SpanBasis
    B: f2.F2Matrix
    log: SampleLog
    success_selfreport: bool
    phase1_quantum_examples: int = 0
    phase2_classical_examples: int = 0
    span_history: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)


def dimension_cap(n: int, k: int) -> int:
    """min(n, ceil(2 sqrt(k) log2 k)): prior bound on the Fourier dimension."""
    k = norm_k(k)
    return max(1, min(n, math.ceil(2 * math.sqrt(k) * math.log2(k))))


def stall_length(n: int, k: int, delta: float, stall_factor: float = 3.0) -> int:
    """Consecutive in-span accepted samples after which phase 1 stops.

    Each stage with an incomplete span escapes with probability at least
    1/(k log2 k), so the chance of stalling early at any of at most r_max
    stages is bounded by r_max (delta1/r_max)^stall_factor with delta1 = delta/2.
    """
    k = norm_k(k)
    r_max = dimension_cap(n, k)
    return math.ceil(stall_factor * k * math.log2(k) * math.log(r_max / (delta / 2)))


def phase1_reference(k: int, r: int) -> float:
    """4 k log2 k (ln r + 1): expected phase-1 quantum examples, 2x for rejection."""
    k = norm_k(k)
    return 4 * k * math.log2(k) * (math.log(max(r, 1)) + 1)


def learn_span(
    oracle: ExampleOracle,
    cfg: LearnerConfig,
    rng: np.random.Generator,
    history: list | None = None,
) -> tuple[SpanBasis, SampleLog]:
    """Accumulate accepted Fourier samples that leave the current span.

    If ``history`` is a list, a (quantum examples used, basis) snapshot is
    appended at the start and after each dimension increase.
    """
    n, log = oracle.n, oracle.log
    stall = stall_length(n, cfg.k, cfg.delta, cfg.stall_factor)
    target_dim = min(cfg.r_bound, n) if cfg.r_bound is not None else None
    basis = f2.XorBasis()
    start = log.quantum_examples_used
    if history is not None:
        history.append((0, ()))
    quiet = 0
    while True:
        if target_dim is not None and len(basis) >= target_dim:
            break
        if quiet >= stall or len(basis) == n:
            break
        if log.quantum_examples_used - start >= cfg.max_quantum_examples:
            raise BudgetExhausted(f"phase 1 hit {cfg.max_quantum_examples} quantum examples")
        S = oracle.fourier_sample(rng)
        if S is None:
            continue
        if basis.add(S):
            quiet = 0
            if history is not None:
                history.append((log.quantum_examples_used - start, tuple(basis.vectors)))
        else:
            quiet += 1
    return SpanBasis(n, tuple(basis.vectors)), log


def reduce_example(x: int, y: int, B: f2.F2Matrix, r: int) -> tuple[int, int]:
    """z = first r coordinates of B^T x; the label is unchanged."""
    z = 0
    for j in range(r):
        z = (z << 1) | f2.dot(B.column(j), x)
    return z, y


def _column_ints(B: f2.F2Matrix, r: int) -> list[int]:
    return [B.column(j) for j in range(r)]


def _reduce_batch(xs: np.ndarray, cols: list[int]) -> np.ndarray:
    z = np.zeros(xs.shape, dtype=np.int64)
    for c in cols:
        z = (z << 1) | (np.bitwise_count(xs & np.uint64(c)) & 1).astype(np.int64)
    return z


def estimate_budget(r: int, k: int, delta: float) -> int:
    k = norm_k(k)
    return math.ceil(8 * k * k * (r * math.log(2) + math.log(2 * 4**r / delta)))


def phase2_estimate(
    oracle: ExampleOracle,
    B: f2.F2Matrix,
    r: int,
    k: int,
    delta: float,
    rng: np.random.Generator,
) -> SparseSpectrum:
    """Empirical-correlation estimate of every reduced coefficient, rounded to grid."""
    m = estimate_budget(r, k, delta)
    xs, ys = oracle.uniform_examples(rng, m)
    z = _reduce_batch(xs, _column_ints(B, r))
    sums = np.bincount(z, weights=ys, minlength=1 << r).astype(np.int64)
    corr = wht_int(sums)  # corr[Q] = sum_j y_j chi_Q(z_j)
    step = grid_step(k)
    coeffs = {}
    for Q, c in enumerate(corr):
        # nearest multiple of step to c/m, computed exactly
        units = round(Fraction(int(c), m) / step)
        if units:
            coeffs[Q] = units * step
    g = SparseSpectrum(r, coeffs)
    if not is_boolean(g):
        raise NotBooleanResult(f"rounded estimate from {m} examples is not Boolean")
    return g


def phase2_coupon(
    oracle: ExampleOracle,
    B: f2.F2Matrix,
    r: int,
    rng: np.random.Generator,
    max_examples: int = 10_000_000,
) -> SparseSpectrum:
    """Collect reduced examples until every z in {0,1}^r is seen, then transform."""
    table: dict[int, int] = {}
    size = 1 << r
    cols = _column_ints(B, r)
    drawn = 0
    while len(table) < size:
        if drawn >= max_examples:
            raise BudgetExhausted(f"coupon phase saw {len(table)}/{size} inputs")
        x, y = oracle.uniform_example(rng)
        drawn += 1
        z = 0
        for c in cols:
            z = (z << 1) | f2.dot(c, x)
        prev = table.setdefault(z, y)
        if prev != y:
            # the reduced function is not a function of z: span was incomplete
            raise NotBooleanResult("reduced examples disagree; Fourier span is incomplete")
    return wht(TruthTable(r, tuple(table[z] for z in range(size))))


def learn(
    oracle: ExampleOracle,
    cfg: LearnerConfig,
    seed=None,
    history: list | None = None,
) -> LearnerResult:
    """Span learning, basis completion, phase 2, and lift back to n variables."""
    n = oracle.n
    rng1, rng2 = split_rng(seed, 2)
    log = oracle.log
    if log.seed is None and isinstance(seed, int):
        log.seed = seed
    span_hist: list = [] if history is None else history
    span, _ = learn_span(oracle, cfg, rng1, span_hist)
    q1 = log.quantum_examples_used
    c0 = log.classical_examples_used
    B = f2.complete_basis(span.vectors, n)
    r = span.dim
    if cfg.phase2_mode == "estimate_round":
        g = phase2_estimate(oracle, B, r, cfg.k, cfg.delta / 2, rng2)
    else:
        g = phase2_coupon(oracle, B, r, rng2, cfg.max_classical_examples)
    spectrum = lift(g, B, n)
    ok = (
        spectrum.sparsity <= cfg.k
        and fourier_dim(spectrum) == r
        and granularity_check(spectrum, cfg.k)
        and is_boolean(spectrum)
    )
    return LearnerResult(
        spectrum=spectrum,
        span=span,
        B=B,
        log=log,
        success_selfreport=ok,
        phase1_quantum_examples=q1,
        phase2_classical_examples=log.classical_examples_used - c0,
        span_history=span_hist,
    )


def run_planted(
    n: int,
    k: int,
    r_core: int,
    seed: int,
    cfg: LearnerConfig | None = None,
    exact_dim: bool = False,
) -> dict:
    """One seeded planted experiment; returns the per-run record."""
    from .boolfourier import random_sparse_function

    cfg = cfg or LearnerConfig(k=k)
    inst_seed, learn_seed = np.random.SeedSequence(seed).spawn(2)
    target = random_sparse_function(n, k, r_core, inst_seed, exact_dim=exact_dim)
    oracle = ExampleOracle(target, SampleLog(seed=seed))
    record = {
        "seed": seed,
        "n": n,
        "k": k,
        "r_true": fourier_dim(target),
        "r_found": None,
        "phase1_quantum_examples": None,
        "phase2_classical_examples": None,
        "exact_match": False,
        "mode": cfg.phase2_mode,
        "status": "ok",
    }
    try:
        res = learn(oracle, cfg, learn_seed)
    except (NotBooleanResult, BudgetExhausted) as exc:
        record.update(
            r_found=None,
            phase1_quantum_examples=oracle.log.quantum_examples_used,
            phase2_classical_examples=oracle.log.classical_examples_used,
            status=type(exc).__name__,
        )
        return record
    record.update(
        r_found=res.span.dim,
        phase1_quantum_examples=res.phase1_quantum_examples,
        phase2_classical_examples=res.phase2_classical_examples,
        exact_match=spectra_equal(res.spectrum, target),
    )
    return record
