"""Brute-force checks of the structural bounds behind the sparse learner.

All comparisons against ``log2`` of a rational are decided exactly: for
a = p/q and x > 0, ``a <= log2 x`` iff ``2^p <= x^q``. Natural-log bounds are
compared in floating point.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from itertools import chain, combinations
from typing import Iterable, Sequence

import numpy as np

from . import f2linalg as f2
from .boolfourier import (
    SparseSpectrum,
    alpha,
    fourier_dim,
    granularity_check,
    norm_k,
    wht_int,
)
from .errors import SubsetNotInSupport, TooLarge

CHECKS = ("improved", "original", "weight", "granularity")
MAX_SCAN_N = 4


def le_log2(a: Fraction, x: Fraction) -> bool:
    """Exact test of a <= log2(x) for rational a and rational x > 0.

    Near-ties are settled by comparing 2^p with x^q (a = p/q) when the powers
    stay small. With a large q, equality is impossible for rational x, so a
    120-digit decimal logarithm decides.
    """
    a, x = Fraction(a), Fraction(x)
    if x <= 0:
        raise ValueError("log of non-positive number")
    gap = math.log2(x.numerator) - math.log2(x.denominator) - float(a)
    if abs(gap) > 1e-9:
        return gap > 0
    p, q = a.numerator, a.denominator
    if q * max(x.numerator.bit_length(), x.denominator.bit_length()) <= 1 << 16:
        lhs = x.denominator**q
        rhs = x.numerator**q
        if p >= 0:
            return (lhs << p) <= rhs
        return lhs <= (rhs << -p)
    with localcontext() as ctx:
        ctx.prec = 120
        ln2 = Decimal(2).ln()
        fine = (Decimal(x.numerator).ln() - Decimal(x.denominator).ln()) / ln2
        return fine - Decimal(p) / Decimal(q) > 0


def _klogk(k: int) -> float:
    return k * math.log2(k)


def verify_improved_chang(s: SparseSpectrum) -> tuple[bool, float]:
    """Check Fdim <= 2 alpha k log2 k; returns (holds, bound - r).

    Constant functions report (True, 0.0).
    """
    k = norm_k(s.sparsity)
    a = alpha(s)
    r = fourier_dim(s)
    if a == 0:
        return r == 0, 0.0
    holds = le_log2(Fraction(r) / (2 * a * k), Fraction(k))
    return holds, 2 * float(a) * _klogk(k) - r


def chang_lhs_dim(s: SparseSpectrum, threshold: Fraction) -> int:
    return f2.rank_of(S for S, c in s.coeffs.items() if abs(c) >= threshold)


def verify_chang_original(
    s: SparseSpectrum, rho, log_base: str | int = 2, convention: str = "indicator"
) -> bool:
    """dim span{S : |f^(S)| >= rho alpha} <= 2 log(1/alpha) / rho^2.

    With ``convention="indicator"`` rho is measured against the 0/1 indicator
    of f^-1(-1), whose nonconstant coefficients are f^(S)/2; the threshold on
    |f^(S)| becomes 2 rho alpha. ``"literal"`` applies the threshold rho alpha
    to the ±1 coefficients directly, which is false already for f = -chi_S
    at rho = 2.

    Constant functions hold trivially (alpha = 0 makes the bound infinite;
    alpha = 1 leaves only the empty character in the support).
    """
    rho = Fraction(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    if convention not in ("indicator", "literal"):
        raise ValueError("convention must be 'indicator' or 'literal'")
    a = alpha(s)
    if a == 0:
        return True
    threshold = rho * a * (2 if convention == "indicator" else 1)
    dim = chang_lhs_dim(s, threshold)
    if a == 1:
        return dim == 0
    if log_base in (2, "2"):
        return le_log2(dim * rho * rho / 2, 1 / a)
    if log_base in ("e", math.e):
        return dim <= 2 * math.log(1 / float(a)) / float(rho) ** 2
    raise ValueError("log_base must be 2 or 'e'")


def in_span_weight(s: SparseSpectrum, subset: Sequence[int]) -> tuple[Fraction, int]:
    basis = f2.XorBasis(subset)
    w = sum((c * c for S, c in s.coeffs.items() if S in basis), Fraction(0))
    return w, len(basis)


def _weight_holds(w: Fraction, r: int, r_sub: int, k: int) -> bool:
    if r == r_sub:
        return w <= 1
    if w >= 1:
        return False
    return le_log2(Fraction(r - r_sub) / ((1 - w) * k), Fraction(k))


def verify_weight_bound(s: SparseSpectrum, subset: Sequence[int]) -> bool:
    """In-span weight W <= 1 - (r - r')/(k log2 k) for a subset of the support."""
    if any(S not in s.coeffs for S in subset):
        raise SubsetNotInSupport("subset must be drawn from supp(f^)")
    w, r_sub = in_span_weight(s, subset)
    return _weight_holds(w, fourier_dim(s), r_sub, norm_k(s.sparsity))


def dimension_ratio(s: SparseSpectrum) -> float:
    """r / (sqrt(k) log2 k); reported only, the asymptotic constant is unknown."""
    k = norm_k(s.sparsity)
    return fourier_dim(s) / (math.sqrt(k) * math.log2(k))


@dataclass
class ChangReport:
    n: int
    which: tuple[str, ...]
    functions_checked: int = 0
    checks_run: dict[str, int] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)
    max_tightness: float = 0.0
    max_dimension_ratio: float = 0.0
    base_disagreements: int = 0
    literal_form_failures: int = 0
    dominance_eligible: int = 0
    dominance_improved_smaller: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "ChangReport") -> "ChangReport":
        checks = dict(self.checks_run)
        for key, v in other.checks_run.items():
            checks[key] = checks.get(key, 0) + v
        return ChangReport(
            n=self.n,
            which=self.which,
            functions_checked=self.functions_checked + other.functions_checked,
            checks_run=checks,
            violations=self.violations + other.violations,
            max_tightness=max(self.max_tightness, other.max_tightness),
            max_dimension_ratio=max(self.max_dimension_ratio, other.max_dimension_ratio),
            base_disagreements=self.base_disagreements + other.base_disagreements,
            literal_form_failures=self.literal_form_failures + other.literal_form_failures,
            dominance_eligible=self.dominance_eligible + other.dominance_eligible,
            dominance_improved_smaller=self.dominance_improved_smaller
            + other.dominance_improved_smaller,
        )

    def to_json(self) -> dict:
        d = asdict(self)
        d["which"] = list(self.which)
        d["checks_run"] = dict(sorted(self.checks_run.items()))
        d["ok"] = self.ok
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["table_id", "check", "quantity", "bound", "detail"])
        for v in self.violations:
            w.writerow([v["table_id"], v["check"], v["quantity"], v["bound"], v.get("detail", "")])
        return buf.getvalue()


def _subsets(items: Sequence[int]) -> Iterable[tuple[int, ...]]:
    return chain.from_iterable(combinations(items, m) for m in range(len(items) + 1))


@lru_cache(maxsize=None)
def _all_subspaces(n: int) -> tuple[tuple[tuple[int, ...], frozenset], ...]:
    out = []
    for d in range(n + 1):
        for basis in f2.iter_subspaces(n, d):
            out.append((basis, frozenset(f2.span_elements(basis))))
    return tuple(out)


def support_spans(support: Sequence[int], n: int) -> list[tuple[int, ...]]:
    """One generating subset per distinct span of subsets of ``support``.

    A subspace V is such a span exactly when supp ∩ V already spans V.
    """
    out = []
    for basis, members in _all_subspaces(n):
        inside = [S for S in support if S in members]
        gen = f2.independent_subset(inside)
        if len(gen) == len(basis):
            out.append(tuple(gen))
    return out


def _table_spectrum(n: int, raw_row: np.ndarray) -> SparseSpectrum:
    den = 1 << n
    return SparseSpectrum(n, {S: Fraction(int(w), den) for S, w in enumerate(raw_row) if w})


def check_function(s: SparseSpectrum, which: Sequence[str], table_id: int, report: ChangReport):
    """Run the selected checks on one spectrum, recording into ``report``."""
    k = norm_k(s.sparsity)
    a = alpha(s)
    r = fourier_dim(s)
    report.functions_checked += 1

    def bump(name):
        report.checks_run[name] = report.checks_run.get(name, 0) + 1

    def fail(name, quantity, bound, detail=""):
        report.violations.append(
            {"table_id": table_id, "check": name, "quantity": str(quantity),
             "bound": repr(float(bound)), "detail": detail}
        )

    if "improved" in which:
        bump("improved")
        holds, _ = verify_improved_chang(s)
        bound = 2 * float(a) * _klogk(k)
        if not holds:
            fail("improved", r, bound)
        if a > 0:
            report.max_tightness = max(report.max_tightness, r / bound)
        report.max_dimension_ratio = max(report.max_dimension_ratio, dimension_ratio(s))
        # improved bound vs Chang's cap at rho alpha = 1/k, in the alpha <= k^-3/4 regime
        if 0 < a < 1 and float(a) <= k ** -0.75:
            report.dominance_eligible += 1
            original_cap = 2 * float(a) ** 2 * k * k * math.log2(1 / float(a))
            if bound < original_cap:
                report.dominance_improved_smaller += 1

    if "original" in which and 0 < a < 1:
        # every distinct nonconstant coefficient size is a threshold; on the
        # indicator scale that is |f^(S)|/2 = rho alpha
        for t in sorted({abs(c) for S, c in s.coeffs.items() if S}):
            rho = t / (2 * a)
            bump("original")
            ok2 = verify_chang_original(s, rho, 2)
            oke = verify_chang_original(s, rho, "e")
            if ok2 != oke:
                report.base_disagreements += 1
            dim = chang_lhs_dim(s, t)
            if not ok2:
                fail("original_log2", dim, 2 * math.log2(1 / float(a)) / float(rho) ** 2, f"rho={rho}")
            if not oke:
                fail("original_ln", dim, 2 * math.log(1 / float(a)) / float(rho) ** 2, f"rho={rho}")
            if not verify_chang_original(s, 2 * rho, 2, convention="literal"):
                report.literal_form_failures += 1

    if "weight" in which:
        # the bound depends on a subset only through its span, so past n = 3
        # one representative per distinct span is checked
        subsets = _subsets(s.support) if s.n <= 3 else support_spans(s.support, s.n)
        for sub in subsets:
            bump("weight")
            w, r_sub = in_span_weight(s, sub)
            if not _weight_holds(w, r, r_sub, k):
                fail("weight", w, 1 - (r - r_sub) / _klogk(k),
                     "subset=" + " ".join(f2.bitstring(v, s.n) for v in sub))

    if "granularity" in which:
        bump("granularity")
        if not granularity_check(s):
            fail("granularity", s.sparsity, 0)


def _scan_chunk(args) -> ChangReport:
    n, which, lo, hi = args
    size = 1 << n
    ids = np.arange(lo, hi, dtype=np.int64)
    bits = (ids[:, None] >> np.arange(size)) & 1
    raw = wht_int(1 - 2 * bits)
    report = ChangReport(n=n, which=tuple(which))
    for tid, row in zip(range(lo, hi), raw):
        check_function(_table_spectrum(n, row), which, tid, report)
    return report


def scan_all(n: int, which: str | Sequence[str] = "improved", jobs: int = 1, chunk: int = 4096) -> ChangReport:
    """Run the selected checks over every ±1 truth table on n <= 4 variables.

    Table id t encodes f(x) = -1 iff bit x of t is set.
    """
    if n > MAX_SCAN_N:
        raise TooLarge(f"exhaustive scan limited to n <= {MAX_SCAN_N}")
    if n < 1:
        raise ValueError("n must be positive")
    checks = CHECKS if which == "all" else ((which,) if isinstance(which, str) else tuple(which))
    for c in checks:
        if c not in CHECKS:
            raise ValueError(f"unknown check {c!r}; choose from {CHECKS} or 'all'")
    total = 1 << (1 << n)
    tasks = [(n, checks, lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_scan_chunk, tasks))
    else:
        parts = [_scan_chunk(t) for t in tasks]
    report = ChangReport(n=n, which=checks)
    for p in parts:
        report = report.merge(p)
    return report
