"""Exact Fourier analysis of Boolean functions f: {0,1}^n -> {+1,-1}.

Coefficients are :class:`fractions.Fraction` values with power-of-two
denominators. Characters and inputs use the int-bitset convention of
:mod:`fsparse.f2linalg`; truth tables are indexed by ``x`` read as an
MSB-first integer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import f2linalg as f2
from .errors import NotBoolean, SingularMatrix, Unsatisfiable

MAX_DENSE_N = 20


def norm_k(k: int) -> int:
    """k = max(2, k): the convention wherever log2 k appears."""
    return max(2, int(k))


def grid_step(k: int) -> Fraction:
    """Granularity 2^(1 - floor(log2 k)) for k-sparse Boolean spectra."""
    k = norm_k(k)
    return Fraction(2) / (1 << (k.bit_length() - 1))


@dataclass(frozen=True)
class TruthTable:
    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.n <= MAX_DENSE_N:
            raise ValueError(f"n={self.n} outside dense range")
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) != 1 << self.n:
            raise ValueError("truth table must have 2^n entries")
        if any(v not in (1, -1) for v in self.values):
            raise ValueError("truth table entries must be +1 or -1")

    @classmethod
    def from_function(cls, n: int, fn) -> "TruthTable":
        return cls(n, tuple(fn(x) for x in range(1 << n)))

    @classmethod
    def from_index(cls, n: int, idx: int) -> "TruthTable":
        """Table whose value at x is -1 iff bit x of ``idx`` (LSB = x=0) is set."""
        return cls(n, tuple(-1 if (idx >> x) & 1 else 1 for x in range(1 << n)))

    def index(self) -> int:
        return sum(1 << x for x, v in enumerate(self.values) if v == -1)

    def __getitem__(self, x: int) -> int:
        return self.values[x]


@dataclass(frozen=True)
class SparseSpectrum:
    """Map from character S to nonzero exact coefficient f^(S)."""

    n: int
    coeffs: Mapping[int, Fraction]
    k_declared: int | None = None

    def __post_init__(self):
        clean = {}
        for s, c in self.coeffs.items():
            s = f2.parse_bits(s) if isinstance(s, str) else int(s)
            if s < 0 or s >> self.n:
                raise ValueError(f"character {s} out of range for n={self.n}")
            c = Fraction(c)
            if c:
                clean[s] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        if self.k_declared is not None and len(clean) > self.k_declared:
            raise ValueError(f"sparsity {len(clean)} exceeds declared k={self.k_declared}")

    @property
    def sparsity(self) -> int:
        return len(self.coeffs)

    @property
    def support(self) -> list[int]:
        return list(self.coeffs)

    def __getitem__(self, s: int) -> Fraction:
        return self.coeffs.get(s, Fraction(0))

    def weight(self) -> Fraction:
        return sum((c * c for c in self.coeffs.values()), Fraction(0))

    def __call__(self, x: int) -> Fraction:
        return evaluate(self, x)

    def to_json(self) -> dict:
        out = []
        for s, c in self.coeffs.items():
            log2_den = c.denominator.bit_length() - 1
            if c.denominator != 1 << log2_den:
                raise ValueError("coefficient is not dyadic")
            out.append({"S": f2.bitstring(s, self.n), "num": c.numerator, "log2_den": log2_den})
        return {"n": self.n, "coeffs": out}

    @classmethod
    def from_json(cls, obj: dict) -> "SparseSpectrum":
        n = int(obj["n"])
        coeffs = {
            f2.parse_bits(e["S"]): Fraction(int(e["num"]), 1 << int(e["log2_den"]))
            for e in obj["coeffs"]
        }
        return cls(n, coeffs)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __str__(self) -> str:
        terms = ", ".join(f"{f2.bitstring(s, self.n)}: {c}" for s, c in self.coeffs.items())
        return "{" + terms + "}"


@dataclass(frozen=True)
class SpanBasis:
    n: int
    vectors: tuple[int, ...] = field(default_factory=tuple)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def contains(self, v: int) -> bool:
        return f2.span_contains(self.vectors, v)

    def same_span(self, other: "SpanBasis") -> bool:
        return self.n == other.n and f2.rref(self.vectors, self.n) == f2.rref(other.vectors, other.n)


# -- transforms ---------------------------------------------------------------


def wht_int(values) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis (int64).

    Output index S holds sum_x f(x) (-1)^{S.x} = 2^n f^(S).
    """
    a = np.array(values, dtype=np.int64)
    size = a.shape[-1]
    n = size.bit_length() - 1
    lead = a.shape[:-1]
    h = 1
    for _ in range(n):
        a = a.reshape(*lead, size // (2 * h), 2, h)
        lo = a[..., 0, :] + a[..., 1, :]
        hi = a[..., 0, :] - a[..., 1, :]
        a = np.stack([lo, hi], axis=-2)
        h *= 2
    return a.reshape(*lead, size)


def wht(t: TruthTable) -> SparseSpectrum:
    raw = wht_int(t.values)
    den = 1 << t.n
    return SparseSpectrum(t.n, {s: Fraction(int(w), den) for s, w in enumerate(raw) if w})


def _common_numerators(s: SparseSpectrum) -> tuple[dict[int, int], int]:
    den = math.lcm(*(c.denominator for c in s.coeffs.values())) if s.coeffs else 1
    return {S: int(c * den) for S, c in s.coeffs.items()}, den


def to_table_values(s: SparseSpectrum) -> tuple[np.ndarray, int]:
    """Dense evaluation as (integer numerators over all x, common denominator)."""
    if s.n > MAX_DENSE_N:
        raise ValueError(f"n={s.n} too large for dense evaluation")
    nums, den = _common_numerators(s)
    dense = np.zeros(1 << s.n, dtype=np.int64)
    for S, v in nums.items():
        dense[S] = v
    # sum_S c_S (-1)^{S.x} is the unnormalized transform of the coefficient vector
    return wht_int(dense), den


def to_truth_table(s: SparseSpectrum) -> TruthTable:
    vals, den = to_table_values(s)
    if not np.all(np.abs(vals) == den):
        raise NotBoolean("spectrum does not describe a ±1 function")
    return TruthTable(s.n, tuple(int(v) // den for v in vals))


def evaluate(s: SparseSpectrum, x: int) -> Fraction:
    total = Fraction(0)
    for S, c in s.coeffs.items():
        total += -c if f2.dot(S, x) else c
    return total


def evaluate_many(s: SparseSpectrum, xs: np.ndarray) -> np.ndarray:
    """Vectorized float evaluation; exact for Boolean spectra on small grids."""
    xs = np.asarray(xs, dtype=np.uint64)
    out = np.zeros(xs.shape, dtype=np.float64)
    for S, c in s.coeffs.items():
        par = np.bitwise_count(xs & np.uint64(S)) & 1
        out += float(c) * (1.0 - 2.0 * par)
    return out


# -- structure ------------------------------------------------------------------


def fourier_span(s: SparseSpectrum) -> SpanBasis:
    """Basis of span(supp f^), chosen greedily from support elements."""
    return SpanBasis(s.n, tuple(f2.independent_subset(s.coeffs)))


def fourier_dim(s: SparseSpectrum) -> int:
    return f2.rank_of(s.coeffs)


def basis_change(s: SparseSpectrum, B: f2.F2Matrix) -> SparseSpectrum:
    """Spectrum of f_B(x) = f((B^-1)^T x), i.e. coefficient at Q is f^(BQ)."""
    if B.nrows != s.n or B.ncols != s.n:
        raise ValueError("B must be n×n")
    Binv = f2.invert(B)
    return SparseSpectrum(s.n, {Binv.apply(S): c for S, c in s.coeffs.items()})


def restrict(s: SparseSpectrum, i: int, b: int) -> SparseSpectrum:
    """Fix variable ``i`` (0-based) to bit ``b``; result lives on n-1 variables."""
    if not 0 <= i < s.n:
        raise IndexError(f"variable {i} out of range for n={s.n}")
    low = s.n - 1 - i
    out: dict[int, Fraction] = {}
    for S, c in s.coeffs.items():
        has_i = (S >> low) & 1
        T = ((S >> (low + 1)) << low) | (S & ((1 << low) - 1))
        out[T] = out.get(T, Fraction(0)) + (-c if has_i and b else c)
    return SparseSpectrum(s.n - 1, out)


def lift(g: SparseSpectrum, B: f2.F2Matrix, n: int) -> SparseSpectrum:
    """Plant an r-variable spectrum at the first r columns of B in n variables.

    The result satisfies f^(B (Q || 0^{n-r})) = g^(Q).
    """
    r = g.n
    if r > n or B.nrows != n or B.ncols != n:
        raise ValueError("need r <= n and B n×n")
    if not f2.is_invertible(B):
        raise SingularMatrix("B is singular")
    return SparseSpectrum(n, {B.apply(Q << (n - r)): c for Q, c in g.coeffs.items()})


def reduce_to_span(s: SparseSpectrum) -> tuple[SparseSpectrum, f2.F2Matrix]:
    """Collapse s onto its r influential variables after a basis change.

    Returns (h, B) with h on r = Fdim variables and s == lift(h, B, n).
    """
    span = fourier_span(s)
    B = f2.complete_basis(span.vectors, s.n)
    moved = basis_change(s, B)
    shift = s.n - span.dim
    return SparseSpectrum(span.dim, {Q >> shift: c for Q, c in moved.coeffs.items()}), B


def is_boolean(s: SparseSpectrum) -> bool:
    if s.weight() != 1:
        return False
    h, _ = reduce_to_span(s) if s.n > MAX_DENSE_N else (s, None)
    if h.n > MAX_DENSE_N:
        raise ValueError("Fourier dimension too large to check exhaustively")
    vals, den = to_table_values(h)
    return bool(np.all(np.abs(vals) == den))


def granularity_check(s: SparseSpectrum, k: int | None = None) -> bool:
    """Every coefficient is an integer multiple of 2^(1 - floor(log2 k)).

    ``k`` defaults to the sparsity of ``s`` (normalized up to 2).
    """
    step = grid_step(s.sparsity if k is None else k)
    return all((c / step).denominator == 1 for c in s.coeffs.values())


def alpha(s: SparseSpectrum) -> Fraction:
    """alpha = (1 - f^(0))/2, the fraction of inputs where f = -1."""
    return (1 - s[0]) / 2


# -- generators ---------------------------------------------------------------


def character(S: int, n: int, sign: int = 1) -> SparseSpectrum:
    return SparseSpectrum(n, {S: Fraction(sign)})


def and_function(t: int) -> SparseSpectrum:
    """AND on t bits: -1 only at x = 1^t."""
    full = (1 << t) - 1
    return wht(TruthTable.from_function(t, lambda x: -1 if x == full else 1))


def addressing_function(m: int) -> SparseSpectrum:
    """Add_m(x, y) = 1 - 2 y_x on log2(m) address bits followed by m data bits."""
    a = m.bit_length() - 1
    if m < 2 or 1 << a != m:
        raise ValueError("m must be a power of two >= 2")
    n = a + m

    def fn(z: int) -> int:
        x = z >> m
        y_x = (z >> (m - 1 - x)) & 1
        return 1 - 2 * y_x

    return wht(TruthTable.from_function(n, fn))


@lru_cache(maxsize=None)
def _all_tables(r: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Every ±1 table on r <= 4 variables with its sparsity and Fourier dim."""
    if r > 4:
        raise ValueError("exhaustive tables limited to r <= 4")
    size = 1 << r
    ids = np.arange(1 << size, dtype=np.int64)
    bits = (ids[:, None] >> np.arange(size)) & 1
    raw = wht_int(1 - 2 * bits)
    sparsity = np.count_nonzero(raw, axis=1)
    dims = np.array([f2.rank_of(np.flatnonzero(row).tolist()) for row in raw])
    return ids, sparsity, dims


def random_invertible(n: int, rng: np.random.Generator) -> f2.F2Matrix:
    while True:
        rows = tuple(int(v) for v in rng.integers(0, 1 << n, size=n)) if n else ()
        M = f2.F2Matrix(n, n, rows)
        if f2.is_invertible(M):
            return M


def random_sparse_function(
    n: int, k: int, r_core: int, seed, exact_dim: bool = False
) -> SparseSpectrum:
    """Seeded Boolean spectrum on n variables with sparsity <= k.

    A non-constant table on ``r_core`` variables is drawn uniformly from those
    with sparsity <= k and Fourier dimension <= r_core (== r_core when
    ``exact_dim``), then planted through a random invertible n×n matrix.
    """
    if r_core > min(n, 4) or r_core < 1:
        raise ValueError("need 1 <= r_core <= min(n, 4)")
    rng = np.random.default_rng(seed)
    ids, sparsity, dims = _all_tables(r_core)
    ok = (sparsity <= norm_k(k)) & (dims >= 1)
    ok &= (dims == r_core) if exact_dim else (dims <= r_core)
    candidates = ids[ok]
    if candidates.size == 0:
        raise Unsatisfiable(f"no {r_core}-variable function with sparsity <= {k}")
    g = wht(TruthTable.from_index(r_core, int(rng.choice(candidates))))
    B = random_invertible(n, rng)
    return lift(g, B, n)


def spectra_equal(a: SparseSpectrum, b: SparseSpectrum) -> bool:
    return a.n == b.n and a.coeffs == b.coeffs


def from_table(values: Sequence[int]) -> SparseSpectrum:
    n = len(values).bit_length() - 1
    return wht(TruthTable(n, tuple(values)))
