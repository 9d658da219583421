"""Exact linear algebra over GF(2) on int bitsets.

A vector of length ``n`` is a Python ``int``; coordinate ``i`` (0-based) lives
at bit ``n - 1 - i`` so that ``bitstring(v, n)`` reads most-significant-index
first, e.g. ``0b110`` is the vector ``110`` with coordinates 0 and 1 set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DependentInput, SingularMatrix, TooLarge

DEFAULT_MAX_N = 14
DEFAULT_SUBSPACE_CAP = 2_000_000


def bitstring(v: int, n: int) -> str:
    return format(v, f"0{n}b") if n else ""


def parse_bits(s: str) -> int:
    s = s.strip()
    if s and set(s) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {s!r}")
    return int(s, 2) if s else 0


def unit(i: int, n: int) -> int:
    """Standard basis vector e_i (0-based)."""
    return 1 << (n - 1 - i)


def get_bit(v: int, i: int, n: int) -> int:
    return (v >> (n - 1 - i)) & 1


def dot(a: int, b: int) -> int:
    return (a & b).bit_count() & 1


@dataclass(frozen=True)
class F2Matrix:
    """Dense GF(2) matrix; each row is an int of ``ncols`` bits."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ValueError("row count mismatch")
        mask = (1 << self.ncols) - 1
        if any(r & ~mask for r in self.rows):
            raise ValueError("row wider than ncols")

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, tuple(unit(i, n) for i in range(n)))

    @classmethod
    def from_rows(cls, rows: Sequence, ncols: int | None = None) -> "F2Matrix":
        """Build from bitstrings, 0/1 lists, or ints (then ``ncols`` is required)."""
        parsed = []
        for r in rows:
            if isinstance(r, str):
                ncols = len(r) if ncols is None else ncols
                parsed.append(parse_bits(r))
            elif isinstance(r, int):
                parsed.append(r)
            else:
                r = list(r)
                ncols = len(r) if ncols is None else ncols
                parsed.append(parse_bits("".join(str(int(b)) for b in r)))
        if ncols is None:
            raise ValueError("ncols required for int rows")
        return cls(len(parsed), ncols, tuple(parsed))

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> "F2Matrix":
        m = len(columns)
        rows = []
        for i in range(nrows):
            r = 0
            for j, c in enumerate(columns):
                if get_bit(c, i, nrows):
                    r |= unit(j, m)
            rows.append(r)
        return cls(nrows, m, tuple(rows))

    def entry(self, i: int, j: int) -> int:
        return get_bit(self.rows[i], j, self.ncols)

    def column(self, j: int) -> int:
        v = 0
        for i, r in enumerate(self.rows):
            if get_bit(r, j, self.ncols):
                v |= unit(i, self.nrows)
        return v

    def columns(self) -> list[int]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "F2Matrix":
        return F2Matrix(self.ncols, self.nrows, tuple(self.columns()))

    def apply(self, x: int) -> int:
        """Matrix-vector product over GF(2)."""
        out = 0
        for r in self.rows:
            out = (out << 1) | dot(r, x)
        return out

    def __matmul__(self, other):
        if isinstance(other, int):
            return self.apply(other)
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = [self.apply(c) for c in other.columns()]
        return F2Matrix.from_columns(cols, self.nrows)

    def to_lists(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)]

    def __str__(self) -> str:
        return "\n".join(bitstring(r, self.ncols) for r in self.rows)


def _insert(pivots: dict[int, int], v: int) -> bool:
    """Reduce ``v`` against an xor basis keyed by leading bit; insert if new."""
    while v:
        top = v.bit_length() - 1
        p = pivots.get(top)
        if p is None:
            pivots[top] = v
            return True
        v ^= p
    return False


class XorBasis:
    """Incremental span tracker; ``add`` reports whether the span grew."""

    def __init__(self, vectors: Iterable[int] = ()):
        self._pivots: dict[int, int] = {}
        self.vectors: list[int] = []
        for v in vectors:
            self.add(v)

    def add(self, v: int) -> bool:
        if _insert(self._pivots, v):
            self.vectors.append(v)
            return True
        return False

    def __contains__(self, v: int) -> bool:
        while v:
            p = self._pivots.get(v.bit_length() - 1)
            if p is None:
                return False
            v ^= p
        return True

    def __len__(self) -> int:
        return len(self.vectors)


def rank_of(vectors: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    return sum(_insert(pivots, v) for v in vectors)


def rank(M: F2Matrix) -> int:
    return rank_of(M.rows)


def invert(M: F2Matrix) -> F2Matrix:
    if M.nrows != M.ncols:
        raise ValueError("matrix must be square")
    n = M.nrows
    # augmented rows: [M | I] packed into one int
    aug = [(r << n) | unit(i, n) for i, r in enumerate(M.rows)]
    for col in range(n):
        bit = 1 << (2 * n - 1 - col)
        piv = next((i for i in range(col, n) if aug[i] & bit), None)
        if piv is None:
            raise SingularMatrix(f"rank {rank(M)} < {n}")
        aug[col], aug[piv] = aug[piv], aug[col]
        for i in range(n):
            if i != col and aug[i] & bit:
                aug[i] ^= aug[col]
    mask = (1 << n) - 1
    return F2Matrix(n, n, tuple(a & mask for a in aug))


def is_invertible(M: F2Matrix) -> bool:
    return M.nrows == M.ncols and rank(M) == M.nrows


def complete_basis(vectors: Sequence[int], n: int) -> F2Matrix:
    """Invertible n×n matrix whose leading columns are ``vectors``.

    Remaining columns are e_0, e_1, ... taken in index order whenever they
    increase the rank.
    """
    pivots: dict[int, int] = {}
    for v in vectors:
        if v >> n:
            raise ValueError(f"vector wider than n={n}")
        if not _insert(pivots, v):
            raise DependentInput("input vectors are linearly dependent")
    cols = list(vectors)
    for i in range(n):
        if len(cols) == n:
            break
        e = unit(i, n)
        if _insert(pivots, e):
            cols.append(e)
    return F2Matrix.from_columns(cols, n)


def span_contains(basis: Sequence[int], v: int) -> bool:
    pivots: dict[int, int] = {}
    for b in basis:
        _insert(pivots, b)
    return not _insert(pivots, v)


def independent_subset(vectors: Iterable[int]) -> list[int]:
    """Greedy maximal independent subsequence, preserving order."""
    pivots: dict[int, int] = {}
    return [v for v in vectors if _insert(pivots, v)]


def span_elements(basis: Sequence[int]) -> list[int]:
    out = [0]
    for b in basis:
        out += [x ^ b for x in out]
    return sorted(set(out))


def rref(vectors: Iterable[int], n: int) -> tuple[int, ...]:
    """Reduced row-echelon basis of the span, rows ordered by pivot index."""
    pivots: dict[int, int] = {}
    for v in vectors:
        _insert(pivots, v)
    tops = sorted(pivots, reverse=True)
    for t in tops:
        for u in tops:
            if u != t and (pivots[u] >> t) & 1:
                pivots[u] ^= pivots[t]
    return tuple(pivots[t] for t in tops)


def subspace_count(n: int, d: int) -> int:
    """Gaussian binomial [n choose d]_2: number of d-dim subspaces of GF(2)^n."""
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    num = den = 1
    for i in range(d):
        num *= (1 << (n - i)) - 1
        den *= (1 << (d - i)) - 1
    return num // den


def iter_subspaces(n: int, d: int) -> Iterator[tuple[int, ...]]:
    """Yield every d-dim subspace once, as its RREF basis.

    Walks pivot positions and the free entries of each pivot row directly, so
    no deduplication pass is needed.
    """
    for piv in itertools.combinations(range(n), d):
        pivset = set(piv)
        free = [[c for c in range(p + 1, n) if c not in pivset] for p in piv]
        slots = [(row, c) for row, cs in enumerate(free) for c in cs]
        for bits in itertools.product((0, 1), repeat=len(slots)):
            rows = [unit(p, n) for p in piv]
            for (row, c), b in zip(slots, bits):
                if b:
                    rows[row] |= unit(c, n)
            yield tuple(rows)


def enumerate_subspaces(
    n: int, d: int, cap: int = DEFAULT_SUBSPACE_CAP, max_n: int = DEFAULT_MAX_N
) -> list[tuple[int, ...]]:
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    if n > max_n:
        raise TooLarge(f"n={n} exceeds enumeration guard {max_n}")
    count = subspace_count(n, d)
    if count > cap:
        raise TooLarge(f"{count} subspaces exceeds cap {cap}")
    return list(iter_subspaces(n, d))
