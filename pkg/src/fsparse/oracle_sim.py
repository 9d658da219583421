"""Simulated access models: Fourier sampling from uniform quantum examples,
uniform classical examples, and membership queries.

Randomness comes from numpy's PCG64 bit generator seeded through
:class:`numpy.random.SeedSequence`; independent per-phase streams are derived
with ``SeedSequence.spawn``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .boolfourier import SparseSpectrum, evaluate, evaluate_many, is_boolean
from .errors import IndexOutOfRange, NotBoolean


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def split_rng(seed, count: int) -> list[np.random.Generator]:
    """Independent child generators derived from one master seed."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.PCG64(child)) for child in ss.spawn(count)]


@dataclass
class SampleLog:
    quantum_examples_used: int = 0
    fourier_samples_accepted: int = 0
    classical_examples_used: int = 0
    membership_queries_used: int = 0
    seed: int | None = None

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _uniform_below(rng: np.random.Generator, bound: int) -> int:
    if bound < 1 << 62:
        return int(rng.integers(0, bound))
    nbits = bound.bit_length()
    while True:
        words = rng.integers(0, 1 << 32, size=(nbits + 31) // 32, dtype=np.uint64)
        v = 0
        for w in words:
            v = (v << 32) | int(w)
        v &= (1 << nbits) - 1
        if v < bound:
            return v


class ExampleOracle:
    """Uniform quantum/classical example source for a Boolean target.

    The target spectrum is private to the oracle; learners only see samples.
    Every draw updates :attr:`log`.
    """

    def __init__(self, target: SparseSpectrum, log: SampleLog | None = None, check: bool = True):
        if check and not is_boolean(target):
            raise NotBoolean("oracle target must be a ±1-valued function")
        self._target = target
        self.n = target.n
        self.log = log if log is not None else SampleLog()
        # exact inverse-CDF table over f^(S)^2 with a common integer denominator
        squares = [(S, c * c) for S, c in target.coeffs.items()]
        den = math.lcm(*(w.denominator for _, w in squares)) if squares else 1
        self._support = [S for S, _ in squares]
        self._cum = list(itertools.accumulate(int(w * den) for _, w in squares))
        self._total = self._cum[-1] if squares else 0

    def _draw_character(self, rng: np.random.Generator) -> int:
        u = _uniform_below(rng, self._total)
        lo, hi = 0, len(self._cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if u < self._cum[mid]:
                hi = mid
            else:
                lo = mid + 1
        return self._support[lo]

    def fourier_sample(self, rng: np.random.Generator) -> int | None:
        """Consume one quantum example; return S ~ f^(S)^2 with probability 1/2.

        Rejection is decided by its own coin before S is drawn.
        """
        self.log.quantum_examples_used += 1
        if rng.random() < 0.5:
            return None
        self.log.fourier_samples_accepted += 1
        return self._draw_character(rng)

    def uniform_example(self, rng: np.random.Generator) -> tuple[int, int]:
        self.log.classical_examples_used += 1
        x = _uniform_below(rng, 1 << self.n)
        return x, int(evaluate(self._target, x))

    def uniform_examples(self, rng: np.random.Generator, m: int) -> tuple[np.ndarray, np.ndarray]:
        """Batch of ``m`` classical examples as (x array, ±1 label array)."""
        if self.n > 63:
            raise ValueError("batch sampling supports n <= 63")
        self.log.classical_examples_used += m
        xs = rng.integers(0, 1 << self.n, size=m, dtype=np.uint64) if self.n else np.zeros(m, np.uint64)
        ys = np.rint(evaluate_many(self._target, xs)).astype(np.int64)
        return xs, ys


class MembershipOracle:
    """Answers bit queries to a fixed N-bit concept string (0-based indices)."""

    def __init__(self, concept: str | Sequence[int], log: SampleLog | None = None):
        self._bits = tuple(int(b) for b in concept)
        if any(b not in (0, 1) for b in self._bits):
            raise ValueError("concept must be a 0/1 string")
        self.N = len(self._bits)
        self.log = log if log is not None else SampleLog()

    def query(self, i: int) -> int:
        if not 0 <= i < self.N:
            raise IndexOutOfRange(f"index {i} outside [0, {self.N})")
        self.log.membership_queries_used += 1
        return self._bits[i]


def fourier_sample(s: SparseSpectrum, rng: np.random.Generator, log: SampleLog | None = None):
    return ExampleOracle(s, log).fourier_sample(rng)


def uniform_example(s: SparseSpectrum, rng: np.random.Generator, log: SampleLog | None = None):
    return ExampleOracle(s, log).uniform_example(rng)


def membership_query(c: str | Sequence[int], i: int, log: SampleLog | None = None) -> int:
    return MembershipOracle(c, log).query(i)


def fourier_distribution(s: SparseSpectrum) -> dict[int, Fraction]:
    return {S: c * c for S, c in s.coeffs.items()}
