"""Concept classes as bit-string sets, the entropy-greedy membership-query
learner, and the adversary-matrix split certificate.

A ±1 concept is stored as a 0/1 string via -1 -> 1, +1 -> 0. Query indices
are 0-based string positions. Entropies are in bits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import f2linalg as f2
from .errors import (
    DegenerateClass,
    EmptyPosterior,
    IndexOutOfRange,
    NonConvergence,
    TooConcentrated,
    TooLarge,
)
from .oracle_sim import MembershipOracle

STOP_MASS = 5 / 6
TIE_TOL = 1e-12


def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def entropy(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _parse_mass(v) -> float:
    if isinstance(v, str) and "/" in v:
        return float(Fraction(v))
    return float(v)


@dataclass(frozen=True)
class ConceptClass:
    N: int
    concepts: tuple[str, ...]
    mu: tuple[float, ...]

    def __post_init__(self):
        concepts = tuple(str(c) for c in self.concepts)
        object.__setattr__(self, "concepts", concepts)
        object.__setattr__(self, "mu", tuple(float(m) for m in self.mu))
        if not concepts:
            raise ValueError("empty concept class")
        if any(len(c) != self.N or set(c) - {"0", "1"} for c in concepts):
            raise ValueError(f"concepts must be {self.N}-bit 0/1 strings")
        if len(set(concepts)) != len(concepts):
            raise ValueError("concepts must be distinct")
        if len(self.mu) != len(concepts):
            raise ValueError("mu must have one entry per concept")
        if any(m < 0 for m in self.mu) or abs(sum(self.mu) - 1) > 1e-12:
            raise ValueError("mu must be a probability vector")

    @classmethod
    def uniform(cls, concepts: Sequence[str]) -> "ConceptClass":
        concepts = tuple(concepts)
        N = len(concepts[0]) if concepts else 0
        return cls(N, concepts, tuple(1 / len(concepts) for _ in concepts))

    def with_mu(self, mu: Sequence[float]) -> "ConceptClass":
        mu = np.asarray([_parse_mass(m) for m in mu], dtype=float)
        return ConceptClass(self.N, self.concepts, tuple(mu / mu.sum()))

    @property
    def size(self) -> int:
        return len(self.concepts)

    @property
    def bits(self) -> np.ndarray:
        return np.array([[ch == "1" for ch in c] for c in self.concepts], dtype=np.uint8)

    @property
    def mu_array(self) -> np.ndarray:
        return np.array(self.mu, dtype=float)

    def to_json(self) -> dict:
        return {"N": self.N, "concepts": list(self.concepts), "mu": list(self.mu)}

    @classmethod
    def from_json(cls, obj: dict) -> "ConceptClass":
        concepts = [str(c) for c in obj["concepts"]]
        N = int(obj.get("N", len(concepts[0]) if concepts else 0))
        mu = obj.get("mu")
        if mu is None:
            return cls(N, tuple(concepts), tuple(1 / len(concepts) for _ in concepts))
        mu = [_parse_mass(m) for m in mu]
        total = sum(mu)
        if abs(total - 1) > 1e-9:
            raise ValueError("mu does not sum to 1")
        return cls(N, tuple(concepts), tuple(m / total for m in mu))


# -- benchmark classes ------------------------------------------------------


def point_class(N: int) -> ConceptClass:
    return ConceptClass.uniform(["0" * i + "1" + "0" * (N - i - 1) for i in range(N)])


def linear_class(n: int) -> ConceptClass:
    """Parities chi_S on n bits; position x holds (1 - chi_S(x))/2."""
    N = 1 << n
    return ConceptClass.uniform(
        ["".join(str(f2.dot(S, x)) for x in range(N)) for S in range(N)]
    )


def subspace_class(n: int, k: int, cap: int = 1 << 16) -> ConceptClass:
    """Indicators of the subspaces of dimension n - log2 k in GF(2)^n."""
    logk = k.bit_length() - 1
    if k < 1 or 1 << logk != k or logk > n:
        raise ValueError("k must be a power of two with log2 k <= n")
    d = n - logk
    if f2.subspace_count(n, d) > cap:
        raise TooLarge(f"{f2.subspace_count(n, d)} subspaces exceeds cap {cap}")
    N = 1 << n
    concepts = []
    for basis in f2.enumerate_subspaces(n, d, cap=cap):
        members = set(f2.span_elements(basis))
        concepts.append("".join("1" if x in members else "0" for x in range(N)))
    return ConceptClass.uniform(concepts)


# -- adversary matrices ---------------------------------------------------------


def build_adversary_matrix(cc: ConceptClass) -> np.ndarray:
    """Gamma = v v^T - diag(mu) with v_c = sqrt(mu(c))."""
    v = np.sqrt(cc.mu_array)
    G = np.outer(v, v)
    np.fill_diagonal(G, 0.0)
    return G


def difference_mask(cc: ConceptClass, i: int) -> np.ndarray:
    if not 0 <= i < cc.N:
        raise IndexOutOfRange(f"index {i} outside [0, {cc.N})")
    col = cc.bits[:, i]
    return (col[:, None] != col[None, :]).astype(float)


def split_masses(cc: ConceptClass) -> tuple[np.ndarray, np.ndarray]:
    """Per-index masses (mu(C_i = 0), mu(C_i = 1))."""
    mu = cc.mu_array
    ones = mu @ cc.bits.astype(float)
    return 1.0 - ones, ones


def masked_norm(cc: ConceptClass, i: int, G: np.ndarray | None = None) -> float:
    """||Gamma o D_i||; closed form sqrt(mu0 mu1) for the constructed Gamma."""
    if G is None:
        if not 0 <= i < cc.N:
            raise IndexOutOfRange(f"index {i} outside [0, {cc.N})")
        mu = cc.mu_array
        col = cc.bits[:, i].astype(bool)
        m1 = float(mu[col].sum())
        m0 = float(mu[~col].sum())
        return math.sqrt(m0 * m1)
    return operator_norm(G * difference_mask(cc, i))


def operator_norm(G: np.ndarray, tol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Largest singular value of a real symmetric matrix.

    Power iteration on G^2 (PSD, so ±lambda pairs cannot stall it) with a
    Rayleigh-quotient stopping rule.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    if n == 0 or not np.any(G):
        return 0.0
    if n == 1:
        return abs(float(G[0, 0]))
    if n == 2:
        a, b, d = float(G[0, 0]), float(G[0, 1]), float(G[1, 1])
        mid, rad = (a + d) / 2, math.hypot((a - d) / 2, b)
        return max(abs(mid + rad), abs(mid - rad))
    x = np.random.default_rng(0).standard_normal(n)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = G @ (G @ x)
        lam_new = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        x = y / ny
        if abs(lam_new - lam) <= tol * max(1.0, lam_new):
            return float(np.linalg.norm(G @ x))
        lam = lam_new
    raise NonConvergence(f"power iteration did not settle in {max_iter} steps")


def spectral_ratio(cc: ConceptClass) -> float:
    """||Gamma|| / max_i ||Gamma o D_i|| for the constructed Gamma (a lower bound on ADV)."""
    if cc.size < 2:
        raise DegenerateClass("need at least two concepts")
    m0, m1 = split_masses(cc)
    best = math.sqrt(max(0.0, float(np.max(m0 * m1))))
    if best == 0:
        raise DegenerateClass("no index separates concepts of positive mass")
    return operator_norm(build_adversary_matrix(cc)) / best


@dataclass
class SplitCertificate:
    index: int
    split: float
    threshold: float
    gamma_norm: float
    max_masked_norm: float

    @property
    def holds(self) -> bool:
        return bool(self.split >= self.threshold)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "split": self.split,
            "threshold": self.threshold,
            "gamma_norm": self.gamma_norm,
            "max_masked_norm": self.max_masked_norm,
            "holds": self.holds,
        }


def _argmax_smallest(values: np.ndarray) -> int:
    top = float(np.max(values))
    return int(np.flatnonzero(values >= top - TIE_TOL)[0])


def certify_split(cc: ConceptClass) -> SplitCertificate:
    """Query index with the largest masked norm, and its mildly balanced split.

    The split is guaranteed to be at least 1/(36 A^2), A = spectral_ratio(cc).
    """
    if max(cc.mu) > STOP_MASS + TIE_TOL:
        raise TooConcentrated(f"max mass {max(cc.mu):.6g} exceeds 5/6")
    m0, m1 = split_masses(cc)
    norms = np.sqrt(np.clip(m0 * m1, 0, None))
    i = _argmax_smallest(norms)
    gamma = float(operator_norm(build_adversary_matrix(cc)))
    A = gamma / float(norms[i])
    return SplitCertificate(
        index=i,
        split=float(min(m0[i], m1[i])),
        threshold=1 / (36 * A * A),
        gamma_norm=gamma,
        max_masked_norm=float(norms[i]),
    )


# -- entropy-greedy learner -----------------------------------------------------


@dataclass
class Step:
    t: int
    index: int
    bit: int
    class_size: int
    max_mass: float
    branch_entropy: float
    bit_entropy: float
    halted: bool


@dataclass
class Transcript:
    target: str | None
    initial_entropy: float
    steps: list[Step] = field(default_factory=list)
    final_concept: str | None = None

    @property
    def queries(self) -> int:
        return len(self.steps)

    def entropy_after(self, t: int) -> float:
        """Posterior entropy of this branch after min(t, queries) answers."""
        if t == 0 or not self.steps:
            return self.initial_entropy
        return self.steps[min(t, len(self.steps)) - 1].branch_entropy


def entropy_greedy_learn(
    cc: ConceptClass,
    oracle: MembershipOracle,
    stop_mass: float = STOP_MASS,
    max_queries: int | None = None,
) -> Transcript:
    """Query the index of maximal bit entropy until one concept holds stop_mass.

    Ties go to the smallest index. Concepts with zero prior mass are dropped
    up front.
    """
    bits = cc.bits
    mu = cc.mu_array
    alive = np.flatnonzero(mu > 0)
    post = mu[alive] / mu[alive].sum()
    tr = Transcript(target=None, initial_entropy=entropy(post))
    limit = cc.N if max_queries is None else max_queries
    while post.max() < stop_mass - TIE_TOL:
        if len(tr.steps) >= limit:
            break
        p1 = post @ bits[alive].astype(float)
        h = np.array([binary_entropy(p) for p in p1])
        i = _argmax_smallest(h)
        b = oracle.query(i)
        keep = bits[alive, i] == b
        if not keep.any():
            raise EmptyPosterior(f"answer {b} at index {i} is inconsistent with every concept")
        alive, post = alive[keep], post[keep]
        post = post / post.sum()
        tr.steps.append(
            Step(
                t=len(tr.steps) + 1,
                index=i,
                bit=int(b),
                class_size=int(alive.size),
                max_mass=float(post.max()),
                branch_entropy=entropy(post),
                bit_entropy=float(h[i]),
                halted=bool(post.max() >= stop_mass - TIE_TOL),
            )
        )
    tr.final_concept = cc.concepts[int(alive[int(np.argmax(post))])]
    return tr


def learn_all_targets(cc: ConceptClass, stop_mass: float = STOP_MASS) -> dict[str, Transcript]:
    """Run the learner against every positive-mass concept."""
    out = {}
    for c, m in zip(cc.concepts, cc.mu):
        if m <= 0:
            continue
        tr = entropy_greedy_learn(cc, MembershipOracle(c), stop_mass)
        tr.target = c
        out[c] = tr
    return out


def energy_trace(cc: ConceptClass, transcripts: dict[str, Transcript]) -> list[float]:
    """E_t = H(C | first t answers), averaged over targets drawn from mu."""
    horizon = max((tr.queries for tr in transcripts.values()), default=0)
    weights = dict(zip(cc.concepts, cc.mu))
    return [
        sum(weights[c] * tr.entropy_after(t) for c, tr in transcripts.items())
        for t in range(horizon + 1)
    ]


def energy_drops(cc: ConceptClass, transcripts: dict[str, Transcript]) -> list[float]:
    """mu-average of the queried bit's conditional entropy at each step.

    By the chain rule this equals E_t - E_{t+1}; it is computed from the bit
    entropies alone so the two sides are independent.
    """
    horizon = max((tr.queries for tr in transcripts.values()), default=0)
    weights = dict(zip(cc.concepts, cc.mu))
    return [
        sum(weights[c] * tr.steps[t].bit_entropy for c, tr in transcripts.items() if t < tr.queries)
        for t in range(horizon)
    ]


def query_reference(A: float, class_size: int) -> float:
    """(A^2 / log2 A) log2 |C|, the scaling of the classical simulation bound."""
    if A <= 1:
        return float("nan")
    return A * A / math.log2(A) * math.log2(class_size)


def transcripts_csv(transcripts: dict[str, Transcript], energies: list[float] | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["target", "t", "i_t", "bit", "class_size", "max_mass", "E_t", "final_concept"])
    for c, tr in transcripts.items():
        for st in tr.steps:
            e = "" if energies is None else _fmt(energies[st.t])
            w.writerow([c, st.t, st.index, st.bit, st.class_size, _fmt(st.max_mass), e, tr.final_concept])
    return buf.getvalue()


def _fmt(x: float) -> str:
    return format(x, ".12g")


def load_class(path: str) -> ConceptClass:
    with open(path) as fh:
        return ConceptClass.from_json(json.load(fh))
