import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fsparse import f2linalg as f2
from fsparse.boolfourier import (
    SparseSpectrum,
    TruthTable,
    addressing_function,
    alpha,
    and_function,
    basis_change,
    character,
    evaluate,
    evaluate_many,
    fourier_dim,
    fourier_span,
    from_table,
    granularity_check,
    grid_step,
    is_boolean,
    lift,
    random_sparse_function,
    reduce_to_span,
    restrict,
    to_truth_table,
    wht,
)
from fsparse.errors import NotBoolean, SingularMatrix

from tests.strategies import boolean_spectra, invertible

AND2 = {0b00: F(1, 2), 0b01: F(1, 2), 0b10: F(1, 2), 0b11: F(-1, 2)}


def naive_transform(values, n):
    """Direct O(4^n) correlation sum, independent of the butterfly."""
    return {
        S: F(sum(v * (-1) ** f2.dot(S, x) for x, v in enumerate(values)), 1 << n)
        for S in range(1 << n)
    }


def test_wht_examples():
    assert wht(TruthTable(2, (1, 1, 1, 1))).coeffs == {0: 1}
    chi = TruthTable.from_function(2, lambda x: (-1) ** f2.dot(0b10, x))
    assert wht(chi).coeffs == {0b10: 1}
    assert and_function(2).coeffs == AND2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_wht_matches_naive_sum(n):
    for idx in range(1 << (1 << n)):
        t = TruthTable.from_index(n, idx)
        expected = {S: c for S, c in naive_transform(t.values, n).items() if c}
        assert wht(t).coeffs == expected


def test_evaluate_examples():
    assert evaluate(SparseSpectrum(2, {0: F(1)}), 0b01) == 1
    assert evaluate(and_function(2), 0b11) == -1
    assert evaluate(character(0b10, 2), 0b10) == -1


def test_is_boolean_examples():
    assert is_boolean(and_function(2))
    assert not is_boolean(SparseSpectrum(2, {0: F(1, 2)}))
    assert is_boolean(character(0b10, 2))
    # Parseval holds but values are not ±1
    assert not is_boolean(SparseSpectrum(1, {0: F(3, 5), 1: F(4, 5)}))


def test_fourier_span_examples():
    assert fourier_span(SparseSpectrum(2, {0: F(1)})).dim == 0
    assert fourier_span(and_function(2)).dim == 2
    assert fourier_span(character(0b10, 2)).dim == 1


def test_basis_change_examples():
    swap = f2.F2Matrix.from_rows(["01", "10"])
    I = f2.F2Matrix.identity(2)
    s = and_function(2)
    assert basis_change(s, I) == s
    assert basis_change(character(0b01, 2), swap).coeffs == {0b10: 1}
    moved = basis_change(s, swap)
    assert sorted(moved.coeffs.values()) == sorted(s.coeffs.values())
    assert moved[0b01] == s[0b10] and moved[0b10] == s[0b01]
    with pytest.raises(SingularMatrix):
        basis_change(s, f2.F2Matrix.from_rows(["11", "11"]))


def test_restrict_examples():
    s = and_function(2)
    assert restrict(s, 0, 1).coeffs == {1: 1}
    assert restrict(s, 0, 0).coeffs == {0: 1}
    assert restrict(SparseSpectrum(2, {0: F(1)}), 0, 0).coeffs == {0: 1}


def test_lift_examples():
    chi1 = character(1, 1)
    assert lift(chi1, f2.F2Matrix.identity(2), 2).coeffs == {0b10: 1}
    and3 = lift(and_function(2), f2.F2Matrix.identity(3), 3)
    table = to_truth_table(and3).values
    assert table == tuple(-1 if x >> 1 == 0b11 else 1 for x in range(8))
    B = f2.complete_basis([0b110], 3)
    assert lift(chi1, B, 3).coeffs == {0b110: 1}


def test_granularity_examples():
    assert grid_step(4) == F(1, 2)
    assert granularity_check(and_function(2))
    assert granularity_check(character(0b10, 2))
    assert not granularity_check(SparseSpectrum(2, {0: F(3, 4), 0b10: F(1, 4)}), k=2)


def test_addressing_function_measured_structure():
    add2 = addressing_function(2)
    assert is_boolean(add2)
    assert (add2.sparsity, fourier_dim(add2)) == (4, 3)
    add4 = addressing_function(4)
    assert (add4.sparsity, fourier_dim(add4)) == (16, 6)
    assert granularity_check(add4)


def test_and_function_alpha():
    assert and_function(1).coeffs == {1: 1}
    for t in range(2, 6):
        s = and_function(t)
        assert alpha(s) == F(1, 1 << t)
        assert s.sparsity == 1 << t and fourier_dim(s) == t


def test_json_roundtrip():
    s = and_function(3)
    obj = json.loads(s.dumps())
    assert obj["n"] == 3
    assert SparseSpectrum.from_json(obj) == s
    with pytest.raises(ValueError):
        SparseSpectrum(1, {0: F(1, 3)}).to_json()


def test_to_truth_table_rejects_non_boolean():
    with pytest.raises(NotBoolean):
        to_truth_table(SparseSpectrum(1, {0: F(1, 2)}))


@pytest.mark.parametrize("n", range(1, 5))
def test_exhaustive_round_trip_parseval_granularity(n):
    for idx in range(1 << (1 << n)):
        t = TruthTable.from_index(n, idx)
        s = wht(t)
        assert s.weight() == 1
        assert to_truth_table(s) == t
        assert granularity_check(s)
        assert t.index() == idx


@given(st.integers(5, 12), st.integers(0, 2**32))
def test_random_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    values = tuple(int(v) for v in rng.choice([-1, 1], size=1 << n))
    s = from_table(values)
    assert s.weight() == 1
    xs = rng.integers(0, 1 << n, size=16)
    for x in xs:
        assert evaluate(s, int(x)) == values[int(x)]
    assert np.array_equal(evaluate_many(s, np.arange(1 << n)), np.array(values, dtype=float))


@given(boolean_spectra(2, 5).flatmap(lambda s: st.tuples(st.just(s), invertible(s.n), invertible(s.n))))
def test_basis_change_composition(args):
    s, B, C = args
    assert basis_change(basis_change(s, B), C) == basis_change(s, B @ C)
    moved = basis_change(s, B)
    for Q in range(1 << s.n):
        assert moved[Q] == s[B.apply(Q)]
    assert is_boolean(moved) and moved.sparsity == s.sparsity


def table_restrict(t: TruthTable, i: int, b: int) -> TruthTable:
    """Restrict by dropping table entries, independent of the spectral formula."""
    n = t.n
    vals = []
    for y in range(1 << (n - 1)):
        low = n - 1 - i
        x = ((y >> low) << (low + 1)) | (b << low) | (y & ((1 << low) - 1))
        vals.append(t.values[x])
    return TruthTable(n - 1, tuple(vals))


@given(boolean_spectra(2, 5), st.data())
def test_restrict_matches_table(s, data):
    i = data.draw(st.integers(0, s.n - 1))
    b = data.draw(st.integers(0, 1))
    h = restrict(s, i, b)
    assert h == wht(table_restrict(to_truth_table(s), i, b))
    assert h.sparsity <= s.sparsity


@given(boolean_spectra(3, 5), st.data())
def test_restrictions_commute(s, data):
    i, j = sorted(data.draw(st.lists(st.integers(0, s.n - 1), min_size=2, max_size=2, unique=True)))
    b, c = data.draw(st.integers(0, 1)), data.draw(st.integers(0, 1))
    # after removing i, variable j shifts down by one
    assert restrict(restrict(s, i, b), j - 1, c) == restrict(restrict(s, j, c), i, b)


@given(boolean_spectra(1, 4), st.integers(0, 3), st.data())
def test_lift_preserves_structure(g, extra, data):
    n = g.n + extra
    B = data.draw(invertible(n))
    f = lift(g, B, n)
    assert is_boolean(f) and f.sparsity == g.sparsity and granularity_check(f)
    assert fourier_dim(f) == fourier_dim(g)
    for Q, c in g.coeffs.items():
        assert f[B.apply(Q << extra)] == c


@given(st.integers(1, 12), st.sampled_from([2, 4, 8, 16]), st.integers(1, 4), st.integers(0, 10**6))
def test_random_sparse_function_contract(n, k, r_core, seed):
    if r_core > n:
        r_core = n
    s = random_sparse_function(n, k, r_core, seed)
    assert is_boolean(s)
    assert 1 <= s.sparsity <= k
    assert 1 <= fourier_dim(s) <= r_core
    assert granularity_check(s)
    assert s == random_sparse_function(n, k, r_core, seed)


def test_random_sparse_rank_one_is_signed_character():
    for seed in range(20):
        s = random_sparse_function(3, 2, 1, seed)
        ((S, c),) = s.coeffs.items()
        assert S != 0 and abs(c) == 1


def test_random_sparse_exact_dim():
    for seed in range(20):
        assert fourier_dim(random_sparse_function(8, 8, 3, seed, exact_dim=True)) == 3


def test_reduce_to_span_inverts_lift():
    for seed in range(10):
        s = random_sparse_function(10, 8, 3, seed)
        h, B = reduce_to_span(s)
        assert h.n == fourier_dim(s)
        assert lift(h, B, 10) == s


def test_is_boolean_large_n():
    s = random_sparse_function(30, 8, 3, 7)
    assert is_boolean(s)
    bad = SparseSpectrum(30, {0: F(1, 2), 1 << 29: F(1, 2), 3: F(1, 2), 5: F(1, 2)})
    assert not is_boolean(bad)
