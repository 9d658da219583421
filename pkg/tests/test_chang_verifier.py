import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from fsparse import f2linalg as f2
from fsparse.boolfourier import SparseSpectrum, TruthTable, and_function, character, fourier_dim, wht
from fsparse.chang_verifier import (
    dimension_ratio,
    in_span_weight,
    le_log2,
    scan_all,
    support_spans,
    verify_chang_original,
    verify_improved_chang,
    verify_weight_bound,
)
from fsparse.errors import SubsetNotInSupport, TooLarge

from tests.strategies import boolean_spectra

ONE = SparseSpectrum(2, {0: F(1)})


@given(st.fractions(min_value=-20, max_value=20, max_denominator=50),
       st.fractions(min_value=F(1, 50), max_value=1000, max_denominator=50))
def test_le_log2_matches_float(a, x):
    gap = math.log2(x) - a
    if abs(gap) > 1e-6:
        assert le_log2(a, x) == (gap > 0)


def test_le_log2_exact_ties():
    assert le_log2(3, 8) and not le_log2(F(3) + F(1, 10**12), 8)
    assert le_log2(F(1, 2), 2) and le_log2(-2, F(1, 4))


def test_improved_examples():
    holds, slack = verify_improved_chang(and_function(3))
    assert holds and slack == pytest.approx(3.0)
    holds, slack = verify_improved_chang(character(0b10, 2))
    assert holds and slack == pytest.approx(1.0)
    assert verify_improved_chang(ONE) == (True, 0.0)
    assert verify_improved_chang(SparseSpectrum(2, {0: F(-1)}))[0]


def test_original_examples():
    s = and_function(2)
    assert verify_chang_original(s, 1, 2) and verify_chang_original(s, 1, "e")
    assert verify_chang_original(s, 100, 2)
    assert verify_chang_original(ONE, 1)


def test_literal_form_counterexample():
    """On ±1 coefficients the threshold rho*alpha is off by the indicator factor of 2."""
    f = character(1, 1, -1)  # alpha = 1/2, single coefficient of size 1
    assert not verify_chang_original(f, 2, 2, convention="literal")
    assert verify_chang_original(f, 1, 2, convention="indicator")


def test_weight_examples():
    s = and_function(2)
    w, r_sub = in_span_weight(s, [0b01])
    assert (w, r_sub) == (F(1, 2), 1)
    assert verify_weight_bound(s, [0b01])
    assert verify_weight_bound(s, [0b01, 0b10])
    with pytest.raises(SubsetNotInSupport):
        verify_weight_bound(character(0b01, 2), [0b10])


def test_dimension_ratio_examples():
    assert dimension_ratio(character(0b10, 2)) == pytest.approx(1 / math.sqrt(2))
    assert dimension_ratio(and_function(3)) == pytest.approx(1 / (2 * math.sqrt(2)))


def test_support_spans_cover_every_subset_span():
    import itertools

    for idx in range(0, 1 << 16, 997):
        s = wht(TruthTable.from_index(4, idx))
        reps = support_spans(s.support, 4)
        keys = {f2.rref(r, 4) for r in reps}
        assert len(keys) == len(reps)
        sub = s.support[:8]
        for m in range(len(sub) + 1):
            for c in itertools.combinations(sub, m):
                assert f2.rref(c, 4) in keys


@pytest.mark.parametrize("n, count", [(1, 4), (2, 16), (3, 256)])
def test_small_scans_all_checks(n, count):
    rep = scan_all(n, "all")
    assert rep.functions_checked == count
    assert rep.ok, rep.violations[:3]
    assert rep.base_disagreements == 0


def test_literal_form_fails_on_small_scans():
    assert scan_all(2, "original").literal_form_failures > 0


def test_scan_guard():
    with pytest.raises(TooLarge):
        scan_all(5)
    with pytest.raises(ValueError):
        scan_all(2, "bogus")


def test_scan_report_deterministic_and_mergeable():
    a = scan_all(3, ("improved", "granularity"), chunk=50)
    b = scan_all(3, ("improved", "granularity"))
    assert a.dumps() == b.dumps()
    obj = json.loads(a.dumps())
    assert obj["functions_checked"] == 256 and obj["ok"]
    assert a.to_csv().splitlines() == ["table_id,check,quantity,bound,detail"]


def test_parallel_scan_matches_serial():
    assert scan_all(3, "improved", jobs=2, chunk=64).dumps() == scan_all(3, "improved").dumps()


@given(boolean_spectra(1, 5))
def test_improved_holds_on_random_functions(s):
    assert verify_improved_chang(s)[0]


@given(boolean_spectra(1, 5), st.data())
def test_weight_bound_on_random_subsets(s, data):
    subset = data.draw(st.lists(st.sampled_from(s.support), max_size=6))
    assert verify_weight_bound(s, subset)
    if f2.rank_of(subset) == fourier_dim(s):
        assert in_span_weight(s, subset)[0] == 1
