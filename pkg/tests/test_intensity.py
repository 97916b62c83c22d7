import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from energyio import (CoefficientMatrix, DataFormatError, EnergyAccount, EnergyFlowTable,
                      aggregate_intensity, compute_intensities, direct_intensity, direct_share,
                      indirect_intensity, leontief_inverse, leontief_series_oracle,
                      technical_coefficients, total_intensity)
from energyio.synthetic import random_coefficients, synthetic_economy

A2 = np.array([[0.0, 0.5], [0.2, 0.0]])
L2 = np.array([[1.0, 0.5], [0.2, 1.0]]) / 0.9


class _Table:
    """Stand-in exposing just what direct_intensity reads."""

    def __init__(self, x):
        self.total_output = np.asarray(x, dtype=float)
        self.n = len(x)


# -- direct ------------------------------------------------------------------------
def test_direct_one_energy_row():
    flows = EnergyFlowTable(("E",), [[5, 10]])
    np.testing.assert_array_equal(direct_intensity(flows, _Table([50, 100])), [0.1, 0.1])


def test_direct_zero_flows():
    flows = EnergyFlowTable(("E",), [[0, 0, 0]])
    assert not direct_intensity(flows, _Table([1, 2, 3])).any()


def test_direct_two_rows():
    flows = EnergyFlowTable(("E", "F"), [[1, 2], [3, 4]])
    np.testing.assert_array_equal(direct_intensity(flows, _Table([2, 2])), [2, 3])


def test_direct_dimension_mismatch():
    with pytest.raises(DataFormatError):
        direct_intensity(EnergyFlowTable(("E",), [[1, 2, 3]]), _Table([1, 2]))


# -- total ---------------------------------------------------------------------------
def test_total_with_identity_inverse():
    d = np.array([0.3, 0.0, 1.2])
    for inverse in (np.eye(3), leontief_inverse(np.zeros((3, 3))), CoefficientMatrix(np.zeros((3, 3)))):
        np.testing.assert_array_equal(total_intensity(d, inverse), d)


def test_total_two_by_two():
    np.testing.assert_allclose(total_intensity([1, 0], [[1.1111, 0.5556], [0.2222, 1.1111]]),
                               [1.1111, 0.5556])
    expected = L2[0]  # row vector [1, 0] times L picks row 0: [1/0.9, 0.5/0.9]
    for inverse in (CoefficientMatrix(A2), leontief_inverse(A2), L2):
        np.testing.assert_allclose(total_intensity([1, 0], inverse), expected, rtol=1e-15)


def test_total_zero_direct():
    assert not total_intensity(np.zeros(2), CoefficientMatrix(A2)).any()


def test_total_dimension_mismatch():
    with pytest.raises(DataFormatError):
        total_intensity([1, 2, 3], CoefficientMatrix(A2))
    with pytest.raises(DataFormatError):
        total_intensity([1, 2, 3], L2)


# -- indirect and share --------------------------------------------------------------
def test_indirect_examples():
    assert not indirect_intensity([1.0, 2.0], [1.0, 2.0]).any()
    np.testing.assert_allclose(indirect_intensity([1.1111, 0.5556], [1, 0]), [0.1111, 0.5556])


def test_indirect_transport_2011():
    # published 2011 total 339.9 and direct 232.2 for transport and storage
    assert indirect_intensity([339.9], [232.2])[0] == pytest.approx(107.7, abs=1e-9)


def test_indirect_dimension_mismatch():
    with pytest.raises(DataFormatError):
        indirect_intensity([1, 2], [1, 2, 3])


@pytest.mark.parametrize("direct, total, expected", [
    (232.2, 339.9, 68.3),  # transport and storage, 2011
    (9.2, 109.7, 8.4),     # food products, beverages and tobacco, 2011
])
def test_share_matches_printed_ratio(direct, total, expected):
    assert direct_share([direct], [total])[0] == pytest.approx(expected, abs=0.05)


def test_share_full_and_undefined():
    share = direct_share([2.0, 0.0, 0.0], [2.0, 0.0, 1.0])
    assert share[0] == 100.0
    assert math.isnan(share[1])
    assert share[2] == 0.0


# -- aggregate ------------------------------------------------------------------------
def test_aggregate_examples():
    agg = aggregate_intensity(100, 25)
    assert agg.value == 4.0 and agg.basis == "total_output"
    assert aggregate_intensity(0, 25, "gdp").value == 0.0
    with pytest.raises(DataFormatError):
        aggregate_intensity(10, 0)


def test_aggregate_from_account(bundled_2005):
    _, account = bundled_2005
    agg = aggregate_intensity(account, 580, "gdp")
    assert agg.energy == 46000 + 102000
    assert agg.value == pytest.approx(148000 / 580, rel=1e-15)


# -- end-to-end on fixtures ----------------------------------------------------------
def test_compute_intensities_bundled(bundled_2005):
    table, account = bundled_2005
    s, prices, flows = compute_intensities(*bundled_2005)
    assert prices.uniform == pytest.approx(500)
    # direct for AGR: 500 * (5 + 8) / 192 (rows MIN and ELG, column AGR)
    assert s.direct[0] == pytest.approx(500 * 13 / 192, rel=1e-15)
    assert np.array_equal(s.total - s.direct - s.indirect, np.zeros(5))
    assert (s.indirect >= 0).all()
    np.testing.assert_allclose(
        s.total, total_intensity(s.direct, leontief_inverse(technical_coefficients(table)).values),
        rtol=1e-13)


def test_identity_collapse():
    table = synthetic_economy(np.random.default_rng(1), 4, 1, max_column_sum=0.0)
    assert not technical_coefficients(table).values.any()
    s, _, _ = compute_intensities(table, EnergyAccount(table.sectors, [10, 0, 0, 0]))
    assert np.array_equal(s.total, s.direct)
    assert not s.indirect.any()


def test_all_zero_account_gives_zero_intensities(bundled_2005):
    table, account = bundled_2005
    s, _, _ = compute_intensities(table, EnergyAccount(account.sectors, np.zeros(5)))
    assert not (s.direct.any() or s.total.any() or s.indirect.any())


@pytest.mark.parametrize("method", ["arithmetic_mean", "output_weighted"])
def test_rescaling_divides_intensities(bundled_2011, method):
    table, account = bundled_2011
    c = 1000.0
    base, _, _ = compute_intensities(table, account, averaging_method=method)
    scaled, _, _ = compute_intensities(table.scaled(c), account, averaging_method=method)
    for name in ("direct", "total", "indirect"):
        np.testing.assert_allclose(getattr(scaled, name), getattr(base, name) / c, rtol=1e-12)
    np.testing.assert_allclose(scaled.share, base.share, rtol=1e-12)


# -- properties -----------------------------------------------------------------------
economies = st.tuples(st.integers(2, 50), st.integers(0, 2**32 - 1))


@settings(max_examples=60, deadline=None)
@given(economies)
def test_oracle_equivalence(params):
    n, seed = params
    rng = np.random.default_rng(seed)
    a = random_coefficients(rng, n, 0.9)
    d = rng.random(n) * rng.integers(0, 2, n)
    series = leontief_series_oracle(a, 200)
    assert np.max(np.abs(total_intensity(d, CoefficientMatrix(a)) - d @ series)) < 1e-8


@settings(max_examples=60, deadline=None)
@given(economies, st.sampled_from([0.1, 0.5, 0.9, 0.99]))
def test_pipeline_invariants_on_random_economies(params, max_col):
    n, seed = params
    rng = np.random.default_rng(seed)
    table = synthetic_economy(rng, n, n_energy=int(rng.integers(1, n)), max_column_sum=max_col)
    energy = rng.uniform(1, 100, n)
    s, _, _ = compute_intensities(table, EnergyAccount(table.sectors, energy))
    assert np.array_equal(s.total - s.direct - s.indirect, np.zeros(n))
    assert (s.indirect >= 0).all()
    assert (s.total >= s.direct).all()
    assert (s.direct >= 0).all()
