"""
Tests for the brute-force design search and its aggregation
"""
import math

import numpy as np
import pytest

from ki_paramp.design_search import (
    aggregate_by_znr,
    capacitance_for_bandwidth,
    search_designs,
    search_grid,
    xi3_ramp,
)
from ki_paramp.errors import ValidationError
from ki_paramp.models import CircuitKind, DesignRecord, SearchRanges

TWO_PI = 2 * math.pi
OMEGA0 = TWO_PI * 8e9


def record(z_nr, bandwidth, xi3):
    return DesignRecord(z_quarter=50.0, z_half=50.0, z_nr=z_nr, omega_p_half=OMEGA0,
                        max_bandwidth=bandwidth, optimal_xi3=xi3, eta=bandwidth / xi3)


def small_ranges(**overrides):
    settings = dict(z_quarter=(60.0, 60.0, 10.0), z_half=(40.0, 40.0, 10.0),
                    z_nr=(60.0, 60.0, 10.0), omega_p_half=(OMEGA0, OMEGA0, TWO_PI * 1e7),
                    window=TWO_PI * 0.3e9, freq_step=TWO_PI * 5e6)
    settings.update(overrides)
    return SearchRanges(**settings)


def test_grid_is_lexicographic():
    ranges = SearchRanges(z_quarter=(30.0, 40.0, 10.0), z_half=(30.0, 40.0, 10.0),
                          z_nr=(50.0, 60.0, 10.0), omega_p_half=(OMEGA0, OMEGA0, 1.0))
    grid = search_grid(ranges)
    assert len(grid) == 8
    assert grid[0] == (30.0, 30.0, 50.0, OMEGA0)
    assert grid[1] == (30.0, 30.0, 60.0, OMEGA0)
    assert grid[-1] == (40.0, 40.0, 60.0, OMEGA0)


def test_default_ranges_cover_the_stated_grid():
    assert len(search_grid(SearchRanges())) == 8 * 8 * 6 * 5


def test_xi3_ramp():
    ranges = SearchRanges(xi3_start=TWO_PI * 1e6, xi3_factor=2.0, xi3_cap=TWO_PI * 10e6)
    np.testing.assert_allclose(list(xi3_ramp(ranges)), TWO_PI * np.array([1e6, 2e6, 4e6, 8e6]))


def test_range_validation():
    with pytest.raises(ValidationError):
        SearchRanges(z_nr=(60.0, 50.0, 10.0))
    with pytest.raises(ValidationError):
        SearchRanges(xi3_factor=1.0)


def test_aggregate_statistics():
    records = [record(60.0, TWO_PI * 400e6, TWO_PI * 1e9),
               record(60.0, TWO_PI * 600e6, TWO_PI * 2e9),
               record(50.0, TWO_PI * 300e6, TWO_PI * 1e9)]
    summaries = aggregate_by_znr(records, OMEGA0)
    assert [s.z_nr for s in summaries] == [50.0, 60.0]
    sixty = summaries[1]
    assert sixty.count == 2
    assert sixty.mean_bandwidth == pytest.approx(TWO_PI * 500e6)
    assert sixty.std_bandwidth == pytest.approx(TWO_PI * 100e6)
    assert sixty.max_eta == pytest.approx(0.4)
    assert sixty.min_eta == pytest.approx(0.3)
    assert sixty.capacitance == pytest.approx(1.0 / (OMEGA0 * 60.0))


def test_capacitance_for_bandwidth():
    records = [record(40.0, TWO_PI * 600e6, TWO_PI * 1e9),
               record(60.0, TWO_PI * 500e6, TWO_PI * 1e9),
               record(80.0, TWO_PI * 300e6, TWO_PI * 1e9)]
    summaries = aggregate_by_znr(records, OMEGA0)
    assert capacitance_for_bandwidth(summaries, OMEGA0, 0.0625) == pytest.approx(
        1.0 / (OMEGA0 * 60.0))
    assert math.isnan(capacitance_for_bandwidth(summaries, OMEGA0, 0.2))


@pytest.mark.parametrize("circuit", [CircuitKind.THREE_STAGE, CircuitKind.CONVENTIONAL])
def test_search_records_are_consistent(circuit):
    ranges = small_ranges(circuit_kind=circuit)
    serial = list(search_designs(ranges, threads=1))
    parallel = list(search_designs(ranges, threads=2))
    assert serial == parallel
    for found in serial:
        assert found.max_bandwidth > 0
        assert found.eta == pytest.approx(found.max_bandwidth / found.optimal_xi3)
