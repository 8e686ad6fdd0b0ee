import math

import pytest
from hypothesis import given, strategies as st

from lbt_coex.series import geo, geo_mixed, geo_weighted, one_minus_pow


def direct_geo(r, n):
    return math.fsum(r**i for i in range(n))


ratios = st.floats(0.0, 1.5, allow_nan=False)


@given(ratios, st.integers(0, 80))
def test_geo_matches_direct_sum(r, n):
    assert geo(r, n) == pytest.approx(direct_geo(r, n), rel=1e-11, abs=1e-14)


@given(ratios, st.integers(0, 80))
def test_geo_weighted_matches_definition(r, n):
    expected = math.fsum(direct_geo(r, j) for j in range(1, n + 1))
    assert geo_weighted(r, n) == pytest.approx(expected, rel=1e-10, abs=1e-14)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.integers(0, 60))
def test_geo_mixed_matches_definition(x, y, n):
    expected = math.fsum(y**j * x ** (n - j) for j in range(n))
    assert geo_mixed(x, y, n) == pytest.approx(expected, rel=1e-9, abs=1e-13)


@pytest.mark.parametrize("r", [1.0, 1 - 1e-12, 1 + 1e-12, 1 - 5e-5])
def test_geo_at_removable_singularity(r):
    assert geo(r, 7) == pytest.approx(direct_geo(r, 7), rel=1e-13)
    assert geo_weighted(1.0, 4) == 10.0


def test_one_minus_pow_tiny_argument():
    # 1 - (1 - 1e-12)^3 = 3e-12 - 3e-24 + ...: naive evaluation loses most digits
    assert one_minus_pow(1 - 1e-12, 3) == pytest.approx(3e-12, rel=1e-9)
    assert one_minus_pow(0.0, 5) == 1.0
    assert one_minus_pow(0.7, 0) == 0.0
