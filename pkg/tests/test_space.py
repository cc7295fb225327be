import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from fockop import ParameterError, RangeError, SpaceParams
from fockop.space import (MultiIndex, as_multi_index, degree_blocks, graded_basis, kernel_constant,
                          log_moment, moment, normalization_constant, orthonormal_coefficient)


def test_params_validation():
    with pytest.raises(ParameterError):
        SpaceParams(0, 1.0)
    with pytest.raises(ParameterError):
        SpaceParams(1, 0.5)
    with pytest.raises(ParameterError):
        SpaceParams(1, 1.0, alpha=0.0)
    with pytest.raises(ParameterError):
        SpaceParams(1, 1.0, s=-0.1)
    with pytest.raises(ParameterError):
        SpaceParams(1.5, 1.0)
    p = SpaceParams(2, 2, 3, 1)
    assert p.ml_beta == 0.5 and p.ml_gamma == 1.0
    assert p.as_dict() == {"d": 2, "m": 2.0, "alpha": 3.0, "s": 1.0}


def test_gaussian_constants():
    # m=1, s=0, alpha=1: c = 1/pi^d and S(nu) = nu!
    for d in (1, 2, 3):
        p = SpaceParams(d, 1.0)
        assert normalization_constant(p) == pytest.approx(math.pi ** -d, rel=1e-14)
        assert kernel_constant(p) == pytest.approx(1.0, rel=1e-14)
    p = SpaceParams(2, 1.0)
    assert moment(p, (3, 2)) == pytest.approx(12.0, rel=1e-13)


def test_frozen_moments():
    # mpmath quadrature of the defining integral (tests/oracles/generate.py)
    assert moment(SpaceParams(2, 1.5, s=0.5), (2, 3)) == pytest.approx(0.44309286697298898776, rel=1e-13)
    assert moment(SpaceParams(1, 2.0), (7,)) == pytest.approx(3.3851375012865377217, rel=1e-13)


def test_alpha_scaling():
    # S_alpha(nu) = alpha^(-|nu|/m) S_1(nu)
    p1, p3 = SpaceParams(2, 1.5, 1.0, 0.5), SpaceParams(2, 1.5, 3.0, 0.5)
    for nu in [(1, 0), (2, 3), (0, 5)]:
        assert moment(p3, nu) == pytest.approx(3.0 ** (-sum(nu) / 1.5) * moment(p1, nu), rel=1e-13)


def test_moment_overflow_is_reported():
    p = SpaceParams(1, 1.0)
    assert math.isfinite(log_moment(p, (400,)))
    with pytest.raises(RangeError):
        moment(p, (400,))


def test_orthonormal_coefficient():
    p = SpaceParams(1, 2.0, s=0.5)
    assert orthonormal_coefficient(p, (3,)) ** 2 * moment(p, (3,)) == pytest.approx(1.0, rel=1e-13)


def test_graded_basis_order_and_size():
    basis = graded_basis(2, 3)
    assert basis[:3] == [(0, 0), (1, 0), (0, 1)]
    assert len(basis) == math.comb(3 + 2, 2)
    degs = [sum(nu) for nu in basis]
    assert degs == sorted(degs)
    blocks = degree_blocks(basis)
    assert [len(blocks[k]) for k in range(4)] == [1, 2, 3, 4]
    assert len(graded_basis(SpaceParams(3, 1.0), 4)) == math.comb(7, 3)


def test_multi_index():
    nu = as_multi_index((2, 1), 2)
    assert isinstance(nu, MultiIndex)
    assert nu.total_degree == 3 and nu.factorial() == 2
    assert nu + (1, 1) == (3, 2)
    with pytest.raises(ParameterError):
        as_multi_index((1, -1), 2)
    with pytest.raises(ParameterError):
        as_multi_index((1,), 2)


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 3), m=st.floats(1.0, 3.0), s=st.floats(0.0, 2.0),
       nu=st.lists(st.integers(0, 12), min_size=3, max_size=3))
def test_moment_ratio_property(d, m, s, nu):
    # S(nu + e_1) / S(nu) = (nu_1 + 1) Gamma(a+1)/Gamma(a) * Gamma(d+k)/Gamma(d+k+1), a=(d+s+k)/m
    p = SpaceParams(d, m, s=s)
    nu = tuple(nu[:d])
    k = sum(nu)
    up = (nu[0] + 1,) + nu[1:]
    a = (d + s + k) / m
    expect = (nu[0] + 1) * math.exp(math.lgamma(a + 1 / m) - math.lgamma(a)) / (d + k)
    assert math.exp(log_moment(p, up) - log_moment(p, nu)) == pytest.approx(expect, rel=1e-11)


def test_moment_degree_zero_is_one():
    for d, m, s in [(1, 1.0, 0.0), (2, 1.7, 0.3), (4, 2.5, 1.0)]:
        assert moment(SpaceParams(d, m, s=s), (0,) * d) == pytest.approx(1.0, abs=1e-15)


def test_gamma_identity_direct():
    p = SpaceParams(1, 1.5, s=0.5)
    c_s = gamma((1 + 0.5) / 1.5) / gamma(1)
    expect = math.factorial(4) * gamma((1 + 0.5 + 4) / 1.5) / (gamma(1 + 4) * c_s)
    assert moment(p, (4,)) == pytest.approx(expect, rel=1e-13)
    assert np.isclose(kernel_constant(p), c_s)
