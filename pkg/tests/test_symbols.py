import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from fockop import ParameterError, SpaceParams, SymbolParseError
from fockop.symbols import (RADIAL, ROTATION_INVARIANT, GENERAL, ScaleIndex, constant,
                            counterexample_symbol, dc_norm_estimate, exp_radial, g_transform,
                            g_transform_mellin_d1, indicator_radius, monomial, parse_symbol,
                            radial_power, radialize, v_transform)

# frozen mpmath reference (tests/oracles/generate.py)
DC_R4 = 54.134113294645076758
G_R2_D1 = 1.0459346851333158524 + 0.106562572255959027j


def _pts(rng, d, n=20):
    return rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))


def test_parse_examples(rng):
    g = parse_symbol("r^2", 1)
    assert g.radiality == RADIAL
    z = _pts(rng, 1)
    assert np.allclose(g(z), np.abs(z[:, 0]) ** 2)

    h = parse_symbol("z1 * conj(z2)", 2)
    assert h.radiality == ROTATION_INVARIANT
    z = _pts(rng, 2)
    assert np.allclose(h(np.exp(0.7j) * z), h(z), atol=1e-14)

    assert parse_symbol("z1", 2).radiality == GENERAL


@pytest.mark.parametrize("text,d,fn", [
    ("1 + 2*i", 1, lambda z: np.full(len(z), 1 + 2j)),
    ("exp(-0.5*r^2) * z1^2", 1, lambda z: np.exp(-0.5 * np.abs(z[:, 0]) ** 2) * z[:, 0] ** 2),
    ("re(z1) - im(z2)/3", 2, lambda z: z[:, 0].real - z[:, 1].imag / 3),
    ("abs(z1)^-2 * conj(z1)", 1, lambda z: np.abs(z[:, 0]) ** -2 * np.conj(z[:, 0])),
    ("-z1 * (z2 + 1.5)", 2, lambda z: -z[:, 0] * (z[:, 1] + 1.5)),
    ("  r ^ 4 ", 3, lambda z: np.sum(np.abs(z) ** 2, axis=1) ** 2),
])
def test_parse_evaluates(rng, text, d, fn):
    z = _pts(rng, d)
    assert np.allclose(parse_symbol(text, d)(z), fn(z), rtol=1e-13)


def test_parse_radiality_inference():
    assert parse_symbol("z1*conj(z1)", 1).radiality == RADIAL
    assert parse_symbol("z1*conj(z1)", 2).radiality == ROTATION_INVARIANT
    assert parse_symbol("z1*conj(z1) + z2*conj(z2)", 2).radiality == RADIAL
    assert parse_symbol("abs(z1)^2", 2).radiality == ROTATION_INVARIANT
    assert parse_symbol("exp(r^2) + r", 2).radiality == RADIAL
    assert parse_symbol("re(z1)", 1).radiality == GENERAL


@pytest.mark.parametrize("text,d,pos", [("r^", 1, 2), ("z1 + ", 1, 5), ("foo", 1, 0),
                                        ("(z1", 1, 3), ("r^1.5", 1, 2), ("z1 $ 2", 1, 3)])
def test_parse_errors(text, d, pos):
    with pytest.raises(SymbolParseError) as exc:
        parse_symbol(text, d)
    assert exc.value.position == pos


def test_parse_arity_error():
    with pytest.raises(SymbolParseError, match="z3"):
        parse_symbol("z1 + z3", 2)


CATALOG_TEXTS = ["r^2", "exp(-r^2)*r^3", "z1*conj(z1)", "abs(z1)^2 + abs(z2)^4",
                 "z1*conj(z2)", "z1^2*conj(z2)^2", "re(z1)", "r^2 * z1", "(1+i)*r^-1",
                 "exp(0.2*i*r^4)", "im(z2)*r"]


@settings(max_examples=30, deadline=None)
@given(text=st.sampled_from(CATALOG_TEXTS), seed=st.integers(0, 2 ** 32 - 1))
def test_radiality_soundness(text, seed):
    g = parse_symbol(text, 2)
    rng = np.random.default_rng(seed)
    z = _pts(rng, 2, 8)
    scale = 1 + np.max(np.abs(g(z)))
    if g.radiality in (RADIAL, ROTATION_INVARIANT):
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(8, 2 if g.radiality == RADIAL else 1)))
        assert np.max(np.abs(g(phases * z) - g(z))) <= 1e-12 * scale
    if g.radiality == RADIAL:
        # full unitary invariance: swap coordinates
        assert np.max(np.abs(g(z[:, ::-1]) - g(z))) <= 1e-12 * scale


def test_catalog_metadata():
    assert constant(3, 2).constant_value == 3
    assert radial_power(2.0, 1).closed_form == ("power", 2.0)
    e = exp_radial(0.2 - 0.1j, 1.5, 2)
    assert e.is_radial and e.growth_c == pytest.approx(0.2)
    assert monomial((1, 0), (0, 1), 2).radiality == ROTATION_INVARIANT
    assert monomial((2,), (0,), 1).deg_window == 2
    c = counterexample_symbol(5, 2)
    assert c.deg_window == 5 and c(np.zeros((1, 2)))[0] == 0
    z = np.array([[1 + 1j, 0.3]])
    w = np.exp(2j * np.pi / 5)
    assert c(w * z)[0] == pytest.approx(c(z)[0], abs=1e-14)
    assert c(np.exp(0.3j) * z)[0] != pytest.approx(c(z)[0], abs=1e-3)
    chi = indicator_radius(1.0, 1)
    assert list(chi(np.array([[0.5], [1.5]])).real) == [1.0, 0.0]


def test_scale_index():
    assert ScaleIndex(0).c == 0.0
    assert ScaleIndex(1).c == 0.25
    s = ScaleIndex(0)
    for _ in range(50):
        nxt = s.next()
        assert ScaleIndex.recurrence(s.c) == pytest.approx(nxt.c, rel=1e-15, abs=1e-16)
        s = nxt
    with pytest.raises(ParameterError):
        ScaleIndex(-1)


def test_dc_norm():
    p = SpaceParams(1, 1.0)
    assert dc_norm_estimate(constant(1, 1), 0.3, p) == pytest.approx(1.0)
    assert dc_norm_estimate(exp_radial(0.1, 1.0, 1), 0.2, p) == pytest.approx(1.0)
    # max of t^2 e^{-0.1 t} at t = 20 equals 400 e^{-2}
    assert DC_R4 == pytest.approx(400 * math.exp(-2), rel=1e-15)
    val = dc_norm_estimate(radial_power(4, 1), 0.1, p, r_max=8)
    assert val <= DC_R4 * (1 + 1e-12)
    assert val == pytest.approx(DC_R4, rel=1e-9)
    p2 = SpaceParams(2, 1.0)
    assert dc_norm_estimate(parse_symbol("abs(z1)^4", 2), 0.1, p2, r_max=8) == pytest.approx(DC_R4, rel=1e-9)
    with pytest.raises(ParameterError):
        dc_norm_estimate(constant(1, 1), -1.0, p)


def test_v_transform_examples(rng):
    p = SpaceParams(1, 1.0)
    z = _pts(rng, 1)
    g = parse_symbol("z1*conj(z1)^2 + 1", 1)
    assert np.allclose(v_transform(g, 1.0, p)(z), g(z), rtol=1e-14)
    assert np.allclose(v_transform(constant(1, 1), 2.0, p)(z), np.exp(-3 * np.abs(z[:, 0]) ** 2), rtol=1e-13)
    for m in (1.0, 1.5):
        pm = SpaceParams(1, m)
        r2 = np.abs(z[:, 0]) ** 2
        expect = 4 * r2 * np.exp((1 - 2 ** (2 * m)) * r2 ** m)
        assert np.allclose(v_transform(radial_power(2, 1), 2.0, pm)(z), expect, rtol=1e-12, atol=1e-300)
    with pytest.raises(ParameterError):
        v_transform(g, 0.0, p)


def test_v_transform_composes_exponential():
    p = SpaceParams(1, 1.5)
    g = exp_radial(0.2, 1.5, 1)
    v = v_transform(g, 0.5, p)
    assert v.exp_m == 1.5
    assert v.exp_lam == pytest.approx(0.2 * 0.5 ** 3 + (1 - 0.5 ** 3))


def test_radialize():
    assert radialize(constant(1, 1), 1.3) == pytest.approx(2.0)
    assert abs(radialize(parse_symbol("z1", 1), 2.0)) < 1e-14
    assert radialize(radial_power(2, 1), 3.0) == pytest.approx(18.0)
    with pytest.raises(ParameterError):
        radialize(constant(1, 2), 1.0)


def test_g_transform_examples():
    for d, m, s in [(1, 1.0, 0.0), (2, 1.5, 0.5), (3, 2.0, 1.0)]:
        p = SpaceParams(d, m, s=s)
        assert g_transform(constant(1, d), np.zeros(d), p) == pytest.approx(1.0, rel=1e-13)
    p = SpaceParams(1, 1.0)
    for z in (0.5, 1.0, 2.3):
        assert g_transform(constant(1, 1), [z], p) == pytest.approx(gamma(1 + z), rel=1e-12)
    p = SpaceParams(1, 1.5, s=0.5)
    assert g_transform(radial_power(2, 1), [0.7 + 0.3j], p) == pytest.approx(G_R2_D1, rel=1e-12)
    with pytest.raises(ParameterError):
        g_transform(constant(1, 1), [-0.5], SpaceParams(1, 1.0))


def test_g_transform_high_dimension():
    # for g = 1 the transform is prod Gamma(1+z_j) Gamma((d+s)/m)-ratio; compare with d<=2 routine
    p3 = SpaceParams(3, 1.5, s=0.5)
    z = np.array([0.5, 1.0 + 0.2j, 0.0])
    g = radial_power(2, 3)
    val = g_transform(g, z, p3)
    # direct: |x|^2 = sum |x_j|^2 and each term is a moment-type transform
    ref = sum(g_transform(constant(1, 3), z + np.eye(3)[j], p3) for j in range(3))
    assert val == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ParameterError):
        g_transform(parse_symbol("z1", 3), z, p3)


@pytest.mark.parametrize("text", ["r^2", "1", "exp(-0.3*r^2)", "r^3 + z1^2", "re(z1)^2"])
@pytest.mark.parametrize("alpha", [1.0, 2.5])
def test_g_transform_mellin_route(text, alpha):
    p = SpaceParams(1, 1.5, alpha=alpha, s=0.5)
    g = parse_symbol(text, 1)
    for z in (0.3, 1.1 + 0.4j):
        direct = g_transform(g, [z], p, n_r=120, n_theta=64)
        mell = g_transform_mellin_d1(g, z, p)
        assert abs(direct - mell) <= 1e-8 * max(1.0, abs(mell))


@pytest.mark.parametrize("alpha", [1.0, 0.4])
def test_g_transform_scaling_law(alpha):
    p = SpaceParams(2, 1.5, alpha=alpha, s=0.5)
    g = parse_symbol("z1*conj(z2) + r^2", 2)
    z = np.array([0.4 + 0.2j, 1.0])
    # angular modes of g are at most 1, so 8 angles per coordinate are exact
    base = g_transform(g, z, p, n_theta=8)
    for t in (0.5, 2.0, 3.0):
        lhs = g_transform(v_transform(g, t, p), z, p, n_theta=8)
        rhs = t ** (-2 * (p.s + p.d) - 2 * np.sum(z)) * base
        assert abs(lhs - rhs) <= 1e-8 * abs(rhs)
