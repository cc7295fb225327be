"""Acceptance criteria 1-12; each test prints one PASS/FAIL line."""

import itertools
import json
import math
import time

import numpy as np
import pytest
from scipy.special import gammaln, loggamma

from fockop import SpaceParams
from fockop.cli import run
from fockop.mellin import gamma_quotient, gamma_quotient_mellin, omega, period_scan
from fockop.quadrature import _unit_rule, moment_table
from fockop.space import moment
from fockop.special import (ASYMPTOTIC, SERIES, MLParams, kernel_asymptotic_ratio, kernel_eval,
                            ml_evaluate)
from fockop.symbols import (constant, exp_radial, g_transform, parse_symbol, radial_power,
                            v_transform)
from fockop.toeplitz import (commutator_residual, counterexample_check, offblock_mass,
                             project_pointwise, zero_product_residual)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"criterion {number} failed: {detail}"

    return emit


def test_criterion_01_moments(report):
    _unit_rule.cache_clear()
    t0 = time.perf_counter()
    worst = 0.0
    for d, m, s in itertools.product((1, 2), (1.0, 1.5, 2.0), (0.0, 0.5)):
        p = SpaceParams(d, m, s=s)
        for nu, quad in moment_table(p, 10).items():
            worst = max(worst, abs(quad - moment(p, nu)) / moment(p, nu))
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-10 and elapsed < 5.0, f"max rel error {worst:.2e}, runtime {elapsed:.2f} s")


def test_criterion_02_gaussian_collapse(report):
    rng = np.random.default_rng(2)
    worst, n = 0.0, 0
    for d in (1, 2):
        p = SpaceParams(d, 1.0, s=0.0)
        while n < 20 * d:
            x = rng.normal(size=d) * 2 + 2j * rng.normal(size=d)
            y = rng.normal(size=d) * 2 + 2j * rng.normal(size=d)
            w = np.sum(x * np.conj(y))
            if abs(w) > 10:
                continue
            worst = max(worst, abs(kernel_eval(p, x, y) / np.exp(w) - 1))
            n += 1
    report(2, worst <= 1e-10, f"max rel error {worst:.2e} over {n} pairs")


def test_criterion_03_reproducing(report):
    rng = np.random.default_rng(3)
    pts = 2 * np.sqrt(rng.uniform(size=10)) * np.exp(2j * np.pi * rng.uniform(size=10))
    worst = 0.0
    for m, s in [(1.0, 0.0), (2.0, 0.0), (1.5, 0.5)]:
        p = SpaceParams(1, m, s=s)
        for n in range(7):
            u = parse_symbol(f"z1^{n}", 1) if n else constant(1, 1)
            for z0 in pts:
                worst = max(worst, abs(project_pointwise(u, [z0], p) - z0 ** n))
    report(3, worst <= 1e-8, f"max |P(z^n)(z0) - z0^n| = {worst:.2e}")


def test_criterion_04_omega(report):
    worst_one = worst_r2 = worst_exp = 0.0
    zetas = [x + 1j * y for x in np.linspace(0, 20, 11) for y in (0.0, 2.0)]
    for d, m, s in itertools.product((1, 2), (1.0, 1.5, 2.0), (0.0, 0.5)):
        p = SpaceParams(d, m, s=s)
        one, r2 = constant(1, d), radial_power(2, d)
        for zeta in zetas:
            a = d + s + zeta
            worst_one = max(worst_one, abs(omega(one, zeta, p, method="quadrature") - 1))
            ref = complex(np.exp(loggamma((a + 1) / m) - loggamma(a / m)))
            worst_r2 = max(worst_r2, abs(omega(r2, zeta, p, method="quadrature") / ref - 1))
            for lam in (0.2, 0.3 + 0.1j):
                ref = (1 - lam) ** (-a / m)
                val = omega(exp_radial(lam, m, d), zeta, p, method="quadrature")
                worst_exp = max(worst_exp, abs(val / ref - 1))
    ok = worst_one <= 1e-10 and worst_r2 <= 1e-10 and worst_exp <= 1e-9
    report(4, ok, f"|Omega(1)-1| {worst_one:.2e}, r^2 {worst_r2:.2e}, exp {worst_exp:.2e}")


def test_criterion_05_mittag_leffler(report):
    worst_ratio = worst_cross = 0.0
    for m, s, d in [(1.5, 0.0, 1), (2.0, 0.0, 1), (2.0, 1.0, 2)]:
        p = SpaceParams(d, m, s=s)
        worst_ratio = max(worst_ratio, abs(kernel_asymptotic_ratio(p, 12.0 ** (1 / m)) - 1))
        params = MLParams.for_kernel(p)
        for tm in (12.0, 20.0, 30.0, 60.0):
            t = tm ** (1 / m)
            a = ml_evaluate(params, t, regime=ASYMPTOTIC, as_mp=True).value
            b = ml_evaluate(params, t, regime=SERIES, as_mp=True).value
            worst_cross = max(worst_cross, float(abs(a / b - 1)))
    ok = worst_ratio <= 1e-3 and worst_cross <= 1e-8
    report(5, ok, f"|ratio - 1| {worst_ratio:.2e}, series/asymptotic {worst_cross:.2e}")


def test_criterion_06_gamma_quotient(report):
    worst = 0.0
    for a, b, m in [(1, 2, 1.0), (1, 3, 2.0), (2, 5, 1.5)]:
        for z in (0.5, 1, 2, 4):
            worst = max(worst, abs(gamma_quotient_mellin(a, b, m, z) / gamma_quotient(a, b, m, z) - 1))
    report(6, worst <= 1e-8, f"max rel error {worst:.2e}")


def test_criterion_07_scaling_law(report):
    worst = 0.0
    for d in (1, 2):
        zs = [np.full(d, 0.5), np.full(d, 1.2 + 0.7j), np.array([0.0, 2.0 - 1j][:d]) if d == 2 else np.array([2.0 - 1j])]
        for m, s in [(1.0, 0.0), (1.5, 0.5)]:
            p = SpaceParams(d, m, s=s)
            for text in ("1", "r^2", "z1*conj(z1)"):
                g = parse_symbol(text, d)
                for t in (0.5, 2.0):
                    Vg = v_transform(g, t, p)
                    for z in zs:
                        # these symbols have angular mode 0 only; 4 angles are exact
                        lhs = g_transform(Vg, z, p, n_theta=4)
                        rhs = t ** (-2 * (p.s + p.d) - 2 * np.sum(z)) * g_transform(g, z, p, n_theta=4)
                        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    report(7, worst <= 1e-8, f"max rel deviation {worst:.2e}")


CATALOG = {
    1: ["r^4", "1 + r^2", "exp(-r^2)", "z1*conj(z1)", "z1", "re(z1)", "conj(z1)^2", "z1^2*conj(z1)",
        "im(z1)*r^2"],
    2: ["r^4", "z1*conj(z2)", "abs(z1)^2", "z1^2*conj(z2)^2 + r^2", "z1", "re(z1)", "z1*z2",
        "conj(z2) + r^2", "im(z2)*abs(z1)"],
}


def test_criterion_08_invariance(report):
    tol, lines, ok = 1e-7, [], True
    for d, (m, s) in itertools.product((1, 2), [(1.0, 0.0), (2.0, 0.5)]):
        p = SpaceParams(d, m, s=s)
        f = radial_power(2, d)
        for text in CATALOG[d]:
            g = parse_symbol(text, d)
            res = commutator_residual(f, g, p, 10).residual
            off = offblock_mass(g, p, 10)
            ok &= (res <= tol) == (off <= tol)
            if text == "r^4" or text == "z1*conj(z2)":
                ok &= res <= tol
            if text in ("z1", "re(z1)"):
                ok &= res >= 0.05 and off >= 0.05
                lines.append(f"{text}@d{d}m{m:g}: {res:.3f}/{off:.3f}")
    report(8, ok, "non-invariant residual/offblock " + ", ".join(lines))


def test_criterion_09_zero_product(report):
    worst, ok = math.inf, True
    for d, (m, s) in itertools.product((1, 2), [(1.0, 0.0), (2.0, 0.5)]):
        p = SpaceParams(d, m, s=s)
        f = radial_power(2, d)
        for text in ("z1", "1 + z1*conj(z1)"):
            a, b = zero_product_residual(f, parse_symbol(text, d), p, 10)
            worst = min(worst, a.residual, b.residual)
        a, b = zero_product_residual(constant(0, d), parse_symbol("z1", d), p, 10)
        ok &= a.residual == 0.0 and b.residual == 0.0
    report(9, ok and worst >= 0.05, f"min zero-product residual {worst:.3f}, f=0 exact zero: {ok}")


def test_criterion_10_counterexample(report):
    t0 = time.perf_counter()
    rep = counterexample_check(8, SpaceParams(1, 1.0, s=0.0), 14)
    elapsed = time.perf_counter() - t0
    res = rep.commutator.residual
    ok = res <= 1e-7 and rep.offblock >= 0.05 and elapsed < 30
    report(10, ok, f"residual {res:.2e}, offblock {rep.offblock:.3f}, runtime {elapsed:.2f} s")


def test_criterion_11_period_scan(report):
    p = SpaceParams(1, 1.0)
    one, r2 = constant(1, 1), radial_power(2, 1)
    a = period_scan(one, one, p, (-5, 5), tol=1e-8)
    b = period_scan(r2, r2, p, (-5, 5), tol=1e-8)
    c = period_scan(r2, one, p, (-5, 5), tol=1e-8)
    ok = a == set(range(-5, 6)) and b == {0} and c == frozenset()
    report(11, ok, f"sizes {len(a)}, {sorted(b)}, {sorted(c)}")


def test_criterion_12_determinism(report, tmp_path):
    argv = ["commute", "--f", "r^2", "--g", "re(z1)", "--d", "2", "--m", "1.5", "--s", "0.5"]
    outs = []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        assert run(argv + ["--output", str(path)]) == 0
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and json.loads(outs[0])["results"]
    report(12, bool(ok), f"{len(outs[0])} bytes, identical: {outs[0] == outs[1]}")
