"""Mellin transforms, the radial eigenvalue function Omega and period scans.

For a radial symbol f the Toeplitz operator T_f is diagonal on the monomial
basis with eigenvalue Omega(f, |nu|), where

    Omega(f, zeta) = alpha^(a/m) m / Gamma(a/m) * int_0^inf u^(a-1) f(sqrt u) e^(-alpha u^m) du,
    a = d + s + zeta,

i.e. a Gamma-normalised Mellin transform of f(r) r^(2d+2s) e^(-alpha r^(2m)).
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp
import numpy as np
from scipy import integrate
from scipy.special import gammaln, loggamma

from .errors import DivergenceError, ParameterError
from .quadrature import check_tail, gauss_power_exp, log_trapezoid_power_exp
from .space import SpaceParams

DEFAULT_OMEGA_NODES = 60
_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-12, limit=400)


@dataclass(frozen=True)
class HalfLineFunction:
    """Callable on (0, inf) with optional support and tail hints for quadrature."""

    func: Callable = field(repr=False)
    support: tuple = (0.0, math.inf)
    decay: float | None = None
    label: str = ""
    mass: float | None = None

    def __call__(self, x):
        return self.func(x)


def _support(f):
    return getattr(f, "support", (0.0, math.inf))


def bump(center: float = 1.0, width: float = 1e-2) -> HalfLineFunction:
    """Smooth bump of unit mass (in dy/y) supported in [center e^-width, center e^width]."""
    from scipy.integrate import quad

    def raw(s):
        s = np.asarray(s, dtype=float)
        inside = np.abs(s) < 1
        with np.errstate(over="ignore", divide="ignore"):
            return np.where(inside, np.exp(-1.0 / np.where(inside, 1 - s * s, 1.0)), 0.0)

    norm = quad(lambda s: float(raw(s)), -1, 1, epsabs=0, epsrel=1e-13)[0] * width

    def f(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            s = np.log(y / center) / width
        return raw(s) / norm

    return HalfLineFunction(f, (center * math.exp(-width), center * math.exp(width)),
                            label=f"bump({center:g},{width:g})", mass=1.0)


def indicator(lo: float, hi: float) -> HalfLineFunction:
    """chi_[lo, hi]."""
    return HalfLineFunction(lambda x: ((np.asarray(x) >= lo) & (np.asarray(x) <= hi)).astype(float),
                            (float(lo), float(hi)), label=f"chi[{lo:g},{hi:g}]")


@dataclass(frozen=True)
class MellinStrip:
    """Vertical strip a < Re zeta < b."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ParameterError(f"strip needs a < b (got {self.a}, {self.b})")

    def contains(self, zeta) -> bool:
        return self.a < complex(zeta).real < self.b

    def sample(self, n_re: int = 5, im_values=(0.0, 1.0, -2.5)) -> list[complex]:
        lo = self.a if math.isfinite(self.a) else -10.0
        hi = self.b if math.isfinite(self.b) else lo + 20.0
        re = np.linspace(lo, hi, n_re + 2)[1:-1]
        return [complex(x, y) for x in re for y in im_values]

    def check_finite(self, f, **kwargs) -> bool:
        """Transform finite at every sampled point (the type invariant)."""
        for z in self.sample():
            if not np.isfinite(mellin_transform(f, z, **kwargs)):
                return False
        return True


# --------------------------------------------------------------------------
# Transform and convolution

def _integrate_complex(h, lo, hi):
    """Integrate complex h over [lo, hi] by separate real/imag quad calls."""
    vals, errs, ok = [], [], True
    for take in (np.real, np.imag):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            out = integrate.quad(lambda t: float(take(complex(h(t)))), lo, hi, full_output=1, **_QUAD_OPTS)
        vals.append(out[0])
        errs.append(out[1])
        if len(out) >= 4:
            ok = False
    return complex(vals[0], vals[1]), math.hypot(*errs), ok


def _checked(value, err, ok, what):
    if not np.isfinite(value):
        raise DivergenceError(f"{what}: integral is not finite")
    if not ok and err > 1e-6 * max(abs(value), 1e-300) and err > 1e-12:
        raise DivergenceError(f"{what}: quadrature did not stabilise (error estimate {err:.2e})")
    return value


def mellin_transform(f, zeta: complex, decay: float | None = None, support=None) -> complex:
    """int_0^inf f(x) x^(zeta-1) dx.

    ``decay`` = m maps x = t^(1/m), turning exp(-x^(2m)) tails into exp(-t^2);
    ``support`` = (lo, hi) restricts the range for compactly supported f.
    """
    zeta = complex(zeta)
    lo, hi = support if support is not None else _support(f)
    decay = decay if decay is not None else getattr(f, "decay", None)

    def val(x):
        return complex(np.asarray(f(np.asarray(x, dtype=float))).ravel()[0])

    if math.isfinite(hi):
        def h(x):
            return val(x) * x ** (zeta - 1) if x > 0 else 0j

        return _checked(*_integrate_complex(h, lo, hi), "Mellin transform")

    m = float(decay) if decay else 1.0
    t_lo = lo ** m

    def g(t):
        if t <= 0:
            return 0j
        return val(t ** (1.0 / m)) * t ** (zeta / m - 1) / m

    total, err, ok = 0j, 0.0, True
    pieces = [(t_lo, 1.0), (1.0, math.inf)] if t_lo < 1.0 else [(t_lo, math.inf)]
    for a, b in pieces:
        v, e, o = _integrate_complex(g, a, b)
        total, err, ok = total + v, math.hypot(err, e), ok and o
    return _checked(total, err, ok, "Mellin transform")


def mellin_convolve(f, g, x: float, support_f=None, support_g=None) -> complex:
    """(f * g)(x) = int_0^inf f(y) g(x/y) dy/y."""
    if not x > 0:
        raise ParameterError("convolution point must be > 0")
    flo, fhi = support_f if support_f is not None else _support(f)
    glo, ghi = support_g if support_g is not None else _support(g)
    # x/y in [glo, ghi]  <=>  y in [x/ghi, x/glo]
    lo = max(flo, x / ghi if math.isfinite(ghi) else 0.0)
    hi = min(fhi, x / glo if glo > 0 else math.inf)
    if not hi > lo:
        return 0j

    def h(y):
        if y <= 0:
            return 0j
        fy = complex(np.asarray(f(np.asarray(y))).ravel()[0])
        gy = complex(np.asarray(g(np.asarray(x / y))).ravel()[0])
        return fy * gy / y

    if math.isfinite(hi):
        return _checked(*_integrate_complex(h, lo, hi), "Mellin convolution")
    total, err, ok = 0j, 0.0, True
    mid = max(lo, 1.0)
    for a, b in ([(lo, mid)] if mid > lo else []) + [(mid, math.inf)]:
        v, e, o = _integrate_complex(h, a, b)
        total, err, ok = total + v, math.hypot(err, e), ok and o
    return _checked(total, err, ok, "Mellin convolution")


# --------------------------------------------------------------------------
# Omega

def _closed_form_omega(f, zeta: complex, p: SpaceParams):
    cf = getattr(f, "closed_form", None)
    if cf is None:
        return None
    a = p.d + p.s + zeta
    if cf[0] == "const":
        return complex(cf[1])
    if cf[0] == "power":
        e = cf[1] / 2.0
        return complex(np.exp(loggamma((a + e) / p.m) - loggamma(a / p.m) - e / p.m * math.log(p.alpha)))
    if cf[0] == "indicator":
        # regularised lower incomplete gamma P(a/m, alpha R^(2m))
        x = p.alpha * cf[1] ** (2 * p.m)
        return complex(mp.gammainc(mp.mpc(a) / p.m, 0, x, regularized=True))
    if cf[0] == "exp" and math.isclose(cf[2], p.m, abs_tol=1e-14):
        lam = complex(cf[1])
        if not lam.real < p.alpha:
            raise DivergenceError(f"exp({lam} r^(2m)) grows too fast: needs Re lambda < alpha")
        # principal branch of (1 - lambda/alpha)^(-a/m)
        return complex(np.exp(-(a / p.m) * np.log(1 - lam / p.alpha)))
    return None


def _omega_quadrature(f, zeta: complex, p: SpaceParams, n: int) -> complex:
    prof, lam = f.profile_split(p.m) if hasattr(f, "profile_split") else (f, 0j)
    lam = complex(lam)
    beta = p.alpha - lam.real
    if not beta > 0:
        raise DivergenceError("symbol grows too fast for the radial integral to converge")
    a = p.d + p.s + zeta
    if not a.real > 0:
        raise ParameterError(f"Omega needs Re zeta > -(d+s) = {-(p.d + p.s)}")
    if a.imag or (lam.imag and not float(p.m).is_integer()):
        # u^{ib} and exp(i c u^m) are not smooth at u = 0; the log-variable rule handles them
        k = 0
        u, w = log_trapezoid_power_exp(a.real, p.m, beta, lam_imag=lam.imag, b=a.imag)
    else:
        # one rule per fractional part; integer shifts are carried by u^k
        k = max(0, math.floor(a.real) - 1)
        u, w = gauss_power_exp(a.real - k, p.m, beta, n)
    vals = np.asarray(prof(np.sqrt(u)), dtype=complex) * u ** k
    if a.imag:
        vals = vals * u ** (1j * a.imag)
    if lam.imag:
        vals = vals * np.exp(1j * lam.imag * u ** p.m)
    if not np.all(np.isfinite(vals)):
        raise DivergenceError("radial integrand is not finite at a quadrature node")
    check_tail(w * vals, "Omega quadrature")
    log_norm = loggamma(a / p.m) - (a / p.m) * math.log(p.alpha) - math.log(p.m)
    return complex(np.dot(w, vals) * np.exp(-log_norm))


def omega(f, zeta: complex, p: SpaceParams, method: str = "auto", n: int = DEFAULT_OMEGA_NODES) -> complex:
    """Omega(f, zeta) for a radial symbol f.

    method: "auto" (closed form for catalog constants, r^p, exp(lam r^(2m)) and chi_{r<=R},
    otherwise quadrature), "closed_form" or "quadrature".
    """
    zeta = complex(zeta)
    if not (p.d + p.s + zeta.real) > 0:
        raise ParameterError(f"Omega needs Re zeta > -(d+s) = {-(p.d + p.s)}")
    if getattr(f, "radiality", "radial") != "radial":
        raise ParameterError(f"Omega is defined for radial symbols; {getattr(f, 'label', f)!r} is not")
    if method not in ("auto", "closed_form", "quadrature"):
        raise ParameterError(f"unknown method {method!r}")
    if method != "quadrature":
        val = _closed_form_omega(f, zeta, p)
        if val is not None:
            return val
        if method == "closed_form":
            raise ParameterError("no closed form available for this symbol")
    return _omega_quadrature(f, zeta, p, n)


class OmegaFunction:
    """zeta -> Omega(f, zeta) with a thread-safe memo table."""

    def __init__(self, f, p: SpaceParams, method: str = "auto", n: int = DEFAULT_OMEGA_NODES):
        if getattr(f, "radiality", "radial") != "radial":
            raise ParameterError("OmegaFunction needs a radial symbol")
        self.f = f
        self.params = p
        self.method = method
        self.n = n
        self._cache: dict[complex, complex] = {}
        self._lock = threading.Lock()

    def __call__(self, zeta) -> complex:
        key = complex(zeta)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        val = omega(self.f, key, self.params, self.method, self.n)
        with self._lock:
            self._cache[key] = val
        return val

    def at_index(self, nu) -> complex:
        """omega(f, nu) = Omega(f, |nu|)."""
        return self(float(sum(np.atleast_1d(nu))))

    @property
    def cache_size(self) -> int:
        with self._lock:
            return len(self._cache)


# --------------------------------------------------------------------------
# Gamma-quotient kernel

def _gq_check(a, b, m):
    if not m > 0:
        raise ParameterError("m must be > 0")
    if not b > a:
        raise ParameterError(f"need a < b (got a={a}, b={b}); (1-x^m)^(b'-a'-1) is not integrable")


def gamma_quotient_kernel(a: float, b: float, m: float, r) -> np.ndarray | float:
    """v(r) = 2 v1(r^2), v1(x) = m/Gamma(b'-a') x^(m a') (1-x^m)^(b'-a'-1) on (0,1).

    a' = a/m, b' = b/m; zero outside (0, 1).  Its Mellin transform at 2z is
    Gamma((a+z)/m) / Gamma((b+z)/m).
    """
    _gq_check(a, b, m)
    ap, bp = a / m, b / m
    r = np.asarray(r, dtype=float)
    x = r * r
    inside = (r > 0) & (r < 1)
    xs = np.where(inside, x, 0.5)
    val = 2 * m * np.exp(-gammaln(bp - ap)) * xs ** (m * ap) * (1 - xs ** m) ** (bp - ap - 1)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def gamma_quotient(a: float, b: float, m: float, z) -> complex:
    """Gamma((a+z)/m) / Gamma((b+z)/m)."""
    return complex(np.exp(loggamma((a + complex(z)) / m) - loggamma((b + complex(z)) / m)))


def gamma_quotient_mellin(a: float, b: float, m: float, z) -> complex:
    """Numerical M[v](2z) for the Gamma-quotient kernel."""
    _gq_check(a, b, m)
    ap, bp = a / m, b / m
    z = complex(z)
    c = m * math.exp(-gammaln(bp - ap))
    # M[v](2z) = int_0^1 v1(x) x^(z-1) dx; substitute y = x^m
    e = bp - ap - 1

    def h(y):
        if y <= 0 or y >= 1:
            return 0j
        return c / m * y ** ((a + z) / m - 1) * (1 - y) ** e

    if e < 0:
        # algebraic endpoint singularity at y = 1: use the weighted rule
        vals = []
        for take in (np.real, np.imag):
            vals.append(integrate.quad(lambda y: float(take(c / m * y ** ((a + z) / m - 1))), 0, 1,
                                       weight="alg", wvar=(0, e), epsabs=0, epsrel=1e-12, limit=400)[0])
        return complex(*vals)
    return _checked(*_integrate_complex(h, 0.0, 1.0), "Gamma-quotient Mellin transform")


# --------------------------------------------------------------------------
# Vanishing moments

@dataclass(frozen=True)
class VanishingMomentReport:
    vanishes: bool
    moments: tuple
    relative: tuple
    tol: float
    a: float
    k_range: tuple

    def __bool__(self):
        return self.vanishes


def weighted_moment(u, a: float, k: int) -> complex:
    """int_0^inf u(t) e^(-t) t^(a k) dt, computed on the log scale t = e^x."""
    e = a * k + 1.0
    x_lo = -60.0 / e
    x_hi = math.log(2 * e + 80.0)

    def h(x):
        t = math.exp(x)
        return complex(np.asarray(u(np.asarray(t))).ravel()[0]) * math.exp(e * x - t)

    val, err, ok = _integrate_complex(h, x_lo, x_hi)
    return _checked(val, err, ok, "weighted moment")


def vanishing_moment_test(u, a: float, k0: int, K: int, tol: float = 1e-8) -> VanishingMomentReport:
    """Finite surrogate: every |int u e^-t t^(ak) dt| <= tol for k0 <= k <= K.

    A True result cannot prove u = 0 a.e.; it only fails to refute it.
    """
    if not 0 < a <= 2:
        raise ParameterError("a must lie in (0, 2]")
    if k0 > K or k0 < 0:
        raise ParameterError("need 0 <= k0 <= K")
    moms, rel = [], []
    for k in range(int(k0), int(K) + 1):
        mk = weighted_moment(u, a, k)
        moms.append(mk)
        rel.append(abs(mk) / math.exp(gammaln(a * k + 1)))
    ok = all(abs(mk) <= tol for mk in moms)
    return VanishingMomentReport(ok, tuple(moms), tuple(rel), tol, a, (int(k0), int(K)))


# --------------------------------------------------------------------------
# Period scan

@dataclass(frozen=True)
class PeriodScanReport:
    shifts: frozenset
    residuals: dict
    n_range: tuple
    grid: tuple
    tol: float

    @property
    def shape(self) -> str:
        n_total = self.n_range[1] - self.n_range[0] + 1
        if not self.shifts:
            return "empty"
        if len(self.shifts) == 1:
            return "singleton"
        if len(self.shifts) == n_total:
            return "full"
        return "irregular"


def period_scan_report(f1, f2, p: SpaceParams, n_range=(-5, 5), grid=None,
                       tol: float = 1e-8, method: str = "auto") -> PeriodScanReport:
    """Shifts n with sup_grid |Omega(f1, z) - Omega(f2, z+n)| / |Omega(f2, z+n)| <= tol."""
    lo, hi = int(n_range[0]), int(n_range[1])
    if lo > hi:
        raise ParameterError("empty n_range")
    grid = tuple(complex(z) for z in (np.linspace(5, 15, 11) if grid is None else grid))
    om1, om2 = OmegaFunction(f1, p, method), OmegaFunction(f2, p, method)
    residuals, shifts = {}, set()
    for n in range(lo, hi + 1):
        worst = 0.0
        for z in grid:
            v2 = om2(z + n)
            worst = max(worst, abs(om1(z) - v2) / max(abs(v2), 1e-300))
        residuals[n] = worst
        if worst <= tol:
            shifts.add(n)
    return PeriodScanReport(frozenset(shifts), residuals, (lo, hi), grid, tol)


def period_scan(f1, f2, p: SpaceParams, n_range=(-5, 5), grid=None, tol: float = 1e-8,
                method: str = "auto") -> frozenset:
    """Integer shifts n in n_range with Omega(f1, z) = Omega(f2, z+n) on the grid."""
    return period_scan_report(f1, f2, p, n_range, grid, tol, method).shifts
