"""Mittag-Leffler functions and the reproducing kernel.

E_{beta,gamma}(z) = sum_k z^k / Gamma(beta k + gamma), and its derivatives,
are evaluated either by the power series (in extended precision via mpmath,
with the working precision raised until cancellation is absorbed) or, for
large arguments, by the asymptotic expansion

    E_{beta,gamma}(z) ~ (1/beta) z^((1-gamma)/beta) exp(z^(1/beta))
                        - sum_{k>=1} z^(-k) / Gamma(gamma - beta k),

differentiated termwise.  The exponential term is kept for
|arg z| < min(pi, pi beta) and dropped beyond.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import gammaln

from .errors import NoConvergenceError, ParameterError, RangeError
from .space import SpaceParams, kernel_constant

SERIES = "series"
ASYMPTOTIC = "asymptotic"

DEFAULT_TOL = 1e-12
DEFAULT_TERM_BUDGET = 500
DEFAULT_SECTOR_MARGIN = 0.1
# beyond this many terms the series is abandoned even outside the sector
_HARD_TERM_CAP = 50_000
_MAX_ASYMPTOTIC_TERMS = 60


@dataclass(frozen=True)
class MLParams:
    """Parameters of E^{(derivative_order)}_{beta,gamma}."""

    beta: float
    gamma: float
    derivative_order: int = 0

    def __post_init__(self):
        if not (self.beta > 0 and self.gamma > 0):
            raise ParameterError("Mittag-Leffler parameters need beta > 0 and gamma > 0")
        if int(self.derivative_order) != self.derivative_order or self.derivative_order < 0:
            raise ParameterError("derivative_order must be a non-negative integer")
        object.__setattr__(self, "derivative_order", int(self.derivative_order))

    @classmethod
    def for_kernel(cls, p: SpaceParams) -> "MLParams":
        return cls(1.0 / p.m, (1.0 + p.s) / p.m, p.d - 1)


@dataclass(frozen=True)
class MLValue:
    value: complex
    regime: str
    n_terms: int


@dataclass(frozen=True)
class KernelValue:
    value: complex
    regime: str

    def __complex__(self):
        return complex(self.value)


def _log_coefficients(params: MLParams, n: int) -> np.ndarray:
    """log of c_j with E^{(l)}(z) = sum_j c_j z^j."""
    j = np.arange(n, dtype=float)
    l = params.derivative_order
    return (gammaln(j + l + 1.0) - gammaln(j + 1.0)
            - gammaln(params.beta * (j + l) + params.gamma))


def series_term_count(params: MLParams, r: float, tol: float = DEFAULT_TOL,
                      extra_digits: float = 0.0) -> tuple[int, float]:
    """Number of series terms needed at |z| = r, and log of the largest term.

    Terms are summed until, past the peak, they fall below ``tol`` times the
    largest term (times 10^-extra_digits).
    """
    if r == 0.0:
        return 1, float(_log_coefficients(params, 1)[0])
    logr = math.log(r)
    cutoff = math.log(tol) - extra_digits * math.log(10.0) - 2.0
    n = 64
    while True:
        lt = _log_coefficients(params, n) + np.arange(n) * logr
        peak = int(np.argmax(lt))
        lmax = float(lt[peak])
        below = np.nonzero(lt[peak:] < lmax + cutoff)[0]
        if below.size:
            return peak + int(below[0]) + 1, lmax
        if n >= _HARD_TERM_CAP:
            return _HARD_TERM_CAP + 1, lmax
        n *= 4


def in_sector(z: complex, beta: float, margin: float = DEFAULT_SECTOR_MARGIN) -> bool:
    return z != 0 and abs(cmath.phase(z)) <= math.pi * beta / 2 - margin


def _series_mp(params: MLParams, z: complex, n_terms: int, dps: int):
    l = params.derivative_order
    with mp.workdps(dps):
        zz = mp.mpc(z)
        acc = mp.mpc(0)
        zp = mp.mpc(1)
        for j in range(n_terms):
            coef = mp.rf(j + 1, l) * mp.rgamma(params.beta * (j + l) + params.gamma)
            acc += coef * zp
            zp *= zz
        return acc


def ml_series_mp(params: MLParams, z: complex, tol: float = DEFAULT_TOL):
    """Power series in extended precision; returns (mpmath value, n_terms).

    The precision is raised until the digits lost to cancellation (largest
    term over result) are covered.
    """
    r = abs(z)
    extra = 0.0
    for _ in range(6):
        n_terms, lmax = series_term_count(params, r, tol, extra)
        if n_terms > _HARD_TERM_CAP:
            raise NoConvergenceError(f"Mittag-Leffler series needs more than {_HARD_TERM_CAP} terms at |z|={r:g}")
        digits = -math.log10(tol) + extra
        dps = int(digits) + 20
        val = _series_mp(params, z, n_terms, dps)
        if val == 0:
            lost = float("inf")
        else:
            lost = (lmax - float(mp.log(abs(val)))) / math.log(10.0)
        if lost <= extra + 1.0:
            return val, n_terms
        extra = min(lost + 2.0, 4000.0)
    raise NoConvergenceError(f"Mittag-Leffler series did not stabilise at z={z!r}")


def _derivative_terms(beta: float, gamma: float, order: int):
    """Terms (coef, power) of d^order/dz^order [ (1/beta) z^a exp(z^p) ] / exp(z^p)."""
    p = 1.0 / beta
    terms = {(1.0 - gamma) / beta: 1.0 / beta}
    for _ in range(order):
        new: dict[float, float] = {}
        for a, c in terms.items():
            if a != 0.0:
                new[a - 1.0] = new.get(a - 1.0, 0.0) + c * a
            new[a + p - 1.0] = new.get(a + p - 1.0, 0.0) + c * p
        terms = new
    return sorted(terms.items(), key=lambda t: -t[0])


def ml_leading_mp(params: MLParams, z: complex, dps: int = 30):
    """Exact l-th derivative of the exponential leading term (1/beta) z^a e^{z^p}."""
    with mp.workdps(dps):
        zz = mp.mpc(z)
        lz = mp.log(zz)
        ez = mp.exp(mp.exp(lz / params.beta))
        acc = mp.mpc(0)
        for a, c in _derivative_terms(params.beta, params.gamma, params.derivative_order):
            acc += c * mp.exp(a * lz)
        return acc * ez


def ml_asymptotic_mp(params: MLParams, z: complex, tol: float = DEFAULT_TOL, dps: int = 30):
    """Asymptotic regime value; returns (mpmath value, n_terms, error estimate)."""
    l = params.derivative_order
    with mp.workdps(dps):
        zz = mp.mpc(z)
        # the exponential term belongs to the expansion only for |arg z| < min(pi, pi beta)
        if abs(cmath.phase(complex(z))) < min(math.pi, math.pi * params.beta):
            lead = ml_leading_mp(params, z, dps)
        else:
            lead = mp.mpc(0)
        corr = mp.mpc(0)
        last = mp.inf
        n_used = 0
        err = mp.mpf(0)
        for k in range(1, _MAX_ASYMPTOTIC_TERMS + 1):
            # d^l z^{-k} = (-k)(-k-1)...(-k-l+1) z^{-k-l}
            fall = mp.rf(-k - l + 1, l) if l else mp.mpf(1)
            term = fall * mp.rgamma(params.gamma - params.beta * k) * zz ** (-k - l)
            mag = abs(term)
            if mag == 0:
                n_used = k
                continue
            if mag > last:
                break
            corr -= term
            last = mag
            n_used = k
            err = mag
            if mag <= tol * abs(lead + corr) * 1e-3:
                break
        return lead + corr, n_used, err


def _to_complex(v) -> complex:
    try:
        out = complex(v)
    except OverflowError as exc:
        raise RangeError(f"value {mp.nstr(v, 5)} exceeds double range") from exc
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise RangeError(f"value {mp.nstr(v, 5)} exceeds double range")
    return out


def ml_evaluate(params: MLParams, z: complex, *, regime: str = "auto",
                tol: float = DEFAULT_TOL, term_budget: int = DEFAULT_TERM_BUDGET,
                sector_margin: float = DEFAULT_SECTOR_MARGIN, as_mp: bool = False) -> MLValue:
    """Evaluate E^{(l)}_{beta,gamma}(z) and report the regime used.

    ``regime`` may force ``"series"`` or ``"asymptotic"``; ``"auto"`` uses the
    series unless it needs more than ``term_budget`` terms and z lies either
    in the exponential sector |arg z| <= pi beta/2 or beyond |arg z| = pi beta,
    where only the algebraic tail remains.  With ``as_mp`` the value is left as an mpmath number
    (useful when it overflows a double).
    """
    z = complex(z)
    if regime not in ("auto", SERIES, ASYMPTOTIC):
        raise ParameterError(f"unknown regime {regime!r}")
    if regime == "auto":
        n_terms, _ = series_term_count(params, abs(z), tol)
        algebraic_only = z != 0 and abs(cmath.phase(z)) >= min(math.pi, math.pi * params.beta) + sector_margin
        if n_terms > term_budget and (in_sector(z, params.beta, sector_margin) or algebraic_only):
            regime = ASYMPTOTIC
        else:
            regime = SERIES
    if regime == ASYMPTOTIC:
        if z == 0:
            raise ParameterError("asymptotic regime undefined at z = 0")
        val, n_used, err = ml_asymptotic_mp(params, z, tol)
        if err > tol * abs(val) and not in_sector(z, params.beta, 0.0):
            raise NoConvergenceError(f"asymptotic expansion inaccurate at z={z!r}")
    else:
        val, n_used = ml_series_mp(params, z, tol)
    return MLValue(val if as_mp else _to_complex(val), regime, n_used)


def ml_eval(params: MLParams, z: complex, **kwargs) -> complex:
    """Value of E^{(l)}_{beta,gamma}(z); see ``ml_evaluate`` for options."""
    return ml_evaluate(params, z, **kwargs).value


def ml_series_array(params: MLParams, z, tol: float = 1e-17) -> np.ndarray:
    """Vectorised double-precision power series.

    Intended for quadrature integrands where the kernel multiplies a rapidly
    decaying weight; the absolute error is about eps * E(|z|), with no
    protection against cancellation for arguments far from the positive axis.
    """
    z = np.asarray(z, dtype=complex)
    rmax = float(np.max(np.abs(z))) if z.size else 0.0
    n_terms, _ = series_term_count(params, rmax, tol)
    if n_terms > _HARD_TERM_CAP:
        raise NoConvergenceError(f"vectorised series needs more than {_HARD_TERM_CAP} terms")
    logc = _log_coefficients(params, n_terms)
    # term_j = term_{j-1} * z * c_j / c_{j-1}; magnitudes stay at term scale
    ratios = np.exp(np.diff(logc))
    term = np.full(z.shape, math.exp(logc[0]), dtype=complex)
    acc = term.copy()
    with np.errstate(under="ignore", invalid="ignore"):
        for j in range(1, n_terms):
            term *= z * ratios[j - 1]
            acc += term
    return acc


def hermitian_pairing(xi, zeta) -> complex:
    """<xi, zeta> = sum_j xi_j conj(zeta_j)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if xi.shape != zeta.shape:
        raise ParameterError("points must have the same dimension")
    return complex(np.sum(xi * np.conj(zeta)))


def _check_point(p: SpaceParams, x):
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if x.shape != (p.d,):
        raise ParameterError(f"expected a point of C^{p.d}, got shape {x.shape}")
    return x


def kernel_value(p: SpaceParams, xi, zeta, **kwargs) -> KernelValue:
    """K(xi, zeta) = C_s E^{(d-1)}_{1/m,(1+s)/m}(alpha^{1/m} <xi, zeta>) with its regime."""
    xi = _check_point(p, xi)
    zeta = _check_point(p, zeta)
    w = p.alpha ** (1.0 / p.m) * hermitian_pairing(xi, zeta)
    res = ml_evaluate(MLParams.for_kernel(p), w, **kwargs)
    return KernelValue(kernel_constant(p) * res.value, res.regime)


def kernel_eval(p: SpaceParams, xi, zeta, **kwargs) -> complex:
    """Reproducing kernel K_{m,alpha,s}(xi, zeta)."""
    return kernel_value(p, xi, zeta, **kwargs).value


def kernel_array(p: SpaceParams, xi, points) -> np.ndarray:
    """K(xi, x) for an array of points x with trailing axis of length d (double precision)."""
    xi = _check_point(p, xi)
    points = np.asarray(points, dtype=complex)
    w = p.alpha ** (1.0 / p.m) * np.tensordot(np.conj(points), xi, axes=([-1], [0]))
    return kernel_constant(p) * ml_series_array(MLParams.for_kernel(p), w)


def kernel_series(p: SpaceParams, xi, zeta, D: int) -> complex:
    """Truncated expansion sum_{|nu| <= D} e_nu(xi) conj(e_nu(zeta))."""
    from .space import graded_basis, log_moment

    xi = _check_point(p, xi)
    zeta = _check_point(p, zeta)
    total = 0j
    for nu in graded_basis(p, D):
        mono = complex(np.prod(xi ** np.array(nu)) * np.prod(np.conj(zeta) ** np.array(nu)))
        total += mono * math.exp(-log_moment(p, nu))
    return total


def kernel_asymptotic_ratio(p: SpaceParams, t: float, **kwargs) -> float:
    """E^{(d-1)}_{1/m,(1+s)/m}(t) divided by the exact (d-1)-th derivative of m t^{m-1-s} e^{t^m}.

    The ratio tends to 1 as t grows; the deviation is the algebraic
    correction, which is exponentially small relative to the leading term.
    """
    if not t > 0 or t ** p.m < 5.0:
        raise ParameterError(f"t={t!r} too small for the asymptotic regime (need t^m >= 5)")
    params = MLParams.for_kernel(p)
    val = ml_evaluate(params, t, regime=SERIES, as_mp=True, **kwargs).value
    lead = ml_leading_mp(params, t)
    return float(mp.re(val / lead))
