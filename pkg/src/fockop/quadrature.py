"""Quadrature against the weighted measure dmu_{m,alpha,s}.

Radial integrals are mapped to u = r^2, where the weight becomes
u^(a-1) exp(-beta u^m) on (0, inf).  Gauss rules for that weight are built
from its exact moments Gamma((a+k)/m) / (m beta^((a+k)/m)) by the Chebyshev
algorithm in extended precision; nodes are refined by Newton's method and
weights come from the Christoffel function, so tiny weights keep full
relative accuracy.

On C^d (d <= 2) the measure factorises in the coordinates

    |x|^2 = u,   (|x_1|^2, ..., |x_d|^2) = u * y  with y on the unit simplex,
    x_j = sqrt(u y_j) exp(i theta_j),

as   dmu = c 2^-d  u^(d+s-1) e^(-alpha u^m) du  dy  dtheta,
so a product of a radial Gauss rule, a Gauss-Jacobi rule on the simplex
(d = 2) and equispaced angles is exact for polynomial integrands in
z, conj(z).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, roots_jacobi

from .errors import DivergenceError, NoConvergenceError, ParameterError
from .space import SpaceParams, graded_basis, log_normalization_constant

DEFAULT_N_R = 60
DEFAULT_N_THETA = 64


def max_workers() -> int | None:
    """Thread cap from FOCKOP_THREADS (None means library default)."""
    raw = os.environ.get("FOCKOP_THREADS")
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError(f"FOCKOP_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ParameterError(f"FOCKOP_THREADS must be a positive integer, got {raw!r}")
    return n


def _map_ordered(func, items):
    """map() over items, threaded when allowed, results in input order."""
    workers = max_workers()
    if workers == 1 or len(items) < 2:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items))


# --------------------------------------------------------------------------
# Gauss rules for u^(a-1) exp(-u^m)

def _recurrence(a: float, m: float, n: int, dps: int):
    """Three-term recurrence coefficients (alpha_k, beta_k) via the Chebyshev algorithm."""
    with mp.workdps(dps):
        a_ = mp.mpf(a)
        m_ = mp.mpf(m)
        mom = [mp.gamma((a_ + k) / m_) / m_ for k in range(2 * n)]
        alph = [mp.mpf(0)] * n
        bet = [mp.mpf(0)] * n
        alph[0] = mom[1] / mom[0]
        bet[0] = mom[0]
        sig_prev = [mp.mpf(0)] * (2 * n)
        sig = list(mom)
        for k in range(1, n):
            new = [mp.mpf(0)] * (2 * n)
            for l in range(k, 2 * n - k):
                new[l] = sig[l + 1] - alph[k - 1] * sig[l] - bet[k - 1] * sig_prev[l]
            alph[k] = new[k + 1] / new[k] - sig[k] / sig[k - 1]
            bet[k] = new[k] / sig[k - 1]
            if not bet[k] > 0:
                raise NoConvergenceError(f"recurrence lost positivity at k={k} (a={a}, m={m}, n={n})")
            sig_prev, sig = sig, new
        return alph, bet


def _orthonormal_sums(x: np.ndarray, alph: np.ndarray, sq: np.ndarray, n: int):
    """p_n(x), p_n'(x) (up to a common scale) and log sum_{k<n} p_k(x)^2.

    Forward recurrence for the orthonormal polynomials, rescaled whenever the
    values grow large so that tiny Christoffel weights keep relative accuracy.
    """
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / sq[0])
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    ssum = p * p
    logscale = np.zeros_like(x)
    for k in range(n):
        b_k = sq[k] if k > 0 else 0.0
        nxt = sq[k + 1] if k + 1 < n else 1.0
        pn = ((x - alph[k]) * p - b_k * p_prev) / nxt
        dpn = (p + (x - alph[k]) * dp - b_k * dp_prev) / nxt
        p_prev, p, dp_prev, dp = p, pn, dp, dpn
        if k + 1 < n:
            ssum = ssum + p * p
        big = np.maximum(np.abs(p), np.abs(p_prev)) > 1e100
        if np.any(big):
            f = np.where(big, 1e-100, 1.0)
            p, p_prev, dp, dp_prev = p * f, p_prev * f, dp * f, dp_prev * f
            ssum = ssum * f * f
            logscale = logscale - np.log(f)
    return p, dp, np.log(ssum) + 2 * logscale


@lru_cache(maxsize=512)
def _unit_rule(a: float, m: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    # the moment-based recurrence is ill-conditioned and needs extended precision;
    # evaluating the recurrence at the nodes is stable in double precision
    alph_mp, bet_mp = _recurrence(a, m, n, 2 * n + 40)
    alph = np.array([float(v) for v in alph_mp])
    bet = np.array([float(v) for v in bet_mp])
    sq = np.sqrt(bet)
    x = eigh_tridiagonal(alph, sq[1:], eigvals_only=True)
    for _ in range(3):
        p, dp, _ = _orthonormal_sums(x, alph, sq, n)
        step = p / dp
        x = x - step
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.abs(x)):
            break
    # Christoffel weight 1 / sum_{k<n} p_k(x)^2 at the refined nodes
    _, _, logsum = _orthonormal_sums(x, alph, sq, n)
    return x, np.exp(-logsum)


def _key(x: float) -> float:
    return float(np.round(x, 13))


def gauss_power_exp(a: float, m: float, beta: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule for the weight u^(a-1) exp(-beta u^m) on (0, inf).

    Exact for polynomials in u of degree <= 2n-1.  Requires a > 0, m > 0,
    beta > 0.
    """
    if not (a > 0 and m > 0 and beta > 0):
        raise ParameterError(f"weight u^(a-1) exp(-beta u^m) needs a, m, beta > 0 (got {a}, {m}, {beta})")
    if int(n) != n or n < 1:
        raise ParameterError(f"rule size must be a positive integer, got {n!r}")
    v, w = _unit_rule(_key(a), _key(m), int(n))
    # u = beta^(-1/m) v
    scale = beta ** (-1.0 / m)
    return v * scale, w * beta ** (-a / m)


def power_exp_moment(a: float, m: float, beta: float, k: float = 0.0) -> float:
    """Closed form of int_0^inf u^(a+k-1) exp(-beta u^m) du."""
    e = (a + k) / m
    return math.exp(gammaln(e) - e * math.log(beta)) / m


# --------------------------------------------------------------------------
# Radial and angular rules

@dataclass(frozen=True)
class RadialRule:
    """Nodes r_i and weights w_i for the weight r^(2d+2s-1) exp(-alpha r^(2m)) dr."""

    nodes: np.ndarray
    weights: np.ndarray
    params: SpaceParams

    def moment(self, k: float) -> float:
        """Closed form of int r^(2k) r^(2d+2s-1) exp(-alpha r^(2m)) dr."""
        p = self.params
        e = (p.d + p.s + k) / p.m
        return math.exp(gammaln(e) - e * math.log(p.alpha)) / (2 * p.m)

    @property
    def target(self) -> str:
        p = self.params
        return f"r^{2 * p.d + 2 * p.s - 1:g} exp(-{p.alpha:g} r^{2 * p.m:g}) on (0, inf)"


def build_radial_rule(p: SpaceParams, n: int = DEFAULT_N_R) -> RadialRule:
    """Radial rule exact for every r^(2k), k <= 2n-1 (polynomials in r^2)."""
    u, w = gauss_power_exp(p.d + p.s, p.m, p.alpha, n)
    return RadialRule(np.sqrt(u), 0.5 * w, p)


def integrate_radial(rule: RadialRule, f) -> complex | float:
    """sum_i w_i f(r_i)."""
    vals = np.asarray(f(rule.nodes))
    if vals.shape == ():
        vals = np.full(rule.nodes.shape, vals)
    if not np.all(np.isfinite(vals)):
        bad = rule.nodes[~np.isfinite(vals)][0]
        raise DivergenceError(f"radial integrand not finite at r={bad:g}")
    check_tail(rule.weights * vals, "radial quadrature")
    out = np.dot(rule.weights, vals)
    return complex(out) if np.iscomplexobj(out) else float(out)


@dataclass(frozen=True)
class AngularRule:
    """Equispaced angles; exact for e^{ik theta} with |k| < n_angles."""

    n_angles: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)


def build_angular_rule(n_angles: int = DEFAULT_N_THETA) -> AngularRule:
    if n_angles < 1:
        raise ParameterError("n_angles must be >= 1")
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    return AngularRule(n_angles, theta, np.full(n_angles, 2 * np.pi / n_angles))


# --------------------------------------------------------------------------
# Product rules on C^d, d in {1, 2}

def _split_integrand(g, m: float):
    """Return (callable body, complex lam) with g = body * exp(lam |z|^(2m))."""
    if hasattr(g, "split_exponential"):
        return g.split_exponential(m)
    if callable(g):
        return g, 0j
    const = complex(g)
    return (lambda z: np.full(z.shape[:-1], const)), 0j


@dataclass(frozen=True)
class ProductRule:
    """Tensor rule u x simplex x torus for int F(x) prod |x_j|^(2 e_j) e^{lam|x|^{2m}} dmu.

    ``weight_u`` already contains the constant c 2^-d (2 pi / n_theta)^d and,
    for d = 2, ``weight_y`` the simplex Jacobi weights.  The imaginary parts
    of the exponents ``exps`` and of ``lam`` are left in the integrand.
    """

    params: SpaceParams
    u: np.ndarray
    weight_u: np.ndarray
    y: np.ndarray  # shape (n_y, d)
    weight_y: np.ndarray
    n_theta: int
    exps: tuple
    lam: complex

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_theta) / self.n_theta

    def points(self, i: int) -> np.ndarray:
        """Quadrature points at radial node i, shape (n_y, n_theta[, n_theta], d)."""
        d = self.params.d
        rho = np.sqrt(self.u[i] * self.y)  # (n_y, d)
        ph = np.exp(1j * self.theta)
        if d == 1:
            return (rho[:, None, 0] * ph[None, :])[..., None]
        z1 = rho[:, 0, None, None] * ph[None, :, None] * np.ones(self.n_theta)[None, None, :]
        z2 = rho[:, 1, None, None] * ph[None, None, :] * np.ones(self.n_theta)[None, :, None]
        return np.stack([z1, z2], axis=-1)

    def residual_factor(self, i: int) -> np.ndarray:
        """Oscillatory leftovers exp(i Im lam u^m) prod (u y_j)^(i Im e_j), shape (n_y,)."""
        p = self.params
        fac = np.exp(1j * self.lam.imag * self.u[i] ** p.m) * np.ones(len(self.y), dtype=complex)
        for j, e in enumerate(self.exps):
            if e.imag:
                fac = fac * np.exp(1j * e.imag * np.log(self.u[i] * self.y[:, j]))
        return fac


def build_product_rule(p: SpaceParams, n_r: int = DEFAULT_N_R, n_theta: int = DEFAULT_N_THETA,
                       n_y: int | None = None, exps=None, lam: complex = 0j,
                       max_power: float = 0.0) -> ProductRule:
    """Product rule for int F(x) prod|x_j|^(2 exps_j) exp(lam |x|^(2m)) dmu(x).

    Real parts of ``exps`` and of ``lam`` are absorbed into the Gauss weights
    (Re lam < alpha required).  With complex exponents, or an oscillating
    exp(i Im lam u^m) for non-integer m, the radial and simplex rules switch
    to log-variable trapezoid rules and ``n_r``, ``n_y`` are unused;
    ``max_power`` then bounds the extra power of u = |x|^2 in the integrand.
    """
    if p.d > 2:
        raise ParameterError("full C^d quadrature supports d <= 2; use radial formulas for d >= 3")
    if n_r < 1 or n_theta < 1:
        raise ParameterError("quadrature sizes must be positive")
    d = p.d
    exps = tuple(complex(e) for e in (exps if exps is not None else (0,) * d))
    if len(exps) != d:
        raise ParameterError(f"need {d} exponents, got {len(exps)}")
    if any(e.real <= -1 for e in exps):
        raise ParameterError("exponents must have real part > -1")
    lam = complex(lam)
    beta = p.alpha - lam.real
    if not beta > 0:
        raise DivergenceError(f"integrand grows like exp({lam.real:g}|x|^{2 * p.m:g}); not integrable")
    a = d + p.s + sum(e.real for e in exps)
    # imaginary exponents leave factors u^{ib} in the integrand, which are not
    # polynomial near 0; log-variable trapezoid rules converge exponentially there
    b = sum(e.imag for e in exps)
    oscillatory = any(e.imag != 0 for e in exps) or (lam.imag != 0 and not float(p.m).is_integer())
    if oscillatory:
        u, wu = log_trapezoid_power_exp(a, p.m, beta, extra=max_power, lam_imag=lam.imag, b=b)
    else:
        u, wu = gauss_power_exp(a, p.m, beta, n_r)
    const = math.exp(log_normalization_constant(p)) * 2.0 ** (-d) * (2 * np.pi / n_theta) ** d
    if d == 1:
        y = np.ones((1, 1))
        wy = np.ones(1)
    else:
        e1, e2 = exps[0].real, exps[1].real
        if oscillatory:
            x, wy = logistic_trapezoid_beta(e1, e2)
        else:
            n_y = n_y or max(n_r // 2, 16)
            t, wt = roots_jacobi(n_y, e2, e1)
            x = 0.5 * (1 + t)
            wy = wt * 2.0 ** (-(e1 + e2 + 1))
        y = np.stack([x, 1 - x], axis=1)
    return ProductRule(p, u, wu * const, y, wy, int(n_theta), exps, lam)


def log_trapezoid_power_exp(a: float, m: float, beta: float, digits: float = 15.0,
                            extra: float = 0.0, lam_imag: float = 0.0, b: float = 0.0):
    """Trapezoid rule in t = log u for the weight u^(a-1) exp(-beta u^m) on (0, inf).

    The transformed integrand is analytic in a strip around the real axis, so
    the rule converges geometrically for integrands analytic in log u, such as
    u^{ib} or exp(i lam_imag u^m) with non-integer m.  ``extra`` is the largest
    additional power of u carried by the integrand; the strip is narrowed so
    the weight grows at most by e^3 inside it.
    """
    if not (a > 0 and m > 0 and beta > 0):
        raise ParameterError(f"weight u^(a-1) exp(-beta u^m) needs a, m, beta > 0 (got {a}, {m}, {beta})")
    cut = digits * math.log(10) + 10
    a_hi = a + max(float(extra), 0.0)
    growth = 3.0
    width = 0.7 * math.pi / (2 * m)
    if a_hi / m * (1 - math.cos(m * width)) > growth:
        width = math.acos(1 - growth * m / a_hi) / m
    penalty = growth + (abs(b) + abs(lam_imag) * a_hi / beta) * width
    h = 2 * math.pi * width / (cut + penalty)
    t_peak = math.log(a / (m * beta)) / m
    t_lo = t_peak - cut / a
    u_hi = max(math.exp(t_peak), 1.0)
    for _ in range(4):
        u_hi = ((cut + (a_hi + 20) * math.log(max(u_hi, 1.0))) / beta) ** (1 / m)
    t = np.arange(t_lo, math.log(u_hi) + h, h)
    u = np.exp(t)
    return u, h * np.exp(a * t - beta * u ** m)


def logistic_trapezoid_beta(e1: float, e2: float, digits: float = 15.0):
    """Trapezoid rule in y = 1/(1+e^{-tau}) for the weight y^e1 (1-y)^e2 on (0, 1)."""
    if e1 <= -1 or e2 <= -1:
        raise ParameterError("simplex exponents must exceed -1")
    cut = digits * math.log(10) + 10
    h = 2 * math.pi * (0.5 * math.pi) / cut
    tau = np.arange(-cut / (e1 + 1), cut / (e2 + 1) + h, h)
    y = 0.5 * (1 + np.tanh(tau / 2))
    one_minus = 0.5 * (1 - np.tanh(tau / 2))
    return y, h * y ** (e1 + 1) * one_minus ** (e2 + 1)


TAIL_TOL = 1e-6


def check_tail(contrib, what: str = "integral", tol: float = TAIL_TOL) -> None:
    """Divergence signal: the outermost nodes must carry a negligible share.

    ``contrib`` are per-node magnitudes ordered by increasing radius.  A
    convergent integrand decays against the weight, so its last nodes hold
    a vanishing fraction of the sum; a too-fast-growing one does not.
    """
    c = np.abs(np.asarray(contrib, dtype=complex))
    total = float(np.sum(c))
    if c.size >= 8 and total > 0 and float(np.max(c[-2:])) > tol * total:
        raise DivergenceError(f"{what}: outer quadrature nodes carry {np.max(c[-2:]) / total:.1e} "
                              f"of the total; integrand grows too fast")


def _radial_chunks(rule: ProductRule, body, reducer):
    """Apply ``reducer(i, values)`` to the body evaluated at each radial node."""

    def work(i):
        vals = np.asarray(body(rule.points(i)), dtype=complex)
        if not np.all(np.isfinite(vals)):
            pts = rule.points(i)
            bad = pts[~np.isfinite(np.broadcast_to(vals, pts.shape[:-1]))][0]
            raise DivergenceError(f"integrand not finite at x={np.round(bad, 6).tolist()}")
        return reducer(i, np.broadcast_to(vals, rule.points(i).shape[:-1]))

    return _map_ordered(work, list(range(len(rule.u))))


def integrate_product(rule: ProductRule, body) -> complex:
    """Apply a product rule to ``body`` (callable on points with trailing axis d)."""
    def reduce(i, vals):
        ang = vals.reshape(vals.shape[0], -1).sum(axis=1)
        return rule.weight_u[i] * np.dot(rule.weight_y, ang * rule.residual_factor(i))

    parts = _radial_chunks(rule, body, reduce)
    check_tail(parts, "product quadrature")
    total = complex(math.fsum(v.real for v in parts), math.fsum(v.imag for v in parts))
    if not (math.isfinite(total.real) and math.isfinite(total.imag)):
        raise DivergenceError("quadrature sum is not finite")
    return total


def integrate(p: SpaceParams, g, n_r: int = DEFAULT_N_R, n_theta: int = DEFAULT_N_THETA,
              n_y: int | None = None, exps=None) -> complex:
    """int_{C^d} g(x) prod |x_j|^(2 exps_j) dmu(x) for d <= 2.

    ``g`` is a Symbol, a callable on arrays of points (trailing axis d) or a
    constant.  Symbols carrying a factor exp(lam |x|^(2m)) have Re lam folded
    into the radial weight.
    """
    body, lam = _split_integrand(g, p.m)
    rule = build_product_rule(p, n_r, n_theta, n_y, exps, lam)
    return integrate_product(rule, body)


def moment_table(p: SpaceParams, D: int, n_r: int = DEFAULT_N_R, n_theta: int = DEFAULT_N_THETA,
                 n_y: int | None = None) -> dict:
    """Quadrature values of int |z^nu|^2 dmu for every |nu| <= D (d <= 2), from one product rule.

    The integrand prod (u y_j)^nu_j does not depend on the angles, so the
    angular sum is the total angular weight times the value at any angle.
    """
    rule = build_product_rule(p, n_r, n_theta, n_y)
    basis = graded_basis(p, D)
    nus = np.array(basis, dtype=float).reshape(len(basis), p.d)
    log_uy = np.log(rule.u)[:, None, None] + np.log(rule.y)[None, :, :]  # (n_u, n_y, d)
    vals = np.exp(np.einsum("ikj,nj->nik", log_uy, nus))
    ang = rule.n_theta ** p.d
    out = np.einsum("i,k,nik->n", rule.weight_u, rule.weight_y, vals) * ang
    return {nu: float(v) for nu, v in zip(basis, out)}


def integrate_c1(p: SpaceParams, g, n_r: int = DEFAULT_N_R, n_theta: int = DEFAULT_N_THETA) -> complex:
    """int_C g dmu on C^1 by the radial x angular product rule."""
    if p.d != 1:
        raise ParameterError("integrate_c1 requires d = 1")
    return integrate(p, g, n_r, n_theta)


def integrate_c2(p: SpaceParams, g, n_r: int = DEFAULT_N_R, n_theta: int = DEFAULT_N_THETA,
                 n_y: int | None = None) -> complex:
    """int_{C^2} g dmu by the radial x simplex x torus product rule."""
    if p.d != 2:
        raise ParameterError("integrate_c2 requires d = 2")
    return integrate(p, g, n_r, n_theta, n_y)


def angular_fourier(rule: ProductRule, body, max_mode: int | None = None) -> np.ndarray:
    """Angular Fourier coefficients of the integrand at every (u, y) node.

    Returns F of shape (n_u, n_y, 2P+1[, 2P+1]) with the angular sums
    sum_theta body e^{-i q.theta} (times the oscillatory residual factor) for
    modes |q_j| <= P, where P = max_mode or n_theta // 2 - 1.  Then

        int body(x) e^{-i q.theta} dmu  ~=  sum_{i,k} weight_u[i] weight_y[k] F[i, k, q].
    """
    n = rule.n_theta
    P = n // 2 - 1 if max_mode is None else min(int(max_mode), n // 2 - 1)
    modes = np.arange(-P, P + 1) % n
    d = rule.params.d

    def reduce(i, vals):
        axes = tuple(range(1, 1 + d))
        coef = np.fft.fft2(vals, axes=axes) if d == 2 else np.fft.fft(vals, axis=1)
        if d == 1:
            coef = coef[:, modes]
        else:
            coef = coef[:, modes][:, :, modes]
        fac = rule.residual_factor(i)
        return coef * fac.reshape((-1,) + (1,) * d)

    return np.stack(_radial_chunks(rule, body, reduce))
