"""Truncated Toeplitz matrices and the residuals built from them.

Matrices act on the graded monomial basis {e_nu : |nu| <= D}; the entry
M[nu, kappa] = <g e_kappa, e_nu> is read off the angular Fourier mode
q = nu - kappa of g, so one FFT pass over the product rule gives every entry.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .mellin import omega
from .quadrature import (DEFAULT_N_R, DEFAULT_N_THETA, angular_fourier, build_product_rule,
                         check_tail, gauss_power_exp, integrate)
from .space import SpaceParams, graded_basis, log_moment
from .special import kernel_array
from .symbols import RADIAL, Symbol, as_symbol, counterexample_symbol, exp_radial


class TruncationWarning(UserWarning):
    """Residual computed for a symbol whose degree shift is unbounded."""


@dataclass(frozen=True)
class QuadSizes:
    n_r: int = DEFAULT_N_R
    n_theta: int = DEFAULT_N_THETA
    n_y: int | None = None

    def as_dict(self) -> dict:
        return {"n_r": self.n_r, "n_theta": self.n_theta, "n_y": self.n_y}


@dataclass(frozen=True)
class TruncatedOperator:
    """Matrix of T_g on span{e_nu : |nu| <= D}; rows nu, columns kappa."""

    degree: int
    basis: tuple
    matrix: np.ndarray = field(repr=False)
    params: SpaceParams
    label: str
    method: str = "quadrature"

    @property
    def degrees(self) -> np.ndarray:
        return np.array([sum(nu) for nu in self.basis])

    def interior(self, max_degree: int) -> np.ndarray:
        return np.flatnonzero(self.degrees <= max_degree)

    def block(self, max_degree: int) -> np.ndarray:
        idx = self.interior(max_degree)
        return self.matrix[np.ix_(idx, idx)]

    def offblock_norm(self) -> float:
        deg = self.degrees
        mask = deg[:, None] != deg[None, :]
        return float(np.linalg.norm(self.matrix[mask]))

    def hermitian_defect(self) -> float:
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T))

    def entry(self, nu, kappa) -> complex:
        b = list(self.basis)
        return complex(self.matrix[b.index(tuple(nu)), b.index(tuple(kappa))])


@dataclass(frozen=True)
class ResidualReport:
    """Residual norms of a matrix expression on the interior block.

    ``residual`` is the spectral norm of the expression divided by
    ||A||_2 ||B||_2 on the block; for commutators A and B are first shifted
    by their trace means, so scalar parts (which commute with everything)
    do not dilute the value.  ``frobenius_residual`` and
    ``max_entry_residual`` divide by ``scale`` = ||T_f||_F ||T_g||_F instead;
    that ratio shrinks like the inverse square root of the block size.
    ``blocks`` maps each row degree |nu| to the raw Frobenius norm of those rows.
    """

    residual: float
    frobenius_residual: float
    max_entry_residual: float
    frobenius_raw: float
    max_entry_raw: float
    scale: float
    degree: int
    interior_degree: int
    quad: dict
    blocks: dict
    label: str = ""
    exact: bool = False
    caveat: str | None = None

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "residual": self.residual,
            "frobenius_residual": self.frobenius_residual,
            "max_entry_residual": self.max_entry_residual,
            "frobenius_raw": self.frobenius_raw,
            "max_entry_raw": self.max_entry_raw,
            "scale": self.scale,
            "degree": self.degree,
            "interior_degree": self.interior_degree,
            "quad": dict(self.quad),
            "blocks": {str(k): v for k, v in sorted(self.blocks.items())},
            "exact": self.exact,
            "caveat": self.caveat,
        }


def _quad(n_r, n_theta, n_y) -> QuadSizes:
    if int(n_r) < 1 or int(n_theta) < 1 or (n_y is not None and int(n_y) < 1):
        raise ParameterError("quadrature sizes must be positive integers")
    return QuadSizes(int(n_r), int(n_theta), None if n_y is None else int(n_y))


def _check_degree(D):
    if int(D) != D or D < 0:
        raise ParameterError(f"truncation degree must be a non-negative integer, got {D!r}")
    return int(D)


# --------------------------------------------------------------------------
# Builders

def _log_radial_factors(rule, basis, p: SpaceParams) -> np.ndarray:
    """log of sqrt(W_u W_y) prod_j (u y_j)^(nu_j/2) / sqrt(S(nu)), shape (N, n_u, n_y)."""
    logu = np.log(rule.u)
    logy = np.log(rule.y)  # (n_y, d)
    base = 0.5 * (np.log(rule.weight_u)[:, None] + np.log(rule.weight_y)[None, :])
    out = np.empty((len(basis), len(rule.u), len(rule.y)))
    for i, nu in enumerate(basis):
        nu_a = np.asarray(nu, dtype=float)
        out[i] = (base + 0.5 * sum(nu) * logu[:, None] + 0.5 * (logy @ nu_a)[None, :]
                  - 0.5 * log_moment(p, nu))
    return out


def _assemble(F: np.ndarray, phi: np.ndarray, basis, P: int, d: int) -> np.ndarray:
    N = len(basis)
    nus = np.array(basis, dtype=int).reshape(N, d)
    M = np.empty((N, N), dtype=complex)
    for a in range(N):
        q = nus[a][None, :] - nus  # (N, d) modes nu - kappa
        if d == 1:
            sel = F[:, :, q[:, 0] + P]  # (n_u, n_y, N)
        else:
            sel = F[:, :, q[:, 0] + P, q[:, 1] + P]
        M[a] = np.einsum("ik,ikn,nik->n", phi[a], sel, phi, optimize=True)
    return M


def build_matrix(g, p: SpaceParams, D: int, n_r: int = DEFAULT_N_R, n_theta: int = DEFAULT_N_THETA,
                 n_y: int | None = None) -> TruncatedOperator:
    """Matrix <g e_kappa, e_nu> by product quadrature (d <= 2).

    For d >= 3 only radial symbols are accepted and the diagonal builder is used.
    """
    D = _check_degree(D)
    g = as_symbol(g, p.d)
    q = _quad(n_r, n_theta, n_y)
    if p.d > 2:
        if g.radiality == RADIAL:
            return diagonal_radial(g, p, D)
        raise ParameterError("general symbols need d <= 2")
    basis = tuple(graded_basis(p, D))
    P = D  # modes |q_j| <= D cover every nu - kappa
    if q.n_theta < 2 * P + 2:
        raise ParameterError(f"n_theta={q.n_theta} too small for degree {D}; need >= {2 * P + 2}")
    body, lam = g.split_exponential(p.m)
    rule = build_product_rule(p, q.n_r, q.n_theta, q.n_y, lam=lam, max_power=D)
    F = angular_fourier(rule, body, max_mode=P)
    phi = np.exp(_log_radial_factors(rule, basis, p))
    # top-degree diagonal entry, node by node
    check_tail(np.einsum("ik,ik->i", phi[-1] ** 2, np.abs(F[(slice(None), slice(None)) + (P,) * p.d])),
               f"matrix of {g.label}")
    M = _assemble(F, phi, basis, P, p.d)
    return TruncatedOperator(D, basis, M, p, g.label, "quadrature")


def diagonal_radial(f, p: SpaceParams, D: int, method: str = "auto") -> TruncatedOperator:
    """Diagonal operator diag(Omega(f, |nu|)) for a radial symbol (every d)."""
    D = _check_degree(D)
    f = as_symbol(f, p.d)
    if f.radiality != RADIAL:
        raise ParameterError(f"{f.label!r} is not radial")
    basis = tuple(graded_basis(p, D))
    vals = {k: omega(f, float(k), p, method=method) for k in range(D + 1)}
    diag = np.array([vals[sum(nu)] for nu in basis], dtype=complex)
    return TruncatedOperator(D, basis, np.diag(diag), p, f.label, "diagonal")


def _operator(f: Symbol, p, D, q: QuadSizes) -> TruncatedOperator:
    if f.radiality == RADIAL:
        return diagonal_radial(f, p, D)
    return build_matrix(f, p, D, q.n_r, q.n_theta, q.n_y)


def kernel_bandwidth(p: SpaceParams, z, n_r: int = DEFAULT_N_R, rel_tol: float = 1e-15) -> int:
    """Highest angular mode of x -> K(z, x) that matters against the radial rule."""
    from .special import MLParams, _log_coefficients

    rz = float(np.linalg.norm(z)) * p.alpha ** (1.0 / p.m)
    if rz == 0.0:
        return 0
    u, w = gauss_power_exp(p.d + p.s, p.m, p.alpha, n_r)
    J = 64
    while True:
        logc = _log_coefficients(MLParams.for_kernel(p), J)
        la = np.log(w)[:, None] + logc[None, :] + np.arange(J)[None, :] * np.log(rz * np.sqrt(u))[:, None]
        best = la.max(axis=0)
        keep = np.nonzero(best > la.max() + math.log(rel_tol))[0]
        if keep[-1] < J - 1 or J >= 4096:
            return int(keep[-1])
        J *= 2


def project_pointwise(u, z, p: SpaceParams, n_r: int = DEFAULT_N_R, n_theta: int | None = None,
                      n_y: int | None = None) -> complex:
    """(P u)(z) = int K(z, x) u(x) dmu(x) by product quadrature.

    With ``n_theta`` None the angular grid is sized from the kernel's
    angular bandwidth at |z| (at least the default, rounded up to a power of 2).
    """
    u = as_symbol(u, p.d)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (p.d,):
        raise ParameterError(f"point must have {p.d} coordinates")
    if n_theta is None:
        need = kernel_bandwidth(p, z, n_r) + (u.deg_window or 0) + 4
        n_theta = max(DEFAULT_N_THETA, 1 << int(math.ceil(math.log2(2 * need + 2))))
    body, lam = u.split_exponential(p.m)
    q = _quad(n_r, n_theta, n_y)

    def integrand(x):
        return body(x) * kernel_array(p, z, x)

    return integrate(p, _Split(integrand, lam, p.m), q.n_r, q.n_theta, q.n_y)


class _Split:
    """Callable with an explicit exponential factor, understood by the integrator."""

    def __init__(self, body, lam, m):
        self.body, self.lam, self.m = body, complex(lam), m

    def split_exponential(self, m):
        return (self.body, self.lam) if self.m == m else (self.body, 0j)


# --------------------------------------------------------------------------
# Residuals

def _spectral(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def _centered(M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    return M - (np.trace(M) / n) * np.eye(n) if n else M


def _report(R: np.ndarray, A: np.ndarray, B: np.ndarray, op: TruncatedOperator, interior: int,
            q: QuadSizes, label: str, caveat=None, commutator: bool = False) -> ResidualReport:
    """A, B: the two factors restricted to the block (for the normalisations)."""
    idx = op.interior(interior)
    deg = op.degrees[idx]
    blocks = {int(k): float(np.linalg.norm(R[deg == k])) for k in np.unique(deg)}
    fro = float(np.linalg.norm(R))
    mx = float(np.max(np.abs(R))) if R.size else 0.0
    scale = float(np.linalg.norm(A) * np.linalg.norm(B))
    if commutator:
        A, B = _centered(A), _centered(B)
    spec_scale = _spectral(A) * _spectral(B)
    rel = _spectral(R) / spec_scale if spec_scale > 0 else 0.0
    norm = scale if scale > 0 else 1.0
    return ResidualReport(rel, fro / norm, mx / norm, fro, mx, scale, op.degree, interior,
                          q.as_dict(), blocks, label, False, caveat)


def _zero_report(p: SpaceParams, D: int, q: QuadSizes, label: str) -> ResidualReport:
    blocks = {k: 0.0 for k in range(D + 1)}
    return ResidualReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, D, D, q.as_dict(), blocks, label, True, None)


def _window(*symbols) -> tuple[int, str | None]:
    w, caveat = 0, None
    for s in symbols:
        if s.deg_window is None:
            caveat = (f"{s.label!r} has unbounded degree shift; interior block not protected "
                      f"from truncation effects")
            warnings.warn(caveat, TruncationWarning, stacklevel=3)
        else:
            w = max(w, s.deg_window)
    return w, caveat


def _interior(D: int, w: int) -> int:
    if w > D:
        raise ParameterError(f"degree window {w} exceeds truncation degree {D}; raise D")
    return D - w


def commutator_residual(f, g, p: SpaceParams, D: int, n_r: int = DEFAULT_N_R,
                        n_theta: int = DEFAULT_N_THETA, n_y: int | None = None) -> ResidualReport:
    """T_f T_g - T_g T_f on the interior block |nu|, |kappa| <= D - window."""
    D = _check_degree(D)
    f, g = as_symbol(f, p.d), as_symbol(g, p.d)
    q = _quad(n_r, n_theta, n_y)
    label = f"[T_{{{f.label}}}, T_{{{g.label}}}]"
    if f.constant_value is not None or g.constant_value is not None:
        return _zero_report(p, D, q, label)
    w, caveat = _window(f, g)
    Tf, Tg = _operator(f, p, D, q), build_matrix(g, p, D, q.n_r, q.n_theta, q.n_y)
    return _commutator_from(Tf, Tg, w, q, label, caveat)


def _commutator_from(Tf, Tg, w, q, label, caveat=None) -> ResidualReport:
    interior = _interior(Tf.degree, w)
    C = Tf.matrix @ Tg.matrix - Tg.matrix @ Tf.matrix
    idx = Tf.interior(interior)
    R = C[np.ix_(idx, idx)]
    return _report(R, Tf.block(interior), Tg.block(interior), Tf, interior, q, label, caveat,
                   commutator=True)


def offblock_mass(g, p: SpaceParams, D: int, n_r: int = DEFAULT_N_R, n_theta: int = DEFAULT_N_THETA,
                  n_y: int | None = None, relative: bool = True) -> float:
    """Frobenius norm of the entries of T_g joining different total degrees.

    With ``relative`` the value is divided by ||T_g||_F over the whole truncation.
    """
    T = build_matrix(g, p, D, n_r, n_theta, n_y)
    off = T.offblock_norm()
    if not relative:
        return off
    tot = float(np.linalg.norm(T.matrix))
    return off / tot if tot > 0 else 0.0


def zero_product_residual(f, g, p: SpaceParams, D: int, n_r: int = DEFAULT_N_R,
                          n_theta: int = DEFAULT_N_THETA, n_y: int | None = None):
    """(report for T_f T_g, report for T_g T_f) on the interior block."""
    D = _check_degree(D)
    f, g = as_symbol(f, p.d), as_symbol(g, p.d)
    q = _quad(n_r, n_theta, n_y)
    lab1, lab2 = f"T_{{{f.label}}} T_{{{g.label}}}", f"T_{{{g.label}}} T_{{{f.label}}}"
    if f.constant_value == 0 or g.constant_value == 0:
        return _zero_report(p, D, q, lab1), _zero_report(p, D, q, lab2)
    w, caveat = _window(f, g)
    interior = _interior(D, w)
    Tf, Tg = _operator(f, p, D, q), build_matrix(g, p, D, q.n_r, q.n_theta, q.n_y)
    idx = Tf.interior(interior)
    Fb, Gb = Tf.block(interior), Tg.block(interior)
    A = (Tf.matrix @ Tg.matrix)[np.ix_(idx, idx)]
    B = (Tg.matrix @ Tf.matrix)[np.ix_(idx, idx)]
    return (_report(A, Fb, Gb, Tf, interior, q, lab1, caveat),
            _report(B, Fb, Gb, Tf, interior, q, lab2, caveat))


def equation_residual(f1, f2, g, k, n, p: SpaceParams, D_l: int, n_r: int = DEFAULT_N_R,
                      n_theta: int = DEFAULT_N_THETA, n_y: int | None = None) -> ResidualReport:
    """max over |l| <= D_l of |[Omega(f1,|k|+|l|) - Omega(f2,|n|+|l|)] G(g z^k conj(z)^n)(l)|.

    ``blocks`` maps |l| to the largest term of that degree.  When the phase
    charges of g exclude |n| - |k| every transform vanishes and the report is
    an exact zero.
    """
    from .symbols import g_transform, monomial

    D_l = _check_degree(D_l)
    f1, f2, g = as_symbol(f1, p.d), as_symbol(f2, p.d), as_symbol(g, p.d)
    k = tuple(int(v) for v in np.atleast_1d(k))
    n = tuple(int(v) for v in np.atleast_1d(n))
    if len(k) != p.d or len(n) != p.d:
        raise ParameterError("k and n must be multi-indices of length d")
    q = _quad(n_r, n_theta, n_y)
    label = f"E({f1.label}, {f2.label}; {g.label})"
    c1, c2 = f1.constant_value, f2.constant_value
    if c1 is not None and c2 is not None and c1 == c2:
        return _zero_report(p, D_l, q, label)
    sk, sn = sum(k), sum(n)
    ch = g.phase_charges
    if ch is not None and (sn - sk) not in ch:
        # g z^k conj(z)^n has no rotation-invariant part, so every G term vanishes
        return _zero_report(p, D_l, q, label)
    mono = monomial(k, n, p.d)
    gbody = g.split_exponential(p.m)

    def g1_body(x):
        return gbody[0](x) * mono.body(x)

    g1 = Symbol(f"({g.label})*z^{k}conj(z)^{n}", p.d, g1_body, exp_lam=gbody[1],
                exp_m=p.m if gbody[1] else None)
    blocks, worst = {}, 0.0
    for l in graded_basis(p, D_l):
        sl = sum(l)
        bracket = omega(f1, sk + sl, p) - omega(f2, sn + sl, p)
        term = abs(bracket * g_transform(g1, np.array(l, dtype=float), p, q.n_r, q.n_theta, q.n_y))
        blocks[sl] = max(blocks.get(sl, 0.0), term)
        worst = max(worst, term)
    return ResidualReport(worst, worst, worst, worst, worst, 1.0, D_l, D_l, q.as_dict(), blocks, label)


@dataclass(frozen=True)
class CounterexampleReport:
    commutator: ResidualReport
    offblock: float
    N: int
    lam: complex
    c: complex

    def as_dict(self) -> dict:
        return {"N": self.N, "lambda": [self.lam.real, self.lam.imag], "c": [self.c.real, self.c.imag],
                "offblock_mass": self.offblock, "commutator": self.commutator.as_dict()}


def counterexample_check(N: int, p: SpaceParams, D: int, n_r: int = DEFAULT_N_R,
                         n_theta: int = DEFAULT_N_THETA, n_y: int | None = None) -> CounterexampleReport:
    """Commutator of T_f, f = exp(lam |z|^(2m)) with lam = alpha(1 - e^(-2 pi i m/N)),
    and T_g, g = z1^N/|z|^N.

    T_f is diag(c^(d+s+|kappa|)) with c = e^(2 pi i/N), so T_g (which only
    couples degrees differing by multiples of N) commutes with it although g
    is not rotation invariant.
    """
    if int(N) != N or N <= 6 * p.m:
        raise ParameterError(f"need an integer N > 6m = {6 * p.m:g}, got {N}")
    N = int(N)
    D = _check_degree(D)
    q = _quad(n_r, n_theta, n_y)
    lam = p.alpha * (1 - complex(np.exp(-2j * np.pi * p.m / N)))
    f = exp_radial(lam, p.m, p.d)
    g = counterexample_symbol(N, p.d)
    Tf = diagonal_radial(f, p, D)
    Tg = build_matrix(g, p, D, q.n_r, q.n_theta, q.n_y)
    rep = _commutator_from(Tf, Tg, 0, q, f"[T_{{{f.label}}}, T_{{{g.label}}}]")
    off = Tg.offblock_norm() / max(float(np.linalg.norm(Tg.matrix)), 1e-300)
    c = complex((1 - lam / p.alpha) ** (-1.0 / p.m))
    return CounterexampleReport(rep, off, N, lam, c)


__all__ = [
    "QuadSizes", "TruncatedOperator", "ResidualReport", "CounterexampleReport", "TruncationWarning",
    "build_matrix", "diagonal_radial", "project_pointwise", "commutator_residual", "offblock_mass",
    "zero_product_residual", "equation_residual", "counterexample_check",
]
