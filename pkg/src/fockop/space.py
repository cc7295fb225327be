"""Space parameters, multi-indices, moments and the monomial basis.

The weighted measure on C^d is

    dmu(z) = c * |z|^(2s) * exp(-alpha |z|^(2m)) dv(z),

normalised to total mass one.  All Gamma quotients are evaluated through
``gammaln`` so that degrees in the hundreds do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError, RangeError

# exp() overflows just above this
_LOG_MAX = 709.0


@dataclass(frozen=True)
class SpaceParams:
    """The tuple (d, m, alpha, s) describing F^2_{m,alpha,s}(C^d)."""

    d: int
    m: float
    alpha: float = 1.0
    s: float = 0.0

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise ParameterError(f"d must be a positive integer, got {self.d!r}")
        if not self.m >= 1:
            raise ParameterError(f"m must be >= 1, got {self.m!r}")
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be > 0, got {self.alpha!r}")
        if not self.s >= 0:
            raise ParameterError(f"s must be >= 0, got {self.s!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "s", float(self.s))

    @property
    def ml_beta(self) -> float:
        """First Mittag-Leffler parameter of the kernel, 1/m."""
        return 1.0 / self.m

    @property
    def ml_gamma(self) -> float:
        """Second Mittag-Leffler parameter of the kernel, (1+s)/m."""
        return (1.0 + self.s) / self.m

    def as_dict(self) -> dict:
        return {"d": self.d, "m": self.m, "alpha": self.alpha, "s": self.s}


class MultiIndex(tuple):
    """Multi-index nu in N^d, stored as an immutable tuple of ints."""

    def __new__(cls, entries):
        if isinstance(entries, (int, np.integer)):
            entries = (entries,)
        vals = tuple(int(v) for v in entries)
        if any(v < 0 for v in vals):
            raise ParameterError(f"multi-index entries must be >= 0, got {vals}")
        return super().__new__(cls, vals)

    @property
    def total_degree(self) -> int:
        return sum(self)

    def factorial(self) -> float:
        return math.prod(math.factorial(v) for v in self)

    def log_factorial(self) -> float:
        return float(sum(gammaln(v + 1.0) for v in self))

    def __add__(self, other):
        return MultiIndex(a + b for a, b in zip(self, other, strict=True))


def as_multi_index(nu, d: int) -> MultiIndex:
    mi = nu if isinstance(nu, MultiIndex) else MultiIndex(nu)
    if len(mi) != d:
        raise ParameterError(f"multi-index {tuple(mi)} has length {len(mi)}, expected d={d}")
    return mi


def log_normalization_constant(p: SpaceParams) -> float:
    a = (p.d + p.s) / p.m
    return (math.log(p.m) + a * math.log(p.alpha) - p.d * math.log(math.pi)
            + gammaln(p.d) - gammaln(a))


def normalization_constant(p: SpaceParams) -> float:
    """c_{m,alpha,s} making dmu a probability measure."""
    return math.exp(log_normalization_constant(p))


def kernel_constant(p: SpaceParams) -> float:
    """C_s = Gamma((d+s)/m) / Gamma(d)."""
    return math.exp(gammaln((p.d + p.s) / p.m) - gammaln(p.d))


def log_moment_degree(p: SpaceParams, k, log_nu_factorial=0.0):
    """log S(nu) for |nu| = k (array-friendly); ``log_nu_factorial`` is log nu!."""
    k = np.asarray(k, dtype=float)
    a0 = (p.d + p.s) / p.m
    return (gammaln(p.d) - gammaln(a0) + log_nu_factorial
            + gammaln((p.d + p.s + k) / p.m) - gammaln(p.d + k)
            - k / p.m * math.log(p.alpha))


def log_moment(p: SpaceParams, nu) -> float:
    nu = as_multi_index(nu, p.d)
    return float(log_moment_degree(p, nu.total_degree, nu.log_factorial()))


def moment(p: SpaceParams, nu) -> float:
    """Squared norm S(nu) = ||z^nu||^2 in L^2(dmu).

    Raises RangeError when S(nu) is not representable as a double.
    """
    nu = as_multi_index(nu, p.d)
    lm = log_moment(p, nu)
    if abs(lm) > _LOG_MAX:
        raise RangeError(f"moment overflows at total degree {nu.total_degree} (log S = {lm:.1f})")
    return math.exp(lm)


def orthonormal_coefficient(p: SpaceParams, nu) -> float:
    """S(nu)^(-1/2), so that e_nu = S(nu)^(-1/2) z^nu is orthonormal."""
    nu = as_multi_index(nu, p.d)
    lm = log_moment(p, nu)
    if abs(lm) > 2 * _LOG_MAX:
        raise RangeError(f"basis coefficient overflows at total degree {nu.total_degree}")
    return math.exp(-0.5 * lm)


def _indices_of_degree(d: int, k: int):
    # lexicographically descending in the first entry: (k,0) before (0,k)
    out = []
    for combo in combinations_with_replacement(range(d), k):
        nu = [0] * d
        for j in combo:
            nu[j] += 1
        out.append(MultiIndex(nu))
    return sorted(out, reverse=True)


@lru_cache(maxsize=64)
def _graded_basis(d: int, D: int) -> tuple:
    basis = []
    for k in range(D + 1):
        basis.extend(_indices_of_degree(d, k))
    return tuple(basis)


def graded_basis(p: SpaceParams | int, D: int) -> list[MultiIndex]:
    """All multi-indices of total degree <= D, ordered by degree then lexicographically.

    Within a degree the order is descending in the leading entries, which
    for d=2 gives (1,0) before (0,1).
    """
    d = p if isinstance(p, int) else p.d
    if D < 0:
        raise ParameterError(f"truncation degree must be >= 0, got {D}")
    return list(_graded_basis(d, int(D)))


def degree_blocks(basis) -> dict[int, list[int]]:
    """Map total degree -> positions of the basis elements of that degree."""
    blocks: dict[int, list[int]] = {}
    for i, nu in enumerate(basis):
        blocks.setdefault(nu.total_degree, []).append(i)
    return blocks
