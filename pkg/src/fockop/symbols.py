"""Toeplitz symbols: expression trees, catalog items and transforms.

A symbol is a function C^d -> C evaluated on arrays of points whose trailing
axis has length d.  It may carry an explicit factor exp(lam |z|^(2m)) kept
outside the expression body; integrators fold its real part into the Gauss
weight instead of sampling a growing or fast-decaying exponential.

Grammar of parsed symbols (whitespace insignificant)::

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' signed_int)?
    atom   := number | 'i' | 'r' | 'z' digit+ | 'conj(' expr ')' | 'exp(' expr ')'
            | 'abs(' expr ')' | 're(' expr ')' | 'im(' expr ')' | '(' expr ')'

``r`` is the Euclidean norm |z|.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ParameterError, SymbolParseError
from .space import SpaceParams

RADIAL = "radial"
ROTATION_INVARIANT = "rotation_invariant"
GENERAL = "general"

POLYNOMIAL = "polynomial"
SUB_DOUBLE_EXPONENTIAL = "sub_double_exponential"
DC_BOUNDED = "d_c_bounded"
UNKNOWN = "unknown"

_SEED = 20240611


# --------------------------------------------------------------------------
# Expression tree

class Node:
    def evaluate(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def charges(self):
        """Set of phase charges under z -> e^{i t} z, or None if unbounded."""
        raise NotImplementedError

    def only_norm(self) -> bool:
        """True when the node depends on z only through r = |z|."""
        raise NotImplementedError

    def has_exp(self) -> bool:
        return any(c.has_exp() for c in self.children())

    def children(self):
        return ()

    def max_var(self) -> int:
        return max((c.max_var() for c in self.children()), default=0)


@dataclass(frozen=True)
class Const(Node):
    value: complex

    def evaluate(self, z):
        return np.full(z.shape[:-1], self.value, dtype=complex)

    def charges(self):
        return frozenset({0})

    def only_norm(self):
        return True

    def __str__(self):
        v = self.value
        if v.imag == 0:
            return f"{v.real:g}"
        if v.real == 0:
            return f"({v.imag:g}*i)"
        return f"({v.real:g}+{v.imag:g}*i)"


@dataclass(frozen=True)
class Var(Node):
    index: int  # 1-based

    def evaluate(self, z):
        return z[..., self.index - 1].astype(complex)

    def charges(self):
        return frozenset({1})

    def only_norm(self):
        return False

    def max_var(self):
        return self.index

    def __str__(self):
        return f"z{self.index}"


@dataclass(frozen=True)
class Norm(Node):
    def evaluate(self, z):
        return np.sqrt(np.sum(np.abs(z) ** 2, axis=-1)).astype(complex)

    def charges(self):
        return frozenset({0})

    def only_norm(self):
        return True

    def __str__(self):
        return "r"


def _neg(ch):
    return None if ch is None else frozenset(-c for c in ch)


def _sum(a, b):
    if a is None or b is None:
        return None
    return frozenset(x + y for x in a for y in b)


@dataclass(frozen=True)
class Unary(Node):
    op: str  # conj, exp, abs, re, im, neg
    arg: Node

    def children(self):
        return (self.arg,)

    def evaluate(self, z):
        v = self.arg.evaluate(z)
        if self.op == "conj":
            return np.conj(v)
        if self.op == "exp":
            return np.exp(v)
        if self.op == "abs":
            return np.abs(v).astype(complex)
        if self.op == "re":
            return v.real.astype(complex)
        if self.op == "im":
            return v.imag.astype(complex)
        if self.op == "neg":
            return -v
        raise AssertionError(self.op)

    def charges(self):
        ch = self.arg.charges()
        if self.op == "conj":
            return _neg(ch)
        if self.op == "neg":
            return ch
        if self.op == "abs":
            return frozenset({0})
        if self.op in ("re", "im"):
            return None if ch is None else ch | _neg(ch)
        if self.op == "exp":
            return ch if ch == frozenset({0}) else None
        raise AssertionError(self.op)

    def only_norm(self):
        return self.arg.only_norm()

    def has_exp(self):
        return self.op == "exp" or self.arg.has_exp()

    def __str__(self):
        if self.op == "neg":
            return f"(-{self.arg})"
        return f"{self.op}({self.arg})"


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node

    def children(self):
        return (self.left, self.right)

    def evaluate(self, z):
        a = self.left.evaluate(z)
        b = self.right.evaluate(z)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b

    def charges(self):
        a, b = self.left.charges(), self.right.charges()
        if self.op in "+-":
            return None if a is None or b is None else a | b
        if self.op == "*":
            return _sum(a, b)
        if b is not None and len(b) == 1:
            return _sum(a, _neg(b))
        return None

    def only_norm(self):
        return self.left.only_norm() and self.right.only_norm()

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Power(Node):
    base: Node
    exponent: int

    def children(self):
        return (self.base,)

    def evaluate(self, z):
        v = self.base.evaluate(z)
        if self.exponent >= 0:
            return v ** self.exponent
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / v ** (-self.exponent)

    def charges(self):
        ch = self.base.charges()
        if ch is None:
            return None
        if self.exponent == 0:
            return frozenset({0})
        if self.exponent < 0:
            return frozenset({c * self.exponent for c in ch}) if len(ch) == 1 else None
        out = frozenset({0})
        for _ in range(self.exponent):
            out = _sum(out, ch)
        return out

    def only_norm(self):
        return self.base.only_norm()

    def __str__(self):
        return f"{self.base}^{self.exponent}"


# --------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<func>conj|exp|abs|re|im)\s*\(
  | (?P<var>z\d+)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise SymbolParseError(f"unexpected character {text[pos]!r}", pos)
        kind = mt.lastgroup
        if kind != "ws":
            val = mt.group(kind)
            if kind == "name" and val not in ("i", "r"):
                raise SymbolParseError(f"unknown name {val!r}", pos)
            out.append((kind, val, pos))
        pos = mt.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, d: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.d = d

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, val):
        kind, v, pos = self.take()
        if v != val:
            raise SymbolParseError(f"expected {val!r}, found {v or 'end of input'!r}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise SymbolParseError(f"unexpected {v!r}", pos)
        return node

    def expr(self) -> Node:
        if self.peek()[1] == "-":
            self.take()
            node = Unary("neg", self.term())
        else:
            node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] in ("+", "-"):
                sign = -1 if self.take()[1] == "-" else 1
            kind, v, pos = self.take()
            if kind != "num" or not v.isdigit():
                raise SymbolParseError("exponent must be an integer", pos)
            node = Power(node, sign * int(v))
        return node

    def atom(self) -> Node:
        kind, v, pos = self.take()
        if kind == "num":
            return Const(complex(float(v)))
        if kind == "name":
            return Const(1j) if v == "i" else Norm()
        if kind == "var":
            k = int(v[1:])
            if k < 1 or k > self.d:
                raise SymbolParseError(f"variable {v} out of range for d={self.d}", pos)
            return Var(k)
        if kind == "func":
            name = v.split("(")[0].strip()
            inner = self.expr()
            self.expect(")")
            return Unary(name, inner)
        if v == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise SymbolParseError(f"unexpected {v or 'end of input'!r}", pos)


# --------------------------------------------------------------------------
# Symbol

def _as_points(z, d: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0 or z.shape[-1] != d:
        if d == 1:
            z = z[..., None]
        else:
            raise ParameterError(f"points must have trailing axis of length {d}")
    return z


@dataclass(frozen=True)
class Symbol:
    """Evaluable symbol with radiality/growth metadata.

    The value is ``body(z) * exp(exp_lam * |z|^(2 * exp_m))``; ``exp_m`` is
    None when there is no separate exponential factor.  ``closed_form`` tags
    catalog items whose radial eigenvalues are known exactly:
    ("const", c), ("power", p) for r^p, ("exp", lam, m) for exp(lam r^(2m)),
    ("indicator", R) for chi_{r<=R}.
    """

    label: str
    d: int
    body: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    radiality: str = GENERAL
    growth: str = UNKNOWN
    growth_c: float | None = None
    deg_window: int | None = None
    exp_lam: complex = 0j
    exp_m: float | None = None
    closed_form: tuple | None = None
    expr: Node | None = field(default=None, repr=False, compare=False)
    is_real: bool = False
    charge_hint: frozenset | None = None

    @property
    def phase_charges(self) -> frozenset | None:
        """Charges q with g(e^{it} z) = sum_q g_q(z) e^{iqt}; None if unknown."""
        if self.radiality != GENERAL:
            return frozenset({0})
        if self.expr is not None:
            return self.expr.charges()
        return self.charge_hint

    def evaluate(self, z) -> np.ndarray:
        pts = _as_points(z, self.d)
        val = np.asarray(self.body(pts), dtype=complex)
        if self.exp_m is not None and self.exp_lam != 0:
            n2 = np.sum(np.abs(pts) ** 2, axis=-1)
            val = val * np.exp(self.exp_lam * n2 ** self.exp_m)
        return np.broadcast_to(val, pts.shape[:-1])

    __call__ = evaluate

    def split_exponential(self, m: float):
        """(body, lam) such that the symbol equals body * exp(lam |z|^(2m))."""
        if self.exp_m is None or self.exp_lam == 0:
            return self.body, 0j
        if math.isclose(self.exp_m, m, rel_tol=0, abs_tol=1e-14):
            return self.body, complex(self.exp_lam)
        return self.evaluate, 0j

    @property
    def is_radial(self) -> bool:
        return self.radiality == RADIAL

    @property
    def constant_value(self) -> complex | None:
        if self.closed_form and self.closed_form[0] == "const":
            return complex(self.closed_form[1])
        return None

    def profile(self, r) -> np.ndarray:
        """Radial profile f(r) = g(r, 0, ..., 0); only meaningful for radial symbols."""
        r = np.asarray(r, dtype=float)
        pts = np.zeros(r.shape + (self.d,), dtype=complex)
        pts[..., 0] = r
        return self.evaluate(pts)

    def profile_split(self, m: float):
        """(body profile, lam) with profile(r) = body(r) exp(lam r^(2m))."""
        body, lam = self.split_exponential(m)

        def prof(r):
            r = np.asarray(r, dtype=float)
            pts = np.zeros(r.shape + (self.d,), dtype=complex)
            pts[..., 0] = r
            return np.broadcast_to(np.asarray(body(pts), dtype=complex), r.shape)

        return prof, lam

    def conjugate(self) -> "Symbol":
        cf = self.closed_form
        if cf is not None:
            if cf[0] == "const":
                cf = ("const", complex(cf[1]).conjugate())
            elif cf[0] == "exp":
                cf = ("exp", complex(cf[1]).conjugate(), cf[2])
        body = self.body
        hint = None if self.charge_hint is None else frozenset(-q for q in self.charge_hint)
        return replace(self, label=f"conj({self.label})", body=lambda z: np.conj(body(z)),
                       exp_lam=complex(self.exp_lam).conjugate(), closed_form=cf, charge_hint=hint,
                       expr=Unary("conj", self.expr) if self.expr is not None else None)

    def __str__(self):
        return self.label


def _check_invariance(body, d: int, unitary: bool) -> bool:
    rng = np.random.default_rng(_SEED)
    pts = rng.normal(size=(24, d)) + 1j * rng.normal(size=(24, d))
    pts *= rng.uniform(0.2, 2.0, size=(24, 1)) / np.linalg.norm(pts, axis=1, keepdims=True)
    base = np.asarray(body(pts), dtype=complex)
    if not np.all(np.isfinite(base)):
        return False
    for _ in range(4):
        if unitary:
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            q, rr = np.linalg.qr(a)
            q = q * (np.diag(rr) / np.abs(np.diag(rr)))
            moved = pts @ q.T
        else:
            moved = pts * np.exp(1j * rng.uniform(0, 2 * np.pi))
        val = np.asarray(body(moved), dtype=complex)
        if not np.allclose(val, base, rtol=1e-12, atol=1e-12):
            return False
    return True


def _infer_radiality(node: Node, body, d: int) -> str:
    if node.only_norm():
        return RADIAL if _check_invariance(body, d, unitary=True) else GENERAL
    ch = node.charges()
    if ch == frozenset({0}) and _check_invariance(body, d, unitary=False):
        if d == 1 or _check_invariance(body, d, unitary=True):
            return RADIAL
        return ROTATION_INVARIANT
    return GENERAL


def _is_real_valued(body, d: int) -> bool:
    rng = np.random.default_rng(_SEED + 1)
    pts = rng.normal(size=(16, d)) + 1j * rng.normal(size=(16, d))
    val = np.asarray(body(pts), dtype=complex)
    return bool(np.all(np.isfinite(val)) and np.allclose(val.imag, 0.0, atol=1e-13 * (1 + np.abs(val))))


def symbol_from_node(node: Node, d: int, label: str | None = None) -> Symbol:
    if node.max_var() > d:
        raise ParameterError(f"symbol uses z{node.max_var()} but d={d}")
    body = node.evaluate
    ch = node.charges()
    window = None if ch is None else max(abs(c) for c in ch)
    closed = None
    if isinstance(node, Const):
        closed = ("const", node.value)
    elif isinstance(node, Power) and isinstance(node.base, Norm):
        closed = ("power", float(node.exponent))
    elif isinstance(node, Norm):
        closed = ("power", 1.0)
    return Symbol(
        label=label or str(node), d=d, body=body,
        radiality=_infer_radiality(node, body, d),
        growth=UNKNOWN if node.has_exp() else POLYNOMIAL,
        deg_window=window, closed_form=closed, expr=node,
        is_real=_is_real_valued(body, d),
    )


def parse_symbol(text: str, d: int) -> Symbol:
    """Parse a symbol expression over z1..zd, conj(.), r = |z|."""
    if int(d) != d or d < 1:
        raise ParameterError(f"d must be a positive integer, got {d!r}")
    node = _Parser(text, int(d)).parse()
    return symbol_from_node(node, int(d), label=text.strip())


# --------------------------------------------------------------------------
# Catalog

def constant(c: complex, d: int) -> Symbol:
    c = complex(c)
    return Symbol(f"{c.real:g}" if c.imag == 0 else str(c), d,
                  lambda z: np.full(z.shape[:-1], c, dtype=complex),
                  RADIAL, POLYNOMIAL, None, 0, closed_form=("const", c), expr=Const(c),
                  is_real=c.imag == 0)


def radial_power(p: float, d: int) -> Symbol:
    """r^p."""
    p = float(p)
    return Symbol(f"r^{p:g}", d, lambda z: np.sum(np.abs(z) ** 2, axis=-1) ** (p / 2) + 0j,
                  RADIAL, POLYNOMIAL, None, 0, closed_form=("power", p), is_real=True)


def exp_radial(lam: complex, m: float, d: int) -> Symbol:
    """exp(lam r^(2m)); in D_c for c = Re lam (polynomially bounded if Re lam <= 0)."""
    lam = complex(lam)
    growth = POLYNOMIAL if lam.real <= 0 else DC_BOUNDED
    return Symbol(f"exp({lam:g} r^{2 * m:g})", d, lambda z: np.ones(z.shape[:-1], dtype=complex),
                  RADIAL, growth, max(lam.real, 0.0), 0, exp_lam=lam, exp_m=float(m),
                  closed_form=("exp", lam, float(m)), is_real=lam.imag == 0)


def monomial(k, n, d: int) -> Symbol:
    """z^k conj(z)^n for multi-indices k, n."""
    k = tuple(int(v) for v in np.atleast_1d(k))
    n = tuple(int(v) for v in np.atleast_1d(n))
    if len(k) != d or len(n) != d:
        raise ParameterError("monomial exponents must have length d")
    ka, na = np.array(k), np.array(n)

    def body(z):
        return np.prod(z ** ka * np.conj(z) ** na, axis=-1)

    shift = sum(k) - sum(n)
    if shift != 0:
        rad = GENERAL
    elif d == 1:
        rad = RADIAL
    else:
        rad = ROTATION_INVARIANT
    return Symbol(f"z^{k} conj(z)^{n}", d, body, rad, POLYNOMIAL, None, abs(shift),
                  is_real=k == n, charge_hint=frozenset({shift}))


def counterexample_symbol(N: int, d: int) -> Symbol:
    """z1^N / |z|^N (set to 0 at the origin); invariant under z -> e^{2 pi i/N} z only."""
    N = int(N)

    def body(z):
        r = np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (z[..., 0] / r) ** N
        return np.where(r > 0, out, 0.0)

    return Symbol(f"z1^{N}/|z|^{N}", d, body, GENERAL, POLYNOMIAL, None, N,
                  charge_hint=frozenset({N}))


def indicator_radius(R: float, d: int) -> Symbol:
    """chi_{r <= R}."""
    R = float(R)
    return Symbol(f"chi(r<={R:g})", d,
                  lambda z: (np.sum(np.abs(z) ** 2, axis=-1) <= R * R).astype(complex),
                  RADIAL, POLYNOMIAL, None, 0, closed_form=("indicator", R), is_real=True)


def as_symbol(g, d: int) -> Symbol:
    """Coerce a string, number or Symbol to a Symbol on C^d."""
    if isinstance(g, Symbol):
        if g.d != d:
            raise ParameterError(f"symbol {g.label!r} lives on C^{g.d}, expected C^{d}")
        return g
    if isinstance(g, str):
        return parse_symbol(g, d)
    if isinstance(g, (int, float, complex, np.number)):
        return constant(g, d)
    raise ParameterError(f"cannot interpret {g!r} as a symbol")


# --------------------------------------------------------------------------
# Growth scale and norms

@dataclass(frozen=True)
class ScaleIndex:
    """Index j of the growth scale c_j = 1/2 - 1/(2j+2)."""

    j: int

    def __post_init__(self):
        if int(self.j) != self.j or self.j < 0:
            raise ParameterError("scale index must be a non-negative integer")

    @property
    def c(self) -> float:
        return 0.5 - 1.0 / (2 * self.j + 2)

    def next(self) -> "ScaleIndex":
        return ScaleIndex(self.j + 1)

    @staticmethod
    def recurrence(c: float) -> float:
        """c_{j+1} expressed through c_j."""
        return 1.0 / (4.0 * (1.0 - c))


def dc_norm_estimate(g: Symbol, c: float, p: SpaceParams, r_max: float = 12.0,
                     n_radii: int = 400, n_angles: int = 16, refine: bool = True) -> float:
    """Sampled lower bound of sup |g(z)| exp(-c |z|^(2m)).

    Samples a polar grid (for d = 2 also a grid of splittings |z_1|^2 : |z_2|^2),
    then maximises along the best ray.
    """
    if c < 0:
        raise ParameterError("c must be >= 0")
    g = as_symbol(g, p.d)
    radii = np.linspace(0.0, r_max, n_radii)
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    if p.d == 1:
        dirs = np.exp(1j * theta)[:, None]
    else:
        x = np.linspace(0.0, 1.0, 9)
        dirs = []
        for xi in x:
            for t1 in theta:
                for t2 in theta[: max(1, n_angles // 4)]:
                    vec = np.zeros(p.d, dtype=complex)
                    vec[0] = math.sqrt(xi) * np.exp(1j * t1)
                    vec[1] = math.sqrt(1 - xi) * np.exp(1j * t2)
                    dirs.append(vec)
        dirs = np.array(dirs)

    def profile(direction, r):
        val = np.abs(g.evaluate(np.asarray(r)[..., None] * direction))
        return val * np.exp(-c * np.asarray(r, dtype=float) ** (2 * p.m))

    best, best_dir, best_r = -1.0, None, 0.0
    for direction in dirs:
        vals = profile(direction, radii)
        vals = np.where(np.isfinite(vals), vals, -1.0)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_dir, best_r = float(vals[i]), direction, radii[i]
    if refine and best_dir is not None:
        h = radii[1] - radii[0]
        lo, hi = max(0.0, best_r - h), min(r_max, best_r + h)
        if hi > lo:
            res = minimize_scalar(lambda r: -float(profile(best_dir, r)), bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-12})
            if res.success and -res.fun > best:
                best = float(-res.fun)
    return best


# --------------------------------------------------------------------------
# Transforms

def v_transform(g: Symbol, t: float, p: SpaceParams) -> Symbol:
    """V_t g(x) = g(t x) exp(alpha (1 - t^(2m)) |x|^(2m))."""
    if not t > 0:
        raise ParameterError("t must be > 0")
    g = as_symbol(g, p.d)
    shift = p.alpha * (1.0 - t ** (2 * p.m))
    if g.exp_m is None or g.exp_lam == 0 or math.isclose(g.exp_m, p.m, abs_tol=1e-14):
        inner = g.body
        lam = complex(g.exp_lam) * t ** (2 * p.m) + shift if g.exp_m is not None else complex(shift)
    else:
        inner = g.evaluate
        lam = complex(shift)
    return Symbol(
        label=f"V_{t:g}[{g.label}]", d=g.d, body=lambda x: inner(t * x),
        radiality=g.radiality, growth=g.growth, growth_c=g.growth_c,
        deg_window=g.deg_window, exp_lam=lam, exp_m=p.m, closed_form=None,
        is_real=g.is_real and lam.imag == 0, charge_hint=g.phase_charges,
    )


def radialize(g: Symbol, r: float, n_theta: int = 256) -> complex:
    """(1/pi) int_0^{2pi} g(r e^{i theta}) d theta on C^1 (trapezoid rule).

    The 1/pi prefactor means the radialization of 1 is 2.
    """
    g = as_symbol(g, 1) if not isinstance(g, Symbol) else g
    if g.d != 1:
        raise ParameterError("radialization is defined here for d = 1 only")
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    vals = g.evaluate((r * np.exp(1j * theta))[:, None])
    return complex(2.0 * np.mean(vals))


def g_transform(g: Symbol, z, p: SpaceParams, n_r: int = 60, n_theta: int = 64,
                n_y: int | None = None) -> complex:
    """int g(x) |x_1|^(2 z_1) ... |x_d|^(2 z_d) dmu(x) for z in the closed right half-plane.

    Uses the product rule for d <= 2; for d >= 3 only radial symbols are
    supported (the simplex integral is then a Dirichlet integral).
    """
    from scipy.special import loggamma

    from .quadrature import gauss_power_exp, integrate, log_trapezoid_power_exp
    from .space import log_normalization_constant

    g = as_symbol(g, p.d)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (p.d,):
        raise ParameterError(f"z must have {p.d} components")
    if np.any(z.real < 0):
        raise ParameterError("z must lie in the closed right half-plane")
    if p.d <= 2:
        return integrate(p, g, n_r, n_theta, n_y, exps=tuple(z))
    if not g.is_radial:
        raise ParameterError("for d >= 3 the transform is available for radial symbols only")
    prof, lam = g.profile_split(p.m)
    sz = complex(np.sum(z))
    a = p.d + p.s + sz.real
    if sz.imag or (lam.imag and not float(p.m).is_integer()):
        u, w = log_trapezoid_power_exp(a, p.m, p.alpha - lam.real, lam_imag=lam.imag, b=sz.imag)
    else:
        u, w = gauss_power_exp(a, p.m, p.alpha - lam.real, n_r)
    vals = prof(np.sqrt(u)) * np.exp(1j * lam.imag * u ** p.m) * u ** (1j * sz.imag)
    radial = complex(np.dot(w, vals))
    log_simplex = complex(np.sum(loggamma(z + 1)) - loggamma(sz + p.d))
    log_const = log_normalization_constant(p) - p.d * math.log(2) + p.d * math.log(2 * math.pi)
    return complex(radial * np.exp(log_simplex + log_const))


def g_transform_mellin_d1(g: Symbol, z: complex, p: SpaceParams, n_theta: int = 256) -> complex:
    """Same transform on C^1 computed as a Mellin transform of the radialization.

    int_0^inf (m alpha^((1+s)/m) / Gamma((1+s)/m)) g_rad(r) r^(2s+2) e^(-alpha r^(2m)) r^(2z-1) dr.
    """
    from scipy.special import gammaln

    from .mellin import mellin_transform

    if p.d != 1:
        raise ParameterError("the radialization route requires d = 1")
    g = as_symbol(g, 1)
    pref = p.m * math.exp((1 + p.s) / p.m * math.log(p.alpha) - gammaln((1 + p.s) / p.m))

    def h(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.array([radialize(g, float(x), n_theta) for x in r])
        return pref * out * r ** (2 * p.s + 2) * np.exp(-p.alpha * r ** (2 * p.m))

    return mellin_transform(h, 2 * complex(z), decay=p.m)
