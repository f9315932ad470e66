"""Exact arithmetic over constructible real numbers.

A value is an immutable expression DAG over arbitrary-precision rationals,
closed under +, -, *, / and square root.  Each node carries a refinable
enclosing interval with dyadic endpoints (gmpy2 mpfr with directed
rounding).  Signs are decided exactly: the interval is refined at doubling
precision until it excludes zero, or until it fits strictly inside the
ball given by a BFMSS-style root separation bound, which certifies that
the value is exactly zero.  There is no epsilon anywhere.

Division requires a divisor certified nonzero and square root requires a
radicand certified nonnegative; both checks happen at construction time,
so every well-formed node denotes a real number.
"""

from __future__ import annotations

import itertools
import math
import os
import re
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

__all__ = [
    "ConstructibleReal",
    "Interval",
    "DivisionByZero",
    "NegativeRadicand",
    "ExprSyntaxError",
    "ExprDomainError",
    "PrecisionCapExceeded",
    "rational",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "sqrt",
    "sign",
    "to_decimal",
    "parse_expr",
    "to_expr_string",
    "set_max_bits",
    "get_max_bits",
]


class DivisionByZero(ZeroDivisionError):
    """Divisor was certified to be exactly zero."""


class NegativeRadicand(ArithmeticError):
    """Square-root argument was certified to be negative."""


class ExprSyntaxError(ValueError):
    """Malformed expression text; `position` is the offending offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExprDomainError(ValueError):
    """A literal subexpression is outside the operation's domain."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class PrecisionCapExceeded(RuntimeError):
    """Sign undecided below the configured precision cap."""


# Hard ceiling on refinement precision; beyond this the separation bound
# is unreachable in practice and we fail loudly instead of spinning.
_HARD_LIMIT_BITS = 1 << 26

_max_bits_cap: int | None = None
_env_cap = os.environ.get("FLEXIPOLY_MAX_BITS")
if _env_cap:
    try:
        _max_bits_cap = int(_env_cap)
    except ValueError:
        _max_bits_cap = None


def set_max_bits(bits: int | None) -> None:
    """Cap refinement precision; None restores uncapped (sound) behavior."""
    global _max_bits_cap
    _max_bits_cap = bits


def get_max_bits() -> int | None:
    return _max_bits_cap


_NEG_INF = float("-inf")
_sqrt_serial = itertools.count(1)

_OP_RAT = "rat"
_OP_NEG = "neg"
_OP_ADD = "add"
_OP_SUB = "sub"
_OP_MUL = "mul"
_OP_DIV = "div"
_OP_SQRT = "sqrt"


class Interval:
    """Closed dyadic interval [lower, upper] enclosing an exact value."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        if lower > upper:
            raise ValueError("interval endpoints out of order")
        self.lower = lower
        self.upper = upper

    def width(self):
        ctx = gmpy2.context(precision=64, round=gmpy2.RoundUp)
        return ctx.sub(self.upper, self.lower)

    def contains_zero(self) -> bool:
        return self.lower <= 0 <= self.upper

    def __repr__(self):
        return f"Interval({self.lower!r}, {self.upper!r})"


class ConstructibleReal:
    """One node of an expression DAG denoting an exact real number.

    Everything except the refinement cache is immutable.  The cache only
    ever narrows (new intervals are intersected with the old one), so
    concurrent readers and refiners are safe: every published interval
    encloses the exact value, and last-writer-wins keeps a valid one.
    """

    __slots__ = ("_op", "_args", "_q", "_cache", "_log2u", "_log2l",
                 "_sqrts", "_sign_cache", "_sep_cache")

    def __init__(self, op, args, q, log2u, log2l, sqrts):
        self._op = op
        self._args = args
        self._q = q
        self._cache = None
        self._log2u = log2u
        self._log2l = log2l
        self._sqrts = sqrts
        self._sign_cache = None
        self._sep_cache = None

    # -- arithmetic sugar ------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    # -- introspection ---------------------------------------------------

    def interval(self, min_bits: int = 64) -> Interval:
        """Return a current enclosure, refined to at least `min_bits`."""
        if self._cache is None or self._cache[0] < min_bits:
            _refine(self, min_bits)
        _, lo, hi = self._cache
        return Interval(lo, hi)

    def refine(self, bits: int) -> None:
        _refine(self, bits)

    def __repr__(self):
        iv = self.interval()
        mid = gmpy2.context(precision=53).add(iv.lower, iv.upper) / 2
        return f"<ConstructibleReal ~{float(mid):.6g} op={self._op}>"


def _rat_node(q: mpq) -> ConstructibleReal:
    num, den = abs(q.numerator), q.denominator
    log2u = _NEG_INF if num == 0 else (0.0 if num == 1
                                       else float(int(num).bit_length()))
    log2l = 0.0 if den == 1 else float(int(den).bit_length())
    return ConstructibleReal(_OP_RAT, (), q, log2u, log2l, frozenset())


_ZERO_Q = mpq(0)
_ONE_Q = mpq(1)


def rational(numerator, denominator=1) -> ConstructibleReal:
    """Exact rational leaf; accepts ints, Fractions and mpq."""
    if isinstance(numerator, Fraction):
        q = mpq(numerator.numerator, numerator.denominator)
        if denominator != 1:
            q = q / mpq(denominator)
        return _rat_node(q)
    return _rat_node(mpq(numerator, denominator))


def _coerce(x) -> ConstructibleReal:
    if isinstance(x, ConstructibleReal):
        return x
    if isinstance(x, (int, Fraction)) or isinstance(x, type(mpq())):
        return rational(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as ConstructibleReal")


def _is_rat(x) -> bool:
    return x._op == _OP_RAT


def _is_div(x) -> bool:
    return x._op == _OP_DIV


# Arithmetic keeps every value in the canonical form c * N / D, where c
# is one exact rational and N, D are DAGs whose rational leaves are all
# integers.  Rational content is folded eagerly and divisions are lifted
# to a single quotient per region.  Without this normal form the BFMSS
# numerator bound absorbs a denominator bound at every addition and the
# separation bound explodes multiplicatively.

_den_product_cache: dict = {}


def _shared_mul(d, e):
    """Product hash-consed by operand identity, so repeated lifts of the
    same denominators share one node (keys hold the operands alive)."""
    key = (id(d), id(e)) if id(d) <= id(e) else (id(e), id(d))
    hit = _den_product_cache.get(key)
    if hit is not None:
        return hit[0]
    node = _prim_mul(d, e)
    _den_product_cache[key] = (node, d, e)
    return node


def _prim_mul(x, y) -> ConstructibleReal:
    """Product of two primitive (integer-leaf, division-free) DAGs."""
    if _is_rat(x) and _is_rat(y):
        return _rat_node(x._q * y._q)
    for a, b in ((x, y), (y, x)):
        if _is_rat(a):
            if a._q == 0:
                return a
            if a._q == 1:
                return b
    return ConstructibleReal(_OP_MUL, (x, y), None, x._log2u + y._log2u,
                             x._log2l + y._log2l, x._sqrts | y._sqrts)


def _prim_add(x, y, subtract: bool) -> ConstructibleReal:
    if _is_rat(x) and _is_rat(y):
        return _rat_node(x._q - y._q if subtract else x._q + y._q)
    if _is_rat(y) and y._q == 0:
        return x
    if _is_rat(x) and x._q == 0 and not subtract:
        return y
    op = _OP_SUB if subtract else _OP_ADD
    log2u = max(x._log2u + y._log2l, y._log2u + x._log2l) + 1
    return ConstructibleReal(op, (x, y), None, log2u,
                             x._log2l + y._log2l, x._sqrts | y._sqrts)


def _decompose(x):
    """Split a value into (content, numerator, denominator).

    content is mpq; numerator/denominator are primitive DAGs or None
    (None numerator means the value is the bare content)."""
    if _is_rat(x):
        return x._q, None, None
    if _is_div(x):
        return _ONE_Q, x._args[0], x._args[1]
    if x._op == _OP_MUL and _is_rat(x._args[0]):
        body = x._args[1]
        if _is_div(body):
            return x._args[0]._q, body._args[0], body._args[1]
        return x._args[0]._q, body, None
    return _ONE_Q, x, None


def _wrap(content, num, den) -> ConstructibleReal:
    """Rebuild c * N / D in canonical form."""
    if num is None:
        return _rat_node(content)
    if _is_rat(num):
        content = content * num._q
        num = None
        if den is None:
            return _rat_node(content)
        num = _rat_node(_ONE_Q)
    if den is not None:
        if _is_rat(den):
            content = content / den._q
            den = None
    body = num if den is None else ConstructibleReal(
        _OP_DIV, (num, den), None,
        num._log2u + den._log2l, num._log2l + den._log2u,
        num._sqrts | den._sqrts)
    if content == 1:
        return body
    if content == 0:
        return _rat_node(_ZERO_Q)
    scale = _rat_node(content)
    return ConstructibleReal(_OP_MUL, (scale, body), None,
                             scale._log2u + body._log2u,
                             scale._log2l + body._log2l, body._sqrts)


def _rat_gcd(a, b):
    """Positive rational g with a/g and b/g integral."""
    num = gmpy2.gcd(a.numerator, b.numerator)
    den = (a.denominator // gmpy2.gcd(a.denominator, b.denominator)) \
        * b.denominator
    return mpq(num, den)


def _add_core(x, y, subtract: bool) -> ConstructibleReal:
    c1, n1, d1 = _decompose(x)
    c2, n2, d2 = _decompose(y)
    if subtract:
        c2 = -c2
    if n1 is None and n2 is None:
        return _rat_node(c1 + c2)
    if n1 is None and c1 == 0:
        return _wrap(c2, n2, d2)
    if n2 is None and c2 == 0:
        return _wrap(c1, n1, d1)
    one = _rat_node(_ONE_Q)
    if d1 is d2:
        den = d1
    elif d1 is None:
        den = d2
        n1 = den if n1 is None else _prim_mul(n1, den)
    elif d2 is None:
        den = d1
        n2 = den if n2 is None else _prim_mul(n2, den)
    else:
        den = _shared_mul(d1, d2)
        n1 = _prim_mul(n1 if n1 is not None else one, d2)
        n2 = _prim_mul(n2 if n2 is not None else one, d1)
    if n1 is None:
        n1 = one
    if n2 is None:
        n2 = one
    g = _rat_gcd(c1, c2)
    i1, i2 = c1 / g, c2 / g
    t1 = n1 if i1 == 1 else _prim_mul(_rat_node(i1), n1)
    t2 = n2 if i2 == 1 else _prim_mul(_rat_node(i2), n2)
    return _wrap(g, _prim_add(t1, t2, subtract=False), den)


def add(x, y) -> ConstructibleReal:
    return _add_core(_coerce(x), _coerce(y), subtract=False)


def sub(x, y) -> ConstructibleReal:
    return _add_core(_coerce(x), _coerce(y), subtract=True)


def neg(x) -> ConstructibleReal:
    x = _coerce(x)
    if _is_rat(x):
        return _rat_node(-x._q)
    c, n, d = _decompose(x)
    return _wrap(-c, n, d)


def _mul_core(x, y) -> ConstructibleReal:
    c1, n1, d1 = _decompose(x)
    c2, n2, d2 = _decompose(y)
    c = c1 * c2
    if c == 0:
        return _rat_node(_ZERO_Q)
    if n1 is None:
        num, den = n2, d2
    elif n2 is None:
        num, den = n1, d1
    else:
        num = _prim_mul(n1, n2)
        if d1 is None:
            den = d2
        elif d2 is None:
            den = d1
        else:
            den = _shared_mul(d1, d2)
    return _wrap(c, num, den)


def mul(x, y) -> ConstructibleReal:
    return _mul_core(_coerce(x), _coerce(y))


def div(x, y) -> ConstructibleReal:
    x, y = _coerce(x), _coerce(y)
    if _is_rat(y):
        if y._q == 0:
            raise DivisionByZero("division by exact zero")
        return _mul_core(x, _rat_node(_ONE_Q / y._q))
    if sign(y) == 0:
        raise DivisionByZero("divisor is certified zero")
    c1, n1, d1 = _decompose(x)
    c2, n2, d2 = _decompose(y)
    c = c1 / c2
    if n1 is None and c1 == 0:
        return _rat_node(_ZERO_Q)
    # value = c * (n1 * d2) / (d1 * n2); n2 is nonzero since y is
    if n2 is not None and n2._op == _OP_SQRT and _is_rat(n2._args[0]):
        # rationalize a radical divisor: 1/sqrt(r) = sqrt(r)/r
        c = c / n2._args[0]._q
        n1 = n2 if n1 is None else _prim_mul(n1, n2)
        n2 = None
    if d2 is not None:
        n1 = d2 if n1 is None else _prim_mul(n1, d2)
    if n2 is None:
        den = d1
    elif d1 is None:
        den = n2
    else:
        den = _shared_mul(d1, n2)
    return _wrap(c, n1 if n1 is not None else _rat_node(_ONE_Q), den)


# Square roots of rationals are rewritten over shared prime atoms
# (sqrt(334) becomes sqrt(2)*sqrt(167) up to a rational factor), so equal
# radicals from unrelated computations count once in the degree bound.

_prime_sqrt_atoms: dict = {}
_opaque_sqrt_atoms: dict = {}

_SMALL_PRIMES = []
_sieve = list(range(2, 10000))
while _sieve:
    _p = _sieve[0]
    _SMALL_PRIMES.append(_p)
    _sieve = [n for n in _sieve if n % _p]
del _sieve


def _sqrt_atom(n) -> ConstructibleReal:
    """Shared radical node for a squarefree integer > 1."""
    key = int(n)
    hit = _prime_sqrt_atoms.get(key)
    if hit is None:
        child = _rat_node(mpq(key))
        hit = ConstructibleReal(_OP_SQRT, (child,), None,
                                child._log2u / 2.0, 0.0,
                                frozenset((next(_sqrt_serial),)))
        _prime_sqrt_atoms[key] = hit
    return hit


def _extract_square(m):
    """m = k*k * (prod of kernel primes) * residue, residue square-free
    of small primes; returns (k, kernel_primes, residue)."""
    square = gmpy2.mpz(1)
    kernel_primes = []
    m = gmpy2.mpz(m)
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        exp = 0
        while m % p == 0:
            m //= p
            exp += 1
        square *= gmpy2.mpz(p) ** (exp // 2)
        if exp % 2:
            kernel_primes.append(p)
    if m > 1 and gmpy2.is_square(m):
        square *= gmpy2.isqrt(m)
        m = gmpy2.mpz(1)
    return square, kernel_primes, m


def _sqrt_of_rational(q) -> ConstructibleReal:
    """sqrt of a positive non-square rational as coeff * prod sqrt(p)."""
    num, den = q.numerator, q.denominator
    square, kernel, m = _extract_square(num * den)
    coeff = _rat_node(mpq(square, den))
    if m > 1:
        # residual cofactor too large to factor; one shared opaque atom
        key = int(m)
        atom = _opaque_sqrt_atoms.get(key)
        if atom is None:
            child = _rat_node(mpq(key))
            atom = ConstructibleReal(_OP_SQRT, (child,), None,
                                     child._log2u / 2.0, 0.0,
                                     frozenset((next(_sqrt_serial),)))
            _opaque_sqrt_atoms[key] = atom
        node = atom
    else:
        node = None
    for p in kernel:
        piece = _sqrt_atom(p)
        node = piece if node is None else _mul_core(node, piece)
    if node is None:
        return coeff
    return _mul_core(coeff, node)


def sqrt(x) -> ConstructibleReal:
    x = _coerce(x)
    if _is_rat(x):
        q = x._q
        if q < 0:
            raise NegativeRadicand("square root of a negative rational")
        if q == 0:
            return x
        if gmpy2.is_square(q.numerator) and gmpy2.is_square(q.denominator):
            return _rat_node(mpq(gmpy2.isqrt(q.numerator),
                                 gmpy2.isqrt(q.denominator)))
        return _sqrt_of_rational(q)
    s = sign(x)
    if s < 0:
        raise NegativeRadicand("square root of a certified-negative value")
    if s == 0:
        return _rat_node(_ZERO_Q)
    # Integerize the radicand: with x = (a/b) * N / D,
    #   sqrt(x) = k * sign(D) * sqrt(R) / (b * D),
    # where a*b*N*D = k^2 * R and R is a primitive DAG.  Keeping
    # radicands division-free keeps the separation bound polynomial.
    c, num, den = _decompose(x)
    a, b = c.numerator, c.denominator
    if den is None:
        sign_den = 1
        body = num
    else:
        sign_den = sign(den)
        body = _prim_mul(num, den)
    k, kernel_primes, m_left = _extract_square(abs(a) * b)
    m = gmpy2.mpz(1) if a >= 0 else gmpy2.mpz(-1)
    m *= m_left
    for p in kernel_primes:
        m *= p
    if m != 1:
        body = _prim_mul(_rat_node(mpq(m)), body)
    root = _sqrt_node(body)
    return _wrap(mpq(int(k) * sign_den, b), root, den)


def _sqrt_node(body) -> ConstructibleReal:
    # BFMSS: write the radicand as a quotient of algebraic integers and
    # put the radical on whichever side keeps the bounds smaller.
    if body._log2u >= body._log2l:
        log2u = (body._log2u + body._log2l) / 2.0
        log2l = body._log2l
    else:
        log2u = body._log2u
        log2l = (body._log2u + body._log2l) / 2.0
    return ConstructibleReal(_OP_SQRT, (body,), None, log2u, log2l,
                             body._sqrts | {next(_sqrt_serial)})


# -- interval refinement ---------------------------------------------------


def _topo_uncached(root, prec):
    """Post-order list of nodes whose cache is below `prec`."""
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        nid = id(node)
        if expanded:
            order.append(node)
            continue
        if nid in seen:
            continue
        cache = node._cache
        if cache is not None and cache[0] >= prec:
            continue
        seen.add(nid)
        stack.append((node, True))
        for child in node._args:
            stack.append((child, False))
    return order


def _refine(root, prec):
    order = _topo_uncached(root, prec)
    if not order:
        return
    ctx_d = gmpy2.context(precision=prec + 2, round=gmpy2.RoundDown)
    ctx_u = gmpy2.context(precision=prec + 2, round=gmpy2.RoundUp)
    zero = mpfr(0)
    inf = mpfr("inf")
    for node in order:
        op = node._op
        if op == _OP_RAT:
            lo = ctx_d.add(node._q, zero)
            hi = ctx_u.add(node._q, zero)
        elif op == _OP_NEG:
            _, clo, chi = node._args[0]._cache
            # bare unary minus would round through the ambient context
            lo, hi = ctx_d.minus(chi), ctx_u.minus(clo)
        elif op == _OP_ADD:
            _, alo, ahi = node._args[0]._cache
            _, blo, bhi = node._args[1]._cache
            lo, hi = ctx_d.add(alo, blo), ctx_u.add(ahi, bhi)
        elif op == _OP_SUB:
            _, alo, ahi = node._args[0]._cache
            _, blo, bhi = node._args[1]._cache
            lo, hi = ctx_d.sub(alo, bhi), ctx_u.sub(ahi, blo)
        elif op == _OP_MUL:
            _, alo, ahi = node._args[0]._cache
            _, blo, bhi = node._args[1]._cache
            if not (gmpy2.is_finite(alo) and gmpy2.is_finite(ahi)
                    and gmpy2.is_finite(blo) and gmpy2.is_finite(bhi)):
                lo, hi = -inf, inf
            else:
                lo = min(ctx_d.mul(alo, blo), ctx_d.mul(alo, bhi),
                         ctx_d.mul(ahi, blo), ctx_d.mul(ahi, bhi))
                hi = max(ctx_u.mul(alo, blo), ctx_u.mul(alo, bhi),
                         ctx_u.mul(ahi, blo), ctx_u.mul(ahi, bhi))
        elif op == _OP_DIV:
            _, alo, ahi = node._args[0]._cache
            _, blo, bhi = node._args[1]._cache
            if (blo <= 0 <= bhi or not (gmpy2.is_finite(alo)
                    and gmpy2.is_finite(ahi) and gmpy2.is_finite(blo)
                    and gmpy2.is_finite(bhi))):
                # divisor enclosure still straddles zero at this precision
                lo, hi = -inf, inf
            else:
                lo = min(ctx_d.div(alo, blo), ctx_d.div(alo, bhi),
                         ctx_d.div(ahi, blo), ctx_d.div(ahi, bhi))
                hi = max(ctx_u.div(alo, blo), ctx_u.div(alo, bhi),
                         ctx_u.div(ahi, blo), ctx_u.div(ahi, bhi))
        else:  # sqrt; radicand certified nonnegative
            _, clo, chi = node._args[0]._cache
            lo = ctx_d.sqrt(clo) if clo > 0 else zero
            hi = ctx_u.sqrt(chi)
        old = node._cache
        if old is not None:
            # intersecting keeps the published interval monotonically narrowing
            if old[1] > lo:
                lo = old[1]
            if old[2] < hi:
                hi = old[2]
            if lo > hi:
                raise AssertionError("interval inversion: soundness bug")
        node._cache = (prec, lo, hi)


def _sep_bits(x) -> int | None:
    """Bits b with |value| >= 2**-b whenever the value is nonzero."""
    if x._sep_cache is not None:
        return x._sep_cache if x._sep_cache > 0 else None
    s = len(x._sqrts)
    if s > 60:
        x._sep_cache = -1
        return None
    degree = 1 << s
    raw = (degree - 1) * max(x._log2u, 0.0) + max(x._log2l, 0.0)
    if not math.isfinite(raw) or raw > _HARD_LIMIT_BITS * 8:
        x._sep_cache = -1
        return None
    bits = int(math.ceil(raw * (1.0 + 1e-9))) + 16
    x._sep_cache = bits
    return bits


def sign(x) -> int:
    """Exact sign in {-1, 0, +1}; total for every well-formed value."""
    x = _coerce(x)
    if x._sign_cache is not None:
        return x._sign_cache
    if x._op == _OP_RAT:
        q = x._q
        s = 1 if q > 0 else (-1 if q < 0 else 0)
        x._sign_cache = s
        return s
    if x._log2u == _NEG_INF:
        # numerator measure is zero, so the value is identically zero
        x._sign_cache = 0
        return 0
    cap = _max_bits_cap
    prec = 64
    while True:
        _refine(x, prec)
        _, lo, hi = x._cache
        if lo > 0:
            s = 1
            break
        if hi < 0:
            s = -1
            break
        if gmpy2.is_finite(lo) and gmpy2.is_finite(hi):
            bits = _sep_bits(x)
            if bits is not None:
                ball = gmpy2.context(precision=8).div_2exp(mpfr(1), bits)
                if -ball < lo and hi < ball:
                    s = 0
                    break
        if cap is not None and prec >= cap:
            raise PrecisionCapExceeded(
                f"sign undecided at FLEXIPOLY_MAX_BITS={cap}")
        if prec >= _HARD_LIMIT_BITS:
            raise PrecisionCapExceeded(
                "sign undecided at hard precision ceiling; "
                "separation bound out of practical reach")
        prec *= 2
    x._sign_cache = s
    return s


def equal_value(x, y) -> bool:
    """Exact value equality."""
    return sign(sub(x, y)) == 0


# -- decimal output --------------------------------------------------------


def _floor_positive(y: ConstructibleReal) -> int:
    """Exact floor of a strictly positive value."""
    prec = 64
    while True:
        _refine(y, prec)
        _, lo, hi = y._cache
        if gmpy2.is_finite(lo) and gmpy2.is_finite(hi):
            qlo, qhi = mpq(lo), mpq(hi)
            flo = qlo.numerator // qlo.denominator
            fhi = qhi.numerator // qhi.denominator
            if flo == fhi:
                return int(flo)
            if fhi - flo == 1:
                # value may sit exactly on the integer boundary fhi
                if sign(sub(y, rational(int(fhi)))) >= 0:
                    return int(fhi)
                return int(flo)
        prec *= 2


def to_decimal(x, digits: int) -> str:
    """Decimal string of the exact value truncated toward zero.

    Every emitted digit is exact; no rounding is applied.  A value whose
    truncation is zero prints without a sign.
    """
    x = _coerce(x)
    if digits < 1:
        raise ValueError("digits must be >= 1")
    s = sign(x)
    if s == 0:
        return "0." + "0" * digits
    magnitude = x if s > 0 else neg(x)
    n = _floor_positive(mul(magnitude, rational(10 ** digits)))
    intpart, fracpart = divmod(n, 10 ** digits)
    prefix = "-" if (s < 0 and n > 0) else ""
    return f"{prefix}{intpart}.{fracpart:0{digits}d}"


# -- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+\.\d+)|(\d+)|(sqrt)|([()+\-*/])|(\S))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        decimal_lit, int_lit, kw, symbol, bad = m.groups()
        tok_pos = m.start(1) if decimal_lit else (
            m.start(2) if int_lit else (
                m.start(3) if kw else (
                    m.start(4) if symbol else m.start(5))))
        if bad is not None:
            raise ExprSyntaxError(f"unexpected character {bad!r}", tok_pos)
        if decimal_lit is not None:
            tokens.append(("dec", decimal_lit, tok_pos))
        elif int_lit is not None:
            tokens.append(("int", int_lit, tok_pos))
        elif kw is not None:
            tokens.append(("sqrt", kw, tok_pos))
        else:
            tokens.append((symbol, symbol, tok_pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, memo):
        self.tokens = tokens
        self.i = 0
        self.memo = memo if memo is not None else {}

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.advance()
        if tok[0] != kind:
            raise ExprSyntaxError(
                f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def _memoized(self, key, build, pos):
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        try:
            node = build()
        except (DivisionByZero, NegativeRadicand) as exc:
            raise ExprDomainError(str(exc), pos) from exc
        self.memo[key] = node
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op, _, pos = self.advance()
            rhs = self.term()
            fn = add if op == "+" else sub
            node = self._memoized((op, id(node), id(rhs)),
                                  lambda: fn(node, rhs), pos)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.advance()
            rhs = self.factor()
            fn = mul if op == "*" else div
            node = self._memoized((op, id(node), id(rhs)),
                                  lambda: fn(node, rhs), pos)
        return node

    def factor(self):
        kind, text, pos = self.advance()
        if kind == "-":
            inner = self.factor()
            return self._memoized(("neg", id(inner)),
                                  lambda: neg(inner), pos)
        if kind == "int":
            return self._memoized(("rat", int(text), 1),
                                  lambda: rational(int(text)), pos)
        if kind == "dec":
            whole, frac = text.split(".")
            num = int(whole + frac)
            den = 10 ** len(frac)
            return self._memoized(("rat", num, den),
                                  lambda: rational(num, den), pos)
        if kind == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "sqrt":
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return self._memoized(("sqrt", id(inner)),
                                  lambda: sqrt(inner), pos)
        raise ExprSyntaxError(f"unexpected token {text!r}", pos)


def parse_expr(text: str, memo: dict | None = None) -> ConstructibleReal:
    """Parse an expression string into a value.

    Grammar: sums of products of factors, where a factor is an integer,
    a decimal literal (an exact rational), a parenthesized expression or
    sqrt(...), optionally negated.  Passing the same `memo` dict across
    calls shares structurally identical subexpressions between them.
    """
    parser = _Parser(_tokenize(text), memo)
    node = parser.expr()
    kind, text_, pos = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(f"trailing input {text_!r}", pos)
    return node


# -- printing --------------------------------------------------------------

_LVL_EXPR = 0
_LVL_TERM = 1
_LVL_ATOM = 2


def to_expr_string(x) -> str:
    """Render a value in the parse_expr grammar; round-trips by value."""
    x = _coerce(x)
    rendered: dict[int, tuple[str, int]] = {}

    def wrap(child, min_level):
        text, level = rendered[id(child)]
        return f"({text})" if level < min_level else text

    stack = [(x, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in rendered:
            continue
        if not expanded:
            stack.append((node, True))
            for child in node._args:
                stack.append((child, False))
            continue
        op = node._op
        if op == _OP_RAT:
            q = node._q
            body = str(q.numerator) if q.denominator == 1 else \
                f"{q.numerator}/{q.denominator}"
            if q < 0:
                rendered[id(node)] = (body, _LVL_EXPR)
            elif q.denominator == 1:
                rendered[id(node)] = (body, _LVL_ATOM)
            else:
                rendered[id(node)] = (body, _LVL_TERM)
        elif op == _OP_NEG:
            rendered[id(node)] = ("-" + wrap(node._args[0], _LVL_ATOM),
                                  _LVL_EXPR)
        elif op == _OP_SQRT:
            inner, _ = rendered[id(node._args[0])]
            rendered[id(node)] = (f"sqrt({inner})", _LVL_ATOM)
        elif op in (_OP_ADD, _OP_SUB):
            glyph = " + " if op == _OP_ADD else " - "
            text = wrap(node._args[0], _LVL_EXPR) + glyph + \
                wrap(node._args[1], _LVL_TERM)
            rendered[id(node)] = (text, _LVL_EXPR)
        else:  # mul / div
            glyph = "*" if op == _OP_MUL else "/"
            text = wrap(node._args[0], _LVL_TERM) + glyph + \
                wrap(node._args[1], _LVL_ATOM)
            rendered[id(node)] = (text, _LVL_TERM)
    return rendered[id(x)][0]
