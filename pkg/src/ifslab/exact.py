"""Exact scalar backends: rationals, log-combinations, real algebraic numbers.

Two numeric regimes coexist in this library.  The *exact* backend carries
masses and coordinates as `fractions.Fraction` or as `AlgebraicNumber`
(an element of Q(alpha) for a fixed real algebraic alpha), and every
comparison is decided, never guessed.  The *float* backend is plain 64-bit
floats for large-resolution scans.

Three pieces of machinery live here:

* rational interval arithmetic (outward by construction: endpoints are
  exact rationals, so no rounding occurs at all);
* `LogSum`, an exact representation of finite sums  sum_i c_i * log2(q_i)
  with rational c_i and positive rational q_i.  Entropies of exact measures
  are LogSum values, which is what makes statements like "the chain rule
  holds exactly" decidable: equality and sign are settled by a
  multiplicative-independence test over a coprime factor basis, with
  directed-rounded MPFR evaluation (gmpy2) as the fast path;
* `NumberField` / `AlgebraicNumber`: alpha is given by an integer minimal
  polynomial plus an isolating rational interval.  Zero-ness of any
  polynomial expression in alpha is decided by reduction to the power
  basis (equivalent to remainder mod the minimal polynomial); signs by
  interval refinement, which terminates because nonzero is already known.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

import gmpy2

from .errors import BackendError

ExactScalar = Union[Fraction, "AlgebraicNumber"]

_SPF_LIMIT = 1_000_000
_spf_table = None


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

def parse_rational(value) -> Fraction:
    """Parse an exact rational from int/str/Fraction.

    Floats are rejected: exact paths never parse floats (config values are
    strings like "1/3" precisely to avoid silent binary rounding).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        raise BackendError(
            "float %r not accepted on the exact backend; pass a string like '1/3'"
            % (value,)
        )
    raise BackendError("cannot parse %r as an exact rational" % (value,))


_field_registry: dict = {}


def shared_number_field(minpoly, interval) -> "NumberField":
    """Interned field lookup: configs naming the same (minpoly, interval)
    share one NumberField instance, so their elements mix."""
    key = (tuple(int(c) for c in minpoly),
           Fraction(interval[0]), Fraction(interval[1]))
    f = _field_registry.get(key)
    if f is None:
        f = NumberField(minpoly, interval)
        _field_registry[key] = f
    return f


def parse_scalar(value):
    """Parse an exact scalar: rational, or {'minpoly': [...], 'interval':
    [lo, hi]} for the field generator, optionally with 'coeffs' selecting
    another element of the field in the power basis."""
    if isinstance(value, dict):
        minpoly = [int(c) for c in value["minpoly"]]
        lo, hi = (parse_rational(str(e) if not isinstance(e, (int, str)) else e)
                  for e in value["interval"])
        gen = shared_number_field(minpoly, (lo, hi)).generator()
        if "coeffs" in value:
            acc = Fraction(0)
            for c in reversed([parse_rational(c) for c in value["coeffs"]]):
                acc = gen * acc + c
            return acc
        return gen
    return parse_rational(value)


def scalar_to_json(x):
    """Inverse of parse_scalar for report emission."""
    if isinstance(x, AlgebraicNumber):
        lo, hi = x.field.original_interval
        return {
            "minpoly": [int(c) for c in x.field.minpoly],
            "interval": [str(lo), str(hi)],
            "coeffs": [str(c) for c in x.coeffs],
        }
    return str(x)


# --------------------------------------------------------------------------
# rational intervals  (pairs of Fractions, lo <= hi, exact arithmetic)
# --------------------------------------------------------------------------

RatInterval = tuple[Fraction, Fraction]


def iv_add(a: RatInterval, b: RatInterval) -> RatInterval:
    return (a[0] + b[0], a[1] + b[1])


def iv_neg(a: RatInterval) -> RatInterval:
    return (-a[1], -a[0])


def iv_scale(a: RatInterval, c: Fraction) -> RatInterval:
    if c >= 0:
        return (a[0] * c, a[1] * c)
    return (a[1] * c, a[0] * c)


def iv_mul(a: RatInterval, b: RatInterval) -> RatInterval:
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(ps), max(ps))


def iv_pow(a: RatInterval, k: int) -> RatInterval:
    if k == 0:
        return (Fraction(1), Fraction(1))
    out = a
    for _ in range(k - 1):
        out = iv_mul(out, a)
    return out


def iv_abs_lower(a: RatInterval) -> Fraction:
    lo, hi = a
    if lo > 0:
        return lo
    if hi < 0:
        return -hi
    return Fraction(0)


def iv_abs_upper(a: RatInterval) -> Fraction:
    return max(abs(a[0]), abs(a[1]))


# --------------------------------------------------------------------------
# coprime factor basis (factor refinement; no integer factoring required)
# --------------------------------------------------------------------------

def _spf():
    """Smallest-prime-factor sieve, built lazily (used for small integers)."""
    global _spf_table
    if _spf_table is None:
        import numpy as np

        n = _SPF_LIMIT
        spf = np.arange(n + 1, dtype=np.int64)
        for p in range(2, int(n ** 0.5) + 1):
            if spf[p] == p:
                sl = spf[p * p :: p]
                sl[sl == np.arange(p * p, n + 1, p)] = p
        _spf_table = spf
    return _spf_table


def _factor_small(n: int) -> dict[int, int]:
    spf = _spf()
    out: dict[int, int] = {}
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out[p] = e
    return out


def coprime_basis(values: Iterable[int]) -> list[int]:
    """A gcd-free basis: pairwise coprime integers > 1 over which every
    input factors with integer exponents.

    Pairwise-coprime integers > 1 are multiplicatively independent, so
    their base-2 logs are linearly independent over Q; exactness of
    LogSum.sign/is_zero rests on that.
    """
    basis: list[int] = []
    queue = [int(v) for v in set(values) if v > 1]
    while queue:
        m = queue.pop()
        if m == 1:
            continue
        for i, b in enumerate(basis):
            g = math.gcd(m, b)
            if g > 1:
                del basis[i]
                queue.extend((g, b // g, m // g))
                break
        else:
            basis.append(m)
    return sorted(basis)


def exponents_over(n: int, basis: Sequence[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for b in basis:
        if n == 1:
            break
        e = 0
        while n % b == 0:
            n //= b
            e += 1
        if e:
            out[b] = e
    if n != 1:
        raise ValueError("integer does not factor over the supplied basis")
    return out


# --------------------------------------------------------------------------
# directed-rounded evaluation helpers (gmpy2 / MPFR)
# --------------------------------------------------------------------------

_CTX_CACHE: dict = {}


def _ctx(prec: int, downward: bool):
    key = (prec, downward)
    c = _CTX_CACHE.get(key)
    if c is None:
        c = gmpy2.context(precision=prec,
                          round=gmpy2.RoundDown if downward else gmpy2.RoundUp)
        _CTX_CACHE[key] = c
    return c


def _mpfr_to_fraction(x) -> Fraction:
    q = gmpy2.mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


def entropy_enclosure(masses: Iterable[Fraction], prec: int = 80) -> tuple[Fraction, Fraction]:
    """Certified rational bracket of -sum p*log2(p) over exact masses.

    Two directed-rounding passes with cached contexts; much faster than
    building a LogSum when only a numeric bracket is needed.
    """
    ps = [gmpy2.mpq(p.numerator, p.denominator) for p in masses if p > 0]
    old = gmpy2.get_context()
    try:
        gmpy2.set_context(_ctx(prec, True))
        logs_dn = [gmpy2.log2(p) for p in ps]
        gmpy2.set_context(_ctx(prec, False))
        logs_up = [gmpy2.log2(p) for p in ps]
        # term = -p*log2(p): lower uses the upper log, upper the lower log
        gmpy2.set_context(_ctx(prec, True))
        lo = gmpy2.mpfr(0)
        for p, lup in zip(ps, logs_up):
            lo += (-p) * lup
        gmpy2.set_context(_ctx(prec, False))
        hi = gmpy2.mpfr(0)
        for p, ldn in zip(ps, logs_dn):
            hi += (-p) * ldn
    finally:
        gmpy2.set_context(old)
    return _mpfr_to_fraction(lo), _mpfr_to_fraction(hi)


class LogSum:
    """An exact value of the form  sum_q coeff(q) * log2(q),  q > 0 rational.

    Supports ring operations, exact zero test, and exact sign.  The sign
    routine escalates MPFR precision with directed rounding until the
    enclosure excludes zero, falling back on the exact independence test,
    so it terminates on every input.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Fraction, Fraction] | None = None):
        self._terms: dict[Fraction, Fraction] = {}
        if terms:
            for q, c in terms.items():
                self._add_term(c, q)

    def _add_term(self, coeff: Fraction, q: Fraction) -> None:
        if coeff == 0 or q == 1:
            return
        if q <= 0:
            raise ValueError("LogSum arguments must be positive rationals")
        cur = self._terms.get(q)
        new = coeff if cur is None else cur + coeff
        if new == 0:
            self._terms.pop(q, None)
        else:
            self._terms[q] = new

    @classmethod
    def term(cls, coeff: Fraction, q: Fraction) -> "LogSum":
        out = cls()
        out._add_term(Fraction(coeff), Fraction(q))
        return out

    @property
    def terms(self) -> dict[Fraction, Fraction]:
        return dict(self._terms)

    def __add__(self, other: "LogSum") -> "LogSum":
        out = LogSum()
        out._terms = dict(self._terms)
        for q, c in other._terms.items():
            out._add_term(c, q)
        return out

    def __sub__(self, other: "LogSum") -> "LogSum":
        return self + (-other)

    def __neg__(self) -> "LogSum":
        out = LogSum()
        out._terms = {q: -c for q, c in self._terms.items()}
        return out

    def scaled(self, c) -> "LogSum":
        c = Fraction(c)
        out = LogSum()
        if c != 0:
            out._terms = {q: co * c for q, co in self._terms.items()}
        return out

    def to_float(self) -> float:
        return math.fsum(float(c) * math.log2(q) for q, c in self._terms.items())

    def enclosure(self, prec: int = 128) -> tuple[Fraction, Fraction]:
        """Certified rational enclosure of the value at the given precision."""
        if not self._terms:
            return (Fraction(0), Fraction(0))
        items = list(self._terms.items())
        qs = [gmpy2.mpq(q.numerator, q.denominator) for q, _ in items]
        cs = [gmpy2.mpq(c.numerator, c.denominator) for _, c in items]
        old = gmpy2.get_context()
        try:
            gmpy2.set_context(_ctx(prec, True))
            logs_dn = [gmpy2.log2(q) for q in qs]
            gmpy2.set_context(_ctx(prec, False))
            logs_up = [gmpy2.log2(q) for q in qs]
            gmpy2.set_context(_ctx(prec, True))
            lo = gmpy2.mpfr(0)
            for c, ldn, lup in zip(cs, logs_dn, logs_up):
                lo += c * (ldn if c > 0 else lup)
            gmpy2.set_context(_ctx(prec, False))
            hi = gmpy2.mpfr(0)
            for c, ldn, lup in zip(cs, logs_dn, logs_up):
                hi += c * (lup if c > 0 else ldn)
        finally:
            gmpy2.set_context(old)
        return _mpfr_to_fraction(lo), _mpfr_to_fraction(hi)

    def is_zero(self) -> bool:
        if not self._terms:
            return True
        ints: set[int] = set()
        for q in self._terms:
            ints.add(q.numerator)
            ints.add(q.denominator)
        small = max(ints) <= _SPF_LIMIT
        totals: dict[int, Fraction] = {}
        if small:
            for q, c in self._terms.items():
                for p, e in _factor_small(q.numerator).items():
                    totals[p] = totals.get(p, Fraction(0)) + c * e
                for p, e in _factor_small(q.denominator).items():
                    totals[p] = totals.get(p, Fraction(0)) - c * e
        else:
            basis = coprime_basis(ints)
            for q, c in self._terms.items():
                for b, e in exponents_over(q.numerator, basis).items():
                    totals[b] = totals.get(b, Fraction(0)) + c * e
                for b, e in exponents_over(q.denominator, basis).items():
                    totals[b] = totals.get(b, Fraction(0)) - c * e
        return all(v == 0 for v in totals.values())

    def sign(self) -> int:
        if not self._terms:
            return 0
        prec = 96
        checked_zero = False
        while True:
            lo, hi = self.enclosure(prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if not checked_zero:
                if self.is_zero():
                    return 0
                checked_zero = True
            prec *= 4

    def compare(self, other: "LogSum") -> int:
        return (self - other).sign()

    def __repr__(self) -> str:
        return "LogSum(%s)" % (self._terms,)


def entropy_logsum(masses: Iterable[Fraction]) -> LogSum:
    """H = sum p*log2(1/p) as an exact LogSum (masses need not be sorted)."""
    out = LogSum()
    for p in masses:
        if p > 0:
            out._add_term(p, Fraction(1, 1) / p)
    return out


def binary_entropy_logsum(a: Fraction) -> LogSum:
    """H(a) = -a log a - (1-a) log(1-a), exact."""
    return entropy_logsum((a, 1 - a))


# --------------------------------------------------------------------------
# real algebraic numbers
# --------------------------------------------------------------------------

def _poly_eval_frac(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class NumberField:
    """Q(alpha) for a real root alpha of an integer polynomial, located by an
    isolating open interval with a strict sign change at the endpoints.

    The minimal polynomial is assumed irreducible over Q (it is validated to
    be squarefree and to change sign across the interval); under that
    assumption reduction to the power basis decides zero exactly.
    """

    __slots__ = ("minpoly", "degree", "lo", "hi", "original_interval",
                 "_sign_lo", "_reduction", "_gen", "_pow_cache_key",
                 "_pow_cache")

    def __init__(self, minpoly: Sequence[int], interval):
        coeffs = [int(c) for c in minpoly]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise ValueError("minimal polynomial must have degree >= 1")
        self.minpoly = tuple(coeffs)
        self.degree = len(coeffs) - 1
        lo, hi = Fraction(interval[0]), Fraction(interval[1])
        if not lo < hi:
            raise ValueError("isolating interval must be nondegenerate")
        f = [Fraction(c) for c in coeffs]
        s_lo = _poly_eval_frac(f, lo)
        s_hi = _poly_eval_frac(f, hi)
        if s_lo == 0 or s_hi == 0 or (s_lo > 0) == (s_hi > 0):
            raise ValueError("minimal polynomial must change sign strictly "
                             "across the isolating interval")
        # squarefree sanity check: gcd(f, f') must be constant
        der = [f[i] * i for i in range(1, len(f))]
        if _poly_gcd_degree(f, der) > 0:
            raise ValueError("minimal polynomial is not squarefree")
        self.lo, self.hi = lo, hi
        self.original_interval = (lo, hi)
        self._sign_lo = 1 if s_lo > 0 else -1
        lead = Fraction(coeffs[-1])
        # alpha^d = -(c_0 + ... + c_{d-1} alpha^{d-1}) / c_d
        self._reduction = tuple(-Fraction(c) / lead for c in coeffs[:-1])
        self._gen = None
        self._pow_cache_key = None
        self._pow_cache = None

    def generator(self) -> "AlgebraicNumber":
        if self._gen is None:
            coeffs = [Fraction(0)] * self.degree
            if self.degree == 1:
                # rational root: demote immediately
                return -Fraction(self.minpoly[0], self.minpoly[1])  # type: ignore
            coeffs[1] = Fraction(1)
            self._gen = AlgebraicNumber(self, tuple(coeffs))
        return self._gen

    def refine(self) -> None:
        """One bisection step of the isolating interval (exact signs)."""
        mid = (self.lo + self.hi) / 2
        f = [Fraction(c) for c in self.minpoly]
        s_mid = _poly_eval_frac(f, mid)
        if s_mid == 0:
            # cannot happen for an irreducible minpoly of degree >= 2;
            # nudge the midpoint to keep the sign change strict
            mid = self.lo + (self.hi - self.lo) * Fraction(13, 32)
            s_mid = _poly_eval_frac(f, mid)
        if (s_mid > 0) == (self._sign_lo > 0):
            self.lo = mid
        else:
            self.hi = mid
        self._pow_cache_key = None

    def width(self) -> Fraction:
        return self.hi - self.lo

    def power_enclosures(self, up_to: int) -> list[RatInterval]:
        """Enclosures of alpha^0 .. alpha^up_to at the current interval."""
        key = (self.lo, self.hi, up_to)
        if self._pow_cache_key is not None and self._pow_cache_key[:2] == key[:2] \
                and self._pow_cache_key[2] >= up_to:
            return self._pow_cache[: up_to + 1]
        base: RatInterval = (self.lo, self.hi)
        out: list[RatInterval] = [(Fraction(1), Fraction(1))]
        for _ in range(up_to):
            out.append(iv_mul(out[-1], base))
        self._pow_cache_key = key
        self._pow_cache = out
        return out

    def __repr__(self) -> str:
        return "NumberField(minpoly=%s, interval=(%s, %s))" % (
            list(self.minpoly), self.lo, self.hi)


def _poly_gcd_degree(a: list[Fraction], b: list[Fraction]) -> int:
    a, b = list(a), list(b)

    def deg(p):
        while p and p[-1] == 0:
            p.pop()
        return len(p) - 1

    while deg(b) >= 0:
        # a mod b
        da, db = deg(a), deg(b)
        while da >= db and da >= 0:
            f = a[da] / b[db]
            for i in range(db + 1):
                a[da - db + i] -= f * b[i]
            da = deg(a)
        a, b = b, a
    return deg(a)


class AlgebraicNumber:
    """Element of Q(alpha) as a vector in the power basis {1, alpha, ...}.

    Arithmetic reduces modulo the minimal polynomial; results whose higher
    coefficients vanish are demoted to plain Fraction, so instances are
    always irrational and every sign query terminates.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: tuple[Fraction, ...]):
        self.field = field
        self.coeffs = coeffs

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def _demote(field: NumberField, coeffs: list[Fraction]):
        if all(c == 0 for c in coeffs[1:]):
            return coeffs[0]
        return AlgebraicNumber(field, tuple(coeffs))

    def _coerce(self, other):
        if isinstance(other, AlgebraicNumber):
            if other.field is not self.field:
                raise BackendError("cannot mix elements of distinct number fields")
            return list(other.coeffs)
        if isinstance(other, (int, Fraction)):
            v = [Fraction(0)] * self.field.degree
            v[0] = Fraction(other)
            return v
        return None

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._demote(self.field,
                            [a + b for a, b in zip(self.coeffs, o)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._demote(self.field,
                            [a - b for a, b in zip(self.coeffs, o)])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._demote(self.field,
                            [b - a for a, b in zip(self.coeffs, o)])

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o):
                if b != 0:
                    prod[i + j] += a * b
        red = self.field._reduction
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            if c == 0:
                continue
            prod[k] = Fraction(0)
            for i, r in enumerate(red):
                prod[k - d + i] += c * r
        return self._demote(self.field, prod[:d])

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        """Field inverse by the extended Euclidean algorithm on polynomials."""
        f = [Fraction(c) for c in self.field.minpoly]
        g = list(self.coeffs)
        # invariant: s*g == r  (mod f)
        r0, r1 = f, g
        s0, s1 = [Fraction(0)], [Fraction(1)]

        def deg(p):
            d = len(p) - 1
            while d >= 0 and p[d] == 0:
                d -= 1
            return d

        while deg(r1) > 0:
            q = [Fraction(0)] * (deg(r0) - deg(r1) + 1)
            rem = list(r0)
            while deg(rem) >= deg(r1):
                dr, d1 = deg(rem), deg(r1)
                c = rem[dr] / r1[d1]
                q[dr - d1] += c
                for i in range(d1 + 1):
                    rem[dr - d1 + i] -= c * r1[i]
            # s_new = s0 - q*s1
            s_new = list(s0) + [Fraction(0)] * max(0, len(q) + len(s1) - len(s0) - 1)
            for i, qc in enumerate(q):
                if qc == 0:
                    continue
                for j, sc in enumerate(s1):
                    if i + j >= len(s_new):
                        s_new.extend([Fraction(0)] * (i + j - len(s_new) + 1))
                    s_new[i + j] -= qc * sc
            r0, r1 = r1, rem
            s0, s1 = s1, s_new
        d1 = deg(r1)
        if d1 < 0:
            raise ZeroDivisionError("inverse of zero field element")
        c = r1[d1]  # constant remainder
        inv = [sc / c for sc in s1]
        inv = (inv + [Fraction(0)] * self.field.degree)[: self.field.degree]
        return self._demote(self.field, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._demote(self.field,
                                [c / Fraction(other) for c in self.coeffs])
        if isinstance(other, AlgebraicNumber):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        inv = self.inverse()
        if isinstance(inv, Fraction):
            return Fraction(other) / inv
        return inv * other

    # -- order / value -------------------------------------------------------

    def enclosure(self, max_width: Fraction | None = None) -> RatInterval:
        field = self.field
        while True:
            pows = field.power_enclosures(field.degree - 1)
            acc: RatInterval = (Fraction(0), Fraction(0))
            for c, pw in zip(self.coeffs, pows):
                if c != 0:
                    acc = iv_add(acc, iv_scale(pw, c))
            if max_width is None or acc[1] - acc[0] <= max_width:
                return acc
            field.refine()

    def sign(self) -> int:
        # zero is impossible (rational values are demoted), so this terminates
        while True:
            lo, hi = self.enclosure()
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            self.field.refine()

    def __float__(self) -> float:
        lo, hi = self.enclosure(Fraction(1, 2 ** 60))
        return float((lo + hi) / 2)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        if isinstance(other, AlgebraicNumber):
            return self.field is other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return False  # instances are always irrational
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def _cmp(self, other) -> int:
        diff = self - other
        if isinstance(diff, Fraction):
            return (diff > 0) - (diff < 0)
        return diff.sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self) -> str:
        return "AlgebraicNumber(%s ~ %.9g)" % (list(self.coeffs), float(self))


# --------------------------------------------------------------------------
# scalar helpers (duck-typed over Fraction | AlgebraicNumber | float)
# --------------------------------------------------------------------------

def scalar_is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, AlgebraicNumber))


def scalar_float(x) -> float:
    return float(x)


def scalar_sign(x) -> int:
    if isinstance(x, AlgebraicNumber):
        return x.sign()
    return (x > 0) - (x < 0)


def scalar_abs(x):
    if isinstance(x, AlgebraicNumber):
        return abs(x)
    return abs(x)


def scalar_floor_scaled(x, level: int) -> int:
    """floor(x * 2^level) for any scalar kind; exact on exact backends.

    level may be negative (coarse cells of width 2^|level|).
    """
    if isinstance(x, (int, Fraction)):
        v = Fraction(x) * (Fraction(2) ** level)
        return math.floor(v)
    if isinstance(x, AlgebraicNumber):
        scale = Fraction(2) ** level
        while True:
            lo, hi = x.enclosure()
            flo = math.floor(lo * scale)
            fhi = math.floor(hi * scale)
            if flo == fhi:
                return flo
            x.field.refine()
    if isinstance(x, float):
        return math.floor(x * (2.0 ** level))
    raise BackendError("unsupported scalar type %r" % type(x))


def dyadic_left(level: int, index: int) -> Fraction:
    """Left endpoint of the level-`level` dyadic cell with the given index."""
    return Fraction(index) * (Fraction(2) ** -level)
