"""Polynomially parametrized IFS families: cylinder difference polynomials,
transversality certification, sublevel-set covers, exceptional-parameter
covers, Liouville separation floors, and near-root scans.

Everything here runs on exact rational polynomial arithmetic; interval
evaluations have rational endpoints (no rounding), so "certified" means
certified.  Maps are x -> r_i(t) x + a_i(t) with polynomial coefficients;
this covers every family the theory is applied to (Bernoulli, projected
gasket, and the contract-on-average Sinai system, whose finite-depth
cylinder differences are exact polynomials).

Covering recursion soundness does not rest on the transversality
hypothesis: every returned cover provably contains the sublevel set and
the complement is certified above the threshold.  The hypothesis is what
buys the count and length bounds, which are asserted against documented
explicit constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import poly as P
from .errors import (
    BudgetExceededError,
    ConfigError,
    HypothesisViolationError,
    InconclusiveError,
    UnsupportedError,
)
from .exact import AlgebraicNumber, RatInterval, iv_abs_lower, iv_abs_upper
from .ifs import Ifs, SimilarityMap

DEFAULT_BUDGET = 1 << 24
DEFAULT_DEPTH_LIMIT = 60


def sqrt_upper(x: Fraction, bits: int = 40) -> Fraction:
    """A rational upper bound for sqrt(x), within relative 2^-bits."""
    if x < 0:
        raise ValueError("sqrt of a negative rational")
    if x == 0:
        return Fraction(0)
    n, d = x.numerator, x.denominator
    s = math.isqrt((n * d) << (2 * bits))
    return Fraction(s + 1, d << bits)


def root_pow_upper(x: Fraction, k: int) -> Fraction:
    """Upper bound for x^(1/2^k)."""
    y = x
    for _ in range(k):
        y = sqrt_upper(y)
    return y


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

class ParamFamily:
    """IFS family over a compact rational interval with polynomial r_i, a_i.

    Unless contract_on_average is set, every |r_i| is certified < 1 on the
    interval; in all cases r_i is certified nonzero.
    """

    def __init__(self, interval, symbols: Sequence[tuple], probs=None,
                 contract_on_average: bool = False):
        lo, hi = Fraction(interval[0]), Fraction(interval[1])
        if not lo < hi:
            raise ConfigError("parameter interval must be nondegenerate")
        self.interval: RatInterval = (lo, hi)
        self.symbols = [(P.poly(r), P.poly(a)) for r, a in symbols]
        if len(self.symbols) < 2:
            raise ConfigError("a family needs at least two symbols")
        if probs is None:
            probs = [Fraction(1, len(self.symbols))] * len(self.symbols)
        self.probs = [Fraction(p) for p in probs]
        self.contract_on_average = bool(contract_on_average)
        for idx, (r, _a) in enumerate(self.symbols):
            if not _certified_nonzero(r, self.interval):
                raise ConfigError("r_%d(t) not certified nonzero on I" % idx)
            if not contract_on_average and not _certified_abs_below_one(r, self.interval):
                raise ConfigError("|r_%d(t)| not certified < 1 on I" % idx)
        self._r_lo_cache = None

    @property
    def alphabet(self) -> range:
        return range(len(self.symbols))

    def r_min_lower(self) -> Fraction:
        """Certified positive rational lower bound for min_i min_I |r_i|."""
        if self._r_lo_cache is None:
            self._r_lo_cache = min(_abs_lower_bound(r, self.interval)
                                   for r, _ in self.symbols)
        return self._r_lo_cache

    def ifs_at(self, t) -> Ifs:
        """Instantiate the concrete IFS at parameter t (exact scalar)."""
        maps = []
        for r, a in self.symbols:
            maps.append(SimilarityMap(_poly_at(r, t), _poly_at(a, t)))
        return Ifs(maps, self.probs,
                   contract_on_average=self.contract_on_average)


def _poly_at(p: P.Poly, t):
    # Horner over mixed scalars (Fraction or AlgebraicNumber)
    acc = Fraction(0)
    for c in reversed(p):
        acc = t * acc + c
    return acc


def _certified_nonzero(p: P.Poly, iv: RatInterval,
                       depth: int = 24) -> bool:
    stack = [iv]
    steps = 0
    min_width = (iv[1] - iv[0]) / (1 << depth)
    while stack:
        piece = stack.pop()
        lo, hi = P.evaluate_interval(p, piece)
        if lo > 0 or hi < 0:
            continue
        if piece[1] - piece[0] <= min_width:
            return False
        mid = (piece[0] + piece[1]) / 2
        stack.append((piece[0], mid))
        stack.append((mid, piece[1]))
        steps += 1
        if steps > 1 << 16:
            return False
    return True


def _certified_abs_below_one(p: P.Poly, iv: RatInterval,
                             depth: int = 24) -> bool:
    stack = [iv]
    min_width = (iv[1] - iv[0]) / (1 << depth)
    while stack:
        piece = stack.pop()
        lo, hi = P.evaluate_interval(p, piece)
        if -1 < lo and hi < 1:
            continue
        if piece[1] - piece[0] <= min_width:
            return False
        mid = (piece[0] + piece[1]) / 2
        stack.append((piece[0], mid))
        stack.append((mid, piece[1]))
    return True


def _abs_lower_bound(p: P.Poly, iv: RatInterval, depth: int = 12) -> Fraction:
    """Certified rational lower bound for min over the interval of |p|."""
    pieces = [iv]
    for _ in range(depth):
        refined = []
        best = None
        for piece in pieces:
            lb = iv_abs_lower(P.evaluate_interval(p, piece))
            if best is None or lb < best:
                best = lb
        if best > 0:
            return best
        for piece in pieces:
            mid = (piece[0] + piece[1]) / 2
            refined.append((piece[0], mid))
            refined.append((mid, piece[1]))
        pieces = refined
    best = min(iv_abs_lower(P.evaluate_interval(p, piece)) for piece in pieces)
    if best <= 0:
        raise InconclusiveError("could not certify a positive lower bound for |r|")
    return best


# --------------------------------------------------------------------------
# cylinder difference polynomials
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaPoly:
    word_i: tuple[int, ...]
    word_j: tuple[int, ...]
    poly: P.Poly
    split_depth: int          # |i ^ j|, the common prefix length

    @property
    def identically_zero(self) -> bool:
        return P.is_zero(self.poly)


def base_point_poly(family: ParamFamily, word: Sequence[int]) -> P.Poly:
    """phi_{w,t}(0) as a polynomial in t."""
    if not word:
        return P.ZERO
    b = family.symbols[word[-1]][1]
    for s in reversed(word[:-1]):
        r, a = family.symbols[s]
        b = P.add(a, P.mul(r, b))
    return b


def prefix_ratio_poly(family: ParamFamily, word: Sequence[int]) -> P.Poly:
    out = P.ONE
    for s in word:
        out = P.mul(out, family.symbols[s][0])
    return out


def delta_poly(family: ParamFamily, word_i, word_j) -> DeltaPoly:
    """Delta_{i,j}(t) = phi_{i,t}(0) - phi_{j,t}(0), exact coefficients.

    Identically-zero detection is coefficientwise, hence exact.
    """
    wi, wj = tuple(word_i), tuple(word_j)
    if len(wi) != len(wj):
        raise ValueError("delta_poly needs equal-length words")
    split = 0
    while split < len(wi) and wi[split] == wj[split]:
        split += 1
    d = P.sub(base_point_poly(family, wi), base_point_poly(family, wj))
    return DeltaPoly(wi, wj, d, split)


def reduced_pair_polys(family: ParamFamily, n: int,
                       budget: int = DEFAULT_BUDGET) -> dict[P.Poly, tuple]:
    """Distinct reduced difference polynomials for all word lengths <= n.

    Reduced: the first symbols differ (pairs with a common prefix w factor
    as Delta = r_w * Delta~ of the reduced tail pair).  Deduplicated up to
    sign (Delta_{i,j} = -Delta_{j,i}); the value maps a canonical poly to
    one exemplar (word_i, word_j, length).
    """
    total = sum(len(family.symbols) ** m for m in range(1, n + 1))
    if total > budget:
        raise BudgetExceededError("word enumeration exceeds budget")
    out: dict[P.Poly, tuple] = {}
    words = [((), P.ZERO)]
    for m in range(1, n + 1):
        new = []
        for syms, bp in words:
            for s in family.alphabet:
                r, a = family.symbols[s]
                new.append((syms + (s,), P.add(a, P.mul(r, bp))))
        words = new
        if len(words) ** 2 > budget:
            raise BudgetExceededError("pair enumeration exceeds budget")
        for ii in range(len(words)):
            wi, bi = words[ii]
            for jj in range(ii + 1, len(words)):
                wj, bj = words[jj]
                if wi[0] == wj[0]:
                    continue
                d = P.sub(bi, bj)
                canon = _canonical_sign(d)
                if canon not in out:
                    out[canon] = (wi, wj, m)
    return out


def _canonical_sign(p: P.Poly) -> P.Poly:
    for c in p:
        if c != 0:
            return p if c > 0 else P.neg(p)
    return p


# --------------------------------------------------------------------------
# hypothesis certification: forall t, exists p <= k with |F^(p)(t)| >= c
# --------------------------------------------------------------------------

@dataclass
class HypothesisResult:
    status: str                 # "certified" | "violated" | "inconclusive"
    witness: RatInterval | None


def certify_some_derivative_clears(F: P.Poly, iv: RatInterval, c: Fraction,
                                   k: int,
                                   depth_limit: int = DEFAULT_DEPTH_LIMIT) -> HypothesisResult:
    """Certify that at every t in iv some derivative order <= k has
    |F^(p)(t)| >= c (non-strict).  Violations return an exact witness
    point where all derivatives are < c in absolute value."""
    derivs = [F]
    for _ in range(k):
        derivs.append(P.deriv(derivs[-1]))
    min_width = (iv[1] - iv[0]) / (Fraction(2) ** depth_limit)
    stack = [iv]
    inconclusive = None
    while stack:
        piece = stack.pop()
        cleared = False
        for d in derivs:
            lo, hi = P.evaluate_interval(d, piece)
            if lo >= c or hi <= -c:
                cleared = True
                break
        if cleared:
            continue
        if piece[1] - piece[0] <= min_width:
            mid = (piece[0] + piece[1]) / 2
            vals = [abs(P.evaluate(d, mid)) for d in derivs]
            if max(vals) < c:
                return HypothesisResult("violated", (mid, mid))
            inconclusive = piece
            continue
        mid = (piece[0] + piece[1]) / 2
        stack.append((piece[0], mid))
        stack.append((mid, piece[1]))
    if inconclusive is not None:
        return HypothesisResult("inconclusive", inconclusive)
    return HypothesisResult("certified", None)


def certify_abs_above(F: P.Poly, pieces, rho: Fraction,
                      depth_limit: int = DEFAULT_DEPTH_LIMIT) -> bool:
    """Certify |F| >= rho on every piece; raises with a witness on failure."""
    for piece in pieces:
        min_width = max((piece[1] - piece[0]), Fraction(1)) / (Fraction(2) ** depth_limit)
        stack = [piece]
        while stack:
            pc = stack.pop()
            lo, hi = P.evaluate_interval(F, pc)
            if lo >= rho or hi <= -rho:
                continue
            mid = (pc[0] + pc[1]) / 2
            if pc[1] - pc[0] <= min_width:
                if abs(P.evaluate(F, mid)) < rho:
                    raise HypothesisViolationError(
                        "complement certification failed", witness=mid)
                raise InconclusiveError("certification hit the depth limit")
            stack.append((pc[0], mid))
            stack.append((mid, pc[1]))
    return True


# --------------------------------------------------------------------------
# the sublevel covering recursion
# --------------------------------------------------------------------------

@dataclass
class CoverReport:
    intervals: list[RatInterval]
    rho: Fraction
    c: Fraction
    k: int
    count: int
    max_length: Fraction
    length_bound: Fraction
    count_bound: int
    complement_certified: bool

    def contains(self, t) -> bool:
        for lo, hi in self.intervals:
            if _le_scalar(lo, t) and _le_scalar(t, hi):
                return True
        return False

    def total_length(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), Fraction(0))


def _le_scalar(a, b) -> bool:
    d = b - a
    if isinstance(d, AlgebraicNumber):
        return d.sign() >= 0
    return d >= 0


def _merge_intervals(ivs: list[RatInterval]) -> list[RatInterval]:
    ivs = sorted(ivs)
    out: list[RatInterval] = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def _complement(iv: RatInterval, cover: list[RatInterval]) -> list[RatInterval]:
    out = []
    cur = iv[0]
    for lo, hi in sorted(cover):
        if lo > cur:
            out.append((cur, min(lo, iv[1])))
        cur = max(cur, hi)
        if cur >= iv[1]:
            break
    if cur < iv[1]:
        out.append((cur, iv[1]))
    return [p for p in out if p[1] > p[0]]


def _active_pieces(F: P.Poly, iv: RatInterval, c: Fraction,
                   granularity: int = 10) -> list[RatInterval]:
    """Maximal subintervals not certified |F| > c (supersets of the true
    maximal intervals of F^{-1}[-c, c])."""
    pieces = [iv]
    min_width = (iv[1] - iv[0]) / (1 << granularity)
    keep: list[RatInterval] = []
    while pieces:
        pc = pieces.pop()
        lo, hi = P.evaluate_interval(F, pc)
        if lo > c or hi < -c:
            continue
        if pc[1] - pc[0] <= min_width:
            keep.append(pc)
            continue
        mid = (pc[0] + pc[1]) / 2
        pieces.append((pc[0], mid))
        pieces.append((mid, pc[1]))
    return _merge_intervals(keep)


def _monotone_band(F: P.Poly, piece: RatInterval, rho: Fraction,
                   slack: Fraction, depth_limit: int) -> RatInterval | None:
    """Conservative hull of {t in piece : |F(t)| <= rho}, F strictly
    monotone on the piece.

    Hull endpoints are certified strictly past +-rho (or are the piece's
    ends), so complement points satisfy |F| > rho; the hull exceeds the
    true band by at most 2*slack.
    """
    a, b = piece
    fa, fb = P.evaluate(F, a), P.evaluate(F, b)
    if fa <= fb:
        def g(x):
            return P.evaluate(F, x)
        ga, gb = fa, fb
    else:
        def g(x):
            return -P.evaluate(F, x)
        ga, gb = -fa, -fb
    # g is increasing on [a, b]; band = {x : -rho <= g(x) <= rho}
    if ga > rho or gb < -rho:
        return None
    if ga < -rho:
        u, v = a, b
        for _ in range(depth_limit):
            if v - u <= slack:
                break
            m = (u + v) / 2
            if g(m) < -rho:
                u = m
            else:
                v = m
        left = u
    else:
        left = a
    if gb > rho:
        u, v = a, b
        for _ in range(depth_limit):
            if v - u <= slack:
                break
            m = (u + v) / 2
            if g(m) > rho:
                v = m
            else:
                u = m
        right = v
    else:
        right = b
    if right < left:
        return None
    return (left, right)


def _cover_recursive(F: P.Poly, iv: RatInterval, rho: Fraction, c: Fraction,
                     k: int, depth_limit: int,
                     slack: Fraction) -> list[RatInterval]:
    """Cover of {t in iv : |F(t)| <= rho}; complement has |F| > rho.

    Soundness is unconditional; under the order-k hypothesis the pieces
    obey the documented count/length bounds.
    """
    if P.is_zero(F):
        return [iv]
    if k == 0:
        # direct subdivision: uncertified floor pieces join the cover
        min_width = (iv[1] - iv[0]) / (Fraction(2) ** depth_limit)
        out = []
        stack = [iv]
        while stack:
            pc = stack.pop()
            lo, hi = P.evaluate_interval(F, pc)
            if lo > rho or hi < -rho:
                continue
            if pc[1] - pc[0] <= min_width:
                out.append(pc)
                continue
            mid = (pc[0] + pc[1]) / 2
            stack.append((pc[0], mid))
            stack.append((mid, pc[1]))
        return _merge_intervals(out)
    out: list[RatInterval] = []
    rho_g = sqrt_upper(c * rho)
    for A in _active_pieces(F, iv, c):
        U = _cover_recursive(P.deriv(F), A, rho_g, c, k - 1, depth_limit,
                             slack)
        out.extend(U)
        for piece in _complement(A, U):
            band = _monotone_band(F, piece, rho, slack, depth_limit)
            if band is not None:
                out.append(band)
    return _merge_intervals(out)


# complement certification runs at rho*(1 - 2^-16): hull edges and discard
# pieces carry |F| > rho, so the margin against the reduced threshold is
# bounded below and interval subdivision terminates even at exact touches
_CERT_SHRINK = Fraction((1 << 16) - 1, 1 << 16)


def _definitely_above(F: P.Poly, piece: RatInterval, rho: Fraction,
                      max_splits: int = 256) -> bool:
    """Bounded-effort check that |F| > rho on the whole piece (refinement:
    cover pieces carrying no sublevel points may be dropped soundly)."""
    stack = [piece]
    splits = 0
    while stack:
        pc = stack.pop()
        lo, hi = P.evaluate_interval(F, pc)
        if lo > rho or hi < -rho:
            continue
        splits += 1
        if splits > max_splits:
            return False
        mid = (pc[0] + pc[1]) / 2
        stack.append((pc[0], mid))
        stack.append((mid, pc[1]))
    return True


def cover_sublevel(F, J, rho, c, k: int,
                   depth_limit: int = DEFAULT_DEPTH_LIMIT,
                   certify: bool = True) -> CoverReport:
    """Cover F^{-1}[-rho, rho] on J by the derivative-recursion construction.

    Requires 0 < rho < c/2^k.  Under the hypothesis (every point has some
    derivative order <= k with |F^(p)| >= c) the output satisfies the
    documented bounds: every interval has length <= 2 (rho/c)^(1/2^k) up
    to a 2^-10 relative bisection slack (folded into length_bound), and
    the count is at most count_bound, the explicit recurrence
    B_0 = 1, B_j = (2 M |J| / c + 1)(2 B_{j-1} + 1), with M an interval
    upper bound for max_{p<=k} sup |F^(p)|.  The complement certification
    pass independently verifies |F| >= rho*(1 - 2^-16) off the cover (the
    construction itself guarantees |F| > rho there).
    """
    F = P.poly(F)
    iv = (Fraction(J[0]), Fraction(J[1]))
    rho = Fraction(rho)
    c = Fraction(c)
    if not 0 < rho < c / (1 << k):
        raise ValueError("need 0 < rho < c/2^k")
    base_bound = 2 * root_pow_upper(rho / c, k)
    covers = _cover_recursive(F, iv, rho, c, k, depth_limit,
                              base_bound / 4096)
    covers = [(max(lo, iv[0]), min(hi, iv[1])) for lo, hi in covers]
    covers = [piece for piece in covers if piece[1] > piece[0]
              and not _definitely_above(F, piece, rho)]
    M = P.sup_norm_upper(F, iv, k)
    b = 1
    for _ in range(k):
        b = int(2 * M * (iv[1] - iv[0]) / c + 1) * (2 * b + 1)
    max_len = max((hi - lo for lo, hi in covers), default=Fraction(0))
    certified = False
    if certify:
        certified = certify_abs_above(F, _complement(iv, covers),
                                      rho * _CERT_SHRINK, depth_limit)
    length_bound = base_bound * Fraction(1025, 1024)
    return CoverReport(covers, rho, c, k, len(covers),
                       max_len, length_bound, b, certified)


# --------------------------------------------------------------------------
# exceptional parameter covers
# --------------------------------------------------------------------------

@dataclass
class ExceptionalCoverReport:
    eps: Fraction
    n: int
    k: int
    c: Fraction
    intervals: list[RatInterval]
    count: int
    max_length: Fraction
    boxdim_estimate: float | None
    pairs_covered: int
    complement_certified: bool
    transversality: str        # "certified" | "assumed"

    def contains(self, t) -> bool:
        for lo, hi in self.intervals:
            if _le_scalar(lo, t) and _le_scalar(t, hi):
                return True
        return False


def exceptional_cover(family: ParamFamily, eps, n: int, k: int, c,
                      budget: int = DEFAULT_BUDGET,
                      assume_transversal: bool = False,
                      depth_limit: int = DEFAULT_DEPTH_LIMIT,
                      certify: bool = True) -> ExceptionalCoverReport:
    """Cover of E_{eps,n} = union over distinct level-n pairs of
    {t : |Delta_{i,j}(t)| < eps^n}.

    Works through the reduced pairs: a pair with common prefix w reduces
    to its tail pair with the threshold inflated by 1/r_lo^{|w|}, where
    r_lo is a certified lower bound for the cylinder ratio, so the union
    of the reduced covers contains the true exceptional set.  When the
    inflated threshold leaves the covering recursion's range for some pair,
    the whole interval is emitted for that pair (degenerate but sound).

    The finite-scale box-dimension estimate log(count)/log(1/max_length)
    is a diagnostic only; no convergence claim is attached.
    """
    eps = Fraction(eps)
    c = Fraction(c)
    if not assume_transversal:
        rep = check_transversality(family, n, k, c, budget=budget,
                                   depth_limit=depth_limit)
        if rep.status != "certified":
            raise HypothesisViolationError(
                "transversality not certified for (k=%d, c=%s): %s"
                % (k, c, rep.status), witness=rep.witness)
    polys = reduced_pair_polys(family, n, budget)
    r_lo = family.r_min_lower()
    iv = family.interval
    pieces: list[RatInterval] = []
    rho_n = eps ** n
    trivially_clear: set[P.Poly] = set()
    for dpoly, (wi, wj, m) in polys.items():
        rho = rho_n / (r_lo ** (n - m))
        if P.is_zero(dpoly) or not rho < c / (1 << k):
            pieces.append(iv)
            continue
        # cheap pre-filter: most pairs are certifiably clear of the tiny
        # threshold on all of I and contribute nothing
        if _definitely_above(dpoly, iv, rho, max_splits=64):
            trivially_clear.add(dpoly)
            continue
        rep = cover_sublevel(dpoly, iv, rho, c, k, depth_limit, certify=False)
        pieces.extend(rep.intervals)
    merged = _merge_intervals(pieces)
    merged = [(max(lo, iv[0]), min(hi, iv[1])) for lo, hi in merged]
    merged = [p for p in merged if p[1] > p[0]]
    max_len = max((hi - lo for lo, hi in merged), default=Fraction(0))
    count = len(merged)
    if count and 0 < max_len < 1:
        est = math.log(count) / math.log(1.0 / float(max_len))
    else:
        est = None
    certified = False
    if certify and merged != [iv]:
        comp = _complement(iv, merged)
        certified = True
        for dpoly, (wi, wj, m) in polys.items():
            if dpoly in trivially_clear:
                continue  # certified >= rho on all of I already
            rho = rho_n / (r_lo ** (n - m))
            if not rho < c / (1 << k):
                continue
            certify_abs_above(dpoly, comp, rho * _CERT_SHRINK, depth_limit)
    return ExceptionalCoverReport(
        eps, n, k, c, merged, count, max_len, est, len(polys), certified,
        "assumed" if assume_transversal else "certified")


# --------------------------------------------------------------------------
# transversality checking
# --------------------------------------------------------------------------

@dataclass
class TransversalityReport:
    status: str                   # "certified" | "violated" | "inconclusive"
    n: int
    k: int
    c: Fraction
    pairs_checked: int
    witness: tuple | None         # (word_i, word_j, interval)


def check_transversality(family: ParamFamily, n: int, k: int, c,
                         budget: int = DEFAULT_BUDGET,
                         depth_limit: int = DEFAULT_DEPTH_LIMIT) -> TransversalityReport:
    """Certify order-k transversality at threshold c on the family interval.

    Reduced pairs only (first symbols differ, common prefixes removed via
    the Delta = r_w * Delta~ factorization); for each distinct reduced
    polynomial the certificate is: at every t some derivative order <= k
    has |Delta~^(p)(t)| >= c.  An identically-zero difference polynomial
    (duplicated symbols) is an immediate violation with itself as witness.
    """
    c = Fraction(c)
    polys = reduced_pair_polys(family, n, budget)
    worst_inconclusive = None
    for dpoly, (wi, wj, m) in polys.items():
        if P.is_zero(dpoly):
            return TransversalityReport("violated", n, k, c, len(polys),
                                        (wi, wj, family.interval))
        res = certify_some_derivative_clears(dpoly, family.interval, c, k,
                                             depth_limit)
        if res.status == "violated":
            return TransversalityReport("violated", n, k, c, len(polys),
                                        (wi, wj, res.witness))
        if res.status == "inconclusive":
            worst_inconclusive = (wi, wj, res.witness)
    if worst_inconclusive is not None:
        return TransversalityReport("inconclusive", n, k, c, len(polys),
                                    worst_inconclusive)
    return TransversalityReport("certified", n, k, c, len(polys), None)


# --------------------------------------------------------------------------
# Liouville-type separation floors
# --------------------------------------------------------------------------

def liouville_floor(values: Sequence, degree: int, height: int = 1) -> Fraction:
    """Lower bound for |x| over nonzero integer-coefficient polynomial
    expressions x of the given degree and coefficient height in `values`.

    Rationals contribute a common-denominator bound; at most one irrational
    algebraic (given by its minimal polynomial) is supported, bounded
    through the conjugate-product argument: multiplying x by
    (q * lead)^degree yields a nonzero algebraic integer whose norm is a
    nonzero rational integer, so |x| is at least the reciprocal of the
    product of conjugate magnitudes.  Conjugate magnitudes are bounded
    above by an inflated rational from float root-finding, which only
    lowers the returned floor (soundness is one-sided).
    """
    n = int(degree)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    rats: list[Fraction] = []
    algs: list[AlgebraicNumber] = []
    for v in values:
        if isinstance(v, AlgebraicNumber):
            algs.append(v)
        else:
            rats.append(Fraction(v))
    if len(algs) > 1:
        raise UnsupportedError("at most one irrational algebraic supported")
    q = 1
    for r in rats:
        q = math.lcm(q, r.denominator)
    if not algs:
        return Fraction(1, q ** n) if q > 1 or n > 0 else Fraction(1)
    alpha = algs[0]
    minpoly = alpha.field.minpoly
    d = alpha.field.degree
    lead = abs(minpoly[-1])
    import numpy as np

    roots = np.roots(list(reversed(minpoly)))
    rmax = float(np.max(np.abs(roots))) * lead  # conjugates of beta = lead*alpha
    beta_bar = _rational_upper(max(1.0, rmax) * (1.0 + 1e-9))
    u_bound = max([Fraction(q), Fraction(lead)] + [abs(r) * q for r in rats])
    height_eff = Fraction(height) * (u_bound ** (2 * n)) if u_bound > 1 \
        else Fraction(height)
    denom_scale = Fraction(q * lead) ** n
    conj_prod = ((n + 1) * height_eff * beta_bar ** n) ** (d - 1)
    return 1 / (denom_scale * conj_prod)


def _rational_upper(x: float) -> Fraction:
    return Fraction(math.ceil(x * (1 << 30)), 1 << 30)


# --------------------------------------------------------------------------
# near-root scans over {0,+-1} coefficient polynomials
# --------------------------------------------------------------------------

@dataclass
class NearRootRow:
    n: int
    min_abs: float
    min_abs_exact: object         # exact scalar, or 0
    min_nonzero_abs: float | None
    theta_n: float
    below_theta: bool
    zero_attained: bool


def near_root_scan(t, n_range, theta, budget: int = DEFAULT_BUDGET) -> list[NearRootRow]:
    """min |p(t)| over nonzero polynomials p with coefficients in {0,+-1}
    and degree <= n, for each n in n_range.

    Branch-and-bound on exact partial-sum enclosures: a prefix is pruned
    when its enclosure minus the maximal remaining tail cannot beat the
    incumbent.  Coefficients are assigned most-significant first (by |t|).
    Exact zeros (p(t) = 0) are detected exactly; the minimal nonzero value
    is also tracked for separation cross-checks.
    """
    theta_f = float(Fraction(theta)) if not isinstance(theta, float) else theta
    rows = []
    for n in n_range:
        min_abs_exact, min_nz = _near_root_min(t, n, budget)
        zero = _is_zero_scalar(min_abs_exact)
        mfloat = 0.0 if zero else float(min_abs_exact)
        th = theta_f ** n
        rows.append(NearRootRow(
            n, mfloat, min_abs_exact,
            None if min_nz is None else float(min_nz),
            th, mfloat < th, zero))
    return rows


def _is_zero_scalar(x) -> bool:
    return not isinstance(x, AlgebraicNumber) and x == 0


def _near_root_min(t, n: int, budget: int):
    # exact powers of t, and rational enclosures of them
    cur = Fraction(1)
    pows = [cur]
    for _ in range(n):
        cur = cur * t
        pows.append(cur)
    if isinstance(t, AlgebraicNumber):
        encl = [(_enc(p)) for p in pows]
    else:
        encl = [(Fraction(p), Fraction(p)) for p in pows]
    abs_up = [max(abs(lo), abs(hi)) for lo, hi in encl]
    # most-significant-first coefficient order
    order = sorted(range(n + 1), key=lambda i: abs_up[i], reverse=True)
    tail_after = [Fraction(0)] * (n + 2)
    for pos in range(n, -1, -1):
        tail_after[pos] = tail_after[pos + 1] + abs_up[order[pos]]

    best_abs = None          # exact scalar
    best_hi = None           # rational upper bound for |best|
    best_nonzero = None
    nodes = 0

    def leaf_value(coeffs):
        v = 0
        for pos, cv in enumerate(coeffs):
            if cv:
                v = v + cv * pows[order[pos]]
        return v

    stack = [((), (Fraction(0), Fraction(0)), False)]
    while stack:
        coeffs, part, nonzero = stack.pop()
        nodes += 1
        if nodes > budget:
            raise BudgetExceededError("near-root scan exceeded budget")
        pos = len(coeffs)
        lo, hi = part
        low_abs = lo if lo > 0 else (-hi if hi < 0 else Fraction(0))
        if best_hi is not None and low_abs - tail_after[pos] > best_hi:
            continue
        if pos == n + 1:
            if not nonzero:
                continue
            v = leaf_value(coeffs)
            av = abs(v) if not isinstance(v, AlgebraicNumber) else abs(v)
            if _is_zero_scalar(av):
                if best_abs is None or not _is_zero_scalar(best_abs):
                    best_abs, best_hi = av, Fraction(0)
                continue
            vhi = _abs_up_scalar(av)
            if best_abs is None or _lt_scalar(av, best_abs):
                best_abs, best_hi = av, vhi
            if best_nonzero is None or _lt_scalar(av, best_nonzero):
                best_nonzero = av
            continue
        e = encl[order[pos]]
        for cv in (0, 1, -1):
            if cv == 0:
                stack.append((coeffs + (0,), part, nonzero))
            elif cv == 1:
                stack.append((coeffs + (1,), (lo + e[0], hi + e[1]), True))
            else:
                stack.append((coeffs + (-1,), (lo - e[1], hi - e[0]), True))
    return best_abs, best_nonzero


def _enc(x) -> RatInterval:
    if isinstance(x, AlgebraicNumber):
        return x.enclosure(Fraction(1, 1 << 80))
    return (Fraction(x), Fraction(x))


def _abs_up_scalar(x) -> Fraction:
    if isinstance(x, AlgebraicNumber):
        return iv_abs_upper(x.enclosure(Fraction(1, 1 << 60)))
    return abs(Fraction(x))


def _lt_scalar(a, b) -> bool:
    d = a - b
    if isinstance(d, AlgebraicNumber):
        return d.sign() < 0
    return d < 0
