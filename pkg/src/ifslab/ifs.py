"""Similarity IFSs: cylinder words, generation measures, exact overlap
distances, similarity dimensions, and rasterization of self-similar measures.

Maps are x -> r*x + a with 0 < |r| < 1 (or contract-on-average systems,
where only the mean log-ratio must be negative).  All cylinder data
(composed ratios, base points phi_w(0)) is computed in exact arithmetic on
the exact backend, which is what makes "Delta_n = 0" a decision rather
than a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    BackendError,
    BudgetExceededError,
    ResolutionError,
    UnsupportedError,
)
from .exact import (
    AlgebraicNumber,
    scalar_float,
    scalar_floor_scaled,
    scalar_is_exact,
    scalar_sign,
)
from .measures import AtomicMeasure, DyadicMeasure

DEFAULT_BUDGET = 1 << 24


@dataclass(frozen=True)
class SimilarityMap:
    """x -> ratio*x + translation."""

    ratio: object
    translation: object

    def __call__(self, x):
        return self.ratio * x + self.translation

    def compose(self, inner: "SimilarityMap") -> "SimilarityMap":
        return SimilarityMap(self.ratio * inner.ratio,
                             self.ratio * inner.translation + self.translation)

    def fixed_point(self):
        return self.translation / (1 - self.ratio)


class Ifs:
    """A finite list of similarity maps with a probability vector.

    At least two maps must be distinct.  Unless `contract_on_average` is
    set, every ratio must satisfy |r| < 1; with the flag, ratios may leave
    the unit disc provided prod |r_i|^{p_i} < 1 (checked exactly on exact
    backends where possible).
    """

    def __init__(self, maps: Sequence[SimilarityMap], probs: Sequence = None,
                 contract_on_average: bool = False):
        maps = tuple(maps)
        if len(maps) < 2:
            raise ValueError("an IFS needs at least two maps")
        if len({(m.ratio, m.translation) for m in maps}) < 2:
            raise ValueError("an IFS needs at least two distinct maps")
        if probs is None:
            probs = [Fraction(1, len(maps))] * len(maps)
        probs = tuple(probs)
        if len(probs) != len(maps):
            raise ValueError("probability vector length mismatch")
        if all(isinstance(p, (int, Fraction)) for p in probs):
            probs = tuple(Fraction(p) for p in probs)
            if sum(probs) != 1:
                raise ValueError("probabilities must sum to 1")
        elif abs(math.fsum(float(p) for p in probs) - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1")
        self.maps = maps
        self.probs = probs
        self.contract_on_average = bool(contract_on_average)
        self._validate_contraction()

    def _validate_contraction(self) -> None:
        if not self.contract_on_average:
            for m in self.maps:
                r = m.ratio
                if scalar_is_exact(r):
                    if scalar_sign(r) == 0 or not (abs_lt_one(r)):
                        raise ValueError("ratio %r not strictly inside (-1,1)\\{0}" % (r,))
                else:
                    if not (0.0 < abs(float(r)) < 1.0):
                        raise ValueError("ratio %r not strictly inside (-1,1)\\{0}" % (r,))
            return
        # average contraction: sum p_i log |r_i| < 0
        if all(isinstance(m.ratio, Fraction) and isinstance(p, Fraction)
               for m, p in zip(self.maps, self.probs)):
            den = math.lcm(*(p.denominator for p in self.probs))
            prod_num = Fraction(1)
            for m, p in zip(self.maps, self.probs):
                prod_num *= abs(m.ratio) ** int(p * den)
            if prod_num >= 1:
                raise ValueError("system does not contract on average")
        else:
            if math.fsum(float(p) * math.log(abs(float(m.ratio)))
                         for m, p in zip(self.maps, self.probs)) >= 0:
                raise ValueError("system does not contract on average")

    @property
    def symbols(self) -> range:
        return range(len(self.maps))

    @property
    def is_exact(self) -> bool:
        return all(scalar_is_exact(m.ratio) and scalar_is_exact(m.translation)
                   for m in self.maps)

    def uniform_ratio(self):
        """The common ratio if all maps share one, else None (exact equality)."""
        r0 = self.maps[0].ratio
        for m in self.maps[1:]:
            if isinstance(r0, float) or isinstance(m.ratio, float):
                if float(m.ratio) != float(r0):
                    return None
            elif m.ratio != r0:
                return None
        return r0

    def r_max_abs(self) -> float:
        return max(abs(float(m.ratio)) for m in self.maps)

    def r_min_abs(self) -> float:
        return min(abs(float(m.ratio)) for m in self.maps)

    def mean_log2_ratio(self) -> float:
        """sum p_i log2 |r_i|  (negative for contracting systems)."""
        return math.fsum(float(p) * math.log2(abs(float(m.ratio)))
                         for m, p in zip(self.maps, self.probs))

    def __repr__(self) -> str:
        return "Ifs(%d maps%s)" % (len(self.maps),
                                   ", contract-on-average" if self.contract_on_average else "")


def abs_lt_one(r) -> bool:
    if isinstance(r, (int, Fraction)):
        return -1 < r < 1
    if isinstance(r, AlgebraicNumber):
        return (r - 1).sign() < 0 and (r + 1).sign() > 0
    return abs(float(r)) < 1


@dataclass(frozen=True)
class CylinderWord:
    """A finite word over the alphabet with its composed map and base point."""

    symbols: tuple[int, ...]
    ratio: object
    translation: object

    @property
    def base_point(self):
        """phi_w(0) = composed translation part."""
        return self.translation

    def __len__(self) -> int:
        return len(self.symbols)


def compose(ifs: Ifs, word: Sequence[int]) -> CylinderWord:
    """Compose phi_{w_1} o ... o phi_{w_n}; exact on exact backends."""
    if not word:
        raise ValueError("compose needs a nonempty word")
    r = None
    a = None
    for s in reversed(word):
        m = ifs.maps[s]
        if r is None:
            r, a = m.ratio, m.translation
        else:
            a = m.ratio * a + m.translation
            r = m.ratio * r
    return CylinderWord(tuple(word), r, a)


def _iter_words(ifs: Ifs, n: int, budget: int):
    """Depth-first enumeration of (symbols, ratio, base) over Lambda^n.

    Maintains partial compositions so each leaf costs O(1) map applications:
    extending word w by symbol s gives phi_{ws} = phi_w o phi_s, i.e.
    ratio_w*r_s and phi_w(a_s).
    """
    total = len(ifs.maps) ** n
    if total > budget:
        raise BudgetExceededError(
            "|Lambda|^n = %d exceeds budget %d" % (total, budget))
    one = Fraction(1) if ifs.is_exact else 1.0
    zero = Fraction(0) if ifs.is_exact else 0.0
    stack = [((), one, zero)]
    while stack:
        syms, r, a = stack.pop()
        if len(syms) == n:
            yield syms, r, a
            continue
        # push in reverse so symbol order is lexicographic on yield
        for s in reversed(ifs.symbols):
            m = ifs.maps[s]
            stack.append((syms + (s,), r * m.ratio, r * m.translation + a))


def generation_measure(ifs: Ifs, n: int, budget: int = DEFAULT_BUDGET) -> AtomicMeasure:
    """nu^(n) = sum_{w in Lambda^n} p_w delta_{phi_w(0)}, canonicalized.

    The number of atom merges (exact coincidences phi_w(0) = phi_v(0)) is
    recorded on the result as `merged_atoms`.
    """
    if n < 1:
        raise ValueError("generation level n must be >= 1")
    atoms = []
    for syms, _r, base in _iter_words(ifs, n, budget):
        p = ifs.probs[syms[0]]
        for s in syms[1:]:
            p = p * ifs.probs[s]
        atoms.append((base, p, None))
    return AtomicMeasure(atoms).canonicalize()


def tagged_generation_measure(ifs: Ifs, n: int,
                              budget: int = DEFAULT_BUDGET) -> AtomicMeasure:
    """nu~^(n): atoms tagged by their exact composed ratio; distinct tags
    never merge, so entropy groups by (dyadic cell, ratio)."""
    if n < 1:
        raise ValueError("generation level n must be >= 1")
    atoms = []
    for syms, r, base in _iter_words(ifs, n, budget):
        p = ifs.probs[syms[0]]
        for s in syms[1:]:
            p = p * ifs.probs[s]
        atoms.append((base, p, r))
    return AtomicMeasure(atoms).canonicalize()


@dataclass
class OverlapReport:
    """Delta_n with the minimizing cylinder pair.

    delta is None when no two distinct words share a composed ratio (the
    min over an empty pair set, i.e. +infinity).  log_rate is
    -(1/n) log2 Delta_n: float, math.inf for an exact overlap, None when
    delta is None.
    """

    n: int
    delta: object
    minimizing_pair: tuple[tuple[int, ...], tuple[int, ...]] | None
    exact_overlap: bool
    log_rate: float | None
    ratio_groups: int = 0
    words: int = 0

    def delta_float(self) -> float | None:
        if self.delta is None:
            return None
        return scalar_float(self.delta)


def delta_n(ifs: Ifs, n: int, budget: int = DEFAULT_BUDGET) -> OverlapReport:
    """Minimal distance between distinct level-n cylinders of equal ratio.

    Groups words by exact composed ratio; within a group the minimum of
    |phi_w(0) - phi_v(0)| over pairs is attained by consecutive base points
    in sorted order, so each group costs a sort plus one adjacent scan.
    Exact zero (phi_w = phi_v) is certified, never rounded.
    """
    if not ifs.is_exact:
        raise BackendError("delta_n requires the exact backend "
                           "(float ratios cannot certify a zero)")
    groups: dict = {}
    count = 0
    for syms, r, base in _iter_words(ifs, n, budget):
        groups.setdefault(r, []).append((base, syms))
        count += 1
    best = None
    best_pair = None
    multi = 0
    for r, entries in groups.items():
        if len(entries) < 2:
            continue
        multi += 1
        entries.sort(key=lambda e: _SortKey(e[0]))
        for (x1, w1), (x2, w2) in zip(entries, entries[1:]):
            gap = x2 - x1
            if isinstance(gap, AlgebraicNumber):
                g = abs(gap)
            else:
                g = abs(gap)
            if best is None or _scalar_lt(g, best):
                best, best_pair = g, (w1, w2)
                if _scalar_is_zero(best):
                    break
    if best is None:
        return OverlapReport(n, None, None, False, None, multi, count)
    exact = _scalar_is_zero(best)
    if exact:
        rate = math.inf
    else:
        rate = -math.log2(scalar_float(best)) / n
    return OverlapReport(n, best, best_pair, exact, rate, multi, count)


class _SortKey:
    """Total-order adapter so Fractions and AlgebraicNumbers sort together."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return _scalar_lt(self.v, other.v)


def _scalar_lt(a, b) -> bool:
    if isinstance(a, AlgebraicNumber) or isinstance(b, AlgebraicNumber):
        d = a - b
        if isinstance(d, Fraction):
            return d < 0
        return d.sign() < 0
    return a < b


def _scalar_is_zero(x) -> bool:
    if isinstance(x, AlgebraicNumber):
        return False  # rational values are demoted; instances are irrational
    return x == 0


def sdim_set(ifs: Ifs, tol: float = 1e-12) -> float:
    """Unique s >= 0 with sum |r_i|^s = 1, by bisection (strictly monotone)."""
    if ifs.contract_on_average:
        raise UnsupportedError("sdim_set undefined for contract-on-average systems")
    rs = [abs(float(m.ratio)) for m in ifs.maps]

    def f(s: float) -> float:
        return math.fsum(r ** s for r in rs) - 1.0

    lo, hi = 0.0, 1.0
    while f(hi) > 0.0:
        hi *= 2.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if hi - lo <= tol:
            break
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def sdim_measure(ifs: Ifs) -> float:
    """sum p_i log p_i / sum p_i log r_i (valid for contract-on-average too)."""
    num = math.fsum(float(p) * math.log2(float(p))
                    for p in ifs.probs if float(p) > 0)
    den = math.fsum(float(p) * math.log2(abs(float(m.ratio)))
                    for m, p in zip(ifs.maps, ifs.probs) if float(p) > 0)
    if den >= 0:
        raise UnsupportedError("system does not contract on average")
    return num / den


def natural_measure_ifs(ifs: Ifs) -> Ifs:
    """Same maps with p_i = |r_i|^{sdim X}: the measure whose similarity
    dimension matches the attractor's."""
    s = sdim_set(ifs)
    ps = [abs(float(m.ratio)) ** s for m in ifs.maps]
    t = math.fsum(ps)
    return Ifs(ifs.maps, [p / t for p in ps])


def translate_to_attractor(ifs: Ifs):
    """Conjugate by the translation sending the fixed point of map 0 to 0.

    Returns (conjugated ifs, offset, (lo, hi) attractor bounding interval).
    Delta_n is invariant under this conjugation.
    """
    if ifs.contract_on_average:
        raise UnsupportedError("translate_to_attractor needs a contracting system")
    x0 = ifs.maps[0].fixed_point()
    new_maps = []
    for m in ifs.maps:
        # psi(x) = phi(x + x0) - x0
        new_maps.append(SimilarityMap(m.ratio, m.translation + x0 * (m.ratio - 1)))
    out = Ifs(new_maps, ifs.probs)
    bound = attractor_bound(out)
    return out, x0, bound


def attractor_bound(ifs: Ifs) -> tuple[float, float]:
    """Interval certainly containing the attractor: |x| <= max|a|/(1-rmax),
    sharpened per side via one application of the maps."""
    rmax = ifs.r_max_abs()
    amax = max(abs(float(m.translation)) for m in ifs.maps)
    radius = amax / (1.0 - rmax)
    lo, hi = -radius, radius
    for _ in range(64):
        nlo = min(float(m.ratio) * (lo if float(m.ratio) > 0 else hi)
                  + float(m.translation) for m in ifs.maps)
        nhi = max(float(m.ratio) * (hi if float(m.ratio) > 0 else lo)
                  + float(m.translation) for m in ifs.maps)
        if nlo <= lo and nhi >= hi:
            break
        lo, hi = max(lo, nlo), min(hi, nhi)
    return lo, hi


def normalized_to_unit(ifs: Ifs):
    """Affinely conjugate so the attractor lies inside [0, 1].

    Returns (ifs', (offset, span)) with x' = (x - offset)/span mapping the
    bounding interval into the unit interval.  Conjugation by S(x) =
    (x-o)/s turns x -> r x + a into x -> r x + (a + o(r-1))/s, preserving
    ratios.  Exact when the input is exact (rational offset/span derived
    from a rational bounding box).
    """
    if ifs.is_exact and all(isinstance(m.ratio, Fraction)
                            and isinstance(m.translation, Fraction)
                            for m in ifs.maps):
        rmax_num = max((abs(m.ratio) for m in ifs.maps))
        amax = max((abs(m.translation) for m in ifs.maps))
        radius = amax / (1 - rmax_num)
        offset, span = -radius, 2 * radius
    else:
        lo, hi = attractor_bound(ifs)
        offset, span = lo, hi - lo
        if span <= 0:
            span = 1.0
    new_maps = [SimilarityMap(m.ratio,
                              (m.translation + offset * (m.ratio - 1)) / span)
                for m in ifs.maps]
    return Ifs(new_maps, ifs.probs), (offset, span)


# --------------------------------------------------------------------------
# rasterization
# --------------------------------------------------------------------------

@dataclass
class RasterReport:
    measure: DyadicMeasure
    depth: int
    boundary_mass: float
    method: str


def rasterize_self_similar(ifs: Ifs, resolution: int, extra_depth: int = 2,
                           budget: int = DEFAULT_BUDGET,
                           backend: str = "auto") -> RasterReport:
    """Discretize the self-similar measure at the given dyadic resolution.

    Requires the attractor inside [0, 1] (use `normalized_to_unit` first).
    Iterates mu_{k+1} = sum p_i phi_i(mu_k) from delta at the fixed point of
    map 0, to a depth at which every cylinder has diameter < 2^-resolution,
    plus `extra_depth` guard iterations.  Per-cell mass error is bounded by
    the mass within one cylinder diameter of cell boundaries, which is
    estimated and reported as `boundary_mass` rather than silently dropped.
    """
    if ifs.contract_on_average:
        raise UnsupportedError("rasterize needs a uniformly contracting system")
    lo, hi = attractor_bound(ifs)
    if lo < -1e-9 or hi > 1.0 + 1e-9:
        raise ValueError("attractor bound [%g, %g] not inside [0,1]; "
                         "normalize first" % (lo, hi))
    rmax = ifs.r_max_abs()
    depth = math.ceil(resolution / math.log2(1.0 / rmax)) + extra_depth
    n_leaves = len(ifs.maps) ** depth
    if backend == "auto":
        backend = "exact" if (ifs.is_exact and n_leaves <= budget
                              and n_leaves <= 1 << 19) else "float"
    if backend == "exact":
        return _rasterize_exact(ifs, resolution, depth, budget)
    return _rasterize_float(ifs, resolution, depth)


def _rasterize_exact(ifs: Ifs, resolution: int, depth: int, budget: int) -> RasterReport:
    cells: dict[int, Fraction] = {}

    def _abs_upper(r) -> Fraction:
        if isinstance(r, AlgebraicNumber):
            lo, hi = abs(r).enclosure(Fraction(1, 1 << 30))
            return hi
        return abs(Fraction(r))

    # cylinder diameter bound: rmax^depth * span, span <= 1
    rmax = max(_abs_upper(m.ratio) for m in ifs.maps)
    diam = rmax ** depth
    width = Fraction(1, 2 ** resolution)
    boundary = Fraction(0)
    for syms, _r, base in _iter_words(ifs, depth, budget):
        p = ifs.probs[syms[0]]
        for s in syms[1:]:
            p = p * ifs.probs[s]
        k = scalar_floor_scaled(base, resolution)
        cells[k] = cells.get(k, Fraction(0)) + p
        frac_part = base - Fraction(k) * width
        if frac_part < diam or frac_part > width - diam:
            boundary += p
    return RasterReport(DyadicMeasure(resolution, cells), depth,
                        float(boundary), "exact")


def _rasterize_float(ifs: Ifs, resolution: int, depth: int) -> RasterReport:
    import numpy as np

    n = 1 << resolution
    mass = np.zeros(n + 1)
    x0 = float(ifs.maps[0].fixed_point())
    start = min(n - 1, max(0, int(math.floor(x0 * n))))
    mass[start] = 1.0
    rs = [float(m.ratio) for m in ifs.maps]
    as_ = [float(m.translation) for m in ifs.maps]
    ps = [float(p) for p in ifs.probs]
    idx = np.arange(n + 1, dtype=np.float64)
    boundary = 0.0
    for it in range(depth):
        new = np.zeros(n + 1)
        for r, a, p in zip(rs, as_, ps):
            t = np.floor(r * idx + a * n).astype(np.int64)
            np.clip(t, 0, n, out=t)
            np.add.at(new, t, p * mass)
            if it == depth - 1:
                t2 = np.floor(r * (idx + 1) + a * n - 1e-12).astype(np.int64)
                straddle = t2 != t
                boundary += p * float(mass[straddle].sum())
        mass = new
    mass[n - 1] += mass[n]  # right-edge point mass (x = 1) folded back
    mass = mass[:n]
    nz = np.nonzero(mass > 0.0)[0]
    cells = {int(k): float(mass[k]) for k in nz}
    return RasterReport(DyadicMeasure(resolution, cells), depth, boundary, "float")


# --------------------------------------------------------------------------
# stopping sections (non-uniform ratios)
# --------------------------------------------------------------------------

def stopping_section(ifs: Ifs, n: int, budget: int = DEFAULT_BUDGET) -> list[CylinderWord]:
    """The section Lambda^(n): words w with |r_w| <= rbar^n < |r_parent|,
    rbar = prod |r_i|^{p_i}.

    Prefix-free, hits every infinite word exactly once, and all composed
    ratios lie within a factor min_i |r_i| of each other (verified).  The
    non-strict convention (<= on the word, < on the parent) makes the
    uniform-ratio case come out as exactly Lambda^n.
    """
    if not ifs.is_exact:
        raise BackendError("stopping_section requires the exact backend")
    rats = [abs(Fraction(m.ratio)) if isinstance(m.ratio, Fraction) else None
            for m in ifs.maps]
    if any(r is None for r in rats):
        raise BackendError("stopping_section currently needs rational ratios")
    # rbar^n as an exact threshold: rbar = prod r_i^{p_i}; compare via powers:
    # |r_w| <= rbar^n  <=>  |r_w|^D <= prod r_i^{n p_i D}  with D = lcm denom.
    D = math.lcm(*(p.denominator for p in ifs.probs))
    rhs = Fraction(1)
    for r, p in zip(rats, ifs.probs):
        rhs *= r ** int(n * p * D)

    def below(rw: Fraction) -> bool:
        return rw ** D <= rhs

    out: list[CylinderWord] = []
    count = 0
    stack = [((), Fraction(1), Fraction(0), Fraction(1))]  # syms, r, a, |r|
    while stack:
        syms, r, a, rabs = stack.pop()
        if syms and below(rabs):
            out.append(CylinderWord(syms, r, a))
            continue
        count += len(ifs.maps)
        if count > budget:
            raise BudgetExceededError("stopping section exceeded budget %d" % budget)
        for s in reversed(ifs.symbols):
            m = ifs.maps[s]
            stack.append((syms + (s,), r * m.ratio,
                          r * m.translation + a, rabs * abs(Fraction(m.ratio))))
    out.sort(key=lambda w: w.symbols)
    rmin = min(rats)
    vals = [abs(Fraction(w.ratio)) for w in out]
    top, bot = max(vals), min(vals)
    if bot < top * rmin:
        raise AssertionError("section ratio spread exceeds min ratio factor")
    return out


# --------------------------------------------------------------------------
# cylinder-vs-component total variation
# --------------------------------------------------------------------------

@dataclass
class CylinderTvReport:
    level: int
    depth: int
    resolution: int
    rows: list  # (cell index, weight, tv)

    def mass_weighted_fraction_below(self, eps: float) -> float:
        tot = math.fsum(w for _, w, _ in self.rows)
        good = math.fsum(w for _, w, tv in self.rows if tv < eps)
        return good / tot if tot > 0 else 1.0

    def max_tv(self) -> float:
        return max(tv for _, _, tv in self.rows)


def cylinder_component_tv(ifs: Ifs, resolution: int, level: int, depth: int,
                          budget: int = DEFAULT_BUDGET) -> CylinderTvReport:
    """Per-cell TV distance between raw components and cylinder-selected
    approximations.

    The cylinder-selected measure of a level-`level` cell D keeps, in their
    entirety, exactly those depth-`depth` cylinders whose base point
    phi_w(0) lies in D (reference point 0).  Both sides are realized at the
    given dyadic resolution from one exact atom enumeration; TV is measured
    directly (no effective modulus-of-continuity claim is made).
    """
    if ifs.contract_on_average:
        raise UnsupportedError("needs a uniformly contracting system")
    rmax = ifs.r_max_abs()
    leaf_depth = max(depth, math.ceil(resolution / math.log2(1.0 / rmax)) + 1)
    if len(ifs.maps) ** leaf_depth > budget:
        raise BudgetExceededError("cylinder TV enumeration exceeds budget")
    if level > resolution:
        raise ResolutionError("level exceeds resolution")

    full: dict[int, float] = {}
    per_prefix_cell: dict[tuple[int, ...], int] = {}
    per_prefix_mass: dict[tuple[int, ...], dict[int, float]] = {}
    for syms, _r, base in _iter_words(ifs, leaf_depth, budget):
        p = 1.0
        for s in syms:
            p *= float(ifs.probs[s])
        k = scalar_floor_scaled(base, resolution)
        full[k] = full.get(k, 0.0) + p
        pref = syms[:depth]
        d = per_prefix_mass.setdefault(pref, {})
        d[k] = d.get(k, 0.0) + p
    for pref in per_prefix_mass:
        w = compose(ifs, pref)
        per_prefix_cell[pref] = scalar_floor_scaled(w.base_point, level)

    shift = resolution - level
    by_cell: dict[int, dict[int, float]] = {}
    for k, m in full.items():
        by_cell.setdefault(k >> shift, {})[k] = m
    rows = []
    for ck in sorted(by_cell):
        comp = by_cell[ck]
        wsum = math.fsum(comp.values())
        sel: dict[int, float] = {}
        for pref, cell in per_prefix_cell.items():
            if cell != ck:
                continue
            for k, m in per_prefix_mass[pref].items():
                sel[k] = sel.get(k, 0.0) + m
        if not sel:
            rows.append((ck, wsum, 1.0))
            continue
        ssum = math.fsum(sel.values())
        keys = set(comp) | set(sel)
        tv = math.fsum(abs(comp.get(k, 0.0) / wsum - sel.get(k, 0.0) / ssum)
                       for k in keys) / 2
        rows.append((ck, wsum, tv))
    return CylinderTvReport(level, depth, resolution, rows)
