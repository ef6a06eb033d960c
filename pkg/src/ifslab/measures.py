"""Measures on the line at dyadic resolution: exact and float backends.

`DyadicMeasure` assigns positive mass to finitely many half-open cells
[k*2^-n, (k+1)*2^-n); the half-open convention puts boundary points in the
right-hand cell, making discretization deterministic.  `AtomicMeasure`
carries weighted point masses with exact (or float) coordinates, optionally
tagged by a contraction ratio; tagged atoms are never merged across tags.

Backend discipline: masses are either all Fractions ("exact") or all floats
("float").  Exact measures support certified entropy values (`LogSum`),
exact convolution (integer-count Kronecker multiplication), and exact
component recombination.  Entropies are base-2 throughout and 0*log 0
never arises because zero-mass cells are structurally absent.

Convolution convention: cells are represented by their left endpoints, so
convolving two resolution-n measures is index addition on the same grid.
This differs from convolving the underlying continuous measures by at most
one cell of displacement per factor (each point of a cell sits within
2^-n of the left endpoint), which shifts scale-n entropy by O(1) bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    BackendError,
    EmptyRestrictionError,
    NormalizationError,
    ResolutionError,
)
from .exact import (
    LogSum,
    dyadic_left,
    entropy_logsum,
    scalar_floor_scaled,
    scalar_is_exact,
)

_FLOAT_PROB_TOL = 1e-9
_FLOAT_DROP_REL = 1e-14  # float-backend convolution: drop relative dust


def _xlog2x(p: float) -> float:
    return p * math.log2(p) if p > 0.0 else 0.0


def _entropy_of_masses(masses: Iterable, total: float) -> float:
    return -math.fsum(_xlog2x(float(m) / total) for m in masses)


@dataclass(frozen=True)
class DyadicCellIndex:
    """The half-open cell [index*2^-level, (index+1)*2^-level)."""

    level: int
    index: int

    def left(self) -> Fraction:
        return dyadic_left(self.level, self.index)

    def right(self) -> Fraction:
        return dyadic_left(self.level, self.index + 1)


class DyadicMeasure:
    """Finite nonnegative mass assignment on the level-`resolution` cells.

    Parameters
    ----------
    resolution : int
        Dyadic level of the stored cells (may be negative: cells are then
        of width 2^|resolution|).
    cells : mapping int -> mass
        Mass per cell index; zero masses are dropped, negatives rejected.
    """

    __slots__ = ("resolution", "cells", "_total")

    def __init__(self, resolution: int, cells: Mapping[int, object]):
        filtered: dict[int, object] = {}
        exactness = None
        for k, m in cells.items():
            if isinstance(m, float):
                is_exact = False
                if m < 0.0:
                    raise ValueError("negative mass at cell %d" % k)
                if m == 0.0:
                    continue
            else:
                is_exact = True
                m = Fraction(m)
                if m < 0:
                    raise ValueError("negative mass at cell %d" % k)
                if m == 0:
                    continue
            if exactness is None:
                exactness = is_exact
            elif exactness != is_exact:
                raise BackendError("mixed exact/float masses in one measure")
            filtered[int(k)] = m
        if not filtered:
            raise ValueError("a DyadicMeasure must carry positive mass")
        self.resolution = int(resolution)
        self.cells = filtered
        self._total = None

    # -- basic properties ----------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return not isinstance(next(iter(self.cells.values())), float)

    @property
    def backend(self) -> str:
        return "exact" if self.is_exact else "float"

    @property
    def total_mass(self):
        if self._total is None:
            if self.is_exact:
                self._total = sum(self.cells.values(), Fraction(0))
            else:
                self._total = math.fsum(self.cells.values())
        return self._total

    def is_probability(self) -> bool:
        if self.is_exact:
            return self.total_mass == 1
        return abs(self.total_mass - 1.0) <= _FLOAT_PROB_TOL

    def require_probability(self) -> None:
        if not self.is_probability():
            raise NormalizationError(
                "operation requires a probability measure (total=%s)"
                % self.total_mass)

    def normalized(self) -> "DyadicMeasure":
        t = self.total_mass
        return DyadicMeasure(self.resolution,
                             {k: m / t for k, m in self.cells.items()})

    def support_bounds(self) -> tuple[Fraction, Fraction]:
        lo = min(self.cells)
        hi = max(self.cells) + 1
        return dyadic_left(self.resolution, lo), dyadic_left(self.resolution, hi)

    def __eq__(self, other):
        if not isinstance(other, DyadicMeasure):
            return NotImplemented
        return self.resolution == other.resolution and self.cells == other.cells

    def __repr__(self) -> str:
        return "DyadicMeasure(resolution=%d, %d cells, total=%s, %s)" % (
            self.resolution, len(self.cells), self.total_mass, self.backend)

    # -- coarsening / entropy --------------------------------------------------

    def coarsened(self, level: int) -> "DyadicMeasure":
        """Push mass down to the coarser level (level <= resolution)."""
        if level > self.resolution:
            raise ResolutionError("cannot refine: level %d > resolution %d"
                                  % (level, self.resolution))
        if level == self.resolution:
            return self
        shift = self.resolution - level
        out: dict[int, object] = {}
        zero = Fraction(0) if self.is_exact else 0.0
        for k, m in self.cells.items():
            kk = k >> shift
            out[kk] = out.get(kk, zero) + m
        return DyadicMeasure(level, out)

    def entropy(self, level: int | None = None) -> float:
        """H(mu, D_level) in bits; level defaults to the stored resolution.

        Coarsening only: level must not exceed the resolution (discretize
        first to identify the measure with its cell atoms).
        """
        self.require_probability()
        if level is None:
            level = self.resolution
        return _entropy_of_masses(self.coarsened(level).cells.values(),
                                  float(self.total_mass))

    def entropy_rate(self, level: int) -> float:
        """Normalized scale-`level` entropy H_level = H(mu, D_level)/level."""
        if level <= 0:
            raise ResolutionError("entropy rate needs a positive level")
        return self.entropy(level) / level

    def exact_entropy(self, level: int | None = None) -> LogSum:
        """H(mu, D_level) as an exact LogSum (exact backend only)."""
        if not self.is_exact:
            raise BackendError("exact_entropy requires the exact backend")
        self.require_probability()
        if level is None:
            level = self.resolution
        return entropy_logsum(self.coarsened(level).cells.values())

    def conditional_entropy(self, fine: int, coarse: int) -> float:
        """H(mu, D_fine | D_coarse) = H(mu, D_fine) - H(mu, D_coarse)."""
        if coarse > fine:
            raise ResolutionError("conditional entropy needs coarse <= fine")
        return self.entropy(fine) - self.entropy(coarse)

    def exact_conditional_entropy(self, fine: int, coarse: int) -> LogSum:
        if coarse > fine:
            raise ResolutionError("conditional entropy needs coarse <= fine")
        return self.exact_entropy(fine) - self.exact_entropy(coarse)

    # -- conditioning ----------------------------------------------------------

    def restrict_and_normalize(self, level: int, indices: Iterable[int]) -> "DyadicMeasure":
        """Conditional measure on the union of the given level-`level` cells."""
        if level > self.resolution:
            raise ResolutionError("restriction level exceeds resolution")
        shift = self.resolution - level
        wanted = set(int(i) for i in indices)
        kept = {k: m for k, m in self.cells.items() if (k >> shift) in wanted}
        if not kept:
            raise EmptyRestrictionError("restriction to a zero-mass cell range")
        out = DyadicMeasure(self.resolution, kept)
        return out.normalized()

    # -- components ------------------------------------------------------------

    def components(self, level: int, window: int) -> list["ComponentRecord"]:
        """All positive-mass level-`level` components, rescaled to `window` levels.

        The rescaled component of cell D is the restriction to D pushed
        through the homothety D -> [0,1) and normalized, truncated to
        resolution `window` (statistics only ever read components through
        H_window, so deeper detail is not retained).
        """
        if level + window > self.resolution:
            raise ResolutionError(
                "component window exceeds resolution: %d + %d > %d"
                % (level, window, self.resolution))
        self.require_probability()
        d = self.resolution - level
        zero = Fraction(0) if self.is_exact else 0.0
        groups: dict[int, dict[int, object]] = {}
        for k, m in self.cells.items():
            groups.setdefault(k >> d, {})[k] = m
        records = []
        for ck in sorted(groups):
            raw_cells = groups[ck]
            raw = DyadicMeasure(self.resolution, raw_cells)
            weight = raw.total_mass
            resc: dict[int, object] = {}
            base = ck << d
            for k, m in raw_cells.items():
                j = (k - base) >> (d - window)
                resc[j] = resc.get(j, zero) + m / weight
            records.append(ComponentRecord(
                level=level,
                cell=DyadicCellIndex(level, ck),
                weight=weight,
                raw=raw,
                rescaled=DyadicMeasure(window, resc),
            ))
        return records

    # -- moments ----------------------------------------------------------------

    def moments(self):
        """(mean, variance, third absolute moment), atoms at cell left endpoints."""
        self.require_probability()
        if self.is_exact:
            mean = Fraction(0)
            m2 = Fraction(0)
            rho = Fraction(0)
            for k, m in self.cells.items():
                x = dyadic_left(self.resolution, k)
                mean += m * x
                m2 += m * x * x
                rho += m * abs(x) ** 3
            return mean, m2 - mean * mean, rho
        sc = 2.0 ** -self.resolution
        mean = math.fsum(m * (k * sc) for k, m in self.cells.items())
        var = math.fsum(m * (k * sc - mean) ** 2 for k, m in self.cells.items())
        rho = math.fsum(m * abs(k * sc) ** 3 for k, m in self.cells.items())
        return mean, var, rho

    # -- discretization -----------------------------------------------------------

    def discretize(self, level: int) -> "AtomicMeasure":
        """sigma_level: one atom per level-`level` cell at the cell's grid point.

        Preserves entropy at `level`: H_level(mu) = H_level(sigma_level(mu)).
        For level >= resolution the measure is already identified with its
        atoms at cell left endpoints.
        """
        src = self.coarsened(level) if level <= self.resolution else self
        eff = min(level, self.resolution)
        atoms = []
        for k in sorted(src.cells):
            loc = dyadic_left(eff, k) if src.is_exact else k * 2.0 ** -eff
            atoms.append((loc, src.cells[k], None))
        return AtomicMeasure(atoms)

    # -- distances ----------------------------------------------------------------

    def tv_distance_exact(self, other: "DyadicMeasure") -> Fraction:
        if self.resolution != other.resolution:
            raise ResolutionError("TV distance needs equal resolutions")
        if not (self.is_exact and other.is_exact):
            raise BackendError("tv_distance_exact requires exact backends")
        keys = set(self.cells) | set(other.cells)
        z = Fraction(0)
        return sum((abs(self.cells.get(k, z) - other.cells.get(k, z))
                    for k in keys), Fraction(0)) / 2

    def tv_distance(self, other: "DyadicMeasure") -> float:
        """Half the l1 distance of mass vectors (= sup_A |mu(A)-nu(A)|)."""
        if self.resolution != other.resolution:
            raise ResolutionError("TV distance needs equal resolutions")
        keys = set(self.cells) | set(other.cells)
        return math.fsum(abs(float(self.cells.get(k, 0)) -
                             float(other.cells.get(k, 0))) for k in keys) / 2

    # -- convolution ----------------------------------------------------------------

    def convolve(self, other: "DyadicMeasure") -> "DyadicMeasure":
        """Cellwise sumset convolution at equal resolution (index addition)."""
        if self.resolution != other.resolution:
            raise ResolutionError("convolution needs equal resolutions")
        self.require_probability()
        other.require_probability()
        if self.is_exact and other.is_exact:
            return _convolve_exact(self, other)
        if self.is_exact or other.is_exact:
            raise BackendError("cannot convolve exact with float backend")
        return _convolve_float(self, other)


def _convolve_exact(a: DyadicMeasure, b: DyadicMeasure) -> DyadicMeasure:
    """Exact sparse convolution via integer counts and one big-int multiply."""
    ka = sorted(a.cells)
    kb = sorted(b.cells)
    la = math.lcm(*(m.denominator for m in a.cells.values()))
    lb = math.lcm(*(m.denominator for m in b.cells.values()))
    off_a, off_b = ka[0], kb[0]
    na = ka[-1] - off_a + 1
    nb = kb[-1] - off_b + 1
    if na * nb <= 1 << 22:
        ca = [0] * na
        for k, m in a.cells.items():
            ca[k - off_a] = m.numerator * (la // m.denominator)
        cb = [0] * nb
        for k, m in b.cells.items():
            cb[k - off_b] = m.numerator * (lb // m.denominator)
        prod = _int_poly_mul(ca, cb)
    else:
        # very sparse but wide supports: direct dict accumulation
        prod_d: dict[int, int] = {}
        for k1, m1 in a.cells.items():
            c1 = m1.numerator * (la // m1.denominator)
            for k2, m2 in b.cells.items():
                kk = (k1 - off_a) + (k2 - off_b)
                prod_d[kk] = prod_d.get(kk, 0) \
                    + c1 * m2.numerator * (lb // m2.denominator)
        prod = prod_d
    denom = la * lb
    items = prod.items() if isinstance(prod, dict) else enumerate(prod)
    out = {off_a + off_b + i: Fraction(c, denom) for i, c in items if c}
    result = DyadicMeasure(a.resolution, out)
    result._total = a.total_mass * b.total_mass
    return result


def _int_poly_mul(a: list[int], b: list[int]) -> list[int]:
    """Integer sequence convolution by Kronecker substitution (bigint mul)."""
    if not a or not b:
        return []
    bits = max(x.bit_length() for x in a) + max(x.bit_length() for x in b) \
        + min(len(a), len(b)).bit_length() + 1
    chunk = (bits + 7) // 8 * 8
    nbytes = chunk // 8
    A = int.from_bytes(b"".join(x.to_bytes(nbytes, "little") for x in a), "little")
    B = int.from_bytes(b"".join(x.to_bytes(nbytes, "little") for x in b), "little")
    P = A * B
    n_out = len(a) + len(b) - 1
    raw = P.to_bytes(n_out * nbytes + nbytes, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little")
            for i in range(n_out)]


def _convolve_float(a: DyadicMeasure, b: DyadicMeasure) -> DyadicMeasure:
    import numpy as np

    ka, kb = sorted(a.cells), sorted(b.cells)
    off_a, off_b = ka[0], kb[0]
    na = ka[-1] - off_a + 1
    nb = kb[-1] - off_b + 1
    va = np.zeros(na)
    for k, m in a.cells.items():
        va[k - off_a] = m
    vb = np.zeros(nb)
    for k, m in b.cells.items():
        vb[k - off_b] = m
    if na * nb <= 4_000_000:
        vc = np.convolve(va, vb)
    else:
        n = 1
        while n < na + nb - 1:
            n <<= 1
        vc = np.fft.irfft(np.fft.rfft(va, n) * np.fft.rfft(vb, n), n)[: na + nb - 1]
        np.maximum(vc, 0.0, out=vc)
    cut = vc.max() * _FLOAT_DROP_REL
    idx = np.nonzero(vc > cut)[0]
    out = {int(off_a + off_b + i): float(vc[i]) for i in idx}
    return DyadicMeasure(a.resolution, out)


@dataclass(frozen=True)
class ComponentRecord:
    """One level-i component: weight mu(D), raw restriction, rescaled window."""

    level: int
    cell: DyadicCellIndex
    weight: object
    raw: DyadicMeasure
    rescaled: DyadicMeasure


class AtomicMeasure:
    """Weighted point masses; atoms optionally tagged by a contraction ratio.

    Locations are Fractions, AlgebraicNumbers, or floats (uniform backend).
    `canonicalize` merges atoms at equal (location, tag) pairs exactly; the
    number of merges performed is kept on the result as `merged_atoms`
    (exact-overlap diagnostics read it).
    """

    __slots__ = ("atoms", "merged_atoms")

    def __init__(self, atoms: Sequence[tuple], merged_atoms: int = 0):
        norm = []
        for entry in atoms:
            loc, mass = entry[0], entry[1]
            tag = entry[2] if len(entry) > 2 else None
            if isinstance(mass, float):
                if mass <= 0.0:
                    continue
            else:
                mass = Fraction(mass)
                if mass <= 0:
                    continue
            norm.append((loc, mass, tag))
        if not norm:
            raise ValueError("an AtomicMeasure must carry positive mass")
        self.atoms = tuple(norm)
        self.merged_atoms = merged_atoms

    # -- basics ---------------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return all(scalar_is_exact(loc) and not isinstance(mass, float)
                   for loc, mass, _ in self.atoms)

    @property
    def backend(self) -> str:
        return "exact" if self.is_exact else "float"

    @property
    def tagged(self) -> bool:
        return any(tag is not None for _, _, tag in self.atoms)

    @property
    def total_mass(self):
        if self.is_exact:
            return sum((m for _, m, _ in self.atoms), Fraction(0))
        return math.fsum(float(m) for _, m, _ in self.atoms)

    def is_probability(self) -> bool:
        t = self.total_mass
        if isinstance(t, Fraction):
            return t == 1
        return abs(t - 1.0) <= _FLOAT_PROB_TOL

    def require_probability(self) -> None:
        if not self.is_probability():
            raise NormalizationError("operation requires a probability measure")

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return "AtomicMeasure(%d atoms, total=%s, %s%s)" % (
            len(self.atoms), self.total_mass, self.backend,
            ", tagged" if self.tagged else "")

    def canonicalize(self) -> "AtomicMeasure":
        """Merge equal (location, tag) atoms; exact equality on exact backend."""
        acc: dict = {}
        for loc, mass, tag in self.atoms:
            key = (loc, tag)
            if key in acc:
                acc[key] = acc[key] + mass
            else:
                acc[key] = mass
        merged = len(self.atoms) - len(acc)
        atoms = [(loc, m, tag) for (loc, tag), m in acc.items()]
        return AtomicMeasure(atoms, merged_atoms=merged)

    def support_bounds(self):
        locs = [loc for loc, _, _ in self.atoms]
        return min(locs), max(locs)

    # -- entropy ----------------------------------------------------------------

    def _cell_masses(self, level: int) -> dict:
        """Mass per (cell index, tag) at dyadic level `level`."""
        out: dict = {}
        for loc, mass, tag in self.atoms:
            key = (scalar_floor_scaled(loc, level), tag)
            out[key] = out.get(key, Fraction(0) if self.is_exact else 0.0) + mass
        return out

    def entropy(self, level: int) -> float:
        """H against D_level, or D_level x {tags} when atoms carry tags."""
        self.require_probability()
        return _entropy_of_masses(self._cell_masses(level).values(),
                                  float(self.total_mass))

    def entropy_rate(self, level: int) -> float:
        if level <= 0:
            raise ResolutionError("entropy rate needs a positive level")
        return self.entropy(level) / level

    def exact_entropy(self, level: int) -> LogSum:
        if not self.is_exact:
            raise BackendError("exact_entropy requires the exact backend")
        self.require_probability()
        return entropy_logsum(self._cell_masses(level).values())

    def discrete_entropy(self) -> float:
        """Entropy w.r.t. the partition into points (after canonicalize)."""
        canon = self.canonicalize()
        return _entropy_of_masses((m for _, m, _ in canon.atoms),
                                  float(canon.total_mass))

    def conditional_entropy(self, fine: int, coarse: int) -> float:
        if coarse > fine:
            raise ResolutionError("conditional entropy needs coarse <= fine")
        return self.entropy(fine) - self.entropy(coarse)

    # -- operations --------------------------------------------------------------

    def convolve(self, other: "AtomicMeasure") -> "AtomicMeasure":
        """Exact sumset of atoms with mass products, canonicalized (untagged)."""
        self.require_probability()
        other.require_probability()
        acc: dict = {}
        for l1, m1, _ in self.atoms:
            for l2, m2, _ in other.atoms:
                loc = l1 + l2
                if loc in acc:
                    acc[loc] = acc[loc] + m1 * m2
                else:
                    acc[loc] = m1 * m2
        return AtomicMeasure([(loc, m, None) for loc, m in acc.items()])

    def to_dyadic(self, resolution: int) -> DyadicMeasure:
        """Bin atoms into level-`resolution` cells (drops tags)."""
        out: dict[int, object] = {}
        zero = Fraction(0) if self.is_exact else 0.0
        for loc, mass, _ in self.atoms:
            k = scalar_floor_scaled(loc, resolution)
            out[k] = out.get(k, zero) + mass
        return DyadicMeasure(resolution, out)

    def moments(self):
        self.require_probability()
        if self.is_exact:
            # field arithmetic covers algebraic locations too
            mean = Fraction(0)
            m2 = Fraction(0)
            rho = Fraction(0)
            for x, m, _ in self.atoms:
                mean = mean + m * x
                m2 = m2 + m * x * x
                ax = abs(x)
                rho = rho + m * ax * ax * ax
            return mean, m2 - mean * mean, rho
        mean = math.fsum(float(m) * float(x) for x, m, _ in self.atoms)
        var = math.fsum(float(m) * (float(x) - mean) ** 2 for x, m, _ in self.atoms)
        rho = math.fsum(float(m) * abs(float(x)) ** 3 for x, m, _ in self.atoms)
        return mean, var, rho

    def tv_distance(self, other: "AtomicMeasure") -> float:
        a = self.canonicalize()
        b = other.canonicalize()
        keys = {(loc, tag) for loc, _, tag in a.atoms} | \
               {(loc, tag) for loc, _, tag in b.atoms}
        da = {(loc, tag): m for loc, m, tag in a.atoms}
        db = {(loc, tag): m for loc, m, tag in b.atoms}
        return math.fsum(abs(float(da.get(k, 0)) - float(db.get(k, 0)))
                         for k in keys) / 2


# --------------------------------------------------------------------------
# module-level operation surface (mirrors the measure_core contract)
# --------------------------------------------------------------------------

def entropy(mu, level: int) -> float:
    return mu.entropy(level)


def conditional_entropy(mu, fine: int, coarse: int) -> float:
    return mu.conditional_entropy(fine, coarse)


def convolve(mu, nu):
    """Convolution dispatcher; Atomic*Dyadic rasterizes the atomic factor."""
    if isinstance(mu, DyadicMeasure) and isinstance(nu, DyadicMeasure):
        return mu.convolve(nu)
    if isinstance(mu, AtomicMeasure) and isinstance(nu, AtomicMeasure):
        return mu.convolve(nu)
    if isinstance(mu, AtomicMeasure):
        return nu.convolve(mu.to_dyadic(nu.resolution))
    return mu.convolve(nu.to_dyadic(mu.resolution))


def components(mu: DyadicMeasure, level: int, window: int):
    return mu.components(level, window)


def moments(mu):
    return mu.moments()


def discretize(mu, level: int) -> AtomicMeasure:
    if isinstance(mu, AtomicMeasure):
        return mu.to_dyadic(level).discretize(level)
    return mu.discretize(level)


def tv_distance(mu, nu) -> float:
    return mu.tv_distance(nu)


def restrict_and_normalize(mu: DyadicMeasure, level: int, indices) -> DyadicMeasure:
    return mu.restrict_and_normalize(level, indices)


def self_convolve(mu, k: int):
    """k-fold convolution power of mu (k >= 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = mu
    for _ in range(k - 1):
        out = convolve(out, mu)
    return out
