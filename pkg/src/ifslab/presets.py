"""Scenario presets: the standard systems and measures used throughout."""

from __future__ import annotations

from fractions import Fraction

from .exact import parse_scalar
from .families import ParamFamily
from .ifs import Ifs, SimilarityMap, rasterize_self_similar
from .measures import DyadicMeasure


def bernoulli_ifs(lam, probs=None) -> Ifs:
    """x -> lam*x - 1 and x -> lam*x + 1."""
    return Ifs([SimilarityMap(lam, Fraction(-1)),
                SimilarityMap(lam, Fraction(1))], probs)


def cantor_ifs() -> Ifs:
    return Ifs([SimilarityMap(Fraction(1, 3), Fraction(0)),
                SimilarityMap(Fraction(1, 3), Fraction(2, 3))])


def full_branch_ifs() -> Ifs:
    return Ifs([SimilarityMap(Fraction(1, 2), Fraction(0)),
                SimilarityMap(Fraction(1, 2), Fraction(1, 2))])


def gasket_ifs(t) -> Ifs:
    """x -> x/3, (x+1)/3, (x+t)/3: line projections of the plane gasket."""
    third = Fraction(1, 3)
    return Ifs([SimilarityMap(third, Fraction(0)),
                SimilarityMap(third, third),
                SimilarityMap(third, t * third)],
               [third] * 3)


def sinai_ifs(alpha) -> Ifs:
    """x -> (1-a)x - 1 and (1+a)x + 1, equal weights; contracts on average."""
    return Ifs([SimilarityMap(1 - alpha, Fraction(-1)),
                SimilarityMap(1 + alpha, Fraction(1))],
               contract_on_average=True)


def bernoulli_family(lo, hi) -> ParamFamily:
    """r(t) = t, translations -+1."""
    return ParamFamily((lo, hi), [([0, 1], [-1]), ([0, 1], [1])])


def gasket_family(lo, hi) -> ParamFamily:
    """Constant ratio 1/3; translations 0, 1/3, t/3."""
    third = Fraction(1, 3)
    return ParamFamily((lo, hi), [([third], [0]),
                                  ([third], [third]),
                                  ([third], [0, third])])


def sinai_family(lo, hi) -> ParamFamily:
    return ParamFamily((lo, hi), [([1, -1], [-1]), ([1, 1], [1])],
                       contract_on_average=True)


def lebesgue_measure(resolution: int) -> DyadicMeasure:
    n = 1 << resolution
    mass = Fraction(1, n)
    return DyadicMeasure(resolution, {k: mass for k in range(n)})


def point_mass(x, resolution: int) -> DyadicMeasure:
    from .exact import scalar_floor_scaled

    return DyadicMeasure(resolution, {scalar_floor_scaled(x, resolution): Fraction(1)})


def cantor_measure(resolution: int, **kw) -> DyadicMeasure:
    return rasterize_self_similar(cantor_ifs(), resolution, **kw).measure


def scenario_ifs(name: str, params: dict) -> Ifs:
    """Build a preset IFS from a scenario name and exact parameter strings."""
    if name == "bernoulli":
        return bernoulli_ifs(parse_scalar(params.get("lambda", "1/2")))
    if name == "cantor":
        return cantor_ifs()
    if name == "full_branch":
        return full_branch_ifs()
    if name == "gasket":
        return gasket_ifs(parse_scalar(params.get("t", "1")))
    if name == "sinai":
        return sinai_ifs(parse_scalar(params.get("alpha", "1/2")))
    raise ValueError("unknown IFS scenario %r" % name)


def scenario_measure(name: str, params: dict, resolution: int) -> DyadicMeasure:
    """Build a preset measure at the given resolution."""
    if name == "lebesgue":
        return lebesgue_measure(resolution)
    if name == "point":
        return point_mass(parse_scalar(params.get("x", "0")), resolution)
    if name == "cantor":
        return cantor_measure(resolution)
    if name in ("bernoulli", "gasket", "full_branch"):
        from .ifs import normalized_to_unit

        ifs = scenario_ifs(name, params)
        unit, _ = normalized_to_unit(ifs)
        return rasterize_self_similar(unit, resolution).measure
    raise ValueError("unknown measure scenario %r" % name)
