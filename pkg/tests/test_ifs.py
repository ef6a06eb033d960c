import itertools
import math
from fractions import Fraction as F

import pytest

from ifslab.errors import BackendError, BudgetExceededError, UnsupportedError
from ifslab.exact import NumberField
from ifslab.families import liouville_floor
from ifslab.ifs import (
    Ifs,
    SimilarityMap,
    attractor_bound,
    compose,
    cylinder_component_tv,
    delta_n,
    generation_measure,
    normalized_to_unit,
    rasterize_self_similar,
    sdim_measure,
    sdim_set,
    stopping_section,
    tagged_generation_measure,
    translate_to_attractor,
)
from ifslab.presets import (
    bernoulli_ifs,
    cantor_ifs,
    full_branch_ifs,
    gasket_ifs,
    sinai_ifs,
)

LOG23 = math.log(2) / math.log(3)


def golden():
    return NumberField([-1, 1, 1], (F(1, 2), F(7, 10))).generator()


def brute_force_delta(ifs: Ifs, n: int):
    """Independent oracle: min over all distinct same-ratio pairs."""
    words = list(itertools.product(ifs.symbols, repeat=n))
    data = [(compose(ifs, w).ratio, compose(ifs, w).base_point, w)
            for w in words]
    best = None
    for i in range(len(data)):
        for j in range(i + 1, len(data)):
            if data[i][0] != data[j][0]:
                continue
            gap = abs(data[i][1] - data[j][1])
            if best is None or gap < best:
                best = gap
    return best


class TestCompose:
    def test_bernoulli_plus_plus(self):
        b = bernoulli_ifs(F(1, 2))
        w = compose(b, (1, 1))
        assert w.base_point == F(3, 2)

    def test_single_symbol(self):
        b = bernoulli_ifs(F(1, 3))
        w = compose(b, (0,))
        assert (w.ratio, w.translation) == (F(1, 3), F(-1))

    def test_base_point_formula(self):
        # phi_w(0) = sum_k w_k lam^{k-1} with w_k = +-1, by induction
        lam = F(2, 5)
        b = bernoulli_ifs(lam)
        for n in range(1, 11):
            for _ in range(3):
                import random

                w = tuple(random.Random(n).choices((0, 1), k=n))
                signs = [1 if s == 1 else -1 for s in w]
                expected = sum(signs[k] * lam ** k for k in range(n))
                assert compose(b, w).base_point == expected

    def test_composition_homomorphism(self):
        g = gasket_ifs(F(3, 4))
        wi, wj = (0, 2, 1), (2, 1)
        a = compose(g, wi + wj)
        left = compose(g, wi)
        right = compose(g, wj)
        assert a.ratio == left.ratio * right.ratio
        assert a.base_point == left.ratio * right.base_point + left.base_point


class TestGenerationMeasure:
    def test_bernoulli_half_n2(self):
        nu = generation_measure(bernoulli_ifs(F(1, 2)), 2)
        assert {(loc, m) for loc, m, _ in nu.atoms} == {
            (F(-3, 2), F(1, 4)), (F(-1, 2), F(1, 4)),
            (F(1, 2), F(1, 4)), (F(3, 2), F(1, 4))}

    def test_n1_atoms_at_translations(self):
        g = gasket_ifs(F(5, 7))
        nu = generation_measure(g, 1)
        assert {loc for loc, _, _ in nu.atoms} == {F(0), F(1, 3), F(5, 21)}

    def test_mass_conservation_after_merge(self):
        lam = golden()
        nu = generation_measure(bernoulli_ifs(lam), 4)
        assert nu.total_mass == 1
        assert nu.merged_atoms > 0  # exact overlaps merge atoms

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            generation_measure(cantor_ifs(), 30, budget=1000)

    def test_weak_convergence_proxy_cantor(self):
        # H_{n'}(nu^(n)) close to H_{n'} of the rasterized measure at n=12
        n = 12
        nprime = math.floor(n * math.log2(3))
        nu = generation_measure(cantor_ifs(), n)
        raster = rasterize_self_similar(cantor_ifs(), nprime).measure
        a = nu.entropy(nprime) / nprime
        b = raster.entropy_rate(nprime)
        assert abs(a - b) < 0.05


class TestTaggedGeneration:
    def test_uniform_ratio_tags_coincide(self):
        nu = generation_measure(cantor_ifs(), 5)
        nut = tagged_generation_measure(cantor_ifs(), 5)
        for level in (3, 7):
            assert abs(nu.entropy(level) - nut.entropy(level)) < 1e-12

    def test_tag_count_polynomial(self):
        mix = Ifs([SimilarityMap(F(1, 2), F(0)),
                   SimilarityMap(F(1, 3), F(1, 2))])
        for n in (2, 4, 6):
            nut = tagged_generation_measure(mix, n)
            tags = {tag for _, _, tag in nut.atoms}
            assert len(tags) == n + 1  # binomial ratio structure

    def test_sinai_n3_tags(self):
        alpha = NumberField([-3, 0, 4], (F(4, 5), F(9, 10))).generator()
        nut = tagged_generation_measure(sinai_ifs(alpha), 3)
        tags = {tag for _, _, tag in nut.atoms}
        assert len(tags) == 4  # (1-a)^k (1+a)^(3-k), k = 0..3


class TestDeltaN:
    def test_bernoulli_third_closed_form(self):
        b = bernoulli_ifs(F(1, 3))
        for n in range(2, 11):
            rep = delta_n(b, n)
            assert rep.delta == 2 * F(1, 3) ** (n - 1)

    def test_matches_brute_force(self):
        b = bernoulli_ifs(F(1, 3))
        g = gasket_ifs(F(4, 5))
        for ifs, ns in ((b, (2, 4, 6)), (g, (2, 3))):
            for n in ns:
                assert delta_n(ifs, n).delta == brute_force_delta(ifs, n)

    def test_golden_exact_overlap_at_3(self):
        rep = delta_n(bernoulli_ifs(golden()), 3)
        assert rep.exact_overlap
        assert rep.delta == 0
        assert rep.log_rate == math.inf
        wi, wj = rep.minimizing_pair
        assert sorted((wi, wj)) == [(0, 1, 1), (1, 0, 0)]

    def test_overlap_closure_upward(self):
        b = bernoulli_ifs(golden())
        for n in (3, 4, 5):
            assert delta_n(b, n).exact_overlap

    def test_gasket_t1(self):
        assert delta_n(gasket_ifs(F(1)), 1).exact_overlap

    def test_no_shared_ratio_is_infinite(self):
        mix = Ifs([SimilarityMap(F(1, 2), F(0)),
                   SimilarityMap(F(1, 3), F(1, 2))])
        rep = delta_n(mix, 1)
        assert rep.delta is None and rep.log_rate is None

    def test_float_backend_refused(self):
        fl = Ifs([SimilarityMap(0.5, 0.0), SimilarityMap(0.5, 0.5)])
        with pytest.raises(BackendError):
            delta_n(fl, 2)

    def test_liouville_floor_consistency(self):
        # rational-parameter IFS: observed Delta_n respects the algebraic floor
        b = bernoulli_ifs(F(1, 3))
        for n in range(2, 9):
            floor = liouville_floor([F(1, 3)], n - 1, height=2)
            assert delta_n(b, n).delta >= floor


class TestSdim:
    def test_cantor_bisection_vs_formula(self):
        assert abs(sdim_set(cantor_ifs()) - LOG23) < 1e-9
        assert abs(sdim_measure(cantor_ifs()) - LOG23) < 1e-12

    def test_m_maps_ratio_one_over_m(self):
        for m in (2, 3, 5):
            maps = [SimilarityMap(F(1, m), F(k, m)) for k in range(m)]
            ifs = Ifs(maps)
            assert abs(sdim_set(ifs) - 1.0) < 1e-9

    def test_sinai_sqrt3_over_2(self):
        alpha = NumberField([-3, 0, 4], (F(4, 5), F(9, 10))).generator()
        assert abs(sdim_measure(sinai_ifs(alpha)) - 1.0) < 1e-9

    def test_sdim_set_refuses_contract_on_average(self):
        alpha = NumberField([-3, 0, 4], (F(4, 5), F(9, 10))).generator()
        with pytest.raises(UnsupportedError):
            sdim_set(sinai_ifs(alpha))


class TestRasterize:
    def test_full_branch_exactly_uniform(self):
        for res in (3, 6, 10):
            rr = rasterize_self_similar(full_branch_ifs(), res)
            assert rr.measure.cells == {k: F(1, 2 ** res)
                                        for k in range(2 ** res)}

    def test_cantor_entropy_rate(self):
        rr = rasterize_self_similar(cantor_ifs(), 20, extra_depth=0)
        assert abs(rr.measure.entropy_rate(20) - LOG23) < 0.02

    def test_bernoulli_half_near_full_entropy(self):
        unit, _ = normalized_to_unit(bernoulli_ifs(F(1, 2)))
        rr = rasterize_self_similar(unit, 16)
        assert abs(rr.measure.entropy_rate(16) - 1.0) <= 2.0 / 16

    def test_float_and_exact_agree(self):
        re_ = rasterize_self_similar(cantor_ifs(), 12, backend="exact").measure
        rf = rasterize_self_similar(cantor_ifs(), 12, backend="float").measure
        assert re_.tv_distance(rf) < 1e-9

    def test_boundary_mass_reported(self):
        rr = rasterize_self_similar(cantor_ifs(), 10)
        assert 0.0 <= rr.boundary_mass <= 1.0


class TestTranslate:
    def test_identity_when_zero_fixed(self):
        ifs = cantor_ifs()  # map 0 fixes 0
        out, offset, _ = translate_to_attractor(ifs)
        assert offset == 0
        assert [(m.ratio, m.translation) for m in out.maps] == \
            [(m.ratio, m.translation) for m in ifs.maps]

    def test_fixed_point_moved_to_zero(self):
        ifs = Ifs([SimilarityMap(F(1, 3), F(1)),
                   SimilarityMap(F(1, 3), F(2))])
        out, offset, bound = translate_to_attractor(ifs)
        assert offset == F(3, 2)
        assert out.maps[0].translation == 0
        assert bound[0] <= 0 <= bound[1]

    def test_delta_invariance(self):
        ifs = Ifs([SimilarityMap(F(1, 3), F(1)),
                   SimilarityMap(F(1, 3), F(2))])
        out, _, _ = translate_to_attractor(ifs)
        for n in (1, 2, 4):
            assert delta_n(ifs, n).delta == delta_n(out, n).delta


class TestStoppingSection:
    def test_uniform_is_lambda_n(self):
        sec = stopping_section(full_branch_ifs(), 3)
        assert sorted(w.symbols for w in sec) == \
            sorted(itertools.product((0, 1), repeat=3))

    def test_mixed_ratios_threshold(self):
        # ratios (1/2, 1/4), threshold rbar^2 = 1/8
        ifs = Ifs([SimilarityMap(F(1, 2), F(0)),
                   SimilarityMap(F(1, 4), F(1, 2))])
        sec = stopping_section(ifs, 2)
        for w in sec:
            rw = abs(F(w.ratio))
            assert rw <= F(1, 8)
            parent = w.symbols[:-1]
            if parent:
                assert abs(F(compose(ifs, parent).ratio)) > F(1, 8)

    def test_section_prob_sums_to_one(self):
        ifs = Ifs([SimilarityMap(F(1, 2), F(0)),
                   SimilarityMap(F(1, 4), F(1, 2))], [F(2, 3), F(1, 3)])
        for n in range(1, 7):
            sec = stopping_section(ifs, n)
            total = F(0)
            for w in sec:
                p = F(1)
                for s in w.symbols:
                    p *= ifs.probs[s]
                total += p
            assert total == 1

    def test_prefix_free_exhaustive(self):
        ifs = Ifs([SimilarityMap(F(1, 2), F(0)),
                   SimilarityMap(F(1, 4), F(1, 2))])
        sec = stopping_section(ifs, 4)
        words = [w.symbols for w in sec]
        for a in words:
            for b in words:
                if a != b:
                    assert a != b[: len(a)]  # no proper prefixes
        # every long word has exactly one prefix in the section
        for w in itertools.product((0, 1), repeat=12):
            hits = [a for a in words if w[: len(a)] == a]
            assert len(hits) == 1


class TestCylinderComponentTv:
    def test_cantor_coarse_levels_zero(self):
        rep = cylinder_component_tv(cantor_ifs(), resolution=12, level=1,
                                    depth=1)
        assert rep.max_tv() < 1e-9

    def test_full_branch_tv_identically_zero(self):
        # dyadic cylinders align exactly with dyadic cells at every depth
        for depth in (3, 6, 9):
            rep = cylinder_component_tv(full_branch_ifs(), resolution=11,
                                        level=1, depth=depth)
            assert rep.max_tv() < 1e-12

    def test_triadic_tv_decreases(self):
        # misaligned (triadic) cylinders: TV strictly improves with depth
        tri = Ifs([SimilarityMap(F(1, 3), F(0)),
                   SimilarityMap(F(1, 3), F(1, 3)),
                   SimilarityMap(F(1, 3), F(2, 3))])
        vals = []
        for depth in (2, 4, 6, 8):
            rep = cylinder_component_tv(tri, resolution=12, level=1,
                                        depth=depth)
            vals.append(rep.max_tv())
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 0.01
        rep = cylinder_component_tv(tri, resolution=12, level=1, depth=8)
        assert rep.mass_weighted_fraction_below(0.05) == 1.0


class TestAttractorBound:
    def test_contains_generation_atoms(self):
        for ifs in (cantor_ifs(), bernoulli_ifs(F(2, 5)), gasket_ifs(F(1, 2))):
            lo, hi = attractor_bound(ifs)
            nu = generation_measure(ifs, 6)
            for loc, _, _ in nu.atoms:
                assert lo - 1e-9 <= float(loc) <= hi + 1e-9


class TestGenerationEntropySeries:
    def test_cantor_conditional_rate_vanishes(self):
        # strong separation: scale-n' entropy already exhausts atom entropy
        ifs = cantor_ifs()
        logr = math.log2(3)
        for n in (6, 8, 10):
            nprime = n * logr
            nu = generation_measure(ifs, n)
            cond = nu.conditional_entropy(math.floor(2 * nprime),
                                          math.floor(nprime)) / nprime
            assert cond <= 0.05

    def test_full_branch_rate_exactly_zero(self):
        # nu^(n) is 2^n equally spaced atoms: uniform at scale 2^-n
        fb = full_branch_ifs()
        for n in (3, 5):
            nu = generation_measure(fb, n)
            for q in (2, 3):
                assert nu.conditional_entropy(q * n, n) == 0.0

    def test_golden_merging_reduces_entropy(self):
        lam = golden()
        merged = generation_measure(bernoulli_ifs(lam), 5)
        free = generation_measure(bernoulli_ifs(F(3, 5)), 5)
        assert merged.merged_atoms > 0
        assert merged.discrete_entropy() < free.discrete_entropy()

    def test_rational_half_ish_floor_consistency(self):
        # observed Delta_n respects the Liouville floor for lambda = 49/100
        lam = F(49, 100)
        b = bernoulli_ifs(lam)
        for n in range(2, 7):
            floor = liouville_floor([lam], n - 1, height=2)
            assert delta_n(b, n).delta >= floor

    def test_natural_measure_preset(self):
        from ifslab.ifs import natural_measure_ifs

        nat = natural_measure_ifs(cantor_ifs())
        assert abs(float(nat.probs[0]) - 0.5) < 1e-9
        assert abs(sdim_measure(nat) - sdim_set(cantor_ifs())) < 1e-6


class TestSinaiCommutation:
    def test_maps_commute_so_delta_vanishes(self):
        # (1+a)((1-a)x - 1) + 1 = (1-a^2)x - a = (1-a)((1+a)x + 1) - 1:
        # the two generators commute for every parameter, so the system has
        # exact overlaps from level 2 on regardless of alpha
        for a in (F(1, 3), F(1, 2), F(7, 10)):
            s = sinai_ifs(a)
            pm = compose(s, (1, 0))
            mp = compose(s, (0, 1))
            assert (pm.ratio, pm.translation) == (mp.ratio, mp.translation)
            rep = delta_n(s, 2)
            assert rep.exact_overlap
