import numpy as np
import pytest

from gafzeros import (BoundaryZeroError, Disk, DomainError, Ensemble,
                      ExplicitFamily, GafSample, HyperbolicFamily,
                      KostlanFamily, Rectangle, build_bump, companion_roots,
                      count_in_region, count_in_region_robust, draw,
                      linear_statistic, locate, polynomial_sample)


def sorted_roots(zeroset):
    out = []
    for z, m in zeroset.zeros:
        out.extend([z] * m)
    return np.sort_complex(np.array(out))


class TestCounting:
    def test_two_roots_inside(self):
        s = polynomial_sample([-1.0, 0.0, 1.0])  # z^2 - 1
        assert count_in_region(s, Disk(0j, 2.0)) == 2

    def test_no_roots_inside(self):
        s = polynomial_sample([-1.0, 0.0, 1.0])
        assert count_in_region(s, Disk(0j, 0.5)) == 0

    def test_rectangle_region(self):
        s = polynomial_sample([-1.0, 0.0, 1.0])
        assert count_in_region(s, Rectangle(0.5 - 1j, 2 + 1j)) == 1
        assert count_in_region(s, Rectangle(-2 - 1j, 2 + 1j)) == 2

    def test_kostlan_count_matches_degree_on_huge_disk(self):
        ens = Ensemble(KostlanFamily(20))
        for k in range(10):
            s = draw(ens, master_seed=31, trial_index=k)
            oracle = companion_roots(s).count
            assert count_in_region(s, Disk(0j, 1e6)) == oracle == 20

    def test_boundary_zero_detected_and_jittered(self):
        s = polynomial_sample([-4.0, 0.0, 1.0])  # roots at +-2
        with pytest.raises(BoundaryZeroError):
            count_in_region(s, Disk(0j, 2.0))
        count, region = count_in_region_robust(s, Disk(0j, 2.0))
        assert count == 2
        assert region.radius > 2.0

    def test_additivity_over_partition(self):
        ens = Ensemble(KostlanFamily(12))
        for k in range(5):
            s = draw(ens, master_seed=17, trial_index=k)
            whole = Rectangle(-2 - 2j, 2 + 2j)
            quads = [Rectangle(-2 - 2j, 0j), Rectangle(-2j, 2 + 0j),
                     Rectangle(-2 + 0j, 2j), Rectangle(0j, 2 + 2j)]
            total = count_in_region(s, whole)
            assert total == sum(count_in_region(s, q) for q in quads)

    def test_region_must_be_inside_domain(self):
        ens = Ensemble(HyperbolicFamily(0.8))
        s = draw(ens, master_seed=1, trial_index=0)
        with pytest.raises(DomainError):
            count_in_region(s, Disk(0j, 0.9))


class TestLocate:
    def test_double_root_at_origin(self):
        s = polynomial_sample([0.0, 0.0, 1.0])  # z^2
        zs = locate(s, Disk(0j, 0.4))
        assert len(zs.zeros) == 1
        (z, m), = zs.zeros
        assert m == 2
        assert abs(z) <= 1e-7

    def test_constructed_roots_recovered(self):
        gen = np.random.default_rng(5)
        roots = gen.uniform(-1.2, 1.2, 6) + 1j * gen.uniform(-1.2, 1.2, 6)
        coeffs = np.polynomial.polynomial.polyfromroots(roots)
        s = polynomial_sample(coeffs)
        zs = locate(s, Disk(0j, 3.0))
        got = sorted_roots(zs)
        want = np.sort_complex(roots)
        assert len(got) == len(want)
        assert np.max(np.abs(got - want)) <= 1e-10

    def test_matches_companion_on_kostlan(self):
        ens = Ensemble(KostlanFamily(8))
        region = Disk(0j, 2.0)
        for k in range(100):
            s = draw(ens, master_seed=23, trial_index=k)
            a = locate(s, region, verify_multiplicity=False)
            b = companion_roots(s, region)
            assert a.count == b.count

    def test_conjugation_symmetry_for_real_coefficients(self):
        gen = np.random.default_rng(8)
        coeffs = gen.standard_normal(9)
        s = polynomial_sample(coeffs)
        zs = locate(s, Disk(0j, 4.0))
        pts = sorted_roots(zs)
        # the zero multiset must equal its own conjugate
        for z in pts:
            assert np.min(np.abs(pts - np.conj(z))) <= 1e-10


class TestCompanion:
    def test_simple_quadratic(self):
        zs = companion_roots(polynomial_sample([-1.0, 0.0, 1.0]))
        got = sorted_roots(zs)
        assert np.allclose(got, [-1.0, 1.0], atol=1e-12)

    def test_triple_root_clusters(self):
        # (z - 2)^3 = z^3 - 6 z^2 + 12 z - 8
        zs = companion_roots(polynomial_sample([-8.0, 12.0, -6.0, 1.0]))
        assert len(zs.zeros) == 1
        (z, m), = zs.zeros
        assert m == 3
        assert abs(z - 2.0) <= 1e-9

    def test_reexpansion_of_random_degree8(self):
        gen = np.random.default_rng(21)
        coeffs = gen.standard_normal(9) + 1j * gen.standard_normal(9)
        zs = companion_roots(polynomial_sample(coeffs))
        rebuilt = np.polynomial.polynomial.polyfromroots(sorted_roots(zs)) * coeffs[-1]
        assert np.max(np.abs(rebuilt - coeffs)) <= 1e-8 * np.max(np.abs(coeffs))

    def test_degree_drop_reported(self):
        fam = ExplicitFamily(np.eye(3, dtype=complex))
        s = GafSample(family=fam, coefficients=np.array([1.0, 1.0, 0.0]),
                      master_seed=0, trial_index=0)
        zs = companion_roots(s)
        assert zs.degree_drop == 1
        assert zs.count == 1

    def test_region_filter(self):
        zs = companion_roots(polynomial_sample([-1.0, 0.0, 1.0]), Disk(1.0, 0.5))
        assert zs.count == 1
        assert zs.zeros[0][0] == pytest.approx(1.0)


class TestLinearStatistic:
    def test_constant_one_counts_zeros(self):
        # bump is 1 on a region holding all the zeros
        zs = companion_roots(polynomial_sample([-0.25, 0.0, 1.0]), Disk(0j, 3.0))
        bump = build_bump(1.0, 3.0)
        assert linear_statistic(zs, bump) == pytest.approx(zs.count)

    def test_no_zeros_in_support(self):
        zs = companion_roots(polynomial_sample([-16.0, 0.0, 1.0]), Disk(0j, 5.0))
        bump = build_bump(1.0, 2.0)
        assert linear_statistic(zs, bump) == 0.0

    def test_weighted_sum(self):
        # zeros at radii where the profile is 1 and 0.5
        from scipy.optimize import brentq

        bump = build_bump(1.0, 2.0)
        t_half = brentq(lambda t: bump.profile(t) - 0.5, 1.0, 2.0)
        zs = companion_roots(
            polynomial_sample(np.polynomial.polynomial.polyfromroots([0.5, t_half])),
            Disk(0j, 3.0))
        assert linear_statistic(zs, bump) == pytest.approx(1.5, abs=1e-9)

    def test_region_must_cover_support(self):
        zs = companion_roots(polynomial_sample([-1.0, 0.0, 1.0]), Disk(0j, 1.5))
        with pytest.raises(DomainError):
            linear_statistic(zs, build_bump(1.0, 2.0))
