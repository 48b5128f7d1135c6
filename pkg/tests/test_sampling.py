import math

import numpy as np
import pytest

from gafzeros import (ComplexGaussianLaw, DomainError, Ensemble,
                      HyperbolicFamily, KostlanFamily, PlanarFamily,
                      RotationInvariantLaw, draw, polynomial_sample,
                      squared_norm, trial_generator)


class TestDeterminism:
    def test_same_seed_same_coefficients(self):
        ens = Ensemble(PlanarFamily(2.0))
        a = draw(ens, master_seed=123, trial_index=5)
        b = draw(ens, master_seed=123, trial_index=5)
        assert np.array_equal(a.coefficients, b.coefficients)

    def test_distinct_trials_differ(self):
        ens = Ensemble(PlanarFamily(2.0))
        a = draw(ens, master_seed=123, trial_index=5)
        b = draw(ens, master_seed=123, trial_index=6)
        c = draw(ens, master_seed=124, trial_index=5)
        assert not np.array_equal(a.coefficients, b.coefficients)
        assert not np.array_equal(a.coefficients, c.coefficients)

    def test_order_independent_streams(self):
        # drawing trials in any order gives the same per-trial vectors
        ens = Ensemble(KostlanFamily(6))
        forward = [draw(ens, master_seed=9, trial_index=k).coefficients
                   for k in range(8)]
        backward = [draw(ens, master_seed=9, trial_index=k).coefficients
                    for k in reversed(range(8))][::-1]
        for f, b in zip(forward, backward):
            assert np.array_equal(f, b)


class TestCoefficientLaw:
    def test_gaussian_moments(self):
        gen = trial_generator(512, 0)
        w = ComplexGaussianLaw().sample(gen, 100_000)
        n = len(w)
        assert abs(w.mean()) <= 4.0 / math.sqrt(n)
        assert abs(np.mean(np.abs(w) ** 2) - 1.0) <= 0.01

    def test_unit_modulus_law(self):
        law = RotationInvariantLaw(lambda u: np.ones_like(u))
        gen = trial_generator(42, 1)
        w = law.sample(gen, 1000)
        assert np.allclose(np.abs(w), 1.0)

    def test_rotation_invariant_normalization_checked(self):
        with pytest.raises(ValueError, match="not normalized"):
            RotationInvariantLaw(lambda u: 2.0 * np.ones_like(u))

    def test_law_must_not_charge_origin(self):
        with pytest.raises(ValueError, match="positive"):
            RotationInvariantLaw(lambda u: np.zeros_like(u))

    def test_rotation_invariant_second_moment(self):
        # quantile sqrt(2u) has second moment int 2u du = 1
        law = RotationInvariantLaw(lambda u: np.sqrt(2.0 * u))
        gen = trial_generator(3, 0)
        w = law.sample(gen, 200_000)
        assert abs(np.mean(np.abs(w) ** 2) - 1.0) <= 0.01
        assert abs(w.mean()) <= 4.0 / math.sqrt(len(w))


class TestEvaluate:
    def test_zero_coefficients(self):
        s = polynomial_sample([0.0, 0.0, 0.0])
        assert s.evaluate(1.3 + 0.5j) == 0

    def test_kostlan_hand_value(self):
        # N = 1, w = (1, 1): psi(2) = 1 + sqrt(binom(1,1)) * 2 = 3
        from gafzeros import GafSample

        sample = GafSample(family=KostlanFamily(1),
                           coefficients=np.array([1.0 + 0j, 1.0 + 0j]),
                           master_seed=0, trial_index=0)
        assert sample.evaluate(2.0) == pytest.approx(3.0)

    def test_outside_domain_rejected(self):
        ens = Ensemble(HyperbolicFamily(0.8))
        s = draw(ens, master_seed=1, trial_index=0)
        with pytest.raises(DomainError):
            s.evaluate(0.95)

    def test_derivative_matches_finite_difference(self):
        ens = Ensemble(PlanarFamily(2.0))
        s = draw(ens, master_seed=4, trial_index=2)
        z, h = 0.7 + 0.2j, 1e-6
        fd = (s.evaluate(z + h) - s.evaluate(z - h)) / (2 * h)
        assert abs(s.derivative(z) - fd) <= 1e-6 * max(1.0, abs(fd))

    def test_scaling_by_two_is_exact(self):
        # doubling every coefficient doubles each Horner step exactly
        ens = Ensemble(KostlanFamily(8))
        s = draw(ens, master_seed=5, trial_index=1)
        doubled = polynomial_sample(2.0 * np.asarray(s.monomial_coefficients))
        for z in (0.3 + 0.1j, -1.2j, 2.0):
            assert doubled.evaluate(z) == 2.0 * s.evaluate(z)

    def test_additivity_tight(self):
        ens = Ensemble(KostlanFamily(8))
        a = draw(ens, master_seed=5, trial_index=1)
        b = draw(ens, master_seed=5, trial_index=2)
        both = polynomial_sample(np.asarray(a.monomial_coefficients)
                                 + np.asarray(b.monomial_coefficients))
        for z in (0.3 + 0.1j, -1.2j, 1.5):
            lhs = both.evaluate(z)
            rhs = a.evaluate(z) + b.evaluate(z)
            assert abs(lhs - rhs) <= 1e-13 * max(abs(lhs), 1.0)


class TestVarianceIdentity:
    def test_mean_square_matches_norm(self):
        # E |psi(z)|^2 = ||Psi(z)||^2, checked at 5 grid points
        ens = Ensemble(PlanarFamily(1.8))
        trials = 10_000
        for z in (0j, 0.5, 1.0j, -0.8 + 0.4j, 1.2 - 0.9j):
            vals = np.empty(trials)
            for k in range(trials):
                s = draw(ens, master_seed=77, trial_index=k)
                vals[k] = abs(s.evaluate(z)) ** 2
            target = float(squared_norm(ens.family, z))
            se = vals.std(ddof=1) / math.sqrt(trials)
            assert abs(vals.mean() - target) <= 5.0 * se
