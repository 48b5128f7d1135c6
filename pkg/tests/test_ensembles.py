import math

import numpy as np
import pytest

from gafzeros import (Disk, DomainError, Ensemble, ExplicitFamily,
                      HyperbolicFamily, KostlanFamily, PlanarFamily,
                      PlaneWindow, Rectangle, TruncationError,
                      TruncationPolicy, kernel, squared_norm,
                      truncation_order)


def brute_norm(family, z, n):
    vals = family.basis_values(np.asarray(z, dtype=complex), n)
    return float(np.sum(np.abs(vals) ** 2))


def brute_kernel(family, z, w, n):
    vz = family.basis_values(np.asarray(z, dtype=complex), n)
    vw = family.basis_values(np.asarray(w, dtype=complex), n)
    return complex(np.sum(vz * np.conj(vw)))


class TestDomains:
    def test_disk_invariants(self):
        with pytest.raises(ValueError):
            Disk(0j, -1.0)
        d = Disk(1 + 1j, 2.0)
        assert d.contains(1 + 1j) and d.contains(3 + 1j)
        assert not d.contains(4 + 1j)
        assert d.max_abs() == pytest.approx(abs(1 + 1j) + 2.0)

    def test_rectangle_corners_must_differ(self):
        with pytest.raises(ValueError):
            Rectangle(1 + 1j, 1 + 5j)
        r = Rectangle(-1 - 1j, 2 + 1j)
        assert r.contains(0.5)
        assert not r.contains(3 + 0j)
        assert r.area() == pytest.approx(6.0)

    def test_plane_window(self):
        w = PlaneWindow(2.5)
        assert w.contains(2.4j) and not w.contains(2.6j)
        assert PlaneWindow(math.inf).contains(1e300)


class TestSquaredNorm:
    def test_planar_origin_only_constant_term(self):
        # only psi_0(0) = 1 survives
        assert squared_norm(PlanarFamily(2.0), 0j) == pytest.approx(1.0)

    def test_kostlan_at_one(self):
        # (1 + 1)^3 = 8 = sum of binomial(3, j)
        fam = KostlanFamily(3)
        assert squared_norm(fam, 1.0) == pytest.approx(8.0)
        assert squared_norm(fam, 1.0) == pytest.approx(brute_norm(fam, 1.0, 4))

    def test_hyperbolic_geometric_series(self):
        # sum 0.25^j = 1 / 0.75
        fam = HyperbolicFamily()
        assert squared_norm(fam, 0.5) == pytest.approx(4.0 / 3.0)

    def test_outside_domain_rejected(self):
        with pytest.raises(DomainError):
            squared_norm(PlanarFamily(2.0), 3.0 + 0j)
        with pytest.raises(DomainError):
            squared_norm(HyperbolicFamily(), 1.0 + 0j)

    def test_closed_form_matches_truncated_sum(self):
        # relative error <= epsilon on a grid across the domain
        eps = 1e-6
        cases = [
            (PlanarFamily(2.0), truncation_order(PlanarFamily(2.0),
                                                 TruncationPolicy(epsilon=eps))),
            (HyperbolicFamily(0.7), truncation_order(HyperbolicFamily(0.7),
                                                     TruncationPolicy(epsilon=eps))),
        ]
        for fam, order in cases:
            r_max = fam.domain.max_abs() * 0.999
            xs = np.linspace(-r_max / 1.5, r_max / 1.5, 50)
            for x in xs:
                for y in (0.0, r_max / 2.1):
                    z = complex(x, y)
                    if not fam.domain.contains(z):
                        continue
                    exact = float(squared_norm(fam, z))
                    approx = brute_norm(fam, z, order + 1)
                    assert abs(approx - exact) <= eps * exact


class TestKernel:
    def test_kostlan_diagonal_example(self):
        assert kernel(KostlanFamily(2), 1j, 1j) == pytest.approx(4.0)

    def test_planar_orthogonality_point(self):
        fam = PlanarFamily(2.0)
        assert kernel(fam, 1.0, 0j) == pytest.approx(1.0)
        assert abs(kernel(fam, 1.0, 0j) - brute_kernel(fam, 1.0, 0j, 60)) < 1e-12

    def test_diagonal_identity_random(self):
        gen = np.random.default_rng(7)
        fams = [PlanarFamily(2.0), HyperbolicFamily(), KostlanFamily(6)]
        for _ in range(1000):
            fam = fams[gen.integers(len(fams))]
            r_cap = min(fam.domain.max_abs(), 2.0) * 0.95
            z = complex(*(gen.uniform(-r_cap / 1.5, r_cap / 1.5, 2)))
            diag = complex(kernel(fam, z, z))
            norm = float(squared_norm(fam, z))
            assert abs(diag - norm) <= 1e-12 * norm

    def test_hermitian_symmetry(self):
        gen = np.random.default_rng(11)
        for fam in (PlanarFamily(2.0), HyperbolicFamily(), KostlanFamily(5)):
            cap = min(fam.domain.max_abs(), 2.0) * 0.9 / 1.5
            for _ in range(200):
                z, w = (complex(*gen.uniform(-cap, cap, 2)) for _ in range(2))
                a = complex(kernel(fam, z, w))
                b = complex(kernel(fam, w, z))
                assert abs(a - np.conj(b)) <= 1e-12 * max(abs(a), 1.0)

    def test_gram_positive_semidefinite(self):
        gen = np.random.default_rng(13)
        for fam in (PlanarFamily(2.0), HyperbolicFamily(), KostlanFamily(4),
                    ExplicitFamily(np.eye(3))):
            cap = min(fam.domain.max_abs(), 2.0) * 0.9 / 1.5
            pts = [complex(*gen.uniform(-cap, cap, 2)) for _ in range(6)]
            gram = np.array([[complex(kernel(fam, zi, zj)) for zj in pts]
                             for zi in pts])
            eigs = np.linalg.eigvalsh(gram)
            assert eigs.min() >= -1e-10 * np.trace(gram).real


class TestTruncation:
    def test_hyperbolic_example_order(self):
        # 0.25^(N+1)/0.75 <= 1e-12 first holds at N = 20
        fam = HyperbolicFamily(0.5)
        assert truncation_order(fam, TruncationPolicy(epsilon=1e-6)) == 20

    def test_hyperbolic_order_is_minimal_by_direct_tail(self):
        r2 = 0.25
        order = truncation_order(HyperbolicFamily(0.5), TruncationPolicy(epsilon=1e-6))
        js = np.arange(order + 1, order + 400)
        tail = float(np.sum(r2**js))
        tail_prev = tail + r2**order
        assert tail <= 1e-12
        assert tail_prev > 1e-12

    def test_planar_order_verified_by_brute_tail(self):
        fam = PlanarFamily(2.0)
        order = truncation_order(fam, TruncationPolicy(epsilon=1e-6))

        def brute_tail(n):
            # direct summation of 4^j / j! beyond n, in plain floats
            total, term, j = 0.0, 4.0 ** (n + 1) / math.factorial(n + 1), n + 1
            while term > 1e-30:
                total += term
                j += 1
                term *= 4.0 / j
            return total

        assert brute_tail(order) <= 1e-12
        assert brute_tail(order - 1) > 1e-12

    def test_finite_family_passthrough(self):
        assert truncation_order(KostlanFamily(10)) == 10

    def test_unreachable_policy(self):
        with pytest.raises(TruncationError):
            truncation_order(HyperbolicFamily(1.0), TruncationPolicy(epsilon=1e-6))
        with pytest.raises(TruncationError):
            truncation_order(PlanarFamily(10.0),
                             TruncationPolicy(epsilon=1e-9, max_order=50))


class TestExplicit:
    def test_rank_check(self):
        with pytest.raises(ValueError):
            ExplicitFamily([[1.0, 2.0], [2.0, 4.0]])

    def test_common_zero_rejected(self):
        # both components vanish at z = 1
        with pytest.raises(ValueError, match="share a zero"):
            ExplicitFamily([[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])

    def test_single_component_with_zero_rejected(self):
        with pytest.raises(ValueError, match="share a zero"):
            ExplicitFamily([[0.0, -1.0, 1.0]])  # z(z - 1)

    def test_valid_family_norm(self):
        fam = ExplicitFamily([[1.0, 0.0], [0.0, 1.0]])  # components 1, z
        assert squared_norm(fam, 2.0) == pytest.approx(5.0)
        assert kernel(fam, 2.0, 1j) == pytest.approx(1.0 + 2.0 * np.conj(1j))


class TestEnsembleConfig:
    def test_round_trip(self):
        ens = Ensemble(PlanarFamily(2.5), TruncationPolicy(epsilon=1e-6))
        cfg = ens.to_config()
        back = Ensemble.from_config(cfg)
        assert isinstance(back.family, PlanarFamily)
        assert back.family.domain.radius == 2.5
        assert back.order == ens.order

    def test_kostlan_config(self):
        ens = Ensemble.from_config({"variant": "kostlan", "degree": 7})
        assert ens.n_coefficients == 8

    def test_explicit_config(self):
        cfg = {"variant": "explicit",
               "coeffs": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}
        ens = Ensemble.from_config(cfg)
        assert isinstance(ens.family, ExplicitFamily)
        assert ens.family.size == 2

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            Ensemble.from_config({"variant": "mystery"})
