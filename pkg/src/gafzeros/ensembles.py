"""Holomorphic curve families and their reproducing kernels.

A family is a system of analytic functions psi_j on a plane domain, viewed
as a curve z -> (psi_0(z), psi_1(z), ...) in complex Euclidean space. The
squared norm ||Psi(z)||^2 = sum_j |psi_j(z)|^2 and the kernel
K(z, w) = sum_j psi_j(z) * conj(psi_j(w)) are evaluated in closed form for
the three classical variants and by direct summation for explicit
polynomial families. Infinite families are truncated under a policy that
keeps the discarded tail below epsilon^2 relative to the retained norm
everywhere on the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .domains import (Disk, Domain, PlaneWindow, domain_from_config,
                      require_in_domain)
from .errors import DomainError, TruncationError


@dataclass(frozen=True)
class TruncationPolicy:
    """Tail tolerance for representing an infinite family by finitely many terms.

    The chosen order N is the smallest one with
    sup_domain tail(N) <= epsilon^2 * inf_domain partial(N); the infimum is
    bounded below by 1 because the j = 0 component equals 1 at the origin
    and the partial sums only grow with |z|.
    """

    epsilon: float = 1e-6
    max_order: int = 4096

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")


class CurveFamily:
    """Common interface: domain, component evaluation, norm and kernel."""

    domain: Domain
    name: str

    @property
    def size(self):
        """Number of components, or None for infinite families."""
        return None

    def squared_norm(self, z: complex) -> float:
        raise NotImplementedError

    def kernel(self, z: complex, w: complex) -> complex:
        raise NotImplementedError

    def basis_values(self, z, n: int) -> np.ndarray:
        """Values psi_j(z) for j < n; z may be a scalar or an array."""
        raise NotImplementedError

    def monomial_rows(self, n: int) -> np.ndarray:
        """Monomial coefficients (rows j < n, powers along columns) of psi_j."""
        raise NotImplementedError

    def tail_bound(self, order: int, r: float | None = None) -> float:
        """Upper bound on sum_{j > order} |psi_j(z)|^2 for |z| <= r (domain default)."""
        raise TruncationError(f"{self.name} family is finite; no tail to bound")

    def _check_point(self, z) -> None:
        require_in_domain(self.domain, z)


class PlanarFamily(CurveFamily):
    """psi_j(z) = z^j / sqrt(j!), observed through a bounded window.

    The squared norm is exp(|z|^2) and the kernel exp(z * conj(w)). The
    normalization makes the expected-zero density constant equal to 1/pi.
    """

    def __init__(self, window_radius: float = 1.0):
        if not (window_radius > 0 and math.isfinite(window_radius)):
            raise ValueError("planar families require a finite positive window radius")
        self.domain = PlaneWindow(window_radius)
        self.name = "planar"

    def __repr__(self):
        return f"PlanarFamily(window_radius={self.domain.radius})"

    def squared_norm(self, z):
        self._check_point(z)
        return np.exp(np.abs(z) ** 2)

    def kernel(self, z, w):
        self._check_point(z)
        self._check_point(w)
        return np.exp(z * np.conj(w))

    def basis_values(self, z, n):
        z = np.asarray(z, dtype=complex)
        j = np.arange(n)
        log_fact = special.gammaln(j + 1)
        return z[..., None] ** j * np.exp(-0.5 * log_fact)

    def monomial_rows(self, n):
        j = np.arange(n)
        return np.diag(np.exp(-0.5 * special.gammaln(j + 1))).astype(complex)

    def tail_bound(self, order, r=None):
        # sum_{j > N} r^{2j} / j!  =  e^{r^2} P(N + 1, r^2), regularized lower gamma
        x = (self.domain.max_abs() if r is None else r) ** 2
        return float(np.exp(x) * special.gammainc(order + 1, x))

    def to_config(self):
        return {"variant": "planar", "domain": self.domain.to_config()}


class HyperbolicFamily(CurveFamily):
    """psi_j(z) = z^j on a disk of radius <= 1 around the origin.

    Squared norm 1 / (1 - |z|^2); kernel 1 / (1 - z * conj(w)). Evaluation
    requires |z| < 1 regardless of the declared domain radius.
    """

    def __init__(self, domain_radius: float = 1.0):
        if not 0 < domain_radius <= 1:
            raise ValueError("hyperbolic domain radius must lie in (0, 1]")
        self.domain = Disk(0j, domain_radius)
        self.name = "hyperbolic"

    def __repr__(self):
        return f"HyperbolicFamily(domain_radius={self.domain.radius})"

    def _check_open_disk(self, z):
        if np.any(np.abs(z) >= 1.0):
            raise DomainError("hyperbolic families are defined only for |z| < 1")

    def squared_norm(self, z):
        self._check_point(z)
        self._check_open_disk(z)
        return 1.0 / (1.0 - np.abs(z) ** 2)

    def kernel(self, z, w):
        self._check_point(z)
        self._check_point(w)
        self._check_open_disk(z)
        self._check_open_disk(w)
        return 1.0 / (1.0 - z * np.conj(w))

    def basis_values(self, z, n):
        z = np.asarray(z, dtype=complex)
        return z[..., None] ** np.arange(n)

    def monomial_rows(self, n):
        return np.eye(n, dtype=complex)

    def tail_bound(self, order, r=None):
        r2 = (self.domain.max_abs() if r is None else r) ** 2
        if r2 >= 1.0:
            return math.inf
        return r2 ** (order + 1) / (1.0 - r2)

    def to_config(self):
        return {"variant": "hyperbolic", "domain": self.domain.to_config()}


class KostlanFamily(CurveFamily):
    """psi_j(z) = sqrt(binomial(N, j)) * z^j for 0 <= j <= N.

    A finite family defined on the whole plane; squared norm (1 + |z|^2)^N
    and kernel (1 + z * conj(w))^N.
    """

    def __init__(self, degree: int, domain: Domain | None = None):
        if degree < 1:
            raise ValueError("Kostlan degree must be >= 1")
        self.degree = int(degree)
        self.domain = domain if domain is not None else PlaneWindow(math.inf)
        self.name = "kostlan"

    def __repr__(self):
        return f"KostlanFamily(degree={self.degree})"

    @property
    def size(self):
        return self.degree + 1

    def squared_norm(self, z):
        self._check_point(z)
        return (1.0 + np.abs(z) ** 2) ** self.degree

    def kernel(self, z, w):
        self._check_point(z)
        self._check_point(w)
        return (1.0 + z * np.conj(w)) ** self.degree

    def _scales(self):
        j = np.arange(self.degree + 1)
        log_binom = (special.gammaln(self.degree + 1) - special.gammaln(j + 1)
                     - special.gammaln(self.degree - j + 1))
        return np.exp(0.5 * log_binom)

    def basis_values(self, z, n=None):
        n = self.size if n is None else n
        if n > self.size:
            raise ValueError("Kostlan family has only degree + 1 components")
        z = np.asarray(z, dtype=complex)
        return z[..., None] ** np.arange(n) * self._scales()[:n]

    def monomial_rows(self, n=None):
        n = self.size if n is None else n
        return np.diag(self._scales()[:n]).astype(complex)

    def to_config(self):
        return {"variant": "kostlan", "degree": self.degree,
                "domain": self.domain.to_config()}


class ExplicitFamily(CurveFamily):
    """Finite family of explicitly given polynomials.

    ``coeffs`` has one row per component, monomial coefficients from the
    constant term up. Rows must be linearly independent, and the components
    must not share a common zero: a shared zero makes ||Psi|| vanish, which
    both the norm logarithm and the intensity machinery reject.
    """

    _RANK_TOL = 1e-10

    def __init__(self, coeffs, domain: Domain | None = None):
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        if coeffs.shape[0] > coeffs.shape[1]:
            raise ValueError("more components than coefficients: rows cannot be independent")
        rank = np.linalg.matrix_rank(coeffs)
        if rank < coeffs.shape[0]:
            raise ValueError("component polynomials are linearly dependent")
        self.coeffs = coeffs
        self.coeffs.setflags(write=False)
        self.domain = domain if domain is not None else PlaneWindow(math.inf)
        self.name = "explicit"
        self._reject_common_zero()

    def _reject_common_zero(self):
        # any common zero must be a root of the first nonconstant component
        scale = np.abs(self.coeffs).max()
        for row in self.coeffs:
            trimmed = np.trim_zeros(row, "b")
            if len(trimmed) > 1:
                candidates = np.polynomial.polynomial.polyroots(trimmed)
                break
        else:
            return  # all components constant; norm never vanishes
        vals = np.abs(self.basis_values(candidates, self.coeffs.shape[0]))
        shared = np.all(vals <= 1e-9 * max(scale, 1.0), axis=-1)
        if np.any(shared):
            where = candidates[shared][0]
            raise ValueError(
                f"components share a zero near {where:.6g}; the family norm "
                "vanishes there and the curve is rejected")

    def __repr__(self):
        n, d = self.coeffs.shape
        return f"ExplicitFamily(<{n} components, degree <= {d - 1}>)"

    @property
    def size(self):
        return self.coeffs.shape[0]

    def basis_values(self, z, n=None):
        n = self.size if n is None else n
        z = np.asarray(z, dtype=complex)
        powers = z[..., None] ** np.arange(self.coeffs.shape[1])
        return powers @ self.coeffs[:n].T

    def monomial_rows(self, n=None):
        n = self.size if n is None else n
        return np.array(self.coeffs[:n])

    def squared_norm(self, z):
        self._check_point(z)
        vals = self.basis_values(z)
        return np.sum(np.abs(vals) ** 2, axis=-1)

    def kernel(self, z, w):
        self._check_point(z)
        self._check_point(w)
        return np.sum(self.basis_values(z) * np.conj(self.basis_values(w)), axis=-1)

    def to_config(self):
        return {"variant": "explicit",
                "coeffs": [[[c.real, c.imag] for c in row] for row in self.coeffs],
                "domain": self.domain.to_config()}


def squared_norm(family: CurveFamily, z):
    """||Psi(z)||^2, in closed form when the variant admits one."""
    return family.squared_norm(z)


def kernel(family: CurveFamily, z, w):
    """Reproducing kernel K(z, w); hermitian, with K(z, z) = ||Psi(z)||^2."""
    return family.kernel(z, w)


def truncation_order(family: CurveFamily, policy: TruncationPolicy | None = None,
                     domain: Domain | None = None) -> int:
    """Smallest retained top index N meeting the policy; pass-through for finite families.

    For infinite variants the closed-form tail at the domain's maximal
    modulus is driven below epsilon^2 (the retained norm is >= 1 everywhere,
    so 1 serves as the lower bound).
    """
    if family.size is not None:
        return family.size - 1
    policy = policy or TruncationPolicy()
    r = (domain or family.domain).max_abs()
    if isinstance(family, HyperbolicFamily) and r >= 1.0:
        raise TruncationError("hyperbolic domain touches |z| = 1; tail does not converge")
    target = policy.epsilon**2
    for order in range(max(int(r * r), 0), policy.max_order + 1):
        if family.tail_bound(order, r) <= target:
            return order
    raise TruncationError(
        f"no order <= {policy.max_order} meets epsilon = {policy.epsilon}")


@dataclass(frozen=True, eq=False)
class Ensemble:
    """A curve family bundled with its resolved truncation.

    ``order`` is the top retained component index; for finite families it is
    simply size - 1. Ensembles are immutable and safe to share between
    concurrent trial workers.
    """

    family: CurveFamily
    policy: TruncationPolicy = field(default_factory=TruncationPolicy)

    @property
    def order(self) -> int:
        if not hasattr(self, "_order"):
            object.__setattr__(self, "_order", truncation_order(self.family, self.policy))
        return self._order

    @property
    def n_coefficients(self) -> int:
        return self.order + 1

    def to_config(self) -> dict:
        cfg = self.family.to_config()
        cfg["epsilon"] = self.policy.epsilon
        cfg["max_order"] = self.policy.max_order
        return cfg

    @classmethod
    def from_config(cls, cfg: dict) -> "Ensemble":
        variant = cfg.get("variant")
        domain = domain_from_config(cfg["domain"]) if "domain" in cfg else None
        if variant == "planar":
            if not isinstance(domain, PlaneWindow):
                raise ValueError("planar ensembles need a plane-window domain")
            family = PlanarFamily(domain.radius)
        elif variant == "hyperbolic":
            if not isinstance(domain, Disk) or domain.center != 0:
                raise ValueError("hyperbolic ensembles need a disk domain centered at 0")
            family = HyperbolicFamily(domain.radius)
        elif variant == "kostlan":
            family = KostlanFamily(int(cfg["degree"]), domain)
        elif variant == "explicit":
            coeffs = np.array([[complex(re, im) for re, im in row]
                               for row in cfg["coeffs"]])
            family = ExplicitFamily(coeffs, domain)
        else:
            raise ValueError(f"unknown ensemble variant: {variant!r}")
        policy = TruncationPolicy(epsilon=float(cfg.get("epsilon", 1e-6)),
                                  max_order=int(cfg.get("max_order", 4096)))
        return cls(family=family, policy=policy)
