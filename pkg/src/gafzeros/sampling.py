"""Random coefficient draws and evaluation of the realized analytic function.

A sample is psi(z) = sum_j w_j psi_j(z) with i.i.d. coefficients w_j of
zero mean and unit second moment. Each (master seed, trial index) pair maps
to its own counter-based Philox stream, so draws are bit-reproducible
regardless of execution order or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domains import require_in_domain
from .ensembles import CurveFamily, Ensemble, ExplicitFamily

_MASK64 = (1 << 64) - 1


def trial_generator(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial, keyed by (master seed, trial index)."""
    key = np.array([master_seed & _MASK64, trial_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class ComplexGaussianLaw:
    """Standard complex Gaussian: Re and Im independent N(0, 1/2), so E|w|^2 = 1."""

    name = "complex-standard-gaussian"

    def sample(self, gen: np.random.Generator, n: int) -> np.ndarray:
        parts = gen.standard_normal((2, n))
        return np.sqrt(0.5) * (parts[0] + 1j * parts[1])


class RotationInvariantLaw:
    """Coefficients quantile(U) * exp(2*pi*i*Theta) with U, Theta uniform on (0, 1).

    The radial quantile must satisfy the unit-second-moment normalization
    int_0^1 quantile(u)^2 du = 1 (checked to 1e-3 on a dense grid) and must
    not charge the origin: quantile(u) > 0 for u > 0.
    """

    name = "rotation-invariant"

    def __init__(self, radial_quantile: Callable[[np.ndarray], np.ndarray]):
        self.radial_quantile = radial_quantile
        u = (np.arange(20000) + 0.5) / 20000
        q = np.asarray(radial_quantile(u), dtype=float)
        if np.any(q <= 0):
            raise ValueError("radial quantile must be positive for u > 0")
        second_moment = float(np.mean(q**2))
        if abs(second_moment - 1.0) > 1e-3:
            raise ValueError(
                f"radial quantile is not normalized: E|w|^2 = {second_moment:.6f}")

    def sample(self, gen, n):
        u = gen.random(n)
        theta = gen.random(n)
        return self.radial_quantile(u) * np.exp(2j * np.pi * theta)


@dataclass(frozen=True, eq=False)
class GafSample:
    """One realization: coefficient vector plus evaluation machinery.

    The realized function is a polynomial (families are polynomial after
    truncation); its monomial coefficients are cached for Horner evaluation
    of both psi and psi'.
    """

    family: CurveFamily
    coefficients: np.ndarray
    master_seed: int
    trial_index: int

    @property
    def monomial_coefficients(self) -> np.ndarray:
        if not hasattr(self, "_monomial"):
            rows = self.family.monomial_rows(len(self.coefficients))
            object.__setattr__(self, "_monomial", self.coefficients @ rows)
        return self._monomial

    @property
    def derivative_coefficients(self) -> np.ndarray:
        if not hasattr(self, "_monomial_der"):
            der = np.polynomial.polynomial.polyder(self.monomial_coefficients)
            object.__setattr__(self, "_monomial_der", der)
        return self._monomial_der

    @property
    def degree(self) -> int:
        return len(self.monomial_coefficients) - 1

    def evaluate(self, z):
        """psi(z) = sum_j w_j psi_j(z); z may be a scalar or an array."""
        require_in_domain(self.family.domain, z)
        return np.polynomial.polynomial.polyval(z, self.monomial_coefficients)

    def derivative(self, z):
        """psi'(z) from the closed-form basis derivatives (no numerical differencing)."""
        require_in_domain(self.family.domain, z)
        return np.polynomial.polynomial.polyval(z, self.derivative_coefficients)

    def evaluate_raw(self, z):
        """Evaluate the realized polynomial with no domain check.

        Zero-finding internals sweep auxiliary cells that may poke outside
        the domain; only zeros inside the validated region are kept.
        """
        return np.polynomial.polynomial.polyval(z, self.monomial_coefficients)

    def derivative_raw(self, z):
        return np.polynomial.polynomial.polyval(z, self.derivative_coefficients)

    def __call__(self, z):
        return self.evaluate(z)


def polynomial_sample(coeffs, domain=None) -> GafSample:
    """Wrap a concrete polynomial (constant term first) as a sample.

    The backing family is the monomial basis (1, z, ..., z^d), which is
    linearly independent and shares no common zero, so every zero-finding
    and statistics routine applies directly.
    """
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    family = ExplicitFamily(np.eye(len(coeffs), dtype=complex), domain)
    coeffs.setflags(write=False)
    return GafSample(family=family, coefficients=coeffs,
                     master_seed=0, trial_index=-1)


def draw(ensemble: Ensemble, law=None, master_seed: int = 0,
         trial_index: int = 0) -> GafSample:
    """Draw the coefficient vector for one trial.

    The vector length is the ensemble's resolved truncation size (or the
    family size when finite). Identical (master_seed, trial_index) pairs
    produce bit-identical samples.
    """
    law = law if law is not None else ComplexGaussianLaw()
    gen = trial_generator(master_seed, trial_index)
    coeffs = law.sample(gen, ensemble.n_coefficients)
    coeffs.setflags(write=False)
    return GafSample(family=ensemble.family, coefficients=coeffs,
                     master_seed=master_seed, trial_index=trial_index)
