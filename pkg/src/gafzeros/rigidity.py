"""Kernel rigidity: polarization off the diagonal and equivalence recovery.

Two finite curves with the same expected zero measure differ only by a
zero-free scalar factor and a constant unitary map. This module makes that
constructive: ``polarize`` rebuilds the two-variable kernel from its
diagonal, ``riesz_compare`` tests whether two kernels share a Riesz measure
(their log-diagonal difference is harmonic), and ``recover_equivalence``
reconstructs the scalar factor and the unitary from point evaluations.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .ensembles import ExplicitFamily
from .intensity import laplacian_numeric

log = logging.getLogger(__name__)

UNITARITY_TOL = 1e-8
RESIDUAL_TOL = 1e-8
HARMONIC_TOL = 1e-6  # shares the intensity module's stencil accuracy


class KernelModel:
    """Explicit finite curve, optionally transformed by (scalar factor, unitary).

    The scalar factor is exp(a(z)) for a polynomial a, hence zero-free. The
    model exposes ``components``, ``kernel`` and ``squared_norm`` (the
    kernel diagonal), so intensity routines apply to it directly.
    """

    def __init__(self, family: ExplicitFamily, unitary: np.ndarray | None = None,
                 log_factor_coeffs: np.ndarray | None = None):
        self.family = family
        self.dim = family.size
        if unitary is not None:
            unitary = np.asarray(unitary, dtype=complex)
            if unitary.shape != (self.dim, self.dim):
                raise ValueError("unitary shape does not match the family dimension")
            defect = np.linalg.norm(unitary.conj().T @ unitary - np.eye(self.dim), 2)
            if defect > 1e-10:
                raise ValueError(f"matrix is not unitary (defect {defect:.2e})")
        self.unitary = unitary
        self.log_factor_coeffs = (None if log_factor_coeffs is None
                                  else np.asarray(log_factor_coeffs, dtype=complex))

    @property
    def domain(self):
        return self.family.domain

    def scalar_factor(self, z):
        if self.log_factor_coeffs is None:
            return np.ones_like(np.asarray(z, dtype=complex))
        return np.exp(np.polynomial.polynomial.polyval(z, self.log_factor_coeffs))

    def components(self, z):
        """Component values, shape (..., N)."""
        vals = self.family.basis_values(np.asarray(z, dtype=complex))
        if self.unitary is not None:
            vals = vals @ self.unitary.T
        if self.log_factor_coeffs is not None:
            vals = vals * self.scalar_factor(z)[..., None]
        return vals

    def kernel(self, z, w):
        return np.sum(self.components(z) * np.conj(self.components(w)), axis=-1)

    def squared_norm(self, z):
        return np.sum(np.abs(self.components(z)) ** 2, axis=-1)

    def transformed(self, unitary: np.ndarray | None = None,
                    log_factor_coeffs: np.ndarray | None = None) -> "KernelModel":
        """New model with the factor/unitary applied on top of this one."""
        if self.unitary is not None or self.log_factor_coeffs is not None:
            raise ValueError("stacking transforms is not supported; start from the family")
        return KernelModel(self.family, unitary, log_factor_coeffs)


def random_unitary(n: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Ginibre matrix."""
    a = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ------------------------------------------------------------ polarization

@dataclass(frozen=True, eq=False)
class PolarizationTable:
    """Bivariate expansion K(z, w) = sum c[m, n] (z-c0)^m conj(w-c0)^n."""

    center: complex
    coeffs: np.ndarray

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def evaluate(self, z, w):
        dz = np.asarray(z, dtype=complex) - self.center
        dw = np.conj(np.asarray(w, dtype=complex) - self.center)
        m = np.arange(self.coeffs.shape[0])
        zp = dz[..., None] ** m
        wp = dw[..., None] ** m
        return np.einsum("...m,mn,...n->...", zp, self.coeffs, wp)


def polarize(diagonal: Callable[[complex], float], center: complex,
             order: int, radius: float = 0.15) -> PolarizationTable:
    """Recover the two-variable kernel expansion from diagonal values only.

    The diagonal K(l, l), viewed as a function of l and conj(l), determines
    every mixed derivative and hence the full kernel near the center. The
    coefficients are extracted from circles around the center: an FFT in
    the angle separates the index difference m - n, and a least-squares fit
    across several radii separates the total order m + n.

    Ill-conditioned fits trigger an automatic order reduction (with a
    warning). Orders above 8 are refused.
    """
    if order < 0 or order > 8:
        raise ValueError("polarization order must lie in [0, 8]")
    n_theta = max(8 * (order + 1), 32)
    n_rho = order + 3
    rhos = radius * (np.arange(1, n_rho + 1) / n_rho)

    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    rings = np.empty((n_rho, n_theta), dtype=complex)
    for i, rho in enumerate(rhos):
        pts = center + rho * np.exp(1j * theta)
        vals = np.asarray([diagonal(p) for p in pts], dtype=complex)
        if np.abs(vals.imag).max() > 1e-9 * max(np.abs(vals.real).max(), 1.0):
            raise ValueError("kernel diagonal must be real (hermitian kernel)")
        rings[i] = vals
    fourier = np.fft.fft(rings, axis=1) / n_theta  # a_k(rho) for k = 0..n_theta-1

    coeffs = np.zeros((order + 1, order + 1), dtype=complex)
    for k in range(order + 1):
        t_count = order - k + 1  # terms c[k+t, t], t = 0..t_count-1
        powers = k + 2 * np.arange(t_count)
        design = rhos[:, None] ** powers[None, :]
        cond = np.linalg.cond(design)
        if cond > 1e10:
            if order == 0:
                raise ValueError("polarization stencil is ill-conditioned at order 0")
            warnings.warn(f"polarization ill-conditioned at order {order} "
                          f"(cond {cond:.2e}); reducing order", RuntimeWarning)
            return polarize(diagonal, center, order - 1, radius)
        sol, *_ = np.linalg.lstsq(design, fourier[:, k], rcond=None)
        for t in range(t_count):
            coeffs[k + t, t] = sol[t]
    # hermitian fill: real diagonal forces c[n, m] = conj(c[m, n])
    for m in range(order + 1):
        for n in range(m + 1, order + 1):
            coeffs[m, n] = np.conj(coeffs[n, m])
    return PolarizationTable(center=center, coeffs=coeffs)


# ---------------------------------------------------------- Riesz compare

def riesz_compare(model1, model2, points: Sequence[complex],
                  h: float = 1e-3) -> dict:
    """Do the two kernels generate the same expected zero measure?

    Checks that d(z) = log K1(z,z) - log K2(z,z) is harmonic on the grid:
    its numeric Laplacian must vanish to HARMONIC_TOL. Kernels must not
    vanish at any grid or stencil point.
    """
    def log_ratio(z):
        k1 = float(np.real(model1.squared_norm(z)))
        k2 = float(np.real(model2.squared_norm(z)))
        if k1 <= 0 or k2 <= 0:
            raise ValueError(f"kernel vanishes near {z:.4g}; comparison undefined")
        return np.log(k1) - np.log(k2)

    laps = [abs(laplacian_numeric(log_ratio, z, h)) for z in points]
    worst = float(max(laps))
    return {"max_abs_laplacian": worst, "tolerance": HARMONIC_TOL,
            "same_riesz_measure": bool(worst <= HARMONIC_TOL),
            "points": len(laps), "step": h}


# ----------------------------------------------------- equivalence recovery

@dataclass(frozen=True, eq=False)
class EquivalenceCertificate:
    """Witness that model2 = scalar_factor * unitary * model1 at the sample points."""

    unitary: np.ndarray
    points: np.ndarray
    g_values: np.ndarray
    residual: float
    unitarity_defect: float
    gauge_index: int

    @property
    def valid(self) -> bool:
        return self.residual <= RESIDUAL_TOL and self.unitarity_defect <= UNITARITY_TOL

    def product_action(self, i: int) -> np.ndarray:
        """Gauge-invariant g(z_i) * U, the actual map applied to Psi1(z_i)."""
        return self.g_values[i] * self.unitary

    def to_dict(self) -> dict:
        return {
            "dimension": int(self.unitary.shape[0]),
            "unitary": [[[u.real, u.imag] for u in row] for row in self.unitary],
            "points": [[z.real, z.imag] for z in self.points],
            "g_values": [[g.real, g.imag] for g in self.g_values],
            "residual": self.residual,
            "unitarity_defect": self.unitarity_defect,
            "gauge_index": self.gauge_index,
            "valid": self.valid,
        }


def _polar_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def recover_equivalence(model1: KernelModel, model2: KernelModel,
                        points: Sequence[complex]) -> EquivalenceCertificate:
    """Reconstruct the scalar factor and unitary relating two equivalent models.

    Moduli |g(z_i)| come from the kernel-diagonal ratio; phases come from
    cross-kernel ratios against a gauge point where arg g is pinned to 0 (g
    is determined only up to a unimodular constant absorbed into the
    unitary). The unitary solves a least-squares system and is projected to
    the closest exact unitary; one alternating refinement pass re-estimates
    the phases and re-solves.
    """
    if model1.dim != model2.dim:
        raise ValueError("models must have the same dimension N")
    n = model1.dim
    points = np.asarray(list(points), dtype=complex)
    if len(points) < 2 * n:
        raise ValueError(f"need at least {2 * n} sample points in general position")

    a1 = model1.components(points)  # (P, N)
    a2 = model2.components(points)
    if np.linalg.matrix_rank(a1) < n:
        raise ValueError("sample points leave the first model rank-deficient")

    diag1 = np.sum(np.abs(a1) ** 2, axis=1)
    diag2 = np.sum(np.abs(a2) ** 2, axis=1)
    if np.any(diag1 <= 0) or np.any(diag2 <= 0):
        raise ValueError("kernel vanishes at a sample point")
    moduli = np.sqrt(diag2 / diag1)

    # gauge point: largest first-model norm keeps cross ratios well scaled
    anchor = int(np.argmax(diag1))
    cross1 = a1 @ np.conj(a1[anchor])  # K1(z_i, z_anchor)
    cross2 = a2 @ np.conj(a2[anchor])
    small = np.abs(cross1) <= 1e-12 * np.sqrt(diag1 * diag1[anchor])
    if np.any(small):
        raise ValueError("cross kernel vanishes at a sample point; re-draw points")
    phases = np.exp(1j * np.angle(cross2 / cross1))
    g = moduli * phases

    unitary = None
    for _ in range(2):  # initial solve + one refinement pass for the phases
        x, *_ = np.linalg.lstsq(g[:, None] * a1, a2, rcond=None)
        unitary = _polar_unitary(x.T)
        mapped = a1 @ unitary.T
        g = np.sum(a2 * np.conj(mapped), axis=1) / np.sum(np.abs(mapped) ** 2, axis=1)
        # re-gauge: arg g(anchor) = 0; the opposite phase moves into the
        # unitary so the product g * U is unchanged
        spin = np.exp(-1j * np.angle(g[anchor]))
        g = g * spin
        unitary = unitary * np.conj(spin)

    mapped = g[:, None] * (a1 @ unitary.T)
    residual = float(np.max(np.linalg.norm(a2 - mapped, axis=1)
                            / np.linalg.norm(a2, axis=1)))
    defect = float(np.linalg.norm(unitary.conj().T @ unitary - np.eye(n), 2))
    return EquivalenceCertificate(unitary=unitary, points=points, g_values=g,
                                  residual=residual, unitarity_defect=defect,
                                  gauge_index=anchor)
