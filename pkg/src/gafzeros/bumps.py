"""Compactly supported radial C^2 test functions.

The profile is 1 on [0, r], 0 on [R, inf), and a quintic smoothstep in
between, so the first two derivatives vanish at both joins. The L^1 norm of
the Laplacian, 2*pi * int |t*Phi''(t) + Phi'(t)| dt, is the rate constant
in the tail bound and is computed by quadrature split at the sign changes
of the integrand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate


def _smoothstep(u):
    return u**3 * (10.0 + u * (-15.0 + 6.0 * u))


def _smoothstep_d1(u):
    return 30.0 * u**2 * (1.0 - u) ** 2


def _smoothstep_d2(u):
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)


@dataclass(frozen=True)
class RadialBump:
    inner: float
    outer: float
    center: complex = 0j
    laplacian_l1: float = field(default=0.0, compare=False)
    laplacian_l1_triangle: float = field(default=0.0, compare=False)

    def profile(self, t):
        """Phi(t) for radial distance t >= 0."""
        t = np.asarray(t, dtype=float)
        u = np.clip((self.outer - t) / (self.outer - self.inner), 0.0, 1.0)
        return _smoothstep(u)

    def profile_d1(self, t):
        t = np.asarray(t, dtype=float)
        w = self.outer - self.inner
        u = (self.outer - t) / w
        inside = (u > 0.0) & (u < 1.0)
        return np.where(inside, -_smoothstep_d1(np.clip(u, 0, 1)) / w, 0.0)

    def profile_d2(self, t):
        t = np.asarray(t, dtype=float)
        w = self.outer - self.inner
        u = (self.outer - t) / w
        inside = (u > 0.0) & (u < 1.0)
        return np.where(inside, _smoothstep_d2(np.clip(u, 0, 1)) / w**2, 0.0)

    def __call__(self, z):
        """phi(z) = Phi(|z - center|)."""
        return self.profile(np.abs(np.asarray(z) - self.center))

    def support_radius(self) -> float:
        return self.outer


def _radial_laplacian_integrand_roots(r: float, R: float) -> np.ndarray:
    # t*Phi'' + Phi' is a quartic in u = (R - t)/(R - r); split |.| at its real roots
    w = R - r
    # t = R - w*u;  g(u) = (R - w*u) * S''(u)/w^2 - S'(u)/w, scaled by w^2:
    # (R - w*u) * S''(u) - w * S'(u)
    s2 = np.array([0.0, 60.0, -180.0, 120.0, 0.0])          # S'' coefficients
    s1 = np.array([0.0, 0.0, 30.0, -60.0, 30.0])            # S' coefficients
    g = R * s2 - w * np.polynomial.polynomial.polymulx(s2) - w * s1
    roots = np.polynomial.polynomial.polyroots(np.trim_zeros(g, "b"))
    real = roots[np.abs(roots.imag) < 1e-12].real
    interior = np.sort(real[(real > 1e-12) & (real < 1 - 1e-12)])
    return R - w * interior[::-1]  # back to t, increasing


def build_bump(r: float, R: float, center: complex = 0j) -> RadialBump:
    """Construct the quintic bump with both Laplacian norms precomputed.

    ``laplacian_l1`` is the exact 2*pi*int_r^R |t*Phi'' + Phi'| dt;
    ``laplacian_l1_triangle`` the larger 2*pi*int (t*|Phi''| + |Phi'|) dt.
    """
    if not 0 < r < R:
        raise ValueError(f"need 0 < r < R, got r={r}, R={R}")
    bump = RadialBump(inner=float(r), outer=float(R), center=center)

    breaks = [r, *_radial_laplacian_integrand_roots(r, R), R]

    def signed(t):
        return t * bump.profile_d2(t) + bump.profile_d1(t)

    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        piece, _ = integrate.quad(signed, a, b, limit=200)
        total += abs(piece)
    l1 = 2.0 * np.pi * total

    # |Phi''| changes sign where S'' does: u = 1/2, i.e. t = (r + R)/2
    tri = 0.0
    for a, b in [(r, 0.5 * (r + R)), (0.5 * (r + R), R)]:
        piece, _ = integrate.quad(lambda t: t * bump.profile_d2(t), a, b, limit=200)
        tri += abs(piece)
    grad_piece, _ = integrate.quad(lambda t: abs(bump.profile_d1(t)), r, R, limit=200)
    tri = 2.0 * np.pi * (tri + grad_piece)

    return RadialBump(inner=float(r), outer=float(R), center=center,
                      laplacian_l1=l1, laplacian_l1_triangle=tri)
