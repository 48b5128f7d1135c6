"""Expected zero measure: density (1/2*pi) * Laplacian of log ||Psi||.

Closed forms exist for the three classical families (constant 1/pi for the
planar one, (1/pi)(1-|z|^2)^-2 hyperbolic, (N/pi)(1+|z|^2)^-2 for degree-N
binomial-weighted polynomials). The numeric route applies a 5-point
finite-difference Laplacian with Richardson extrapolation to
u = (1/2) log ||Psi||^2 and works for any family-like object exposing
``squared_norm`` and ``domain`` (explicit families, transformed kernels).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .bumps import RadialBump
from .domains import Disk, PlaneWindow, Rectangle, Region, \
    require_in_domain, require_region_in_domain
from .ensembles import ExplicitFamily, HyperbolicFamily, KostlanFamily, PlanarFamily
from .errors import DomainError

DEFAULT_STEP_REL = 1e-3  # h = 1e-3 * domain scale balances stencil vs rounding


def laplacian_numeric(u, z: complex, h: float, richardson: bool = True) -> float:
    """5-point Laplacian of a real-valued function of a complex argument.

    With ``richardson`` the O(h^2) stencil error is extrapolated away using
    steps h and h/2, leaving O(h^4).
    """
    def stencil(step):
        s = (u(z + step) + u(z - step) + u(z + 1j * step) + u(z - 1j * step)
             - 4.0 * u(z))
        return s / step**2

    coarse = stencil(h)
    if not richardson:
        return coarse
    fine = stencil(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def density_closed(family, z) -> float:
    """Expected zeros per unit area, closed form.

    Raises ValueError for families without one (use density_numeric).
    """
    require_in_domain(family.domain, z)
    if isinstance(family, PlanarFamily):
        return np.broadcast_to(1.0 / math.pi, np.shape(z)).copy() if np.ndim(z) else 1.0 / math.pi
    if isinstance(family, HyperbolicFamily):
        a = np.abs(z) ** 2
        if np.any(a >= 1.0):
            raise DomainError("hyperbolic density requires |z| < 1")
        return (1.0 / math.pi) * (1.0 - a) ** -2.0
    if isinstance(family, KostlanFamily):
        return (family.degree / math.pi) * (1.0 + np.abs(z) ** 2) ** -2.0
    raise ValueError(f"no closed-form density for {family!r}; use density_numeric")


def density_numeric(family, z: complex, h: float | None = None) -> float:
    """Density from the finite-difference Laplacian of (1/2) log ||Psi||^2.

    The stencil must stay inside the domain; points where ||Psi|| could
    vanish are excluded at family construction.
    """
    if h is None:
        h = DEFAULT_STEP_REL * family.domain.scale()
    for probe in (z + h, z - h, z + 1j * h, z - 1j * h):
        require_in_domain(family.domain, probe)

    def u(w):
        return 0.5 * math.log(float(np.real(family.squared_norm(w))))

    return laplacian_numeric(u, z, h, richardson=True) / (2.0 * math.pi)


def mu_region(family, region: Region) -> float:
    """Expected number of zeros in ``region``.

    Disks centered at the origin use the exact radial antiderivatives
    (r^2 planar; r^2/(1-r^2) hyperbolic; N r^2/(1+r^2) binomial); the
    planar constant density integrates to area/pi over any region. Other
    cases fall back to adaptive 2-D quadrature of the density.
    """
    require_region_in_domain(family.domain, region)
    if isinstance(family, PlanarFamily):
        return region.area() / math.pi
    centered = isinstance(region, Disk) and region.center == 0
    if centered and isinstance(family, HyperbolicFamily):
        r2 = region.radius**2
        return r2 / (1.0 - r2)
    if centered and isinstance(family, KostlanFamily):
        r2 = region.radius**2
        return family.degree * r2 / (1.0 + r2)
    return _mu_quadrature(family, region)


def _density_any(family, z):
    try:
        return density_closed(family, z)
    except ValueError:
        return density_numeric(family, z)


def _mu_quadrature(family, region) -> float:
    if isinstance(region, Disk):
        c = region.center

        def polar(t, theta):
            return _density_any(family, c + t * np.exp(1j * theta)) * t

        val, _ = integrate.dblquad(polar, 0.0, 2.0 * np.pi,
                                   0.0, region.radius, epsabs=1e-9, epsrel=1e-9)
        return val
    x0, x1, y0, y1 = region.bounding_box()
    val, _ = integrate.dblquad(lambda y, x: _density_any(family, complex(x, y)),
                               x0, x1, y0, y1, epsabs=1e-9, epsrel=1e-9)
    return val


def mu_against(family, bump: RadialBump) -> float:
    """Integral of the bump against the expected zero measure.

    Radially symmetric densities paired with an origin-centered bump reduce
    to a 1-D quadrature; the planar family's constant density allows the
    same reduction around any center. Everything else integrates in 2-D
    over the support disk.
    """
    support = Disk(bump.center, bump.outer)
    require_region_in_domain(family.domain, support)
    radial_family = isinstance(family, (PlanarFamily, HyperbolicFamily, KostlanFamily))
    if isinstance(family, PlanarFamily):
        val, _ = integrate.quad(lambda t: bump.profile(t) * (1.0 / math.pi) * 2 * math.pi * t,
                                0.0, bump.outer, points=[bump.inner], limit=200)
        return val
    if radial_family and bump.center == 0:
        def radial(t):
            return bump.profile(t) * density_closed(family, t) * 2.0 * math.pi * t

        val, _ = integrate.quad(radial, 0.0, bump.outer, points=[bump.inner], limit=200)
        return val
    c = bump.center

    def polar(t, theta):
        z = c + t * np.exp(1j * theta)
        return bump.profile(t) * _density_any(family, z) * t

    val, _ = integrate.dblquad(polar, 0.0, 2.0 * np.pi, 0.0, bump.outer,
                               epsabs=1e-9, epsrel=1e-9)
    return val


def density_grid(family, region: Region, nx: int, ny: int, form: str = "auto"):
    """Density sampled on an nx-by-ny grid over the region's bounding box.

    Returns (x, y, values) with NaN outside the region or where the stencil
    would leave the domain. ``form`` is "closed", "numeric", or "auto".
    """
    x0, x1, y0, y1 = region.bounding_box()
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    vals = np.full((ny, nx), np.nan)
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            z = complex(x, y)
            if not region.contains(z):
                continue
            try:
                if form == "closed":
                    vals[iy, ix] = density_closed(family, z)
                elif form == "numeric":
                    vals[iy, ix] = density_numeric(family, z)
                else:
                    vals[iy, ix] = _density_any(family, z)
            except (DomainError, ValueError):
                continue
    return xs, ys, vals
