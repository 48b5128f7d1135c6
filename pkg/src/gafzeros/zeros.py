"""Zero location and counting for realized samples.

Counting uses the argument principle: (1/2*pi*i) * contour integral of
psi'/psi, evaluated by composite trapezoid sums with dyadic refinement
(spectrally accurate on circles). Location subdivides the region quadtree
style until each cell isolates one zero by count, then polishes with Newton
iterations. Companion-matrix eigenvalues provide an exact oracle for the
realized polynomials.

Every sample realizes a polynomial (finite families directly, infinite
families through their truncation), so internal sweeps evaluate that
polynomial raw; the public region is validated against the family domain
once, and only zeros inside it are reported.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .bumps import RadialBump
from .domains import Disk, PlaneWindow, Rectangle, Region, region_inside, \
    require_region_in_domain
from .errors import BoundaryZeroError, ConvergenceError, DomainError
from .sampling import GafSample

log = logging.getLogger(__name__)

# dyadic contour refinement; the deep levels are only reached when a zero
# grazes the contour, where resolving the documented 1e-6-per-step jitter
# needs node spacing ~2e-6 of the circumference
_M_START = 64
_M_MAX = 1 << 22
_GAP_TOL = 1e-3
# min |psi| on the contour below this fraction of the median flags a boundary zero
_BOUNDARY_RATIO = 1e-11
# documented retry jitter: radius scaled by (1 + 1e-6 * k) on the k-th retry
_JITTER_STEP = 1e-6
_MAX_JITTER_RETRIES = 5


@dataclass(frozen=True)
class ZeroSet:
    """Located zeros with multiplicities; the counting-measure interface."""

    zeros: Tuple[Tuple[complex, int], ...]
    region: Optional[Region]
    method: str
    degree_drop: int = field(default=0, compare=False)

    @property
    def count(self) -> int:
        return sum(m for _, m in self.zeros)

    def count_in(self, region: Region) -> int:
        return sum(m for z, m in self.zeros if region.contains(z))

    def restricted_to(self, region: Region) -> "ZeroSet":
        kept = tuple((z, m) for z, m in self.zeros if region.contains(z))
        return ZeroSet(kept, region, self.method, self.degree_drop)


def _contour_nodes(region: Region, m: int):
    """Counterclockwise boundary nodes and trapezoid weights for dz."""
    if isinstance(region, (Disk, PlaneWindow)):
        center = region.center if isinstance(region, Disk) else 0j
        theta = 2.0 * np.pi * np.arange(m) / m
        z = center + region.radius * np.exp(1j * theta)
        w = 1j * (z - center) * (2.0 * np.pi / m)
        return z, w
    k = max(m // 4, 4)
    x0, x1, y0, y1 = region.bounding_box()
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    zs, ws = [], []
    for p, q in zip(corners, corners[1:] + corners[:1]):
        t = np.arange(k + 1) / k
        z = p + (q - p) * t
        w = np.full(k + 1, (q - p) / k, dtype=complex)
        w[0] *= 0.5
        w[-1] *= 0.5
        zs.append(z)
        ws.append(w)
    return np.concatenate(zs), np.concatenate(ws)


def _contour_integral(sample: GafSample, region: Region, m: int):
    z, w = _contour_nodes(region, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        fz = sample.evaluate_raw(z)
        dfz = sample.derivative_raw(z)
        integrand = dfz / fz * w
    absf = np.abs(fz)
    if absf.min() == 0.0 or not np.all(np.isfinite(integrand)):
        raise BoundaryZeroError("contour node hit a zero of the sample")
    value = integrand.sum() / (2j * np.pi)
    return value, absf


def _settled_count(sample: GafSample, region: Region,
                   gap_tol: float = _GAP_TOL) -> tuple[int, float]:
    """Refined count plus max |psi| on the contour (the local scale).

    Accepts once the value is within gap_tol of an integer and the previous
    (coarser) refinement already pointed at the same integer within 0.25.
    """
    prev = None
    absf = None
    m = _M_START
    while m <= _M_MAX:
        value, absf = _contour_integral(sample, region, m)
        nearest = round(value.real)
        if (abs(value - nearest) <= gap_tol and prev is not None
                and round(prev.real) == nearest and abs(prev - nearest) <= 0.25):
            if absf.min() < _BOUNDARY_RATIO * np.median(absf):
                raise BoundaryZeroError(
                    f"min |psi| on contour {absf.min():.3e}; zero grazes the boundary")
            if nearest < 0:
                raise ConvergenceError(f"contour integral converged to {value:.6f} < 0")
            return int(nearest), float(absf.max())
        prev = value
        m *= 2
    if absf is not None and absf.min() < 1e-4 * np.median(absf):
        # refinement stalls exactly when a zero sits this close to the
        # contour; let the caller's jitter machinery take over
        raise BoundaryZeroError("contour refinement stalled next to a near-boundary zero")
    raise ConvergenceError(
        f"argument-principle integral did not settle (last value {prev})")


def count_in_region(sample: GafSample, region: Region, *,
                    gap_tol: float = _GAP_TOL) -> int:
    """Number of zeros inside ``region``, counted with multiplicity.

    The contour sum is refined dyadically until the unrounded value sits
    within ``gap_tol`` of an integer and two consecutive refinements agree.
    Raises BoundaryZeroError when a zero (numerically) touches the contour;
    callers may retry with a perturbed region, see count_in_region_robust.
    """
    require_region_in_domain(sample.family.domain, region)
    count, _ = _settled_count(sample, region, gap_tol)
    return count


def count_in_region_robust(sample: GafSample, region: Region, *,
                           retries: int = _MAX_JITTER_RETRIES):
    """count_in_region with the documented boundary-zero jitter.

    On the k-th retry the region is scaled about its center by
    (1 + 1e-6 * k). Returns (count, effective_region); every retry is
    logged, never silent.
    """
    require_region_in_domain(sample.family.domain, region)
    for k in range(retries + 1):
        reg = region if k == 0 else region.expanded(1.0 + _JITTER_STEP * k)
        try:
            count, _ = _settled_count(sample, reg)
            return count, reg
        except BoundaryZeroError:
            if k == retries:
                raise
            log.info("boundary zero detected; retry %d with region scaled by %g",
                     k + 1, 1.0 + _JITTER_STEP * (k + 1))
    raise BoundaryZeroError("unreachable")  # pragma: no cover


# ---------------------------------------------------------------- location

_SPLIT_OFFSETS = [(0.0, 0.0), (1.3e-3, 0.7e-3), (-0.9e-3, 1.7e-3),
                  (2.9e-3, -1.3e-3), (-2.3e-3, -3.1e-3), (4.1e-3, 3.7e-3)]


def _split_cell(sample, cell: Rectangle, expected: int):
    """Split into 4 children whose counts sum to the parent count.

    The split lines are jittered away from the midpoint when a zero sits on
    an internal edge (detected through BoundaryZeroError or a count
    mismatch).
    """
    x0, x1, y0, y1 = cell.bounding_box()
    w, h = x1 - x0, y1 - y0
    for ox, oy in _SPLIT_OFFSETS:
        mx = x0 + w * (0.5 + ox)
        my = y0 + h * (0.5 + oy)
        children = [Rectangle(complex(x0, y0), complex(mx, my)),
                    Rectangle(complex(mx, y0), complex(x1, my)),
                    Rectangle(complex(x0, my), complex(mx, y1)),
                    Rectangle(complex(mx, my), complex(x1, y1))]
        try:
            counted = [_settled_count(sample, c) for c in children]
        except BoundaryZeroError:
            continue
        if sum(c for c, _ in counted) == expected:
            return [(child, c, s) for child, (c, s) in zip(children, counted) if c > 0]
        log.info("cell split lost a zero on an internal edge; retrying with jitter")
    raise ConvergenceError("could not split cell without hitting a zero")


def _newton_polish(sample, cell: Rectangle, local_scale: float, scale: float):
    """Newton from the cell center; None when it escapes or stalls.

    The cell isolates exactly one zero by count, so a converged iterate
    must land (essentially) inside the cell; anything else means Newton
    drifted to a different zero and the cell needs further bisection.
    """
    z = cell.center
    leash = 4.0 * cell.scale() + 1e-12 * scale
    for _ in range(80):
        fz = sample.evaluate_raw(z)
        if abs(fz) <= 1e-14 * local_scale:
            break
        dfz = sample.derivative_raw(z)
        if dfz == 0:
            return None
        step = fz / dfz
        z = z - step
        if abs(z - cell.center) > leash:
            return None
        if abs(step) <= 1e-16 * max(abs(z), 1e-6 * scale):
            break
    if abs(sample.evaluate_raw(z)) > 1e-12 * max(local_scale, 1e-300):
        return None
    if not cell.expanded(1.001).contains(z):
        return None
    return z


def locate(sample: GafSample, region: Region, *,
           verify_multiplicity: bool = True) -> ZeroSet:
    """Locate all zeros in ``region`` by quadtree isolation plus Newton polish.

    Cells are subdivided until they hold at most one zero by count; cells
    that reach the minimum size with count >= 2 are reported as a multiple
    zero at the cell center. The multiplicity-weighted total is
    cross-checked against the whole-region count.
    """
    require_region_in_domain(sample.family.domain, region)
    total, eff_region = count_in_region_robust(sample, region)
    if total == 0:
        return ZeroSet((), region, "argument-principle")
    scale = eff_region.scale()
    min_cell = 1e-9 * scale

    x0, x1, y0, y1 = eff_region.bounding_box()
    pad = 1e-7 * scale  # keep region-boundary zeros strictly inside the root cell
    root = Rectangle(complex(x0 - pad, y0 - pad), complex(x1 + pad, y1 + pad))

    root_count, root_scale = _robust_cell_count(sample, root)
    found: list[tuple[complex, int]] = []
    stack = [(root, root_count, root_scale)]
    while stack:
        cell, count, local_scale = stack.pop()
        if count == 0:
            continue
        if count == 1:
            z = _newton_polish(sample, cell, local_scale, scale)
            if z is not None:
                found.append((z, 1))
                continue
            # Newton divergence: bisect further
        if cell.scale() <= min_cell:
            found.append((cell.center, count))
            continue
        stack.extend(_split_cell(sample, cell, count))

    if verify_multiplicity:
        found = _verify_multiplicities(sample, found, scale)

    zs = _merge_clusters(found, _MERGE_REL * scale)
    kept = tuple((z, m) for z, m in zs if eff_region.contains(z))
    zeroset = ZeroSet(kept, region, "argument-principle")
    if zeroset.count != total:
        raise ConvergenceError(
            f"located multiplicities sum to {zeroset.count}, expected {total}")
    return zeroset


def _robust_cell_count(sample, cell: Rectangle):
    for k in range(_MAX_JITTER_RETRIES + 1):
        c = cell if k == 0 else cell.expanded(1.0 + _JITTER_STEP * k)
        try:
            return _settled_count(sample, c)
        except BoundaryZeroError:
            if k == _MAX_JITTER_RETRIES:
                raise
            log.info("root cell boundary zero; expanding by %g",
                     1 + _JITTER_STEP * (k + 1))


def _verify_multiplicities(sample, found, scale):
    """Recount each polished zero on a tight enclosing disk."""
    verified = []
    positions = [z for z, _ in found]
    for i, (z, m) in enumerate(found):
        others = [abs(z - w) for j, w in enumerate(positions) if j != i]
        tight = min([1e-6 * scale, *[0.4 * d for d in others if d > 0]])
        tight = max(tight, 1e3 * np.finfo(float).eps * max(abs(z), 1e-3 * scale))
        try:
            mult, _ = _settled_count(sample, Disk(z, tight))
            verified.append((z, max(mult, 1)))
        except (BoundaryZeroError, ConvergenceError):
            verified.append((z, m))
    return verified


def _merge_clusters(found, tol):
    """Greedy single-linkage merge of near-coincident zeros within ``tol``."""
    merged: list[list] = []
    for z, m in found:
        for entry in merged:
            if abs(entry[0] - z) <= tol:
                w = entry[1] + m
                entry[0] = (entry[0] * entry[1] + z * m) / w
                entry[1] = w
                break
        else:
            merged.append([z, m])
    return [(z, m) for z, m in merged]


# ------------------------------------------------------- companion oracle

def companion_roots(sample: GafSample, region: Optional[Region] = None) -> ZeroSet:
    """All roots of the realized polynomial via companion-matrix eigenvalues.

    This is the exact oracle for finite polynomial ensembles and the fast
    bulk path for truncated ones. Exact zero leading coefficients are
    trimmed and reported through ``degree_drop``. With a region, roots are
    filtered to it after clustering.
    """
    if region is not None:
        require_region_in_domain(sample.family.domain, region)
    coeffs = np.asarray(sample.monomial_coefficients)
    trimmed = np.trim_zeros(coeffs, "b")
    if len(trimmed) == 0:
        raise ValueError("the realized polynomial is identically zero")
    drop = len(coeffs) - len(trimmed)
    if drop:
        log.warning("leading coefficient vanished; degree dropped by %d", drop)
    if len(trimmed) == 1:
        return ZeroSet((), region, "companion-matrix", degree_drop=drop)
    roots = np.polynomial.polynomial.polyroots(trimmed)
    if region is not None:
        scale = region.scale() + abs(getattr(region, "center", 0j))
    else:
        scale = max(1.0, float(np.abs(roots).max()))
    clustered = _cluster_roots(roots, scale)
    zs = ZeroSet(tuple(clustered), region, "companion-matrix", degree_drop=drop)
    if region is not None:
        zs = zs.restricted_to(region)
    return zs


_MERGE_REL = 1e-7  # base merge tolerance relative to the region scale
_MULT_CAP = 6      # largest multiplicity hypothesis for eigenvalue clustering


def _cluster_tol(scale: float, m: int) -> float:
    # an exact m-fold root smears eigenvalues over ~eps^(1/m); cap the
    # hypothesis so random well-separated roots never chain-merge
    m = min(m, _MULT_CAP)
    return scale * max(_MERGE_REL, 10.0 * np.finfo(float).eps ** (1.0 / m))


def _cluster_roots(roots: np.ndarray, scale: float):
    if len(roots) == 1:
        return [(complex(roots[0]), 1)]
    # fast path: with no pair inside the widest linking tolerance every
    # root is simple, which is the probability-one case for random samples
    dist = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(dist, np.inf)
    if dist.min() > _cluster_tol(scale, _MULT_CAP):
        ordered = sorted(roots, key=lambda z: (z.real, z.imag))
        return [(complex(z), 1) for z in ordered]
    return _cluster_roots_slow(roots, scale)


def _cluster_roots_slow(roots: np.ndarray, scale: float):
    def link(pts: Sequence[complex], tol: float):
        groups: list[list[complex]] = []
        for p in pts:
            joined = None
            for g in groups:
                if g and any(abs(p - q) <= tol for q in g):
                    if joined is None:
                        g.append(p)
                        joined = g
                    else:
                        joined.extend(g)
                        g.clear()
            if joined is None:
                groups.append([p])
        return [g for g in groups if g]

    def spread(g):
        c = sum(g) / len(g)
        return max(abs(p - c) for p in g)

    def cluster(pts, m_hyp):
        out = []
        for g in link(pts, _cluster_tol(scale, m_hyp)):
            if len(g) == 1:
                out.append((g[0], 1))
            elif m_hyp > 1 and spread(g) > _cluster_tol(scale, len(g)):
                out.extend(cluster(g, m_hyp - 1))
            else:
                out.append((sum(g) / len(g), len(g)))
        return out

    return sorted(cluster(list(roots), len(roots)),
                  key=lambda zm: (zm[0].real, zm[0].imag))


def linear_statistic(zeroset: ZeroSet, bump: RadialBump) -> float:
    """Integral of the bump against the counting measure: sum of mult * phi(zero).

    The zero set's region must cover the bump's support disk so that no
    zero inside the support was missed.
    """
    support = Disk(bump.center, bump.outer)
    if zeroset.region is not None and not region_inside(zeroset.region, support):
        raise DomainError("zero set region does not cover the bump support")
    return float(sum(m * bump(z) for z, m in zeroset.zeros))
