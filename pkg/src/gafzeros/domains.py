"""Plane domains and regions.

Three kinds are supported: disks, axis-aligned rectangles, and plane
windows (a bounded disk around the origin through which an entire-plane
family is observed; the radius may be ``inf`` for families that need no
window). Disks and rectangles double as integration regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError

# slack for membership tests; points this close to the boundary count as inside
_REL_EDGE = 1e-12


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    def contains(self, z) -> bool:
        return bool(np.all(np.abs(np.asarray(z) - self.center)
                           <= self.radius * (1 + _REL_EDGE)))

    def max_abs(self) -> float:
        return abs(self.center) + self.radius

    def scale(self) -> float:
        return self.radius

    def area(self) -> float:
        return math.pi * self.radius**2

    def expanded(self, factor: float) -> "Disk":
        return Disk(self.center, self.radius * factor)

    def bounding_box(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)

    def to_config(self) -> dict:
        return {"kind": "disk", "center": [self.center.real, self.center.imag],
                "radius": self.radius}


@dataclass(frozen=True)
class Rectangle:
    corner_a: complex
    corner_b: complex

    def __post_init__(self):
        a, b = self.corner_a, self.corner_b
        if a.real == b.real or a.imag == b.imag:
            raise ValueError("rectangle corners must differ in both coordinates")

    @property
    def x0(self):
        return min(self.corner_a.real, self.corner_b.real)

    @property
    def x1(self):
        return max(self.corner_a.real, self.corner_b.real)

    @property
    def y0(self):
        return min(self.corner_a.imag, self.corner_b.imag)

    @property
    def y1(self):
        return max(self.corner_a.imag, self.corner_b.imag)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def contains(self, z) -> bool:
        z = np.asarray(z)
        pad = self.scale() * _REL_EDGE
        return bool(np.all((z.real >= self.x0 - pad) & (z.real <= self.x1 + pad)
                           & (z.imag >= self.y0 - pad) & (z.imag <= self.y1 + pad)))

    def max_abs(self) -> float:
        corners = [complex(x, y) for x in (self.x0, self.x1) for y in (self.y0, self.y1)]
        return max(abs(c) for c in corners)

    def scale(self) -> float:
        return 0.5 * max(self.x1 - self.x0, self.y1 - self.y0)

    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def expanded(self, factor: float) -> "Rectangle":
        c = self.center
        return Rectangle(c + (self.corner_a - c) * factor,
                         c + (self.corner_b - c) * factor)

    def bounding_box(self):
        return (self.x0, self.x1, self.y0, self.y1)

    def to_config(self) -> dict:
        return {"kind": "rectangle",
                "corner_a": [self.corner_a.real, self.corner_a.imag],
                "corner_b": [self.corner_b.real, self.corner_b.imag]}


@dataclass(frozen=True)
class PlaneWindow:
    """Bounded observation window for entire-plane families: the disk |z| <= radius."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"window radius must be positive, got {self.radius}")

    @property
    def center(self) -> complex:
        return 0j

    def contains(self, z) -> bool:
        if math.isinf(self.radius):
            return True
        return bool(np.all(np.abs(np.asarray(z)) <= self.radius * (1 + _REL_EDGE)))

    def max_abs(self) -> float:
        return self.radius

    def scale(self) -> float:
        return self.radius if math.isfinite(self.radius) else 1.0

    def area(self) -> float:
        return math.pi * self.radius**2

    def expanded(self, factor: float) -> "PlaneWindow":
        return PlaneWindow(self.radius * factor)

    def bounding_box(self):
        r = self.radius
        return (-r, r, -r, r)

    def to_config(self) -> dict:
        return {"kind": "plane-window", "radius": self.radius}


Region = Union[Disk, Rectangle]
Domain = Union[Disk, Rectangle, PlaneWindow]


def region_inside(outer: Domain, inner: Region) -> bool:
    """True if ``inner`` lies entirely inside ``outer``."""
    if isinstance(outer, PlaneWindow) and math.isinf(outer.radius):
        return True
    if isinstance(inner, Disk):
        if isinstance(outer, (Disk, PlaneWindow)):
            oc = outer.center if isinstance(outer, Disk) else 0j
            return abs(inner.center - oc) + inner.radius <= outer.radius * (1 + _REL_EDGE)
        x0, x1, y0, y1 = outer.bounding_box()
        c, r = inner.center, inner.radius
        return (c.real - r >= x0 and c.real + r <= x1
                and c.imag - r >= y0 and c.imag + r <= y1)
    # rectangle inner: all four corners inside is enough for convex outers
    corners = [complex(x, y)
               for x in (inner.x0, inner.x1) for y in (inner.y0, inner.y1)]
    return all(outer.contains(c) for c in corners)


def require_in_domain(domain: Domain, z) -> None:
    if not domain.contains(z):
        raise DomainError(f"point {z!r} lies outside the domain {domain!r}")


def require_region_in_domain(domain: Domain, region: Region) -> None:
    if not region_inside(domain, region):
        raise DomainError(f"region {region!r} is not contained in the domain {domain!r}")


def domain_from_config(cfg: dict) -> Domain:
    kind = cfg.get("kind")
    if kind == "disk":
        cx, cy = cfg["center"]
        return Disk(complex(cx, cy), float(cfg["radius"]))
    if kind == "rectangle":
        ax, ay = cfg["corner_a"]
        bx, by = cfg["corner_b"]
        return Rectangle(complex(ax, ay), complex(bx, by))
    if kind == "plane-window":
        return PlaneWindow(float(cfg["radius"]))
    raise ValueError(f"unknown domain kind: {kind!r}")
