"""Poincaré disk kernel in polar coordinates.

Two coordinate systems are used throughout the package:

* ``DiskPoint`` -- Euclidean polar coordinates inside the unit disk,
  ``r_e in [0, 1)``. This is what gets exported and plotted.
* ``NaturalPoint`` -- hyperbolic polar coordinates, where ``r_h`` is the
  hyperbolic distance from the origin. Training happens here.

The two radii are related by ``r_h = 2 artanh(r_e)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# arctanh overflows at the boundary, which sits at infinite distance
MAX_DISK_RADIUS = 1.0 - 1e-9


class BoundaryClampWarning(RuntimeWarning):
    """A disk radius at or beyond the boundary was clamped."""


def normalize_angle(theta: float) -> float:
    """Wrap an angle into ``[0, 2*pi)``."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    if t >= TWO_PI:
        t = 0.0
    return t


def normalize_angles(theta: np.ndarray) -> np.ndarray:
    t = np.mod(theta, TWO_PI)
    return np.where(t >= TWO_PI, 0.0, t)


@dataclass(frozen=True)
class DiskPoint:
    r_e: float
    theta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r_e < 1.0:
            raise ValueError(f"disk radius must lie in [0, 1), got {self.r_e}")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def cartesian(self) -> tuple[float, float]:
        return self.r_e * math.cos(self.theta), self.r_e * math.sin(self.theta)


@dataclass(frozen=True)
class NaturalPoint:
    # r_h == 0 is accepted here so the origin can be converted and exported;
    # the trainer keeps every stored radius above its own floor.
    r_h: float
    theta: float

    def __post_init__(self) -> None:
        if not self.r_h >= 0.0:
            raise ValueError(f"hyperbolic radius must be >= 0, got {self.r_h}")
        object.__setattr__(self, "theta", normalize_angle(self.theta))


def _clamp_disk_radius(r_e: float) -> float:
    if r_e > MAX_DISK_RADIUS:
        warnings.warn(
            f"disk radius {r_e!r} clamped to {MAX_DISK_RADIUS!r}",
            BoundaryClampWarning,
            stacklevel=3,
        )
        return MAX_DISK_RADIUS
    return r_e


def origin_distance(p: DiskPoint | float) -> float:
    """Hyperbolic distance of a disk point from the origin, ``2 artanh(r_e)``."""
    r_e = p.r_e if isinstance(p, DiskPoint) else float(p)
    if r_e < 0.0:
        raise ValueError(f"disk radius must be >= 0, got {r_e}")
    return 2.0 * math.atanh(_clamp_disk_radius(r_e))


def to_natural(p: DiskPoint) -> NaturalPoint:
    return NaturalPoint(origin_distance(p), p.theta)


def to_disk(p: NaturalPoint) -> DiskPoint:
    return DiskPoint(math.tanh(p.r_h / 2.0), p.theta)


def inner(x: NaturalPoint, y: NaturalPoint) -> float:
    """Polar inner product ``r_x r_y cos(theta_x - theta_y)``.

    In disk coordinates this is ``4 artanh(r_x) artanh(r_y) cos(dtheta)``.
    """
    return x.r_h * y.r_h * math.cos(x.theta - y.theta)


def disk_inner(x: DiskPoint, y: DiskPoint) -> float:
    return (
        4.0
        * math.atanh(_clamp_disk_radius(x.r_e))
        * math.atanh(_clamp_disk_radius(y.r_e))
        * math.cos(x.theta - y.theta)
    )


def circumference(radius: float) -> float:
    """Circumference of a hyperbolic circle of the given hyperbolic radius."""
    if radius < 0.0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    return TWO_PI * math.sinh(radius)


# Array forms used by the trainer and exporters.


def natural_radius(r_e: np.ndarray) -> np.ndarray:
    r_e = np.asarray(r_e, dtype=np.float64)
    if np.any(r_e < 0.0):
        raise ValueError("disk radii must be >= 0")
    if np.any(r_e > MAX_DISK_RADIUS):
        warnings.warn("disk radii clamped at the boundary", BoundaryClampWarning, stacklevel=2)
    return 2.0 * np.arctanh(np.minimum(r_e, MAX_DISK_RADIUS))


def disk_radius(r_h: np.ndarray) -> np.ndarray:
    return np.tanh(np.asarray(r_h, dtype=np.float64) / 2.0)


def to_cartesian(r_h: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Map natural polar coordinates to ``(x, y)`` on the unit disk, shape ``(n, 2)``."""
    r_e = disk_radius(r_h)
    theta = np.asarray(theta, dtype=np.float64)
    return np.column_stack([r_e * np.cos(theta), r_e * np.sin(theta)])
