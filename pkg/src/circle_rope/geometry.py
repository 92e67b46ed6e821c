"""Coordinate transforms that project image-token grid indices onto a circle.

The pipeline: center the grid, assign each point a mixed polar angle
(spatial-origin angle blended with grid-index angle), place the points on a
circle of chosen radius in a working XY plane, then rotate that circle into
the 3D plane orthogonal to the text index direction. A final affine blend
(dual-frame fusion) interpolates between the projected circle and the
centered grid.

Point sets are (N, 3) float arrays. Axis 0 is the temporal/sequential axis
(zero for single-image tokens), axis 1 carries the height coordinate, axis 2
the width coordinate. Text tokens live on the line t * (1, 1, 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

TWO_PI = 2.0 * np.pi


class GeometryError(ValueError):
    """Invalid input to a geometry transform."""


@dataclass(frozen=True)
class GridSpec:
    """Token grid of an image: `width` columns by `height` rows."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise GeometryError(f"grid must be at least 1x1, got {self.width}x{self.height}")

    @property
    def num_tokens(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class FixedRadius:
    """Use a predefined constant circle radius."""

    value: float

    def __post_init__(self) -> None:
        if not self.value > 0:
            raise GeometryError(f"fixed radius must be positive, got {self.value}")


@dataclass(frozen=True)
class AutoRadius:
    """Scale the radius from the spread of the centered points: k * max L2 norm."""

    k: float

    def __post_init__(self) -> None:
        if not self.k > 0:
            raise GeometryError(f"auto radius factor must be positive, got {self.k}")


RadiusStrategy = Union[FixedRadius, AutoRadius]


def _unit_111() -> np.ndarray:
    return np.array([1.0, 1.0, 1.0])


@dataclass(frozen=True)
class CipConfig:
    """Parameters of the circular projection.

    alpha: weight on the spatial-origin angle (1 - alpha on the grid-index angle).
    radius: FixedRadius or AutoRadius.
    beta: dual-frame fusion weight on the projected coordinates.
    text_direction: direction of the text index line; serves as the circle normal.
    """

    alpha: float = 0.5
    radius: RadiusStrategy = FixedRadius(10.0)
    beta: float = 0.1
    text_direction: np.ndarray = field(default_factory=_unit_111)

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise GeometryError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise GeometryError(f"beta must be in [0, 1], got {self.beta}")
        direction = np.asarray(self.text_direction, dtype=float)
        if direction.shape != (3,):
            raise GeometryError("text_direction must be a 3-vector")
        if not np.linalg.norm(direction) > 0:
            raise GeometryError("text_direction must have nonzero norm")
        object.__setattr__(self, "text_direction", direction)


@dataclass(frozen=True)
class PlaneBasis:
    """Right-handed orthonormal basis (u, v, n) with n the target plane normal."""

    n: np.ndarray
    u: np.ndarray
    v: np.ndarray


def grid_coords(grid: GridSpec) -> np.ndarray:
    """Integer grid indices in row-major order, shape (h*w, 3).

    Row j, column i maps to (0, j, i): axis 1 holds the height coordinate,
    axis 2 the width coordinate.
    """
    jj, ii = np.meshgrid(np.arange(grid.height), np.arange(grid.width), indexing="ij")
    points = np.zeros((grid.num_tokens, 3))
    points[:, 1] = jj.ravel()
    points[:, 2] = ii.ravel()
    return points


def centralize(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Shift the midrange center of a point set to the origin.

    Returns (centered points, center). The center is the component-wise
    midpoint of the bounding box, (max + min) / 2.
    """
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        raise GeometryError("empty point set")
    center = 0.5 * (points.max(axis=0) + points.min(axis=0))
    return points - center, center


def spatial_origin_angles(centered: np.ndarray) -> np.ndarray:
    """Min-max normalized polar angles of the centered (height, width) coords.

    The raw angle is atan2(height, width). The raw range [theta_min, theta_max]
    is stretched to [0, 2*pi); when all raw angles coincide the output is zero
    everywhere. The point at theta_max wraps to 0 (mod 2*pi) to keep the output
    inside the half-open interval.
    """
    centered = np.asarray(centered, dtype=float)
    raw = np.arctan2(centered[:, 1], centered[:, 2])
    delta = raw.max() - raw.min()
    if delta <= 0:
        return np.zeros(len(raw))
    return np.mod((raw - raw.min()) / delta * TWO_PI, TWO_PI)


def grid_index_angles(grid: GridSpec) -> np.ndarray:
    """Uniformly spaced angles k/N * 2*pi for flattened (row-major) index k."""
    n = grid.num_tokens
    return np.arange(n) / n * TWO_PI


def mix_angles(sa: np.ndarray, ga: np.ndarray, alpha: float) -> np.ndarray:
    """Weighted average alpha * sa + (1 - alpha) * ga."""
    sa = np.asarray(sa, dtype=float)
    ga = np.asarray(ga, dtype=float)
    if sa.shape != ga.shape:
        raise GeometryError(f"angle list length mismatch: {sa.shape} vs {ga.shape}")
    if alpha == 1.0:
        return sa.copy()
    if alpha == 0.0:
        return ga.copy()
    return alpha * sa + (1.0 - alpha) * ga


def compute_radius(centered: np.ndarray, strategy: RadiusStrategy) -> float:
    """Resolve the circle radius for a centered point set."""
    if isinstance(strategy, FixedRadius):
        return strategy.value
    centered = np.asarray(centered, dtype=float)
    if centered.size == 0:
        raise GeometryError("empty point set")
    max_norm = float(np.linalg.norm(centered[:, 1:3], axis=1).max())
    if max_norm == 0.0:
        raise GeometryError("degenerate radius")
    return strategy.k * max_norm


def map_to_circle(angles: np.ndarray, radius: float) -> np.ndarray:
    """Place angles on a circle of the given radius in the working XY plane.

    Output rows are (R*cos, R*sin, 0) working coordinates.
    """
    if not radius > 0:
        raise GeometryError(f"radius must be positive, got {radius}")
    angles = np.asarray(angles, dtype=float)
    out = np.zeros((len(angles), 3))
    out[:, 0] = radius * np.cos(angles)
    out[:, 1] = radius * np.sin(angles)
    return out


def build_plane_basis(text_direction: np.ndarray) -> PlaneBasis:
    """Orthonormal basis of the plane orthogonal to the text direction.

    n is the normalized direction, u = normalize((-n_y, n_x, 0)), v = n x u.
    When n is parallel to the z axis that u is degenerate; fall back to
    u = (1, 0, 0).
    """
    direction = np.asarray(text_direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise GeometryError("text_direction must have nonzero norm")
    n = direction / norm
    u_raw = np.array([-n[1], n[0], 0.0])
    u_norm = np.linalg.norm(u_raw)
    if u_norm < 1e-12:
        u = np.array([1.0, 0.0, 0.0])
    else:
        u = u_raw / u_norm
    v = np.cross(n, u)
    return PlaneBasis(n=n, u=u, v=v)


def rotate_to_plane(circle_points: np.ndarray, basis: PlaneBasis) -> np.ndarray:
    """Rotate circle points from the working XY plane into the target plane.

    Each (x, y, 0) working point becomes x*u + y*v in index space.
    """
    circle_points = np.asarray(circle_points, dtype=float)
    return np.outer(circle_points[:, 0], basis.u) + np.outer(circle_points[:, 1], basis.v)


def cip_transform(grid: GridSpec, config: CipConfig) -> tuple[np.ndarray, np.ndarray]:
    """Full circular projection of a grid.

    Returns (projected, centered): the points on the target-plane circle and
    the centered grid coordinates, both in grid_coords order.
    """
    points = grid_coords(grid)
    centered, _ = centralize(points)
    sa = spatial_origin_angles(centered)
    ga = grid_index_angles(grid)
    mixed = mix_angles(sa, ga, config.alpha)
    radius = compute_radius(centered, config.radius)
    circle = map_to_circle(mixed, radius)
    basis = build_plane_basis(config.text_direction)
    projected = rotate_to_plane(circle, basis)
    return projected, centered


def dual_frame_fusion(projected: np.ndarray, centered: np.ndarray, beta: float) -> np.ndarray:
    """Blend projected and centered coordinates: beta*projected + (1-beta)*centered."""
    projected = np.asarray(projected, dtype=float)
    centered = np.asarray(centered, dtype=float)
    if projected.shape != centered.shape:
        raise GeometryError(f"point set shape mismatch: {projected.shape} vs {centered.shape}")
    if beta == 1.0:
        return projected.copy()
    if beta == 0.0:
        return centered.copy()
    return beta * projected + (1.0 - beta) * centered
