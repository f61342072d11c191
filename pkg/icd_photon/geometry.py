"""Triangle geometry of donor, acceptor and mediator from Cartesian positions."""

from __future__ import annotations

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DegenerateGeometryError, ValidationError
from .models import Position, TriangleGeometry

logger = logging.getLogger(__name__)

DEFAULT_ANGLE_TOL = 1e-8  # rad
DEFAULT_DIST_EPS = 1e-15  # m

PointLike = Union[Position, np.ndarray, Tuple[float, float, float]]


def as_vector(point: PointLike) -> np.ndarray:
    """Return a point as a float array of shape (3,)."""
    if isinstance(point, Position):
        return point.to_array()
    vec = np.asarray(point, dtype=float)
    if vec.shape != (3,):
        raise ValidationError(f"Expected a 3-vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValidationError(f"Point has non-finite component: {vec}")
    return vec


def separation(r: PointLike, r_prime: PointLike,
               dist_eps: float = DEFAULT_DIST_EPS) -> Tuple[float, np.ndarray]:
    """Distance |r - r'| and unit vector along r - r'."""
    diff = as_vector(r) - as_vector(r_prime)
    rho = float(np.linalg.norm(diff))
    if rho < dist_eps:
        raise DegenerateGeometryError(
            f"Points coincide (separation {rho:.3e} m < {dist_eps:.1e} m)")
    return rho, diff / rho


def _vertex_angle(apex: np.ndarray, p: np.ndarray, q: np.ndarray) -> float:
    """Interior angle at apex between the rays to p and q."""
    u = p - apex
    v = q - apex
    # same angle as the law of cosines, accurate near 0 and π
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


def derive_geometry(r_D: PointLike, r_A: PointLike, r_M: PointLike,
                    angle_tol: float = DEFAULT_ANGLE_TOL,
                    dist_eps: float = DEFAULT_DIST_EPS) -> TriangleGeometry:
    """Side lengths and opposite-vertex angles of the D-M-A triangle.

    Raises DegenerateGeometryError when two points coincide.
    """
    d, a, m = as_vector(r_D), as_vector(r_A), as_vector(r_M)

    rho_AD, _ = separation(a, d, dist_eps)
    rho_DM, _ = separation(m, d, dist_eps)
    rho_MA, _ = separation(a, m, dist_eps)

    theta_AD = _vertex_angle(m, d, a)  # at mediator
    theta_DM = _vertex_angle(a, d, m)  # at acceptor
    theta_MA = _vertex_angle(d, a, m)  # at donor

    angles = {"AD": theta_AD, "DM": theta_DM, "MA": theta_MA}
    largest = max(angles, key=angles.get)
    straight = angles[largest] > math.pi - angle_tol
    collinear = straight or min(angles.values()) < angle_tol

    side: Optional[str] = None
    if straight:
        # snap to the exact collinear angles so the closed forms see 0 and π
        angles = {key: (math.pi if key == largest else 0.0) for key in angles}
        side = {"AD": "between", "DM": "beyond-acceptor", "MA": "beyond-donor"}[largest]

    geom = TriangleGeometry(
        rho_AD=rho_AD,
        rho_DM=rho_DM,
        rho_MA=rho_MA,
        theta_AD=angles["AD"],
        theta_DM=angles["DM"],
        theta_MA=angles["MA"],
        collinear=collinear,
        mediator_between=side == "between",
        mediator_side=side,
    )
    logger.debug("Derived geometry %s", geom)
    return geom


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rotation by angle (rad) about axis, via the Rodrigues formula."""
    n = as_vector(axis)
    n = n / np.linalg.norm(n)
    K = np.array([[0.0, -n[2], n[1]],
                  [n[2], 0.0, -n[0]],
                  [-n[1], n[0], 0.0]])
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)
