"""Virtual LiDAR that sees around the corner through a specular panel.

The sensor model is a hard range gate: a user is detected when a specular
sensor -> panel -> user path exists and its length is within the panel
material's ``lidar_max_range``. Detected positions carry seeded Gaussian
noise, and the estimated position is turned back into a reflection point and
a transmit angle of departure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .scene import RectReflector, Scene, azimuth, specular_path, vec

DEFAULT_NOISE_SIGMA = 0.02  # m
_TIE_TOL = 1e-12


class DetectStatus(enum.Enum):
    DETECTED = "detected"
    NO_PATH = "no_path"
    OUT_OF_RANGE = "out_of_range"


@dataclass(frozen=True, eq=False)
class LidarDetection:
    estimated_user_position: np.ndarray
    via_reflector: RectReflector
    two_way_range: float
    n_points: int
    points: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class SteeringEstimate:
    reflection_point: np.ndarray
    theta_i: float
    theta_t: float
    aod: float


def probe_user(scene: Scene, user_position, reflector: RectReflector
               ) -> tuple[DetectStatus, float | None]:
    """Noise-free visibility check; returns the status and the two-way range."""
    try:
        path = specular_path(scene.lidar_position, user_position, reflector, scene.occluders)
    except ValueError:
        return DetectStatus.NO_PATH, None
    if path is None:
        return DetectStatus.NO_PATH, None
    if path.length > reflector.material.lidar_max_range:
        return DetectStatus.OUT_OF_RANGE, path.length
    return DetectStatus.DETECTED, path.length


def _user_cloud(center: np.ndarray, rng: np.random.Generator, n_points: int,
                noise_sigma: float) -> np.ndarray:
    # surface returns on a 0.2 m radius, 0.6 m tall body column around the estimate
    ang = rng.uniform(0.0, 2.0 * math.pi, n_points)
    dz = rng.uniform(-0.3, 0.3, n_points)
    pts = np.column_stack([center[0] + 0.2 * np.cos(ang),
                           center[1] + 0.2 * np.sin(ang),
                           center[2] + dz])
    if noise_sigma > 0:
        pts += rng.normal(0.0, noise_sigma, pts.shape)
    return pts


def detect_user(scene: Scene, user_position, reflector: RectReflector,
                noise_sigma: float = DEFAULT_NOISE_SIGMA,
                rng_seed: int | Sequence[int] | None = 0,
                n_points: int = 64, with_points: bool = False) -> LidarDetection | None:
    """Try to see the user at ``user_position`` through ``reflector``.

    Returns None when there is no unoccluded specular path or the path is
    longer than the material's LiDAR range; :func:`probe_user` tells the two
    apart. ``rng_seed`` may be an int or a sequence of ints (for example
    ``(seed, grid_index)``); the same seed always gives the same estimate.
    """
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    status, rng_len = probe_user(scene, user_position, reflector)
    if status is not DetectStatus.DETECTED:
        return None
    user = vec(user_position)
    rng = np.random.default_rng(rng_seed)
    offset = rng.normal(0.0, noise_sigma, 3) if noise_sigma > 0 else np.zeros(3)
    estimate = user + offset
    points = _user_cloud(estimate, rng, n_points, noise_sigma) if with_points else None
    return LidarDetection(estimate, reflector, rng_len, n_points, points)


def estimate_steering(tx, detection: LidarDetection, reflector: RectReflector | None = None,
                      boresight=(0.0, 1.0, 0.0), occluders=()) -> SteeringEstimate | None:
    """Reflection point and departure angle toward the estimated user position."""
    r = detection.via_reflector if reflector is None else reflector
    tx = vec(tx)
    try:
        path = specular_path(tx, detection.estimated_user_position, r, occluders)
    except ValueError:
        return None
    if path is None:
        return None
    point = path.reflection_point
    n = r.normal if r.signed_distance(tx) > 0 else -r.normal
    out = detection.estimated_user_position - point
    theta_t = math.atan2(float(np.linalg.norm(np.cross(out, n))), float(out @ n))
    return SteeringEstimate(point, path.theta_i, theta_t, azimuth(tx, point, boresight))


def quantize_aod(aod: float, aod_set: Sequence[float]) -> float:
    """Nearest member of ``aod_set``.

    Ties go to the smaller absolute angle, then to the negative one.
    """
    if len(aod_set) == 0:
        raise ValueError("aod_set must be non-empty")
    best = None
    best_d = math.inf
    for a in sorted(aod_set, key=lambda a: (abs(a), a)):
        d = abs(aod - a)
        if d < best_d - _TIE_TOL:
            best, best_d = a, d
    return best


def write_xyz(path: str | Path, points: np.ndarray) -> None:
    """ASCII point cloud, one ``x y z`` line per point in metres."""
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, z in np.asarray(points, dtype=float).reshape(-1, 3):
            fh.write(f"{float(x)!r} {float(y)!r} {float(z)!r}\n")
