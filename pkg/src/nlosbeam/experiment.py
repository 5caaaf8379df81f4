"""Beam-selection strategies evaluated over the receiver grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .lidar import DEFAULT_NOISE_SIGMA, detect_user, estimate_steering, quantize_aod
from .linkbudget import RadioParams, path_power
from .scene import RectReflector, Scene, specular_path

STEERING_LIMIT = math.radians(15.0)
DEFAULT_AOD_SET = tuple(math.radians(a) for a in
                        (0.0, -1.5, 1.5, -3.0, 3.0, -5.0, 5.0, -10.0, 10.0, -15.0, 15.0))
DEFAULT_FIXED_AOD = math.radians(-5.0)


def _check_aods(aods: Sequence[float]) -> tuple[float, ...]:
    aods = tuple(float(a) for a in aods)
    if not aods:
        raise ValueError("AoD set must be non-empty")
    for a in aods:
        if abs(a) > STEERING_LIMIT + 1e-12:
            raise ValueError(f"AoD {math.degrees(a):.3f} deg outside the +/-15 deg steering range")
    return aods


@dataclass(frozen=True)
class Fixed:
    aod: float = DEFAULT_FIXED_AOD

    def __post_init__(self):
        _check_aods([self.aod])

    @property
    def label(self) -> str:
        return f"fixed:{math.degrees(self.aod):g}"


@dataclass(frozen=True)
class Exhaustive:
    aod_set: tuple[float, ...] = DEFAULT_AOD_SET

    def __post_init__(self):
        object.__setattr__(self, "aod_set", _check_aods(self.aod_set))

    label = "exhaustive"


@dataclass(frozen=True)
class LidarGuided:
    aod_set: tuple[float, ...] = DEFAULT_AOD_SET
    fallback_aod: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "aod_set", _check_aods(self.aod_set))
        _check_aods([self.fallback_aod])

    label = "lidar"


Strategy = Union[Fixed, Exhaustive, LidarGuided]


def parse_strategy(text: str) -> Strategy:
    """``fixed:<deg>`` | ``exhaustive`` | ``lidar``."""
    t = text.strip().lower()
    if t == "exhaustive":
        return Exhaustive()
    if t == "lidar":
        return LidarGuided()
    if t.startswith("fixed"):
        _, _, deg = t.partition(":")
        return Fixed(math.radians(float(deg))) if deg else Fixed()
    raise ValueError(f"unknown strategy {text!r}; expected fixed:<deg>, exhaustive or lidar")


@dataclass(frozen=True, eq=False)
class RssField:
    positions: np.ndarray      # (n, 3)
    chosen_aod: np.ndarray     # radians
    rss_db: np.ndarray         # dB above the noise floor, >= 0
    detected: np.ndarray       # bool
    strategy: str = ""
    material: str = ""

    def __len__(self) -> int:
        return len(self.rss_db)


@dataclass(frozen=True)
class CcdfCurve:
    thresholds: np.ndarray
    probabilities: np.ndarray


@dataclass(frozen=True)
class ImprovementStats:
    min_gain_db: float            # min(b) - min(a)
    pointwise_min_gain_db: float  # min over points of b - a
    mean_gain_db: float
    per_point_gains: np.ndarray


def _best_aod(powers: dict[float, float]) -> float:
    # candidates visited nearest-0 first, negative before positive; strict > keeps the earlier on ties
    order = sorted(powers, key=lambda a: (abs(a), a))
    best = order[0]
    for a in order[1:]:
        if powers[a] > powers[best]:
            best = a
    return best


def run_strategy(scene: Scene, radio: RadioParams, strategy: Strategy,
                 reflector: RectReflector | None = None, seed: int = 0,
                 noise_sigma: float = DEFAULT_NOISE_SIGMA,
                 user_height: float | None = None) -> RssField:
    """Evaluate one strategy at every grid point, with the user standing there.

    ``user_height`` moves the LiDAR target off the receiver height; by
    default the two coincide.
    """
    r = scene.reflector if reflector is None else reflector
    tx = scene.tx_position
    n = len(scene.rx_grid)
    chosen = np.zeros(n)
    rss = np.zeros(n)
    detected = np.zeros(n, dtype=bool)

    for idx, p in enumerate(scene.rx_grid):
        try:
            path = specular_path(tx, p, r, scene.occluders)
        except ValueError:
            path = None

        def power(aod: float) -> float:
            if path is None:
                return radio.noise_floor
            return max(path_power(radio, path, r, aod, tx), radio.noise_floor)

        if isinstance(strategy, Fixed):
            aod = strategy.aod
        elif isinstance(strategy, Exhaustive):
            aod = _best_aod({a: power(a) for a in strategy.aod_set})
        elif isinstance(strategy, LidarGuided):
            aod = strategy.fallback_aod
            user = p.copy()
            if user_height is not None:
                user[2] = user_height
            det = detect_user(scene, user, r, noise_sigma, rng_seed=(seed, idx))
            if det is not None:
                detected[idx] = True
                est = estimate_steering(scene.lidar_position, det, r,
                                        radio.tx_boresight, scene.occluders)
                if est is not None:
                    aod = quantize_aod(est.aod, strategy.aod_set)
        else:
            raise TypeError(f"unknown strategy {strategy!r}")

        chosen[idx] = aod
        rss[idx] = power(aod) - radio.noise_floor

    return RssField(scene.rx_grid.copy(), chosen, rss, detected,
                    strategy=strategy.label, material=r.material.name)


def ccdf(field: RssField, thresholds: Sequence[float]) -> CcdfCurve:
    """Fraction of grid points with RSS >= each threshold."""
    if len(field) == 0:
        raise ValueError("empty RSS field")
    th = np.asarray(thresholds, dtype=float)
    probs = (field.rss_db[None, :] >= th[:, None]).mean(axis=1)
    return CcdfCurve(th, probs)


def default_thresholds(*fields: RssField, step: float = 1.0) -> np.ndarray:
    top = max(float(np.max(f.rss_db)) for f in fields)
    return np.arange(0.0, math.ceil(top) + step, step)


def _same_grid(a: RssField, b: RssField) -> None:
    if a.positions.shape != b.positions.shape or not np.allclose(a.positions, b.positions,
                                                                 rtol=0, atol=1e-9):
        raise ValueError("RSS fields are on different grids")


def improvement_stats(a: RssField, b: RssField) -> ImprovementStats:
    """Gains of ``b`` over ``a``."""
    _same_grid(a, b)
    gains = b.rss_db - a.rss_db
    return ImprovementStats(
        min_gain_db=float(np.min(b.rss_db) - np.min(a.rss_db)),
        pointwise_min_gain_db=float(np.min(gains)),
        mean_gain_db=float(np.mean(gains)),
        per_point_gains=gains,
    )


def detection_coverage(field: RssField) -> float:
    if field.strategy != LidarGuided.label:
        raise ValueError(f"detection coverage needs a LiDAR-guided field, got {field.strategy!r}")
    return float(np.mean(field.detected))
