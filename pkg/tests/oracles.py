"""Independent reference computations shared by the test modules."""

import math

import numpy as np

from nlosbeam.materials import get_material
from nlosbeam.scene import RectReflector, specular_path


def brute_force_min_path(tx, rx, r: RectReflector, n: int = 2000) -> float:
    """min |tx - s| + |s - rx| over an n x n lattice covering the rectangle.

    Uses |p - s|^2 = |p - c|^2 - 2 u (p-c).U - 2 v (p-c).V + u^2 + v^2 so the
    lattice never has to be materialised as 3-D points.
    """
    u = np.linspace(-r.width / 2, r.width / 2, n)
    v = np.linspace(-r.height / 2, r.height / 2, n)
    U, V = r.u_axis, r.v_axis
    total = np.zeros((n, n))
    for p in (np.asarray(tx, float), np.asarray(rx, float)):
        a = p - r.center
        col = a @ a - 2 * u * (a @ U) + u * u
        row = -2 * v * (a @ V) + v * v
        total += np.sqrt(np.maximum(col[:, None] + row[None, :], 0.0))
    return float(total.min())


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_reflector(rng, material_name="mirror"):
    n = random_unit(rng)
    t = random_unit(rng)
    u = t - (t @ n) * n
    u /= np.linalg.norm(u)
    return RectReflector(center=rng.uniform(-2, 2, 3), normal=n, u_axis=u,
                         width=rng.uniform(0.3, 2.0), height=rng.uniform(0.3, 2.0),
                         material=get_material(material_name))


def random_side_point(rng, r: RectReflector, side=1.0):
    tang = rng.uniform(-3, 3) * r.u_axis + rng.uniform(-3, 3) * r.v_axis
    return r.center + tang + side * rng.uniform(0.5, 5.0) * r.normal


def random_valid_configs(rng, count):
    """``count`` (tx, rx, reflector, path) tuples with an in-bounds specular point.

    rx is placed along the mirrored ray through a random panel point, so
    almost every draw is usable.
    """
    out = []
    while len(out) < count:
        r = random_reflector(rng)
        side = 1.0 if rng.random() < 0.5 else -1.0
        tx = random_side_point(rng, r, side)
        s = (r.center + rng.uniform(-0.5, 0.5) * r.width * r.u_axis
             + rng.uniform(-0.5, 0.5) * r.height * r.v_axis)
        d = s - tx
        out_dir = d - 2 * (d @ r.normal) * r.normal
        rx = s + rng.uniform(0.5, 5.0) * out_dir / np.linalg.norm(out_dir)
        path = specular_path(tx, rx, r)
        if path is not None:
            out.append((tx, rx, r, path))
    return out


def angle_deg(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    c = a @ b / (np.linalg.norm(a) * np.linalg.norm(b))
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))
