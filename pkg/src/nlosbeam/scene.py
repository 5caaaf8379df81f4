"""World model and specular-path geometry.

Points are plain ``numpy`` arrays of shape ``(3,)`` in metres. The default
world is an L-shaped corridor: the transmitter leg runs along +y, the
non-line-of-sight leg along +x, and a solid block fills the inner corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .materials import Material, get_material

PLANE_TOL = 1e-9
_RECT_TOL = 1e-12
_SLAB_EPS = 1e-12


def vec(x, y=None, z=None) -> np.ndarray:
    if y is None:
        return np.asarray(x, dtype=float).reshape(3)
    return np.array([x, y, z], dtype=float)


def _unit(v) -> np.ndarray:
    v = vec(v)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero-length direction")
    return v / n


@dataclass(frozen=True, eq=False)
class RectReflector:
    """Flat rectangular panel.

    ``width`` runs along ``u_axis``, ``height`` along ``u_axis x normal``.
    """

    center: np.ndarray
    normal: np.ndarray
    u_axis: np.ndarray
    width: float
    height: float
    material: Material

    def __post_init__(self):
        for name in ("center", "normal", "u_axis"):
            object.__setattr__(self, name, vec(getattr(self, name)))
        if abs(np.linalg.norm(self.normal) - 1.0) > 1e-9:
            raise ValueError("reflector normal must be a unit vector")
        if abs(np.linalg.norm(self.u_axis) - 1.0) > 1e-9:
            raise ValueError("reflector u_axis must be a unit vector")
        if abs(float(self.u_axis @ self.normal)) > 1e-9:
            raise ValueError("reflector u_axis must be perpendicular to the normal")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("reflector width and height must be > 0")

    @property
    def v_axis(self) -> np.ndarray:
        return np.cross(self.u_axis, self.normal)

    @property
    def area(self) -> float:
        return self.width * self.height

    def signed_distance(self, p) -> float:
        return float((vec(p) - self.center) @ self.normal)

    def contains(self, p, tol: float = _RECT_TOL) -> bool:
        """True when ``p`` (assumed on the plane) lies inside the rectangle."""
        d = vec(p) - self.center
        return (abs(float(d @ self.u_axis)) <= self.width / 2 + tol
                and abs(float(d @ self.v_axis)) <= self.height / 2 + tol)

    def corners(self) -> np.ndarray:
        hu, hv = self.u_axis * self.width / 2, self.v_axis * self.height / 2
        return np.array([self.center + su * hu + sv * hv
                         for su, sv in ((-1, -1), (1, -1), (1, 1), (-1, 1))])

    def with_material(self, material: Material) -> "RectReflector":
        return replace(self, material=material)


@dataclass(frozen=True, eq=False)
class BoxOccluder:
    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self):
        lo, hi = vec(self.min_corner), vec(self.max_corner)
        if not np.all(lo < hi):
            raise ValueError("box min_corner must be < max_corner componentwise")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    def contains(self, p) -> bool:
        p = vec(p)
        return bool(np.all(p > self.min_corner) and np.all(p < self.max_corner))


@dataclass(frozen=True)
class GridSpec:
    """Regular receiver grid: ``n_cols`` along ``col_axis``, ``n_rows`` along ``row_axis``."""

    origin: tuple[float, float, float]
    col_axis: tuple[float, float, float]
    row_axis: tuple[float, float, float]
    col_spacing: float
    row_spacing: float
    n_cols: int
    n_rows: int

    def points(self) -> np.ndarray:
        o, c, r = vec(self.origin), _unit(self.col_axis), _unit(self.row_axis)
        return np.array([o + i * self.row_spacing * r + j * self.col_spacing * c
                         for i in range(self.n_rows) for j in range(self.n_cols)])


@dataclass(frozen=True, eq=False)
class Scene:
    reflectors: tuple[RectReflector, ...]
    occluders: tuple[BoxOccluder, ...]
    tx_position: np.ndarray
    rx_grid: np.ndarray
    lidar_position: np.ndarray
    tx_boresight: np.ndarray = field(default_factory=lambda: vec(0, 1, 0))

    def __post_init__(self):
        object.__setattr__(self, "reflectors", tuple(self.reflectors))
        object.__setattr__(self, "occluders", tuple(self.occluders))
        object.__setattr__(self, "tx_position", vec(self.tx_position))
        object.__setattr__(self, "lidar_position", vec(self.lidar_position))
        object.__setattr__(self, "tx_boresight", _unit(self.tx_boresight))
        grid = np.asarray(self.rx_grid, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "rx_grid", grid)
        for box in self.occluders:
            if box.contains(self.tx_position):
                raise ValueError("transmitter lies inside an occluder")
            for p in grid:
                if box.contains(p):
                    raise ValueError(f"grid point {p.tolist()} lies inside an occluder")

    @property
    def reflector(self) -> RectReflector:
        return self.reflectors[0]

    def with_material(self, material: Material) -> "Scene":
        """Copy of the scene with the first reflector re-skinned."""
        refl = (self.reflectors[0].with_material(material),) + self.reflectors[1:]
        return replace(self, reflectors=refl)


@dataclass(frozen=True, eq=False)
class ReflectionPath:
    reflection_point: np.ndarray
    d1: float
    d2: float
    theta_i: float
    beta: float

    @property
    def length(self) -> float:
        return self.d1 + self.d2


# -- geometry ---------------------------------------------------------------

def segment_blocked(p, q, occluders) -> bool:
    """Whether the open segment pq passes through the interior of any box.

    Slab test on the parametric segment ``p + t (q - p)``, ``t`` in (0, 1).
    Running along a face or touching an edge does not count as blocked.
    """
    p, q = vec(p).tolist(), vec(q).tolist()
    d = [b - a for a, b in zip(p, q)]
    for box in occluders:
        t0, t1 = 0.0, 1.0
        for k in range(3):
            lo, hi = float(box.min_corner[k]), float(box.max_corner[k])
            if d[k] == 0.0:
                if not (lo < p[k] < hi):
                    break
                continue
            ta, tb = (lo - p[k]) / d[k], (hi - p[k]) / d[k]
            if ta > tb:
                ta, tb = tb, ta
            t0, t1 = max(t0, ta), min(t1, tb)
            if t1 - t0 <= _SLAB_EPS:
                break
        else:
            return True
    return False


def image_point(p, r: RectReflector) -> np.ndarray:
    p = vec(p)
    return p - 2.0 * float((p - r.center) @ r.normal) * r.normal


def angle_between(a, b) -> float:
    a, b = _unit(a), _unit(b)
    # atan2 form stays accurate near 0 and pi
    return math.atan2(float(np.linalg.norm(np.cross(a, b))), float(a @ b))


def bistatic_angle(tx, rx, point) -> float:
    point = vec(point)
    return angle_between(vec(tx) - point, vec(rx) - point)


def azimuth(origin, point, boresight) -> float:
    """Signed horizontal angle from ``boresight`` to ``point - origin``.

    Positive is counter-clockwise seen from +z.
    """
    d = vec(point) - vec(origin)
    b = vec(boresight)
    cross_z = b[0] * d[1] - b[1] * d[0]
    dot = b[0] * d[0] + b[1] * d[1]
    return math.atan2(cross_z, dot)


def specular_path(tx, rx, r: RectReflector, occluders=()) -> ReflectionPath | None:
    """Single-bounce specular path tx -> reflector -> rx, or None.

    Raises
    ------
    ValueError
        If tx and rx are not strictly on the same side of the reflector plane.
    """
    tx, rx = vec(tx), vec(rx)
    s_tx, s_rx = r.signed_distance(tx), r.signed_distance(rx)
    if not ((s_tx > PLANE_TOL and s_rx > PLANE_TOL)
            or (s_tx < -PLANE_TOL and s_rx < -PLANE_TOL)):
        raise ValueError("tx and rx must lie strictly on the same side of the reflector plane")

    rx_img = image_point(rx, r)
    t = s_tx / (s_tx + s_rx)
    point = tx + t * (rx_img - tx)
    # snap onto the plane to kill rounding drift
    point = point - float((point - r.center) @ r.normal) * r.normal
    if not r.contains(point):
        return None
    if segment_blocked(tx, point, occluders) or segment_blocked(point, rx, occluders):
        return None

    n = r.normal if s_tx > 0 else -r.normal
    theta_i = angle_between(tx - point, n)
    return ReflectionPath(
        reflection_point=point,
        d1=float(np.linalg.norm(tx - point)),
        d2=float(np.linalg.norm(rx - point)),
        theta_i=theta_i,
        beta=bistatic_angle(tx, rx, point),
    )


# -- default world ----------------------------------------------------------

CORRIDOR_WIDTH = 2.5
ANTENNA_HEIGHT = 1.5
TX_TO_REFLECTOR = 3.8
REFLECTOR_WIDTH = 0.9
REFLECTOR_HEIGHT = 0.3

DEFAULT_REFLECTOR_CENTER = (0.75, 1.75, ANTENNA_HEIGHT)
DEFAULT_GRID = GridSpec(
    origin=(5.0, 1.1, ANTENNA_HEIGHT),
    col_axis=(0.0, 1.0, 0.0),
    row_axis=(1.0, 0.0, 0.0),
    col_spacing=0.25,
    row_spacing=0.5,
    n_cols=6,
    n_rows=17,
)


def build_default_scene(material: Material | str = "mirror",
                        grid: GridSpec = DEFAULT_GRID) -> Scene:
    """L-corridor with a 0.9 x 0.3 m panel on a 45 degree plane at the corner.

    Corridor legs are 2.5 m wide. The outer corner sits at (0, 2.5); the
    transmitter leg spans x in [0, 2.5] going down in y, the NLoS leg spans
    y in [0, 2.5] going out in x. The transmitter (with the LiDAR on top of
    it) looks along +y at the panel from 3.8 m away, both at 1.5 m height.
    """
    if isinstance(material, str):
        material = get_material(material)
    s = 1 / math.sqrt(2.0)
    center = vec(DEFAULT_REFLECTOR_CENTER)
    reflector = RectReflector(
        center=center,
        normal=vec(s, -s, 0.0),
        u_axis=vec(s, s, 0.0),
        width=REFLECTOR_WIDTH,
        height=REFLECTOR_HEIGHT,
        material=material,
    )
    tx = center - vec(0.0, TX_TO_REFLECTOR, 0.0)
    far = 40.0
    inner_block = BoxOccluder(vec(CORRIDOR_WIDTH, -far, 0.0), vec(far, 0.0, 3.0))
    return Scene(
        reflectors=(reflector,),
        occluders=(inner_block,),
        tx_position=tx,
        rx_grid=grid.points(),
        lidar_position=tx.copy(),
        tx_boresight=vec(0.0, 1.0, 0.0),
    )
