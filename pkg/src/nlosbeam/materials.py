"""Material models for mmWave and optical reflection.

Complex permittivity, Fresnel coefficients for both polarizations, the
Rayleigh roughness criterion and the roughness-scaled coefficients. The
material database ships as ``data/materials.yaml``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

SPEED_OF_LIGHT = 299_792_458.0  # m/s

_DB_FIELDS = (
    "name",
    "eps_r_real",
    "loss_tangent",
    "is_conductor",
    "h_rms_m",
    "optical_specularity",
    "lidar_max_range_m",
)


class Polarization(enum.Enum):
    PERPENDICULAR = "perp"
    PARALLEL = "par"

    @classmethod
    def parse(cls, text: str) -> "Polarization":
        key = text.strip().lower()
        aliases = {"perp": cls.PERPENDICULAR, "perpendicular": cls.PERPENDICULAR,
                   "s": cls.PERPENDICULAR, "te": cls.PERPENDICULAR,
                   "par": cls.PARALLEL, "parallel": cls.PARALLEL,
                   "p": cls.PARALLEL, "tm": cls.PARALLEL}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown polarization {text!r}") from None


@dataclass(frozen=True)
class Material:
    """One surface type.

    ``eps_r_real`` is ignored for conductors, which are treated as perfect
    electric conductors. ``lidar_max_range`` is the longest two-way optical
    path (sensor -> surface -> target) over which the virtual LiDAR still
    sees a target through this surface.
    """

    name: str
    eps_r_real: float
    loss_tangent: float = 0.0
    is_conductor: bool = False
    h_rms: float = 0.0
    optical_specularity: float = 1.0
    lidar_max_range: float = 10.0

    def __post_init__(self):
        if not self.is_conductor and self.eps_r_real < 1.0:
            raise ValueError(f"{self.name}: eps_r_real must be >= 1 for dielectrics")
        if self.loss_tangent < 0 or self.h_rms < 0:
            raise ValueError(f"{self.name}: loss_tangent and h_rms must be >= 0")
        if not 0.0 <= self.optical_specularity <= 1.0:
            raise ValueError(f"{self.name}: optical_specularity must lie in [0, 1]")
        if self.lidar_max_range <= 0:
            raise ValueError(f"{self.name}: lidar_max_range must be > 0")


@dataclass(frozen=True)
class FresnelResult:
    gamma_perp: complex
    gamma_par: complex
    theta_t: complex
    power_reflectance_perp: float
    power_reflectance_par: float

    def reflectance(self, pol: Polarization) -> float:
        if pol is Polarization.PERPENDICULAR:
            return self.power_reflectance_perp
        return self.power_reflectance_par

    def scaled(self, factor: float) -> "FresnelResult":
        gp, gl = factor * self.gamma_perp, factor * self.gamma_par
        return FresnelResult(gp, gl, self.theta_t, abs(gp) ** 2, abs(gl) ** 2)


def _check_angle(theta_i: float) -> None:
    if not (0.0 <= theta_i < math.pi / 2):
        raise ValueError(f"incidence angle {theta_i!r} rad outside [0, pi/2)")


def complex_permittivity(m: Material) -> complex:
    """eps_r' * (1 - j tan(delta)), e^{+jwt} convention.

    Conductors return ``complex('inf')``; the Fresnel paths route them to
    :func:`fresnel_pec` before this value is ever used.
    """
    if m.is_conductor:
        return complex(math.inf, 0.0)
    return complex(m.eps_r_real, -m.eps_r_real * m.loss_tangent)


def fresnel(theta_i: float, eps_r1: complex, eps_r2: complex) -> FresnelResult:
    """Fresnel amplitude coefficients for a planar non-magnetic interface.

    Parameters
    ----------
    theta_i : float
        Incidence angle from the surface normal, radians, in [0, pi/2).
    eps_r1, eps_r2 : complex
        Relative permittivity of the incident and transmission media.

    Returns
    -------
    FresnelResult
        Complex coefficients, complex transmission angle and the power
        reflectances ``|gamma|**2``.
    """
    _check_angle(theta_i)
    eps_r1, eps_r2 = complex(eps_r1), complex(eps_r2)
    if eps_r1.real <= 0:
        raise ValueError("incident medium must have a positive real permittivity")

    cos_i = math.cos(theta_i)
    sin_t = cmath.sqrt(eps_r1) * math.sin(theta_i) / cmath.sqrt(eps_r2)
    cos_t = cmath.sqrt(1.0 - sin_t * sin_t)
    # pick the root whose transmitted wave decays into medium 2
    if (cmath.sqrt(eps_r2) * cos_t).imag > 0:
        cos_t = -cos_t
    theta_t = -1j * cmath.log(cos_t + 1j * sin_t)

    ratio = cmath.sqrt(eps_r2 / eps_r1)  # eta1 / eta2
    gamma_perp = (cos_i - ratio * cos_t) / (cos_i + ratio * cos_t)
    gamma_par = (-cos_i + cos_t / ratio) / (cos_i + cos_t / ratio)
    return FresnelResult(gamma_perp, gamma_par, theta_t,
                         abs(gamma_perp) ** 2, abs(gamma_par) ** 2)


def fresnel_pec(theta_i: float) -> FresnelResult:
    _check_angle(theta_i)
    return FresnelResult(-1 + 0j, -1 + 0j, 0j, 1.0, 1.0)


def rayleigh_critical_height(wavelength: float, theta_i: float) -> float:
    """Surface height above which a surface counts as rough: lambda / (8 cos(theta_i))."""
    if wavelength <= 0:
        raise ValueError("wavelength must be > 0")
    _check_angle(theta_i)
    return wavelength / (8.0 * math.cos(theta_i))


def roughness_factor(h_rms: float, wavelength: float, theta_i: float) -> float:
    """Specular scattering-loss factor exp(-8 (pi h cos(theta) / lambda)^2)."""
    if h_rms < 0 or wavelength <= 0:
        raise ValueError("h_rms must be >= 0 and wavelength > 0")
    _check_angle(theta_i)
    g = math.pi * h_rms * math.cos(theta_i) / wavelength
    return math.exp(-8.0 * g * g)


def rough_fresnel(theta_i: float, eps_r1: complex, eps_r2: complex,
                  h_rms: float, wavelength: float) -> FresnelResult:
    return fresnel(theta_i, eps_r1, eps_r2).scaled(
        roughness_factor(h_rms, wavelength, theta_i))


def material_fresnel(m: Material, theta_i: float, wavelength: float) -> FresnelResult:
    """Roughness-scaled coefficients for a wave arriving from air."""
    smooth = fresnel_pec(theta_i) if m.is_conductor else fresnel(
        theta_i, 1.0, complex_permittivity(m))
    return smooth.scaled(roughness_factor(m.h_rms, wavelength, theta_i))


def material_reflectance(m: Material, theta_i: float, wavelength: float,
                         pol: Polarization = Polarization.PERPENDICULAR) -> float:
    return material_fresnel(m, theta_i, wavelength).reflectance(pol)


def wavelength_of(frequency: float) -> float:
    if frequency <= 0:
        raise ValueError("frequency must be > 0")
    return SPEED_OF_LIGHT / frequency


# -- database -----------------------------------------------------------------

def _material_from_record(rec: dict) -> Material:
    missing = [k for k in _DB_FIELDS if k not in rec]
    if missing:
        raise ValueError(f"material record {rec.get('name', '?')!r} missing {missing}")
    return Material(
        name=str(rec["name"]),
        eps_r_real=float(rec["eps_r_real"]),
        loss_tangent=float(rec["loss_tangent"]),
        is_conductor=bool(rec["is_conductor"]),
        h_rms=float(rec["h_rms_m"]),
        optical_specularity=float(rec["optical_specularity"]),
        lidar_max_range=float(rec["lidar_max_range_m"]),
    )


def load_materials(path: str | Path | None = None) -> dict[str, Material]:
    """Read a material database file; the bundled one when ``path`` is None."""
    if path is None:
        text = resources.files("nlosbeam").joinpath("data/materials.yaml").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    doc = yaml.safe_load(text)
    records = doc["materials"] if isinstance(doc, dict) else doc
    out: dict[str, Material] = {}
    for rec in records:
        m = _material_from_record(rec)
        if m.name in out:
            raise ValueError(f"duplicate material {m.name!r}")
        out[m.name] = m
    return out


def get_material(name: str, db: dict[str, Material] | None = None) -> Material:
    db = load_materials() if db is None else db
    try:
        return db[name]
    except KeyError:
        raise KeyError(f"unknown material {name!r}; available: {', '.join(sorted(db))}") from None
