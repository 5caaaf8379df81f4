"""Received power over a passive reflector.

Bistatic radar equation with a material-scaled physical-optics RCS and a
uniform linear array pattern for the steered transmit beam. Powers are in
dBm, gains in linear power units unless the name says ``_db``/``_dbi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .materials import Polarization, material_reflectance, wavelength_of
from .scene import RectReflector, ReflectionPath, azimuth, vec

_FOUR_PI_CUBED = (4.0 * math.pi) ** 3


def db10(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


def undb10(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True, eq=False)
class RadioParams:
    tx_power: float = 10.0            # dBm
    frequency: float = 60e9           # Hz
    tx_array_elements: int = 8
    tx_element_spacing: float = 0.5   # wavelengths
    rx_gain: float = 10.0             # dBi, fixed beam aimed at the reflector
    tx_boresight: np.ndarray = field(default_factory=lambda: vec(0.0, 1.0, 0.0))
    rx_boresight: np.ndarray = field(default_factory=lambda: vec(-1.0, 0.0, 0.0))
    noise_floor: float = -90.0        # dBm
    polarization: Polarization = Polarization.PERPENDICULAR

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError("frequency must be > 0")
        if self.tx_array_elements < 1:
            raise ValueError("tx_array_elements must be >= 1")
        if self.tx_element_spacing <= 0:
            raise ValueError("tx_element_spacing must be > 0")
        object.__setattr__(self, "tx_boresight", vec(self.tx_boresight))
        object.__setattr__(self, "rx_boresight", vec(self.rx_boresight))

    @property
    def wavelength(self) -> float:
        return wavelength_of(self.frequency)


def rcs(area: float, beta: float, r_p: float, wavelength: float) -> float:
    """Material-scaled bistatic RCS, R_p * 4 pi A^2 / lambda^2 * cos(beta / 2), in m^2."""
    if area <= 0 or wavelength <= 0:
        raise ValueError("area and wavelength must be > 0")
    if not 0.0 <= beta < math.pi:
        raise ValueError(f"bistatic angle {beta!r} outside [0, pi)")
    if not 0.0 <= r_p <= 1.0:
        raise ValueError("r_p must lie in [0, 1]")
    return max(0.0, r_p * 4.0 * math.pi * area**2 / wavelength**2 * math.cos(beta / 2.0))


def array_gain(steer: float, target: float, n_elements: int = 8,
               spacing_wl: float = 0.5) -> float:
    """Power gain of a uniform linear array steered to ``steer`` toward ``target``.

    Normalised so the peak equals ``n_elements``; angles in radians from
    array boresight.
    """
    psi = 2.0 * math.pi * spacing_wl * (math.sin(target) - math.sin(steer))
    half = psi / 2.0
    den = n_elements * math.sin(half)
    if abs(den) < 1e-12:
        # psi on a grating-lobe multiple of 2 pi: |AF| = 1 there
        return float(n_elements)
    af = math.sin(n_elements * half) / den
    return n_elements * af * af


def bistatic_power(tx_power_dbm: float, g_tx: float, g_rx: float, wavelength: float,
                   sigma: float, d1: float, d2: float) -> float:
    """Bistatic radar equation in dBm (no noise floor)."""
    lin = (undb10(tx_power_dbm) * g_tx * g_rx * wavelength**2 * sigma
           / (_FOUR_PI_CUBED * d1**2 * d2**2))
    return db10(lin)


def bistatic_power_db(tx_power_dbm: float, g_tx: float, g_rx: float, wavelength: float,
                      sigma: float, d1: float, d2: float) -> float:
    """Same equation summed term by term in dB; used to cross-check units."""
    return (tx_power_dbm + db10(g_tx) + db10(g_rx) + 20 * math.log10(wavelength)
            + db10(sigma) - db10(_FOUR_PI_CUBED) - 20 * math.log10(d1)
            - 20 * math.log10(d2))


def departure_angle(radio: RadioParams, tx, point) -> float:
    return azimuth(tx, point, radio.tx_boresight)


def path_power(radio: RadioParams, path: ReflectionPath, r: RectReflector,
               steer_aod: float, tx) -> float:
    """Un-floored received power (dBm) along ``path`` with the beam at ``steer_aod``."""
    lam = radio.wavelength
    r_p = material_reflectance(r.material, path.theta_i, lam, radio.polarization)
    sigma = rcs(r.area, path.beta, r_p, lam)
    target = departure_angle(radio, tx, path.reflection_point)
    g_tx = array_gain(steer_aod, target, radio.tx_array_elements, radio.tx_element_spacing)
    return bistatic_power(radio.tx_power, g_tx, undb10(radio.rx_gain), lam,
                          sigma, path.d1, path.d2)


def received_power(radio: RadioParams, path: ReflectionPath | None, r: RectReflector,
                   steer_aod: float, tx) -> float:
    """Received power in dBm, floored at the noise floor.

    ``tx`` is the transmitter position; the beam gain is evaluated toward the
    reflection point.
    """
    if path is None:
        raise ValueError("no reflection path; assign the noise floor at the call site")
    return max(path_power(radio, path, r, steer_aod, tx), radio.noise_floor)


def los_power(radio: RadioParams, tx, rx, steer_aod: float) -> float:
    """Free-space (Friis) power for a direct path, floored at the noise floor."""
    d = float(np.linalg.norm(vec(rx) - vec(tx)))
    g_tx = array_gain(steer_aod, departure_angle(radio, tx, rx),
                      radio.tx_array_elements, radio.tx_element_spacing)
    lam = radio.wavelength
    p = radio.tx_power + db10(g_tx) + radio.rx_gain + 20 * math.log10(lam / (4 * math.pi * d))
    return max(p, radio.noise_floor)
