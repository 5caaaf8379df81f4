"""Scene description files.

A scene file is YAML with a ``scene`` block (geometry) and an optional
``radio`` block. See ``data/default_scene.yaml`` for the full schema; it
describes the same world as :func:`nlosbeam.scene.build_default_scene`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .linkbudget import RadioParams
from .materials import Material, get_material, load_materials
from .scene import BoxOccluder, GridSpec, RectReflector, Scene, vec


class ConfigError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SceneConfig:
    scene: Scene
    radio: RadioParams
    user_height: float | None = None


def _unit(v, what: str) -> np.ndarray:
    v = vec(v)
    n = np.linalg.norm(v)
    if n == 0:
        raise ConfigError(f"{what} must be non-zero")
    return v / n


def _need(block: dict, key: str, where: str):
    try:
        return block[key]
    except (KeyError, TypeError):
        raise ConfigError(f"{where}: missing {key!r}") from None


def radio_from_dict(d: dict | None) -> RadioParams:
    d = d or {}
    known = {"tx_power_dbm", "frequency_hz", "n_elements", "spacing_wl",
             "rx_gain_dbi", "noise_floor_dbm", "tx_boresight", "rx_boresight"}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"radio: unknown keys {sorted(unknown)}")
    kw = {}
    mapping = {"tx_power_dbm": "tx_power", "frequency_hz": "frequency",
               "n_elements": "tx_array_elements", "spacing_wl": "tx_element_spacing",
               "rx_gain_dbi": "rx_gain", "noise_floor_dbm": "noise_floor"}
    for src, dst in mapping.items():
        if src in d:
            kw[dst] = int(d[src]) if dst == "tx_array_elements" else float(d[src])
    for key in ("tx_boresight", "rx_boresight"):
        if key in d:
            kw[key] = _unit(d[key], f"radio.{key}")
    try:
        return RadioParams(**kw)
    except ValueError as exc:
        raise ConfigError(f"radio: {exc}") from None


def scene_from_dict(doc: dict, materials: dict[str, Material] | None = None,
                    material_override: Material | None = None) -> SceneConfig:
    db = load_materials() if materials is None else materials
    sc = _need(doc, "scene", "scene file")
    try:
        reflectors = []
        for i, rd in enumerate(_need(sc, "reflectors", "scene")):
            where = f"scene.reflectors[{i}]"
            mat = material_override or get_material(str(_need(rd, "material", where)), db)
            reflectors.append(RectReflector(
                center=vec(_need(rd, "center", where)),
                normal=_unit(_need(rd, "normal", where), f"{where}.normal"),
                u_axis=_unit(_need(rd, "u_axis", where), f"{where}.u_axis"),
                width=float(_need(rd, "width", where)),
                height=float(_need(rd, "height", where)),
                material=mat,
            ))
        if not reflectors:
            raise ConfigError("scene: at least one reflector is required")
        occluders = [BoxOccluder(vec(_need(od, "min", "occluder")), vec(_need(od, "max", "occluder")))
                     for od in sc.get("occluders", [])]
        g = _need(sc, "grid", "scene")
        grid = GridSpec(
            origin=tuple(vec(_need(g, "origin", "scene.grid"))),
            col_axis=tuple(vec(_need(g, "col_axis", "scene.grid"))),
            row_axis=tuple(vec(_need(g, "row_axis", "scene.grid"))),
            col_spacing=float(_need(g, "col_spacing", "scene.grid")),
            row_spacing=float(_need(g, "row_spacing", "scene.grid")),
            n_cols=int(_need(g, "n_cols", "scene.grid")),
            n_rows=int(_need(g, "n_rows", "scene.grid")),
        )
        if grid.n_cols < 1 or grid.n_rows < 1:
            raise ConfigError("scene.grid: n_cols and n_rows must be >= 1")
        tx = vec(_need(sc, "tx_position", "scene"))
        scene = Scene(
            reflectors=reflectors,
            occluders=occluders,
            tx_position=tx,
            rx_grid=grid.points(),
            lidar_position=vec(sc.get("lidar_position", tx)),
            tx_boresight=_unit(sc.get("tx_boresight", (0.0, 1.0, 0.0)), "scene.tx_boresight"),
        )
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"scene: {exc}") from None

    radio = radio_from_dict(doc.get("radio"))
    if "tx_boresight" not in (doc.get("radio") or {}):
        radio = replace(radio, tx_boresight=scene.tx_boresight)
    uh = sc.get("user_height")
    return SceneConfig(scene, radio, None if uh is None else float(uh))


def default_scene_text() -> str:
    return resources.files("nlosbeam").joinpath("data/default_scene.yaml").read_text("utf-8")


def load_scene_config(path: str | Path | None = None,
                      materials: dict[str, Material] | None = None,
                      material_override: Material | None = None) -> SceneConfig:
    """Parse a scene file; the bundled default when ``path`` is None."""
    text = default_scene_text() if path is None else Path(path).read_text(encoding="utf-8")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse scene file: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("scene file must be a mapping")
    return scene_from_dict(doc, materials, material_override)
