"""Command-line front end.

    nlosbeam materials
    nlosbeam reflectance-sweep --materials glass,acrylic --frequency 60e9
    nlosbeam simulate --material mirror --strategy exhaustive --out runs/mirror
    nlosbeam compare --run mirror/fixed:-5 --run mirror/exhaustive --out runs/cmp

Every output is a pure function of the scene file bytes, flags and seed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import experiment as ex
from .config import ConfigError, SceneConfig, default_scene_text, load_scene_config
from .lidar import DEFAULT_NOISE_SIGMA, detect_user, write_xyz
from .materials import (Material, Polarization, get_material, load_materials,
                        material_reflectance, wavelength_of)


def _num(x) -> str:
    # round-trip precision
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else _num(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- reflectance sweep --------------------------------------------------------

def reflectance_table(materials: list[Material], frequency: float, pol: Polarization,
                      angle_step: float) -> tuple[list[str], list[list[float]]]:
    if angle_step <= 0:
        raise ValueError("angle step must be > 0")
    lam = wavelength_of(frequency)
    angles = np.arange(0.0, 90.0, angle_step)
    header = ["angle_deg"] + [m.name for m in materials]
    rows = [[float(a)] + [material_reflectance(m, math.radians(a), lam, pol) for m in materials]
            for a in angles]
    return header, rows


def cmd_reflectance_sweep(args) -> int:
    db = load_materials(args.db)
    names = [n.strip() for n in args.materials.split(",") if n.strip()] if args.materials else list(db)
    mats = [get_material(n, db) for n in names]
    header, rows = reflectance_table(mats, args.frequency, Polarization.parse(args.pol), args.step)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        _write_csv(out, header, rows)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) for v in row])
    return 0


# -- simulate -----------------------------------------------------------------

def _scene_bytes(scene_path: str | None) -> bytes:
    if scene_path is None:
        return default_scene_text().encode("utf-8")
    return Path(scene_path).read_bytes()


def config_hash(scene_path: str | None, db_path: str | None, **flags) -> str:
    h = hashlib.sha256()
    h.update(_scene_bytes(scene_path))
    h.update(b"\0")
    if db_path is None:
        from importlib import resources
        h.update(resources.files("nlosbeam").joinpath("data/materials.yaml").read_bytes())
    else:
        h.update(Path(db_path).read_bytes())
    h.update(b"\0")
    h.update(json.dumps(flags, sort_keys=True).encode("utf-8"))
    return h.hexdigest()


def _load(args, material_name: str) -> tuple[SceneConfig, Material]:
    db = load_materials(args.db)
    mat = get_material(material_name, db)
    return load_scene_config(args.scene, db, material_override=mat), mat


def run_one(args, material_name: str, strategy_text: str) -> tuple[ex.RssField, SceneConfig]:
    cfg, _ = _load(args, material_name)
    strategy = ex.parse_strategy(strategy_text)
    fld = ex.run_strategy(cfg.scene, cfg.radio, strategy, seed=args.seed,
                          noise_sigma=args.noise_sigma, user_height=cfg.user_height)
    return fld, cfg


def _field_rows(fld: ex.RssField):
    for i, (p, a, r, d) in enumerate(zip(fld.positions, fld.chosen_aod, fld.rss_db, fld.detected)):
        yield [i, p[0], p[1], p[2], math.degrees(a), r, bool(d)]


def summarize(fld: ex.RssField) -> dict:
    hist = Counter(f"{math.degrees(a):g}" for a in fld.chosen_aod)
    out = {
        "n_points": len(fld),
        "min_rss_db": float(np.min(fld.rss_db)),
        "mean_rss_db": float(np.mean(fld.rss_db)),
        "max_rss_db": float(np.max(fld.rss_db)),
        "aod_histogram_deg": dict(sorted(hist.items(), key=lambda kv: float(kv[0]))),
        "detection_coverage": None,
    }
    if fld.strategy == ex.LidarGuided.label:
        out["detection_coverage"] = ex.detection_coverage(fld)
    return out


def cmd_simulate(args) -> int:
    fld, cfg = run_one(args, args.material, args.strategy)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "rss_field.csv",
               ["idx", "x", "y", "z", "chosen_aod_deg", "rss_db", "detected"], _field_rows(fld))
    curve = ex.ccdf(fld, ex.default_thresholds(fld))
    _write_csv(out / "ccdf.csv", ["threshold_db", "probability"],
               zip(curve.thresholds, curve.probabilities))
    summary = {
        "seed": args.seed,
        "material": args.material,
        "strategy": fld.strategy,
        "noise_sigma_m": args.noise_sigma,
        "config_hash": config_hash(args.scene, args.db, material=args.material,
                                   strategy=fld.strategy, seed=args.seed,
                                   noise_sigma=args.noise_sigma),
        **summarize(fld),
    }
    _write_json(out / "summary.json", summary)
    if args.cloud:
        clouds = []
        for idx, p in enumerate(cfg.scene.rx_grid):
            det = detect_user(cfg.scene, p, cfg.scene.reflector, args.noise_sigma,
                              rng_seed=(args.seed, idx), with_points=True)
            if det is not None:
                clouds.append(det.points)
        write_xyz(out / "detections.xyz", np.vstack(clouds) if clouds else np.empty((0, 3)))
    return 0


# -- compare ------------------------------------------------------------------

def _parse_run(text: str) -> tuple[str, str]:
    material, sep, strategy = text.partition("/")
    if not sep or not material or not strategy:
        raise ValueError(f"run {text!r} must look like MATERIAL/STRATEGY")
    return material.strip(), strategy.strip()


def cmd_compare(args) -> int:
    runs = [_parse_run(r) for r in args.run]
    if len(runs) < 2:
        raise ValueError("compare needs at least two --run entries")
    fields, labels = [], []
    for material, strategy in runs:
        fld, _ = run_one(args, material, strategy)
        fields.append(fld)
        labels.append(f"{material}/{fld.strategy}")
    base = fields[0]
    stats = [ex.improvement_stats(base, f) for f in fields[1:]]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    gain_cols = [f"{lab} - {labels[0]}" for lab in labels[1:]]
    _write_csv(out / "gains.csv", ["idx", "x", "y", "z"] + gain_cols,
               ([i, *base.positions[i]] + [s.per_point_gains[i] for s in stats]
                for i in range(len(base))))
    th = ex.default_thresholds(*fields)
    curves = [ex.ccdf(f, th) for f in fields]
    _write_csv(out / "ccdf.csv", ["threshold_db"] + labels,
               ([t] + [c.probabilities[k] for c in curves] for k, t in enumerate(th)))
    _write_json(out / "compare.json", {
        "seed": args.seed,
        "noise_sigma_m": args.noise_sigma,
        "baseline": labels[0],
        "config_hash": config_hash(args.scene, args.db, runs=args.run, seed=args.seed,
                                   noise_sigma=args.noise_sigma),
        "runs": {lab: summarize(f) for lab, f in zip(labels, fields)},
        "gains": {lab: {"min_gain_db": s.min_gain_db,
                        "pointwise_min_gain_db": s.pointwise_min_gain_db,
                        "mean_gain_db": s.mean_gain_db}
                  for lab, s in zip(labels[1:], stats)},
    })
    return 0


# -- materials ----------------------------------------------------------------

def cmd_materials(args) -> int:
    db = load_materials(args.db)
    print(f"{'name':<26}{'eps_r':>8}{'tan_d':>9}{'pec':>5}{'h_rms_m':>11}{'lidar_max_m':>13}")
    for m in db.values():
        print(f"{m.name:<26}{m.eps_r_real:>8.2f}{m.loss_tangent:>9.4f}{'yes' if m.is_conductor else 'no':>5}"
              f"{m.h_rms:>11.3g}{m.lidar_max_range:>13.3f}")
    return 0


# -- entry point --------------------------------------------------------------

def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scene", help="scene YAML file (default: built-in L-corridor)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sigma", type=float, default=DEFAULT_NOISE_SIGMA,
                   help="LiDAR position noise per axis, metres (default 0.02)")
    p.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nlosbeam", description=__doc__.splitlines()[0])
    ap.add_argument("--db", help="material database YAML (default: bundled)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reflectance-sweep", help="reflectance vs incidence angle, CSV")
    p.add_argument("--materials", help="comma-separated names (default: all)")
    p.add_argument("--frequency", type=float, default=60e9, help="Hz (default 60e9)")
    p.add_argument("--pol", default="perp", help="perp | par (default perp)")
    p.add_argument("--step", type=float, default=1.0, help="angle step in degrees")
    p.add_argument("--out", help="CSV file (default: stdout)")
    p.set_defaults(func=cmd_reflectance_sweep)

    p = sub.add_parser("simulate", help="run one strategy over the grid")
    p.add_argument("--material", default="mirror")
    p.add_argument("--strategy", default="exhaustive", help="fixed:<deg> | exhaustive | lidar")
    p.add_argument("--cloud", action="store_true", help="also write detections.xyz")
    _run_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="compare runs against the first one")
    p.add_argument("--run", action="append", default=[], metavar="MATERIAL/STRATEGY",
                   help="repeatable, e.g. --run mirror/fixed:-5 --run mirror/exhaustive")
    _run_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("materials", help="list the material database")
    p.set_defaults(func=cmd_materials)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", 0) < 0:
        print("error: --seed must be >= 0", file=sys.stderr)
        return 2
    if getattr(args, "noise_sigma", 0.0) < 0:
        print("error: --noise-sigma must be >= 0", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
