"""Config-driven pipeline: materials, assembly, solve and postprocess."""
from __future__ import annotations

import numpy as np

from . import theory
from .assembly import assemble
from .element import (
    LoadSpec,
    Section,
    default_shear_factor,
    resolve_closure,
    structured_mesh,
)
from .layup import Layup
from .materials import EfficiencyParams, MaterialLibrary, T_REF, default_library
from .postprocess import NondimScheme, ResultField, thickness_profile
from .solvers import solve_modes, solve_static

# sample locations (fractions of a, b) for the reported table quantities and profiles
TABLE_POINTS = {
    "u": (0.0, 0.5),
    "w": (0.5, 0.5),
    "sxx": (0.5, 0.5),
    "sxz": (0.0, 0.5),
}
PROFILE_POINTS = dict(TABLE_POINTS, v=(0.5, 0.0))


class AnalysisError(RuntimeError):
    """Failure inside a run, tagged with the job name."""


def geometry(cfg):
    g = cfg["geometry"]
    a = float(g["a"])
    b = float(g["b"]) if "b" in g else a / float(g.get("a_b", 1.0))
    h = float(g["h"]) if "h" in g else a / float(g["a_h"])
    return a, b, h


def library(cfg) -> MaterialLibrary:
    path = cfg["materials"].get("library")
    return MaterialLibrary.load(path) if path else default_library()


def build_layup(cfg, lib=None) -> Layup:
    lib = lib or library(cfg)
    mats = cfg["materials"]
    lay = cfg["layup"]
    _, _, h = geometry(cfg)
    try:
        cnt = lib.cnt[mats["cnt"]]
        matrix = lib.matrix[mats["matrix"]]
    except KeyError as exc:
        raise AnalysisError(f"unknown material preset {exc}") from exc
    v = float(lay["v_star"])
    if "efficiency" in mats:
        eta = EfficiencyParams(*mats["efficiency"])
    else:
        eta = lib.efficiency_for(matrix.name, v)
    if lay["type"] == "single":
        return Layup.single(h, lay["grading"], v, cnt, matrix, eta)
    core = lib.core[mats["core"]]
    return Layup.sandwich(
        h, float(lay["core_to_face"]), v, cnt, matrix, eta, core,
        distribution=lay.get("distribution", "FG"),
    )


def build_section(cfg, layup, var, thermal=False) -> Section:
    sf = cfg["shear_factor"]
    sf = default_shear_factor(var) if sf == "auto" else float(sf)
    closure = resolve_closure(cfg["closure"], var)
    return Section(layup, float(cfg["temperature"]), closure=closure,
                   thermal=thermal, shear_factor=sf)


def nondim_scheme(cfg, kind, lib=None):
    lib = lib or library(cfg)
    core = lib.core[cfg["materials"]["core"]]
    a, _, h = geometry(cfg)
    amp = cfg["load"]["amplitude"] if kind != "frequency" else None
    convention = cfg["outputs"]["nondim"]
    return NondimScheme(
        kind, a, h, E_ref=core.E(T_REF), alpha_ref=core.alpha(T_REF), rho_ref=core.rho,
        amplitude=amp, convention="tables" if convention == "none" else convention,
    )


def _value(field, quantity, x, y, z, side=None):
    if quantity in ("u", "v", "w"):
        return float(field.displacement_at(x, y, z, side)["uvw".index(quantity)])
    if quantity in ("sxz", "syz"):
        sxz, syz = field.recover_transverse_shear(x, y, z)
        return float(sxz if quantity == "sxz" else syz)
    s = field.in_plane_stress_at(x, y, z, side)
    return float(s[("sxx", "syy", "sxy").index(quantity)])


def run(cfg) -> dict:
    """Execute one validated config; returns the report dict.

    The report holds ``config``, ``diagnostics``, ``results`` and
    ``profiles`` (rows of ``[z, side, value]`` keyed by quantity).
    """
    name = cfg.get("name", "analysis")
    try:
        return _run(cfg)
    except AnalysisError:
        raise
    except Exception as exc:  # tag any failure with the job
        raise AnalysisError(f"job {name!r}: {type(exc).__name__}: {exc}") from exc


def _run(cfg):
    lib = library(cfg)
    a, b, h = geometry(cfg)
    var = theory.variant(cfg["variant"])
    layup = build_layup(cfg, lib)
    out = cfg["outputs"]
    load = None
    if cfg["analysis"] == "static":
        load = LoadSpec(cfg["load"]["kind"], float(cfg["load"]["amplitude"]))
    section = build_section(cfg, layup, var, thermal=load is not None and load.kind == "thermal")
    mesh = structured_mesh(a, b, cfg["mesh"]["nx"], cfg["mesh"]["ny"])
    system = assemble(mesh, var, section, load, with_mass=cfg["analysis"] == "modal")
    diag = {
        "n_nodes": int(mesh.n_nodes),
        "n_equations": int(system.n_eq),
        "closure": section.closure,
        "shear_factor": section.shear_factor,
    }
    results = {}
    profiles = {}
    has_core = layup.n_layers > 1
    if cfg["analysis"] == "modal":
        modal = solve_modes(system.K, system.M, out["n_modes"])
        diag["eigen_residuals"] = [float(r) for r in modal.eigen_residuals]
        results["omega"] = [float(w) for w in modal.omegas]
        scheme = nondim_scheme(cfg, "frequency", lib)
        results["Omega"] = [float(w) for w in modal.omegas * scheme.factor("omega")]
        return {"config": cfg, "diagnostics": diag, "results": results, "profiles": profiles}

    sol = solve_static(system)
    diag["residual"] = float(sol.residual)
    field = ResultField(system, sol.delta, load, out["thermal_stress"])
    scheme = None
    if out["nondim"] != "none" and has_core:
        scheme = nondim_scheme(cfg, "thermal" if load.kind == "thermal" else "mechanical", lib)
    if out["center_deflection"]:
        w0 = field.mid_surface(a / 2, b / 2)[0][theory.W0]
        results["w0_center"] = float(w0)
        results["w_c"] = float(-100.0 * w0 / h)
    if out["table_quantities"]:
        for q, (fx, fy) in TABLE_POINTS.items():
            z = h / 2
            if q == "sxz":
                z = -h / 6 if load.kind == "thermal" else 0.0
            raw = _value(field, q, fx * a, fy * b, z)
            results[f"{q}_raw"] = raw
            if scheme is not None:
                results[f"{q}_bar"] = float(raw * scheme.factor(q))
    points = []
    for p in out["points"]:
        raw = _value(field, p["quantity"], p["x"] * a, p["y"] * b, p["z"] * h, p.get("side"))
        row = {k: p[k] for k in sorted(p)}
        row["raw"] = raw
        if scheme is not None:
            row["nondim"] = float(raw * scheme.factor(p["quantity"]))
        points.append(row)
    if points:
        results["points"] = points
    for q in out["profiles"]:
        fx, fy = PROFILE_POINTS[q]
        rows = thickness_profile(field, fx * a, fy * b, q, out["profile_samples"], scheme)
        profiles[q] = [[z, side, v] for z, side, v in rows]
    return {"config": cfg, "diagnostics": diag, "results": results, "profiles": profiles}


def scalar_results(report) -> dict:
    """Flatten a report's results into name -> float for tabulation."""
    flat = {}
    for key, value in report["results"].items():
        if key == "points":
            for i, p in enumerate(value):
                label = p.get("label", f"p{i}_{p['quantity']}")
                flat[f"{label}_raw"] = p["raw"]
                if "nondim" in p:
                    flat[f"{label}_bar"] = p["nondim"]
        elif isinstance(value, list):
            for i, v in enumerate(value):
                flat[f"{key}_{i + 1}"] = v
        else:
            flat[key] = value
    return flat


def format_number(value) -> str:
    return f"{value:.9e}" if isinstance(value, float) or isinstance(value, np.floating) else str(value)
