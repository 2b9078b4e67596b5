"""Pinned validation suites comparing runs against embedded golden values."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

from . import config as config_mod
from .analysis import run

SUITE_NAMES = (
    "mesh-convergence",
    "single-layer-static",
    "sandwich-static",
    "sandwich-thermal",
    "modal-thermal",
)
STATIC_QUANTITIES = ("u", "w", "sxx", "sxz")


def load_goldens():
    text = resources.files("cntplate.data").joinpath("goldens.json").read_text()
    return json.loads(text)


def single_layer_config(variant, grading, mesh, settings):
    s = settings["single_layer"]
    return config_mod.validate({
        "name": f"single-{variant}-{grading}-{mesh}x{mesh}",
        "analysis": "static",
        "geometry": {"a": 1.0, "a_h": s["a_h"]},
        "layup": {"type": "single", "grading": grading, "v_star": s["v_star"]},
        "materials": {"matrix": s["matrix"]},
        "variant": variant,
        "closure": "by-variant",
        "mesh": {"nx": mesh, "ny": mesh},
        "load": dict(s["load"]),
    })


def sandwich_config(variant, a_h, core_to_face, v_star, settings, load=None,
                    temperature=300.0, distribution="FG", mesh=None):
    s = settings["sandwich"]
    n = mesh or s["mesh"]
    cfg = {
        "name": f"sandwich-{variant}-ah{a_h}-r{core_to_face}-v{v_star}-T{temperature:g}"
                f"-{distribution}-{load or 'modal'}-{n}x{n}",
        "analysis": "modal" if load is None else "static",
        "geometry": {"a": 1.0, "a_h": a_h},
        "layup": {"type": "sandwich", "core_to_face": core_to_face, "v_star": v_star,
                  "distribution": distribution},
        "materials": {"matrix": s["matrix"], "core": s["core"]},
        "temperature": temperature,
        "variant": variant,
        "closure": "by-variant",
        "mesh": {"nx": n, "ny": n},
    }
    if load is None:
        cfg["outputs"] = {"n_modes": 1, "center_deflection": False}
    else:
        cfg["load"] = {"kind": load, "amplitude": s["load_amplitude"]}
        cfg["outputs"] = {
            "table_quantities": True,
            "thermal_stress": "retain" if load == "thermal" else "subtract",
        }
    return config_mod.validate(cfg)


def _run_all(configs, workers=1):
    """Run configs (deduplicated by name) and return name -> report or error string."""
    unique = {}
    for cfg in configs:
        unique.setdefault(cfg["name"], cfg)
    names = list(unique)
    jobs = [unique[n] for n in names]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_safe_run, jobs))
    else:
        outs = [_safe_run(c) for c in jobs]
    return dict(zip(names, outs))


def _safe_run(cfg):
    try:
        return run(cfg)
    except Exception as exc:
        return f"{type(exc).__name__}: {exc}"


def _cell(suite, case, quantity, expected, computed, tol):
    if isinstance(computed, str):
        return dict(suite=suite, case=case, quantity=quantity, expected=expected,
                    computed=None, rel_error=None, tolerance=tol, status="error",
                    message=computed)
    rel = abs(computed - expected) / abs(expected)
    return dict(suite=suite, case=case, quantity=quantity, expected=expected,
                computed=computed, rel_error=rel, tolerance=tol,
                status="pass" if rel <= tol else "fail")


def _tol(tols, variant):
    return tols.get(variant, tols.get("default"))


def _result(reports, name, key):
    rep = reports[name]
    if isinstance(rep, str):
        return rep
    value = rep["results"][key]
    return value[0] if isinstance(value, list) else value


def suite_mesh_convergence(goldens, workers=1):
    suite_def = goldens["suites"]["mesh-convergence"]
    settings = goldens["settings"]
    tols = suite_def["tolerances"]
    configs, plan = [], []
    for row in suite_def["single_layer"]:
        cfg = single_layer_config(row["variant"], row["grading"], row["mesh"], settings)
        configs.append(cfg)
        plan.append((row, cfg["name"], "w_c"))
    for row in suite_def["sandwich"]:
        cfg = sandwich_config(row["variant"], row["a_h"], row["core_to_face"], row["v_star"],
                              settings, load="sinusoidal", mesh=row["mesh"])
        configs.append(cfg)
        plan.append((row, cfg["name"], "w_bar"))
    reports = _run_all(configs, workers)
    cells = []
    for row, name, key in plan:
        value = _result(reports, name, key)
        if not isinstance(value, str):
            value = abs(value)
        tol = _tol(tols, row["variant"])
        if row["mesh"] < 8:
            # coarse meshes are informative only; looser band
            tol = max(tol, tols["coarse_mesh"])
        cells.append(_cell("mesh-convergence", name, key, row["value"], value, tol))
    # 8x8 to 16x16 change for the first-order single-layer columns
    for grading in ("UD", "FG-V", "FG-X"):
        n8 = single_layer_config("FSDT5", grading, 8, settings)["name"]
        n16 = single_layer_config("FSDT5", grading, 16, settings)["name"]
        w8, w16 = _result(reports, n8, "w_c"), _result(reports, n16, "w_c")
        if isinstance(w8, str) or isinstance(w16, str):
            cells.append(_cell("mesh-convergence", f"FSDT5-{grading}-8to16", "w_c change",
                               0.0, w8 if isinstance(w8, str) else w16, tols["convergence_8_16"]))
            continue
        change = abs(w16 - w8) / abs(w8)
        cells.append(dict(suite="mesh-convergence", case=f"FSDT5-{grading}-8to16",
                          quantity="w_c relative change", expected=0.0, computed=change,
                          rel_error=change, tolerance=tols["convergence_8_16"],
                          status="pass" if change <= tols["convergence_8_16"] else "fail"))
    return cells


def suite_single_layer_static(goldens, workers=1):
    suite_def = goldens["suites"]["single-layer-static"]
    settings = goldens["settings"]
    configs, plan = [], []
    for row in suite_def["cases"]:
        cfg = single_layer_config("FSDT5", row["grading"], settings["single_layer"]["mesh_default"], settings)
        configs.append(cfg)
        plan.append((row, cfg["name"]))
    reports = _run_all(configs, workers)
    return [
        _cell("single-layer-static", name, "w_c", row["value"], _result(reports, name, "w_c"),
              suite_def["tolerances"]["reference"])
        for row, name in plan
    ]


def _static_suite(suite, goldens, load, workers=1):
    suite_def = goldens["suites"][suite]
    settings = goldens["settings"]
    configs, plan = [], []
    for row in suite_def["cases"]:
        cfg = sandwich_config(row["variant"], row["a_h"], row["core_to_face"], row["v_star"],
                              settings, load=load)
        configs.append(cfg)
        plan.append((row, cfg["name"]))
    reports = _run_all(configs, workers)
    cells = []
    for row, name in plan:
        for q in STATIC_QUANTITIES:
            value = _result(reports, name, f"{q}_bar")
            if not isinstance(value, str):
                # reference grids list magnitudes
                value = abs(value)
            cells.append(_cell(suite, name, q, row[q], value, _tol(suite_def["tolerances"], row["variant"])))
    return cells


def suite_sandwich_static(goldens, workers=1):
    return _static_suite("sandwich-static", goldens, "sinusoidal", workers)


def suite_sandwich_thermal(goldens, workers=1):
    return _static_suite("sandwich-thermal", goldens, "thermal", workers)


def suite_modal_thermal(goldens, workers=1):
    suite_def = goldens["suites"]["modal-thermal"]
    settings = goldens["settings"]
    tols = suite_def["tolerances"]
    configs, plan = [], []

    def add(row, variant, tol, kind):
        cfg = sandwich_config(variant, row["a_h"], row["core_to_face"], row["v_star"], settings,
                              temperature=float(row["temperature"]),
                              distribution=row.get("distribution", "FG"))
        configs.append(cfg)
        plan.append((row, cfg["name"], tol, kind))

    for row in suite_def["validation"]:
        if row["variant"] == "reference":
            add(row, "FSDT5", tols["reference"], "reference")
        else:
            add(row, row["variant"], _tol(tols, row["variant"]), "validation")
    for row in suite_def["trends"]:
        add(row, row["variant"], tols["trend"], "trend")
    reports = _run_all(configs, workers)
    cells = []
    omegas = {}
    for row, name, tol, kind in plan:
        value = _result(reports, name, "Omega")
        cells.append(_cell("modal-thermal", f"{kind}:{name}", "Omega", row["value"], value, tol))
        if not isinstance(value, str):
            omegas[name] = (row, value)
    cells.extend(_trend_cells(omegas))
    return cells


def _trend_cells(omegas):
    """Monotonicity of the computed frequency in V* and in temperature."""
    by_key = {}
    for name, (row, value) in omegas.items():
        base = (row["a_h"], row["core_to_face"], row.get("distribution", "FG"), name.split("-")[1])
        by_key.setdefault(base, {})[(row["v_star"], row["temperature"])] = value
    cells = []
    for base, vals in sorted(by_key.items(), key=lambda kv: str(kv[0])):
        case = "a_h{}-r{}-{}-{}".format(*base)
        for T in sorted({t for _, t in vals}):
            seq = [vals[(v, t)] for v, t in sorted(vals) if t == T]
            if len(seq) > 1:
                ok = all(x < y for x, y in zip(seq, seq[1:]))
                cells.append(dict(suite="modal-thermal", case=f"trend:{case}-T{T}",
                                  quantity="Omega increases with V*", expected=1.0,
                                  computed=float(ok), rel_error=None, tolerance=None,
                                  status="pass" if ok else "fail"))
        for v in sorted({v for v, _ in vals}):
            temps = sorted(t for vv, t in vals if vv == v)
            if len(temps) > 1:
                seq = [vals[(v, t)] for t in temps]
                ok = all(x > y for x, y in zip(seq, seq[1:]))
                cells.append(dict(suite="modal-thermal", case=f"trend:{case}-v{v}",
                                  quantity="Omega decreases with temperature", expected=1.0,
                                  computed=float(ok), rel_error=None, tolerance=None,
                                  status="pass" if ok else "fail"))
    return cells


SUITES = {
    "mesh-convergence": suite_mesh_convergence,
    "single-layer-static": suite_single_layer_static,
    "sandwich-static": suite_sandwich_static,
    "sandwich-thermal": suite_sandwich_thermal,
    "modal-thermal": suite_modal_thermal,
}


def validate_suite(name, workers=1, goldens=None):
    """Run suite ``name``; returns its list of comparison cells."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    return SUITES[name](goldens or load_goldens(), workers)
