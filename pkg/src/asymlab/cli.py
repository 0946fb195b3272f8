"""Command-line scenario runner.

Reads a JSON scenario config, runs one of the analysis actions, and writes a
machine-readable ``report.json`` plus delimited data files (and rendered
figures, unless suppressed) into the output directory.

Every number in ``report.json`` is wrapped as ``{"value": x, "provenance": p}``
where ``p`` is one of ``measured`` (computed from a run), ``fitted`` (a model
fit or extrapolation), ``certificate`` (an a-priori bound), or ``config``
(echoed input).  The report is deterministic for a fixed config, seed and
version: rerunning produces a byte-identical file apart from the ``timestamp``
line.

Exit codes: 0 = ran and passed, 2 = ran but the classification/stability
check failed, 1 = configuration or runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from datetime import datetime, timezone

import jsonschema
import numpy as np

from . import __version__
from .algebra import LieAlgebra, QuadraticHamiltonian
from .conditions import (
    ClassificationReport,
    Condition1Params,
    certify_hamiltonian,
    check_condition_1,
    classical_null_condition,
    classify_growth,
)
from .ode import DEFAULT_TOL, blowup_time_estimate, integrate, save_trajectory
from .system import (
    WaveSystemSpec,
    asymptotic_system,
    catalogue,
    catalogue_describe,
    catalogue_names,
    from_hamiltonian,
    hamiltonian_provenance,
)
from .wave1d import (
    bump_data,
    compare_to_asymptotic,
    evolve,
    hamiltonian_drift,
    radiation_trace,
    save_grid,
    save_trace,
)

SCHEMA_VERSION = "1"

ACTIONS = ("asymptotic", "classify", "condition1", "wave", "trace", "full_pipeline")

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

#: JSON Schema (draft 2020-12) for scenario configs.  ``validate-config``
#: checks against this and then applies the semantic checks in
#: :func:`validate_config`.
CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["system", "action"],
    "additionalProperties": False,
    "properties": {
        "system": {
            "oneOf": [
                {"type": "string"},
                {
                    "type": "array",
                    "minItems": 1,
                    "prefixItems": [{"type": "string"}],
                    "items": {"type": "number"},
                },
                {"type": "object"},
            ]
        },
        "action": {"enum": list(ACTIONS)},
        "label": {"type": "string"},
        "output_dir": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "eps": _POSITIVE,
        "eps_sweep": {"type": "array", "items": _POSITIVE, "minItems": 1},
        "delta": _POSITIVE,
        "C": {"type": "number", "minimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "s_max": _POSITIVE,
        "condition1_trials": {"type": "integer", "minimum": 1},
        "condition1_s_max": _POSITIVE,
        "tol": _POSITIVE,
        "fail_threshold": _POSITIVE,
        "blowup_threshold": _POSITIVE,
        "phi0": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "u_range": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 2,
                    "maxItems": 2,
                },
                "v_range": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 2,
                    "maxItems": 2,
                },
                "h": _POSITIVE,
                "amplitudes": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 1,
                },
                "center": {"type": "number"},
                "width": _POSITIVE,
                "stride": {"type": "integer", "minimum": 1},
            },
        },
        "u_fixed": {
            "oneOf": [
                {"type": "number"},
                {"type": "array", "items": {"type": "number"}, "minItems": 1},
            ]
        },
        "s_start": {"type": "number"},
    },
}

# Provenance assignment for report keys whose numbers are not direct
# measurements.  Anything not listed here defaults to the subtree default.
_FITTED_KEYS = frozenset(
    {
        "rate",
        "r_squared",
        "rms_log_residual",
        "params",
        "window",
        "s_star",
        "decay_rate",
        "blowup_s_estimate",
    }
)
_CONFIG_KEYS = frozenset({"phi0", "inputs", "eps", "delta", "C", "s_max", "seed", "index"})
_CERTIFICATE_KEYS = frozenset({"h_norm_bound"})


def _wrap_numbers(obj, default, key=None):
    """Wrap every number in ``obj`` as {"value": x, "provenance": ...}.

    Lists made purely of numbers are wrapped as one value (a vector is one
    quantity), mixed lists recurse.  Booleans and strings pass through.
    """
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, float)):
        prov = default
        if key in _FITTED_KEYS:
            prov = "fitted"
        elif key in _CERTIFICATE_KEYS:
            prov = "certificate"
        elif key in _CONFIG_KEYS and default == "measured":
            prov = "config"
        if isinstance(obj, float) and not np.isfinite(obj):
            return {"value": repr(obj), "provenance": prov}
        return {"value": obj, "provenance": prov}
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            sub_default = default
            if k == "certificate":
                sub_default = "certificate"
            elif k == "fit":
                sub_default = "fitted"
            elif k == "inputs":
                sub_default = "config"
            out[k] = _wrap_numbers(v, sub_default, k)
        return out
    if isinstance(obj, (list, tuple)):
        items = list(obj)
        if items and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in items
        ):
            prov = default
            if key in _FITTED_KEYS:
                prov = "fitted"
            elif key in _CERTIFICATE_KEYS:
                prov = "certificate"
            elif key in _CONFIG_KEYS and default == "measured":
                prov = "config"
            vals = [repr(x) if isinstance(x, float) and not np.isfinite(x) else x for x in items]
            return {"value": vals, "provenance": prov}
        return [_wrap_numbers(x, default, key) for x in items]
    return obj


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _plain(obj):
    """Recursively convert numpy scalars/arrays so the wrapper sees floats."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def load_config(path):
    """Parse the JSON config at ``path``; raise ValueError on bad JSON."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    return cfg


def validate_config(cfg):
    """Return a list of human-readable problems ('' pointer = whole doc)."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = [
        f"{err.json_path}: {err.message}"
        for err in sorted(validator.iter_errors(cfg), key=lambda e: e.json_path)
    ]
    if errors:
        return errors

    raw = cfg["system"]
    if isinstance(raw, str):
        if raw not in catalogue_names():
            errors.append(
                f"$.system: unknown catalogue system {raw!r}; try the 'list' subcommand"
            )
    elif isinstance(raw, list):
        if raw[0] not in catalogue_names():
            errors.append(f"$.system[0]: unknown catalogue system {raw[0]!r}")
    else:
        pair = "algebra" in raw or "hamiltonian" in raw
        if pair and not ("algebra" in raw and "hamiltonian" in raw):
            errors.append("$.system: need both 'algebra' and 'hamiltonian' keys")
        elif not pair and "n_fields" not in raw:
            errors.append("$.system: inline system object needs an 'n_fields' key")
    if errors:
        return errors

    try:
        parse_system(cfg["system"])
    except (ValueError, KeyError, TypeError) as exc:
        errors.append(f"$.system: {exc}")

    action = cfg["action"]
    if action in ("wave", "trace", "full_pipeline"):
        grid = cfg.get("grid", {})
        ur, vr = grid.get("u_range"), grid.get("v_range")
        if ur is not None and not ur[0] < ur[1]:
            errors.append("$.grid.u_range: must be increasing")
        if vr is not None and not vr[0] < vr[1]:
            errors.append("$.grid.v_range: must be increasing")
        if ur is not None and vr is not None and not vr[0] > ur[1]:
            errors.append("$.grid: v_range must start above u_range end (r > 0)")
    if "eps" in cfg and action in ("classify", "full_pipeline") and cfg["eps"] > 0.5:
        errors.append("$.eps: classification requires eps <= 0.5")
    return errors


def parse_system(raw):
    """Resolve the config ``system`` entry.

    Accepts a catalogue name, a ``[name, param...]`` list, an inline system
    object, or an ``{"algebra": ..., "hamiltonian": ...}`` pair (which keeps
    the provenance needed for boundedness certificates).

    Returns ``(spec, label)``.
    """
    if isinstance(raw, str):
        return catalogue(raw), raw
    if isinstance(raw, list):
        name = raw[0]
        params = [float(p) for p in raw[1:]]
        label = name if not params else f"{name}({', '.join(repr(p) for p in params)})"
        return catalogue(name, *params), label
    if isinstance(raw, dict):
        if "algebra" in raw:
            alg = LieAlgebra.from_dict(raw["algebra"])
            ham = QuadraticHamiltonian.from_dict(raw["hamiltonian"])
            spec = from_hamiltonian(alg, ham)
            return spec, raw.get("label", alg.label or "hamiltonian system")
        spec = WaveSystemSpec.from_dict(raw)
        return spec, raw.get("label", f"inline({spec.n_fields} fields)")
    raise ValueError(f"unsupported system entry of type {type(raw).__name__}")


def _effective(cfg):
    """Fill in per-action defaults; returns a new dict (the echoed config)."""
    out = dict(cfg)
    action = out["action"]
    out.setdefault("seed", 0)
    out.setdefault("tol", DEFAULT_TOL)
    out.setdefault("eps", 0.1 if action in ("asymptotic", "classify") else 0.01)
    if action in ("classify", "full_pipeline"):
        out.setdefault("trials", 8)
        out.setdefault("s_max", 200.0)
    if action in ("condition1",):
        out.setdefault("trials", 64)
        out.setdefault("s_max", 60.0)
    if action == "full_pipeline":
        out.setdefault("condition1_trials", 32)
        out.setdefault("condition1_s_max", 60.0)
    if action in ("condition1", "full_pipeline"):
        out.setdefault("delta", 0.5)
        out.setdefault("C", 1.0)
        out.setdefault("fail_threshold", 100.0)
    if action == "asymptotic":
        out.setdefault("s_max", 100.0)
    if action in ("wave", "trace", "full_pipeline"):
        grid = dict(out.get("grid", {}))
        grid.setdefault("u_range", [0.0, 3.0])
        grid.setdefault("v_range", [6.0, 202.0])
        grid.setdefault("h", 0.05)
        grid.setdefault("stride", 1)
        out["grid"] = grid
    if action in ("trace", "full_pipeline"):
        out.setdefault("u_fixed", [out["grid"]["u_range"][1] * 0.6])
        if not isinstance(out["u_fixed"], list):
            out["u_fixed"] = [out["u_fixed"]]
        out.setdefault("s_start", 2.2)
    return out


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------


def _grid_amplitudes(cfg, spec):
    grid = cfg["grid"]
    if "amplitudes" in grid:
        amps = [float(a) for a in grid["amplitudes"]]
        if len(amps) != spec.n_fields:
            raise ValueError(
                f"grid.amplitudes has {len(amps)} entries for {spec.n_fields} fields"
            )
        return amps
    eps = cfg["eps"]
    return [eps * 0.8**k for k in range(spec.n_fields)]


def _run_wave(cfg, spec, outdir):
    """Evolve the characteristic grid; returns (grid, payload, files)."""
    gcfg = cfg["grid"]
    amps = _grid_amplitudes(cfg, spec)
    data = bump_data(
        spec.n_fields,
        tuple(gcfg["u_range"]),
        tuple(gcfg["v_range"]),
        amps,
        center=gcfg.get("center"),
        width=gcfg.get("width"),
    )
    grid = evolve(
        spec,
        data,
        gcfg["h"],
        blowup_threshold=cfg.get("blowup_threshold", 1e6),
        label=cfg.get("label", ""),
    )
    csv_path, meta_path = save_grid(grid, os.path.join(outdir, "grid"), stride=gcfg["stride"])
    payload = {
        "status": grid.status,
        "n_fields": grid.psi.shape[0],
        "nu": grid.nu,
        "nv": grid.nv,
        "h": grid.h,
        "r_min": grid.r_min,
        "amplitudes": amps,
        "sup_psi": float(np.max(np.abs(grid.psi))),
    }
    if grid.blowup_point is not None:
        payload["blowup_point"] = list(grid.blowup_point)
    files = [os.path.basename(csv_path), os.path.basename(meta_path)]
    return grid, payload, files


def _run_traces(cfg, spec, asys, grid, outdir):
    """Extract radiation traces and compare them with the limit flow."""
    pair = hamiltonian_provenance(asys)
    ham = pair[1] if pair is not None else None
    eps_norm = max(abs(a) for a in cfg["grid_amplitudes_resolved"])
    entries, files, artifacts = [], [], []
    for k, u_val in enumerate(cfg["u_fixed"]):
        trace = radiation_trace(grid, float(u_val))
        stem = os.path.join(outdir, f"trace_{k}")
        csv_path, meta_path = save_trace(trace, stem)
        files.extend([os.path.basename(csv_path), os.path.basename(meta_path)])
        comp = compare_to_asymptotic(
            trace, asys, cfg["s_start"], eps=eps_norm, tol=cfg["tol"]
        )
        entry = {
            "u_fixed": trace.u_fixed,
            "s_range": [float(trace.s[0]), float(trace.s[-1])],
            "comparison": comp.to_dict(),
        }
        drift = None
        if ham is not None:
            drift = hamiltonian_drift(trace, ham)
            entry["hamiltonian_drift"] = drift.to_dict()
        entries.append(entry)
        artifacts.append((trace, comp, drift))
    return entries, files, artifacts


def _action_asymptotic(cfg, spec, asys, outdir, threads, want_figures):
    from . import figures

    phi0 = cfg.get("phi0")
    if phi0 is None:
        phi0 = [cfg["eps"]] * asys.n_fields
    if len(phi0) != asys.n_fields:
        raise ValueError(f"phi0 has {len(phi0)} entries for {asys.n_fields} fields")
    traj = integrate(
        asys,
        np.asarray(phi0, dtype=float),
        cfg["s_max"],
        tol=cfg["tol"],
        blowup_threshold=cfg.get("blowup_threshold", 1e6),
    )
    csv_path, meta_path = save_trajectory(traj, os.path.join(outdir, "trajectory"))
    payload = {
        "status": traj.status,
        "phi0": list(map(float, phi0)),
        "s_end": float(traj.s[-1]),
        "sup_norm": traj.max_norm,
        "final_state": [float(x) for x in traj.final()],
        "n_steps": int(traj.n_accepted),
    }
    if traj.status in ("blowup", "step_underflow"):
        est = blowup_time_estimate(traj)
        if est is not None:
            payload["blowup_s_estimate"] = float(est)
    figs = []
    if want_figures:
        fig_path = os.path.join(outdir, "figures", "trajectory.png")
        figures.trajectory_figure(traj, fig_path, title=cfg.get("label", ""))
        figs.append("figures/trajectory.png")
    passed = traj.status == "completed"
    return payload, [os.path.basename(csv_path), os.path.basename(meta_path)] + figs, passed


def _action_classify(cfg, spec, asys, outdir, threads, want_figures):
    from . import figures

    if classical_null_condition(spec):
        report = ClassificationReport(
            verdict="classical_null",
            passed=True,
            params={"eps": cfg["eps"], "s_max": cfg["s_max"], "trials": 0, "seed": cfg["seed"]},
        )
        payload = report.to_dict()
        payload["note"] = (
            "all coefficients pair outgoing with ingoing derivatives; the limit "
            "flow is trivial and no sampling is needed"
        )
        return payload, [], True
    report = classify_growth(
        asys,
        cfg["eps"],
        cfg["s_max"],
        trials=cfg["trials"],
        seed=cfg["seed"],
        tol=cfg["tol"],
    )
    figs = []
    if want_figures:
        fig_path = os.path.join(outdir, "figures", "classify.png")
        figures.classify_figure(asys, report, fig_path, title=cfg.get("label", ""))
        figs.append("figures/classify.png")
    return report.to_dict(), figs, report.passed


def _action_condition1(cfg, spec, asys, outdir, threads, want_figures):
    from . import figures

    sweep = cfg.get("eps_sweep") or [cfg["eps"]]
    reports = []
    for eps in sweep:
        params = Condition1Params(
            eps=float(eps),
            delta=cfg["delta"],
            C=cfg["C"],
            trials=cfg["trials"],
            s_max=cfg["s_max"],
            seed=cfg["seed"],
        )
        reports.append(
            check_condition_1(
                asys,
                params,
                tol=cfg["tol"],
                fail_threshold=cfg["fail_threshold"],
                n_workers=threads,
            )
        )
    base = reports[0]
    payload = base.to_dict()
    if len(reports) > 1:
        payload["eps_sweep"] = [
            {
                "eps": float(eps),
                "verdict": rep.verdict,
                "passed": rep.passed,
                "c_tilde": rep.c_tilde,
            }
            for eps, rep in zip(sweep, reports)
        ]
    figs = []
    if want_figures:
        fig_path = os.path.join(outdir, "figures", "condition1.png")
        figures.condition1_figure(base, fig_path)
        figs.append("figures/condition1.png")
    return payload, figs, all(r.passed for r in reports)


def _action_wave(cfg, spec, asys, outdir, threads, want_figures):
    from . import figures

    grid, payload, files = _run_wave(cfg, spec, outdir)
    if want_figures:
        fig_path = os.path.join(outdir, "figures", "grid.png")
        figures.grid_figure(grid, fig_path)
        files.append("figures/grid.png")
    return payload, files, grid.status == "completed"


def _action_trace(cfg, spec, asys, outdir, threads, want_figures):
    from . import figures

    grid, wave_payload, files = _run_wave(cfg, spec, outdir)
    cfg["grid_amplitudes_resolved"] = wave_payload["amplitudes"]
    entries, tfiles, artifacts = _run_traces(cfg, spec, asys, grid, outdir)
    files.extend(tfiles)
    if want_figures:
        gfig = os.path.join(outdir, "figures", "grid.png")
        figures.grid_figure(grid, gfig)
        files.append("figures/grid.png")
        for k, (trace, comp, drift) in enumerate(artifacts):
            tfig = os.path.join(outdir, "figures", f"trace_{k}.png")
            figures.trace_figure(trace, tfig, sys=asys, comparison=comp, drift=drift)
            files.append(f"figures/trace_{k}.png")
    payload = {"wave": wave_payload, "traces": entries}
    return payload, files, grid.status == "completed"


def _action_full_pipeline(cfg, spec, asys, outdir, threads, want_figures):
    from . import figures

    payload, files = {}, []

    pair = hamiltonian_provenance(asys)
    if pair is not None:
        cert = certify_hamiltonian(
            pair[0], pair[1], cfg["eps"], cfg["delta"], cfg["C"]
        )
        payload["certificate"] = cert.to_dict()

    sub = dict(cfg)
    sub["trials"] = cfg["condition1_trials"]
    sub["s_max"] = cfg["condition1_s_max"]
    cond_payload, cond_figs, cond_ok = _action_condition1(
        sub, spec, asys, outdir, threads, want_figures
    )
    payload["condition1"] = cond_payload
    files.extend(cond_figs)

    cls_payload, cls_figs, cls_ok = _action_classify(
        cfg, spec, asys, outdir, threads, want_figures
    )
    payload["classify"] = cls_payload
    files.extend(cls_figs)

    trace_payload, trace_files, trace_ok = _action_trace(
        cfg, spec, asys, outdir, threads, want_figures
    )
    payload["wave"] = trace_payload["wave"]
    payload["traces"] = trace_payload["traces"]
    files.extend(trace_files)

    passed = cond_ok and cls_ok and trace_ok
    payload["passed"] = passed
    return payload, files, passed


_DISPATCH = {
    "asymptotic": _action_asymptotic,
    "classify": _action_classify,
    "condition1": _action_condition1,
    "wave": _action_wave,
    "trace": _action_trace,
    "full_pipeline": _action_full_pipeline,
}


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------


def run_scenario(cfg, outdir, *, threads=1, want_figures=True):
    """Run one scenario config.  Returns (exit_code, report_path)."""
    cfg = _effective(cfg)
    spec, label = parse_system(cfg["system"])
    cfg.setdefault("label", label)
    asys = asymptotic_system(spec)

    os.makedirs(outdir, exist_ok=True)
    if want_figures:
        os.makedirs(os.path.join(outdir, "figures"), exist_ok=True)

    payload, files, passed = _DISPATCH[cfg["action"]](
        cfg, spec, asys, outdir, threads, want_figures
    )

    echo = {k: v for k, v in cfg.items() if k != "grid_amplitudes_resolved"}
    report = {
        "schema_version": SCHEMA_VERSION,
        "generator": f"asymlab {__version__}",
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "action": cfg["action"],
        "system": label,
        "passed": passed,
        "config": _wrap_numbers(_plain(echo), "config"),
        "result": _wrap_numbers(_plain(payload), "measured"),
        "files": sorted(files),
    }
    report_path = os.path.join(outdir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return (0 if passed else 2), report_path


def _cmd_run(args):
    try:
        cfg = load_config(args.config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    problems = validate_config(cfg)
    if problems:
        for p in problems:
            print(f"config error: {p}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg["seed"] = args.seed
    outdir = args.output or cfg.get("output_dir") or "asymlab_out"
    try:
        code, report_path = run_scenario(
            cfg, outdir, threads=args.threads, want_figures=not args.no_figures
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    with open(report_path, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    verdict = _find_verdict(report.get("result", {}))
    line = f"{report['action']}: {'pass' if report['passed'] else 'FAIL'}"
    if verdict:
        line += f" (verdict: {verdict})"
    print(line)
    print(f"report: {report_path}")
    return code


def _find_verdict(result):
    if isinstance(result, dict):
        if isinstance(result.get("verdict"), str):
            return result["verdict"]
        for key in ("classify", "condition1"):
            if key in result:
                v = _find_verdict(result[key])
                if v:
                    return v
    return ""


def _cmd_list(args):
    rows = []
    for name in catalogue_names():
        rows.append((name, catalogue_describe(name)))
    width = max(len(r[0]) for r in rows)
    for name, note in rows:
        print(f"{name:<{width}}  {note}")
    return 0


def _cmd_validate(args):
    try:
        cfg = load_config(args.config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    problems = validate_config(cfg)
    if problems:
        for p in problems:
            print(f"config error: {p}", file=sys.stderr)
        return 1
    print("config ok")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="asymlab",
        description="asymptotic analysis and characteristic evolution for "
        "semilinear wave systems",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config and write a report")
    p_run.add_argument("--config", required=True, help="path to a JSON scenario config")
    p_run.add_argument("--output", help="output directory (default: config output_dir)")
    p_run.add_argument("--seed", type=int, help="override the config seed")
    p_run.add_argument(
        "--threads", type=int, default=1, help="worker threads for sampling runs"
    )
    p_run.add_argument(
        "--no-figures", action="store_true", help="skip rendering PNG figures"
    )
    p_run.set_defaults(func=_cmd_run)

    p_list = sub.add_parser("list", help="list the built-in example systems")
    p_list.set_defaults(func=_cmd_list)

    p_val = sub.add_parser("validate-config", help="check a config without running it")
    p_val.add_argument("--config", required=True, help="path to a JSON scenario config")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
