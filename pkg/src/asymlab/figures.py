"""File-output matplotlib figures for the CLI report path.

Every function renders one PNG to a given path and returns the path; nothing
is ever shown interactively (Agg backend).  Figures are a visual companion to
the CSV/JSON artifacts, not a data channel — all numbers live in report.json.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .conditions import ClassificationReport
from .ode import Trajectory, integrate
from .system import AsymptoticSystem
from .wave1d import CharacteristicGrid, ComparisonRecord, DriftRecord, RadiationTrace

_DPI = 140


def _finish(fig, path: str) -> str:
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def trajectory_figure(traj: Trajectory, path: str, title: str = "") -> str:
    fig, ax = plt.subplots(figsize=(7, 4.2))
    for a in range(traj.n_fields):
        ax.plot(traj.s, traj.phi[:, a], lw=1.2, label=f"$\\Phi_{{{a}}}$")
    ax.set_xlabel("s")
    ax.set_ylabel("$\\Phi_A(s)$")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _finish(fig, path)


def classify_figure(
    sys: AsymptoticSystem, report: ClassificationReport, path: str, title: str = ""
) -> str:
    """Corner-trial envelope with the selected growth model overlaid (log y)."""
    params = report.params or {}
    eps = float(params.get("eps", 0.1))
    s_max = float(params.get("s_max", 100.0))
    corner = report.trials[0] if report.trials else None
    phi0 = np.array(corner.phi0) if corner else np.full(sys.n_fields, eps)
    traj = integrate(sys, phi0, s_max, blowup_threshold=1e100)
    env = np.max(np.abs(traj.phi), axis=1)

    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.semilogy(traj.s, np.maximum(env, 1e-300), lw=1.2, label="sup$_A|\\Phi_A|$ (corner trial)")
    fit = corner.fit if corner else report.fit
    if fit is not None:
        ss = np.linspace(*fit.window, 200)
        if fit.model == "const":
            pred = np.full_like(ss, fit.params[0])
        elif fit.model == "linear":
            pred = fit.params[0] + fit.params[1] * ss
        elif fit.model == "exponential":
            pred = fit.params[0] * np.exp(fit.params[1] * ss)
        else:
            pred = np.exp(fit.params[0] * np.exp(fit.params[1] * ss))
        ax.semilogy(ss, np.maximum(pred, 1e-300), "--", lw=1.4, label=f"fit: {fit.model}")
    ax.set_xlabel("s")
    ax.set_ylabel("envelope")
    ax.set_title(title or f"verdict: {report.verdict}")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _finish(fig, path)


def condition1_figure(report: ClassificationReport, path: str, title: str = "") -> str:
    """Per-trial sup-norm ratios against the fail threshold and certificate."""
    trials = report.trials
    fig, ax = plt.subplots(figsize=(7, 4.2))
    eps = float((report.params or {}).get("eps", 1.0))
    for kind, marker in (("random_piecewise", "o"), ("adversarial_aligned", "x")):
        pts = [(t.index, t.sup_norm / eps) for t in trials if t.forcing == kind]
        if pts:
            idx, vals = zip(*pts)
            ax.plot(idx, vals, marker, ms=3.5, lw=0, label=kind)
    if report.certificate is not None:
        ax.axhline(
            report.certificate.c_tilde_certified,
            color="tab:red",
            lw=1.2,
            ls="--",
            label="certificate bound",
        )
    ax.set_xlabel("trial index")
    ax.set_ylabel("sup$_s$ max$_A|\\Phi_A|$ / $\\epsilon$")
    ax.set_title(title or f"verdict: {report.verdict} (C̃ = {report.c_tilde:.3g})")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _finish(fig, path)


def grid_figure(grid: CharacteristicGrid, path: str, field: int = 0, title: str = "") -> str:
    fig, ax = plt.subplots(figsize=(7, 4.6))
    im = ax.imshow(
        grid.psi[field].T,
        origin="lower",
        aspect="auto",
        extent=(*grid.u_range, *grid.v_range),
        cmap="RdBu_r",
    )
    fig.colorbar(im, ax=ax, label=f"$\\psi_{{{field}}}$")
    if grid.status == "blowup" and grid.blowup_point is not None:
        ax.plot(*grid.blowup_point, "k*", ms=12, label="blow-up")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("u")
    ax.set_ylabel("v")
    ax.set_title(title or f"{grid.label or 'wave run'}: {grid.status}")
    fig.tight_layout()
    return _finish(fig, path)


def trace_figure(
    trace: RadiationTrace,
    path: str,
    sys: AsymptoticSystem | None = None,
    comparison: ComparisonRecord | None = None,
    drift: DriftRecord | None = None,
    title: str = "",
) -> str:
    n_panels = 2 if drift is not None else 1
    fig, axes = plt.subplots(n_panels, 1, figsize=(7, 3.4 * n_panels), sharex=True)
    axes = np.atleast_1d(axes)

    ax = axes[0]
    for a in range(trace.n_fields):
        ax.plot(trace.s, trace.phi[:, a], lw=1.2, label=f"$\\Phi_{{{a}}}$ trace")
    if sys is not None and comparison is not None:
        phi0 = trace.interp(np.array([comparison.s_start]))[0]
        span = float(trace.s[-1]) - comparison.s_start
        traj = integrate(sys, phi0, span, h_max=span / 256.0)
        for a in range(trace.n_fields):
            ax.plot(
                comparison.s_start + traj.s,
                traj.phi[:, a],
                "--",
                lw=1.0,
                color="0.25" if a == 0 else None,
                label="asymptotic flow" if a == 0 else None,
            )
        ax.axvline(comparison.s_start, color="0.6", lw=0.8, ls=":")
    ax.set_ylabel("$\\Phi_A$")
    ax.set_title(title or f"radiation trace at u = {trace.u_fixed:g}")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)

    if drift is not None:
        ax2 = axes[1]
        ax2.plot(drift.s, drift.h_bar, lw=1.2)
        ax2.axvspan(*drift.tail_window, color="tab:orange", alpha=0.15, label="tail window")
        ax2.set_ylabel("$\\bar{H}(\\Phi)$")
        ax2.legend(loc="best", fontsize=8)
        ax2.grid(True, alpha=0.3)
    axes[-1].set_xlabel("s = log r")
    fig.tight_layout()
    return _finish(fig, path)
