"""Adaptive integration of the asymptotic ODE systems, with blow-up detection.

The integrator is an embedded Dormand-Prince 5(4) pair with FSAL and PI step
control.  It distinguishes three terminations:

* ``completed``       — reached s_max;
* ``blowup``          — the solution norm crossed ``blowup_threshold`` (or the
                        step collapsed below ``h_min`` while the norm grew); the
                        singular parameter value is extrapolated from the
                        geometric collapse of the trailing accepted steps;
* ``step_underflow``  — the controller demanded a step below ``h_min`` without
                        norm growth (stiffness, not blow-up).

Forcings model the decaying perturbations of the boundedness/stability
condition: |f(s, Φ)| ≤ C·ε·e^(−δs) in a declared norm.  Piecewise-random
forcings precompute their segment directions from the seed (reentrant, and
steps are clipped to segment boundaries so the pair keeps its order), and the
adversarial mode pushes along the outward normal that saturates the growth
inequality d|y|/ds ≤ |f| of the Hamiltonian certificate.

Everything here is deterministic: identical inputs (including seeds) give
bit-identical trajectories.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .algebra import QuadraticHamiltonian
from .system import AsymptoticSystem

__all__ = [
    "Trajectory",
    "Forcing",
    "make_forcing",
    "integrate",
    "blowup_time_estimate",
    "trajectory_to_csv",
    "trajectory_meta",
    "save_trajectory",
]

TOL_RANGE = (1e-14, 1e-3)
DEFAULT_TOL = 1e-10
DEFAULT_H_MIN = 1e-12
DEFAULT_BLOWUP_THRESHOLD = 1e6
#: an underflowing integration counts as blow-up when the sup norm grew by this factor
UNDERFLOW_GROWTH_FACTOR = 1e3

# Dormand-Prince 5(4) tableau (FSAL: the 7th stage is the next step's first).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
    ]
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4


# ----------------------------------------------------------------------------
# Forcings
# ----------------------------------------------------------------------------


class _PreparedZero:
    norm_name = "none"

    def next_boundary(self, s: float) -> float:
        return math.inf

    def segment(self, s: float) -> int:
        return 0

    def __call__(self, s: float, phi: np.ndarray, seg: int) -> np.ndarray | None:
        return None


class _PreparedPiecewise:
    def __init__(self, forcing: "Forcing", n_fields: int, s_max: float):
        self._C_eps = forcing.C * forcing.eps
        self._delta = forcing.delta
        self._seg_len = forcing.segment_length
        n_seg = int(math.ceil(s_max / forcing.segment_length)) + 2
        rng = np.random.default_rng(forcing.seed)
        raw = rng.standard_normal((n_seg, n_fields))
        if forcing.ham is not None:
            self.norm_name = "htilde"
            H = forcing.ham.matrix
            norms = np.sqrt(np.einsum("ka,ab,kb->k", raw, H, raw))
        else:
            self.norm_name = "max"
            norms = np.max(np.abs(raw), axis=1)
        norms[norms == 0.0] = 1.0  # never happens w.p. 1; keeps rows finite
        self._dirs = raw / norms[:, None]

    def next_boundary(self, s: float) -> float:
        return (math.floor(s / self._seg_len) + 1.0) * self._seg_len

    def segment(self, s: float) -> int:
        return min(int(s // self._seg_len), len(self._dirs) - 1)

    def __call__(self, s: float, phi: np.ndarray, seg: int) -> np.ndarray:
        return (self._C_eps * math.exp(-self._delta * s)) * self._dirs[seg]


class _PreparedAdversarial:
    def __init__(self, forcing: "Forcing"):
        self._C_eps = forcing.C * forcing.eps
        self._delta = forcing.delta
        self._H = None if forcing.ham is None else forcing.ham.matrix
        self.norm_name = "euclidean" if self._H is None else "htilde"

    def next_boundary(self, s: float) -> float:
        return math.inf

    def segment(self, s: float) -> int:
        return 0

    def __call__(self, s: float, phi: np.ndarray, seg: int) -> np.ndarray:
        if self._H is None:
            n = math.sqrt(float(phi @ phi))
        else:
            n = math.sqrt(float(phi @ self._H @ phi))
        if n == 0.0:
            return np.zeros_like(phi)
        return (self._C_eps * math.exp(-self._delta * s) / n) * phi


@dataclass(frozen=True)
class Forcing:
    """Decaying forcing f(s, Φ) with |f| ≤ C·ε·e^(−δs) in a declared norm.

    The norm is the H̃-norm when ``ham`` is attached; otherwise the max-norm
    for ``random_piecewise`` directions and the Euclidean norm for
    ``adversarial_aligned``.  Build with :func:`make_forcing`.
    """

    kind: str  # "zero" | "random_piecewise" | "adversarial_aligned"
    C: float = 0.0
    eps: float = 0.0
    delta: float = 1.0
    segment_length: float = 1.0
    seed: int = 0
    ham: QuadraticHamiltonian | None = None

    def envelope(self, s: "float | np.ndarray") -> "float | np.ndarray":
        return self.C * self.eps * np.exp(-self.delta * np.asarray(s, float))

    def prepare(self, n_fields: int, s_max: float):
        if self.kind == "zero":
            return _PreparedZero()
        if self.kind == "random_piecewise":
            return _PreparedPiecewise(self, n_fields, s_max)
        return _PreparedAdversarial(self)

    def evaluate(self, s: float, phi: npt.ArrayLike) -> np.ndarray:
        """Ad-hoc evaluation (tests, plots); integrate() uses prepare()."""
        phi = np.asarray(phi, float)
        prep = self.prepare(phi.size, max(s, 1.0) * 2.0)
        out = prep(s, phi, prep.segment(s))
        return np.zeros_like(phi) if out is None else out


ZERO_FORCING = Forcing(kind="zero")


def make_forcing(
    kind: str,
    C: float = 1.0,
    eps: float = 0.01,
    delta: float = 1.0,
    seed: int = 0,
    segment_length: float = 1.0,
    ham: QuadraticHamiltonian | None = None,
) -> Forcing:
    """Validated Forcing constructor; see module docstring for the kinds."""
    if kind not in ("zero", "random_piecewise", "adversarial_aligned"):
        raise ValueError(f"unknown forcing kind {kind!r}")
    if kind == "zero":
        return ZERO_FORCING
    if C <= 0 or eps <= 0 or delta <= 0:
        raise ValueError("forcing requires C > 0, eps > 0, delta > 0")
    if segment_length <= 0:
        raise ValueError("segment_length must be positive")
    return Forcing(
        kind=kind, C=C, eps=eps, delta=delta,
        segment_length=segment_length, seed=seed, ham=ham,
    )


# ----------------------------------------------------------------------------
# Trajectories
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """A sampled ODE solution: one row of ``phi`` per accepted step.

    ``s_end`` carries the status parameter: s_max when completed, the
    extrapolated singular value for blowup, the last reached s for
    step_underflow.
    """

    s: np.ndarray          # (M,), strictly increasing
    phi: np.ndarray        # (M, N)
    status: str            # "completed" | "blowup" | "step_underflow"
    s_end: float
    n_accepted: int
    n_rejected: int
    n_rhs: int
    max_norm: float        # max over samples of max_A |Φ_A|
    tol: float

    def __post_init__(self) -> None:
        self.s.setflags(write=False)
        self.phi.setflags(write=False)

    @property
    def n_fields(self) -> int:
        return self.phi.shape[1]

    def interp(self, s_query: npt.ArrayLike) -> np.ndarray:
        """Linear interpolation onto s_query; shape (len(s_query), N)."""
        sq = np.atleast_1d(np.asarray(s_query, float))
        out = np.empty((sq.size, self.n_fields))
        for a in range(self.n_fields):
            out[:, a] = np.interp(sq, self.s, self.phi[:, a])
        return out

    def final(self) -> np.ndarray:
        return self.phi[-1]


# ----------------------------------------------------------------------------
# The integrator
# ----------------------------------------------------------------------------


def _initial_step(rhs, s0, y0, f0, tol, span):
    """Hairer-style deterministic initial step selection."""
    sc = tol + tol * np.abs(y0)
    d0 = math.sqrt(float(np.mean((y0 / sc) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / sc) ** 2)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + h0 * f0
    f1 = rhs(s0 + h0, y1)
    d2 = math.sqrt(float(np.mean(((f1 - f0) / sc) ** 2))) / h0
    dmax = max(d1, d2)
    h1 = max(1e-6, h0 * 1e-3) if dmax <= 1e-15 else (0.01 / dmax) ** 0.2
    return min(100.0 * h0, h1, span)


def integrate(
    sys: AsymptoticSystem,
    phi0: npt.ArrayLike,
    s_max: float,
    forcing: Forcing | None = None,
    tol: float = DEFAULT_TOL,
    *,
    h_min: float = DEFAULT_H_MIN,
    h_max: float = math.inf,
    blowup_threshold: float = DEFAULT_BLOWUP_THRESHOLD,
) -> Trajectory:
    """Integrate dΦ/ds = A(Φ,Φ) + f(s,Φ) from s = 0 to s_max.

    Local error per step ≤ tol (mixed absolute/relative, RMS norm); every
    accepted step is stored, and the step size is capped at s_max/511 so a
    completed run holds at least 512 samples — dense enough for the
    envelope fits and interpolation downstream.  See the module docstring
    for the termination taxonomy.
    """
    y = np.array(phi0, dtype=float)
    if y.ndim != 1 or y.size != sys.n_fields:
        raise ValueError(f"phi0 must be a length-{sys.n_fields} vector, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("phi0 must be finite")
    if not (s_max > 0.0):
        raise ValueError("s_max must be positive")
    if not (TOL_RANGE[0] < tol < TOL_RANGE[1]):
        raise ValueError(f"tol must lie in {TOL_RANGE}, got {tol}")

    h_max = min(h_max, s_max / 511.0)
    fp = (forcing or ZERO_FORCING).prepare(y.size, s_max)
    n_rhs = 0

    def rhs(s: float, yy: np.ndarray, seg: int | None = None) -> np.ndarray:
        nonlocal n_rhs
        n_rhs += 1
        dy = sys.rhs(yy)
        f = fp(s, yy, fp.segment(s) if seg is None else seg)
        if f is not None:
            dy = dy + f
        return dy

    s = 0.0
    seg = fp.segment(s)
    k1 = rhs(s, y, seg)
    h = min(_initial_step(lambda ss, yy: rhs(ss, yy, seg), s, y, k1, tol, s_max), h_max)

    s_hist = [s]
    y_hist = [y.copy()]
    h_tail: list[float] = []
    n_acc = n_rej = 0
    norm0 = float(np.max(np.abs(y)))
    max_norm = norm0

    # DOPRI5 PI controller constants
    SAFE, BETA = 0.9, 0.04
    EXPO1 = 0.2 - BETA * 0.75
    FACC1, FACC2 = 1.0 / 0.2, 1.0 / 10.0
    facold = 1e-4
    last_rejected = False

    status = "completed"
    s_end = s_max
    K = np.empty((7, y.size))

    while s < s_max:
        # clip to the forcing segment boundary and the final time, landing exactly
        target = None
        h_eff = h
        if s + h_eff >= s_max:
            h_eff, target = s_max - s, s_max
        b = fp.next_boundary(s)
        if s + h_eff > b:
            h_eff, target = b - s, b

        if h < h_min:
            grew = max_norm >= UNDERFLOW_GROWTH_FACTOR * max(norm0, 1e-8)
            if grew:
                status = "blowup"
                s_end = _extrapolate_pole(s_hist, h_tail, y_hist[-1], rhs(s, y, seg))
            else:
                status = "step_underflow"
                s_end = s
            break

        K[0] = k1
        for i in range(1, 6):
            ys = y + h_eff * (_A[i, :i] @ K[:i])
            K[i] = rhs(s + _C[i] * h_eff, ys, seg)
        y5 = y + h_eff * (_B5[:6] @ K[:6])
        K[6] = rhs(s + h_eff, y5, seg)

        err_vec = h_eff * (_E @ K)
        sc = tol + tol * np.maximum(np.abs(y), np.abs(y5))
        with np.errstate(invalid="ignore", over="ignore"):
            err = math.sqrt(float(np.mean((err_vec / sc) ** 2)))
        if not math.isfinite(err):
            err = 10.0  # force a rejection with a firm shrink

        if err <= 1.0:
            s = target if target is not None else s + h_eff
            y = y5
            n_acc += 1
            s_hist.append(s)
            y_hist.append(y.copy())
            h_tail.append(h_eff)
            if len(h_tail) > 16:
                del h_tail[0]
            ymax = float(np.max(np.abs(y)))
            max_norm = max(max_norm, ymax)

            fac11 = err**EXPO1 if err > 0.0 else FACC2 * SAFE  # err==0: max growth
            fac = fac11 / (facold**BETA)
            fac = max(FACC2, min(FACC1, fac / SAFE))
            h_new = h_eff / fac
            if last_rejected:
                h_new = min(h_new, h_eff)
            h = min(h_new, h_max)
            facold = max(err, 1e-4)
            last_rejected = False

            if ymax > blowup_threshold or not math.isfinite(ymax):
                status = "blowup"
                s_end = _extrapolate_pole(s_hist, h_tail, y, sys.rhs(y))
                break

            new_seg = fp.segment(s)
            if new_seg != seg:
                seg = new_seg
                k1 = rhs(s, y, seg)
            else:
                k1 = K[6].copy()
        else:
            n_rej += 1
            fac11 = err**EXPO1
            h = h_eff / min(FACC1, fac11 / SAFE)
            last_rejected = True

    s_arr = np.array(s_hist)
    y_arr = np.array(y_hist)
    if status == "blowup":
        s_end = max(s_end, float(s_arr[-1]))
    return Trajectory(
        s=s_arr,
        phi=y_arr,
        status=status,
        s_end=float(s_end),
        n_accepted=n_acc,
        n_rejected=n_rej,
        n_rhs=n_rhs,
        max_norm=float(max_norm),
        tol=tol,
    )


def _extrapolate_pole(s_hist, h_tail, y_last, dy_last) -> float:
    """Distance to the singularity from the geometric collapse of the steps.

    For a pole, accepted steps satisfy h ∝ (s* − s), so the remaining distance
    is the geometric sum h_last·ρ/(1−ρ).  When the steps have not collapsed
    (threshold crossed at full stride) fall back on the terminal growth rate:
    ṅ ≈ n²·const near a quadratic pole gives remaining ≈ n/ṅ.
    """
    s_last = float(s_hist[-1])
    h = np.asarray(h_tail[-9:], float)
    if h.size >= 4:
        ratios = h[1:] / h[:-1]
        rho = float(np.median(ratios))
        if 0.0 < rho < 0.95:
            return s_last + float(h[-1]) * rho / (1.0 - rho)
    n = float(np.max(np.abs(y_last)))
    ndot = float(np.max(np.abs(dy_last)))
    if math.isfinite(ndot) and ndot > 0.0:
        return s_last + n / ndot
    return s_last


def blowup_time_estimate(traj: Trajectory) -> float | None:
    """s* from a linear fit of 1/|Φ| over the last decade of growth.

    Near a pole, 1/|Φ| decreases linearly to zero; the fitted root estimates
    the singular parameter value.  Returns None for non-blowup trajectories.
    """
    if traj.status != "blowup":
        return None
    n = np.max(np.abs(traj.phi), axis=1)
    n_last = n[-1]
    if n_last <= 0.0:
        return traj.s_end
    mask = n >= n_last / 10.0
    # use the trailing contiguous run
    idx = np.where(~mask)[0]
    start = idx[-1] + 1 if idx.size else 0
    s_f, w = traj.s[start:], 1.0 / n[start:]
    if s_f.size < 3:
        return traj.s_end
    slope, intercept = np.polyfit(s_f, w, 1)
    if slope >= 0.0:
        return traj.s_end
    return float(-intercept / slope)


# ----------------------------------------------------------------------------
# Export
# ----------------------------------------------------------------------------


def trajectory_to_csv(traj: Trajectory, path) -> None:
    header = "s," + ",".join(f"phi_{a}" for a in range(traj.n_fields))
    np.savetxt(
        path,
        np.column_stack([traj.s, traj.phi]),
        fmt="%.17g",
        delimiter=",",
        header=header,
        comments="",
    )


def trajectory_meta(traj: Trajectory) -> dict:
    return {
        "status": traj.status,
        "s_end": traj.s_end,
        "n_samples": int(traj.s.size),
        "n_accepted": traj.n_accepted,
        "n_rejected": traj.n_rejected,
        "n_rhs": traj.n_rhs,
        "max_norm": traj.max_norm,
        "tol": traj.tol,
    }


def save_trajectory(traj: Trajectory, stem) -> tuple[str, str]:
    """Write <stem>.csv and a <stem>.json status/stats sidecar."""
    csv_path, json_path = f"{stem}.csv", f"{stem}.json"
    trajectory_to_csv(traj, csv_path)
    with open(json_path, "w") as fh:
        json.dump(trajectory_meta(traj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path
