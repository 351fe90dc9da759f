"""Aerodynamic evaluation: XFoil subprocess adapter, built-in vortex-panel
fallback with empirical skin-friction drag, and the GA fitness score.

The panel fallback is lower fidelity than XFoil (inviscid lift plus a
flat-plate turbulent drag correlation) but is deterministic and needs no
external binary, so it is the default for tests and CI.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateGeometry,
    ExecutableMissing,
    NonPositiveTarget,
    ParseFailure,
)

PENALTY_FITNESS = -1.0e6


@dataclass(frozen=True)
class FlowConditions:
    reynolds: float = 2.0e6
    mach: float = 0.02
    alpha: float = 0.0  # degrees

    def __post_init__(self):
        if self.reynolds <= 0:
            raise ValueError(f"Reynolds number must be positive, got {self.reynolds}")
        if not 0.0 <= self.mach < 0.3:
            raise ValueError(f"Mach {self.mach} outside incompressible range [0, 0.3)")
        if not -20.0 <= self.alpha <= 20.0:
            raise ValueError(f"alpha {self.alpha} outside [-20, 20] degrees")


@dataclass(frozen=True)
class AeroResult:
    cl: float
    cd: float
    converged: bool
    source: str  # "xfoil" | "panel"


@dataclass(frozen=True)
class FitnessTargets:
    cl_target: float
    cd_target: float

    def __post_init__(self):
        if self.cl_target <= 0 or self.cd_target <= 0:
            raise NonPositiveTarget(
                f"targets must be positive, got ({self.cl_target}, {self.cd_target})"
            )


def fitness(cl: float, cd: float, targets: FitnessTargets) -> float:
    """Negative squared relative deviation from the target coefficients."""
    return -(((cl - targets.cl_target) / targets.cl_target) ** 2) - (
        ((cd - targets.cd_target) / targets.cd_target) ** 2
    )


def fitness_of_result(result: AeroResult, targets: FitnessTargets) -> float:
    if not result.converged:
        return PENALTY_FITNESS
    return fitness(result.cl, result.cd, targets)


# --- geometry helpers ------------------------------------------------------


def _close_trailing_edge(loop: np.ndarray) -> np.ndarray:
    """Average the two TE endpoints so the contour closes."""
    closed = loop.copy()
    te = (closed[0] + closed[-1]) / 2.0
    closed[0] = te
    closed[-1] = te
    return closed


def _drop_zero_panels(nodes: np.ndarray) -> np.ndarray:
    d = np.hypot(np.diff(nodes[:, 0]), np.diff(nodes[:, 1]))
    keep = np.concatenate([[True], d > 1e-12])
    nodes = nodes[keep]
    if nodes.shape[0] < 4:
        raise DegenerateGeometry("fewer than 3 non-degenerate panels")
    return nodes


def _check_self_intersection(nodes: np.ndarray) -> None:
    """Reject contours whose non-adjacent panels cross."""
    p = nodes[:-1]
    q = nodes[1:]
    n = p.shape[0]
    d = q - p

    def cross(v, w):
        return v[..., 0] * w[..., 1] - v[..., 1] * w[..., 0]

    # pairwise segment intersection test, adjacent pairs excluded
    denom = cross(d[:, None, :], d[None, :, :])
    dp = p[None, :, :] - p[:, None, :]
    t = np.where(denom != 0, cross(dp, d[None, :, :]) / np.where(denom == 0, 1, denom), np.nan)
    u = np.where(denom != 0, cross(dp, d[:, None, :]) / np.where(denom == 0, 1, denom), np.nan)
    eps = 1e-10
    hit = (t > eps) & (t < 1 - eps) & (u > eps) & (u < 1 - eps)
    idx = np.arange(n)
    gap = np.abs(idx[:, None] - idx[None, :])
    adjacent = (gap <= 1) | (gap >= n - 1)
    if np.any(hit & ~adjacent):
        raise DegenerateGeometry("self-intersecting contour")


def max_thickness_ratio(loop: np.ndarray) -> float:
    """Max thickness over chord, surfaces interpolated to shared stations."""
    i_le = int(np.argmin(loop[:, 0]))
    upper = loop[: i_le + 1][::-1]  # LE -> TE
    lower = loop[i_le:]
    xs = np.linspace(loop[:, 0].min(), loop[:, 0].max(), 200)
    yu = np.interp(xs, upper[:, 0], upper[:, 1])
    yl = np.interp(xs, lower[:, 0], lower[:, 1])
    chord = loop[:, 0].max() - loop[:, 0].min()
    if chord <= 0:
        raise DegenerateGeometry("zero chord")
    return float(np.max(yu - yl) / chord)


# --- linear-strength vortex panel method ----------------------------------


def _panel_cl(loop: np.ndarray, alpha_deg: float) -> float:
    """Lift coefficient by a linear-strength vortex panel method with the
    Kutta condition. Input loop in Selig order TE->upper->LE->lower->TE."""
    nodes = _close_trailing_edge(np.asarray(loop, dtype=np.float64))
    # solver expects the loop traversed TE->lower->LE->upper->TE
    nodes = _drop_zero_panels(nodes[::-1])
    _check_self_intersection(nodes)
    x, y = nodes[:, 0], nodes[:, 1]
    n = x.size - 1
    alpha = np.deg2rad(alpha_deg)

    xm = (x[:-1] + x[1:]) / 2.0
    ym = (y[:-1] + y[1:]) / 2.0
    dx = np.diff(x)
    dy = np.diff(y)
    s = np.hypot(dx, dy)
    theta = np.arctan2(dy, dx)
    sin_t, cos_t = np.sin(theta), np.cos(theta)

    # influence coefficients, control point i vs panel j
    rx = xm[:, None] - x[None, :-1]
    ry = ym[:, None] - y[None, :-1]
    a = -rx * cos_t[None, :] - ry * sin_t[None, :]
    b = rx**2 + ry**2
    ti_tj = theta[:, None] - theta[None, :]
    c = np.sin(ti_tj)
    d = np.cos(ti_tj)
    e = rx * sin_t[None, :] - ry * cos_t[None, :]
    sj = s[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.log1p(sj * (sj + 2.0 * a) / b)
        g = np.arctan2(e * sj, b + a * sj)
        ti_2tj = theta[:, None] - 2.0 * theta[None, :]
        p = rx * np.sin(ti_2tj) + ry * np.cos(ti_2tj)
        q = rx * np.cos(ti_2tj) - ry * np.sin(ti_2tj)
        cn2 = d + 0.5 * q * f / sj - (a * c + d * e) * g / sj
        cn1 = 0.5 * d * f + c * g - cn2

    diag = np.eye(n, dtype=bool)
    cn1[diag] = -1.0
    cn2[diag] = 1.0

    an = np.zeros((n + 1, n + 1))
    an[:n, 0] = cn1[:, 0]
    an[:n, 1:n] = cn1[:, 1:] + cn2[:, :-1]
    an[:n, n] = cn2[:, -1]
    an[n, 0] = 1.0
    an[n, n] = 1.0  # Kutta condition
    rhs = np.zeros(n + 1)
    rhs[:n] = np.sin(theta - alpha)

    try:
        gamma = np.linalg.solve(an, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateGeometry(f"singular influence matrix: {exc}") from exc
    chord = x.max() - x.min()
    # gamma is scaled by 2*pi*V; cl = 2*Gamma/(V*c) with Gamma the trapezoid
    # integral of the linear strength over all panels
    return float(2.0 * np.pi * np.sum(s * (gamma[:-1] + gamma[1:])) / chord)


def _empirical_cd(reynolds: float, thickness_ratio: float) -> float:
    """Both-sides flat-plate turbulent skin friction with a form factor."""
    cf = 0.074 * reynolds ** (-0.2)
    return 2.0 * cf * (1.0 + 2.0 * thickness_ratio)


def eval_panel(loop: np.ndarray, cond: FlowConditions) -> AeroResult:
    """Inviscid panel lift plus empirical drag; always reports converged."""
    cl = _panel_cl(loop, cond.alpha)
    cd = _empirical_cd(cond.reynolds, max_thickness_ratio(np.asarray(loop)))
    return AeroResult(cl=cl, cd=cd, converged=True, source="panel")


# --- XFoil adapter ---------------------------------------------------------

XFOIL_ITER_LIMIT = 200
XFOIL_TIMEOUT = 10.0


def find_xfoil(path: str | None = None) -> str:
    candidate = path or os.environ.get("XFOIL_PATH") or "xfoil"
    resolved = shutil.which(candidate)
    if resolved is None:
        raise ExecutableMissing(f"XFoil executable not found: {candidate!r}")
    return resolved


def parse_polar(text: str) -> list[tuple[float, float, float]]:
    """Rows of (alpha, cl, cd) from an XFoil polar dump."""
    rows = []
    in_table = False
    for line in text.splitlines():
        if line.lstrip().startswith("---"):
            in_table = True
            continue
        if not in_table or not line.strip():
            continue
        fields = line.split()
        if len(fields) < 3:
            raise ParseFailure(f"short polar row: {line!r}")
        try:
            rows.append((float(fields[0]), float(fields[1]), float(fields[2])))
        except ValueError as exc:
            raise ParseFailure(f"bad polar row: {line!r}") from exc
    return rows


def eval_xfoil(
    loop: np.ndarray,
    cond: FlowConditions,
    timeout: float = XFOIL_TIMEOUT,
    xfoil_path: str | None = None,
) -> AeroResult:
    """Drive XFoil over its text command stream for a single-alpha viscous run."""
    exe = find_xfoil(xfoil_path)
    tmp_root = os.environ.get("AIRFOILGEN_TMPDIR") or None
    with tempfile.TemporaryDirectory(dir=tmp_root) as tmp:
        dat_path = os.path.join(tmp, "airfoil.dat")
        polar_path = os.path.join(tmp, "polar.txt")
        with open(dat_path, "w") as fh:
            fh.write("airfoil\n")
            for px, py in loop:
                fh.write(f" {px:.6f} {py:.6f}\n")
        script = "\n".join(
            [
                "PLOP",
                "G",
                "",
                f"LOAD {dat_path}",
                "OPER",
                f"VISC {cond.reynolds}",
                f"MACH {cond.mach}",
                f"ITER {XFOIL_ITER_LIMIT}",
                "PACC",
                polar_path,
                "",
                f"ALFA {cond.alpha}",
                "",
                "QUIT",
                "",
            ]
        )
        try:
            subprocess.run(
                [exe],
                input=script.encode(),
                stdout=subprocess.DEVNULL,
                stderr=subprocess.DEVNULL,
                timeout=timeout,
                cwd=tmp,
            )
        except subprocess.TimeoutExpired:
            return AeroResult(cl=np.nan, cd=np.nan, converged=False, source="xfoil")
        if not os.path.exists(polar_path):
            raise ParseFailure("XFoil produced no polar file")
        with open(polar_path) as fh:
            rows = parse_polar(fh.read())
    if not rows:
        # iteration limit hit: XFoil drops the unconverged point from the polar
        return AeroResult(cl=np.nan, cd=np.nan, converged=False, source="xfoil")
    _, cl, cd = rows[-1]
    return AeroResult(cl=cl, cd=cd, converged=True, source="xfoil")


def make_evaluator(kind: str = "panel", **kwargs):
    """Returns loop, cond -> AeroResult; kind is 'panel', 'xfoil' or 'auto'."""
    if kind == "panel":
        return eval_panel
    if kind == "xfoil":
        return lambda loop, cond: eval_xfoil(loop, cond, **kwargs)
    if kind == "auto":
        try:
            find_xfoil(kwargs.get("xfoil_path"))
            return lambda loop, cond: eval_xfoil(loop, cond, **kwargs)
        except ExecutableMissing:
            return eval_panel
    raise ValueError(f"unknown evaluator kind {kind!r}")
