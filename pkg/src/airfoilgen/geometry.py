"""Airfoil geometry: .dat parsing, cosine-grid resampling, normalization, smoothing.

Coordinate conventions: chord along x in [0, 1]. The canonical point loop runs
TE -> upper surface -> LE -> lower surface -> TE. Fixed-length vectors hold the
upper surface y values LE->TE on the cosine grid followed by the lower surface
y values in the same order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    AllZero,
    AmbiguousFormat,
    BadWindow,
    DegenerateSurface,
    EmptyDataset,
    InvalidCount,
    MalformedFile,
)

DEFAULT_M = 100  # points per surface
N_COORDS = 2 * DEFAULT_M


@dataclass(frozen=True)
class RawAirfoil:
    """Named coordinate loop as parsed from a .dat file, chord rescaled to [0, 1]."""

    name: str
    points: np.ndarray  # (n, 2), canonical loop TE->upper->LE->lower->TE

    def leading_edge_index(self) -> int:
        return int(np.argmin(self.points[:, 0]))


@dataclass(frozen=True)
class CosineGrid:
    m: int
    xs: np.ndarray  # (m,), strictly increasing, xs[0]=0, xs[-1]=1


@dataclass(frozen=True)
class NormalizedAirfoil:
    """200 y values in [-1, 1]: upper LE->TE then lower LE->TE, shared scale."""

    name: str
    y: np.ndarray  # (200,)


def cosine_grid(m: int = DEFAULT_M) -> CosineGrid:
    """Half-cosine abscissae clustering points at both the LE and the TE."""
    if m < 2:
        raise InvalidCount(f"need at least 2 grid points, got {m}")
    j = np.arange(m)
    xs = (1.0 - np.cos(np.pi * j / (m - 1))) / 2.0
    xs[0] = 0.0
    xs[-1] = 1.0
    return CosineGrid(m=m, xs=xs)


_NUM_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eEdD][+-]?\d+)?$")


def _parse_pair(tokens: list[str]) -> tuple[float, float] | None:
    if len(tokens) != 2:
        return None
    for t in tokens:
        if not _NUM_RE.match(t):
            return None
    return float(tokens[0].replace("D", "E").replace("d", "e")), float(
        tokens[1].replace("D", "E").replace("d", "e")
    )


def _rescale_chord(points: np.ndarray) -> np.ndarray:
    x = points[:, 0]
    xmin, xmax = x.min(), x.max()
    chord = xmax - xmin
    if chord <= 0:
        raise MalformedFile("zero chord length")
    out = points.copy()
    out[:, 0] = (x - xmin) / chord
    out[:, 1] = points[:, 1] / chord
    return out


def parse_dat(text: str) -> RawAirfoil:
    """Parse a UIUC-style .dat file (Selig or Lednicer layout).

    Selig: name line, then one loop TE->upper->LE->lower->TE.
    Lednicer: name line, counts line "Nu. Nl.", upper LE->TE block, lower
    LE->TE block. Both are returned as the canonical Selig-style loop.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MalformedFile("empty file")

    name = lines[0]
    if _parse_pair(name.split()) is not None:
        # headerless file: treat every line as data
        name = "unnamed"
        data_lines = lines
    else:
        data_lines = lines[1:]

    pairs = []
    for ln in data_lines:
        pair = _parse_pair(ln.split())
        if pair is None:
            raise MalformedFile(f"non-numeric coordinate line: {ln!r}")
        pairs.append(pair)
    if len(pairs) < 2:
        raise MalformedFile("too few coordinate lines")

    # Lednicer files carry a point-count line whose values exceed 1.
    first = pairs[0]
    if first[0] > 1.0 and first[1] > 1.0:
        nu, nl = int(round(first[0])), int(round(first[1]))
        coords = pairs[1:]
        if len(coords) != nu + nl:
            raise AmbiguousFormat(
                f"counts line says {nu}+{nl} points, found {len(coords)}"
            )
        upper = coords[:nu]  # LE -> TE
        lower = coords[nu:]  # LE -> TE
        loop = list(reversed(upper)) + list(lower)
    else:
        loop = pairs

    if len(loop) < 6:
        raise MalformedFile(f"need at least 6 points, got {len(loop)}")
    points = np.asarray(loop, dtype=np.float64)
    if not np.all(np.isfinite(points)):
        raise MalformedFile("non-finite coordinate")
    return RawAirfoil(name=name, points=_rescale_chord(points))


def _surface_spline_values(
    surface: np.ndarray, xs: np.ndarray
) -> np.ndarray:
    """Fit a cubic spline y(x) to one surface and evaluate it on the grid."""
    order = np.argsort(surface[:, 0], kind="stable")
    sx = surface[order, 0]
    sy = surface[order, 1]
    # collapse duplicate x stations to the mean y
    ux, inverse = np.unique(sx, return_inverse=True)
    if ux.size < 3:
        raise DegenerateSurface(f"only {ux.size} distinct x stations")
    uy = np.zeros_like(ux)
    counts = np.zeros_like(ux)
    np.add.at(uy, inverse, sy)
    np.add.at(counts, inverse, 1.0)
    uy /= counts
    return CubicSpline(ux, uy)(xs)


def resample(airfoil: RawAirfoil, grid: CosineGrid) -> tuple[np.ndarray, np.ndarray]:
    """Resample both surfaces onto the cosine grid; returns (upper, lower) LE->TE."""
    pts = airfoil.points
    i_le = airfoil.leading_edge_index()
    upper_pts = pts[: i_le + 1]  # TE -> LE
    lower_pts = pts[i_le:]  # LE -> TE
    upper = _surface_spline_values(upper_pts, grid.xs)
    lower = _surface_spline_values(lower_pts, grid.xs)
    # pin LE/TE to the raw endpoint values
    upper[0] = pts[i_le, 1]
    lower[0] = pts[i_le, 1]
    upper[-1] = pts[0, 1]
    lower[-1] = pts[-1, 1]
    return upper, lower


def stack_surfaces(upper: np.ndarray, lower: np.ndarray) -> np.ndarray:
    return np.concatenate([upper, lower])


def split_surfaces(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = y.shape[-1] // 2
    return y[..., :m], y[..., m:]


def normalize_dataset(
    airfoils: list[tuple[str, np.ndarray]]
) -> tuple[list[NormalizedAirfoil], float]:
    """Scale all y vectors by one shared coefficient so max |y| becomes 1."""
    if not airfoils:
        raise EmptyDataset("no airfoils to normalize")
    peak = max(float(np.max(np.abs(y))) for _, y in airfoils)
    if peak == 0.0:
        raise AllZero("all coordinates are zero")
    if not np.isfinite(peak):
        raise EmptyDataset("non-finite coordinates in dataset")
    scale = 1.0 / peak
    return [NormalizedAirfoil(name, y * scale) for name, y in airfoils], scale


def denormalize(y: np.ndarray, scale: float) -> np.ndarray:
    return y / scale


def savgol_smooth(y: np.ndarray, window: int = 7, order: int = 2) -> np.ndarray:
    """Savitzky-Golay smoothing: sliding least-squares polynomial fits.

    Endpoints are handled by fitting the polynomial to the first/last window
    and evaluating it at the off-center positions.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if window % 2 == 0 or window <= order or window > n:
        raise BadWindow(f"window {window} invalid for order {order}, n {n}")
    half = window // 2
    offsets = np.arange(-half, half + 1, dtype=np.float64)
    vander = np.vander(offsets, order + 1, increasing=True)  # (window, order+1)
    # least-squares solution operator: coeffs = pinv @ window_values
    pinv = np.linalg.pinv(vander)
    center_weights = pinv[0]  # polynomial value at offset 0

    out = np.empty_like(y)
    out[half : n - half] = np.convolve(y, center_weights[::-1], mode="valid")
    first_coef = pinv @ y[:window]
    last_coef = pinv @ y[n - window :]
    for i in range(half):
        # offset of index i within the first window (center at index half)
        out[i] = np.polyval(first_coef[::-1], float(i - half))
        # offset of index n-half+i within the last window (center at n-1-half)
        out[n - half + i] = np.polyval(last_coef[::-1], float(i + 1))
    return out


def savgol_center_weights(window: int = 7, order: int = 2) -> np.ndarray:
    """Interior convolution weights of the filter (exposed for verification)."""
    half = window // 2
    offsets = np.arange(-half, half + 1, dtype=np.float64)
    vander = np.vander(offsets, order + 1, increasing=True)
    return np.linalg.pinv(vander)[0]


# --- canonical dataset file ------------------------------------------------


def write_dataset(
    path, airfoils: list[NormalizedAirfoil], scale: float, m: int = DEFAULT_M
) -> None:
    lines = [f"m={m},N={2 * m},scale={scale!r}"]
    for af in airfoils:
        values = ",".join(repr(float(v)) for v in af.y)
        lines.append(f"{af.name},{values}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dataset(path) -> tuple[list[NormalizedAirfoil], float, int]:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise MalformedFile(f"empty dataset file {path}")
    try:
        header = dict(item.split("=", 1) for item in lines[0].split(","))
        m = int(header["m"])
        n = int(header["N"])
        scale = float(header["scale"])
    except (KeyError, ValueError) as exc:
        raise MalformedFile(f"bad dataset header: {lines[0]!r}") from exc
    airfoils = []
    for ln in lines[1:]:
        fields = ln.split(",")
        name = fields[0]
        y = np.array([float(v) for v in fields[1:]], dtype=np.float64)
        if y.shape[0] != n:
            raise MalformedFile(f"record {name!r} has {y.shape[0]} values, want {n}")
        airfoils.append(NormalizedAirfoil(name, y))
    return airfoils, scale, m


def loop_coordinates(
    upper: np.ndarray, lower: np.ndarray, xs: np.ndarray
) -> np.ndarray:
    """Assemble a Selig-style loop TE->upper->LE->lower->TE from surface values."""
    x_loop = np.concatenate([xs[::-1], xs[1:]])
    y_loop = np.concatenate([upper[::-1], lower[1:]])
    return np.column_stack([x_loop, y_loop])


def write_dat(path, name: str, loop: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(name + "\n")
        for x, y in loop:
            fh.write(f" {x:.6f} {y:.6f}\n")
