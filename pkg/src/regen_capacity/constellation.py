"""Signal alphabets and their decision-cell geometry.

1-D constellations are per-quadrature amplitude lattices; 2-D constellations
are point sets in the complex plane (rectangular grids or single rings).
Constellations are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Constellation1D",
    "Constellation2D",
    "VoronoiCells1D",
    "make_rectangular",
    "make_rectangular_grid",
    "make_ring",
    "scale_to_power",
    "voronoi_1d",
    "nearest_symbol",
    "constellation_to_json",
    "constellation_from_json",
]


@dataclass(frozen=True)
class Constellation1D:
    """Ordered real amplitude alphabet; spacing set for equidistant lattices."""

    points: np.ndarray
    spacing: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 1:
            raise ValueError("points must be a nonempty 1-D array")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        if self.spacing is not None:
            d = np.diff(pts)
            if d.size and not np.allclose(d, self.spacing, rtol=1e-12, atol=0):
                raise ValueError("spacing does not match point lattice")

    def __len__(self) -> int:
        return self.points.size

    def power(self, p=None) -> float:
        """Mean power sum(p_l * x_l^2); uniform input by default."""
        if p is None:
            return float(np.mean(self.points**2))
        return float(np.sum(np.asarray(p, dtype=float) * self.points**2))

    @property
    def is_equidistant(self) -> bool:
        d = np.diff(self.points)
        return d.size > 0 and bool(np.allclose(d, d[0], rtol=1e-9, atol=0))


@dataclass(frozen=True)
class Constellation2D:
    """Planar alphabet stored as complex points; kind is 'rectangular' or 'ring'."""

    points: np.ndarray
    kind: str = "rectangular"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 1:
            raise ValueError("points must be a nonempty 1-D complex array")
        if len(np.unique(pts)) != pts.size:
            raise ValueError("points must be distinct")
        if self.kind not in ("rectangular", "ring"):
            raise ValueError(f"unknown constellation kind {self.kind!r}")

    def __len__(self) -> int:
        return self.points.size

    def power(self, p=None) -> float:
        if p is None:
            return float(np.mean(np.abs(self.points) ** 2))
        return float(np.sum(np.asarray(p, dtype=float) * np.abs(self.points) ** 2))


@dataclass(frozen=True)
class VoronoiCells1D:
    """Decision boundaries of a 1-D alphabet; edge cells extend to +-inf."""

    boundaries: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=float)
        object.__setattr__(self, "boundaries", b)
        if np.any(np.diff(b) <= 0):
            raise ValueError("boundaries must be strictly increasing")
        if not (np.isneginf(b[0]) and np.isposinf(b[-1])):
            raise ValueError("edge boundaries must be -inf and +inf")


def make_rectangular(m_per_dim: int, spacing: float) -> Constellation1D:
    """Equidistant zero-mean amplitude lattice with m_per_dim points."""
    if m_per_dim < 2:
        raise ValueError("m_per_dim must be >= 2")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    x = spacing * (np.arange(m_per_dim) - (m_per_dim - 1) / 2.0)
    return Constellation1D(points=x, spacing=spacing)


def make_rectangular_grid(m_per_dim: int, spacing: float) -> Constellation2D:
    """Cartesian square of make_rectangular: an m^2-point rectangular alphabet."""
    axis = make_rectangular(m_per_dim, spacing).points
    re, im = np.meshgrid(axis, axis, indexing="ij")
    return Constellation2D(points=(re + 1j * im).ravel(), kind="rectangular")


def make_ring(m: int, radius: float) -> Constellation2D:
    """m points uniformly spaced on a circle of the given radius."""
    if m < 2:
        raise ValueError("m must be >= 2")
    if radius <= 0:
        raise ValueError("radius must be positive")
    ang = 2.0 * np.pi * np.arange(m) / m
    return Constellation2D(points=radius * np.exp(1j * ang), kind="ring")


def scale_to_power(c, p, target_power: float):
    """Rescale a constellation so its mean power under input p equals target_power."""
    if target_power <= 0:
        raise ValueError("target_power must be positive")
    p = np.asarray(p, dtype=float)
    if p.size != len(c):
        raise ValueError("input distribution size does not match constellation")
    cur = c.power(p)
    if cur <= 0:
        raise ValueError("constellation has zero power under this input")
    s = np.sqrt(target_power / cur)
    if isinstance(c, Constellation1D):
        spacing = None if c.spacing is None else c.spacing * s
        return Constellation1D(points=c.points * s, spacing=spacing)
    return Constellation2D(points=c.points * s, kind=c.kind)


def voronoi_1d(c: Constellation1D) -> VoronoiCells1D:
    """Midpoint decision boundaries; cell k contains point x_k."""
    if len(c) < 2:
        raise ValueError("need at least 2 points for decision cells")
    x = c.points
    inner = 0.5 * (x[:-1] + x[1:])
    return VoronoiCells1D(np.concatenate(([-np.inf], inner, [np.inf])))


def nearest_symbol(c, z) -> int:
    """Index of the Euclidean-nearest alphabet point; ties go to the lower index."""
    if isinstance(c, Constellation1D):
        d = np.abs(c.points - float(z))
    else:
        if isinstance(z, tuple):
            z = complex(z[0], z[1])
        d = np.abs(c.points - complex(z))
    return int(np.argmin(d))


def constellation_to_json(c) -> dict:
    """JSON-serializable description {kind, points, spacing?}."""
    if isinstance(c, Constellation1D):
        out = {"kind": "lattice", "points": c.points.tolist()}
        if c.spacing is not None:
            out["spacing"] = c.spacing
        return out
    return {
        "kind": c.kind,
        "points": [[float(p.real), float(p.imag)] for p in c.points],
    }


def constellation_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "lattice":
        return Constellation1D(points=np.asarray(obj["points"], dtype=float),
                               spacing=obj.get("spacing"))
    if kind in ("rectangular", "ring"):
        pts = np.asarray([complex(re, im) for re, im in obj["points"]])
        return Constellation2D(points=pts, kind=kind)
    raise ValueError(f"unknown constellation kind {kind!r}")
