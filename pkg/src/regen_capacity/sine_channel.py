"""Smooth sine-mapping regenerative channel.

The per-stage transfer function is T(x) = x + alpha*sin(beta*x).  Signal
evolution is the stochastic map y_0 = x + eta_0, y_k = T(y_{k-1}) + eta_k
for k = 1..R, read out at y_R, i.e. R filter applications interleaved with
R+1 Gaussian noise injections.

Conventions: N is the total accumulated noise power; each of the R+1
injections carries per-dimension variance N/(2(R+1)) (so the per-dimension
variance sums to N/2 and the noise powers to N).  Conditional output
densities are propagated on a uniform amplitude grid by dense application
of the single-stage Gaussian kernel centered at the mapped grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constellation import Constellation1D
from .errors import AccuracyError, ConfigError
from .numerics import QuadratureSpec, gaussian_pdf

__all__ = [
    "SineMap",
    "SineChannelSpec",
    "StabilityReport",
    "DensityGrid",
    "transfer",
    "stability_report",
    "sine_alphabet",
    "default_grid",
    "propagate_density",
    "monte_carlo_paths",
    "path_action",
]

MIN_POINTS_PER_SIGMA = 8


@dataclass(frozen=True)
class SineMap:
    """Transfer function x -> x + alpha*sin(beta*x)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError("alpha must be finite and positive")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError("beta must be finite and positive")

    @property
    def q(self) -> float:
        """Stability index alpha*beta."""
        return self.alpha * self.beta

    @property
    def pitch(self) -> float:
        """Distance between consecutive stable fixed points, 2*pi/beta."""
        return 2.0 * math.pi / self.beta


def transfer(m: SineMap, x):
    """Apply the sine map elementwise."""
    x = np.asarray(x, dtype=float)
    out = x + m.alpha * np.sin(m.beta * x)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class StabilityReport:
    """Fixed-point lattice of a sine map and its local stability."""

    first_fixed_point: float       # pi/beta; the rest sit at odd multiples
    pitch: float                   # spacing between fixed points
    derivative_at_fp: float        # T'(x*) = 1 - alpha*beta
    second_derivative_at_fp: float # identically 0 at the fixed points
    stable: bool                   # monotone-stability condition alpha*beta <= 1
    superstable: bool              # alpha*beta = 1


def stability_report(m: SineMap) -> StabilityReport:
    """Stability of the alphabet fixed points at pi*(2k+1)/beta.

    The reported `stable` flag uses the condition q = alpha*beta <= 1
    (which also keeps T monotone); the raw derivative 1 - q is exposed so
    callers can apply |1 - q| < 1 instead if they want bare local stability.
    """
    q = m.q
    return StabilityReport(
        first_fixed_point=math.pi / m.beta,
        pitch=m.pitch,
        derivative_at_fp=1.0 - q,
        second_derivative_at_fp=0.0,
        stable=q <= 1.0 + 1e-12,
        superstable=abs(q - 1.0) <= 1e-12,
    )


def sine_alphabet(m: SineMap, M: int) -> Constellation1D:
    """M consecutive stable fixed points pi*(2k+1)/beta centered about 0."""
    if M < 2:
        raise ValueError("M must be >= 2")
    k = np.arange(M) - M // 2
    pts = math.pi * (2 * k + 1) / m.beta
    return Constellation1D(points=pts, spacing=m.pitch)


@dataclass(frozen=True)
class SineChannelSpec:
    """Sine map, stage count R, total noise power N, and per-stage variances."""

    map: SineMap
    R: int
    N: float
    n: int = 2
    stage_variances: np.ndarray | None = None

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("R must be >= 1")
        if not self.N > 0:
            raise ValueError("N must be positive")
        if self.n not in (1, 2):
            raise ValueError("n must be 1 or 2")
        if self.stage_variances is None:
            v = np.full(self.R + 1, self.N / (2.0 * (self.R + 1)))
        else:
            v = np.asarray(self.stage_variances, dtype=float)
            if v.size != self.R + 1:
                raise ValueError("need R+1 stage variances")
            if np.any(v <= 0):
                raise ValueError("stage variances must be positive")
            if abs(2.0 * v.sum() - self.N) > 1e-9 * self.N:
                raise ValueError("stage noise powers must sum to N")
        object.__setattr__(self, "stage_variances", v)

    @property
    def total_variance(self) -> float:
        """Accumulated per-dimension variance, N/2."""
        return float(np.sum(self.stage_variances))


@dataclass(frozen=True)
class DensityGrid:
    """Conditional output densities on a uniform amplitude grid, one row per symbol."""

    axis: np.ndarray
    densities: np.ndarray  # shape (M, len(axis))

    @property
    def step(self) -> float:
        return float(self.axis[1] - self.axis[0])

    def normalizations(self) -> np.ndarray:
        """Trapezoid-rule integral of each conditional density."""
        return np.trapezoid(self.densities, self.axis, axis=1)

    def to_csv(self, path) -> None:
        """Columns: y, then one density column per input symbol."""
        header = "y," + ",".join(f"p{i}" for i in range(self.densities.shape[0]))
        data = np.column_stack([self.axis, self.densities.T])
        with open(path, "w", newline="") as fh:
            fh.write(header + "\n")
            for row in data:
                fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def default_grid(spec: SineChannelSpec, c: Constellation1D, points: int = 4096,
                 max_points: int = 1 << 16) -> QuadratureSpec:
    """Uniform grid wide enough to contain the propagated mass.

    Extent max|x| + alpha + 8*sigma_total (the map can displace a point by
    at most alpha per stage toward either side of its basin); the point
    count doubles until every stage std is resolved by at least
    MIN_POINTS_PER_SIGMA samples.
    """
    sigma_total = math.sqrt(spec.total_variance)
    L = float(np.max(np.abs(c.points))) + spec.map.alpha + 8.0 * sigma_total
    sigma_min = math.sqrt(float(np.min(spec.stage_variances)))
    g = points
    while (2.0 * L) / (g - 1) > sigma_min / MIN_POINTS_PER_SIGMA:
        g *= 2
        if g > max_points:
            raise ConfigError("grid resolution requirement exceeds max_points")
    return QuadratureSpec(lower=-L, upper=L, points=g, rule="trapezoid")


def propagate_density(spec: SineChannelSpec, c: Constellation1D,
                      grid: QuadratureSpec) -> DensityGrid:
    """Propagate the conditional densities P(y_R | x_l) for every symbol x_l.

    Starts from a Gaussian at x_l (stage-0 variance), then R times maps the
    grid through T and convolves with the stage kernel.  Raises ConfigError
    if the grid under-resolves any stage std and AccuracyError if more than
    1e-6 of probability mass leaks through the grid boundary.
    """
    if grid.rule != "trapezoid":
        raise ConfigError("density propagation requires a trapezoid grid")
    y, w = grid.nodes()
    dy = grid.step
    sigma_min = math.sqrt(float(np.min(spec.stage_variances)))
    if dy > sigma_min / MIN_POINTS_PER_SIGMA:
        raise ConfigError(
            f"grid step {dy:.3g} under-resolves stage std {sigma_min:.3g} "
            f"(need >= {MIN_POINTS_PER_SIGMA} points per std)")
    margin = 6.0 * sigma_min
    if np.min(c.points) < grid.lower + margin or np.max(c.points) > grid.upper - margin:
        raise ConfigError("constellation points too close to the grid boundary")

    dens = np.empty((len(c), grid.points))
    for i, x in enumerate(c.points):
        dens[i] = gaussian_pdf(y, float(x), float(spec.stage_variances[0]))

    mapped = transfer(spec.map, y)
    kernels: dict[float, np.ndarray] = {}
    for k in range(1, spec.R + 1):
        var = float(spec.stage_variances[k])
        kern = kernels.get(var)
        if kern is None:
            # kernel[i, j] = P(y_i | previous amplitude y_j) * weight_j
            kern = np.exp(-((y[:, None] - mapped[None, :]) ** 2) / (2.0 * var))
            kern /= math.sqrt(2.0 * math.pi * var)
            kern *= w[None, :]
            kernels[var] = kern
        dens = dens @ kern.T
        norms = np.sum(dens * w[None, :], axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise AccuracyError(
                f"mass leakage {np.max(np.abs(norms - 1.0)):.3g} exceeds 1e-6 "
                f"at stage {k}")
    return DensityGrid(axis=y, densities=dens)


def monte_carlo_paths(spec: SineChannelSpec, x: float, num_paths: int,
                      seed: int) -> np.ndarray:
    """Independent end-point samples y_R of the stochastic map, seeded."""
    if num_paths < 1:
        raise ValueError("num_paths must be >= 1")
    rng = np.random.default_rng(seed)
    sd = np.sqrt(spec.stage_variances)
    y = x + rng.standard_normal(num_paths) * sd[0]
    for k in range(1, spec.R + 1):
        y = transfer(spec.map, y) + rng.standard_normal(num_paths) * sd[k]
    return y


def path_action(spec: SineChannelSpec, path, x: float) -> float:
    """Sum of squared step residuals of a path y_0..y_R, injection term included.

    Zero exactly on the noiseless trajectory.  With equal stage variances v
    the path log-density is -action/(2v) plus a path-independent constant.
    """
    path = np.asarray(path, dtype=float)
    if path.size != spec.R + 1:
        raise ValueError(f"path must have length R+1 = {spec.R + 1}")
    res = path[1:] - transfer(spec.map, path[:-1])
    return float((path[0] - x) ** 2 + np.sum(res**2))
