"""Mutual information and power-constrained input optimization.

mi_discrete / mi_continuous evaluate the information functional for a fixed
input distribution; blahut_arimoto maximizes it over the input subject to a
quadratic power constraint via an exponential tilt whose multiplier is found
by bisection.  optimize_scalar is the grid-then-golden-section search used
for outer parameters (constellation scale, filter pitch).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .sine_channel import DensityGrid

__all__ = [
    "CapacityPoint",
    "OptimizationResult",
    "BlahutArimotoResult",
    "mi_discrete",
    "mi_continuous",
    "blahut_arimoto",
    "capacity_sweep",
    "optimize_scalar",
]

log = logging.getLogger(__name__)

_TINY = 1e-300


def _check_dist(p, size: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.size != size:
        raise ValueError(f"input distribution has {p.size} entries, expected {size}")
    if np.any(p < 0):
        raise ValueError("input probabilities must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("input probabilities must sum to 1")
    return p


def mi_discrete(p, w: np.ndarray) -> float:
    """Mutual information in bits between input p and the columns of w.

    w[k, l] = P(output k | input l); zero transition probabilities
    contribute nothing.
    """
    w = np.asarray(w, dtype=float)
    p = _check_dist(p, w.shape[1])
    py = np.maximum(w @ p, _TINY)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * np.log2(np.where(w > 0, w, 1.0) / py[:, None]), 0.0)
    return max(float(np.sum(p * terms.sum(axis=0))), 0.0)


def mi_continuous(p, d: DensityGrid) -> float:
    """Mutual information in bits for grid-discretized conditional densities.

    Trapezoid quadrature over the grid axis; densities must be normalized
    within 1e-6.
    """
    p = _check_dist(p, d.densities.shape[0])
    norms = d.normalizations()
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise ValueError("conditional densities are not normalized")
    f = d.densities
    mix = np.maximum(p @ f, _TINY)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(f > 0, f * np.log2(np.where(f > 0, f, 1.0) / mix[None, :]), 0.0)
    w = np.full(d.axis.size, d.step)
    w[0] *= 0.5
    w[-1] *= 0.5
    return max(float(np.sum(p * (terms @ w))), 0.0)


@dataclass(frozen=True)
class BlahutArimotoResult:
    input_distribution: np.ndarray
    capacity_bits: float
    power: float
    tilt: float          # Lagrange multiplier of the power constraint
    iterations: int


def _symbol_divergence(w, logw, p):
    """Per-symbol divergence D(W_.l || Wp), in nats."""
    py = np.maximum(w @ p, _TINY)
    return np.sum(w * (logw - np.log(py)[:, None]), axis=0)


def blahut_arimoto(w: np.ndarray, symbol_powers, S: float, tol: float = 1e-7,
                   max_iter: int = 100_000) -> BlahutArimotoResult:
    """Capacity-achieving input of a discrete channel under mean power <= S.

    symbol_powers holds |x_l|^2 per input symbol.  Alternating updates with
    an exponential power tilt exp(-lam*|x_l|^2); at each update lam is
    bisected (bracket [0, 50/S], expanded geometrically) so the constraint
    is active, or lam = 0 when the untilted update already satisfies it.
    Terminates when the capacity bracket (dual max-score bound minus the
    current MI) falls below tol, in bits.
    """
    w = np.asarray(w, dtype=float)
    cost = np.asarray(symbol_powers, dtype=float)
    if cost.size != w.shape[1]:
        raise ValueError("symbol_powers size does not match channel")
    if S <= 0:
        raise ValueError("S must be positive")
    if np.min(cost) > S * (1.0 + 1e-12):
        raise ValueError("power constraint infeasible: every symbol exceeds S")
    # symbols at the power budget up to rounding count as exactly affordable
    cost = np.where(cost <= S * (1.0 + 1e-12), np.minimum(cost, S), cost)
    logw = np.where(w > 0, np.log(np.where(w > 0, w, 1.0)), 0.0)
    ln2 = math.log(2)

    m = w.shape[1]
    p = np.ones(m) / m
    lam = 0.0
    if float(np.sum(p * cost)) > S:
        # feasible start: power-tilted uniform weights meeting the budget
        lo0, hi0 = 0.0, 50.0 / S
        while True:
            q = np.exp(-hi0 * (cost - cost.min()))
            q /= q.sum()
            if float(np.sum(q * cost)) <= S:
                break
            lo0, hi0 = hi0, hi0 * 4.0
        for _ in range(60):
            mid = 0.5 * (lo0 + hi0)
            q = np.exp(-mid * (cost - cost.min()))
            q /= q.sum()
            if float(np.sum(q * cost)) > S:
                lo0 = mid
            else:
                hi0 = mid
        p = np.exp(-hi0 * (cost - cost.min()))
        p /= p.sum()
    cap_prev = -np.inf
    gap = np.inf
    for it in range(1, max_iter + 1):
        div = _symbol_divergence(w, logw, p)
        cap = float(np.sum(p * div)) / ln2
        gap = (float(np.max(div - lam * cost)) + lam * S) / ln2 - cap
        if cap < cap_prev - 1e-9 * max(1.0, abs(cap_prev)):
            raise ConvergenceError("MI decreased between iterations")
        cap_prev = cap
        if gap < tol:
            return BlahutArimotoResult(p, cap, float(np.sum(p * cost)), lam, it)

        base = np.log(np.maximum(p, _TINY)) + div

        def tilted(lam_):
            z = base - lam_ * cost
            z -= z.max()
            q = np.exp(z)
            return q / q.sum()

        q = tilted(0.0)
        if float(np.sum(q * cost)) <= S:
            p, lam = q, 0.0
            continue
        lo, hi = 0.0, 50.0 / S
        while float(np.sum(tilted(hi) * cost)) > S:
            lo, hi = hi, hi * 4.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if float(np.sum(tilted(mid) * cost)) > S:
                lo = mid
            else:
                hi = mid
        lam = hi
        p = tilted(lam)
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations (bracket {gap:.3g} bits)")


@dataclass(frozen=True)
class CapacityPoint:
    """One sweep sample: SNR, channel capacity, linear reference, and their ratio."""

    snr: float
    capacity_bits: float
    linear_capacity_bits: float

    @property
    def gain(self) -> float | None:
        """capacity/linear ratio; None where the linear reference is ~0."""
        if self.linear_capacity_bits < 1e-6:
            return None
        return self.capacity_bits / self.linear_capacity_bits


def capacity_sweep(channel_builder, rho_grid, input_optimizer=None) -> list[CapacityPoint]:
    """Evaluate capacity over an ascending SNR grid.

    channel_builder(rho) -> (w, symbol_powers, S); input_optimizer defaults
    to the power-constrained Blahut-Arimoto.  Non-monotone capacity across
    the grid is logged as a diagnostic, not raised.
    """
    rho_grid = np.asarray(rho_grid, dtype=float)
    if np.any(rho_grid <= 0) or np.any(np.diff(rho_grid) <= 0):
        raise ValueError("rho grid must be positive and ascending")
    if input_optimizer is None:
        def input_optimizer(w, powers, S):
            res = blahut_arimoto(w, powers, S)
            return res.input_distribution, res.capacity_bits

    points = []
    for rho in rho_grid:
        w, powers, S = channel_builder(float(rho))
        _, cap = input_optimizer(w, powers, S)
        points.append(CapacityPoint(snr=float(rho), capacity_bits=cap,
                                    linear_capacity_bits=math.log2(1.0 + rho)))
    caps = [pt.capacity_bits for pt in points]
    if np.any(np.diff(caps) < -1e-9):
        log.warning("capacity sweep is not monotone in SNR: %s", caps)
    return points


@dataclass(frozen=True)
class OptimizationResult:
    best_parameter: float
    best_capacity: float
    trace: list[tuple[float, float]]
    flat: bool = False


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def optimize_scalar(objective, bracket, tol: float = 1e-4,
                    grid_points: int = 32) -> OptimizationResult:
    """Maximize a scalar objective: coarse grid scan, then golden-section refine.

    The objective may return -inf (or NaN) to mark infeasible parameters.
    A flat scan returns the low-side grid point with flat=True.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    xs = np.linspace(lo, hi, grid_points)
    trace = []
    vals = []
    for x in xs:
        v = objective(float(x))
        v = -np.inf if v is None or not np.isfinite(v) else float(v)
        trace.append((float(x), v))
        vals.append(v)
    vals = np.asarray(vals)
    if not np.any(np.isfinite(vals)):
        raise ValueError("objective is infeasible on the whole bracket")
    best = int(np.argmax(vals))
    if np.ptp(vals[np.isfinite(vals)]) == 0.0:
        return OptimizationResult(float(xs[best]), float(vals[best]), trace, flat=True)

    def safe(x: float) -> float:
        v = objective(x)
        v = -np.inf if v is None or not np.isfinite(v) else float(v)
        trace.append((x, v))
        return v

    a = float(xs[max(best - 1, 0)])
    b = float(xs[min(best + 1, grid_points - 1)])
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = safe(c)
    fd = safe(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = safe(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = safe(d)
    bx, bv = max(trace, key=lambda t: t[1])
    return OptimizationResult(float(bx), float(bv), trace, flat=False)
