"""Special functions and quadrature utilities shared by the channel modules.

All functions are pure and accept scalars or numpy arrays where that is
meaningful.  Noise variances throughout the package use the standard
convention: a Gaussian with variance v has peak value 1/sqrt(2*pi*v).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special as _sp

__all__ = [
    "QuadratureSpec",
    "erf",
    "lambert_w",
    "gaussian_pdf",
    "entropy_bits",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """A 1-D integration rule on [lower, upper].

    rule is either "trapezoid" (uniform grid, trapezoid weights) or
    "gauss-legendre".
    """

    lower: float
    upper: float
    points: int
    rule: str = "trapezoid"

    def __post_init__(self):
        if not np.isfinite(self.lower) or not np.isfinite(self.upper):
            raise ValueError("quadrature bounds must be finite")
        if self.lower >= self.upper:
            raise ValueError("lower must be < upper")
        if self.points < 16:
            raise ValueError("points must be >= 16")
        if self.rule not in ("trapezoid", "gauss-legendre"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")

    @property
    def step(self) -> float:
        """Grid spacing (trapezoid rule only)."""
        return (self.upper - self.lower) / (self.points - 1)

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (abscissae, weights) so that sum(f(x)*w) approximates the integral."""
        if self.rule == "trapezoid":
            x = np.linspace(self.lower, self.upper, self.points)
            w = np.full(self.points, self.step)
            w[0] *= 0.5
            w[-1] *= 0.5
            return x, w
        x, w = np.polynomial.legendre.leggauss(self.points)
        half = 0.5 * (self.upper - self.lower)
        mid = 0.5 * (self.upper + self.lower)
        return mid + half * x, half * w

    def integrate(self, f) -> float:
        x, w = self.nodes()
        return float(np.sum(f(x) * w))


def erf(x):
    """Error function, elementwise.  erf(+-inf) = +-1."""
    return _sp.erf(x)


def lambert_w(x, tol: float = 1e-13, max_iter: int = 64):
    """Principal-branch Lambert W on x >= 0: returns w with w*exp(w) = x.

    Halley iteration from the initial guess log(1 + x); converges in a
    handful of steps everywhere on the nonnegative axis.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("lambert_w requires x >= 0 (principal branch)")
    w = np.log1p(x)
    for _ in range(max_iter):
        ew = np.exp(w)
        f = w * ew - x
        # Halley step: f' = ew*(w+1), f'' = ew*(w+2)
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        step = f / denom
        w = w - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(w))):
            break
    return w if w.ndim else float(w)


def gaussian_pdf(y, mean, variance):
    """Normal density with the given mean and variance (peak 1/sqrt(2*pi*v))."""
    if variance <= 0:
        raise ValueError("variance must be positive")
    y = np.asarray(y, dtype=float)
    out = np.exp(-((y - mean) ** 2) / (2.0 * variance)) / np.sqrt(2.0 * np.pi * variance)
    return out if out.ndim else float(out)


def entropy_bits(p) -> float:
    """Shannon entropy -sum p*log2(p) of a probability vector, in bits."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("probabilities must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities must sum to 1 (got {p.sum()!r})")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))
