"""Ideal (hard-decision) regenerator channel.

A segment is one Gaussian noise injection followed by a nearest-symbol
decision.  The per-segment symbol transition matrix is built from erf
differences over the decision cells; R segments compose as the R-th matrix
power.  Closed-form capacity approximations for the low- and high-SNR
regimes, the optimal cell size, and the asymptotic gain over the linear
AWGN channel live here as well.

Conventions: N is the per-dimension noise power accumulated over the whole
line, so each of the R segments carries per-dimension variance N/R.  SNR
rho = S/N with S the per-dimension signal power.  Capacities are in bits
and already include the dimension factor n where the signature takes a
spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constellation import Constellation1D, voronoi_1d
from .numerics import entropy_bits, erf, lambert_w

__all__ = [
    "IdealChannelSpec",
    "AnalyticGain",
    "segment_matrix",
    "chain_matrix",
    "assert_column_stochastic",
    "low_snr_capacity",
    "optimal_cell",
    "high_snr_capacity",
    "regen_gain",
    "sine_asymptotic_gain",
    "interpolated_capacity",
    "junction_gap",
    "maxwell_boltzmann",
]


@dataclass(frozen=True)
class IdealChannelSpec:
    """R regenerative segments, total per-dimension noise power N, n dimensions."""

    R: int
    N: float
    n: int = 2

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("R must be >= 1")
        if not self.N > 0:
            raise ValueError("N must be positive")
        if self.n not in (1, 2):
            raise ValueError("n must be 1 or 2")

    @property
    def segment_variance(self) -> float:
        """Per-dimension noise variance added in each segment."""
        return self.N / self.R


def assert_column_stochastic(w: np.ndarray, tol: float = 1e-10) -> None:
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("transition matrix must be square")
    if np.any(w < -tol) or np.any(w > 1 + tol):
        raise ValueError("transition probabilities must lie in [0, 1]")
    if np.max(np.abs(w.sum(axis=0) - 1.0)) > tol:
        raise ValueError("columns must sum to 1")


def segment_matrix(c: Constellation1D, spec: IdealChannelSpec) -> np.ndarray:
    """Single-segment transition matrix W with W[k, l] = P(decide x_k | sent x_l).

    Entry (k, l) is the Gaussian measure (variance N/R) of decision cell k
    centered at x_l; edge cells run to +-inf.
    """
    x = c.points
    if len(c) < 2:
        raise ValueError("need at least 2 symbols")
    b = voronoi_1d(c).boundaries
    sigma = math.sqrt(spec.segment_variance)
    z = (b[:, None] - x[None, :]) / (sigma * math.sqrt(2.0))
    cdf = erf(z)
    w = 0.5 * (cdf[1:, :] - cdf[:-1, :])
    return np.clip(w, 0.0, 1.0)


def chain_matrix(w: np.ndarray, R: int) -> np.ndarray:
    """Matrix power W^R by repeated squaring, renormalizing columns each multiply."""
    if R < 1:
        raise ValueError("R must be >= 1")
    assert_column_stochastic(w, tol=1e-9)
    out = np.eye(w.shape[0])
    base = np.array(w, dtype=float)
    r = int(R)
    while r:
        if r & 1:
            out = base @ out
            out /= out.sum(axis=0)
        r >>= 1
        if r:
            base = base @ base
            base /= base.sum(axis=0)
    return out


def _binary_entropy(m: float) -> float:
    if m <= 0.0 or m >= 1.0:
        return 0.0
    return -(m * math.log2(m) + (1.0 - m) * math.log2(1.0 - m))


def low_snr_capacity(rho: float, R: int, n: int = 2) -> float:
    """Closed-form binary-regime capacity approximation, in bits.

    The stay probability after R segments is approximated by
    ((1 + erf(sqrt(R*rho/2)))/2)^R; the result is n*(1 - H2(stay)).
    Accurate near the optimal SNR; degrades as rho -> 0 for R > 1.
    """
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if R < 1:
        raise ValueError("R must be >= 1")
    m_plus = ((1.0 + float(erf(math.sqrt(R * rho / 2.0)))) / 2.0) ** R
    return n * (1.0 - _binary_entropy(m_plus))


def delta_parameter(R: int) -> float:
    """Half the optimal cell size in units of the per-segment noise std."""
    return math.sqrt(2.0 * lambert_w(math.e**2 * R**2 / (16.0 * math.pi)))


@dataclass(frozen=True)
class AnalyticGain:
    """Optimal-spacing quantities and the asymptotic capacity gain."""

    delta: float
    d_opt: float
    snr_opt: float
    gain_bits: float


def optimal_cell(spec: IdealChannelSpec) -> AnalyticGain:
    """Optimal lattice spacing, the SNR at which it is first reachable, and the gain."""
    delta = delta_parameter(spec.R)
    d_opt = math.sqrt(8.0 * spec.N * delta**2 / spec.R)
    snr_opt = d_opt**2 / (4.0 * spec.N)
    return AnalyticGain(delta=delta, d_opt=d_opt, snr_opt=snr_opt,
                        gain_bits=regen_gain(spec))


def _error_correction_term(R: int, delta: float) -> float:
    """Nearest-neighbor faulty-decision correction; <= 0 in the valid regime."""
    amp = R * math.exp(-(delta**2)) / (delta * math.sqrt(math.pi))
    return amp * math.log2(amp / 4.0)


def maxwell_boltzmann(points: np.ndarray, lam: float) -> np.ndarray:
    """Normalized exponential-in-power weights q_l proportional to exp(-lam*x_l^2)."""
    w = np.exp(-lam * (np.asarray(points, dtype=float) ** 2))
    return w / w.sum()


def high_snr_capacity(c: Constellation1D, spec: IdealChannelSpec, S: float) -> float:
    """High-SNR capacity of an equidistant lattice, in bits.

    Output entropy of the Maxwell-Boltzmann weights (lam = 1/(2(S + N/R)))
    plus the nearest-neighbor error correction term.  Meant for lattices at
    the optimal spacing; rejects non-equidistant alphabets.
    """
    if S <= 0:
        raise ValueError("S must be positive")
    if not c.is_equidistant:
        raise ValueError("high-SNR formula requires an equidistant lattice")
    lam = 1.0 / (2.0 * (S + spec.N / spec.R))
    q = maxwell_boltzmann(c.points, lam)
    delta = delta_parameter(spec.R)
    return spec.n * entropy_bits(q) + spec.n * _error_correction_term(spec.R, delta)


def regen_gain(spec: IdealChannelSpec) -> float:
    """Asymptotic high-SNR capacity gap over the linear AWGN channel, in bits.

    Equals (n/2)*log2(pi*e*R/(4*delta^2)) plus the error correction term;
    depends on R and n only.  (With the optimal spacing d_opt the leading
    term is (n/2)*log2(2*pi*e*N/d_opt^2), which reduces to the delta^2 form.)
    """
    delta = delta_parameter(spec.R)
    lead = spec.n / 2.0 * math.log2(math.pi * math.e * spec.R / (4.0 * delta**2))
    return lead + spec.n * _error_correction_term(spec.R, delta)


def sine_asymptotic_gain(spec: IdealChannelSpec, q: float) -> float:
    """High-SNR gain of the sine-mapping channel with stability index q in (0, 1].

    regen_gain minus (n/2)*log2 of the geometric noise-accumulation factor
    sum_{j=0..R} (1-q)^(2j); equals regen_gain exactly at q = 1.
    """
    if not (0.0 < q <= 1.0):
        raise ValueError("q must lie in (0, 1]")
    g2 = (1.0 - q) ** 2
    factor = (1.0 - g2 ** (spec.R + 1)) / (1.0 - g2) if g2 > 0 else 1.0
    return regen_gain(spec) - spec.n / 2.0 * math.log2(factor)


def _high_branch(rho: float, spec: IdealChannelSpec) -> float:
    from .constellation import make_rectangular

    S = rho * spec.N
    cell = optimal_cell(spec)
    sigma_mb = math.sqrt(S + spec.N / spec.R)
    m = max(2, 2 * math.ceil(4.0 * sigma_mb / cell.d_opt))
    lattice = make_rectangular(m, cell.d_opt)
    return high_snr_capacity(lattice, spec, S)


def interpolated_capacity(rho: float, spec: IdealChannelSpec) -> float:
    """Piecewise analytic capacity: binary branch below snr_opt, lattice branch above."""
    if rho < 0:
        raise ValueError("rho must be >= 0")
    snr_opt = optimal_cell(spec).snr_opt
    if rho <= snr_opt:
        return low_snr_capacity(rho, spec.R, spec.n)
    return _high_branch(rho, spec)


def junction_gap(spec: IdealChannelSpec) -> float:
    """Branch discrepancy (high minus low) at rho = snr_opt; diagnostic only."""
    snr_opt = optimal_cell(spec).snr_opt
    return _high_branch(snr_opt, spec) - low_snr_capacity(snr_opt, spec.R, spec.n)
