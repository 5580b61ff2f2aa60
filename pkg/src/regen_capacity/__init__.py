"""Capacity of cascaded regenerative channels.

Numerics for the Shannon capacity of transmission lines with in-line
regenerators: ideal hard-decision regenerators (discrete Markov chains over
signal alphabets) and smooth sine-mapping filters (grid-propagated
conditional densities), plus the closed-form low/high-SNR approximations
and the asymptotic capacity gain over the linear AWGN channel.
"""

from .capacity import (BlahutArimotoResult, CapacityPoint, OptimizationResult,
                       blahut_arimoto, capacity_sweep, mi_continuous,
                       mi_discrete, optimize_scalar)
from .constellation import (Constellation1D, Constellation2D, VoronoiCells1D,
                            constellation_from_json, constellation_to_json,
                            make_rectangular, make_rectangular_grid, make_ring,
                            nearest_symbol, scale_to_power, voronoi_1d)
from .errors import AccuracyError, ConfigError, ConvergenceError
from .ideal_regen import (AnalyticGain, IdealChannelSpec, chain_matrix,
                          high_snr_capacity, interpolated_capacity,
                          junction_gap, low_snr_capacity, maxwell_boltzmann,
                          optimal_cell, regen_gain, segment_matrix,
                          sine_asymptotic_gain)
from .numerics import QuadratureSpec, entropy_bits, erf, gaussian_pdf, lambert_w
from .sine_channel import (DensityGrid, SineChannelSpec, SineMap, default_grid,
                           monte_carlo_paths, path_action, propagate_density,
                           sine_alphabet, stability_report, transfer)
from .sweeps import (SweepRecord, analytic_records, ideal_lattice_capacity,
                     ideal_ring_capacity, ideal_sweep_records,
                     optimal_sine_capacity, power_matched_mb,
                     ring_segment_matrix, sine_point_capacity,
                     sine_sweep_records)

__version__ = "1.0.0"

__all__ = [
    "AccuracyError", "AnalyticGain", "BlahutArimotoResult", "CapacityPoint",
    "ConfigError", "Constellation1D", "Constellation2D", "ConvergenceError",
    "DensityGrid", "IdealChannelSpec", "OptimizationResult", "QuadratureSpec",
    "SineChannelSpec", "SineMap", "SweepRecord", "VoronoiCells1D",
    "analytic_records", "blahut_arimoto", "capacity_sweep", "chain_matrix",
    "constellation_from_json", "constellation_to_json", "default_grid",
    "entropy_bits", "erf", "gaussian_pdf", "high_snr_capacity",
    "ideal_lattice_capacity", "ideal_ring_capacity", "ideal_sweep_records",
    "interpolated_capacity", "junction_gap", "lambert_w", "low_snr_capacity",
    "make_rectangular", "make_rectangular_grid", "make_ring",
    "maxwell_boltzmann", "mi_continuous", "mi_discrete", "monte_carlo_paths",
    "nearest_symbol", "optimal_cell", "optimal_sine_capacity",
    "optimize_scalar", "path_action", "power_matched_mb", "propagate_density",
    "regen_gain", "ring_segment_matrix", "scale_to_power", "segment_matrix",
    "sine_alphabet", "sine_asymptotic_gain", "sine_point_capacity",
    "sine_sweep_records", "stability_report", "transfer", "voronoi_1d",
]
