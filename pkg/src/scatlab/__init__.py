"""scatlab: a numerical laboratory for spectral and scattering theory.

Periodic-box lattice models of multiplier and Schrodinger-type operators,
resolvent boundary values in weighted norms, Cook and stationary wave
operators, 1D Jost/transmission analysis, rank-one perturbation formulas,
singular Cauchy integrals and homogeneous kernel norms, and quantum
backflow compressions.
"""

__version__ = "0.1.0"

from .grids import Grid, make_grid, weight_values
from .operators import (LatticeOperator, add_potential, apply_function,
                        dense_operator, fractional_difference_norm, laplacian,
                        momentum, multiplier_operator, tensor_sum)
from .potentials import BUILTINS, from_csv, gaussian, sech2, square_barrier, zero
from .resolvent import (BoundaryValue, HighEnergyFit, Weight, boundary_value,
                        eps_schedule, high_energy_fit, perturbed_boundary_value,
                        spectral_density, weighted_norm)
from .waveop import (CookResult, FBoundScan, WavePacket, band_packet,
                     cook_wave_operator, f_beta, fbound_scan, make_packet,
                     rosenblum_check, stationary_matrix_element, time_evolve,
                     trace_class_bound)
from .schrodinger1d import (JostPair, TransmissionRecord, jost_solutions,
                            low_energy_weighted_bound, resolvent_kernel_1d,
                            sharpness_scan, transmission,
                            transmission_asymptotics_fit)
from .rankone import (aronszajn_krein, density_profiles,
                      perturbed_sup_norm_via_ak, rank_one_perturbation,
                      resolvent_form, spectral_sup_norm)
from .singular import (HoelderFunction, KernelNorm, cauchy_boundary,
                       cauchy_bound_check, cauchy_eps_route,
                       hoelder_from_samples, kernel_divergence_scan,
                       kernel_matrix_lower_bound, kernel_operator_norm)
from .backflow import (CompressionSpectrum, backflow_spectrum,
                       compressed_extremes, compressed_spectrum,
                       conjugation_difference_norm, flux_operator,
                       positive_momentum_projector)
from .config import ConfigError, ExperimentConfig, parse_config
from .report import RunManifest, ScanReport, emit, read_json, render_figure
