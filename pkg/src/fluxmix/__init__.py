"""Three-wave mixing in a superconducting flux qutrit.

Charge-basis circuit model, spectra and current matrix elements, closed-form
second-order susceptibilities, a density-matrix integrator used as an
oracle, flux sweeps and searches, and a small CLI.
"""

from .circuit import BasisSpec, CircuitParams, TruncationError, build_current_operator, build_hamiltonian
from .config import ConfigError, RunConfig, parse_config
from .lindblad import DriveSpec, chi2_numeric, evolve, oracle_check
from .plotting import emit_plot
from .response import DecoherenceRates, Susceptibility, chi2_diff, chi2_shg, chi2_sum, tunability
from .spectral import Spectrum, TransitionData, analyze, solve_spectrum, transition_data
from .sweep import SearchResult, SweepTable, find_harmonic_flux, find_r_max, sweep, tunability_report

__version__ = "0.1.0"

__all__ = [
    "BasisSpec", "CircuitParams", "ConfigError", "DecoherenceRates", "DriveSpec", "RunConfig",
    "SearchResult", "Spectrum", "Susceptibility", "SweepTable", "TransitionData", "TruncationError",
    "analyze", "build_current_operator", "build_hamiltonian", "chi2_diff", "chi2_numeric", "chi2_shg",
    "chi2_sum", "emit_plot", "evolve", "find_harmonic_flux", "find_r_max", "oracle_check",
    "parse_config", "solve_spectrum", "sweep", "transition_data", "tunability", "tunability_report",
]
