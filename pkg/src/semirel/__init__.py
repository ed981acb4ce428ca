"""Bound-state spectra for two spinless particles with relativistic
kinematics in one dimension: a wave-phase amplitude solver, exact
reference solvers, and a comparison-table CLI."""

from .core import (
    NATURAL_UNITS,
    TwoBodySystem,
    UnitSystem,
    dynamic_kinetic,
    half_binomial,
    mass_coefficient,
    partner_mass,
    total_kinetic,
    truncated_kinetic,
)
from .exact import (
    ExactConvergenceError,
    MomentumGrid,
    SymmetricTridiagonal,
    build_momentum_hamiltonian,
    exact_salpeter_levels,
    nr_harmonic_spectrum,
    tridiagonal_eigenvalues,
)
from .milne import (
    AmplitudeState,
    IntegrationConfig,
    IntegrationFault,
    Mode,
    amplitude_rhs,
    integrate_half_axis,
)
from .potentials import (
    PotentialSpec,
    SingleWellError,
    evaluate,
    gaussian_well,
    harmonic,
    quartic,
    validate_single_well,
)
from .report import ComparisonRow, RunConfig, parse_csv, render, reproduce_table1
from .spectrum import (
    BracketError,
    EnergyLevel,
    QuantizationError,
    ThresholdError,
    a0_sensitivity,
    count_nodes,
    initial_amplitude_nr,
    initial_amplitude_wp,
    reconstruct_wavefunction,
    solve_level,
    solve_spectrum,
    total_phase,
    wavefunction_profile,
)

__version__ = "0.1.0"
