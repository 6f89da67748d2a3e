"""Simulation toolkit for a field-modulated phonon resonator.

A charge qubit couples a microwave resonator mode to a SAW phonon mode so
that the quantized field quadrature modulates the phonon frequency.  The
package builds the tripartite and reduced models, validates the reduction,
and computes parametric gain, phonon pair statistics, emission spectra, and
detection signal-to-noise.
"""

from .config import ScenarioConfig, load_config, parse_config
from .dynamics import (
    CollapseSet,
    Superoperator,
    Trajectory,
    evolve,
    liouvillian,
    steady_state,
    thermal_pairs,
)
from .effective import (
    ModelComparison,
    compare_models,
    dispersive_coefficients,
    dressed_mech_frequency,
    dressed_pair_resonance,
    oscillation_frequency,
    pinned_hamiltonian,
)
from .hamiltonians import (
    CavityCoherentDrive,
    CircuitParams,
    CurrentSinusoidDrive,
    QubitCosineDrive,
    QubitStepDrive,
    SawGeometry,
    SystemParams,
    build_full_hamiltonian,
    build_reduced,
    circuit_map,
    coupling_g,
    mpa_constants,
    shifted_mech_frequency,
    validity_bounds,
)
from .hilbert import (
    CompositeSpace,
    Operator,
    QuantumState,
    basis_ket,
    cavity_mech,
    coherent_ket,
    embed,
    expect,
    ladder,
    mech_only,
    pauli,
    qubit_mech,
    thermal_density,
    tripartite,
)
from .mpa import GainResult, MpaConfig, analytic_gain, quadrature_steady, simulate_gain, steady_phonons
from .output import Column, ResultTable, write_csv, write_metadata, write_svg
from .scenarios import RunOptions, run_scenario
from .spectra import (
    CorrelationResult,
    SpectrumResult,
    g2,
    output_rate,
    snr,
    spectrum,
    thermal_occupation,
    two_time_correlation,
)

__version__ = "0.1.0"
