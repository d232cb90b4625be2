"""Steady states, photon correlations and n-atom correlation diagnostics for driven atom chains."""

from .correlations import (
    CorrelationBreakdown,
    Correlator,
    DetectorDirection,
    ExpectationTable,
    build_expectation_table,
    g1,
    g2_breakdown,
)
from .couplings import CouplingMatrices, chi_tensor, couplings_for, ddi_couplings, rri_couplings
from .dynamics import (
    NonUniqueSteadyState,
    SteadyStateError,
    SteadyStateReport,
    build_hamiltonian,
    build_liouvillian,
    integrate_to_steady_state,
    solve,
    steady_state,
)
from .quantum import (
    Interaction,
    LevelScheme,
    RydbergCoupling,
    SystemSpec,
    chain_positions,
    embed_operator,
    expectation,
    op_product,
)
from .scanner import (
    AngleGrid,
    ContourSet,
    ScalarField,
    extract_contours,
    rabi_ratio_experiment,
    random_spacing_check,
    ratio_regions,
    scaling_experiment,
    scan,
)

__version__ = "0.1.0"
