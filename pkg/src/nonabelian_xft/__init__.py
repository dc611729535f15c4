"""Exact-enumeration checks of exchange fluctuation theorems with non-commuting charges.

Two finite-dimensional units, each prepared in a generalized Gibbs state of
possibly non-commuting charges, collide through a charge-preserving unitary.
The package enumerates every two-point-measurement trajectory of that
collision and checks fluctuation relations, the second law, the
thermodynamic uncertainty relation and a tail bound on the resulting
statistics.
"""

from .collision import (
    Trajectory,
    TrajectoryTable,
    charge_change,
    delta_explicit,
    delta_residual,
    enumerate_trajectories,
    reverse_trajectory,
)
from .commutant import (
    Certificate,
    Interaction,
    generalized_swap,
    solve_allowed_interactions,
    swap_generator,
    unitary_from_interaction,
    verify_charge_preserving,
)
from .errors import (
    CertificateFailure,
    ConfigError,
    DegenerateSpectrum,
    DimensionMismatch,
    IndexOutOfRange,
    MissingInteractionHamiltonian,
    NotHermitian,
    NotUnitary,
    SingularState,
    XFTError,
)
from .gibbs import Bath, GibbsState, affinity_shift, commutation_report, exchange_hamiltonian, gibbs_state
from .matlin import HermEig, expm_hermitian, herm_eig, unitary_exp
from .qubit_example import (
    COMMUTING_TEMPLATE,
    QUBIT_TEMPLATE,
    Grid,
    GridAxis,
    QubitModelParams,
    SweepPoint,
    build_qubit_model,
    evaluate_point,
    sweep_fig2,
)
from .statistics import (
    CurrentDistribution,
    FTReport,
    Tolerances,
    averages,
    build_distribution,
    detailed_ft_report,
    integral_ft,
    naive_integral_ft,
    second_law_report,
    tail_bound_report,
    tur_report,
    verify_all,
)

__version__ = "0.1.0"
