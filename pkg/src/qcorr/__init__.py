"""Correlation-operator dynamics for finite quantum many-particle systems.

The package models states of a system with a non-fixed, finite number of
particles by sequences of trace-class operators, moves between the density
and correlation pictures by partition sums, evolves them with exact
eigendecomposed propagators, and reduces them to marginal operators and
scalar observables.  Everything is verified against independent
constructions at small dimension.
"""

__version__ = "0.1.0"

from .bbgky import (
    MarginalState,
    QuadratureSpec,
    additive_dispersion,
    additive_observable_moment,
    average_particle_number,
    cluster_correlation_component,
    correlation_chaos_expansion,
    correlation_from_g,
    correlation_from_marginals,
    marginal_state_from_density,
    reduce_from_correlations,
    reduce_from_density,
    solve_bbgky_cumulant,
    solve_bbgky_iteration,
)
from .cumulants import (
    CumulantRequest,
    cumulant_apply,
    cumulant_generator_fd,
    cumulant_vanishes_free,
    recover_group_from_cumulants,
    scattering_cumulant_apply,
    scattering_generator_expected,
    scattering_operator_apply,
)
from .errors import CapacityError, NormalizationError, SchemaViolation
from .evolution import (
    UnitaryGroup,
    evolve_density_sequence,
    group_apply,
    group_apply_on_subsets,
    make_unitary_group,
    unitary_matrix,
)
from .hamiltonian import (
    SystemSpec,
    build_hamiltonian,
    cluster_interaction_apply,
    interaction_hamiltonian,
    interaction_liouvillian_apply,
    liouvillian_apply,
)
from .hierarchy import (
    CorrelationState,
    DensityState,
    cluster_expand,
    cluster_invert,
    nonlinear_generator,
    solve_chaos,
    solve_chaos_scattering_form,
    solve_hierarchy,
    solve_via_density_oracle,
    verify_group_property,
    verify_growth_bound,
    weak_solution_check,
)
from .operators import (
    ManyBodyOperator,
    block_product,
    check_mb_symmetry,
    identity_operator,
    min_eigenvalue,
    partial_trace,
    permute_particles,
    relabel,
    symmetrize,
    tensor_embed,
    tensor_product,
    trace_norm,
    zero_operator,
)
from .partitions import (
    ClusterSet,
    Partition,
    ParticleSet,
    bell_number,
    enumerate_nonempty_subsets,
    enumerate_partitions,
    mobius_coefficient,
    partition_alternating_sum,
    stirling2,
)
from .star_algebra import (
    OperatorSequence,
    annihilation_expand,
    product_reduction_residual,
    seq_add,
    seq_residual,
    seq_scale,
    seq_sub,
    shift_map,
    cluster_shift_map,
    star_exp,
    star_ln,
    star_product,
    unit_sequence,
    verify_lemma2,
    verify_lemma3,
    zero_sequence,
)
from .verify import SUITE_NAMES, run_suite

__all__ = [
    "__version__",
    "CapacityError",
    "NormalizationError",
    "SchemaViolation",
    "ParticleSet",
    "Partition",
    "ClusterSet",
    "enumerate_partitions",
    "enumerate_nonempty_subsets",
    "mobius_coefficient",
    "partition_alternating_sum",
    "stirling2",
    "bell_number",
    "ManyBodyOperator",
    "zero_operator",
    "identity_operator",
    "relabel",
    "permute_particles",
    "tensor_product",
    "tensor_embed",
    "block_product",
    "partial_trace",
    "trace_norm",
    "min_eigenvalue",
    "check_mb_symmetry",
    "symmetrize",
    "SystemSpec",
    "build_hamiltonian",
    "liouvillian_apply",
    "interaction_liouvillian_apply",
    "interaction_hamiltonian",
    "cluster_interaction_apply",
    "UnitaryGroup",
    "make_unitary_group",
    "unitary_matrix",
    "group_apply",
    "group_apply_on_subsets",
    "evolve_density_sequence",
    "CumulantRequest",
    "cumulant_apply",
    "cumulant_vanishes_free",
    "cumulant_generator_fd",
    "scattering_operator_apply",
    "scattering_cumulant_apply",
    "scattering_generator_expected",
    "recover_group_from_cumulants",
    "OperatorSequence",
    "unit_sequence",
    "zero_sequence",
    "seq_add",
    "seq_scale",
    "seq_sub",
    "seq_residual",
    "star_product",
    "star_exp",
    "star_ln",
    "shift_map",
    "cluster_shift_map",
    "annihilation_expand",
    "product_reduction_residual",
    "verify_lemma2",
    "verify_lemma3",
    "CorrelationState",
    "DensityState",
    "cluster_expand",
    "cluster_invert",
    "solve_hierarchy",
    "solve_via_density_oracle",
    "solve_chaos",
    "solve_chaos_scattering_form",
    "nonlinear_generator",
    "verify_group_property",
    "verify_growth_bound",
    "weak_solution_check",
    "MarginalState",
    "QuadratureSpec",
    "reduce_from_density",
    "marginal_state_from_density",
    "cluster_correlation_component",
    "reduce_from_correlations",
    "solve_bbgky_cumulant",
    "solve_bbgky_iteration",
    "correlation_from_marginals",
    "correlation_from_g",
    "correlation_chaos_expansion",
    "average_particle_number",
    "additive_dispersion",
    "additive_observable_moment",
    "SUITE_NAMES",
    "run_suite",
]
