"""Reduced operators, solution formulas, and observables.

The reduction formulas are checked against naive partial-trace sums built
with the brute-force helpers, the three solution routes against each other,
and the observables against moments computed straight from the density
sequence.
"""

from math import factorial

import numpy as np
import pytest

from bruteforce import naive_embed, naive_partial_trace, naive_partitions
from qcorr.bbgky import (
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
from qcorr.errors import NormalizationError
from qcorr.evolution import evolve_density_sequence
from qcorr.hierarchy import (
    CorrelationState,
    DensityState,
    cluster_expand,
    solve_chaos,
    solve_hierarchy,
)
from qcorr.operators import ManyBodyOperator, trace_norm
from qcorr.partitions import ParticleSet
from qcorr.presets import (
    chaos_one_particle,
    random_correlation_state,
    random_density_state,
    random_hermitian,
    random_system,
    rng_from_seed,
)
from qcorr.star_algebra import OperatorSequence

TOL_TIGHT = 1e-10
TOL_SOLVE = 1e-9
TOL_SERIES = 1e-5


def _naive_marginals(d: DensityState):
    """Reference reduction: explicit trace sums over the raw matrices."""
    seq = d.seq
    dim = seq.dim_single
    z = 1.0 + 0.0j
    for n in range(1, seq.n_max + 1):
        if seq.has(n):
            z += np.trace(seq.components[n].matrix) / factorial(n)
    comps = {}
    for s in range(1, seq.n_max + 1):
        acc = np.zeros((dim**s,) * 2, dtype=complex)
        for n in range(0, seq.n_max - s + 1):
            if not seq.has(s + n):
                continue
            mat = seq.components[s + n].matrix
            traced = list(range(s, s + n))
            acc += naive_partial_trace(mat, s + n, dim, traced) / factorial(n)
        comps[s] = acc / z
    return z, comps


# ---------------------------------------------------------------------------
# reduction


def test_one_component_density_marginal():
    # with only D_1 present: F_1 = D_1 / (1 + tr D_1)
    d = random_density_state(200, 2, 1)
    d1 = d.seq.components[1].matrix
    expected = d1 / (1.0 + np.trace(d1))
    got = reduce_from_density(d, 1)
    assert np.max(np.abs(got.matrix - expected)) < 1e-14


def test_reduction_matches_naive_traces():
    d = random_density_state(201, 2, 3, trace_scale=0.9)
    z, comps = _naive_marginals(d)
    for s in (1, 2, 3):
        got = reduce_from_density(d, s)
        assert np.max(np.abs(got.matrix - comps[s])) < 1e-12


def test_marginal_state_from_density_bundles_everything():
    d = random_density_state(202, 2, 3)
    z, comps = _naive_marginals(d)
    f = marginal_state_from_density(d)
    assert abs(f.normalization - z.real) < 1e-12
    assert f.seq.scalar0 == 1.0
    for s in (1, 2, 3):
        assert np.max(np.abs(f.seq.components[s].matrix - comps[s])) < 1e-12


def test_reduction_input_validation():
    d = random_density_state(203, 2, 2)
    with pytest.raises(ValueError):
        reduce_from_density(d, 0)
    with pytest.raises(ValueError):
        reduce_from_density(d, 3)


def test_vanishing_normalization_rejected():
    # tr D_1 = -1 makes the normalization scalar exactly zero
    op = ManyBodyOperator(
        ParticleSet.range1(1), 2, np.diag([-1.0, 0.0]).astype(complex)
    )
    d = DensityState(OperatorSequence(2, 1, 1.0, {1: op}))
    with pytest.raises(NormalizationError):
        reduce_from_density(d, 1)
    with pytest.raises(NormalizationError):
        marginal_state_from_density(d)
    with pytest.raises(NormalizationError):
        additive_observable_moment(d, np.eye(2), 1)


def test_marginal_state_validation():
    op = ManyBodyOperator(ParticleSet.range1(1), 2, np.eye(2, dtype=complex))
    with pytest.raises(ValueError):
        MarginalState(OperatorSequence(2, 1, 0.0, {1: op}))
    with pytest.raises(ValueError):
        MarginalState(OperatorSequence(2, 2, 1.0, {1: op}, 1))


# ---------------------------------------------------------------------------
# cluster-argument correlation components


def test_cluster_component_order_zero_is_density():
    d = random_density_state(210, 2, 3)
    for s in (1, 2, 3):
        got = cluster_correlation_component(d, s, 0)
        assert np.array_equal(got.matrix, d.seq.components[s].matrix)


def test_cluster_component_pair_formula():
    # s = 1, n = 1: two units, so D_2 minus the product of the D_1 copies
    d = random_density_state(211, 2, 2)
    d1 = d.seq.components[1].matrix
    d2 = d.seq.components[2].matrix
    got = cluster_correlation_component(d, 1, 1)
    assert np.max(np.abs(got.matrix - (d2 - np.kron(d1, d1)))) < 1e-14


def test_cluster_component_beyond_cutoff():
    d = random_density_state(212, 2, 2)
    with pytest.raises(ValueError):
        cluster_correlation_component(d, 2, 1)


# ---------------------------------------------------------------------------
# the three routes to F_s(t)


def test_solution_triangle():
    spec = random_system(300, dim_single=2, orders=(2, 3))
    g0 = random_correlation_state(
        301, 2, 3, norms=0.4, traceless=True, symmetric=True
    )
    d0 = cluster_expand(g0)
    f0 = marginal_state_from_density(d0)
    for t in (0.3, 0.7):
        dt = DensityState(evolve_density_sequence(spec, d0.seq, t))
        gt = solve_hierarchy(spec, g0, t)
        for s in (1, 2):
            a = reduce_from_density(dt, s)
            b = solve_bbgky_cumulant(spec, f0, s, t)
            c = reduce_from_correlations(gt, s)
            assert trace_norm(a - b) < TOL_SOLVE
            assert trace_norm(b - c) < TOL_SOLVE
            assert trace_norm(a - c) < TOL_SOLVE


def test_reduce_from_correlations_at_time_zero():
    # the correlation route has the normalization built in, so it matches
    # the density route on normalized data (traceless makes the scalar 1)
    g0 = random_correlation_state(302, 2, 3, norms=0.5, traceless=True)
    d0 = cluster_expand(g0)
    for s in (1, 2, 3):
        a = reduce_from_correlations(g0, s)
        b = reduce_from_density(d0, s)
        assert trace_norm(a - b) < TOL_TIGHT


def test_cumulant_solution_zero_time_exact():
    spec = random_system(303, dim_single=2, orders=(2,))
    f0 = marginal_state_from_density(random_density_state(304, 2, 3))
    for s in (1, 2, 3):
        got = solve_bbgky_cumulant(spec, f0, s, 0.0)
        assert trace_norm(got - f0.seq.components[s]) == 0.0


def test_cumulant_solution_input_validation():
    spec = random_system(305, dim_single=2, orders=(2,))
    f0 = marginal_state_from_density(random_density_state(306, 2, 2))
    with pytest.raises(ValueError):
        solve_bbgky_cumulant(spec, f0, 0, 0.1)
    with pytest.raises(ValueError):
        solve_bbgky_cumulant(spec, f0, 3, 0.1)


# ---------------------------------------------------------------------------
# time-ordered iteration series


def test_quadrature_spec_validation():
    QuadratureSpec(2, 32)
    QuadratureSpec(0, 4, "nested-trapezoid")
    with pytest.raises(ValueError):
        QuadratureSpec(-1, 16)
    with pytest.raises(ValueError):
        QuadratureSpec(4, 16)
    with pytest.raises(ValueError):
        QuadratureSpec(2, 3)
    with pytest.raises(ValueError):
        QuadratureSpec(2, 65)
    with pytest.raises(ValueError):
        QuadratureSpec(2, 16, "monte-carlo")


def test_iteration_matches_cumulant_solution():
    spec = random_system(310, dim_single=2, orders=(2,))
    f0 = marginal_state_from_density(random_density_state(311, 2, 3))
    t = 0.2
    reference = solve_bbgky_cumulant(spec, f0, 1, t)
    q = QuadratureSpec(2, 32, "gauss-legendre-simplex")
    got = solve_bbgky_iteration(spec, f0, 1, t, q)
    assert trace_norm(got - reference) < TOL_SERIES


def test_iteration_zero_time_exact():
    spec = random_system(312, dim_single=2, orders=(2,))
    f0 = marginal_state_from_density(random_density_state(313, 2, 3))
    q = QuadratureSpec(2, 8, "gauss-legendre-simplex")
    got = solve_bbgky_iteration(spec, f0, 1, 0.0, q)
    assert trace_norm(got - f0.seq.components[1]) == 0.0


def test_trapezoid_error_decreases_with_nodes():
    spec = random_system(314, dim_single=2, orders=(2,))
    f0 = marginal_state_from_density(random_density_state(315, 2, 3))
    t = 0.2
    reference = solve_bbgky_cumulant(spec, f0, 1, t)
    errs = []
    for nodes in (8, 16, 32):
        q = QuadratureSpec(2, nodes, "nested-trapezoid")
        errs.append(trace_norm(solve_bbgky_iteration(spec, f0, 1, t, q) - reference))
    assert errs[1] < errs[0]
    assert errs[2] < errs[1]


def test_iteration_requires_pair_potential_only():
    f0 = marginal_state_from_density(random_density_state(316, 2, 2))
    q = QuadratureSpec(1, 8)
    with pytest.raises(ValueError):
        solve_bbgky_iteration(
            random_system(317, dim_single=2, orders=(2, 3)), f0, 1, 0.1, q
        )
    with pytest.raises(ValueError):
        solve_bbgky_iteration(
            random_system(317, dim_single=2, orders=(3,)), f0, 1, 0.1, q
        )


# ---------------------------------------------------------------------------
# correlation operators from marginals


def test_pair_correlation_hand_formula():
    rng = rng_from_seed(400)
    f1 = random_hermitian(rng, 2, 1.0)
    f2 = random_hermitian(rng, 4, 1.0)
    comps = {
        1: ManyBodyOperator(ParticleSet.range1(1), 2, f1),
        2: ManyBodyOperator(ParticleSet.range1(2), 2, f2),
    }
    f = MarginalState(OperatorSequence(2, 2, 1.0, comps))
    got = correlation_from_marginals(f, 2)
    assert np.max(np.abs(got.matrix - (f2 - np.kron(f1, f1)))) < 1e-14


def test_correlation_from_marginals_partition_oracle():
    f = marginal_state_from_density(random_density_state(401, 2, 3))
    dim = 2
    mats = {s: f.seq.components[s].matrix for s in (1, 2, 3)}
    for s in (1, 2, 3):
        acc = np.zeros((dim**s,) * 2, dtype=complex)
        for part in naive_partitions(list(range(s))):
            coeff = (-1) ** (len(part) - 1) * factorial(len(part) - 1)
            term = np.eye(dim**s, dtype=complex)
            for block in part:
                term = term @ naive_embed(mats[len(block)], sorted(block), s, dim)
            acc += coeff * term
        got = correlation_from_marginals(f, s)
        assert np.max(np.abs(got.matrix - acc)) < 1e-12


def test_correlation_triangle_small_amplitude():
    # both constructions of G_s agree along the flow when the state is weak
    spec = random_system(320, dim_single=2, orders=(2, 3))
    g0 = random_correlation_state(
        321, 2, 3, norms=1e-5, traceless=True, symmetric=True
    )
    gt = solve_hierarchy(spec, g0, 0.4)
    comps = {s: reduce_from_correlations(gt, s) for s in (1, 2, 3)}
    f = MarginalState(OperatorSequence(2, 3, 1.0, comps))
    for s in (1, 2):
        a = correlation_from_marginals(f, s)
        b = correlation_from_g(gt, s)
        assert trace_norm(a - b) < TOL_SOLVE


def test_correlation_input_validation():
    f = marginal_state_from_density(random_density_state(402, 2, 2))
    with pytest.raises(ValueError):
        correlation_from_marginals(f, 0)
    with pytest.raises(ValueError):
        correlation_from_marginals(f, 3)
    g = random_correlation_state(403, 2, 2)
    with pytest.raises(ValueError):
        correlation_from_g(g, 3)


def test_chaos_expansion_matches_reduction():
    spec = random_system(330, dim_single=2, orders=(2, 3))
    g1 = chaos_one_particle(331, 2, norm=0.7)
    t = 0.5
    comps = {n: solve_chaos(spec, g1, n, t) for n in (1, 2, 3)}
    gt = CorrelationState(OperatorSequence(2, 3, 0.0, comps))
    for s in (1, 2):
        a = correlation_chaos_expansion(spec, g1, s, t, 3)
        b = correlation_from_g(gt, s)
        assert trace_norm(a - b) < TOL_SOLVE


def test_chaos_expansion_needs_one_particle_data():
    spec = random_system(332, dim_single=2, orders=(2,))
    g2 = ManyBodyOperator(ParticleSet.range1(2), 2, np.eye(4, dtype=complex))
    with pytest.raises(ValueError):
        correlation_chaos_expansion(spec, g2, 1, 0.1, 2)


# ---------------------------------------------------------------------------
# observables


def test_average_particle_number_conserved():
    spec = random_system(340, dim_single=2, orders=(2, 3))
    d0 = random_density_state(341, 2, 3, trace_scale=0.8)
    n0 = average_particle_number(marginal_state_from_density(d0))
    for t in (0.3, 0.9):
        dt = DensityState(evolve_density_sequence(spec, d0.seq, t))
        nt = average_particle_number(marginal_state_from_density(dt))
        assert abs(nt - n0) < TOL_TIGHT


def test_average_number_one_component():
    d = random_density_state(342, 2, 1, trace_scale=0.9)
    tr = d.seq.components[1].trace.real
    got = average_particle_number(marginal_state_from_density(d))
    assert abs(got - tr / (1.0 + tr)) < 1e-12


def _naive_moment(d: DensityState, a1: np.ndarray, power: int) -> float:
    """Moment oracle: embed the one-body matrix by explicit index loops."""
    seq = d.seq
    dim = seq.dim_single
    z = 1.0 + 0.0j
    for n in range(1, seq.n_max + 1):
        if seq.has(n):
            z += np.trace(seq.components[n].matrix) / factorial(n)
    total = 0.0 + 0.0j
    for n in range(1, seq.n_max + 1):
        if not seq.has(n):
            continue
        a_n = sum(naive_embed(a1, [i], n, dim) for i in range(n))
        obs = a_n if power == 1 else a_n @ a_n
        total += np.trace(obs @ seq.components[n].matrix) / factorial(n)
    return float((total / z).real)


def test_moment_matches_naive_embedding():
    d = random_density_state(350, 2, 3, trace_scale=0.7)
    rng = rng_from_seed(351)
    a1 = random_hermitian(rng, 2, 1.0)
    for power in (1, 2):
        got = additive_observable_moment(d, a1, power)
        assert abs(got - _naive_moment(d, a1, power)) < 1e-11


def test_dispersion_matches_central_moment():
    d = random_density_state(352, 2, 3, trace_scale=0.7)
    f = marginal_state_from_density(d)
    rng = rng_from_seed(353)
    a1 = random_hermitian(rng, 2, 1.0)
    m1 = additive_observable_moment(d, a1, 1)
    m2 = additive_observable_moment(d, a1, 2)
    assert abs(additive_dispersion(a1, f) - (m2 - m1 * m1)) < TOL_SOLVE


def test_uncorrelated_pair_term_vanishes():
    f1 = marginal_state_from_density(
        random_density_state(354, 2, 2)
    ).seq.components[1]
    prod = ManyBodyOperator(
        ParticleSet.range1(2), 2, np.kron(f1.matrix, f1.matrix)
    )
    f = MarginalState(OperatorSequence(2, 2, 1.0, {1: f1, 2: prod}))
    rng = rng_from_seed(355)
    a1 = random_hermitian(rng, 2, 1.0)
    got = additive_dispersion(a1, f)
    only_first = np.trace(a1 @ a1 @ f1.matrix).real
    assert abs(got - only_first) < TOL_TIGHT


def test_zero_observable_zero_dispersion():
    f = marginal_state_from_density(random_density_state(356, 2, 2))
    assert additive_dispersion(np.zeros((2, 2)), f) == 0.0


def test_observable_validation():
    f = marginal_state_from_density(random_density_state(357, 2, 2))
    with pytest.raises(ValueError):
        additive_dispersion(np.eye(3), f)
    one = MarginalState(OperatorSequence(2, 1, 1.0, {1: f.seq.components[1]}))
    with pytest.raises(ValueError):
        additive_dispersion(np.eye(2), one)
    d = random_density_state(358, 2, 2)
    with pytest.raises(ValueError):
        additive_observable_moment(d, np.eye(2), 3)
