"""Correlation-operator dynamics: cluster transforms and solution formulas.

The density sequence D and the correlation sequence g determine each other
through sums over set partitions: D_n collects products of g-blocks over
all partitions, and g_n inverts that with the signed coefficients.  Time
evolution closes on the correlation side: component n of the solution is a
sum over partitions of an n-dependent cumulant applied to the product of
initial blocks.

Everything here is verifiable against one ground truth, exposed as
:func:`solve_via_density_oracle`: expand the initial correlations to a
density sequence, conjugate each component with its propagator, and invert
back.  The direct solution must agree with that path to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, factorial

import numpy as np

from .cumulants import (
    CumulantRequest,
    cumulant_apply,
    scattering_cumulant_apply,
)
from .evolution import evolve_density_sequence, group_apply, make_unitary_group
from .hamiltonian import (
    SystemSpec,
    build_hamiltonian,
    cluster_interaction_apply,
    liouvillian_apply,
)
from .operators import (
    ManyBodyOperator,
    block_product,
    relabel,
    tensor_product,
    trace_norm,
)
from .partitions import ClusterSet, ParticleSet, enumerate_partitions, mobius_coefficient
from .star_algebra import OperatorSequence, seq_residual


@dataclass(frozen=True)
class CorrelationState:
    """Sequence (0, g_1, g_2, ...) of correlation operators."""

    seq: OperatorSequence

    def __post_init__(self):
        if self.seq.prefix != 0:
            raise ValueError("correlation states are plain sequences")
        if self.seq.scalar0 != 0:
            raise ValueError("a correlation sequence has scalar component 0")


@dataclass(frozen=True)
class DensityState:
    """Sequence (1, D_1, D_2, ...) of density components."""

    seq: OperatorSequence

    def __post_init__(self):
        if self.seq.prefix != 0:
            raise ValueError("density states are plain sequences")
        if self.seq.scalar0 != 1:
            raise ValueError("a density sequence has scalar component 1")


def _partition_block_product(
    seq: OperatorSequence, p
) -> ManyBodyOperator | None:
    """Product over p's blocks of seq components; None if any block is zero."""
    ops = {}
    for block in p.blocks:
        if not seq.has(len(block)):
            return None
        ops[block] = relabel(seq.components[len(block)], block)
    return block_product(p, ops)


def cluster_expand(g: CorrelationState) -> DensityState:
    """Density components as partition sums of correlation products."""
    seq = g.seq
    comps: dict[int, ManyBodyOperator] = {}
    for n in range(1, seq.n_max + 1):
        ground = ParticleSet.range1(n)
        acc = None
        for p in enumerate_partitions(ground):
            term = _partition_block_product(seq, p)
            if term is None:
                continue
            acc = term.matrix if acc is None else acc + term.matrix
        if acc is not None:
            comps[n] = ManyBodyOperator(ground, seq.dim_single, acc)
    return DensityState(OperatorSequence(seq.dim_single, seq.n_max, 1.0, comps))


def cluster_invert(d: DensityState) -> CorrelationState:
    """Correlation components by signed partition sums of density products."""
    seq = d.seq
    comps: dict[int, ManyBodyOperator] = {}
    for n in range(1, seq.n_max + 1):
        ground = ParticleSet.range1(n)
        acc = None
        for p in enumerate_partitions(ground):
            term = _partition_block_product(seq, p)
            if term is None:
                continue
            signed = term.matrix * mobius_coefficient(p)
            acc = signed if acc is None else acc + signed
        if acc is not None:
            comps[n] = ManyBodyOperator(ground, seq.dim_single, acc)
    return CorrelationState(OperatorSequence(seq.dim_single, seq.n_max, 0.0, comps))


def solve_hierarchy(
    spec: SystemSpec, g0: CorrelationState, t: float
) -> CorrelationState:
    """Correlation sequence at time t from initial data g0.

    Component n sums, over partitions of (1..n), the partition-indexed
    cumulant applied to the product of initial blocks.  At t = 0 this
    returns g0 exactly: the single-block term passes the operand through
    and every multi-block cumulant vanishes identically.
    """
    seq = g0.seq
    comps: dict[int, ManyBodyOperator] = {}
    for n in range(1, seq.n_max + 1):
        ground = ParticleSet.range1(n)
        acc = None
        for p in enumerate_partitions(ground):
            operand = _partition_block_product(seq, p)
            if operand is None:
                continue
            req = CumulantRequest(ClusterSet(p.blocks), t)
            term = cumulant_apply(spec, req, operand)
            acc = term.matrix if acc is None else acc + term.matrix
        if acc is not None:
            comps[n] = ManyBodyOperator(ground, seq.dim_single, acc)
    return CorrelationState(OperatorSequence(seq.dim_single, seq.n_max, 0.0, comps))


def solve_via_density_oracle(
    spec: SystemSpec, g0: CorrelationState, t: float
) -> CorrelationState:
    """Ground-truth path: expand to densities, evolve each, invert back."""
    d0 = cluster_expand(g0)
    dt = evolve_density_sequence(spec, d0.seq, t)
    return cluster_invert(DensityState(dt))


def solve_chaos(
    spec: SystemSpec, g1_0: ManyBodyOperator, n: int, t: float
) -> ManyBodyOperator:
    """Correlation component n for initial data with independent particles.

    The nth-order cumulant applied to the n-fold product of the one-particle
    component.
    """
    if len(g1_0.labels) != 1:
        raise ValueError("chaos data is a one-particle operator")
    ground = ParticleSet.range1(n)
    operand = tensor_product(
        [relabel(g1_0, ParticleSet((i,))) for i in ground]
    )
    req = CumulantRequest(ClusterSet.singletons(ground), t)
    return cumulant_apply(spec, req, operand)


def solve_chaos_scattering_form(
    spec: SystemSpec, g1_0: ManyBodyOperator, n: int, t: float
) -> ManyBodyOperator:
    """Chaos solution written through scattering-operator cumulants.

    The operand carries freely evolved one-particle components at time t;
    the scattering cumulant supplies the rest.  Agrees with solve_chaos.
    """
    if n < 2:
        raise ValueError("the scattering form is stated for n >= 2")
    if len(g1_0.labels) != 1:
        raise ValueError("chaos data is a one-particle operator")
    ground = ParticleSet.range1(n)
    evolved = []
    for i in ground:
        labels = ParticleSet((i,))
        ug = make_unitary_group(spec, labels)
        evolved.append(group_apply(ug, t, relabel(g1_0, labels)))
    operand = tensor_product(evolved)
    return scattering_cumulant_apply(
        spec, t, ClusterSet.singletons(ground), operand
    )


def nonlinear_generator(spec: SystemSpec, g: CorrelationState) -> CorrelationState:
    """Right-hand side of the evolution equations for the correlation sequence.

    Component n: the full commutator generator on g_n plus, for every
    partition with at least two blocks, the cluster-interaction generator
    applied to the product of g-blocks.
    """
    seq = g.seq
    comps: dict[int, ManyBodyOperator] = {}
    for n in range(1, seq.n_max + 1):
        ground = ParticleSet.range1(n)
        acc = None
        if seq.has(n):
            h = build_hamiltonian(spec, ground)
            acc = liouvillian_apply(h, seq.components[n], spec.hbar).matrix
        for p in enumerate_partitions(ground):
            if len(p.blocks) < 2:
                continue
            operand = _partition_block_product(seq, p)
            if operand is None:
                continue
            term = cluster_interaction_apply(ClusterSet(p.blocks), operand, spec)
            acc = term.matrix if acc is None else acc + term.matrix
        if acc is not None:
            comps[n] = ManyBodyOperator(ground, seq.dim_single, acc)
    return CorrelationState(OperatorSequence(seq.dim_single, seq.n_max, 0.0, comps))


def verify_group_property(
    spec: SystemSpec, g: CorrelationState, t1: float, t2: float
) -> float:
    """Largest componentwise defect of composing solutions versus one step."""
    if abs(t1) > 2 or abs(t2) > 2:
        raise ValueError("group-property check wants |t| <= 2")
    one_shot = solve_hierarchy(spec, g, t1 + t2)
    via_t2 = solve_hierarchy(spec, solve_hierarchy(spec, g, t2), t1)
    via_t1 = solve_hierarchy(spec, solve_hierarchy(spec, g, t1), t2)
    return max(
        seq_residual(via_t2.seq, one_shot.seq),
        seq_residual(via_t1.seq, one_shot.seq),
    )


def verify_growth_bound(
    spec: SystemSpec, g: CorrelationState, t: float, n: int
) -> tuple[float, float]:
    """Trace norm of solution component n against n! e^(2n+1) c^n.

    c is the largest trace norm among the initial components that can occur
    as a block, i.e. orders 1..n.
    """
    if n > 4:
        raise ValueError("bound check supported for n <= 4")
    sol = solve_hierarchy(spec, g, t)
    lhs = trace_norm(sol.seq.component(n))
    c = max(trace_norm(g.seq.component(k)) for k in range(1, n + 1))
    rhs = factorial(n) * exp(2 * n + 1) * c**n
    return lhs, rhs


def _pair_trace(a: ManyBodyOperator, b: ManyBodyOperator) -> complex:
    return complex(np.trace(a.matrix @ b.matrix))


def weak_solution_check(
    spec: SystemSpec,
    phi_n: ManyBodyOperator,
    g0: CorrelationState,
    t: float,
    h: float = 1e-4,
) -> float:
    """Defect of the weak form of the evolution equation on a test operator.

    The time derivative of Tr(phi g_n(t)) by central differences is
    compared with the adjoint-generator expression evaluated at t: the
    generators move onto phi with a sign flip under the trace pairing.
    """
    n = len(phi_n.labels)
    if n > 3:
        raise ValueError("weak-form check supported for up to 3 particles")
    ground = ParticleSet.range1(n)
    if phi_n.labels != ground:
        raise ValueError(f"test operator must live on {ground}")

    plus = solve_hierarchy(spec, g0, t + h).seq.component(n)
    minus = solve_hierarchy(spec, g0, t - h).seq.component(n)
    lhs = (_pair_trace(phi_n, plus) - _pair_trace(phi_n, minus)) / (2 * h)

    gt = solve_hierarchy(spec, g0, t)
    hmat = build_hamiltonian(spec, ground)
    rhs = _pair_trace(
        -liouvillian_apply(hmat, phi_n, spec.hbar), gt.seq.component(n)
    )
    for p in enumerate_partitions(ground):
        if len(p.blocks) < 2:
            continue
        operand = _partition_block_product(gt.seq, p)
        if operand is None:
            continue
        moved = -cluster_interaction_apply(ClusterSet(p.blocks), phi_n, spec)
        rhs += _pair_trace(moved, operand)
    return abs(lhs - rhs)
