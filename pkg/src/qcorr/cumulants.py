"""Cumulants of the evolution groups acting on operators.

The cumulant of order m over a family of disjoint clusters is the signed
partition sum

    sum over partitions P' of the cluster family of
        (-1)^(|P'|-1) (|P'|-1)!  three-dots  product over parts of the
        propagator conjugation on the part's union,

applied to an operand.  Cumulants are always applied as superoperators;
they are never materialized as matrices on the doubled space.  The
all-singletons cluster family gives the plain mth-order cumulant.

Zero time is special: for two or more clusters the coefficients cancel
exactly, so an early-out returns the zero operator without touching any
matrix arithmetic (the long path is kept reachable for tests).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .evolution import (
    group_apply_on_subsets,
    make_unitary_group,
    unitary_matrix,
)
from .hamiltonian import (
    SystemSpec,
    interaction_hamiltonian,
    liouvillian_apply,
)
from .operators import ManyBodyOperator, tensor_product, trace_norm, zero_operator
from .partitions import (
    ClusterSet,
    ParticleSet,
    enumerate_partitions,
    mobius_coefficient,
)


@dataclass(frozen=True)
class CumulantRequest:
    """Which clusters to take the cumulant over, and at what time."""

    clusters: ClusterSet
    t: float


def _parts_as_cluster_unions(partition, clusters) -> ClusterSet:
    """Map a partition of cluster indices to the particle-set blocks."""
    unions = []
    for block in partition.blocks:
        members = [clusters[i - 1] for i in block.labels]
        unions.append(
            ParticleSet.of(itertools.chain(*(c.labels for c in members)))
        )
    return ClusterSet(tuple(unions))


def _kahan_add(acc, comp, term):
    y = term - comp
    tmp = acc + y
    comp = (tmp - acc) - y
    return tmp, comp


def cumulant_apply(
    spec: SystemSpec,
    req: CumulantRequest,
    f: ManyBodyOperator,
    compensated: bool = False,
    zero_time_shortcut: bool = True,
) -> ManyBodyOperator:
    """Apply the cumulant over req.clusters at time req.t to f."""
    clusters = tuple(req.clusters)
    if req.clusters.union != f.labels:
        raise ValueError(
            f"clusters cover {req.clusters.union} but operand lives on {f.labels}"
        )
    m = len(clusters)
    if m >= 2 and req.t == 0.0 and zero_time_shortcut:
        return zero_operator(f.labels, f.dim_single)
    index_set = ParticleSet.range1(m)
    acc = np.zeros_like(f.matrix)
    comp = np.zeros_like(f.matrix)
    for p in enumerate_partitions(index_set):
        blocks = _parts_as_cluster_unions(p, clusters)
        coeff = mobius_coefficient(p)
        term = group_apply_on_subsets(spec, req.t, blocks, f).matrix * coeff
        if compensated:
            acc, comp = _kahan_add(acc, comp, term)
        else:
            acc = acc + term
    return ManyBodyOperator(f.labels, f.dim_single, acc)


def cumulant_vanishes_free(
    spec: SystemSpec, n: int, f: ManyBodyOperator, t: float
) -> float:
    """Trace norm of the nth-order cumulant on f for a noninteracting system.

    Must come out at numerical zero: without interactions the propagators
    factorize over particles and the signed partition coefficients cancel.
    """
    if spec.potentials:
        raise ValueError("this check is defined for interaction-free systems")
    if n < 2:
        raise ValueError("vanishing concerns orders n >= 2")
    if len(f.labels) != n:
        raise ValueError(f"operand must live on {n} particles, got {f.labels}")
    req = CumulantRequest(ClusterSet.singletons(f.labels), t)
    return trace_norm(cumulant_apply(spec, req, f))


def cumulant_generator_fd(
    spec: SystemSpec,
    req: CumulantRequest,
    f: ManyBodyOperator,
    h: float = 1e-4,
    richardson: bool = False,
) -> ManyBodyOperator:
    """Central-difference time derivative of the cumulant at zero.

    For two or more clusters this approximates the cluster-interaction
    generator (see hamiltonian.cluster_interaction_apply) with O(h^2)
    error, or O(h^4) with the Richardson flag.
    """
    if len(req.clusters) < 2:
        raise ValueError("the generator check needs at least two clusters")
    if not 1e-6 <= h <= 1e-2:
        raise ValueError(f"step {h} outside [1e-6, 1e-2]")

    def fd(step: float) -> np.ndarray:
        plus = cumulant_apply(spec, CumulantRequest(req.clusters, step), f)
        minus = cumulant_apply(spec, CumulantRequest(req.clusters, -step), f)
        return (plus.matrix - minus.matrix) / (2 * step)

    first = fd(h)
    if not richardson:
        return ManyBodyOperator(f.labels, f.dim_single, first)
    finer = fd(h / 2)
    return ManyBodyOperator(f.labels, f.dim_single, (4 * finer - first) / 3)


def _scattering_unitary(spec: SystemSpec, t: float, labels: ParticleSet) -> np.ndarray:
    """Interacting propagator forward times free one-particle propagators back."""
    d = spec.dim_single
    full = unitary_matrix(make_unitary_group(spec, labels), t)
    singles = [
        ManyBodyOperator(
            ParticleSet((k,)),
            d,
            unitary_matrix(make_unitary_group(spec, ParticleSet((k,))), -t),
        )
        for k in labels
    ]
    return full @ tensor_product(singles).matrix


def scattering_operator_apply(
    spec: SystemSpec, t: float, labels: ParticleSet, f: ManyBodyOperator
) -> ManyBodyOperator:
    """Conjugate f with the scattering unitary on the labels."""
    if f.labels != labels or f.dim_single != spec.dim_single:
        raise ValueError(f"operand on {f.labels} does not match labels {labels}")
    if t == 0.0:
        return f
    w = _scattering_unitary(spec, t, labels)
    return ManyBodyOperator(f.labels, f.dim_single, w @ f.matrix @ w.conj().T)


def scattering_cumulant_apply(
    spec: SystemSpec, t: float, clusters: ClusterSet, f: ManyBodyOperator
) -> ManyBodyOperator:
    """Cumulant built from scattering operators instead of propagators."""
    members = tuple(clusters)
    if clusters.union != f.labels:
        raise ValueError(
            f"clusters cover {clusters.union} but operand lives on {f.labels}"
        )
    m = len(members)
    if m >= 2 and t == 0.0:
        return zero_operator(f.labels, f.dim_single)
    if m == 1:
        return scattering_operator_apply(spec, t, f.labels, f)
    acc = np.zeros_like(f.matrix)
    for p in enumerate_partitions(ParticleSet.range1(m)):
        coeff = mobius_coefficient(p)
        factors = []
        for block in p.blocks:
            union = ParticleSet.of(
                itertools.chain(*(members[i - 1].labels for i in block.labels))
            )
            factors.append(
                ManyBodyOperator(
                    union, spec.dim_single, _scattering_unitary(spec, t, union)
                )
            )
        w = tensor_product(factors).matrix
        acc = acc + coeff * (w @ f.matrix @ w.conj().T)
    return ManyBodyOperator(f.labels, f.dim_single, acc)


def scattering_generator_expected(
    spec: SystemSpec, f: ManyBodyOperator
) -> ManyBodyOperator:
    """The t-derivative the scattering conjugation must have at zero.

    Equals the sum of interaction generators over every potential-carrying
    particle subset, i.e. the full generator minus its free part.
    """
    v = interaction_hamiltonian(spec, f.labels)
    return liouvillian_apply(v, f, spec.hbar)


def recover_group_from_cumulants(
    spec: SystemSpec, t: float, labels: ParticleSet, f: ManyBodyOperator
) -> ManyBodyOperator:
    """Rebuild the full propagator conjugation from cumulants.

    Sums over partitions the products of per-block cumulants; each block's
    cumulant expands into its own signed partition sum, so the whole is a
    double partition sum of blockwise conjugations.  Must reproduce
    group_apply on the same labels.
    """
    if len(labels) > 4:
        raise CapacityError("group recovery supported for up to 4 particles")
    if f.labels != labels:
        raise ValueError(f"operand on {f.labels} does not match {labels}")
    acc = np.zeros_like(f.matrix)
    for p in enumerate_partitions(labels):
        per_block = [enumerate_partitions(block) for block in p.blocks]
        for combo in itertools.product(*per_block):
            coeff = 1
            sub_blocks = []
            for q in combo:
                coeff *= mobius_coefficient(q)
                sub_blocks.extend(q.blocks)
            blocks = ClusterSet(tuple(sub_blocks))
            term = group_apply_on_subsets(spec, t, blocks, f).matrix * coeff
            acc = acc + term
    return ManyBodyOperator(f.labels, f.dim_single, acc)
