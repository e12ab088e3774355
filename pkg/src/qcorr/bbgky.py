"""Reduced s-particle operators, their solution formulas, and observables.

A marginal F_s compresses a density sequence: the weighted sum of partial
traces of all higher components, divided by the reduction scalar (the
grand-canonical normalization).  Because every state here is cut at n_max,
all series are exact finite sums.

The module carries three independent routes to F_s(t):

* reduce the evolved density sequence            (:func:`reduce_from_density`)
* the cumulant solution formula                  (:func:`solve_bbgky_cumulant`)
* reduce the evolved correlation sequence        (:func:`reduce_from_correlations`)

plus a time-ordered iteration series with numerical quadrature as a
cross-check, correlation operators G_s from two directions, and the
particle-number / dispersion observables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from .cumulants import CumulantRequest, cumulant_apply
from .errors import NormalizationError
from .evolution import group_apply, make_unitary_group, unitary_matrix
from .hamiltonian import SystemSpec, interaction_liouvillian_apply
from .hierarchy import CorrelationState, DensityState, cluster_expand
from .operators import (
    ManyBodyOperator,
    block_product,
    partial_trace,
    relabel,
    tensor_embed,
    tensor_product,
)
from .partitions import (
    ClusterSet,
    Partition,
    ParticleSet,
    enumerate_partitions,
    mobius_coefficient,
)
from .star_algebra import OperatorSequence, annihilation_expand

_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class MarginalState:
    """Sequence of reduced operators F_s plus the normalization it came with."""

    seq: OperatorSequence
    normalization: float = 1.0

    def __post_init__(self):
        if self.seq.prefix != 0:
            raise ValueError("marginal states are plain sequences")
        if self.seq.scalar0 != 1:
            raise ValueError("a marginal sequence has scalar component 1")


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate the time-ordered iteration terms."""

    order: int
    nodes_per_dim: int
    rule: str = "gauss-legendre-simplex"

    def __post_init__(self):
        if not 0 <= self.order <= 3:
            raise ValueError(f"iteration order must be in [0, 3], got {self.order}")
        if not 4 <= self.nodes_per_dim <= 64:
            raise ValueError(
                f"nodes_per_dim must be in [4, 64], got {self.nodes_per_dim}"
            )
        if self.rule not in ("gauss-legendre-simplex", "nested-trapezoid"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")


def _reduction_scalar(seq: OperatorSequence) -> complex:
    z = annihilation_expand(seq).scalar0
    if abs(z) < _NORM_FLOOR:
        raise NormalizationError(f"normalization scalar {z} vanishes")
    return z


def reduce_from_density(d: DensityState, s: int) -> ManyBodyOperator:
    """F_s from a density sequence: normalized aggregate of partial traces."""
    if not 1 <= s <= d.seq.n_max:
        raise ValueError(f"s must be in [1, {d.seq.n_max}], got {s}")
    red = annihilation_expand(d.seq)
    z = red.scalar0
    if abs(z) < _NORM_FLOOR:
        raise NormalizationError(f"normalization scalar {z} vanishes")
    return red.component(s) / z


def marginal_state_from_density(d: DensityState) -> MarginalState:
    """All reduced components at once, normalization recorded on the side."""
    red = annihilation_expand(d.seq)
    z = red.scalar0
    if abs(z) < _NORM_FLOOR:
        raise NormalizationError(f"normalization scalar {z} vanishes")
    comps = {n: op / z for n, op in red.components.items()}
    return MarginalState(
        OperatorSequence(d.seq.dim_single, d.seq.n_max, 1.0, comps),
        normalization=float(z.real),
    )


def cluster_correlation_component(
    d: DensityState, s: int, n: int
) -> ManyBodyOperator:
    """Correlation operator whose first argument is the s-cluster (1..s).

    Signed partition sum over the mixed unit family {the s-cluster,
    particle s+1, ..., particle s+n} of products of density components.
    For n = 0 this is just D_s: the single unit admits only one partition.
    """
    seq = d.seq
    if s + n > seq.n_max:
        raise ValueError(f"needs density component {s + n} beyond cutoff {seq.n_max}")
    units = [ParticleSet.range1(s)] + [
        ParticleSet((s + j,)) for j in range(1, n + 1)
    ]
    ground = ParticleSet.range1(s + n)
    acc = None
    for p in enumerate_partitions(ParticleSet.range1(n + 1)):
        coeff = mobius_coefficient(p)
        blocks = []
        for block in p.blocks:
            blocks.append(
                ParticleSet.of(
                    itertools.chain(*(units[i - 1].labels for i in block.labels))
                )
            )
        part = Partition(tuple(blocks), ground)
        ops = {}
        ok = True
        for b in part.blocks:
            if not seq.has(len(b)):
                ok = False
                break
            ops[b] = relabel(seq.components[len(b)], b)
        if not ok:
            continue
        term = block_product(part, ops).matrix * coeff
        acc = term if acc is None else acc + term
    if acc is None:
        acc = np.zeros(
            (seq.dim_single ** (s + n),) * 2, dtype=complex
        )
    return ManyBodyOperator(ground, seq.dim_single, acc)


def reduce_from_correlations(g: CorrelationState, s: int) -> ManyBodyOperator:
    """F_s from the correlation side: traced cluster-argument correlations.

    No normalization scalar appears; it is built into this representation.
    """
    seq = g.seq
    if not 1 <= s <= seq.n_max:
        raise ValueError(f"s must be in [1, {seq.n_max}], got {s}")
    d = cluster_expand(g)
    acc = None
    for n in range(0, seq.n_max - s + 1):
        comp = cluster_correlation_component(d, s, n)
        traced = ParticleSet(tuple(range(s + 1, s + n + 1)))
        red = partial_trace(comp, traced).matrix / factorial(n)
        acc = red if acc is None else acc + red
    return ManyBodyOperator(ParticleSet.range1(s), seq.dim_single, acc)


def solve_bbgky_cumulant(
    spec: SystemSpec, f0: MarginalState, s: int, t: float
) -> ManyBodyOperator:
    """F_s(t) by the cumulant solution formula.

    Term n applies the (1+n)-cluster cumulant, with (1..s) fused as one
    cluster and the traced particles as singletons, to the initial F_{s+n},
    then traces those n particles out; weights 1/n!.
    """
    seq = f0.seq
    if not 1 <= s <= seq.n_max:
        raise ValueError(f"s must be in [1, {seq.n_max}], got {s}")
    acc = None
    for n in range(0, seq.n_max - s + 1):
        if not seq.has(s + n):
            continue
        clusters = ClusterSet.of(
            [tuple(range(1, s + 1))] + [(s + j,) for j in range(1, n + 1)]
        )
        req = CumulantRequest(clusters, t)
        moved = cumulant_apply(spec, req, seq.components[s + n])
        traced = ParticleSet(tuple(range(s + 1, s + n + 1)))
        red = partial_trace(moved, traced).matrix / factorial(n)
        acc = red if acc is None else acc + red
    if acc is None:
        dim = seq.dim_single**s
        acc = np.zeros((dim, dim), dtype=complex)
    return ManyBodyOperator(ParticleSet.range1(s), seq.dim_single, acc)


def _embedded_group_conj(
    spec: SystemSpec, full: ParticleSet, sub_n: int, tau: float, x: ManyBodyOperator
) -> ManyBodyOperator:
    """Conjugate x by the propagator of the first sub_n particles."""
    if tau == 0.0:
        return x
    sub = ParticleSet.range1(sub_n)
    ug = make_unitary_group(spec, sub)
    u = ManyBodyOperator(sub, spec.dim_single, unitary_matrix(ug, tau))
    w = tensor_embed(u, full).matrix
    return ManyBodyOperator(full, x.dim_single, w @ x.matrix @ w.conj().T)


def _iteration_integrand(
    spec: SystemSpec,
    f_init: ManyBodyOperator,
    s: int,
    n: int,
    t: float,
    ts: tuple[float, ...],
) -> ManyBodyOperator:
    """One time-ordered chain evaluated at the node times ts = (t_1..t_n)."""
    full = ParticleSet.range1(s + n)
    phi2 = spec.potentials[2]
    x = _embedded_group_conj(spec, full, s + n, ts[n - 1], f_init)
    for j in range(n, 0, -1):
        acc = None
        for i in range(1, s + j):
            pair = ParticleSet((i, s + j))
            term = interaction_liouvillian_apply(phi2, pair, x, spec.hbar)
            acc = term.matrix if acc is None else acc + term.matrix
        x = ManyBodyOperator(full, spec.dim_single, acc)
        upper = ts[j - 2] if j >= 2 else t
        x = _embedded_group_conj(spec, full, s + j - 1, upper - ts[j - 1], x)
    traced = ParticleSet(tuple(range(s + 1, s + n + 1)))
    return partial_trace(x, traced)


def _nested_nodes(rule: str, nodes: int, upper: float) -> list[tuple[float, float]]:
    """One level of (node, weight) pairs for the interval [0, upper]."""
    if rule == "gauss-legendre-simplex":
        x, w = np.polynomial.legendre.leggauss(nodes)
        pts = (x + 1.0) * (upper / 2.0)
        wts = w * (upper / 2.0)
        return list(zip(pts.tolist(), wts.tolist()))
    # nested-trapezoid: closed uniform rule, degenerate interval gives zero
    if upper == 0.0:
        return [(0.0, 0.0)]
    step = upper / (nodes - 1)
    out = []
    for i in range(nodes):
        weight = step * (0.5 if i in (0, nodes - 1) else 1.0)
        out.append((i * step, weight))
    return out


def solve_bbgky_iteration(
    spec: SystemSpec,
    f0: MarginalState,
    s: int,
    t: float,
    q: QuadratureSpec,
) -> ManyBodyOperator:
    """F_s(t) by the truncated time-ordered series with numerical quadrature.

    Defined for systems with a two-body potential only.  Term n integrates
    the n-fold chain of embedded propagators and pair generators over the
    ordered simplex 0 <= t_n <= ... <= t_1 <= t.
    """
    if set(spec.potentials) - {2}:
        raise ValueError("the iteration series is defined for two-body systems")
    if 2 not in spec.potentials:
        raise ValueError("the iteration series needs a two-body potential")
    seq = f0.seq
    if not 1 <= s <= seq.n_max:
        raise ValueError(f"s must be in [1, {seq.n_max}], got {s}")

    total = group_apply(
        make_unitary_group(spec, ParticleSet.range1(s)), t, seq.component(s)
    ).matrix

    depth = min(q.order, seq.n_max - s)
    for n in range(1, depth + 1):
        if not seq.has(s + n):
            continue
        f_init = seq.components[s + n]
        acc = np.zeros((spec.dim_single**s,) * 2, dtype=complex)

        def descend(level: int, upper: float, weight: float, ts: tuple):
            nonlocal acc
            for node, w in _nested_nodes(q.rule, q.nodes_per_dim, upper):
                wt = weight * w
                if wt == 0.0:
                    continue
                here = ts + (node,)
                if level == n:
                    val = _iteration_integrand(spec, f_init, s, n, t, here)
                    acc = acc + wt * val.matrix
                else:
                    descend(level + 1, node, wt, here)

        descend(1, t, 1.0, ())
        total = total + acc
    return ManyBodyOperator(ParticleSet.range1(s), spec.dim_single, total)


def correlation_from_marginals(f: MarginalState, s: int) -> ManyBodyOperator:
    """G_s as the signed partition combination of marginal products."""
    seq = f.seq
    if not 1 <= s <= seq.n_max:
        raise ValueError(f"s must be in [1, {seq.n_max}], got {s}")
    ground = ParticleSet.range1(s)
    acc = None
    for p in enumerate_partitions(ground):
        ops = {}
        ok = True
        for b in p.blocks:
            if not seq.has(len(b)):
                ok = False
                break
            ops[b] = relabel(seq.components[len(b)], b)
        if not ok:
            continue
        term = block_product(p, ops).matrix * mobius_coefficient(p)
        acc = term if acc is None else acc + term
    if acc is None:
        acc = np.zeros((seq.dim_single**s,) * 2, dtype=complex)
    return ManyBodyOperator(ground, seq.dim_single, acc)


def correlation_from_g(g: CorrelationState, s: int) -> ManyBodyOperator:
    """G_s as the reduction of the correlation sequence itself."""
    if not 1 <= s <= g.seq.n_max:
        raise ValueError(f"s must be in [1, {g.seq.n_max}], got {s}")
    return annihilation_expand(g.seq).component(s)


def correlation_chaos_expansion(
    spec: SystemSpec,
    g1_0: ManyBodyOperator,
    s: int,
    t: float,
    n_max: int,
) -> ManyBodyOperator:
    """G_s(t) for independent initial particles, straight from cumulants.

    Term n traces the (s+n)th-order cumulant applied to the (s+n)-fold
    product of the initial one-particle correlation; weights 1/n!.
    """
    if len(g1_0.labels) != 1:
        raise ValueError("chaos data is a one-particle operator")
    acc = None
    for n in range(0, n_max - s + 1):
        m = s + n
        ground = ParticleSet.range1(m)
        operand = tensor_product(
            [relabel(g1_0, ParticleSet((i,))) for i in ground]
        )
        req = CumulantRequest(ClusterSet.singletons(ground), t)
        moved = cumulant_apply(spec, req, operand)
        traced = ParticleSet(tuple(range(s + 1, m + 1)))
        red = partial_trace(moved, traced).matrix / factorial(n)
        acc = red if acc is None else acc + red
    return ManyBodyOperator(ParticleSet.range1(s), spec.dim_single, acc)


def average_particle_number(f: MarginalState) -> float:
    """Trace of F_1; the imaginary part is a numerical defect only."""
    return float(f.seq.component(1).trace.real)


def additive_dispersion(a1: np.ndarray, f: MarginalState) -> float:
    """Variance of the additive observable built from the one-body matrix a1.

    Two exact pieces: the one-particle second moment and the two-particle
    term weighted by F_2 minus the product of marginals.
    """
    seq = f.seq
    if not seq.has(2):
        raise ValueError("dispersion needs the two-particle marginal")
    d = seq.dim_single
    a = np.asarray(a1, dtype=complex)
    if a.shape != (d, d):
        raise ValueError(f"observable must be {d}x{d}, got {a.shape}")
    f1 = seq.component(1).matrix
    f2 = seq.component(2).matrix
    one = np.trace(a @ a @ f1)
    pair_weight = f2 - np.kron(f1, f1)
    two = np.trace(np.kron(a, a) @ pair_weight)
    return float((one + two).real)


def additive_observable_moment(
    d: DensityState, a1: np.ndarray, power: int
) -> float:
    """Moment of the additive observable straight from the density sequence.

    The observable on n particles is (sum_i a(i))^power; the average is the
    normalized weighted sum of traces against the density components.
    """
    if power not in (1, 2):
        raise ValueError("only first and second moments are supported")
    seq = d.seq
    dim = seq.dim_single
    a = np.asarray(a1, dtype=complex)
    z = _reduction_scalar(seq)
    total = 0.0 + 0.0j
    for n in range(1, seq.n_max + 1):
        if not seq.has(n):
            continue
        ground = ParticleSet.range1(n)
        a_n = None
        for i in ground:
            emb = tensor_embed(
                ManyBodyOperator(ParticleSet((i,)), dim, a), ground
            ).matrix
            a_n = emb if a_n is None else a_n + emb
        obs = a_n if power == 1 else a_n @ a_n
        total += np.trace(obs @ seq.components[n].matrix) / factorial(n)
    return float((total / z).real)
