"""The algebra of operator sequences under the subset tensor product.

An :class:`OperatorSequence` is a finite family (f_0, f_1, f_2, ..., f_N)
where f_0 is a scalar and f_n acts on the canonical labels (1..n).  The
star product convolves two sequences over subsets of the labels,

    (f * h)_n(Y) = sum_{Z subset of Y} f_|Z|(Z) h_{n-|Z|}(Y \\ Z),

and its exponential and logarithm are exact finite sums here: a star power
raises minimum support, so on a sequence cut at N the series terminate.

Sequences may carry a cluster prefix of size s: component n then acts on
(1..s+n) with the first s labels frozen as one unit.  Prefixed sequences
arise from the shift maps; in star products the prefix always stays with
its factor while ordinary labels distribute.  The reduction map
``annihilation_expand`` (the e-to-the-a aggregate of partial traces) only
ever traces ordinary particles.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import NormalizationError
from .operators import (
    ManyBodyOperator,
    partial_trace,
    permute_particles,
    relabel,
    tensor_product,
    trace_norm,
    zero_operator,
)
from .partitions import ParticleSet, enumerate_partitions, mobius_coefficient


@dataclass(frozen=True, eq=False)
class OperatorSequence:
    """Finite operator sequence with optional cluster prefix.

    components maps the ordinary-particle count n to an operator on the
    canonical labels (1..prefix+n).  Missing entries are zero.  For plain
    sequences (prefix 0) component 0 is the scalar ``scalar0``; for
    prefixed sequences component 0 is an operator on the prefix itself and
    scalar0 must be 0.
    """

    dim_single: int
    n_max: int
    scalar0: complex = 0.0
    components: dict[int, ManyBodyOperator] = field(default_factory=dict)
    prefix: int = 0

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")
        if self.prefix < 0:
            raise ValueError(f"prefix must be >= 0, got {self.prefix}")
        object.__setattr__(self, "scalar0", complex(self.scalar0))
        if self.prefix and self.scalar0 != 0:
            raise ValueError("a prefixed sequence has no scalar component")
        comps = {}
        lo = 0 if self.prefix else 1
        for n, op in sorted(self.components.items()):
            n = int(n)
            if not lo <= n <= self.n_max:
                raise ValueError(
                    f"component index {n} outside [{lo}, {self.n_max}]"
                )
            want = ParticleSet.range1(self.prefix + n)
            if op.labels != want:
                raise ValueError(
                    f"component {n} must act on {want}, got {op.labels}"
                )
            if op.dim_single != self.dim_single:
                raise ValueError("components must share dim_single")
            comps[n] = op
        object.__setattr__(self, "components", comps)

    def component(self, n: int) -> ManyBodyOperator:
        """Component n, materializing zeros for unset entries."""
        got = self.components.get(n)
        if got is not None:
            return got
        return zero_operator(ParticleSet.range1(self.prefix + n), self.dim_single)

    def has(self, n: int) -> bool:
        return n in self.components

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.components))

    def __repr__(self) -> str:
        tag = f", prefix={self.prefix}" if self.prefix else ""
        return (
            f"OperatorSequence(d={self.dim_single}, n_max={self.n_max}, "
            f"support={self.support}{tag})"
        )


def unit_sequence(dim_single: int, n_max: int) -> OperatorSequence:
    """The multiplicative unit (1, 0, 0, ...)."""
    return OperatorSequence(dim_single, n_max, 1.0)


def zero_sequence(dim_single: int, n_max: int, prefix: int = 0) -> OperatorSequence:
    return OperatorSequence(dim_single, n_max, 0.0, {}, prefix)


def seq_add(f: OperatorSequence, h: OperatorSequence) -> OperatorSequence:
    if f.dim_single != h.dim_single or f.prefix != h.prefix:
        raise ValueError("sequences are not compatible for addition")
    n_max = max(f.n_max, h.n_max)
    comps: dict[int, ManyBodyOperator] = {}
    for n in sorted(set(f.support) | set(h.support)):
        if f.has(n) and h.has(n):
            comps[n] = f.components[n] + h.components[n]
        elif f.has(n):
            comps[n] = f.components[n]
        else:
            comps[n] = h.components[n]
    return OperatorSequence(f.dim_single, n_max, f.scalar0 + h.scalar0, comps, f.prefix)


def seq_scale(f: OperatorSequence, c: complex) -> OperatorSequence:
    comps = {n: op * c for n, op in f.components.items()}
    return OperatorSequence(f.dim_single, f.n_max, f.scalar0 * c, comps, f.prefix)


def seq_sub(f: OperatorSequence, h: OperatorSequence) -> OperatorSequence:
    return seq_add(f, seq_scale(h, -1.0))


def seq_residual(f: OperatorSequence, h: OperatorSequence, upto: int | None = None) -> float:
    """Largest componentwise trace-norm difference, scalar included."""
    if f.dim_single != h.dim_single or f.prefix != h.prefix:
        raise ValueError("sequences are not comparable")
    hi = min(f.n_max, h.n_max) if upto is None else upto
    worst = abs(f.scalar0 - h.scalar0)
    lo = 0 if f.prefix else 1
    for n in range(lo, hi + 1):
        worst = max(worst, trace_norm(f.component(n) - h.component(n)))
    return float(worst)


def _ordinary_labels(prefix: int, n: int) -> tuple[int, ...]:
    return tuple(range(prefix + 1, prefix + n + 1))


def star_product(
    f: OperatorSequence, h: OperatorSequence, out_n_max: int | None = None
) -> OperatorSequence:
    """Subset convolution of two sequences.

    At most one factor may carry a prefix; the prefix rides with that
    factor and only ordinary labels are distributed over subsets.  With
    ``out_n_max = f.n_max + h.n_max`` the product of finitely supported
    sequences is exact; the default cut is min(f.n_max, h.n_max).
    """
    if f.dim_single != h.dim_single:
        raise ValueError("mixed single-particle dimensions")
    if f.prefix and h.prefix:
        raise ValueError("cannot star-multiply two prefixed sequences")
    if h.prefix:
        return star_product(h, f, out_n_max)
    d = f.dim_single
    s = f.prefix
    out = min(f.n_max, h.n_max) if out_n_max is None else out_n_max

    comps: dict[int, ManyBodyOperator] = {}
    lo = 0 if s else 1
    for n in range(lo, out + 1):
        ordinary = _ordinary_labels(s, n)
        acc = None
        for k in range(0, n + 1):
            left_ok = f.has(k) or (k == 0 and s == 0 and f.scalar0 != 0)
            right_ok = h.has(n - k) or (n - k == 0 and h.scalar0 != 0)
            if not left_ok or not right_ok:
                continue
            for z in itertools.combinations(ordinary, k):
                zs = set(z)
                rest = tuple(x for x in ordinary if x not in zs)
                parts = []
                coeff = 1.0 + 0.0j
                if s > 0:
                    left_labels = ParticleSet(tuple(range(1, s + 1)) + z)
                    parts.append(relabel(f.component(k), left_labels))
                elif k > 0:
                    parts.append(relabel(f.component(k), ParticleSet(z)))
                else:
                    coeff *= f.scalar0
                if n - k > 0:
                    parts.append(relabel(h.component(n - k), ParticleSet(rest)))
                else:
                    coeff *= h.scalar0
                if parts:
                    term = tensor_product(parts).matrix * coeff
                else:
                    term = None  # unreachable: n >= lo means some labels exist
                acc = term if acc is None else acc + term
        if acc is not None and np.any(acc):
            comps[n] = ManyBodyOperator(ParticleSet.range1(s + n), d, acc)
    scalar = 0.0 if s else f.scalar0 * h.scalar0
    return OperatorSequence(d, out, scalar, comps, s)


def star_exp(f: OperatorSequence, out_n_max: int | None = None) -> OperatorSequence:
    """Exponential under the star product; an exact finite sum.

    Requires a plain sequence with zero scalar component.  Each star power
    raises minimum support, so components up to the cut are exact.
    """
    if f.prefix:
        raise ValueError("star_exp is defined for plain sequences")
    if f.scalar0 != 0:
        raise ValueError("star_exp requires a vanishing scalar component")
    out = f.n_max if out_n_max is None else out_n_max
    base = OperatorSequence(
        f.dim_single, out, 0.0, {n: op for n, op in f.components.items() if n <= out}
    )
    total = unit_sequence(f.dim_single, out)
    power = base
    for k in range(1, out + 1):
        total = seq_add(total, seq_scale(power, 1.0 / factorial(k)))
        if k < out:
            power = star_product(power, base, out_n_max=out)
            if not power.components:
                break
    return total


def star_ln(g: OperatorSequence, out_n_max: int | None = None) -> OperatorSequence:
    """Logarithm under the star product, inverse of star_exp.

    Requires a plain sequence of the form 1 + h (scalar component one).
    """
    if g.prefix:
        raise ValueError("star_ln is defined for plain sequences")
    if abs(g.scalar0 - 1.0) > 1e-12:
        raise ValueError("star_ln requires scalar component 1")
    out = g.n_max if out_n_max is None else out_n_max
    h = OperatorSequence(
        g.dim_single, out, 0.0, {n: op for n, op in g.components.items() if n <= out}
    )
    total = zero_sequence(g.dim_single, out)
    power = h
    for k in range(1, out + 1):
        total = seq_add(total, seq_scale(power, (-1.0) ** (k - 1) / k))
        if k < out:
            power = star_product(power, h, out_n_max=out)
            if not power.components:
                break
    return total


def shift_map(f: OperatorSequence, s: int) -> OperatorSequence:
    """Drop the first s particles into a frozen prefix.

    Component n of the result is component s+n of f on unchanged labels;
    component 0 is f_s itself, now an operator rather than a scalar.
    """
    if f.prefix:
        raise ValueError("sequence already carries a prefix")
    if s < 1:
        raise ValueError(f"shift size must be >= 1, got {s}")
    if s > f.n_max:
        raise ValueError(f"shift by {s} exceeds the cutoff {f.n_max}")
    comps = {n - s: op for n, op in f.components.items() if n >= s}
    return OperatorSequence(f.dim_single, f.n_max - s, 0.0, comps, s)


def cluster_shift_map(
    f: OperatorSequence, s: int, symmetrize_cluster: bool = False
) -> OperatorSequence:
    """Shift with the first s particles read as a single s-cluster unit.

    Componentwise this is shift_map; the cluster reading only changes how
    later maps treat the prefix.  With ``symmetrize_cluster`` each
    component is averaged over the internal orderings of the cluster.
    """
    out = shift_map(f, s)
    if not symmetrize_cluster or s == 1:
        return out
    comps = {}
    for n, op in out.components.items():
        total_slots = s + n
        acc = None
        for perm in itertools.permutations(range(s)):
            full = tuple(perm) + tuple(range(s, total_slots))
            term = permute_particles(op, full).matrix
            acc = term if acc is None else acc + term
        comps[n] = ManyBodyOperator(op.labels, op.dim_single, acc / factorial(s))
    return OperatorSequence(out.dim_single, out.n_max, 0.0, comps, s)


def annihilation_expand(f: OperatorSequence) -> OperatorSequence:
    """Aggregate of weighted partial traces.

    Component s of the result is sum over n of (1/n!) times f_{s+n} with
    its last n ordinary particles traced out.  On prefixed sequences only
    ordinary particles are traced and the prefix survives untouched.
    """
    p = f.prefix
    comps: dict[int, ManyBodyOperator] = {}
    scalar = f.scalar0
    lo = 0 if p else 1
    for s in range(lo, f.n_max + 1):
        acc = None
        for n in range(0, f.n_max - s + 1):
            if not f.has(s + n):
                continue
            op = f.components[s + n]
            traced = ParticleSet(_ordinary_labels(p, s + n)[s:])
            red = partial_trace(op, traced)
            term = red.matrix / factorial(n)
            acc = term if acc is None else acc + term
        if acc is not None:
            comps[s] = ManyBodyOperator(
                ParticleSet.range1(p + s), f.dim_single, acc
            )
    if p == 0:
        for n in range(1, f.n_max + 1):
            if f.has(n):
                scalar = scalar + f.components[n].trace / factorial(n)
    return OperatorSequence(f.dim_single, f.n_max, scalar, comps, p)


def product_reduction_residual(f: OperatorSequence, h: OperatorSequence) -> float:
    """Defect of the reduction scalar factorizing over a star product.

    The product is taken out to the full joint support so the identity is
    exact up to round-off.
    """
    full = star_product(f, h, out_n_max=f.n_max + h.n_max)
    lhs = annihilation_expand(full).scalar0
    rhs = annihilation_expand(f).scalar0 * annihilation_expand(h).scalar0
    return abs(lhs - rhs)


_NORM_FLOOR = 1e-12


def _cluster_argument_component(
    seq: OperatorSequence, s: int, n: int
) -> ManyBodyOperator:
    """Component of ``seq`` read with an s-cluster as its first argument.

    The 1+n units are the cluster (1..s) and the singletons s+1..s+n.
    Each partition of the units contributes its Mobius coefficient times
    the product of seq components over the block unions.  For s = 1 this
    is the ordinary logarithm-by-inversion of an exponential sequence.
    """
    units = [tuple(range(1, s + 1))] + [(s + j,) for j in range(1, n + 1)]
    acc = None
    for p in enumerate_partitions(ParticleSet.range1(1 + n)):
        parts = []
        dead = False
        for block in p.blocks:
            labels = ParticleSet.of(
                itertools.chain.from_iterable(units[i - 1] for i in block)
            )
            if not seq.has(len(labels)):
                dead = True
                break
            parts.append(relabel(seq.components[len(labels)], labels))
        if dead:
            continue
        term = tensor_product(parts).matrix * mobius_coefficient(p)
        acc = term if acc is None else acc + term
    if acc is None:
        return zero_operator(ParticleSet.range1(s + n), seq.dim_single)
    return ManyBodyOperator(ParticleSet.range1(s + n), seq.dim_single, acc)


def verify_lemma2(f: OperatorSequence, s: int, depth: int = 8) -> float:
    """Residual of the normalized-reduction identity for an s-cluster.

    The left side reduces the exponential of f with its first s particles
    frozen as one unit, normalized by the reduction scalar of the
    exponential.  The right side reduces the cluster-argument components
    of f, which are Mobius sums over partitions of the units (cluster
    plus singletons) of blockwise exponential components; for s = 1 they
    collapse back to f itself.  The exponential is evaluated out to
    ``depth`` components so the neglected tail sits far below the
    comparison floor for small-amplitude inputs.
    """
    if f.prefix or f.scalar0 != 0:
        raise ValueError("expects a plain sequence with zero scalar component")
    if s < 1 or s > f.n_max:
        raise ValueError(f"cluster size {s} outside [1, {f.n_max}]")
    big = star_exp(f, out_n_max=max(depth, f.n_max))
    denom = annihilation_expand(big).scalar0
    if abs(denom) < _NORM_FLOOR:
        raise NormalizationError(
            f"reduction scalar {denom} too small to normalize by"
        )
    num = annihilation_expand(cluster_shift_map(big, s)).component(0)
    # the plain shift of f is NOT its cluster reading once s >= 2: shifted
    # products would split the cluster across factors.  Build the cluster
    # components from the exponential instead.  Nonzero ones stop at
    # n = s*(f.n_max - 1): every block linking a singleton to the cluster
    # holds a cluster particle, and past that the Mobius sums cancel.
    n_hi = min(big.n_max - s, s * (f.n_max - 1))
    u_comps = {
        n: _cluster_argument_component(big, s, n) for n in range(0, n_hi + 1)
    }
    useq = OperatorSequence(big.dim_single, big.n_max - s, 0.0, u_comps, s)
    rhs = annihilation_expand(useq).component(0)
    return trace_norm(num / denom - rhs)


def verify_lemma3(f: OperatorSequence, depth: int = 8) -> float:
    """Residual of the exponential-reduction exchange identity.

    The normalized reduction of the exponential of f is compared against
    the exponential of the reduction of f (scalar part dropped; it is the
    normalization).  Componentwise up to f.n_max.
    """
    if f.prefix or f.scalar0 != 0:
        raise ValueError("expects a plain sequence with zero scalar component")
    big = star_exp(f, out_n_max=max(depth, f.n_max))
    lhs_all = annihilation_expand(big)
    denom = lhs_all.scalar0
    if abs(denom) < _NORM_FLOOR:
        raise NormalizationError(
            f"reduction scalar {denom} too small to normalize by"
        )
    red = annihilation_expand(f)
    red_centered = OperatorSequence(
        f.dim_single, f.n_max, 0.0,
        {n: op for n, op in red.components.items() if n <= f.n_max},
    )
    rhs = star_exp(red_centered, out_n_max=f.n_max)
    worst = 0.0
    for n in range(1, f.n_max + 1):
        worst = max(
            worst, trace_norm(lhs_all.component(n) / denom - rhs.component(n))
        )
    return worst
