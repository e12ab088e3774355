"""Seeded random systems, operators, and states.

Everything here is driven by an explicit integer seed through numpy's
Generator, so verification runs are reproducible bit for bit on the same
platform.  Hermitian draws follow the usual Gaussian-ensemble recipe
(B + B*)/2 and are then rescaled, symmetrized, or de-traced as requested.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .hamiltonian import SystemSpec
from .hierarchy import CorrelationState, DensityState
from .operators import (
    ManyBodyOperator,
    identity_operator,
    symmetrize,
    trace_norm,
)
from .partitions import ParticleSet
from .star_algebra import OperatorSequence


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed))


def random_hermitian(
    rng: np.random.Generator, dim: int, scale: float = 1.0
) -> np.ndarray:
    """Hermitian matrix with spectral radius equal to scale."""
    b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    a = (b + b.conj().T) / 2
    radius = float(np.max(np.abs(np.linalg.eigvalsh(a))))
    if radius == 0.0:  # pragma: no cover - measure-zero draw
        return a
    return a * (scale / radius)


def random_system(
    seed: int,
    dim_single: int = 2,
    orders: Iterable[int] = (2, 3),
    hbar: float = 1.0,
    scale: float = 1.0,
) -> SystemSpec:
    """A system with seeded Hermitian one-body term and k-body potentials.

    Potentials are symmetrized over particle permutations, as the model
    requires; scale bounds every spectral radius.
    """
    rng = rng_from_seed(seed)
    d = int(dim_single)
    one = random_hermitian(rng, d, scale)
    pots: dict[int, np.ndarray] = {}
    for k in sorted(set(int(k) for k in orders)):
        raw = random_hermitian(rng, d**k, scale)
        sym = symmetrize(ManyBodyOperator(ParticleSet.range1(k), d, raw))
        pots[k] = np.array(sym.matrix)
    return SystemSpec(d, one, pots, hbar)


def free_system(
    seed: int, dim_single: int = 2, hbar: float = 1.0, scale: float = 1.0
) -> SystemSpec:
    """A seeded system without any interaction potentials."""
    rng = rng_from_seed(seed)
    return SystemSpec(
        int(dim_single), random_hermitian(rng, int(dim_single), scale), {}, hbar
    )


def random_operator(
    rng: np.random.Generator,
    labels: ParticleSet,
    dim_single: int,
    norm: float = 1.0,
    hermitian: bool = True,
    traceless: bool = False,
    symmetric: bool = False,
) -> ManyBodyOperator:
    """Random operator with the requested structure and trace norm."""
    dim = dim_single ** len(labels)
    if hermitian:
        m = random_hermitian(rng, dim, 1.0)
    else:
        m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    op = ManyBodyOperator(labels, dim_single, m)
    if symmetric:
        op = symmetrize(op)
    if traceless:
        op = op - identity_operator(labels, dim_single) * (op.trace / dim)
    tn = trace_norm(op)
    if tn == 0.0:  # pragma: no cover - measure-zero draw
        return op
    return op * (norm / tn)


def _norm_for(norms, n: int) -> float:
    if isinstance(norms, (int, float)):
        return float(norms)
    return float(norms[n - 1])


def random_correlation_state(
    seed: int,
    dim_single: int,
    n_max: int,
    norms: float | Sequence[float] = 0.5,
    hermitian: bool = True,
    traceless: bool = False,
    symmetric: bool = False,
) -> CorrelationState:
    """Seeded correlation sequence with prescribed component trace norms."""
    rng = rng_from_seed(seed)
    comps = {}
    for n in range(1, n_max + 1):
        comps[n] = random_operator(
            rng,
            ParticleSet.range1(n),
            dim_single,
            norm=_norm_for(norms, n),
            hermitian=hermitian,
            traceless=traceless,
            symmetric=symmetric,
        )
    return CorrelationState(OperatorSequence(dim_single, n_max, 0.0, comps))


def random_density_state(
    seed: int,
    dim_single: int,
    n_max: int,
    trace_scale: float = 1.0,
) -> DensityState:
    """Seeded physical density sequence: each component positive and symmetric.

    Component n is a symmetrized Gram matrix rescaled so its trace equals
    trace_scale^n, a finite stand-in for grand-canonical weighting.
    """
    rng = rng_from_seed(seed)
    comps = {}
    for n in range(1, n_max + 1):
        dim = dim_single**n
        c = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        m = c @ c.conj().T
        op = symmetrize(ManyBodyOperator(ParticleSet.range1(n), dim_single, m))
        tr = op.trace.real
        comps[n] = op * (trace_scale**n / tr)
    return DensityState(OperatorSequence(dim_single, n_max, 1.0, comps))


def random_sequence(
    seed: int,
    dim_single: int,
    n_max: int,
    norms: float | Sequence[float] = 0.5,
    hermitian: bool = True,
) -> OperatorSequence:
    """Seeded plain sequence with zero scalar component."""
    return random_correlation_state(
        seed, dim_single, n_max, norms=norms, hermitian=hermitian
    ).seq


def chaos_one_particle(
    seed: int, dim_single: int, norm: float = 1.0, hermitian: bool = True
) -> ManyBodyOperator:
    """Seeded one-particle component for independent initial data."""
    rng = rng_from_seed(seed)
    return random_operator(
        rng, ParticleSet.range1(1), dim_single, norm=norm, hermitian=hermitian
    )
