"""Unitary one-parameter groups and their conjugation action on operators.

The propagator is computed by Hermitian eigendecomposition, so unitarity
is exact up to round-off and any time is reachable in one shot.  The
spectral data is cached per (system, label set): cumulant sums revisit the
same groups across many partitions, and must not pay for repeated
eigendecompositions.

Time convention: ``unitary_matrix(ug, t)`` is exp(-(i/hbar) t H), and
``group_apply(ug, t, f)`` conjugates f with it.  The t-derivative of
``group_apply`` at 0 is therefore exactly ``liouvillian_apply``, the RHS
generator of module hamiltonian.
"""

from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass

import numpy as np

from .hamiltonian import SystemSpec, build_hamiltonian
from .operators import ManyBodyOperator, tensor_product
from .partitions import ClusterSet, ParticleSet


@dataclass(frozen=True, eq=False)
class UnitaryGroup:
    """Spectral data of H on a label set, ready to exponentiate at any t."""

    labels: ParticleSet
    dim_single: int
    hbar: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        v = self.eigenvectors
        dev = np.linalg.norm(v.conj().T @ v - np.eye(v.shape[0]))
        if dev > 1e-10 * max(1.0, v.shape[0]):
            raise ArithmeticError(f"eigenvector matrix not unitary, deviation {dev}")


_CACHE: "weakref.WeakKeyDictionary[SystemSpec, dict]" = weakref.WeakKeyDictionary()
_CACHE_LOCK = threading.Lock()


def make_unitary_group(spec: SystemSpec, labels: ParticleSet) -> UnitaryGroup:
    """Diagonalize H on the labels, reusing cached spectral data per spec."""
    with _CACHE_LOCK:
        per_spec = _CACHE.setdefault(spec, {})
        cached = per_spec.get(labels.labels)
    if cached is not None:
        return cached
    h = build_hamiltonian(spec, labels)
    try:
        lam, v = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numeric corner
        raise ArithmeticError(f"eigendecomposition failed: {exc}") from exc
    ug = UnitaryGroup(labels, spec.dim_single, spec.hbar, lam, v)
    with _CACHE_LOCK:
        per_spec = _CACHE.setdefault(spec, {})
        per_spec.setdefault(labels.labels, ug)
        return per_spec[labels.labels]


def unitary_matrix(ug: UnitaryGroup, t: float) -> np.ndarray:
    """exp(-(i/hbar) t H) from the cached spectral data."""
    phases = np.exp(-1j * t / ug.hbar * ug.eigenvalues)
    return (ug.eigenvectors * phases) @ ug.eigenvectors.conj().T


def group_apply(ug: UnitaryGroup, t: float, f: ManyBodyOperator) -> ManyBodyOperator:
    """Conjugate f with the propagator at time t.

    t = 0 returns the operand unchanged, keeping zero-time identities exact.
    """
    if f.labels != ug.labels or f.dim_single != ug.dim_single:
        raise ValueError(f"group on {ug.labels} cannot act on {f.labels}")
    if t == 0.0:
        return f
    u = unitary_matrix(ug, t)
    return ManyBodyOperator(f.labels, f.dim_single, u @ f.matrix @ u.conj().T)


def group_apply_on_subsets(
    spec: SystemSpec, t: float, blocks: ClusterSet, f: ManyBodyOperator
) -> ManyBodyOperator:
    """Apply the blockwise product of propagators to f.

    Each block evolves under its own Hamiltonian; the conjugating unitary is
    the tensor product of the per-block propagators embedded into f.labels.
    """
    if blocks.union != f.labels:
        raise ValueError(
            f"blocks cover {blocks.union} but the operand lives on {f.labels}"
        )
    if t == 0.0:
        return f
    if len(blocks) == 1:
        return group_apply(make_unitary_group(spec, f.labels), t, f)
    factors = []
    for block in blocks:
        ug = make_unitary_group(spec, block)
        factors.append(ManyBodyOperator(block, spec.dim_single, unitary_matrix(ug, t)))
    w = tensor_product(factors)
    return ManyBodyOperator(
        f.labels, f.dim_single, w.matrix @ f.matrix @ w.matrix.conj().T
    )


def evolve_density_sequence(spec: SystemSpec, d0, t: float):
    """Componentwise conjugation of a plain operator sequence.

    Component n evolves under the n-particle propagator; the scalar
    component is unchanged.  Accepts and returns an OperatorSequence.
    """
    from .star_algebra import OperatorSequence

    if not isinstance(d0, OperatorSequence):
        raise TypeError("evolve_density_sequence expects an OperatorSequence")
    if d0.prefix != 0:
        raise ValueError("cannot evolve a prefixed sequence")
    comps = {}
    for n, op in d0.components.items():
        ug = make_unitary_group(spec, op.labels)
        comps[n] = group_apply(ug, t, op)
    return OperatorSequence(
        dim_single=d0.dim_single,
        n_max=d0.n_max,
        scalar0=d0.scalar0,
        components=comps,
    )
