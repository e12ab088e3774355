"""Propagator groups and their cumulants.

The cumulant of order m is the signed partition combination of propagators
over m clusters.  It vanishes identically when the clusters do not interact:
at t = 0, for interaction-free systems, and in the limit of far-separated
dynamics.  What survives is exactly the correlated part of the evolution.
"""

from qcorr.cumulants import (
    CumulantRequest,
    cumulant_apply,
    cumulant_vanishes_free,
    recover_group_from_cumulants,
    scattering_operator_apply,
)
from qcorr.evolution import group_apply, make_unitary_group
from qcorr.operators import trace_norm
from qcorr.partitions import ClusterSet, ParticleSet
from qcorr.presets import free_system, random_correlation_state, random_system

spec = random_system(21, dim_single=2, orders=(2, 3))
labels = ParticleSet.range1(3)
f = random_correlation_state(22, 2, 3, norms=1.0).seq.components[3]

# a fully clustered cumulant is just the propagator conjugation
onecluster = CumulantRequest(ClusterSet.of([(1, 2, 3)]), 0.6)
ug = make_unitary_group(spec, labels)
print("single cluster = plain propagation:",
      f"{trace_norm(cumulant_apply(spec, onecluster, f) - group_apply(ug, 0.6, f)):.2e}")

# three singleton clusters: zero at t=0, grows with the interaction time
req0 = CumulantRequest(ClusterSet.singletons(labels), 0.0)
print("three clusters at t=0:", trace_norm(cumulant_apply(spec, req0, f)))
for t in (0.1, 0.5, 1.5):
    req = CumulantRequest(ClusterSet.singletons(labels), t)
    print(f"  t={t:<4} cumulant size {trace_norm(cumulant_apply(spec, req, f)):.4f}")

# no potentials, no correlated evolution
fspec = free_system(23, dim_single=2)
print("free system, order 3, t=1.0:",
      f"{cumulant_vanishes_free(fspec, 3, f, 1.0):.2e}")

# the inversion: summing products of cumulants over partitions rebuilds
# the full propagator conjugation
t = 0.8
rebuilt = recover_group_from_cumulants(spec, t, labels, f)
print("group recovered from cumulants:",
      f"{trace_norm(rebuilt - group_apply(ug, t, f)):.2e}")

# scattering operators compose the interacting forward flow with free
# backward flows; they generate the same cumulant hierarchy shifted by
# the free reference
g = random_correlation_state(24, 2, 2, norms=1.0).seq.components[2]
pair = ParticleSet.range1(2)
print("scattering conjugation is norm preserving:",
      f"{abs(trace_norm(scattering_operator_apply(spec, 1.2, pair, g)) - trace_norm(g)):.2e}")
