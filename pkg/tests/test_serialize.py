"""JSON codec roundtrips and schema rejection paths."""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcorr.errors import SchemaViolation
from qcorr.operators import ManyBodyOperator
from qcorr.partitions import ParticleSet
from qcorr.presets import random_correlation_state, random_system, rng_from_seed
from qcorr.serialize import (
    ALL_SCHEMAS,
    SCENARIO_SCHEMA,
    decode_complex,
    decode_operator,
    decode_raw_matrix,
    decode_sequence,
    decode_system,
    dumps_canonical,
    encode_complex,
    encode_operator,
    encode_raw_matrix,
    encode_sequence,
    encode_system,
    validate,
)
from qcorr.star_algebra import OperatorSequence

finite = st.floats(allow_nan=False, allow_infinity=False, width=32)


def test_complex_encoding_shape():
    assert encode_complex(1.5 - 2j) == [1.5, -2.0]
    assert decode_complex([0.25, 3.0]) == 0.25 + 3j


@given(finite, finite)
def test_complex_roundtrip(re, im):
    z = complex(re, im)
    assert decode_complex(encode_complex(z)) == z


def test_raw_matrix_roundtrip():
    rng = rng_from_seed(10)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    back = decode_raw_matrix(encode_raw_matrix(m))
    assert np.array_equal(back, m)


def test_raw_matrix_must_be_square():
    rows = [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0]] * 3]
    with pytest.raises(SchemaViolation):
        decode_raw_matrix(rows)


# ---------------------------------------------------------------------------
# operators


def test_operator_roundtrip_keeps_labels():
    rng = rng_from_seed(11)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    op = ManyBodyOperator(ParticleSet((2, 5)), 2, m)
    back = decode_operator(encode_operator(op))
    assert back.labels == op.labels
    assert back.dim_single == 2
    assert np.array_equal(back.matrix, op.matrix)


def test_operator_schema_rejects_missing_field():
    obj = encode_operator(
        ManyBodyOperator(ParticleSet.range1(1), 2, np.eye(2, dtype=complex))
    )
    del obj["labels"]
    with pytest.raises(SchemaViolation):
        decode_operator(obj)


def test_operator_matrix_size_must_match_labels():
    obj = {
        "labels": [1, 2],
        "dim_single": 2,
        "matrix": encode_raw_matrix(np.eye(2)),
    }
    with pytest.raises(SchemaViolation, match="require"):
        decode_operator(obj)


def test_operator_schema_rejects_bad_label():
    obj = {
        "labels": [0],
        "dim_single": 2,
        "matrix": encode_raw_matrix(np.eye(2)),
    }
    with pytest.raises(SchemaViolation):
        decode_operator(obj)


# ---------------------------------------------------------------------------
# sequences


def test_sequence_roundtrip_with_gap():
    g = random_correlation_state(12, 2, 3).seq
    gapped = OperatorSequence(
        2, 3, g.scalar0, {n: g.components[n] for n in (1, 3)}
    )
    obj = encode_sequence(gapped, kind="correlation")
    assert obj["components"][1] is None
    assert obj["kind"] == "correlation"
    back = decode_sequence(obj)
    assert back.n_max == 3
    assert back.support == (1, 3)
    for n in (1, 3):
        assert np.array_equal(back.components[n].matrix, gapped.components[n].matrix)


def test_sequence_scalar_preserved():
    op = ManyBodyOperator(ParticleSet.range1(1), 2, np.eye(2, dtype=complex))
    seq = OperatorSequence(2, 1, 0.5 - 0.25j, {1: op})
    back = decode_sequence(encode_sequence(seq))
    assert back.scalar0 == 0.5 - 0.25j


def test_prefixed_sequence_not_serialized():
    op = ManyBodyOperator(ParticleSet.range1(1), 2, np.eye(2, dtype=complex))
    seq = OperatorSequence(2, 2, 0.0, {0: op}, 1)
    with pytest.raises(ValueError):
        encode_sequence(seq)


def test_sequence_component_count_capped():
    obj = encode_sequence(random_correlation_state(13, 2, 2).seq)
    obj["n_max"] = 1
    with pytest.raises(SchemaViolation, match="n_max"):
        decode_sequence(obj)


def test_sequence_component_size_checked():
    obj = encode_sequence(random_correlation_state(14, 2, 2).seq)
    obj["components"][1] = obj["components"][0]
    with pytest.raises(SchemaViolation, match="component 2"):
        decode_sequence(obj)


# ---------------------------------------------------------------------------
# systems


def test_system_roundtrip_explicit():
    spec = random_system(15, dim_single=2, orders=(2, 3), hbar=0.5)
    back = decode_system(encode_system(spec))
    assert back.dim_single == 2
    assert back.hbar == 0.5
    assert np.array_equal(back.one_body, spec.one_body)
    assert set(back.potentials) == {2, 3}
    for k in (2, 3):
        assert np.array_equal(back.potentials[k], spec.potentials[k])


def test_system_preset_path():
    obj = {"preset": "random_hermitian", "seed": 7, "orders": [2, 3]}
    got = decode_system(obj)
    want = random_system(7, dim_single=2, orders=(2, 3))
    assert np.array_equal(got.one_body, want.one_body)
    assert np.array_equal(got.potentials[3], want.potentials[3])


def test_system_one_body_size_checked():
    obj = {"dim_single": 2, "one_body": encode_raw_matrix(np.eye(3))}
    with pytest.raises(SchemaViolation, match="one_body"):
        decode_system(obj)


def test_system_potential_size_checked():
    obj = {
        "dim_single": 2,
        "one_body": encode_raw_matrix(np.eye(2)),
        "potentials": {"2": encode_raw_matrix(np.eye(2))},
    }
    with pytest.raises(SchemaViolation, match="order 2"):
        decode_system(obj)


def test_system_constructor_errors_become_schema_violations():
    # valid JSON shape, but the one-body matrix is not Hermitian
    bad = np.array([[0.0, 1.0], [0.0, 0.0]])
    obj = {"dim_single": 2, "one_body": encode_raw_matrix(bad)}
    with pytest.raises(SchemaViolation):
        decode_system(obj)


# ---------------------------------------------------------------------------
# canonical text


def test_dumps_canonical_is_order_insensitive():
    a = dumps_canonical({"b": 1, "a": [1, 2]})
    b = dumps_canonical({"a": [1, 2], "b": 1})
    assert a == b
    assert a.endswith("\n")
    assert json.loads(a) == {"a": [1, 2], "b": 1}


def test_dumps_canonical_rejects_nan():
    with pytest.raises(ValueError):
        dumps_canonical({"x": float("nan")})


def test_dumps_canonical_stable_bytes():
    spec = random_system(16, dim_single=2, orders=(2,))
    assert dumps_canonical(encode_system(spec)) == dumps_canonical(
        encode_system(spec)
    )


# ---------------------------------------------------------------------------
# scenario schema


def _minimal_scenario():
    return {
        "system": {"preset": "random_hermitian", "seed": 1, "orders": [2]},
        "initial": {"preset": {"preset": "random_correlation", "seed": 2}},
        "times": [0.1],
        "tasks": ["evolve"],
        "n_max": 2,
    }


def test_scenario_minimal_passes():
    validate(_minimal_scenario(), SCENARIO_SCHEMA, "scenario")


def test_scenario_rejects_unknown_task():
    sc = _minimal_scenario()
    sc["tasks"] = ["simulate"]
    with pytest.raises(SchemaViolation, match="tasks/0"):
        validate(sc, SCENARIO_SCHEMA, "scenario")


def test_scenario_requires_exactly_one_initial():
    sc = _minimal_scenario()
    sc["initial"] = {}
    with pytest.raises(SchemaViolation):
        validate(sc, SCENARIO_SCHEMA, "scenario")
    sc["initial"] = {
        "preset": {"preset": "random_correlation", "seed": 2},
        "chaos": encode_operator(
            ManyBodyOperator(ParticleSet.range1(1), 2, np.eye(2, dtype=complex))
        ),
    }
    with pytest.raises(SchemaViolation):
        validate(sc, SCENARIO_SCHEMA, "scenario")


def test_scenario_rejects_unknown_key():
    sc = _minimal_scenario()
    sc["extra"] = True
    with pytest.raises(SchemaViolation):
        validate(sc, SCENARIO_SCHEMA, "scenario")


def test_violation_message_carries_path():
    sc = _minimal_scenario()
    sc["times"] = []
    with pytest.raises(SchemaViolation, match="'times'"):
        validate(sc, SCENARIO_SCHEMA, "scenario")


def test_schema_registry_names():
    assert set(ALL_SCHEMAS) == {
        "operator",
        "sequence",
        "system",
        "scenario",
        "quadrature",
        "report",
    }
