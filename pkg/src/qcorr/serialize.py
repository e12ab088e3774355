"""JSON codecs and schemas for operators, sequences, systems, and scenarios.

Conventions
-----------
* A complex number is a two-element array [re, im].
* A raw matrix is an array of rows, each row an array of [re, im] pairs.
* An operator adds {labels, dim_single} around its raw matrix.
* A sequence stores components as an array indexed by n-1 (null = absent).
* A system is either explicit {dim_single, hbar, one_body, potentials}
  or a preset {"preset": "random_hermitian", "seed": ..., "orders": [...]}.

All dumps go through dumps_canonical so that reruns produce identical bytes.
"""

from __future__ import annotations

import json
from typing import Any

import jsonschema
import numpy as np

from .errors import SchemaViolation
from .hamiltonian import SystemSpec
from .operators import ManyBodyOperator
from .partitions import ParticleSet
from .star_algebra import OperatorSequence

_COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

_RAW_MATRIX = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": _COMPLEX},
}

OPERATOR_SCHEMA = {
    "type": "object",
    "required": ["labels", "dim_single", "matrix"],
    "additionalProperties": False,
    "properties": {
        "labels": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
            "minItems": 1,
        },
        "dim_single": {"type": "integer", "minimum": 2},
        "matrix": _RAW_MATRIX,
    },
}

SEQUENCE_SCHEMA = {
    "type": "object",
    "required": ["dim_single", "n_max", "scalar0", "components"],
    "additionalProperties": False,
    "properties": {
        "kind": {"type": "string", "enum": ["correlation", "density", "marginal"]},
        "dim_single": {"type": "integer", "minimum": 2},
        "n_max": {"type": "integer", "minimum": 1},
        "scalar0": _COMPLEX,
        "components": {
            "type": "array",
            "items": {"oneOf": [{"type": "null"}, _RAW_MATRIX]},
        },
    },
}

_SYSTEM_EXPLICIT = {
    "type": "object",
    "required": ["dim_single", "one_body"],
    "additionalProperties": False,
    "properties": {
        "dim_single": {"type": "integer", "minimum": 2},
        "hbar": {"type": "number", "exclusiveMinimum": 0},
        "one_body": _RAW_MATRIX,
        "potentials": {
            "type": "object",
            "additionalProperties": False,
            "patternProperties": {"^[2-9]$": _RAW_MATRIX},
        },
    },
}

_SYSTEM_PRESET = {
    "type": "object",
    "required": ["preset", "seed"],
    "additionalProperties": False,
    "properties": {
        "preset": {"type": "string", "enum": ["random_hermitian"]},
        "seed": {"type": "integer", "minimum": 0},
        "orders": {
            "type": "array",
            "items": {"type": "integer", "minimum": 2},
            "minItems": 1,
        },
        "dim_single": {"type": "integer", "minimum": 2},
        "hbar": {"type": "number", "exclusiveMinimum": 0},
        "scale": {"type": "number", "exclusiveMinimum": 0},
    },
}

SYSTEM_SCHEMA = {"oneOf": [_SYSTEM_EXPLICIT, _SYSTEM_PRESET]}

_INITIAL_PRESET = {
    "type": "object",
    "required": ["preset", "seed"],
    "additionalProperties": False,
    "properties": {
        "preset": {
            "type": "string",
            "enum": ["random_correlation", "random_density", "chaos"],
        },
        "seed": {"type": "integer", "minimum": 0},
        "norms": {
            "oneOf": [
                {"type": "number", "exclusiveMinimum": 0},
                {
                    "type": "array",
                    "items": {"type": "number", "exclusiveMinimum": 0},
                    "minItems": 1,
                },
            ]
        },
        "trace_scale": {"type": "number", "exclusiveMinimum": 0},
        "traceless": {"type": "boolean"},
        "symmetric": {"type": "boolean"},
    },
}

INITIAL_SCHEMA = {
    "type": "object",
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
    "properties": {
        "correlation": SEQUENCE_SCHEMA,
        "density": SEQUENCE_SCHEMA,
        "chaos": OPERATOR_SCHEMA,
        "preset": _INITIAL_PRESET,
    },
}

QUADRATURE_SCHEMA = {
    "type": "object",
    "required": ["order", "nodes_per_dim", "rule"],
    "additionalProperties": False,
    "properties": {
        "order": {"type": "integer", "minimum": 0, "maximum": 3},
        "nodes_per_dim": {"type": "integer", "minimum": 4, "maximum": 64},
        "rule": {
            "type": "string",
            "enum": ["gauss-legendre-simplex", "nested-trapezoid"],
        },
    },
}

_TASK_PATTERN = "^(evolve|hierarchy|chaos|bbgky|iterate|observables|verify:[a-z-]+)$"

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["system", "initial", "times", "tasks", "n_max"],
    "additionalProperties": False,
    "properties": {
        "system": SYSTEM_SCHEMA,
        "initial": INITIAL_SCHEMA,
        "times": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 1,
        },
        "tasks": {
            "type": "array",
            "items": {"type": "string", "pattern": _TASK_PATTERN},
            "minItems": 1,
        },
        "n_max": {"type": "integer", "minimum": 1},
        "s_values": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
            "minItems": 1,
        },
        "quadrature": QUADRATURE_SCHEMA,
        "observable": _RAW_MATRIX,
        "tolerances": {
            "type": "object",
            "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "format": {"type": "string", "enum": ["json", "csv", "both"]},
            },
        },
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["suite", "checks", "passed"],
    "additionalProperties": True,
    "properties": {
        "suite": {"type": "string"},
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "law", "residual", "tolerance", "pass"],
                "properties": {
                    "name": {"type": "string"},
                    "law": {"type": "string"},
                    "residual": {"type": "number"},
                    "tolerance": {"type": "number"},
                    "pass": {"type": "boolean"},
                },
            },
        },
    },
}

ALL_SCHEMAS = {
    "operator": OPERATOR_SCHEMA,
    "sequence": SEQUENCE_SCHEMA,
    "system": SYSTEM_SCHEMA,
    "scenario": SCENARIO_SCHEMA,
    "quadrature": QUADRATURE_SCHEMA,
    "report": REPORT_SCHEMA,
}


def validate(obj: Any, schema: dict, what: str = "document") -> None:
    """Validate obj against schema, raising SchemaViolation on failure."""
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise SchemaViolation(f"{what} at '{path}': {exc.message}") from exc


def dumps_canonical(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, newline end."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def encode_raw_matrix(m: np.ndarray) -> list:
    a = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_raw_matrix(rows) -> np.ndarray:
    a = np.array(
        [[complex(e[0], e[1]) for e in row] for row in rows], dtype=complex
    )
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SchemaViolation(f"matrix must be square, got shape {a.shape}")
    return a


def encode_operator(op: ManyBodyOperator) -> dict:
    return {
        "labels": list(op.labels),
        "dim_single": op.dim_single,
        "matrix": encode_raw_matrix(op.matrix),
    }


def decode_operator(obj: dict) -> ManyBodyOperator:
    validate(obj, OPERATOR_SCHEMA, "operator")
    labels = ParticleSet.of(obj["labels"])
    d = int(obj["dim_single"])
    m = decode_raw_matrix(obj["matrix"])
    want = d ** len(labels)
    if m.shape != (want, want):
        raise SchemaViolation(
            f"operator matrix is {m.shape[0]}x{m.shape[1]}, "
            f"labels and dim_single require {want}x{want}"
        )
    return ManyBodyOperator(labels, d, m)


def encode_sequence(seq: OperatorSequence, kind: str | None = None) -> dict:
    if seq.prefix:
        raise ValueError("only plain sequences are serialized")
    out = {
        "dim_single": seq.dim_single,
        "n_max": seq.n_max,
        "scalar0": encode_complex(seq.scalar0),
        "components": [
            encode_raw_matrix(seq.components[n].matrix)
            if n in seq.components
            else None
            for n in range(1, seq.n_max + 1)
        ],
    }
    if kind is not None:
        out["kind"] = kind
    return out


def decode_sequence(obj: dict) -> OperatorSequence:
    validate(obj, SEQUENCE_SCHEMA, "sequence")
    d = int(obj["dim_single"])
    n_max = int(obj["n_max"])
    rows = obj["components"]
    if len(rows) > n_max:
        raise SchemaViolation(
            f"sequence lists {len(rows)} components but n_max is {n_max}"
        )
    comps = {}
    for i, entry in enumerate(rows):
        if entry is None:
            continue
        n = i + 1
        m = decode_raw_matrix(entry)
        want = d**n
        if m.shape != (want, want):
            raise SchemaViolation(
                f"component {n} is {m.shape[0]}x{m.shape[1]}, "
                f"expected {want}x{want}"
            )
        comps[n] = ManyBodyOperator(ParticleSet.range1(n), d, m)
    return OperatorSequence(d, n_max, decode_complex(obj["scalar0"]), comps)


def encode_system(spec: SystemSpec) -> dict:
    return {
        "dim_single": spec.dim_single,
        "hbar": spec.hbar,
        "one_body": encode_raw_matrix(spec.one_body),
        "potentials": {
            str(k): encode_raw_matrix(v) for k, v in sorted(spec.potentials.items())
        },
    }


def decode_system(obj: dict) -> SystemSpec:
    validate(obj, SYSTEM_SCHEMA, "system")
    if "preset" in obj:
        from .presets import random_system

        return random_system(
            int(obj["seed"]),
            dim_single=int(obj.get("dim_single", 2)),
            orders=tuple(obj.get("orders", [2])),
            hbar=float(obj.get("hbar", 1.0)),
            scale=float(obj.get("scale", 1.0)),
        )
    d = int(obj["dim_single"])
    one = decode_raw_matrix(obj["one_body"])
    if one.shape != (d, d):
        raise SchemaViolation(
            f"one_body is {one.shape[0]}x{one.shape[1]}, expected {d}x{d}"
        )
    pots = {}
    for key, rows in obj.get("potentials", {}).items():
        k = int(key)
        m = decode_raw_matrix(rows)
        want = d**k
        if m.shape != (want, want):
            raise SchemaViolation(
                f"potential of order {k} is {m.shape[0]}x{m.shape[1]}, "
                f"expected {want}x{want}"
            )
        pots[k] = m
    try:
        return SystemSpec(d, one, pots, float(obj.get("hbar", 1.0)))
    except ValueError as exc:
        raise SchemaViolation(str(exc)) from exc
