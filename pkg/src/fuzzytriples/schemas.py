"""JSON schemas for the machine-readable outputs, plus the flat CSV encoding
used by ``--format csv``.

The CSV form has two columns, ``field`` and ``value``: one row per leaf of the
JSON payload, with ``field`` a dotted path (list positions are integers) and
``value`` the JSON encoding of the leaf. ``csv_to_payload`` inverts it.
"""

from __future__ import annotations

import csv
import io
import json
import math

import jsonschema

_num_or_null = {"type": ["number", "null"]}
_int = {"type": "integer"}

MATRIX = {
    "type": "array",
    "items": {"type": "array", "items": {
        "type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
}

MODULE = {
    "type": "object",
    "required": ["p", "q", "s", "dim_v", "gammas", "chirality", "real_structure", "signs"],
    "properties": {
        "p": {"type": "integer", "minimum": 0},
        "q": {"type": "integer", "minimum": 0},
        "s": {"type": "integer", "minimum": 0, "maximum": 7},
        "dim_v": {"type": "integer", "minimum": 1},
        "gammas": {"type": "array", "items": MATRIX},
        "chirality": MATRIX,
        "real_structure": MATRIX,
        "signs": {"type": "array", "items": {"enum": [-1, 1]}, "minItems": 3, "maxItems": 3},
    },
}

CHECK = {
    "type": "object",
    "required": ["name", "description", "pass", "max_deviation"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "pass": {"type": "boolean"},
        "max_deviation": _num_or_null,
        "id": _int,
    },
}

REPORT = {
    "type": "object",
    "required": ["pass", "checks"],
    "properties": {"pass": {"type": "boolean"}, "checks": {"type": "array", "items": CHECK}},
}

AXIOM_REPORT = {
    "allOf": [REPORT, {
        "properties": {"checks": {
            "type": "array", "minItems": 13, "maxItems": 13,
            "items": {"required": ["id"], "properties": {
                "id": {"type": "integer", "minimum": 1, "maximum": 13}}},
        }},
    }],
}

_value = {"oneOf": [{"type": "number"}, {"type": "string"}]}

SPECTRUM = {
    "type": "object",
    "required": ["kind", "entries", "total_dim"],
    "properties": {
        "kind": {"type": "string"},
        "entries": {"type": "array", "items": {
            "type": "object", "required": ["value", "multiplicity"],
            "properties": {"value": _value, "multiplicity": {"type": "integer", "minimum": 1}},
        }},
        "total_dim": {"type": "integer", "minimum": 0},
        "type": {"type": "array", "items": _int, "minItems": 2, "maxItems": 2},
        "n": {"oneOf": [_int, {"type": "array", "items": _int, "minItems": 2, "maxItems": 2}]},
    },
}

ESTIMATE = {
    "type": "object",
    "required": ["mean", "stderr", "n_eff"],
    "properties": {"mean": _num_or_null, "stderr": _num_or_null, "n_eff": _num_or_null},
}

ESTIMATE_REPORT = {
    "type": "object",
    "required": ["estimates", "acceptance_rate", "step_size", "steps", "burn_in", "seed",
                 "chains", "flags"],
    "properties": {
        "estimates": {"type": "object", "additionalProperties": ESTIMATE,
                      "required": ["tr_d2", "tr_d4", "min_abs_eig", "x2"]},
        "acceptance_rate": {"type": "number", "minimum": 0, "maximum": 1},
        "step_size": {"type": "number"},
        "steps": _int,
        "burn_in": _int,
        "seed": _int,
        "chains": {"type": "integer", "minimum": 1},
        "coeff_means": {"type": "array", "items": _num_or_null},
        "coeff_stderr": {"type": "array", "items": _num_or_null},
        "variance_ratio": {"type": "object", "additionalProperties": _num_or_null},
        "histogram": {"type": "object"},
        "flags": {"type": "array", "items": {"type": "string"}},
        "axiom_spot_checks": _int,
    },
}

_pair = {"type": "array", "items": _int, "minItems": 2, "maxItems": 2}

COMMANDS = {
    "gamma": {
        "type": "object",
        "required": ["command", "pass", "module"],
        "properties": {
            "command": {"const": "gamma"},
            "pass": {"type": "boolean"},
            "module": MODULE,
            "verification": {"oneOf": [REPORT, {"type": "null"}]},
        },
    },
    "sphere": {
        "type": "object",
        "required": ["command", "type", "n", "predicted", "computed", "verdict"],
        "properties": {
            "command": {"const": "sphere"},
            "type": _pair,
            "n": {"oneOf": [_int, _pair]},
            "operator": {"enum": ["D", "D1"]},
            "predicted": SPECTRUM,
            "computed": {"oneOf": [SPECTRUM, {"type": "null"}]},
            "computed_d2": {"oneOf": [SPECTRUM, {"type": "null"}]},
            "max_value_deviation": _num_or_null,
            "verdict": {"enum": ["MATCH", "MISMATCH", "PREDICTED"]},
        },
    },
    "axioms": {
        "type": "object",
        "required": ["command", "type", "s", "hilbert_dim", "dirac", "axioms", "theta", "pass"],
        "properties": {
            "command": {"const": "axioms"},
            "type": _pair,
            "s": _int,
            "n": {"oneOf": [_int, _pair]},
            "hilbert_dim": _int,
            "dirac": {"enum": ["zero", "sphere", "random"]},
            "seed": {"type": ["integer", "null"]},
            "dim_g": {"type": ["integer", "null"]},
            "axioms": AXIOM_REPORT,
            "theta": REPORT,
            "pass": {"type": "boolean"},
        },
    },
    "sample": {
        "type": "object",
        "required": ["command", "type", "n", "dim_g", "action", "report"],
        "properties": {
            "command": {"const": "sample"},
            "type": _pair,
            "n": _int,
            "dim_g": {"type": "integer", "minimum": 1},
            "action": {"type": "object"},
            "analytic": {"type": ["object", "null"]},
            "report": ESTIMATE_REPORT,
            "out": {"type": ["string", "null"]},
        },
    },
}

SCHEMAS = {
    "module": MODULE,
    "report": REPORT,
    "axiom_report": AXIOM_REPORT,
    "spectrum": SPECTRUM,
    "estimate_report": ESTIMATE_REPORT,
    **{f"cmd_{k}": v for k, v in COMMANDS.items()},
}


def validate(kind: str, payload) -> None:
    """Raise jsonschema.ValidationError unless ``payload`` fits schema ``kind``."""
    jsonschema.validate(payload, SCHEMAS[kind])


def sanitize(obj):
    """Replace non-finite floats by None so the payload is strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    return obj


def _leaves(obj, prefix=""):
    if isinstance(obj, dict) and obj:
        for k, v in obj.items():
            if "." in str(k):
                raise ValueError(f"key {k!r} contains a dot")
            yield from _leaves(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj:
        for i, v in enumerate(obj):
            yield from _leaves(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def payload_to_csv(payload) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    for path, leaf in _leaves(payload):
        w.writerow([path, json.dumps(leaf)])
    return buf.getvalue()


def _insert(root, parts, value):
    node = root
    for i, part in enumerate(parts):
        last = i == len(parts) - 1
        nxt = None if last else ([] if parts[i + 1].isdigit() else {})
        if isinstance(node, list):
            idx = int(part)
            while len(node) <= idx:
                node.append(None)
            if last:
                node[idx] = value
            elif node[idx] is None:
                node[idx] = nxt
            node = node[idx] if not last else node
        else:
            if last:
                node[part] = value
            else:
                node = node.setdefault(part, nxt)


def csv_to_payload(text: str):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["field", "value"]:
        raise ValueError("not a field,value CSV")
    root: dict = {}
    for path, raw in rows[1:]:
        _insert(root, path.split("."), json.loads(raw))
    return root
