import json
from typing import Any, Dict, List, Optional

import jsonschema

from ..core.exact_arith import rational_text
from ..core.models import (BasisSpec, CompatibilityReport, ExpansionTable, ReductionResult,
                           VerificationReport)
from ..core.ore import OreOp
from .operator_syntax import operator_document

SCHEMA_VERSION = 1

_RATIONAL = {"type": "string", "pattern": r"^-?\d+/\d+$"}

_OPERATOR = {
    "type": "object",
    "properties": {
        "variable": {"type": "string"},
        "text": {"type": "string"},
        "order": {"type": ["integer", "null"]},
        "low": {"type": ["integer", "null"]},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "shift": {"type": "integer"},
                    "coefficient": {"type": "string"},
                    "numerator": {"type": "array", "items": _RATIONAL},
                    "denominator": {"type": "array", "items": _RATIONAL}
                },
                "required": ["shift", "coefficient", "numerator", "denominator"]
            }
        }
    },
    "required": ["variable", "text", "order", "terms"]
}

_BASIS = {
    "type": "object",
    "properties": {
        "m": {"type": "integer", "minimum": 1},
        "a": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "b": {"type": "array", "items": _RATIONAL}
    },
    "required": ["m", "a", "b"]
}


def _envelope(kind: str, properties: Dict[str, Any], required: List[str]) -> Dict[str, Any]:
    return {
        "type": "object",
        "properties": {
            "schema": {"const": SCHEMA_VERSION},
            "kind": {"const": kind},
            **properties
        },
        "required": ["schema", "kind", *required]
    }


SCHEMAS: Dict[str, Dict[str, Any]] = {
    "reduction": _envelope("reduction", {
        "basis": _BASIS,
        "operator": _OPERATOR,
        "lprime": _OPERATOR,
        "lprime_primitive": {"type": "string"},
        "normalization": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "column": {"type": "array", "items": _OPERATOR},
        "matrix": {"type": "array", "items": {"type": "array", "items": _OPERATOR}},
        "diagnostics": {"type": "array", "items": {"type": "string"}}
    }, ["basis", "operator", "lprime", "lprime_primitive", "diagnostics"]),
    "expansion": _envelope("expansion", {
        **_BASIS["properties"],
        "E": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
        "X": {"type": "array", "items": {"type": "array", "items": {"type": "string"},
                                         "minItems": 2, "maxItems": 2}},
        "compatibility": {
            "type": "object",
            "properties": {
                "kmax": {"type": "integer"},
                "passed": {"type": "boolean"},
                "failures": {"type": "array", "items": {"type": "integer"}}
            },
            "required": ["kmax", "passed", "failures"]
        }
    }, ["m", "a", "b", "E", "X"]),
    "verification": _envelope("verification", {
        "basis": _BASIS,
        "operator": _OPERATOR,
        "lprime": _OPERATOR,
        "passed": {"type": "boolean"},
        "nmax": {"type": "integer", "minimum": 0},
        "checked": {"type": "integer", "minimum": 0},
        "first_failure": {"type": ["integer", "null"]},
        "residual": {"anyOf": [_RATIONAL, {"type": "null"}]},
        "truncated": {"type": "boolean"},
        "h": {"type": "array", "items": _RATIONAL},
        "y": {"type": "array", "items": _RATIONAL}
    }, ["basis", "operator", "passed", "nmax", "checked", "h", "y"]),
    "gcrd": _envelope("gcrd", {
        "inputs": {"type": "array", "items": _OPERATOR},
        "gcrd": _OPERATOR,
        "primitive": {"type": "string"}
    }, ["inputs", "gcrd", "primitive"]),
}


def basis_document(spec: BasisSpec) -> Dict[str, Any]:
    return {"m": spec.m, "a": list(spec.a), "b": [rational_text(b) for b in spec.b]}


def reduction_document(result: ReductionResult, include_column: bool = False,
                       include_matrix: bool = False) -> Dict[str, Any]:
    document = {
        "schema": SCHEMA_VERSION,
        "kind": "reduction",
        "basis": basis_document(result.spec),
        "operator": operator_document(result.operator),
        "lprime": operator_document(result.lprime),
        "lprime_primitive": result.primitive_lprime().render(),
        "normalization": list(result.normalization),
        "diagnostics": list(result.diagnostics),
    }
    if include_column:
        document["column"] = [operator_document(entry) for entry in result.column]
    if include_matrix and result.matrix is not None:
        document["matrix"] = [[operator_document(entry) for entry in row]
                              for row in result.matrix.entries]
    return document


def expansion_document(table: ExpansionTable,
                       report: Optional[CompatibilityReport] = None) -> Dict[str, Any]:
    document = {
        "schema": SCHEMA_VERSION,
        "kind": "expansion",
        **basis_document(table.spec),
        "E": [[alpha.render() for alpha in row] for row in table.shift],
        "X": [[stay.render(), up.render()] for stay, up in table.x],
    }
    if report is not None:
        document["compatibility"] = {
            "kmax": report.kmax,
            "passed": report.passed,
            "failures": [check.n for check in report.failures()],
        }
    return document


def verification_document(spec: BasisSpec, operator: OreOp, report: VerificationReport,
                          h, lprime: Optional[OreOp] = None) -> Dict[str, Any]:
    document = {
        "schema": SCHEMA_VERSION,
        "kind": "verification",
        "basis": basis_document(spec),
        "operator": operator_document(operator),
        "passed": report.passed,
        "nmax": report.nmax,
        "checked": report.checked,
        "first_failure": report.first_failure,
        "residual": rational_text(report.residual) if report.residual is not None else None,
        "truncated": report.truncated,
        "h": [rational_text(v) for v in h],
        "y": [rational_text(v) for v in report.values],
    }
    if lprime is not None:
        document["lprime"] = operator_document(lprime)
    return document


def gcrd_document(inputs: List[OreOp], result: OreOp, primitive: OreOp) -> Dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "gcrd",
        "inputs": [operator_document(op) for op in inputs],
        "gcrd": operator_document(result),
        "primitive": primitive.render(),
    }


def validate_document(document: Dict[str, Any]) -> None:
    """Raise jsonschema.ValidationError if the document does not match its kind's schema."""
    kind = document.get("kind")
    if kind not in SCHEMAS:
        raise ValueError(f"Unknown document kind: {kind}")
    jsonschema.validate(instance=document, schema=SCHEMAS[kind])


def dump_document(document: Dict[str, Any]) -> str:
    validate_document(document)
    return json.dumps(document, indent=2)
