"""JSON file formats: schemas (as plain dicts) and loaders."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

_STR_LIST = {"type": "array", "items": {"type": "string"}}
_EDGES = {"type": "array", "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}}

PROP_MODEL = {
    "type": "object",
    "required": ["nodes"],
    "properties": {
        "nodes": {**_STR_LIST, "minItems": 1},
        "cover": _EDGES,
        "valuation": {"type": "object", "additionalProperties": _STR_LIST},
    },
    "additionalProperties": False,
}

SET_MODEL = {
    "type": "object",
    "required": ["nodes", "domains"],
    "properties": {
        "nodes": {**_STR_LIST, "minItems": 1},
        "cover": _EDGES,
        "domains": {"type": "object", "additionalProperties": _STR_LIST},
        "transitions": {
            "type": "object",
            "propertyNames": {"pattern": "^.+->.+$"},
            "additionalProperties": {"type": "object", "additionalProperties": {"type": "string"}},
        },
        "membership": {"type": "object", "additionalProperties": _EDGES},
        "root": {"type": "string"},
        "root_elements": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "rank", "members", "thread"],
                "properties": {
                    "id": {"type": "string"},
                    "rank": {"type": "integer", "minimum": 0},
                    "members": _STR_LIST,
                    "thread": {"type": "object", "additionalProperties": {"type": "string"}},
                },
            },
        },
    },
    "additionalProperties": False,
}

LEAF = {
    "type": "object",
    "oneOf": [
        {"required": ["vrank"], "properties": {"vrank": {"type": "integer", "minimum": 0}}},
        {"required": ["ordinal"], "properties": {"ordinal": {"type": "integer", "minimum": 0}}},
        {"required": ["elements"], "properties": {"elements": _STR_LIST, "membership": _EDGES}},
    ],
}

TREE = {
    "type": "object",
    "required": ["nodes"],
    "properties": {
        "nodes": {**_STR_LIST, "minItems": 1},
        "cover": _EDGES,
        "valuation": {"type": "object", "additionalProperties": _STR_LIST},
        "leaves": {"type": "object", "additionalProperties": LEAF},
    },
    "additionalProperties": False,
}

RULE = {
    "type": "object",
    "required": ["premises", "conclusions"],
    "properties": {"premises": _STR_LIST, "conclusions": _STR_LIST},
    "additionalProperties": False,
}

_VERDICT = {"type": "string", "enum": ["valid", "countermodel", "falsified"]}

# Output of each CLI command under --json.
OUTPUTS: dict[str, dict] = {
    "prove": {
        "type": "object",
        "required": ["logic", "formula", "verdict"],
        "properties": {
            "logic": {"enum": ["ipc", "cpc"]},
            "formula": {"type": "string"},
            "verdict": _VERDICT,
            "root": {"type": "string"},
            "model": PROP_MODEL,
            "assignment": {"type": "object", "additionalProperties": {"type": "boolean"}},
        },
    },
    "admissible": {
        "type": "object",
        "required": ["logic", "rule", "verdict"],
        "properties": {
            "logic": {"enum": ["ipc", "cpc", "cqc-ground"]},
            "rule": RULE,
            "verdict": {"enum": ["admissible", "not-admissible", "unknown"]},
            "passive": {"type": "boolean"},
            "trace": {"type": "object"},
            "visser_steps": {"type": "integer"},
            "witness": {"type": "object", "additionalProperties": {"type": "string"}},
            "certificate": {"type": "object"},
            "bounds": {"type": "object"},
        },
    },
    "unify": {
        "type": "object",
        "required": ["logic", "formula", "unifiable"],
        "properties": {
            "logic": {"enum": ["cpc", "cqc"]},
            "formula": {"type": "string"},
            "unifiable": {"type": "boolean"},
            "result": {"const": "NOT_UNIFIABLE"},
            "ground_unifier": {"type": "object", "additionalProperties": {"type": "boolean"}},
        },
    },
    "sigma": {
        "type": "object",
        "required": ["formula", "unifiable"],
        "properties": {
            "formula": {"type": "string"},
            "unifiable": {"type": "boolean"},
            "ground_unifier": {"type": "object", "additionalProperties": {"type": "boolean"}},
            "sigma": {"type": "object", "additionalProperties": {"type": "string"}},
            "claims": {"type": "array", "items": {
                "type": "object",
                "required": ["B", "sigma_B", "structures_checked", "failures"],
            }},
            "passed": {"type": "boolean"},
        },
    },
    "model-check": {
        "type": "object",
        "required": ["formula", "kind", "forcing", "forced"],
        "properties": {
            "formula": {"type": "string"},
            "kind": {"enum": ["propositional", "set"]},
            "forcing": {"type": "object", "additionalProperties": {"type": "boolean"}},
            "nodes_checked": _STR_LIST,
            "forced": {"type": "boolean"},
        },
    },
    "extend": SET_MODEL,
    "axioms": {
        "type": "object",
        "required": ["node", "rank_bound", "reports", "passed"],
        "properties": {
            "node": {"type": "string"},
            "rank_bound": {"type": "integer"},
            "reports": {"type": "array", "items": {
                "type": "object",
                "required": ["axiom", "sentence", "passed", "failures"],
            }},
            "passed": {"type": "boolean"},
        },
    },
    "dp-demo": {
        "type": "object",
        "required": ["phi", "psi", "facts", "passed"],
        "properties": {"facts": {"type": "object", "additionalProperties": {"type": "boolean"}},
                       "passed": {"type": "boolean"}},
    },
    "visser-demo": {
        "type": "object",
        "required": ["n", "sigma", "facts", "passed"],
        "properties": {"facts": {"type": "object", "additionalProperties": {"type": "boolean"}},
                       "passed": {"type": "boolean"}},
    },
    "dejongh": {
        "type": "object",
        "required": ["tree", "tau", "matrix", "mismatches", "passed"],
        "properties": {
            "tree": TREE,
            "tau": {"type": "object", "additionalProperties": {"type": "string"}},
            "matrix": {"type": "object", "additionalProperties": {
                "type": "object", "additionalProperties": {"type": "boolean"}}},
            "mismatches": {"type": "array"},
            "passed": {"type": "boolean"},
        },
    },
    "property": {
        "type": "object",
        "required": ["seed", "cases", "families", "violations", "passed"],
        "properties": {"seed": {"type": "integer"}, "cases": {"type": "integer"},
                       "violations": {"type": "array"}, "passed": {"type": "boolean"}},
    },
    "error": {
        "type": "object",
        "required": ["error", "message"],
        "properties": {"error": {"type": "string"}, "message": {"type": "string"}},
    },
}


class InputError(ValueError):
    pass


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True)
