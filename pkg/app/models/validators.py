"""JSON Schema definitions and validation helpers for persisted documents.

Two documents leave the process and come back in later CLI invocations:

  checkpoint : {"arch": {...}, "seed": int, "params": [float, …]}
  plan       : {"criteria": [[id, …], …], "mean_scores": [...], "measure", "strategy"}

Both are validated on load so that a hand-edited or truncated file fails with
a readable message instead of a shape error deep inside the numerics.

Usage::

    from app.models.validators import validate_document, CHECKPOINT_SCHEMA
    errors = validate_document(raw, CHECKPOINT_SCHEMA)
    if errors:
        raise CheckpointError(path, errors)
"""

from typing import Any

import jsonschema
from jsonschema import ValidationError

# ---------------------------------------------------------------------------
# Document schemas
# ---------------------------------------------------------------------------

CHECKPOINT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["arch", "seed", "params"],
    "properties": {
        "arch": {
            "type": "object",
            "required": ["layer_widths"],
            "properties": {
                "layer_widths": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1},
                    "minItems": 2,
                },
                "activation": {"type": "string", "enum": ["relu", "tanh"]},
            },
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0},
        "params": {"type": "array", "items": {"type": "number"}},
    },
    "additionalProperties": False,
}

PLAN_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["criteria", "mean_scores", "measure", "strategy"],
    "properties": {
        "criteria": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "minItems": 1,
                "items": {"type": "integer", "minimum": 0},
            },
        },
        "mean_scores": {"type": "array", "items": {"type": "number"}},
        "measure": {"type": "string", "enum": ["confidence", "loss"]},
        "strategy": {"type": "string", "enum": ["equal_size", "quantile"]},
    },
    "additionalProperties": False,
}


# ---------------------------------------------------------------------------
# Validation helper
# ---------------------------------------------------------------------------


def validate_document(document: Any, schema: dict[str, Any]) -> list[str]:
    """Validate *document* against *schema* using JSON Schema Draft 7.

    Returns a (possibly empty) list of human-readable error messages.
    An empty list means the document is valid.
    """
    errors: list[str] = []
    try:
        validator = jsonschema.Draft7Validator(schema)
        for err in sorted(validator.iter_errors(document), key=lambda e: list(e.path)):
            where = "/".join(str(p) for p in err.path)
            errors.append(f"{where}: {err.message}" if where else err.message)
    except jsonschema.SchemaError as exc:
        errors.append(f"Invalid schema definition: {exc.message}")
    except ValidationError as exc:
        errors.append(exc.message)
    return errors
