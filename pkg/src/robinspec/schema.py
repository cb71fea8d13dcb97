"""Minimal JSON-schema checker for the shipped output schemas.

Supports the subset the shipped schemas use: type, properties, required,
items, enum, additionalProperties.  Raises ArgumentError with a path on the
first mismatch.
"""

from __future__ import annotations

import json
from importlib import resources

from .errors import ArgumentError

_TYPES = {
    "object": dict,
    "array": list,
    "string": str,
    "boolean": bool,
    "integer": int,
    "null": type(None),
}


def load_schema(name: str) -> dict:
    """Load a schema shipped with the package, e.g. ``solve``."""
    text = resources.files("robinspec.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(instance, schema: dict, path: str = "$") -> None:
    typ = schema.get("type")
    if typ == "number":
        if not isinstance(instance, (int, float)) or isinstance(instance, bool):
            raise ArgumentError(f"{path}: expected number, got {type(instance).__name__}")
    elif typ is not None:
        expected = _TYPES[typ]
        if not isinstance(instance, expected) or (expected is int and isinstance(instance, bool)):
            raise ArgumentError(f"{path}: expected {typ}, got {type(instance).__name__}")
    if "enum" in schema and instance not in schema["enum"]:
        raise ArgumentError(f"{path}: {instance!r} not in {schema['enum']}")
    if typ == "object":
        props = schema.get("properties", {})
        for key in schema.get("required", []):
            if key not in instance:
                raise ArgumentError(f"{path}: missing required key {key!r}")
        if schema.get("additionalProperties") is False:
            extra = set(instance) - set(props)
            if extra:
                raise ArgumentError(f"{path}: unexpected keys {sorted(extra)}")
        for key, sub in props.items():
            if key in instance:
                validate(instance[key], sub, f"{path}.{key}")
    if typ == "array" and "items" in schema:
        for i, item in enumerate(instance):
            validate(item, schema["items"], f"{path}[{i}]")
