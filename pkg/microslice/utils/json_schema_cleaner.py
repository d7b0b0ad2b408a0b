"""
This module provides a utility to inline the `$ref` references of a JSON schema.

Pydantic emits shared definitions under `$defs` and points at them with `$ref`. The
``schema`` command prints scenario schemas with every reference replaced by its definition,
so a reader sees each field's full shape in place.
"""
import copy
import json
from typing import Any, Dict


def inline_refs(schema: Dict[str, Any]) -> Dict[str, Any]:
    """
    Replace every `$ref` of a JSON schema with the definition it points to.

    The input is left untouched.

    :param schema: The JSON schema, with its definitions under `$defs`.
    :return: A copy without `$ref` entries and without the `$defs` section.
    :raises KeyError: If the schema references definitions it does not carry.
    """

    def resolve_ref(ref: str, defs: Dict[str, Any]) -> Dict[str, Any]:
        path = ref.replace("#/$defs/", "").split("/")
        ref_schema: Any = defs
        for key in path:
            ref_schema = ref_schema[key]
        return copy.deepcopy(ref_schema)

    def replace_refs(obj: Any, defs: Dict[str, Any]) -> Any:
        if isinstance(obj, dict):
            if "$ref" in obj:
                ref_schema = replace_refs(resolve_ref(obj.pop("$ref"), defs), defs)
                # Sibling keywords such as a field description win over the definition's.
                siblings = {key: replace_refs(value, defs) for key, value in obj.items()}
                return {**ref_schema, **siblings}
            return {key: replace_refs(value, defs) for key, value in obj.items()}
        if isinstance(obj, list):
            return [replace_refs(item, defs) for item in obj]
        return obj

    schema = copy.deepcopy(schema)
    if "$defs" not in schema and "$ref" in json.dumps(schema):
        raise KeyError("Schema does not have any defs however it contains some ref")
    defs = schema.pop("$defs", {})
    return replace_refs(schema, defs)
