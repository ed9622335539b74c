"""Scenario documents: JSON text in, validated :class:`~volimm.models.scenario.Scenario` out."""

import logging
from pathlib import Path
from typing import Any

import pydantic

from volimm.errors import InvalidConfig, RangeError, SchemaError
from volimm.models.scenario import Scenario

logger = logging.getLogger(__name__)

# pydantic error types that mean the document has the wrong shape, not a bad value
_SCHEMA_ERROR_TYPES = frozenset(
    {
        "extra_forbidden",
        "missing",
        "json_invalid",
        "json_type",
        "model_type",
        "dict_type",
        "list_type",
        "int_type",
        "float_type",
        "string_type",
        "bool_type",
        "enum",
        "int_parsing",
        "float_parsing",
        "bool_parsing",
        "int_from_float",
        "grid_length",
    }
)


def _path(loc: tuple[Any, ...]) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def _field_errors(exc: pydantic.ValidationError) -> list[dict[str, Any]]:
    return [
        {"path": _path(err["loc"]), "msg": err["msg"], "type": err["type"]}
        for err in exc.errors()
    ]


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    """Validate a JSON scenario document.

    Raises:
        SchemaError: Unknown, missing or mistyped keys, or malformed JSON.
        RangeError: Values outside their documented ranges.
    """
    try:
        return Scenario.model_validate_json(text)
    except pydantic.ValidationError as exc:
        errors = _field_errors(exc)
        if any(err["type"] in _SCHEMA_ERROR_TYPES for err in errors):
            raise SchemaError(source, errors) from exc
        raise RangeError(source, errors) from exc


def print_scenario(scenario: Scenario) -> str:
    """Canonical JSON text; ``parse_scenario(print_scenario(s)) == s``."""
    return scenario.model_dump_json(indent=2) + "\n"


def load_scenario(path: Path) -> Scenario:
    """Read and validate a scenario file.

    Raises:
        InvalidConfig: If the file does not exist.
        SchemaError: See :func:`parse_scenario`.
        RangeError: See :func:`parse_scenario`.
    """
    if not path.is_file():
        raise InvalidConfig(f"scenario file {path} not found")
    logger.info("Loading scenario from %s", path)
    return parse_scenario(path.read_text(encoding="utf-8"), str(path))
