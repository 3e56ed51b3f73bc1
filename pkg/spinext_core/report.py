from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

from jsonschema import Draft202012Validator
from jsonschema import ValidationError as JsonSchemaValidationError
from referencing import Registry, Resource
from referencing.jsonschema import DRAFT202012

from .errors import InvariantViolationError
from .resources import read_text_resource
from .version import OUTPUT_SCHEMA_VERSION, get_version
from .yamlio import load_yaml_text, yaml_loader

OUTPUT_SCHEMA_URI = "urn:spinext:output-schema"
TABLE_TEMPLATE_ID = "table.txt"


@dataclass
class OutputEnvelope:
    command: str
    params: dict[str, Any]
    result: dict[str, Any]
    seed: int | None = None
    tool_version: str = field(default_factory=get_version)
    schema_version: str = OUTPUT_SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "params": self.params,
            "result": self.result,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "schema_version": self.schema_version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)


@lru_cache(maxsize=1)
def _output_schema() -> dict[str, Any]:
    return load_yaml_text(read_text_resource("output_schema.yaml"), "output_schema.yaml")


@lru_cache(maxsize=None)
def _validators(result_def: str) -> tuple[Draft202012Validator, Draft202012Validator]:
    root_doc = _output_schema()
    if result_def not in (root_doc.get("$defs") or {}):
        raise InvariantViolationError(f"No output schema for result type {result_def!r}")
    registry = Registry().with_resource(
        OUTPUT_SCHEMA_URI,
        Resource.from_contents(root_doc, default_specification=DRAFT202012),
    )
    envelope = Draft202012Validator(root_doc, registry=registry)
    wrapper = {"$ref": f"{OUTPUT_SCHEMA_URI}#/$defs/{result_def}"}
    return envelope, Draft202012Validator(wrapper, registry=registry)


def validate_envelope(envelope: OutputEnvelope | dict[str, Any], result_def: str) -> None:
    """Check an envelope and its result payload against the published schema."""
    doc = envelope.to_dict() if isinstance(envelope, OutputEnvelope) else envelope
    envelope_validator, result_validator = _validators(result_def)
    for validator, instance, where in (
        (envelope_validator, doc, "envelope"),
        (result_validator, doc.get("result"), f"result ({result_def})"),
    ):
        try:
            validator.validate(instance)
        except JsonSchemaValidationError as e:
            path = "/" + "/".join(str(x) for x in e.path) if e.path else "/"
            raise InvariantViolationError(
                f"Output does not match its schema: {where}\n  at: {path}\n  error: {e.message}"
            ) from e


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, list):
        return " ".join(_cell(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def _is_record_list(value: Any) -> bool:
    return isinstance(value, list) and bool(value) and all(isinstance(v, dict) for v in value)


def tabulate(result: dict[str, Any]) -> tuple[list[str], list[list[str]]]:
    """Flatten a result into columns and rows.

    Scalar fields become leading columns. When a field holds a list of
    records, each record yields one row; otherwise there is a single row.
    """
    records_key = next((k for k, v in result.items() if _is_record_list(v)), None)
    scalars = {k: v for k, v in result.items() if k != records_key}
    if records_key is None:
        return list(scalars), [[_cell(v) for v in scalars.values()]]

    nested: list[str] = []
    for rec in result[records_key]:
        nested.extend(k for k in rec if k not in nested)
    nested_cols = [f"{records_key}.{k}" if k in scalars else k for k in nested]
    columns = [*scalars, *nested_cols]
    rows = [
        [_cell(v) for v in scalars.values()] + [_cell(rec.get(k)) for k in nested]
        for rec in result[records_key]
    ]
    return columns, rows


def render_csv(result: dict[str, Any]) -> str:
    columns, rows = tabulate(result)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return out.getvalue()


def _render_jinja_str(template_key: str, template_text: str, context: dict[str, Any]) -> str:
    from jinja2 import DictLoader, Environment, StrictUndefined

    env = Environment(
        loader=DictLoader({template_key: template_text}),
        autoescape=False,
        undefined=StrictUndefined,
    )
    env.filters["cell"] = _cell
    return env.get_template(template_key).render(**context)


def _load_template_map() -> list[dict[str, str]]:
    txt = read_text_resource("template_map.yaml")
    data = yaml_loader.load(txt) or {}
    items = data.get("templates") or []
    return [i for i in items if isinstance(i, dict) and i.get("id") and i.get("path")]


def list_templates() -> list[dict[str, str]]:
    return _load_template_map()


def resolve_template(template_id: str) -> tuple[str, str, str]:
    for it in _load_template_map():
        if it.get("id") == template_id:
            path = str(it.get("path"))
            desc = str(it.get("description", ""))
            text = read_text_resource(path)
            return path, text, desc
    raise FileNotFoundError(f"Unknown template id: {template_id}")


def render_table(envelope: OutputEnvelope, template_id: str = TABLE_TEMPLATE_ID) -> str:
    columns, rows = tabulate(envelope.result)
    widths = [max([len(c), *(len(r[i]) for r in rows)]) for i, c in enumerate(columns)]
    path, text, _ = resolve_template(template_id)
    return _render_jinja_str(
        path,
        text,
        {
            "command": envelope.command,
            "params": envelope.params,
            "seed": envelope.seed,
            "tool_version": envelope.tool_version,
            "columns": columns,
            "rows": rows,
            "widths": widths,
        },
    )


def render(envelope: OutputEnvelope, fmt: str) -> str:
    if fmt == "json":
        return envelope.to_json()
    if fmt == "csv":
        return render_csv(envelope.result).rstrip("\n")
    return render_table(envelope)
