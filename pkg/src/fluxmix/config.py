"""Run configuration: JSON schema, validation, defaults and round-tripping."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, fields

import jsonschema

from .circuit import EC_CONVENTIONS, BasisSpec, CircuitParams
from .response import DecoherenceRates
from .sweep import CHI_COLUMNS

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


def _num(**extra):
    return {"type": "number", **extra}


CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "fluxmix run configuration",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "circuit": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "ej_over_h": _num(exclusiveMinimum=0, description="E_J/h in GHz"),
                "alpha": _num(description="small-junction ratio; 0.5 < alpha < 1 expected"),
                "ej_over_ec": _num(exclusiveMinimum=0),
                "f": _num(minimum=0, maximum=1, description="reduced bias flux"),
                "ec_convention": {"enum": sorted(EC_CONVENTIONS)},
            },
        },
        "basis": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_max": {"type": "integer", "minimum": 4},
                "m_max": {"type": "integer", "minimum": 4},
            },
        },
        "rates": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                name: _num(minimum=0, description="GHz")
                for name in ("gamma12", "gamma13", "gamma23", "gamma22", "gamma33")
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "f_min": _num(minimum=0, maximum=1),
                "f_max": _num(minimum=0, maximum=1),
                "steps": {"type": "integer", "minimum": 2},
                "columns": {"type": "array", "items": {"enum": list(CHI_COLUMNS)}, "uniqueItems": True},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"enum": ["csv", "json"]},
                "directory": {"type": "string"},
                "png": {"type": "boolean"},
            },
        },
    },
}


@dataclass(frozen=True)
class SweepGrid:
    f_min: float = 0.47
    f_max: float = 0.53
    steps: int = 601
    columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    directory: str = "."
    png: bool = False


@dataclass(frozen=True)
class RunConfig:
    circuit: CircuitParams = field(default_factory=CircuitParams)
    basis: BasisSpec = field(default_factory=BasisSpec)
    rates: DecoherenceRates = field(default_factory=DecoherenceRates)
    sweep: SweepGrid = field(default_factory=SweepGrid)
    output: OutputSpec = field(default_factory=OutputSpec)

    def to_dict(self) -> dict:
        out = {f.name: asdict(getattr(self, f.name)) for f in fields(self)}
        out["sweep"]["columns"] = list(self.sweep.columns)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


_SECTIONS = {
    "circuit": CircuitParams,
    "basis": BasisSpec,
    "rates": DecoherenceRates,
    "sweep": SweepGrid,
    "output": OutputSpec,
}


def _path(err: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(p) for p in err.absolute_path)


def parse_config(text: str) -> RunConfig:
    """Validate a JSON document against CONFIG_SCHEMA and fill defaults."""
    if text.strip():
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    else:
        doc = {}
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(f"config error at {_path(err)}: {err.message}")

    built = {}
    for name, cls in _SECTIONS.items():
        section = doc.get(name, {})
        for fld in fields(cls):
            if fld.name not in section:
                log.info("config default applied: %s.%s = %r", name, fld.name, fld.default)
        kwargs = dict(section)
        if name == "sweep" and "columns" in kwargs:
            kwargs["columns"] = tuple(kwargs["columns"])
        try:
            built[name] = cls(**kwargs)
        except ValueError as exc:
            raise ConfigError(f"config error at /{name}: {exc}") from exc
    if built["sweep"].f_min >= built["sweep"].f_max:
        raise ConfigError("config error at /sweep: f_min must be below f_max")
    return RunConfig(**built)


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return parse_config("")
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
