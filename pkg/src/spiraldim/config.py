"""Key-value text files: the one config/serialization format used everywhere.

Format: one ``key = value`` pair per line, ``#`` starts a comment, later
keys override earlier ones.  Values stay strings at parse time; typed
getters convert on demand.
"""

from __future__ import annotations

import os

from .errors import ValidationError


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (tuple, list)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def kv_lines(mapping) -> str:
    return "".join(f"{key} = {format_value(val)}\n" for key, val in mapping.items())


def write_kv(path, mapping) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(kv_lines(mapping))


def parse_kv(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def read_kv(path) -> dict:
    if not os.path.exists(path):
        raise ValidationError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_kv(fh.read())


def get_float(mapping, key, default=None) -> float:
    if key not in mapping:
        if default is None:
            raise ValidationError(f"missing config key {key!r}")
        return default
    try:
        return float(mapping[key])
    except ValueError as exc:
        raise ValidationError(f"config key {key!r}: not a number: {mapping[key]!r}") from exc


def get_int(mapping, key, default=None) -> int:
    val = get_float(mapping, key, default if default is None else float(default))
    if val != int(val):
        raise ValidationError(f"config key {key!r}: expected an integer, got {val!r}")
    return int(val)


def get_bool(mapping, key, default=None) -> bool:
    if key not in mapping:
        if default is None:
            raise ValidationError(f"missing config key {key!r}")
        return default
    val = mapping[key].lower()
    if val in ("true", "1", "yes", "on"):
        return True
    if val in ("false", "0", "no", "off"):
        return False
    raise ValidationError(f"config key {key!r}: not a boolean: {mapping[key]!r}")


def get_floats(mapping, key, default=None) -> tuple:
    if key not in mapping:
        if default is None:
            raise ValidationError(f"missing config key {key!r}")
        return tuple(default)
    parts = [p for p in mapping[key].split(",") if p.strip()]
    return tuple(float(p) for p in parts)
