"""Small key=value config-text format used for model and experiment files.

One ``key = value`` pair per line; blank lines and ``#`` comments are
ignored. Values are kept as strings; callers parse them.
"""

from .errors import ConfigError


def parse_kv(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def format_kv(pairs: dict) -> str:
    lines = [f"{k} = {v}" for k, v in pairs.items()]
    return "\n".join(lines) + "\n"


def parse_floats(value: str, key: str) -> tuple:
    value = value.strip()
    if not value:
        return ()
    try:
        return tuple(float(p) for p in value.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {value!r} as numbers") from exc
