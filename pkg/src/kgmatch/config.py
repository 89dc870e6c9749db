"""Minimal TOML-style config reader for run and sweep declarations.

Supported subset: comments (#), [section] headers, and key = value lines
where the value is a double-quoted string, integer, float, boolean, or a
flat array of those.  Dotted keys, nested tables, and multi-line values are
out of scope; runs needing more belong in shell scripts.
"""
from __future__ import annotations

import re
from pathlib import Path


class ConfigError(Exception):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


_KEY_RE = re.compile(r"^[A-Za-z0-9_-]+$")
_SECTION_RE = re.compile(r"^\[([A-Za-z0-9_-]+)\]$")


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out).strip()


def _parse_scalar(text: str, lineno: int):
    if text == "true":
        return True
    if text == "false":
        return False
    if text.startswith('"'):
        if not text.endswith('"') or len(text) < 2:
            raise ConfigError(lineno, f"unterminated string {text!r}")
        body = text[1:-1]
        if '"' in body:
            raise ConfigError(lineno, "embedded quotes are not supported")
        return body.replace("\\t", "\t").replace("\\n", "\n").replace("\\\\", "\\")
    try:
        if re.fullmatch(r"[+-]?\d+", text):
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(lineno, f"unrecognized value {text!r}") from None


def _parse_value(text: str, lineno: int):
    if text.startswith("["):
        if not text.endswith("]"):
            raise ConfigError(lineno, "unterminated array")
        body = text[1:-1].strip()
        if not body:
            return []
        # Split on commas outside strings.
        items, depth, current = [], False, []
        for ch in body:
            if ch == '"':
                depth = not depth
            if ch == "," and not depth:
                items.append("".join(current).strip())
                current = []
            else:
                current.append(ch)
        items.append("".join(current).strip())
        return [_parse_scalar(item, lineno) for item in items if item]
    return _parse_scalar(text, lineno)


def parse_config(text: str) -> dict:
    """Config text to a dict; section contents nest under the section name."""
    root: dict = {}
    section = root
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            name = m.group(1)
            if name in root and not isinstance(root[name], dict):
                raise ConfigError(lineno, f"section name {name!r} clashes with a key")
            section = root.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigError(lineno, "expected key = value")
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(lineno, f"bad key {key!r}")
        if not value_text:
            raise ConfigError(lineno, "missing value")
        if key in section:
            raise ConfigError(lineno, f"duplicate key {key!r}")
        section[key] = _parse_value(value_text, lineno)
    return root


def load_config(path: str | Path) -> dict:
    return parse_config(Path(path).read_text(encoding="utf-8"))
