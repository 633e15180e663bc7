"""Machine-readable output helpers.

Every number in a machine-readable record (JSON or CSV) is written with
17 significant digits, which round-trips any double exactly and makes
fixture files byte-stable.
"""

from __future__ import annotations

import math

__all__ = ["fmt17", "to_json"]


def fmt17(x: float) -> str:
    """Format a float with 17 significant digits (round-trip exact)."""
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return format(float(x), ".17g")


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def to_json(obj, indent: int = 0) -> str:
    """Serialise dicts/lists/scalars to JSON with fmt17 floats.

    The standard json module formats floats with repr, which is
    round-trip exact but not fixed-width; this tiny writer pins the
    17-digit convention instead.  Key order is preserved.
    """
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return f'"{_escape(obj)}"'
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt17(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{_escape(str(k))}": {to_json(v, indent + 2)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{to_json(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")
