"""Deterministic JSON and CSV rendering.

Floating values print with enough decimal digits to round-trip the working
precision; map keys are emitted sorted, so identical inputs produce
byte-identical output.  Complex values become [re, im] pairs in JSON and
're+imj' composites in CSV cells.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from mpmath import mp

from .findiff import DEFAULT_PRECISION


def roundtrip_digits(precision_bits: int) -> int:
    return max(17, math.ceil(precision_bits * math.log10(2)) + 2)


def format_real(value, precision_bits: int = DEFAULT_PRECISION) -> str:
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form for native floats
    if isinstance(value, Fraction):
        with mp.workprec(precision_bits):
            value = mp.mpf(value.numerator) / value.denominator
    with mp.workprec(precision_bits):
        return mp.nstr(mp.mpf(value), roundtrip_digits(precision_bits))


def format_complex_cell(value, precision_bits: int = DEFAULT_PRECISION) -> str:
    re = format_real(mp.re(value), precision_bits)
    im = mp.im(value)
    sign = "-" if im < 0 else "+"
    return f"{re}{sign}{format_real(abs(im), precision_bits)}j"


def _is_complex(value) -> bool:
    return isinstance(value, (complex, mp.mpc))


def _render(value, precision_bits, indent, level) -> str:
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    if _is_complex(value):
        re = format_real(mp.re(value), precision_bits)
        im = format_real(mp.im(value), precision_bits)
        return f"[{re}, {im}]"
    if isinstance(value, (int, float, Fraction, mp.mpf)):
        return format_real(value, precision_bits)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = []
        for key in sorted(value):
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings")
            rendered = _render(value[key], precision_bits, indent, level + 1)
            parts.append(f"{inner}{json.dumps(key)}: {rendered}")
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        parts = [f"{inner}{_render(v, precision_bits, indent, level + 1)}"
                 for v in value]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    return format_real(value, precision_bits)


def render_json(value, precision_bits: int = DEFAULT_PRECISION,
                indent: int = 2) -> str:
    return _render(value, precision_bits, indent, 0)


def _csv_cell(value, precision_bits) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        if any(ch in value for ch in ",\"\n"):
            return '"' + value.replace('"', '""') + '"'
        return value
    if _is_complex(value):
        return format_complex_cell(value, precision_bits)
    return format_real(value, precision_bits)


def render_csv(header, rows, precision_bits: int = DEFAULT_PRECISION) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(cell, precision_bits) for cell in row))
    return "\n".join(lines) + "\n"
