"""Kernel and vector file formats.

Kernel files are either JSON, ``{"n": 2, "p": [["0.6", "0.4"], ["0.2", "0.8"]]}``,
or a plain whitespace-separated matrix with one row per line. Entries may be
numbers, decimal strings or ``"p/q"`` rationals. Vector files are a JSON array
or whitespace-separated values.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .backend import DEFAULT_TOL, format_scalar
from .chain_core import MarkovKernel
from .errors import ParseError


def _check_entry(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ParseError(where, f"expected a number or numeric string, got {value!r}")
    if isinstance(value, str):
        try:
            Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(where, f"cannot parse {value!r} as a number") from None
    return value


def _parse_plain_matrix(text):
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append([_check_entry(tok, f"line {lineno}, column {j + 1}")
                     for j, tok in enumerate(line.split())])
    if not rows:
        raise ParseError("file", "no matrix rows found")
    return rows


def parse_kernel_text(text):
    """Return ``(rows, extras)`` where ``extras`` holds any other JSON fields."""
    stripped = text.lstrip()
    if not stripped.startswith(("{", "[")):
        return _parse_plain_matrix(text), {}
    try:
        # keep decimals as text so the exact backend reads them as written
        data = json.loads(text, parse_float=str)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    if isinstance(data, list):
        data = {"p": data}
    if not isinstance(data, dict):
        raise ParseError("root", "expected a JSON object")
    if "p" not in data:
        raise ParseError("p", "missing field")
    p = data["p"]
    if not isinstance(p, list) or not all(isinstance(r, list) for r in p):
        raise ParseError("p", "must be a list of rows")
    rows = [[_check_entry(v, f"p[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(p)]
    if "n" in data:
        n = data["n"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ParseError("n", f"must be a positive integer, got {n!r}")
        if n != len(rows):
            raise ParseError("n", f"declares {n} states but p has {len(rows)} rows")
    for i, r in enumerate(rows):
        if len(r) != len(rows):
            raise ParseError(f"p[{i}]", f"has {len(r)} entries, expected {len(rows)}")
    extras = {key: v for key, v in data.items() if key not in ("n", "p")}
    return rows, extras


def read_kernel_rows(path):
    """Raw ``(rows, extras)`` from a kernel file, entries as written."""
    return parse_kernel_text(Path(path).read_text(encoding="utf-8"))


def load_kernel(path, exact=False, tol=DEFAULT_TOL):
    """Read a kernel file. Returns ``(kernel, extras)``; extras may carry a ``measure``."""
    rows, extras = read_kernel_rows(path)
    return MarkovKernel(rows, exact=exact, tol=tol), extras


def parse_vector_text(text, where="vector"):
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            data = json.loads(stripped, parse_float=str)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{where} line {exc.lineno}, column {exc.colno}", exc.msg) from None
        if not isinstance(data, list):
            raise ParseError(where, "expected a JSON array")
        return [_check_entry(v, f"{where}[{i}]") for i, v in enumerate(data)]
    return [_check_entry(tok, f"{where}[{i}]") for i, tok in enumerate(stripped.split())]


def load_vector(path, where="vector"):
    return parse_vector_text(Path(path).read_text(encoding="utf-8"), where)


def kernel_to_dict(k: MarkovKernel, **extras) -> dict:
    out = {"n": k.n, "p": [[format_scalar(v) for v in row] for row in k.p]}
    out.update(extras)
    return out


def dump_kernel(k: MarkovKernel, path, **extras) -> None:
    Path(path).write_text(json.dumps(kernel_to_dict(k, **extras), indent=2) + "\n",
                          encoding="utf-8")
