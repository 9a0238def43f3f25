"""JSON documents for lattice functions, parameter sets and run reports.

A function document looks like::

    {"dim": 2, "entries": [{"x": [0, 0], "v": 1.0}, {"x": [1, 0], "v": 0.5}]}

Entries are written one per line in lexicographic order of ``x`` and floats
with ``repr`` precision, so ``read_function(write_function(u)) == u``
exactly and equal functions give byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from . import __version__
from .errors import DimensionMismatch, DuplicateOrZero, FormatError
from .funcspace import LatticeFunction

TOOL = "latticeckn"


def dumps_function(u: LatticeFunction) -> str:
    lines = [f'{{"dim": {u.N}, "entries": [']
    items = sorted(u.items())
    for k, (x, v) in enumerate(items):
        sep = "," if k < len(items) - 1 else ""
        lines.append(f'  {{"x": {json.dumps(list(x))}, "v": {json.dumps(float(v))}}}{sep}')
    lines.append("]}")
    return "\n".join(lines) + "\n"


def write_function(path, u: LatticeFunction):
    Path(path).write_text(dumps_function(u))


def _load(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{what}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def loads_function(text: str, source: str = "<string>") -> LatticeFunction:
    doc = _load(text, source)
    if not isinstance(doc, dict) or set(doc) != {"dim", "entries"}:
        raise FormatError(f"{source}: expected an object with keys 'dim' and 'entries'")
    N = doc["dim"]
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise FormatError(f"{source}: field 'dim' must be a positive integer, got {N!r}")
    if not isinstance(doc["entries"], list):
        raise FormatError(f"{source}: field 'entries' must be a list")
    vals = {}
    for k, e in enumerate(doc["entries"]):
        where = f"{source}: entries[{k}]"
        if not isinstance(e, dict) or set(e) != {"x", "v"}:
            raise FormatError(f"{where}: expected an object with keys 'x' and 'v'")
        x, v = e["x"], e["v"]
        if not isinstance(x, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in x):
            raise FormatError(f"{where}.x: expected a list of integers, got {x!r}")
        if len(x) != N:
            raise DimensionMismatch(f"{where}.x: point {x} has dimension {len(x)}, document dim is {N}")
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise FormatError(f"{where}.v: expected a finite number, got {v!r}")
        if v == 0:
            raise DuplicateOrZero(f"{where}.v: zero values must be omitted")
        pt = tuple(x)
        if pt in vals:
            raise DuplicateOrZero(f"{where}.x: duplicate point {x}")
        vals[pt] = float(v)
    return LatticeFunction(N, vals)


def read_function(path) -> LatticeFunction:
    return loads_function(Path(path).read_text(), str(path))


def read_params(path) -> dict:
    """A flat JSON object of named parameters (validated by the caller)."""
    doc = _load(Path(path).read_text(), str(path))
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: expected a JSON object of parameters")
    for k, v in doc.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise FormatError(f"{path}: parameter {k!r} must be a number, got {v!r}")
    return doc


def make_report(command: str, parameters: dict, **fields) -> dict:
    """Run report; everything except an optional ``timings`` entry is a
    deterministic function of the parameters."""
    rep = {"tool": TOOL, "version": __version__, "command": command, "parameters": parameters}
    rep.update(fields)
    return rep


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_report(path, report: dict):
    Path(path).write_text(dumps_report(report))


def read_report(path) -> dict:
    doc = _load(Path(path).read_text(), str(path))
    if not isinstance(doc, dict) or "command" not in doc or "parameters" not in doc:
        raise FormatError(f"{path}: not a run report")
    return doc
