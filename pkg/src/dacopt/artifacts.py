"""Text artifact formats: mapping CSV, trace CSV, LUT, report tables.

Every file opens with ``#`` comment lines: a schema tag, then a compact JSON
echo of the resolved configuration. Readers skip comment lines.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .model import Basis, ConfigError, InvariantError, RepresentationTable

MAPPING_SCHEMA = "dacopt-mapping/1"
TRACE_SCHEMA = "dacopt-trace/1"
LUT_SCHEMA = "dacopt-lut/1"
REPORT_SCHEMA = "dacopt-report/1"
SNDR_SCHEMA = "dacopt-sndr/1"


def header(schema: str, config: dict | None = None, **extra) -> str:
    lines = [f"# schema: {schema}"]
    for key, value in extra.items():
        lines.append(f"# {key}: {value}")
    if config is not None:
        lines.append("# config: " + json.dumps(config, sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def _data_lines(text: str):
    for number, line in enumerate(text.splitlines(), start=1):
        if line.strip() and not line.lstrip().startswith("#"):
            yield number, line


def bit_string(bits) -> str:
    return "".join("1" if b else "0" for b in bits)


def mapping_csv(table: RepresentationTable, config: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write(header(MAPPING_SCHEMA, config, basis=" ".join(map(str, table.basis.weights)),
                     bit_order="basis index 0 leftmost"))
    buf.write("codeword,bits,value\n")
    for x, (row, value) in enumerate(zip(table.bits, table.decoded())):
        buf.write(f"{x},{bit_string(row)},{int(value)}\n")
    return buf.getvalue()


def parse_mapping_csv(text: str, basis: Basis, source: str = "<mapping>") -> RepresentationTable:
    rows = {}
    lines = _data_lines(text)
    try:
        number, first = next(lines)
    except StopIteration:
        raise ConfigError(f"{source}: empty mapping file") from None
    if first.strip() != "codeword,bits,value":
        raise ConfigError(f"{source}: expected header 'codeword,bits,value'", number)
    for number, line in lines:
        parts = next(csv.reader([line]))
        if len(parts) != 3:
            raise ConfigError(f"{source}: expected 3 columns", number)
        try:
            x, value = int(parts[0]), int(parts[2])
        except ValueError:
            raise ConfigError(f"{source}: non-integer codeword or value", number) from None
        bits = parts[1].strip()
        if len(bits) != basis.length or set(bits) - {"0", "1"}:
            raise ConfigError(f"{source}: bits must be {basis.length} characters of 0/1", number)
        if x in rows:
            raise ConfigError(f"{source}: duplicate codeword {x}", number)
        row = [int(c) for c in bits]
        if sum(w for w, b in zip(basis.weights, row) if b) != value:
            raise ConfigError(f"{source}: value column disagrees with the bits", number)
        rows[x] = row
    if sorted(rows) != list(range(basis.n_codes)):
        raise ConfigError(f"{source}: mapping must list every codeword 0..{basis.n_codes - 1} exactly once")
    return RepresentationTable(basis, np.array([rows[x] for x in range(basis.n_codes)]))


def trace_csv(values, changes=(), temperatures=(), config: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write(header(TRACE_SCHEMA, config))
    buf.write("step,objective,changes,temperature\n")
    changes, temperatures = list(changes), list(temperatures)
    for k, v in enumerate(values):
        ch = changes[k - 1] if 0 < k <= len(changes) else ""
        t = repr(temperatures[k]) if k < len(temperatures) else ""
        buf.write(f"{k},{v!r},{ch},{t}\n")
    return buf.getvalue()


def lut_text(table: RepresentationTable, config: dict | None = None) -> str:
    """One L-bit word per codeword, address = line order, basis index 0 leftmost."""
    bad = table.bad_rows()
    if bad.size:
        x = int(bad[0])
        raise InvariantError(f"mapping row for codeword {x} decodes to {int(table.decoded()[x])}")
    basis = table.basis
    buf = io.StringIO()
    buf.write(header(LUT_SCHEMA, config, n_bits=basis.n_bits, switches=basis.length,
                     basis=" ".join(map(str, basis.weights)), bit_order="basis index 0 leftmost"))
    for row in table.bits:
        buf.write(bit_string(row) + "\n")
    return buf.getvalue()


def parse_lut(text: str, source: str = "<lut>") -> RepresentationTable:
    meta = {}
    for line in text.splitlines():
        if line.startswith("# ") and ":" in line:
            key, _, value = line[2:].partition(":")
            meta[key.strip()] = value.strip()
    try:
        basis = Basis(tuple(int(w) for w in meta["basis"].split()), int(meta["n_bits"]))
    except (KeyError, ValueError):
        raise ConfigError(f"{source}: LUT header lacks n_bits/basis") from None
    words = []
    for number, line in _data_lines(text):
        word = line.strip()
        if len(word) != basis.length or set(word) - {"0", "1"}:
            raise ConfigError(f"{source}: bad LUT word", number)
        words.append([int(c) for c in word])
    if len(words) != basis.n_codes:
        raise ConfigError(f"{source}: expected {basis.n_codes} LUT words, found {len(words)}")
    return RepresentationTable(basis, np.array(words))


def table_csv(rows: list[dict], columns: list[str], config: dict | None = None,
              schema: str = REPORT_SCHEMA) -> str:
    buf = io.StringIO()
    buf.write(header(schema, config))
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(row.get(c)) for c in columns) + "\n")
    return buf.getvalue()


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def read_table_csv(text: str) -> list[dict]:
    body = "\n".join(line for _, line in _data_lines(text))
    return list(csv.DictReader(io.StringIO(body)))


def write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
