"""Result tables and their CSV form.

A CSV file starts with ``#`` metadata lines (``# key: value``), followed by
a header of ``name[unit]`` cells and one line per row.  Numbers are written
in scientific notation with 17 significant digits, which reads back
bit-exactly.
"""

import re
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Column", "ResultTable", "emit_csv", "format_csv", "read_csv", "parse_csv"]

_HEADER = re.compile(r"^([^\[\],]+)\[([^\[\],]*)\]$")


@dataclass(frozen=True)
class Column:
    name: str
    unit: str

    def __post_init__(self):
        if not self.name or any(c in self.name for c in ",[]\n"):
            raise ValueError(f"invalid column name {self.name!r}")
        if any(c in self.unit for c in ",[]\n"):
            raise ValueError(f"invalid unit {self.unit!r}")
        if not self.unit:
            raise ValueError(f"column {self.name!r} needs a unit ('-' for dimensionless)")

    def __str__(self):
        return f"{self.name}[{self.unit}]"


@dataclass
class ResultTable:
    """Numeric table with unit-annotated columns and ordered metadata."""

    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = [c if isinstance(c, Column) else Column(*c) for c in self.columns]
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("duplicate column names")
        for row in self.rows:
            self._check(row)

    def _check(self, row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")

    def append(self, row):
        row = [float(x) for x in row]
        self._check(row)
        self.rows.append(row)

    @property
    def names(self):
        return [c.name for c in self.columns]

    def column(self, name):
        i = self.names.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def as_array(self):
        return np.array(self.rows, dtype=float).reshape(len(self.rows), len(self.columns))


def _cell(x):
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def _meta_value(v):
    return str(v).replace("\n", " ")


def format_csv(table):
    """CSV text of ``table``."""
    lines = [f"# {k}: {_meta_value(v)}" for k, v in table.metadata.items()]
    lines.append(",".join(str(c) for c in table.columns))
    lines.extend(",".join(_cell(x) for x in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def emit_csv(table, path):
    """Write ``table`` to ``path``; I/O errors propagate."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(table))


def parse_csv(text):
    """Inverse of :func:`format_csv`."""
    metadata = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        key, _, value = lines[i][1:].strip().partition(":")
        metadata[key.strip()] = value.strip()
        i += 1
    if i == len(lines):
        raise ValueError("missing header line")
    columns = []
    for cell in lines[i].split(","):
        m = _HEADER.match(cell)
        if m is None:
            raise ValueError(f"malformed header cell {cell!r}")
        columns.append(Column(m.group(1), m.group(2)))
    rows = [[float(x) for x in line.split(",")] for line in lines[i + 1 :] if line]
    return ResultTable(columns, rows, metadata)


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        return parse_csv(fh.read())
