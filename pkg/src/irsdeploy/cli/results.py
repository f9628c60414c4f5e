"""Result tables and their delimited / report renderings."""

import math
import numbers
import os
from dataclasses import dataclass, field

SIG_DIGITS = 12


@dataclass
class ResultTable:
    """Named rectangular table; cells are numbers or short labels."""

    name: str
    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        self.rows = [tuple(r) for r in self.rows]
        for i, r in enumerate(self.rows):
            if len(r) != len(self.columns):
                raise ValueError(f"table {self.name}: row {i} has {len(r)} cells, "
                                 f"expected {len(self.columns)}")

    def column(self, name):
        j = self.columns.index(name)
        return [r[j] for r in self.rows]


def format_cell(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, f".{SIG_DIGITS}g")
    s = str(v)
    if any(c in s for c in ",\n\r#\"") or s != s.strip():
        raise ValueError(f"label {s!r} cannot be written to a delimited table")
    return s


def parse_cell(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def render_delimited(table, delimiter=","):
    lines = [f"# table: {table.name}"]
    lines += [f"# {k}: {v}" for k, v in table.metadata.items()]
    lines.append(delimiter.join(table.columns))
    lines += [delimiter.join(format_cell(v) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def _short(v):
    if isinstance(v, numbers.Real) and not isinstance(v, (bool, numbers.Integral)):
        return format(float(v), ".6g")
    return format_cell(v)


def render_report(tables, title=None, notes=()):
    """Human-readable summary of one experiment's tables."""
    out = []
    if title:
        out += [title, "=" * len(title), ""]
    for t in tables:
        out.append(f"[{t.name}]")
        for k, v in t.metadata.items():
            if k not in ("table",):
                out.append(f"  {k}: {v}")
        cells = [[_short(v) for v in r] for r in t.rows]
        widths = [max([len(c)] + [len(r[j]) for r in cells]) for j, c in enumerate(t.columns)]
        out.append("  " + "  ".join(c.rjust(w) for c, w in zip(t.columns, widths)))
        for r in cells:
            out.append("  " + "  ".join(v.rjust(w) for v, w in zip(r, widths)))
        out.append("")
    out += list(notes)
    return "\n".join(out).rstrip() + "\n"


def emit(table, path, format="delimited"):
    """Write one table (delimited) or a list of tables (report) to ``path``."""
    if format == "delimited":
        text = render_delimited(table)
    elif format == "report":
        text = render_report(table if isinstance(table, (list, tuple)) else [table])
    else:
        raise ValueError(f"unknown format {format!r}")
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None
    return path


def read_table(path, delimiter=","):
    """Inverse of the delimited writer."""
    meta, name, header, rows = {}, None, None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                if key == "table":
                    name = value
                else:
                    meta[key] = value
            elif header is None:
                header = line.split(delimiter)
            elif line:
                rows.append(tuple(parse_cell(c) for c in line.split(delimiter)))
    if header is None:
        raise ValueError(f"{path}: no header line")
    return ResultTable(name or os.path.splitext(os.path.basename(path))[0], header, rows, meta)
