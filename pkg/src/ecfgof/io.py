"""CSV reading and writing for numeric samples.

Input files are comma separated, UTF-8, with '.' as the decimal point.
A first row that does not parse as numbers is taken to be a header.
Empty cells and the usual missing-value markers (``NA``, ``NaN``, ``.``)
count as missing.
"""

import csv
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

MISSING = {"", "na", "nan", "n/a", ".", "null", "none"}


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass
class Table:
    data: np.ndarray
    header: list = None
    dropped: list = field(default_factory=list)  # 1-based line numbers


def _cell(text):
    t = text.strip()
    if t.lower() in MISSING:
        return np.nan
    return float(t)


def _is_numeric_row(row):
    try:
        [_cell(c) for c in row]
    except ValueError:
        return False
    return True


def _select(header, columns, width):
    if not columns:
        return list(range(width))
    out = []
    for c in columns:
        c = str(c).strip()
        if header is not None and c in header:
            out.append(header.index(c))
        elif c.isdigit() and 1 <= int(c) <= width:
            out.append(int(c) - 1)
        else:
            raise DataError(f"unknown column {c!r}")
    return out


def read_csv(path, columns=None, drop_missing=False, where=None):
    """Read a numeric table.

    ``columns`` picks columns by header name or 1-based position.
    ``where`` maps column names (or positions) to a text value; only rows
    whose cell equals it, ignoring case, are kept.  Rows
    with missing cells in the selected columns raise :class:`DataError`
    unless ``drop_missing`` is set, in which case they are dropped and
    their line numbers recorded.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise DataError(f"{path} is not UTF-8 text") from None
    if not rows:
        raise DataError(f"{path} is empty")
    header = None
    if not _is_numeric_row(rows[0][1]):
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path} has a header but no data rows")
    width = len(header) if header is not None else len(rows[0][1])
    cols = _select(header, columns, width)
    filters = [(_select(header, [k], width)[0], str(v).strip().lower()) for k, v in (where or {}).items()]
    values, dropped = [], []
    for line, row in rows:
        if len(row) != width:
            raise DataError(f"line {line}: expected {width} fields, found {len(row)}")
        if any(row[j].strip().lower() != v for j, v in filters):
            continue
        rec = []
        for j in cols:
            try:
                rec.append(_cell(row[j]))
            except ValueError:
                name = header[j] if header is not None else str(j + 1)
                raise DataError(f"line {line}, column {name}: non-numeric value {row[j].strip()!r}") from None
        if any(np.isnan(v) for v in rec):
            if not drop_missing:
                raise DataError(f"line {line}: missing value (use --drop-missing to skip such rows)")
            dropped.append(line)
            continue
        if not all(np.isfinite(rec)):
            raise DataError(f"line {line}: infinite value")
        values.append(rec)
    if not values:
        raise DataError(f"{path} has no complete data rows" + (" matching the filter" if filters else ""))
    names = [header[j] for j in cols] if header is not None else None
    return Table(np.array(values, dtype=float), names, dropped)


def format_row(row):
    return ",".join(f"{v:.17g}" for v in row)


def write_csv(path, data, header=None):
    """Write rows with 17 significant digits (exact round trip for doubles)."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    lines = [] if header is None else [",".join(header)]
    lines.extend(format_row(r) for r in data)
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def load_schema(name):
    """A JSON schema shipped with the package, e.g. ``"study_report"``."""
    text = resources.files("ecfgof").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
