"""Diagnostic time series as deterministic CSV.

One row per diagnostic evaluation; a fixed header row names the columns.
All floats are written with 17 significant digits, so identical runs
produce byte-identical files and values survive a round trip exactly.
The final line is a comment recording why the run stopped, e.g.
``# terminated: reached t_end``.
"""

import numpy as np

from .errors import DataError

FOOTER_PREFIX = "# terminated: "


def format_value(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


class TimeseriesWriter:
    """Streams rows to a CSV file, flushing after each write."""

    def __init__(self, path, columns):
        self.columns = list(columns)
        self._fh = open(path, "w")
        self._fh.write(",".join(self.columns) + "\n")
        self._fh.flush()
        self._closed = False

    def write_row(self, values):
        if isinstance(values, dict):
            row = [values[c] for c in self.columns]
        else:
            row = list(values)
        if len(row) != len(self.columns):
            raise DataError(
                f"row has {len(row)} values, expected {len(self.columns)}")
        self._fh.write(",".join(format_value(v) for v in row) + "\n")
        self._fh.flush()

    def finish(self, reason):
        if not self._closed:
            self._fh.write(FOOTER_PREFIX + reason + "\n")
            self._fh.close()
            self._closed = True

    def close(self):
        if not self._closed:
            self._fh.close()
            self._closed = True


def read_timeseries(path):
    """Read a CSV written by TimeseriesWriter.

    Returns (columns, data, reason) where data is a 2-D float array with
    one row per record and reason is the footer text or None.
    """
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines:
        raise DataError(f"{path}: empty time series file")
    reason = None
    rows = []
    columns = lines[0].split(",")
    for ln in lines[1:]:
        if not ln:
            continue
        if ln.startswith(FOOTER_PREFIX):
            reason = ln[len(FOOTER_PREFIX):]
            continue
        if ln.startswith("#"):
            continue
        vals = ln.split(",")
        if len(vals) != len(columns):
            raise DataError(f"{path}: malformed row {ln!r}")
        rows.append([float(v) for v in vals])
    data = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return columns, data, reason
