"""CSV serialization of simulation records.

Floats are written with ``repr`` (shortest string that round-trips the
double), angles in degrees, disabled estimators as empty fields and rows
terminated by a bare ``\\n``. The output is locale-independent.
"""

from __future__ import annotations

import csv
import math

from .simulation import SampleRecord

HEADER = (
    "t",
    "ij",
    "theta_cmd",
    "v_true",
    "v_meas",
    "alpha_hat_deg",
    "vth_rwls",
    "zth_rwls",
    "vth_kf",
    "zth_kf",
    "alpha_true_deg",
    "zth_true",
    "vth_true",
)

# column -> (record field, degrees?)
_COLUMNS = {
    "t": ("t", False),
    "ij": ("ij", False),
    "theta_cmd": ("theta_cmd", False),
    "v_true": ("v_true", False),
    "v_meas": ("v_meas", False),
    "alpha_hat_deg": ("alpha_hat", True),
    "vth_rwls": ("vth_hat_rwls", False),
    "zth_rwls": ("zth_hat_rwls", False),
    "vth_kf": ("vth_hat_kf", False),
    "zth_kf": ("zth_hat_kf", False),
    "alpha_true_deg": ("alpha_true", True),
    "zth_true": ("zth_true", False),
    "vth_true": ("vth_true", False),
}
_OPTIONAL = {"alpha_hat_deg", "vth_rwls", "zth_rwls", "vth_kf", "zth_kf"}


class MalformedCSVError(ValueError):
    pass


def _fmt(value, degrees):
    if value is None:
        return ""
    return repr(float(math.degrees(value) if degrees else value))


def write_records(records, fh):
    """Write ``records`` to an open text file; returns the number of rows."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(HEADER)
    n = 0
    for rec in records:
        writer.writerow([_fmt(getattr(rec, attr), deg) for attr, deg in _COLUMNS.values()])
        n += 1
    return n


def read_records(fh):
    """Parse a CSV written by :func:`write_records` back into records.

    Raises:
        MalformedCSVError: wrong header, bad number, or no data rows.
    """
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(header) != HEADER:
        raise MalformedCSVError(f"expected header {','.join(HEADER)!r}, got {header!r}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(HEADER):
            raise MalformedCSVError(f"line {lineno}: expected {len(HEADER)} fields, got {len(row)}")
        values = {}
        for col, text in zip(HEADER, row):
            attr, deg = _COLUMNS[col]
            if text == "" and col in _OPTIONAL:
                values[attr] = None
                continue
            try:
                num = float(text)
            except ValueError:
                raise MalformedCSVError(f"line {lineno}: column {col}: not a number: {text!r}") from None
            values[attr] = math.radians(num) if deg else num
        records.append(SampleRecord(**values))
    if not records:
        raise MalformedCSVError("no data rows")
    return records
