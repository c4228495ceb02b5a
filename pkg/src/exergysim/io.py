"""File ingestion and report emission.

Wire formats (all plain delimited text, ``#`` comments and blank lines
ignored, comma or whitespace separated):

* drive cycle: two columns, time in s and target speed in km/h; time starts
  at 0 and increases strictly.
* map grid: first row the speed breakpoints in rad/s, every further row a
  torque breakpoint in Nm followed by one value per speed column.
* battery curve: three columns, SoC, cell open-circuit voltage in V, cell
  resistance in ohm; SoC strictly increasing.

Reports are written with ``repr``-exact floats so a re-parse reproduces the
run bit for bit.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import InputParseError
from .sim import SERIES_COLUMNS

KMH_TO_MS = 1.0 / 3.6


@dataclass(frozen=True)
class DriveCycle:
    t: np.ndarray  # s
    v: np.ndarray  # m/s

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        if t.size == 0 or t.shape != v.shape:
            raise ValueError("cycle needs equal-length, nonempty time and speed arrays")
        if t[0] != 0.0:
            raise ValueError("cycle time must start at 0")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("cycle time must increase strictly")
        if np.any(v < 0.0):
            raise ValueError("cycle speeds must be nonnegative")

    @property
    def duration(self):
        return float(self.t[-1])


def _data_lines(path):
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",") if "," in line else line.split()
            yield lineno, [p.strip() for p in parts]


def _floats(parts, path, lineno):
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise InputParseError("not a numeric row", path=str(path), line=lineno) from None


def load_cycle(path):
    """Parse a (s, km/h) cycle file into SI units."""
    times = []
    speeds = []
    for lineno, parts in _data_lines(path):
        if len(parts) != 2:
            raise InputParseError(
                f"expected 2 columns, got {len(parts)}", path=str(path), line=lineno
            )
        t, v_kmh = _floats(parts, path, lineno)
        if times and t <= times[-1]:
            raise InputParseError("time must increase strictly", path=str(path), line=lineno)
        if v_kmh < 0.0:
            raise InputParseError("negative speed", path=str(path), line=lineno)
        times.append(t)
        speeds.append(v_kmh * KMH_TO_MS)
    if not times:
        raise InputParseError("no samples found", path=str(path))
    if times[0] != 0.0:
        raise InputParseError("cycle must start at t = 0", path=str(path), line=1)
    return DriveCycle(t=np.asarray(times), v=np.asarray(speeds))


def load_grid(path):
    """Parse a map grid file into ``(tau_bp, omega_bp, values)``.

    ``values[i, j]`` belongs to torque ``tau_bp[i]`` and speed
    ``omega_bp[j]``.
    """
    rows = list(_data_lines(path))
    if len(rows) < 3:
        raise InputParseError("grid needs a speed row and at least two torque rows", path=str(path))
    lineno0, head = rows[0]
    omega_bp = np.asarray(_floats(head, path, lineno0))
    n_cols = omega_bp.size
    tau_bp = []
    values = []
    for lineno, parts in rows[1:]:
        if len(parts) != n_cols + 1:
            raise InputParseError(
                f"ragged row: expected {n_cols + 1} entries, got {len(parts)}",
                path=str(path),
                line=lineno,
            )
        nums = _floats(parts, path, lineno)
        tau_bp.append(nums[0])
        values.append(nums[1:])
    tau_bp = np.asarray(tau_bp)
    values = np.asarray(values)
    if np.any(np.diff(omega_bp) <= 0.0) or np.any(np.diff(tau_bp) <= 0.0):
        raise InputParseError("breakpoints must increase strictly", path=str(path))
    if np.any(~np.isfinite(values)):
        raise InputParseError("grid contains non-finite values", path=str(path))
    return tau_bp, omega_bp, values


def load_curve(path):
    """Parse a battery (SoC, V_oc, R0) table into three arrays."""
    soc = []
    ocv = []
    r0 = []
    for lineno, parts in _data_lines(path):
        if len(parts) != 3:
            raise InputParseError(
                f"expected 3 columns, got {len(parts)}", path=str(path), line=lineno
            )
        z, v, r = _floats(parts, path, lineno)
        if soc and z <= soc[-1]:
            raise InputParseError("SoC must increase strictly", path=str(path), line=lineno)
        soc.append(z)
        ocv.append(v)
        r0.append(r)
    if len(soc) < 2:
        raise InputParseError("curve needs at least two rows", path=str(path))
    arrays = tuple(np.asarray(a) for a in (soc, ocv, r0))
    if any(np.any(~np.isfinite(a)) for a in arrays):
        raise InputParseError("curve contains non-finite values", path=str(path))
    return arrays


TIMESERIES_FILE = "timeseries.csv"
SUMMARY_FILE = "summary.txt"
LEDGER_FILE = "ledger.json"


def emit_report(result, outdir):
    """Write the three report files of a finished run and return their paths.

    ``timeseries.csv`` holds one row per simulation step plus the terminal
    state, ``summary.txt`` the scalar results as ``key = value`` lines, and
    ``ledger.json`` the machine-readable availability ledger.
    """
    os.makedirs(outdir, exist_ok=True)
    ts_path = os.path.join(outdir, TIMESERIES_FILE)
    with open(ts_path, "w") as fh:
        fh.write(",".join(SERIES_COLUMNS) + "\n")
        columns = [result.series[name] for name in SERIES_COLUMNS]
        for k in range(result.time.size):
            fh.write(",".join(repr(float(col[k])) for col in columns) + "\n")

    sm_path = os.path.join(outdir, SUMMARY_FILE)
    with open(sm_path, "w") as fh:
        for key, value in result.summary.items():
            fh.write(f"{key} = {value!r}\n")

    lg_path = os.path.join(outdir, LEDGER_FILE)
    payload = {
        "terms": result.ledger.as_dict(),
        "total": result.ledger.total(),
        "total_loss": result.ledger.total_loss(),
        "loss_breakdown_pct": result.ledger.close(),
    }
    with open(lg_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return ts_path, sm_path, lg_path


def load_timeseries(path):
    """Re-parse an emitted time-series file into a column dict."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = [[] for _ in header]
        for lineno, raw in enumerate(fh, start=2):
            parts = raw.strip().split(",")
            if len(parts) != len(header):
                raise InputParseError("ragged row", path=str(path), line=lineno)
            for slot, p in zip(data, parts):
                slot.append(float(p))
    return {name: np.asarray(vals) for name, vals in zip(header, data)}
