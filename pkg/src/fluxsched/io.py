"""CSV and JSON artifact writers and readers.

All writers are deterministic: a fixed 17-significant-digit float
format, no timestamps, and a header comment carrying the tool version
and the hash of the generating config so outputs can be traced and
diffed byte-for-byte.

Fluxes cross the file boundary in milli flux quanta; everything inside
the package is radians.
"""

import csv
import hashlib
import json
import re

import numpy as np

from ._version import __version__
from .constants import mphi0_to_rad, rad_to_mphi0
from .inversion import FluxScheduleTable
from .pauli import PauliSchedule

FLOAT_FMT = "%.16e"


class FileFormatError(ValueError):
    """Raised when a CSV file does not match the expected column layout."""


def config_hash(config):
    """Stable hash of a config mapping (sha256 of canonical JSON)."""
    if config is None:
        return "none"
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _header_lines(kind, cfg_hash):
    return [
        f"# fluxsched {__version__} {kind}",
        f"# config-hash: {cfg_hash if cfg_hash else 'none'}",
    ]


def _write_csv(path, kind, cfg_hash, columns, rows):
    with open(path, "w", newline="") as fh:
        for line in _header_lines(kind, cfg_hash):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([FLOAT_FMT % v for v in row])


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise FileFormatError(f"{path}: no header row found")
    header = rows[0]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as err:
        raise FileFormatError(f"{path}: non-numeric cell ({err})") from None
    if data.size == 0:
        raise FileFormatError(f"{path}: no data rows")
    if data.shape[1] != len(header):
        raise FileFormatError(
            f"{path}: {data.shape[1]} columns but {len(header)} header names"
        )
    return header, data


def write_pauli_schedule(path, schedule, cfg_hash=None):
    """Columns: s, h_x_<i>, h_z_<i>, J_<a>_<b>."""
    columns = ["s"]
    blocks = [schedule.s[:, None]]
    n = schedule.n_qubits
    columns += [f"h_x_{i}" for i in range(n)]
    blocks.append(schedule.h_x.T)
    columns += [f"h_z_{i}" for i in range(n)]
    blocks.append(schedule.h_z.T)
    for (a, b) in schedule.pairs:
        columns.append(f"J_{a}_{b}")
        blocks.append(schedule.j[(a, b)][:, None])
    _write_csv(path, "pauli-schedule", cfg_hash, columns, np.hstack(blocks))


def read_pauli_schedule(path):
    header, data = _read_csv(path)
    if header[0] != "s":
        raise FileFormatError(f"{path}: first column must be s, got {header[0]!r}")
    h_x = {}
    h_z = {}
    j = {}
    for col, name in enumerate(header[1:], start=1):
        m = re.fullmatch(r"h_([xz])_(\d+)", name)
        if m:
            (h_x if m.group(1) == "x" else h_z)[int(m.group(2))] = data[:, col]
            continue
        m = re.fullmatch(r"J_(\d+)_(\d+)", name)
        if m:
            j[(int(m.group(1)), int(m.group(2)))] = data[:, col]
            continue
        raise FileFormatError(f"{path}: unrecognized column {name!r}")
    if sorted(h_x) != sorted(h_z) or sorted(h_x) != list(range(len(h_x))):
        raise FileFormatError(f"{path}: qubit columns must pair up from index 0")
    n = len(h_x)
    return PauliSchedule(
        s=data[:, 0],
        h_x=np.vstack([h_x[i] for i in range(n)]),
        h_z=np.vstack([h_z[i] for i in range(n)]),
        j=j,
    )


def write_flux_table(path, table, cfg_hash=None):
    """Columns: s, phi_x_mPhi0_<k>, phi_z_mPhi0_<k> (milli flux quanta)."""
    columns = ["s"]
    blocks = [table.s[:, None]]
    for k in range(table.n_elements):
        columns += [f"phi_x_mPhi0_{k}", f"phi_z_mPhi0_{k}"]
        blocks.append(rad_to_mphi0(table.phi_x[k])[:, None])
        blocks.append(rad_to_mphi0(table.phi_z[k])[:, None])
    _write_csv(path, "flux-table", cfg_hash, columns, np.hstack(blocks))


def read_flux_table(path):
    header, data = _read_csv(path)
    if header[0] != "s":
        raise FileFormatError(f"{path}: first column must be s, got {header[0]!r}")
    phi_x = {}
    phi_z = {}
    for col, name in enumerate(header[1:], start=1):
        m = re.fullmatch(r"phi_([xz])_mPhi0_(\d+)", name)
        if not m:
            raise FileFormatError(f"{path}: unrecognized column {name!r}")
        target = phi_x if m.group(1) == "x" else phi_z
        target[int(m.group(2))] = mphi0_to_rad(data[:, col])
    if sorted(phi_x) != sorted(phi_z) or sorted(phi_x) != list(range(len(phi_x))):
        raise FileFormatError(f"{path}: flux columns must pair up from index 0")
    n = len(phi_x)
    return FluxScheduleTable(
        s=data[:, 0],
        phi_x=np.vstack([phi_x[k] for k in range(n)]),
        phi_z=np.vstack([phi_z[k] for k in range(n)]),
    )


def write_spectrum(path, s, energies, cfg_hash=None):
    """Columns: s, E_0 ... E_{k-1} (GHz)."""
    energies = np.atleast_2d(energies)
    columns = ["s"] + [f"E_{i}" for i in range(energies.shape[1])]
    _write_csv(
        path, "spectrum", cfg_hash, columns,
        np.hstack([np.asarray(s)[:, None], energies]),
    )


def write_population_trace(path, t_grid, populations, cfg_hash=None):
    """Columns: t_a_ns, P_g (and P_1... when more levels are given)."""
    populations = np.asarray(populations)
    if populations.ndim == 1:
        populations = populations[:, None]
    columns = ["t_a_ns", "P_g"] + [f"P_{i}" for i in range(1, populations.shape[1])]
    _write_csv(
        path, "population-trace", cfg_hash, columns,
        np.hstack([np.asarray(t_grid)[:, None], populations]),
    )


def write_summary(path, payload, cfg_hash=None):
    """JSON summary with the same provenance fields as the CSV headers."""
    doc = {
        "tool": f"fluxsched {__version__}",
        "config_hash": cfg_hash if cfg_hash else "none",
    }
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")
