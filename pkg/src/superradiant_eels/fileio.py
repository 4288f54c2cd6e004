"""Deterministic CSV/JSON emission and spectrum CSV ingestion."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from .eels import EELSSpectrum

SPECTRUM_COLUMNS = ("loss_index", "energy_eV", "probability")


def fmt(x) -> str:
    """Round-trip exact, platform independent number formatting."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    return buf.getvalue()


def write_text(path: Path, text: str) -> str:
    """Write ``text`` and return its sha256 digest."""
    data = text.encode()
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def write_csv(path: Path, header, rows) -> str:
    return write_text(path, csv_text(header, rows))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path: Path, obj) -> str:
    return write_text(path, json_text(obj))


def spectrum_rows(sp: EELSSpectrum, prefix=()):
    for ell, e, p in zip(sp.losses, sp.energies, sp.probabilities):
        yield (*prefix, int(ell), float(e), float(p))


def read_spectrum_csv(path: str | Path, hbar_omega0: float | None = None) -> EELSSpectrum:
    """Load a spectrum CSV (``loss_index, energy_eV, probability``).

    Missing loss indices inside the symmetric range are zero-filled; the
    file must be normalized. With ``hbar_omega0=None`` the quantum is taken
    from the energy column.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(SPECTRUM_COLUMNS) <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns {', '.join(SPECTRUM_COLUMNS)}")
        rows = [(int(r["loss_index"]), float(r["energy_eV"]), float(r["probability"])) for r in reader]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    ells = [r[0] for r in rows]
    if len(set(ells)) != len(ells):
        raise ValueError(f"{path}: duplicate loss index")
    L = max(abs(x) for x in ells)
    p = np.zeros(2 * L + 1)
    for ell, _, prob in rows:
        p[ell + L] = prob
    if hbar_omega0 is None:
        nz = [(e / ell) for ell, e, _ in rows if ell != 0]
        hbar_omega0 = nz[0] if nz else 1.0
    return EELSSpectrum(p, hbar_omega0)
