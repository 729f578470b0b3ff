"""
JSON and CSV codecs for grids, sample sets, state specs, Wigner grids and reports.

Floats are written with Python's shortest round-trip representation, so files
re-read bit-identically. CSV files use LF line endings and a fixed header;
their provenance goes to a JSON sidecar next to them.
"""

import json
import math
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy import interpolate

from homodyne_uncertainty.config import MIN_SAMPLES_PER_PHASE
from homodyne_uncertainty.exceptions import DataFormatError, GridError
from homodyne_uncertainty.logger import get_logger
from homodyne_uncertainty.radon import NORMALIZATION, WignerGrid
from homodyne_uncertainty.tomogram_model import OpticalTomogramGrid, QuadratureSampleSet
from homodyne_uncertainty.uncertainty import UncertaintyReport

logger = get_logger(__name__)

SAMPLE_HEADER = "theta,x"
GRID_CSV_HEADER = "theta,x,w"
F_CURVE_HEADER = "theta,f,se"
WIGNER_CSV_HEADER = "q,p,w"
SLICE_HEADER = "q,w"


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _number(value: Optional[float]) -> str:
    if value is None:
        return ""
    return repr(float(value))


def load_json(path: str) -> Any:
    """
    Load a JSON document

    Raises:
        DataFormatError: If the file is missing or is not valid JSON
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise DataFormatError(f"File '{path}' not found") from e
    except json.JSONDecodeError as e:
        raise DataFormatError(f"File '{path}' is not valid JSON: {str(e)}") from e


def dump_json(data: Any, path: str) -> str:
    """Write a JSON document and return its path"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, allow_nan=False, default=_to_builtin)
        f.write("\n")
    logger.debug(f"Wrote {path}")
    return path


def _write_lines(path: str, header: str, lines: Iterable[str]) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(header + "\n")
        for line in lines:
            f.write(line + "\n")
    logger.debug(f"Wrote {path}")
    return path


def sidecar_path(path: str, kind: str = "provenance") -> str:
    """Path of the JSON sidecar for a CSV output: <stem>.<kind>.json"""
    stem, _ = os.path.splitext(path)
    return f"{stem}.{kind}.json"


def _require(data: Any, keys: Sequence[str], what: str) -> None:
    if not isinstance(data, dict):
        raise DataFormatError(f"{what} must be a JSON object")
    missing = [key for key in keys if key not in data]
    if missing:
        raise DataFormatError(f"{what} is missing keys: {', '.join(missing)}")


# ---------------------------------------------------------------------------
# Tomogram grids
# ---------------------------------------------------------------------------

def grid_to_dict(grid: OpticalTomogramGrid, provenance: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return {
        "thetas": grid.thetas.tolist(),
        "xs": grid.xs.tolist(),
        "w": grid.w.tolist(),
        "provenance": {**dict(grid.metadata), **dict(provenance or {})},
    }


def grid_from_dict(data: Any) -> OpticalTomogramGrid:
    """
    Raises:
        DataFormatError: If keys are missing or arrays are not numeric
        GridError: If the arrays violate the grid invariants
    """
    _require(data, ("thetas", "xs", "w"), "Tomogram grid")
    try:
        thetas = np.asarray(data["thetas"], dtype=float)
        xs = np.asarray(data["xs"], dtype=float)
        w = np.asarray(data["w"], dtype=float)
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"Tomogram grid arrays must be numeric: {str(e)}") from e
    return OpticalTomogramGrid(thetas, xs, w, dict(data.get("provenance") or {}))


def write_grid(grid: OpticalTomogramGrid, path: str, provenance: Optional[Dict[str, Any]] = None) -> str:
    return dump_json(grid_to_dict(grid, provenance), path)


def read_grid(path: str) -> OpticalTomogramGrid:
    grid = grid_from_dict(load_json(path))
    logger.info(f"Loaded {grid.thetas.size}x{grid.xs.size} tomogram grid from {path}")
    return grid


def write_grid_csv(grid: OpticalTomogramGrid, path: str, provenance: Optional[Dict[str, Any]] = None) -> str:
    """Long format, one (theta, x, w) triple per line, rows in theta order"""
    lines = (
        f"{_number(theta)},{_number(x)},{_number(value)}"
        for theta, row in zip(grid.thetas, grid.w)
        for x, value in zip(grid.xs, row)
    )
    _write_lines(path, GRID_CSV_HEADER, lines)
    dump_json({"provenance": {**dict(grid.metadata), **dict(provenance or {})}}, sidecar_path(path))
    return path


# ---------------------------------------------------------------------------
# Sample sets
# ---------------------------------------------------------------------------

def write_samples_csv(samples: QuadratureSampleSet, path: str, provenance: Optional[Dict[str, Any]] = None) -> str:
    """
    Write records as `theta,x` lines and the sample metadata (plan, state,
    RNG) to the `<stem>.plan.json` sidecar
    """
    lines = (f"{_number(theta)},{_number(x)}" for theta, x in zip(samples.thetas, samples.xs))
    _write_lines(path, SAMPLE_HEADER, lines)
    dump_json({"provenance": {**dict(samples.metadata), **dict(provenance or {})}}, sidecar_path(path, "plan"))
    logger.info(f"Wrote {len(samples)} samples to {path}")
    return path


def read_samples_csv(path: str, min_samples_per_phase: int = MIN_SAMPLES_PER_PHASE) -> QuadratureSampleSet:
    """
    Read a sample CSV; the plan sidecar, when present, becomes the metadata

    Raises:
        DataFormatError: On a wrong header or a malformed record
    """
    thetas: List[float] = []
    xs: List[float] = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            header = f.readline().rstrip("\r\n")
            if header != SAMPLE_HEADER:
                raise DataFormatError(f"Sample CSV '{path}' must start with header '{SAMPLE_HEADER}', got '{header}'")
            for number, line in enumerate(f, start=2):
                line = line.rstrip("\r\n")
                if not line:
                    continue
                fields = line.split(",")
                if len(fields) != 2:
                    raise DataFormatError(f"{path}:{number}: expected 2 fields, got {len(fields)}")
                try:
                    theta, x = float(fields[0]), float(fields[1])
                except ValueError as e:
                    raise DataFormatError(f"{path}:{number}: {str(e)}") from e
                if not (math.isfinite(theta) and math.isfinite(x)):
                    raise DataFormatError(f"{path}:{number}: non-finite value")
                thetas.append(theta)
                xs.append(x)
    except FileNotFoundError as e:
        raise DataFormatError(f"File '{path}' not found") from e

    metadata: Dict[str, Any] = {"source": path}
    plan_path = sidecar_path(path, "plan")
    if os.path.exists(plan_path):
        metadata.update(load_json(plan_path).get("provenance", {}))
    logger.info(f"Loaded {len(xs)} samples from {path}")
    return QuadratureSampleSet(np.asarray(thetas), np.asarray(xs), metadata, min_samples_per_phase)


def samples_to_dict(samples: QuadratureSampleSet, provenance: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return {
        "thetas": samples.thetas.tolist(),
        "xs": samples.xs.tolist(),
        "provenance": {**dict(samples.metadata), **dict(provenance or {})},
    }


def samples_from_dict(data: Any, min_samples_per_phase: int = MIN_SAMPLES_PER_PHASE) -> QuadratureSampleSet:
    _require(data, ("thetas", "xs"), "Sample set")
    try:
        thetas = np.asarray(data["thetas"], dtype=float)
        xs = np.asarray(data["xs"], dtype=float)
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"Sample arrays must be numeric: {str(e)}") from e
    return QuadratureSampleSet(thetas, xs, dict(data.get("provenance") or {}), min_samples_per_phase)


def write_samples_json(samples: QuadratureSampleSet, path: str, provenance: Optional[Dict[str, Any]] = None) -> str:
    return dump_json(samples_to_dict(samples, provenance), path)


def read_samples(path: str, min_samples_per_phase: int = MIN_SAMPLES_PER_PHASE) -> QuadratureSampleSet:
    """Read a sample set from CSV (by extension) or JSON"""
    if path.lower().endswith(".csv"):
        return read_samples_csv(path, min_samples_per_phase)
    return samples_from_dict(load_json(path), min_samples_per_phase)


def read_tomographic_data(path: str, min_samples_per_phase: int = MIN_SAMPLES_PER_PHASE):
    """
    Read either a tomogram grid or a sample set

    CSV files are sample sets; JSON documents with a "w" array are grids,
    otherwise sample sets.
    """
    if path.lower().endswith(".csv"):
        return read_samples_csv(path, min_samples_per_phase)
    data = load_json(path)
    if isinstance(data, dict) and "w" in data:
        grid = grid_from_dict(data)
        logger.info(f"Loaded {grid.thetas.size}x{grid.xs.size} tomogram grid from {path}")
        return grid
    return samples_from_dict(data, min_samples_per_phase)


# ---------------------------------------------------------------------------
# Wigner grids
# ---------------------------------------------------------------------------

def wigner_to_dict(wigner: WignerGrid, provenance: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return {
        "qs": wigner.qs.tolist(),
        "ps": wigner.ps.tolist(),
        "w": wigner.w.tolist(),
        "normalization": NORMALIZATION,
        "provenance": {**dict(wigner.metadata), **dict(provenance or {})},
    }


def wigner_from_dict(data: Any) -> WignerGrid:
    _require(data, ("qs", "ps", "w"), "Wigner grid")
    normalization = data.get("normalization", NORMALIZATION)
    if normalization != NORMALIZATION:
        raise DataFormatError(f"Unsupported Wigner normalization {normalization!r}; expected {NORMALIZATION!r}")
    try:
        qs = np.asarray(data["qs"], dtype=float)
        ps = np.asarray(data["ps"], dtype=float)
        w = np.asarray(data["w"], dtype=float)
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"Wigner grid arrays must be numeric: {str(e)}") from e
    return WignerGrid(qs, ps, w, dict(data.get("provenance") or {}))


def write_wigner(wigner: WignerGrid, path: str, provenance: Optional[Dict[str, Any]] = None) -> str:
    return dump_json(wigner_to_dict(wigner, provenance), path)


def read_wigner(path: str) -> WignerGrid:
    return wigner_from_dict(load_json(path))


def write_wigner_csv(wigner: WignerGrid, path: str, provenance: Optional[Dict[str, Any]] = None) -> str:
    lines = (
        f"{_number(q)},{_number(p)},{_number(value)}"
        for q, row in zip(wigner.qs, wigner.w)
        for p, value in zip(wigner.ps, row)
    )
    _write_lines(path, WIGNER_CSV_HEADER, lines)
    dump_json(
        {"normalization": NORMALIZATION, "provenance": {**dict(wigner.metadata), **dict(provenance or {})}},
        sidecar_path(path),
    )
    return path


def wigner_slice(wigner: WignerGrid, p: float) -> np.ndarray:
    """
    W(q, p) along the q axis at fixed p

    Raises:
        GridError: If p lies outside the p axis
    """
    if not wigner.ps[0] <= p <= wigner.ps[-1]:
        raise GridError(f"Slice p={p} lies outside the p axis [{wigner.ps[0]}, {wigner.ps[-1]}]")
    interpolator = interpolate.RegularGridInterpolator((wigner.qs, wigner.ps), wigner.w)
    return interpolator(np.column_stack((wigner.qs, np.full(wigner.qs.size, p))))


def write_wigner_slice_csv(wigner: WignerGrid, p: float, path: str, provenance: Optional[Dict[str, Any]] = None) -> str:
    values = wigner_slice(wigner, p)
    _write_lines(path, SLICE_HEADER, (f"{_number(q)},{_number(w)}" for q, w in zip(wigner.qs, values)))
    dump_json(
        {
            "normalization": NORMALIZATION,
            "slice_p": p,
            "provenance": {**dict(wigner.metadata), **dict(provenance or {})},
        },
        sidecar_path(path),
    )
    return path


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def write_report(report: UncertaintyReport, path: str) -> str:
    return dump_json(report.to_dict(), path)


def write_f_curve_csv(report: UncertaintyReport, path: str) -> str:
    """Write the F(theta) scan as `theta,f,se` and the full report to the sidecar"""
    lines = (f"{_number(point.theta)},{_number(point.f)},{_number(point.standard_error)}" for point in report.f_curve)
    _write_lines(path, F_CURVE_HEADER, lines)
    dump_json(report.to_dict(), sidecar_path(path))
    return path
