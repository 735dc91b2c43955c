"""
Result files: versioned CSV rows and the JSON run summary.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np


logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _format(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_rows_csv(path: Union[str, Path], rows: Sequence[Dict[str, Any]],
                   columns: Optional[Sequence[str]] = None, schema_version: int = SCHEMA_VERSION) -> Path:
    """
    Write rows in the given order with a schema comment line.

    Floats are written with repr so that reruns produce byte-identical files.
    Columns default to the keys of the first row.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    with path.open("w", newline="") as fh:
        fh.write(f"# schema_version: {schema_version}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(row.get(c, "")) for c in columns])
    logger.info("Wrote %d rows to %s", len(rows), path)
    return path


def read_rows_csv(path: Union[str, Path]) -> List[Dict[str, float]]:
    """Read a file written by write_rows_csv back into float rows."""
    path = Path(path)
    with path.open(newline="") as fh:
        first = fh.readline()
        if not first.startswith("# schema_version:"):
            raise ValueError(f"{path} has no schema_version line")
        reader = csv.DictReader(fh)
        return [{k: float(v) for k, v in row.items()} for row in reader]


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def write_summary(path: Union[str, Path], payload: Dict[str, Any]) -> Path:
    """Write a sorted-key JSON summary; non-finite floats are written as strings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    logger.info("Wrote summary to %s", path)
    return path
