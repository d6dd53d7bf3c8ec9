"""
CSV and JSON emission for sweep results.

CSV: header row, comma separated, LF line endings, UTF-8, numbers at a fixed
count of significant digits. JSON: one object with "config" and "data";
non-finite numbers become null.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from photonics.conf import get_setting

from .entities import OutputFormat, SweepResult

logger = logging.getLogger(__name__)


def _digits(digits: Optional[int]) -> int:
    return digits or get_setting("SIGNIFICANT_DIGITS", "SWEEPS")


def _clean(value: Any, digits: int) -> Any:
    """Plain JSON value: numpy scalars unwrapped, floats rounded, inf/nan -> None."""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {str(key): _clean(item, digits) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item, digits) for item in value]
    if isinstance(value, np.ndarray):
        return [_clean(item, digits) for item in value.tolist()]
    return value


def render_csv(result: SweepResult, digits: Optional[int] = None) -> str:
    return result.frame.to_csv(
        index=result.is_grid,
        float_format=f"%.{_digits(digits)}g",
        lineterminator="\n",
    )


def _frame_payload(frame: pd.DataFrame) -> Union[Dict, list]:
    if frame.index.name is not None:
        return {
            "index_name": frame.index.name,
            "index": frame.index.tolist(),
            "columns": [str(column) for column in frame.columns],
            "values": frame.to_numpy().tolist(),
        }
    return frame.to_dict(orient="records")


def render_json(result: SweepResult, digits: Optional[int] = None) -> str:
    digits = _digits(digits)
    payload = {
        "config": _clean({"sweep": result.name, **result.config}, digits),
        "data": _clean(_frame_payload(result.frame), digits),
    }
    if result.summary:
        payload["summary"] = _clean(result.summary, digits)
    return json.dumps(payload, indent=2) + "\n"


def render(
    result: SweepResult,
    output_format: Union[OutputFormat, str] = OutputFormat.CSV,
    digits: Optional[int] = None,
) -> str:
    if OutputFormat(output_format) is OutputFormat.JSON:
        return render_json(result, digits)
    return render_csv(result, digits)


def write_result(
    result: SweepResult,
    path: Union[str, Path],
    output_format: Union[OutputFormat, str] = OutputFormat.CSV,
    digits: Optional[int] = None,
) -> Path:
    """Write a result to disk, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(result, output_format, digits), encoding="utf-8", newline="")
    logger.info(f"Wrote {result.name} ({len(result.frame)} rows) to {path}")
    return path


def read_grid_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Load a grid written by write_result, index in the first column."""
    return pd.read_csv(path, index_col=0)
