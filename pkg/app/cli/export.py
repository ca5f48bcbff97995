# app/cli/export.py
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.15g"


def round_floats(obj: Any, digits: int = 15) -> Any:
    """Every float rounded to `digits` significant digits; NaN and ±inf become null."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {str(k): round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj


def _emit(text: str, out: Path | None) -> Path | None:
    if out is None:
        sys.stdout.write(text)
        return None
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    logger.info(f"wrote {out}")
    return out


def write_csv(frame: pd.DataFrame, out: Path | None) -> Path | None:
    return _emit(frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"), out)


def write_json(params: dict, result: Any, diagnostics: dict, out: Path | None) -> Path | None:
    report = round_floats({"params": params, "result": result, "diagnostics": diagnostics})
    return _emit(json.dumps(report, indent=2) + "\n", out)


def read_json(path: Path) -> dict:
    with path.open() as fh:
        return json.load(fh)
