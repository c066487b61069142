"""Writing experiment artifacts: report.json, per-curve .dat files and CSV summaries.

Each file is written to a temporary sibling first and moved into place with ``os.replace``,
so readers never observe a partial file.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Iterator, List, Union

import pandas as pd
from pydantic import ValidationError

from ..errors import InvalidArgumentError, OutputError
from .schemas import ExperimentReport

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
ERRORS_FILE = "errors.csv"
CURVE_NAMES = (
    "J_star",
    "J_tilde_EP",
    "J_tilde_W",
    "J_u_EP",
    "J_u_W",
    "J_u_arbt",
    "J_tilde_APE",
    "J_u_API",
)
TRACE_FILES = {"aqi": "aqi_trace.csv", "vaqi": "vaqi_trace.csv"}


@contextmanager
def _atomic_path(target: Path) -> Iterator[Path]:
    """Yield a temporary path next to ``target`` and move it into place on success."""
    try:
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    except OSError as exc:
        raise OutputError(f"Cannot write {target}: {exc}", path=str(target)) from exc
    os.close(fd)
    tmp_path = Path(tmp_name)
    try:
        yield tmp_path
        os.replace(tmp_path, target)
    except OSError as exc:
        raise OutputError(f"Cannot write {target}: {exc}", path=str(target)) from exc
    finally:
        if tmp_path.exists():
            tmp_path.unlink()


def _write(target: Path, writer: Callable[[Path], None]) -> Path:
    with _atomic_path(target) as tmp_path:
        writer(tmp_path)
    return target


def write_json(target: Union[str, Path], payload: Any) -> Path:
    """Atomically write ``payload`` as indented, key-sorted JSON."""
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    return _write(Path(target), lambda p: p.write_text(text, encoding="utf-8"))


def format_curve(values: List[float]) -> str:
    """Two columns: 1-based state index and the value with ten decimals."""
    return "".join(f"{i + 1} {value:.10f}\n" for i, value in enumerate(values))


def emit_outputs(report: ExperimentReport, out_dir: Union[str, Path]) -> List[Path]:
    """
    Write all artifacts of ``report`` into ``out_dir`` and return their paths.

    Raises:
        OutputError: the directory cannot be created or a file cannot be written.
    """
    directory = Path(out_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"Cannot create output directory {directory}: {exc}", path=str(directory)) from exc

    written = [write_json(directory / REPORT_FILE, report.model_dump(mode="json"))]

    for name in CURVE_NAMES:
        if name in report.curves:
            text = format_curve(report.curves[name])
            written.append(_write(directory / f"{name}.dat", lambda p, t=text: p.write_text(t, encoding="utf-8")))

    errors = pd.DataFrame(
        [{"curve": name, "sup_norm_error": value} for name, value in report.errors.items()],
        columns=["curve", "sup_norm_error"],
    )
    written.append(_write(directory / ERRORS_FILE, lambda p: errors.to_csv(p, index=False, float_format="%.12g")))

    for solver, file_name in TRACE_FILES.items():
        if solver in report.traces:
            trace = report.traces[solver]
            frame = pd.DataFrame({"iteration": range(1, len(trace) + 1), "residual": trace})
            written.append(
                _write(directory / file_name, lambda p, f=frame: f.to_csv(p, index=False, float_format="%.12g"))
            )

    logger.info("Wrote experiment outputs", extra={"directory": str(directory), "files": len(written)})
    return written


def load_report(path: Union[str, Path]) -> ExperimentReport:
    """Load a report.json written by :func:`emit_outputs`."""
    file_path = Path(path)
    if file_path.is_dir():
        file_path = file_path / REPORT_FILE
    try:
        data = json.loads(file_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OutputError(f"Cannot read report {file_path}: {exc}", path=str(file_path)) from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{file_path} is not valid JSON: {exc}") from exc
    try:
        return ExperimentReport.model_validate(data)
    except ValidationError as exc:
        raise InvalidArgumentError(f"{file_path} is not a valid experiment report: {exc}") from exc
