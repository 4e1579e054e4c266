"""Result files: per-run series CSV and sweep summaries."""

import csv
import io
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from spinbattery.config.config import CSV_DECIMALS
from spinbattery.errors import DomainError, OutputError
from spinbattery.logger import get_logger
from spinbattery.metrics import ChargeTimeSeries, CycleReport

logger = get_logger("output")

SERIES_HEADER = ("t", "energy", "ergotropy", "power")
SUMMARY_HEADER = (
    "point",
    "peak_value",
    "peak_time",
    "residual",
    "period_estimate",
    "drift",
    "peak_power",
    "peak_power_time",
    "efficiency",
)


def _stored(values: np.ndarray) -> np.ndarray:
    # Rounding first lets -1e-15 print as 0.000... instead of -0.000...
    return np.round(values, CSV_DECIMALS) + 0.0


def format_value(value: float | None) -> str:
    """Fixed-point text of a value; None becomes an empty cell."""
    if value is None:
        return ""
    return f"{float(_stored(np.float64(value))):.{CSV_DECIMALS}f}"


def write_series_csv(series: ChargeTimeSeries, path: str | Path) -> None:
    """Write `t,energy,ergotropy,power` rows, one per sample."""
    if len(series) == 0:
        raise DomainError("Cannot write an empty series")
    path = Path(path)
    table = np.column_stack(
        [_stored(getattr(series, column)) for column in ("times", "energy", "ergotropy", "power")]
    )
    try:
        np.savetxt(
            path,
            table,
            fmt=f"%.{CSV_DECIMALS}f",
            delimiter=",",
            header=",".join(SERIES_HEADER),
            comments="",
        )
    except OSError as e:
        raise OutputError(path, e) from e
    logger.debug(f"Wrote {len(series)} samples to {path}")


def read_series_csv(path: str | Path, label: str = "") -> ChargeTimeSeries:
    """Read a series CSV written by write_series_csv."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OutputError(path, e) from e
    header, _, body = text.partition("\n")
    if header.strip() != ",".join(SERIES_HEADER):
        raise DomainError(f"{path}: unexpected header '{header.strip()}'")
    try:
        table = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
    except ValueError as e:
        raise DomainError(f"{path}: {e}") from e
    if table.shape[1] != len(SERIES_HEADER):
        raise DomainError(f"{path}: expected {len(SERIES_HEADER)} columns")
    times, energy, ergotropy, power = table.T
    return ChargeTimeSeries(times, energy, ergotropy, power, label or path.stem)


def write_summary_csv(
    rows: Iterable[tuple[str, CycleReport | None]], path: str | Path
) -> None:
    """One row of cycle statistics per sweep point; missing values stay empty."""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(SUMMARY_HEADER)
            for point, report in rows:
                if report is None:
                    writer.writerow([point] + [""] * (len(SUMMARY_HEADER) - 1))
                    continue
                writer.writerow(
                    [point] + [format_value(getattr(report, k)) for k in SUMMARY_HEADER[1:]]
                )
    except OSError as e:
        raise OutputError(path, e) from e
