import numpy as np
import pytest

from spinbattery.errors import OutputError
from spinbattery.metrics import ChargeTimeSeries, CycleReport, charging_power
from spinbattery.output import (
    format_value,
    read_series_csv,
    write_series_csv,
    write_summary_csv,
)


def _series():
    times = np.linspace(0.0, 1.0, 5)
    ergotropy = np.array([0.0, 0.25, 1.0, 2.25, 4.0]) / 3
    return charging_power(ChargeTimeSeries(times, ergotropy - 8.0, ergotropy, label="demo"))


def test_csv_layout(tmp_path):
    """Test header, row count and the uncharged first row."""
    path = tmp_path / "series.csv"
    write_series_csv(_series(), path)
    lines = path.read_text(encoding="utf-8").split("\n")
    assert lines[0] == "t,energy,ergotropy,power"
    assert lines[1] == "0.000000000000,-8.000000000000,0.000000000000,0.000000000000"
    assert lines[-1] == ""
    assert len(lines) - 1 == len(_series()) + 1


def test_csv_is_deterministic(tmp_path):
    """Test writing the same series twice gives identical bytes."""
    write_series_csv(_series(), tmp_path / "a.csv")
    write_series_csv(_series(), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_csv_has_no_negative_zero(tmp_path):
    """Test values rounding to zero never print as -0."""
    series = ChargeTimeSeries([0.0, 1.0], [-1e-15, -8.0], [0.0, -0.0])
    path = tmp_path / "series.csv"
    write_series_csv(series, path)
    assert "-0.000000000000" not in path.read_text(encoding="utf-8")


def test_csv_parse_back(tmp_path):
    """Test reading the CSV reconstructs the stored values."""
    series = _series()
    path = tmp_path / "series.csv"
    write_series_csv(series, path)
    parsed = read_series_csv(path)
    for column in ("times", "energy", "ergotropy", "power"):
        np.testing.assert_allclose(
            getattr(parsed, column), np.round(getattr(series, column), 12), atol=1e-12
        )
    assert parsed.label == "series"


def test_read_rejects_foreign_csv(tmp_path):
    """Test a CSV with another header is rejected."""
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="header"):
        read_series_csv(path)


def test_write_into_missing_directory(tmp_path):
    """Test filesystem errors carry the path."""
    path = tmp_path / "missing" / "series.csv"
    with pytest.raises(OutputError, match="missing"):
        write_series_csv(_series(), path)


def test_format_value():
    """Test fixed-point formatting and empty cells."""
    assert format_value(None) == ""
    assert format_value(1.5) == "1.500000000000"
    assert format_value(-1e-14) == "0.000000000000"


def test_summary_csv(tmp_path):
    """Test summary rows with and without cycle statistics."""
    report = CycleReport(
        peak_value=16.0,
        peak_time=1.5,
        residual=0.1,
        peak_power=20.0,
        peak_power_time=0.5,
        efficiency=0.99375,
    )
    path = tmp_path / "summary.csv"
    write_summary_csv([("D=0", report), ("D=5", None)], path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("point,peak_value,peak_time,residual")
    assert lines[1].split(",")[:4] == ["D=0", "16.000000000000", "1.500000000000", "0.100000000000"]
    assert lines[1].split(",")[4:6] == ["", ""]
    assert lines[2] == "D=5,,,,,,,,"
