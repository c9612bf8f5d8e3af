"""Run reports and their on-disk forms.

A report is a plain data bundle: the echoed configuration, one record per
unit of work (per epsilon, per wavenumber q, per sweep cell), the derived
summary numbers, and the pass verdict. The pass verdict is a pure function
of the records, so it can be recomputed from the written files alone.

Two files are written per run, both atomically (temp file + rename):

* ``report.json``   schema-versioned full report.
* ``curves.csv``    flat rows (experiment, epsilon_or_k, time_or_order,
                    value, units), floats at 17 significant digits, UTF-8,
                    LF line endings. Identical config and seed give a
                    bitwise-identical file.
"""

from __future__ import annotations

import dataclasses
import json
import os
import platform
import tempfile
from dataclasses import dataclass

import numpy as np
import scipy

from . import __version__

SCHEMA_VERSION = 1

CSV_HEADER = "experiment,epsilon_or_k,time_or_order,value,units"


@dataclass(frozen=True)
class CurveRow:
    """One point of a reported curve."""

    experiment: str
    epsilon_or_k: float
    time_or_order: float
    value: float
    units: str


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares slope of ln y against ln x."""

    slope: float
    intercept: float
    r_squared: float


def fit_loglog_slope(xs, ys) -> SlopeFit:
    """Ordinary least squares on (ln x, ln y). Needs at least three strictly
    positive pairs."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d sequences of equal length")
    if x.size < 3:
        raise ValueError("need at least 3 pairs for a slope fit")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("pairs must be finite")
    if (x <= 0).any() or (y <= 0).any():
        raise ValueError("pairs must be strictly positive")
    lx = np.log(x)
    ly = np.log(y)
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SlopeFit(slope=float(coef[0]), intercept=float(coef[1]), r_squared=r2)


@dataclass
class RunReport:
    """Everything one experiment run produced."""

    experiment: str
    config: dict
    records: list
    summary: dict
    passed: bool
    curves: list  # list[CurveRow]
    versions: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if not self.versions:
            self.versions = environment_versions()

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "passed": bool(self.passed),
            "config": self.config,
            "summary": self.summary,
            "records": self.records,
            "versions": self.versions,
        }


def environment_versions() -> dict:
    return {
        "package": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return dataclasses.asdict(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _atomic_write(path: str, text: str) -> None:
    """Write via a temp file in the destination directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)  # mkstemp defaults to owner-only
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report_json(report: RunReport, path: str) -> None:
    text = json.dumps(report.to_json_dict(), indent=2, default=_json_default)
    _atomic_write(path, text + "\n")


def format_csv(rows) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.experiment},{row.epsilon_or_k:.16e},"
            f"{row.time_or_order:.16e},{row.value:.16e},{row.units}"
        )
    return "\n".join(lines) + "\n"


def write_curves_csv(rows, path: str) -> None:
    _atomic_write(path, format_csv(rows))
