"""Dense monthly time series and the simulation horizon."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNITS = (
    "m3_per_month",
    "GWh_per_month",
    "ha",
    "tonne",
    "percent",
    "persons",
    "dimensionless",
)

KINDS = ("flow", "stock", "intensity", "share")

# Units whose series values are flows and therefore must be non-negative.
FLOW_UNITS = {"m3_per_month", "GWh_per_month"}


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class Horizon:
    """Closed month range [start_year/start_month .. end_year/end_month]."""

    start_year: int = 2022
    start_month: int = 1
    end_year: int = 2050
    end_month: int = 12

    @property
    def n_months(self) -> int:
        return (self.end_year - self.start_year) * 12 + (self.end_month - self.start_month) + 1

    @property
    def years(self) -> range:
        return range(self.start_year, self.end_year + 1)

    def index_of(self, year: int, month: int) -> int:
        idx = (year - self.start_year) * 12 + (month - self.start_month)
        if idx < 0 or idx >= self.n_months:
            raise SeriesError(f"({year}, {month}) outside horizon {self}")
        return idx

    def year_month(self, idx: int) -> tuple[int, int]:
        m0 = (self.start_month - 1) + idx
        return self.start_year + m0 // 12, m0 % 12 + 1

    def contains_year(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year


DEFAULT_HORIZON = Horizon()


@dataclass
class MonthlySeries:
    """A gapless monthly series starting at (start_year, start_month)."""

    start_year: int
    start_month: int
    values: np.ndarray
    unit: str = "dimensionless"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise SeriesError("values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise SeriesError("series contains non-finite values")
        if self.unit not in UNITS:
            raise SeriesError(f"unknown unit {self.unit!r}")
        if self.unit in FLOW_UNITS and np.any(self.values < 0):
            raise SeriesError(f"negative flow value in {self.unit} series")

    def __len__(self) -> int:
        return len(self.values)

    def index_of(self, year: int, month: int) -> int:
        idx = (year - self.start_year) * 12 + (month - self.start_month)
        if idx < 0 or idx >= len(self.values):
            raise SeriesError(f"({year}, {month}) outside series range")
        return idx

    def at(self, year: int, month: int) -> float:
        return float(self.values[self.index_of(year, month)])

    def year_slice(self, year: int) -> np.ndarray:
        """The 12 values of a calendar year; raises if the year is partial."""
        i = self.index_of(year, 1)
        if i + 12 > len(self.values):
            raise SeriesError(f"year {year} not fully covered")
        return self.values[i : i + 12]

    def covers(self, horizon: Horizon) -> bool:
        try:
            a = self.index_of(horizon.start_year, horizon.start_month)
            b = self.index_of(horizon.end_year, horizon.end_month)
        except SeriesError:
            return False
        return b - a + 1 == horizon.n_months

    def window(self, horizon: Horizon) -> "MonthlySeries":
        a = self.index_of(horizon.start_year, horizon.start_month)
        return MonthlySeries(
            horizon.start_year, horizon.start_month,
            self.values[a : a + horizon.n_months].copy(), self.unit,
        )

    def to_dict(self) -> dict:
        return {
            "start_year": self.start_year,
            "start_month": self.start_month,
            "unit": self.unit,
            "values": self.values.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MonthlySeries":
        return cls(d["start_year"], d["start_month"], np.array(d["values"]), d["unit"])

    @classmethod
    def constant(cls, value: float, horizon: Horizon = DEFAULT_HORIZON,
                 unit: str = "dimensionless") -> "MonthlySeries":
        return cls(horizon.start_year, horizon.start_month,
                   np.full(horizon.n_months, float(value)), unit)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonthlySeries):
            return NotImplemented
        return (self.start_year == other.start_year
                and self.start_month == other.start_month
                and self.unit == other.unit
                and np.array_equal(self.values, other.values))


@dataclass
class SeriesAccumulator:
    """Collects one value per month for a branch over a horizon."""

    horizon: Horizon
    unit: str
    kind: str = "flow"
    values: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.values is None:
            self.values = np.zeros(self.horizon.n_months)

    def set(self, idx: int, value: float) -> None:
        self.values[idx] = value

    def to_series(self) -> MonthlySeries:
        return MonthlySeries(self.horizon.start_year, self.horizon.start_month,
                             self.values, self.unit)
