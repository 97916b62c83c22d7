"""Multi-year pipeline orchestration, rankings, trends and report rendering."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .energy import (AVERAGING_METHODS, CANONICAL_ENERGY, EnergyAccount, EnergyFlowTable,
                     EnergyPriceVector, energy_factor, intermediate_demand_share,
                     load_energy_account)
from .errors import (ConfigError, EnergyIOError, NonProductiveError, PricingError, ReportError,
                     SolveError)
from .intensity import AggregateIntensity, IntensitySet, aggregate_intensity, compute_intensities
from .io_core import (CANONICAL_CURRENCY, DEFAULT_SOLVE_TOL, PUBLISHED_BALANCE_TOL, BalanceReport,
                      CoefficientMatrix, EconomyTable, SectorCatalog, currency_factor,
                      load_economy_table, load_sector_catalog, technical_coefficients,
                      validate_balances)

logger = logging.getLogger(__name__)

FORMATS = ("csv", "markdown")
REPORT_NAMES = ("total_intensity_ranking", "direct_share", "trend", "intermediate_share")
NOMINAL_CAVEAT = "values are computed per year at that year's prices; no deflation between years"


# -----------------------------------------------------------------------------
# Configuration
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class YearInputs:
    sectors: Path
    flows: Path
    accounts: Path
    energy: Path
    gdp: float | None = None


@dataclass(frozen=True)
class RunConfig:
    years: dict[int, YearInputs]
    currency_unit: str = CANONICAL_CURRENCY
    energy_unit: str = CANONICAL_ENERGY
    balance_rel_tol: float = PUBLISHED_BALANCE_TOL
    solve_tol: float = DEFAULT_SOLVE_TOL
    averaging_method: str = "arithmetic_mean"
    ranking_top_n: int = 20
    output_format: str = "csv"

    def __post_init__(self):
        if not self.years:
            raise ConfigError("config lists no years")
        for name in ("balance_rel_tol", "solve_tol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ConfigError(f"{name} must be a positive number, got {value!r}")
        if not (isinstance(self.ranking_top_n, int) and self.ranking_top_n >= 1):
            raise ConfigError(f"ranking_top_n must be an integer >= 1, got {self.ranking_top_n!r}")
        if self.averaging_method not in AVERAGING_METHODS:
            raise ConfigError(f"averaging_method must be one of {AVERAGING_METHODS}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.output_format!r}")
        try:
            currency_factor(self.currency_unit)
            energy_factor(self.energy_unit)
        except EnergyIOError as exc:
            raise ConfigError(str(exc)) from None
        for year, inputs in self.years.items():
            for kind in ("sectors", "flows", "accounts", "energy"):
                path = getattr(inputs, kind)
                if not path.is_file():
                    raise ConfigError(f"year {year}: {kind} file not found: {path}")
            if inputs.gdp is not None and not inputs.gdp > 0:
                raise ConfigError(f"year {year}: gdp must be positive")

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


def load_config(path) -> RunConfig:
    """Read a YAML run configuration; relative data paths resolve against its folder.

    Example::

        currency_unit: USD million
        energy_unit: ktoe
        balance_rel_tol: 0.01
        years:
          2005: {sectors: sectors.csv, flows: 2005/flows.csv,
                 accounts: 2005/accounts.csv, energy: 2005/energy.csv, gdp: 1500}
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    base = path.parent
    raw = dict(raw)
    years_raw = raw.pop("years", None)
    if not isinstance(years_raw, dict) or not years_raw:
        raise ConfigError(f"{path}: 'years' must map year labels to input files")
    years = {}
    for label, entry in years_raw.items():
        try:
            year = int(label)
        except (TypeError, ValueError):
            raise ConfigError(f"{path}: year label {label!r} is not an integer") from None
        if not isinstance(entry, dict):
            raise ConfigError(f"{path}: year {year} must be a mapping of input files")
        missing = [k for k in ("sectors", "flows", "accounts", "energy") if k not in entry]
        if missing:
            raise ConfigError(f"{path}: year {year} is missing {', '.join(missing)}")
        extra = set(entry) - {"sectors", "flows", "accounts", "energy", "gdp"}
        if extra:
            raise ConfigError(f"{path}: year {year} has unknown keys {sorted(extra)}")
        years[year] = YearInputs(
            *(base / str(entry[k]) for k in ("sectors", "flows", "accounts", "energy")),
            gdp=None if entry.get("gdp") is None else float(entry["gdp"]),
        )
    if "format" in raw:
        raw["output_format"] = raw.pop("format")
    known = {"currency_unit", "energy_unit", "balance_rel_tol", "solve_tol", "averaging_method",
             "ranking_top_n", "output_format"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    for key in ("balance_rel_tol", "solve_tol"):
        if isinstance(raw.get(key), str):
            try:
                raw[key] = float(raw[key])
            except ValueError:
                raise ConfigError(f"{path}: {key} is not a number") from None
    return RunConfig(years=dict(sorted(years.items())), **raw)


# -----------------------------------------------------------------------------
# Rankings and trends
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class RankedSector:
    rank: int
    index: int
    code: str
    name: str
    value: float


def rank_sectors(intensities, catalog: SectorCatalog, top_n: int | None = None,
                 exclude_energy: bool = True) -> list[RankedSector]:
    """Sort descending by intensity, ties going to the lower sector index."""
    values = np.asarray(intensities, dtype=float)
    if values.shape != (len(catalog),):
        raise ReportError(f"{values.shape[0]} intensities for {len(catalog)} sectors")
    pool = [s for s in catalog if not (exclude_energy and s.is_energy)]
    if not pool:
        raise ReportError("nothing to rank: every sector is an energy sector")
    pool.sort(key=lambda s: (-values[s.index], s.index))
    if top_n is not None:
        pool = pool[:top_n]
    return [RankedSector(r, s.index, s.code, s.name, float(values[s.index]))
            for r, s in enumerate(pool, start=1)]


@dataclass(frozen=True)
class RankingRow:
    code: str
    name: str
    values: dict[int, float]
    ranks: dict[int, int]
    direct: dict[int, float] = field(default_factory=dict)
    shares: dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class RankingTable:
    """Most intensive non-energy sectors, ordered by the latest year's rank."""

    years: tuple[int, ...]
    rows: tuple[RankingRow, ...]


def ranking_table(intensity_sets: list[IntensitySet], top_n: int = 20) -> RankingTable:
    sets = sorted(intensity_sets, key=lambda s: s.year)
    per_year = {}
    for s in sets:
        per_year[s.year] = {r.code: r for r in rank_sectors(s.total, s.sectors, exclude_energy=True)}
    latest = sets[-1]
    order = rank_sectors(latest.total, latest.sectors, top_n=top_n, exclude_energy=True)
    rows = []
    for head in order:
        values, ranks, direct, shares = {}, {}, {}, {}
        for s in sets:
            r = per_year[s.year].get(head.code)
            if r is None:
                continue
            values[s.year] = r.value
            ranks[s.year] = r.rank
            direct[s.year] = float(s.direct[r.index])
            shares[s.year] = float(s.share[r.index])
        rows.append(RankingRow(head.code, head.name, values, ranks, direct, shares))
    return RankingTable(tuple(s.year for s in sets), tuple(rows))


@dataclass(frozen=True)
class TrendSeries:
    years: tuple[int, ...]
    values: tuple[float, ...]
    percent_change: float


def trend_report(values, years=None) -> TrendSeries:
    """Percent change from the first to the last value, 100 * (last - first) / first."""
    vals = tuple(float(v) for v in values)
    if len(vals) < 2:
        raise ReportError("a trend needs at least two years")
    yrs = tuple(range(len(vals))) if years is None else tuple(int(y) for y in years)
    if len(yrs) != len(vals):
        raise ReportError("years and values differ in length")
    if any(b <= a for a, b in zip(yrs, yrs[1:])):
        raise ReportError("years must be strictly increasing")
    if vals[0] == 0:
        raise ReportError("first value is zero; percent change undefined")
    return TrendSeries(yrs, vals, 100.0 * (vals[-1] - vals[0]) / vals[0])


# -----------------------------------------------------------------------------
# Pipeline
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class YearResult:
    year: int
    table: EconomyTable
    account: EnergyAccount
    balance: BalanceReport
    coefficients: CoefficientMatrix | None = None
    prices: EnergyPriceVector | None = None
    energy_flows: EnergyFlowTable | None = None
    intensities: IntensitySet | None = None
    intermediate_share: float | None = None
    aggregate: AggregateIntensity | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class PipelineResult:
    config: RunConfig
    years: tuple[YearResult, ...]

    @property
    def ok(self) -> bool:
        return all(y.ok for y in self.years)

    @property
    def failures(self) -> list[YearResult]:
        return [y for y in self.years if not y.ok]

    def intensity_sets(self) -> list[IntensitySet]:
        return [y.intensities for y in self.years]

    def ranking(self, top_n: int | None = None) -> RankingTable:
        return ranking_table(self.intensity_sets(), top_n or self.config.ranking_top_n)

    def trend(self) -> TrendSeries:
        return trend_report([y.aggregate.value for y in self.years], [y.year for y in self.years])


def load_year(config: RunConfig, year: int) -> tuple[EconomyTable, EnergyAccount]:
    inputs = config.years[year]
    try:
        catalog = load_sector_catalog(inputs.sectors)
        table = load_economy_table(catalog, inputs.flows, inputs.accounts, year=year,
                                   currency_unit=config.currency_unit)
        account = load_energy_account(inputs.energy, catalog, year=year,
                                      energy_unit=config.energy_unit)
    except EnergyIOError as exc:
        raise type(exc)(f"year {year}: {exc}") from exc
    return table, account


def process_year(config: RunConfig, year: int) -> YearResult:
    """Run one year: load, validate balances, coefficients, Hawkins-Simon, prices, intensities.

    Load failures raise; accounting and model failures are recorded on the result.
    """
    table, account = load_year(config, year)
    balance = validate_balances(table, config.balance_rel_tol)
    if not balance.passed:
        return YearResult(year, table, account, balance, error=f"year {year}: {balance.summary()}")
    coefficients = technical_coefficients(table)
    if not coefficients.productive:
        return YearResult(year, table, account, balance, coefficients,
                          error=f"year {year}: not productive: {coefficients.productivity.detail}")
    try:
        intensities, prices, flows = compute_intensities(
            table, account, averaging_method=config.averaging_method,
            solve_tol=config.solve_tol, coefficients=coefficients)
        share = intermediate_demand_share(table, account)
    except (PricingError, SolveError, NonProductiveError) as exc:
        return YearResult(year, table, account, balance, coefficients, error=f"year {year}: {exc}")
    gdp = config.years[year].gdp
    if gdp is not None:
        aggregate = aggregate_intensity(account, gdp * currency_factor(config.currency_unit), "gdp")
    else:
        aggregate = aggregate_intensity(account, table.total_output.sum(), "total_output")
    return YearResult(year, table, account, balance, coefficients, prices, flows, intensities,
                      share, aggregate)


def run_pipeline(config: RunConfig, workers: int = 1) -> PipelineResult:
    """Process every configured year; years are independent and may run in parallel."""
    years = list(config.years)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda y: process_year(config, y), years))
    else:
        results = [process_year(config, y) for y in years]
    for r in results:
        if not r.ok:
            logger.warning("%s", r.error)
    return PipelineResult(config, tuple(results))


# -----------------------------------------------------------------------------
# Rendering
# -----------------------------------------------------------------------------
def _full(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def _one(value, digits=1) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "n/a"
    return f"{value:.{digits}f}"


def _csv_text(header_lines, columns, rows) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _md_text(title, notes, columns, rows) -> str:
    lines = [f"# {title}", ""]
    lines += [f"_{n}_" for n in notes]
    lines += ["", "| " + " | ".join(columns) + " |", "|" + "|".join("---" for _ in columns) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def render_ranking(table: RankingTable, fmt: str, unit: str = "ktoe/USDm") -> str:
    if fmt == "csv":
        cols = ["code", "name"] + [c for y in table.years for c in (f"total_{y}", f"rank_{y}")]
        rows = [[r.code, r.name] + [x for y in table.years
                                    for x in (_full(r.values.get(y)), r.ranks.get(y, ""))]
                for r in table.rows]
        return _csv_text([f"total energy intensity ({unit})", NOMINAL_CAVEAT], cols, rows)
    cols = ["Sector"] + [c for y in table.years for c in (f"{y} {unit}", f"{y} rank")]
    rows = [[r.name] + [x for y in table.years
                        for x in (_one(r.values.get(y)), str(r.ranks.get(y, "n/a")))]
            for r in table.rows]
    return _md_text("Total energy intensity of the most intensive non-energy sectors",
                    [NOMINAL_CAVEAT], cols, rows)


def render_direct_share(table: RankingTable, fmt: str, unit: str = "ktoe/USDm") -> str:
    if fmt == "csv":
        cols = ["code", "name"] + [c for y in table.years for c in (f"direct_{y}", f"share_pct_{y}")]
        rows = [[r.code, r.name] + [x for y in table.years
                                    for x in (_full(r.direct.get(y)), _full(r.shares.get(y)))]
                for r in table.rows]
        return _csv_text([f"direct energy intensity ({unit}) and direct share of total (%)",
                          "empty share = undefined (total intensity is zero)", NOMINAL_CAVEAT],
                         cols, rows)
    cols = ["Sector"] + [c for y in table.years for c in (f"{y} {unit}", f"{y} %")]
    rows = [[r.name] + [x for y in table.years for x in (_one(r.direct.get(y)), _one(r.shares.get(y)))]
            for r in table.rows]
    return _md_text("Direct energy intensity and its share of total energy intensity",
                    [NOMINAL_CAVEAT], cols, rows)


def render_trend(result: PipelineResult, fmt: str) -> str:
    years = [y.year for y in result.years]
    aggs = [y.aggregate for y in result.years]
    first = aggs[0].value
    change = [100.0 * (a.value - first) / first if first else None for a in aggs]
    if fmt == "csv":
        cols = ["year", "aggregate_intensity", "energy_ktoe", "denominator_usdm", "basis",
                "pct_change_from_first"]
        rows = [[y, _full(a.value), _full(a.energy), _full(a.denominator), a.basis, _full(c)]
                for y, a, c in zip(years, aggs, change)]
        return _csv_text(["aggregate energy intensity (ktoe/USDm)", NOMINAL_CAVEAT], cols, rows)
    cols = ["Year", "ktoe/USDm", "Basis", "% change from first"]
    rows = [[str(y), _one(a.value, 2), a.basis, _one(c)] for y, a, c in zip(years, aggs, change)]
    notes = [NOMINAL_CAVEAT]
    if len(years) >= 2 and first:
        trend = result.trend()
        notes.append(f"change {trend.years[0]} to {trend.years[-1]}: {trend.percent_change:+.1f}%")
    return _md_text("Aggregate energy intensity trend", notes, cols, rows)


def render_intermediate_share(result: PipelineResult, fmt: str) -> str:
    if fmt == "csv":
        rows = [[y.year, _full(y.intermediate_share)] for y in result.years]
        return _csv_text(["share of energy-sector demand going to intermediate use"],
                         ["year", "intermediate_share"], rows)
    rows = [[str(y.year), _one(100.0 * y.intermediate_share)] for y in result.years]
    return _md_text("Intermediate share of total energy demand", [NOMINAL_CAVEAT],
                    ["Year", "Intermediate share (%)"], rows)


def render_reports(result: PipelineResult, out_dir, fmt: str = "csv",
                   top_n: int | None = None) -> list[Path]:
    """Write the four reports into ``out_dir``; returns the written paths."""
    if fmt not in FORMATS:
        raise ReportError(f"format must be one of {FORMATS}, got {fmt!r}")
    if not result.ok:
        raise ReportError("cannot render reports: " + "; ".join(y.error for y in result.failures))
    ranking = result.ranking(top_n)
    texts = {
        "total_intensity_ranking": render_ranking(ranking, fmt),
        "direct_share": render_direct_share(ranking, fmt),
        "trend": render_trend(result, fmt),
        "intermediate_share": render_intermediate_share(result, fmt),
    }
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"cannot create output directory {out}: {exc}") from exc
    ext = "csv" if fmt == "csv" else "md"
    paths = []
    for name in REPORT_NAMES:
        path = out / f"{name}.{ext}"
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(texts[name])
        except OSError as exc:
            raise ReportError(f"cannot write {path}: {exc}") from exc
        paths.append(path)
    return paths
