"""Monetary input-output accounts and the Leontief machinery built on them.

Conventions: ``flows[i, j]`` is the sale of sector ``i`` to sector ``j``
(row = seller, column = buyer). Money is held in USD million internally.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import DataFormatError, NonProductiveError, SolveError

logger = logging.getLogger(__name__)

CANONICAL_CURRENCY = "USD million"

# Multiplier taking a value in the given unit to USD million.
CURRENCY_FACTORS = {
    "USD million": 1.0,
    "USDm": 1.0,
    "USD billion": 1e3,
    "USD thousand": 1e-3,
    "USD": 1e-6,
}

DEFAULT_SOLVE_TOL = 1e-9
SYNTHETIC_BALANCE_TOL = 1e-9
PUBLISHED_BALANCE_TOL = 0.01

ACCOUNT_COLUMNS = ("final_demand", "imports", "value_added", "total_output")


def _frozen(values, ndim, name) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DataFormatError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def currency_factor(unit: str) -> float:
    try:
        return CURRENCY_FACTORS[unit]
    except KeyError:
        known = ", ".join(sorted(CURRENCY_FACTORS))
        raise DataFormatError(f"unknown currency unit {unit!r} (known: {known})") from None


# -----------------------------------------------------------------------------
# Domain types
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class Sector:
    index: int
    code: str
    name: str
    is_energy: bool


@dataclass(frozen=True)
class SectorCatalog:
    """Ordered sector list; ``entries[k].index == k`` always holds."""

    entries: tuple[Sector, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise DataFormatError("sector catalog is empty")
        for pos, sector in enumerate(entries):
            if sector.index != pos:
                raise DataFormatError(
                    f"sector indices must be contiguous from 0; position {pos} has index {sector.index}"
                )
        codes = [s.code for s in entries]
        dupes = sorted({c for c in codes if codes.count(c) > 1})
        if dupes:
            raise DataFormatError(f"duplicate sector codes: {', '.join(dupes)}")
        if not any(s.is_energy for s in entries):
            raise DataFormatError("catalog needs at least one energy sector")
        if all(s.is_energy for s in entries):
            raise DataFormatError("catalog needs at least one non-energy sector")

    @classmethod
    def from_records(cls, records: Sequence[tuple[str, str, bool]]) -> "SectorCatalog":
        """Build a catalog from ``(code, name, is_energy)`` tuples in order."""
        return cls(tuple(Sector(i, c, n, bool(e)) for i, (c, n, e) in enumerate(records)))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def codes(self) -> list[str]:
        return [s.code for s in self.entries]

    @property
    def energy_mask(self) -> np.ndarray:
        return np.array([s.is_energy for s in self.entries], dtype=bool)

    @property
    def energy_indices(self) -> np.ndarray:
        return np.flatnonzero(self.energy_mask)

    def position(self, code: str) -> int:
        for s in self.entries:
            if s.code == code:
                return s.index
        raise KeyError(code)


@dataclass(frozen=True)
class EconomyTable:
    """One year of monetary input-output accounts."""

    sectors: SectorCatalog
    flows: np.ndarray
    final_demand: np.ndarray
    imports: np.ndarray
    value_added: np.ndarray
    total_output: np.ndarray
    year: int = 0
    currency_unit: str = CANONICAL_CURRENCY

    def __post_init__(self):
        n = len(self.sectors)
        object.__setattr__(self, "flows", _frozen(self.flows, 2, "flows"))
        for name in ACCOUNT_COLUMNS:
            object.__setattr__(self, name, _frozen(getattr(self, name), 1, name))
        if self.flows.shape != (n, n):
            raise DataFormatError(
                f"flows matrix is {self.flows.shape[0]}x{self.flows.shape[1]} but {n} sectors are declared"
            )
        for name in ACCOUNT_COLUMNS:
            if getattr(self, name).shape != (n,):
                raise DataFormatError(f"{name} has length {getattr(self, name).shape[0]}, expected {n}")
        codes = self.sectors.codes
        for name in ("flows",) + ACCOUNT_COLUMNS:
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)):
                raise DataFormatError(f"{name} contains non-finite values")
            bad = np.argwhere(arr < 0)
            if bad.size:
                loc = tuple(int(k) for k in bad[0])
                where = (f"row {codes[loc[0]]}, column {codes[loc[1]]}" if arr.ndim == 2
                         else f"sector {codes[loc[0]]}")
                raise DataFormatError(f"negative value in {name} at {where}: {arr[loc]}")
        nonpos = np.flatnonzero(self.total_output <= 0)
        if nonpos.size:
            raise DataFormatError(
                f"total_output must be strictly positive; sector {codes[nonpos[0]]} has {self.total_output[nonpos[0]]}"
            )

    @property
    def n(self) -> int:
        return len(self.sectors)

    def scaled(self, factor: float) -> "EconomyTable":
        """Copy with every monetary field multiplied by ``factor``."""
        return EconomyTable(
            sectors=self.sectors,
            flows=self.flows * factor,
            final_demand=self.final_demand * factor,
            imports=self.imports * factor,
            value_added=self.value_added * factor,
            total_output=self.total_output * factor,
            year=self.year,
            currency_unit=self.currency_unit,
        )


@dataclass(frozen=True)
class ProductivityDiagnostic:
    productive: bool
    minors: np.ndarray
    detail: str

    def __bool__(self) -> bool:
        return self.productive


@dataclass(frozen=True)
class CoefficientMatrix:
    values: np.ndarray
    source_year: int = 0
    column_sums: np.ndarray = field(init=False)
    productivity: ProductivityDiagnostic = field(init=False)

    def __post_init__(self):
        values = _frozen(self.values, 2, "coefficient matrix")
        if values.shape[0] != values.shape[1]:
            raise DataFormatError(f"coefficient matrix must be square, got {values.shape}")
        if np.any(values < 0):
            raise DataFormatError("technical coefficients must be nonnegative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_sums", _frozen(values.sum(axis=0), 1, "column sums"))
        object.__setattr__(self, "productivity", hawkins_simon_check(values))

    @property
    def productive(self) -> bool:
        return self.productivity.productive

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class LeontiefInverse:
    values: np.ndarray
    residual_norm: float
    coefficients: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, 2, "Leontief inverse"))


@dataclass(frozen=True)
class BalanceReport:
    """Row (supply) and column (cost) residuals per sector."""

    codes: tuple[str, ...]
    row_residuals: np.ndarray
    col_residuals: np.ndarray
    rel_tol: float
    row_ok: np.ndarray
    col_ok: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(self.row_ok.all() and self.col_ok.all())

    @property
    def failing_rows(self) -> list[str]:
        return [c for c, ok in zip(self.codes, self.row_ok) if not ok]

    @property
    def failing_columns(self) -> list[str]:
        return [c for c, ok in zip(self.codes, self.col_ok) if not ok]

    def summary(self) -> str:
        if self.passed:
            return f"balances close within rel_tol={self.rel_tol:g}"
        parts = []
        if self.failing_rows:
            parts.append("row balance fails for " + ", ".join(self.failing_rows))
        if self.failing_columns:
            parts.append("column balance fails for " + ", ".join(self.failing_columns))
        return f"{'; '.join(parts)} (rel_tol={self.rel_tol:g})"


# -----------------------------------------------------------------------------
# Loading
# -----------------------------------------------------------------------------
def _read_csv(path: Path) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise DataFormatError("file not found", location=str(path))
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True,
                           encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot parse CSV: {exc}", location=str(path)) from exc


def _numeric(frame: pd.DataFrame, path: Path, row_labels: Sequence[str]) -> np.ndarray:
    """Convert string cells to floats, reporting the first bad cell."""
    values = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        r, c = bad[0]
        raise DataFormatError(
            f"non-numeric value {frame.iat[r, c]!r}",
            location=f"{path}: row {row_labels[r]}, column {frame.columns[c]}",
        )
    return values


def load_sector_catalog(path) -> SectorCatalog:
    path = Path(path)
    df = _read_csv(path)
    missing = {"index", "code", "name", "is_energy"} - set(df.columns)
    if missing:
        raise DataFormatError(f"missing columns: {', '.join(sorted(missing))}", location=str(path))
    entries = []
    for line, rec in enumerate(df.itertuples(index=False), start=2):
        where = f"{path}: line {line}"
        try:
            idx = int(rec.index)
        except ValueError:
            raise DataFormatError(f"index {rec.index!r} is not an integer", location=where) from None
        flag = str(rec.is_energy).strip().lower()
        if flag not in ("true", "false"):
            raise DataFormatError(f"is_energy must be true or false, got {rec.is_energy!r}",
                                  location=where)
        code = str(rec.code).strip()
        if not code:
            raise DataFormatError("empty sector code", location=where)
        entries.append(Sector(idx, code, str(rec.name).strip(), flag == "true"))
    entries.sort(key=lambda s: s.index)
    try:
        return SectorCatalog(tuple(entries))
    except DataFormatError as exc:
        raise DataFormatError(str(exc), location=str(path)) from None


def _index_by_code(df: pd.DataFrame, path: Path, catalog: SectorCatalog, what: str) -> pd.DataFrame:
    if "code" not in df.columns:
        raise DataFormatError("first column must be 'code'", location=str(path))
    codes = df["code"].str.strip()
    known = set(catalog.codes)
    for line, code in enumerate(codes, start=2):
        if code not in known:
            raise DataFormatError(f"unknown sector code {code!r} in {what}", location=f"{path}: line {line}")
    dupes = codes[codes.duplicated()]
    if len(dupes):
        raise DataFormatError(f"duplicate sector code {dupes.iloc[0]!r} in {what}", location=str(path))
    if len(codes) != len(catalog):
        raise DataFormatError(
            f"{what} has {len(codes)} rows but {len(catalog)} sectors are declared", location=str(path)
        )
    return df.assign(code=codes).set_index("code").loc[catalog.codes]


def load_economy_table(sectors, flows, accounts, *, year: int = 0,
                       currency_unit: str = CANONICAL_CURRENCY) -> EconomyTable:
    """Read ``sectors.csv``, ``flows.csv`` and ``accounts.csv`` into an EconomyTable.

    Monetary values are converted from ``currency_unit`` to USD million.
    Final demand may be given as one ``final_demand`` column or as several
    ``final_demand_*`` component columns, which are summed.
    Balance residuals are not checked here; see :func:`validate_balances`.
    """
    factor = currency_factor(currency_unit)
    catalog = sectors if isinstance(sectors, SectorCatalog) else load_sector_catalog(sectors)
    codes = catalog.codes

    flows_path = Path(flows)
    fdf = _index_by_code(_read_csv(flows_path), flows_path, catalog, "flows rows")
    cols = [c.strip() for c in fdf.columns]
    fdf.columns = cols
    unknown = [c for c in cols if c not in set(codes)]
    if unknown:
        raise DataFormatError(f"unknown buying-sector column {unknown[0]!r}", location=str(flows_path))
    if len(set(cols)) != len(cols):
        raise DataFormatError("duplicate buying-sector columns", location=str(flows_path))
    if len(cols) != len(codes):
        raise DataFormatError(
            f"flows has {len(cols)} sector columns but {len(codes)} sectors are declared",
            location=str(flows_path),
        )
    z = _numeric(fdf[codes], flows_path, codes)

    acc_path = Path(accounts)
    adf = _index_by_code(_read_csv(acc_path), acc_path, catalog, "accounts rows")
    adf.columns = [c.strip() for c in adf.columns]
    fd_parts = [c for c in adf.columns if c.startswith("final_demand_")]
    if "final_demand" in adf.columns and fd_parts:
        raise DataFormatError("give either final_demand or final_demand_* components, not both",
                              location=str(acc_path))
    fd_cols = fd_parts or ["final_demand"]
    missing = [c for c in fd_cols + ["imports", "value_added", "total_output"] if c not in adf.columns]
    if missing:
        raise DataFormatError(f"missing columns: {', '.join(missing)}", location=str(acc_path))
    fd = _numeric(adf[fd_cols], acc_path, codes).sum(axis=1)
    rest = _numeric(adf[["imports", "value_added", "total_output"]], acc_path, codes)

    try:
        table = EconomyTable(
            sectors=catalog,
            flows=z * factor,
            final_demand=fd * factor,
            imports=rest[:, 0] * factor,
            value_added=rest[:, 1] * factor,
            total_output=rest[:, 2] * factor,
            year=int(year),
            currency_unit=CANONICAL_CURRENCY,
        )
    except DataFormatError as exc:
        raise DataFormatError(str(exc), location=f"{flows_path.parent}") from None
    logger.debug("loaded %d-sector table for %s", table.n, year)
    return table


# -----------------------------------------------------------------------------
# Accounting checks and coefficients
# -----------------------------------------------------------------------------
def validate_balances(table: EconomyTable, rel_tol: float = PUBLISHED_BALANCE_TOL) -> BalanceReport:
    """Check row balance X = sum_j Z + f - M and column balance X = sum_i Z + V."""
    x = table.total_output
    row = x - (table.flows.sum(axis=1) + table.final_demand - table.imports)
    col = x - (table.flows.sum(axis=0) + table.value_added)
    bound = rel_tol * x
    return BalanceReport(
        codes=tuple(table.sectors.codes),
        row_residuals=row,
        col_residuals=col,
        rel_tol=rel_tol,
        row_ok=np.abs(row) <= bound,
        col_ok=np.abs(col) <= bound,
    )


def technical_coefficients(table: EconomyTable) -> CoefficientMatrix:
    """a_ij = Z_ij / X_j."""
    x = table.total_output
    if np.any(x <= 0):
        raise DataFormatError("total_output must be strictly positive to form coefficients")
    return CoefficientMatrix(table.flows / x[np.newaxis, :], source_year=table.year)


def _values(a) -> np.ndarray:
    return a.values if isinstance(a, CoefficientMatrix) else np.asarray(a, dtype=float)


def hawkins_simon_check(a) -> ProductivityDiagnostic:
    """All leading principal minors of (I - A) must be strictly positive."""
    a = _values(a)
    b = np.eye(a.shape[0]) - a
    minors = np.empty(a.shape[0])
    for k in range(1, a.shape[0] + 1):
        sign, logdet = np.linalg.slogdet(b[:k, :k])
        minors[k - 1] = sign * np.exp(logdet) if sign != 0 else 0.0
        if sign <= 0:
            minors.setflags(write=False)
            return ProductivityDiagnostic(
                False, minors[:k],
                f"leading principal minor of order {k} is {minors[k - 1]:.6g} (not > 0)",
            )
    minors.setflags(write=False)
    return ProductivityDiagnostic(True, minors, "all leading principal minors positive")


def _require_productive(a) -> np.ndarray:
    if isinstance(a, CoefficientMatrix):
        diag = a.productivity
        values = a.values
    else:
        values = _values(a)
        diag = hawkins_simon_check(values)
    if not diag.productive:
        raise NonProductiveError(f"(I - A) is not productive: {diag.detail}")
    return values


def leontief_inverse(a, solve_tol: float = DEFAULT_SOLVE_TOL) -> LeontiefInverse:
    """Materialize L = (I - A)^-1 with a pivoted LU solve and a residual check."""
    values = _require_productive(a)
    n = values.shape[0]
    ia = np.eye(n) - values
    try:
        inv = np.linalg.solve(ia, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise SolveError(f"(I - A) is singular: {exc}") from exc
    residual = float(np.max(np.abs(inv @ ia - np.eye(n)))) if n else 0.0
    if not residual <= solve_tol:
        raise SolveError(f"Leontief inverse residual {residual:.3e} exceeds tolerance {solve_tol:.1e}")
    return LeontiefInverse(inv, residual, values)


def leontief_series_oracle(a, terms: int) -> np.ndarray:
    """sum_{k=0}^{terms} A^k by repeated multiplication. Test oracle only."""
    values = _values(a)
    power = np.eye(values.shape[0])
    total = power.copy()
    for _ in range(terms):
        power = power @ values
        total += power
    return total


def solve_output(a, final_demand, solve_tol: float = DEFAULT_SOLVE_TOL) -> np.ndarray:
    """Gross output X solving (I - A) X = Y.

    The residual bound is relative to ``max(1, |Y|_inf)`` so it does not
    depend on the monetary unit.
    """
    values = _require_productive(a)
    y = np.asarray(final_demand, dtype=float)
    if y.shape != (values.shape[0],):
        raise DataFormatError(f"final demand has shape {y.shape}, expected ({values.shape[0]},)")
    if np.any(y < 0):
        raise DataFormatError("final demand must be nonnegative")
    ia = np.eye(values.shape[0]) - values
    try:
        x = np.linalg.solve(ia, y)
    except np.linalg.LinAlgError as exc:
        raise SolveError(f"(I - A) is singular: {exc}") from exc
    scale = max(1.0, float(np.max(np.abs(y), initial=0.0)))
    residual = float(np.max(np.abs(ia @ x - y), initial=0.0))
    if not residual <= solve_tol * scale:
        raise SolveError(f"output solve residual {residual:.3e} exceeds tolerance")
    return x
