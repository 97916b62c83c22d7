"""Energy prices and the conversion of monetary energy sales into physical flows."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataFormatError, PricingError
from .io_core import EconomyTable, SectorCatalog, _read_csv, _index_by_code, _numeric

CANONICAL_ENERGY = "ktoe"

# Multiplier taking a value in the given unit to ktoe.
ENERGY_FACTORS = {
    "ktoe": 1.0,
    "toe": 1e-3,
    "Mtoe": 1e3,
    "TJ": 1.0 / 41.868,
    "PJ": 1e3 / 41.868,
}

AVERAGING_METHODS = ("arithmetic_mean", "output_weighted")


def energy_factor(unit: str) -> float:
    try:
        return ENERGY_FACTORS[unit]
    except KeyError:
        known = ", ".join(sorted(ENERGY_FACTORS))
        raise DataFormatError(f"unknown energy unit {unit!r} (known: {known})") from None


@dataclass(frozen=True)
class EnergyAccount:
    """Physical energy use per sector in ktoe."""

    sectors: SectorCatalog
    values: np.ndarray
    year: int = 0
    unit: str = CANONICAL_ENERGY

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.sectors),):
            raise DataFormatError(f"energy account has shape {values.shape}, expected ({len(self.sectors)},)")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DataFormatError("energy use must be finite and nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def energy_sector_total(self) -> float:
        """Energy use summed over the sectors flagged as energy sectors."""
        return float(self.values[self.sectors.energy_mask].sum())


@dataclass(frozen=True)
class EnergyPriceVector:
    """Per-energy-sector prices and their average, in ktoe per USD million."""

    codes: tuple[str, ...]
    per_sector: np.ndarray
    uniform: float
    averaging_method: str = "arithmetic_mean"

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.codes, self.per_sector.tolist()))


@dataclass(frozen=True)
class EnergyFlowTable:
    """``flows[k, j]``: ktoe delivered by the k-th energy sector to buying sector j."""

    energy_codes: tuple[str, ...]
    flows: np.ndarray
    year: int = 0

    def __post_init__(self):
        flows = np.array(self.flows, dtype=float)
        if flows.ndim != 2 or flows.shape[0] != len(self.energy_codes):
            raise DataFormatError(f"energy flow table shape {flows.shape} does not match "
                                  f"{len(self.energy_codes)} energy sectors")
        flows.setflags(write=False)
        object.__setattr__(self, "flows", flows)


def load_energy_account(path, catalog: SectorCatalog, *, year: int = 0,
                        energy_unit: str = CANONICAL_ENERGY) -> EnergyAccount:
    """Read ``energy.csv`` (columns ``code,energy_use``), converting to ktoe.

    Sectors missing from the file are an error; real energy balances list
    every sector, and non-energy rows are simply carried along.
    """
    factor = energy_factor(energy_unit)
    path = Path(path)
    df = _index_by_code(_read_csv(path), path, catalog, "energy rows")
    df.columns = [c.strip() for c in df.columns]
    if "energy_use" not in df.columns:
        raise DataFormatError("missing column energy_use", location=str(path))
    values = _numeric(df[["energy_use"]], path, catalog.codes)[:, 0]
    neg = np.flatnonzero(values < 0)
    if neg.size:
        raise DataFormatError(f"negative energy use for sector {catalog.codes[neg[0]]}", location=str(path))
    return EnergyAccount(catalog, values * factor, year=int(year), unit=CANONICAL_ENERGY)


def sector_energy_price(energy_use: float, total_output: float, imports: float,
                        sector: str = "") -> float:
    """Physical energy per unit of domestic production, E / (X - M)."""
    label = f" for sector {sector}" if sector else ""
    domestic = total_output - imports
    if not domestic > 0:
        raise PricingError(
            f"imports ({imports:g}) are not below total output ({total_output:g}){label}; "
            "domestic production must be positive to price energy"
        )
    if not energy_use > 0:
        raise PricingError(f"energy use is {energy_use:g}{label}; a priced energy sector must use energy")
    return energy_use / domestic


def uniform_energy_price(prices, method: str = "arithmetic_mean", weights=None) -> float:
    """Average the energy-sector prices into a single conversion factor.

    ``output_weighted`` weights each price by the sector's domestic
    production (X - M), passed as ``weights``.
    """
    p = np.asarray(prices, dtype=float)
    if p.size == 0:
        raise PricingError("cannot average an empty price list")
    if np.any(p <= 0):
        raise PricingError("energy prices must be positive")
    if method == "arithmetic_mean":
        value = float(p.mean())
    elif method == "output_weighted":
        if weights is None:
            raise PricingError("output_weighted averaging needs weights")
        w = np.asarray(weights, dtype=float)
        if w.shape != p.shape or np.any(w <= 0):
            raise PricingError("weights must be positive and match the price list")
        value = float(np.dot(p, w) / w.sum())
    else:
        raise PricingError(f"unknown averaging method {method!r}; expected one of {AVERAGING_METHODS}")
    # round-off can push a mean of equal prices one ulp outside the range
    return min(max(value, float(p.min())), float(p.max()))


def energy_prices(table: EconomyTable, account: EnergyAccount,
                  method: str = "arithmetic_mean") -> EnergyPriceVector:
    """Price every energy sector of ``table`` and average the prices.

    An account with zero use in every energy sector is allowed and yields
    zero prices, hence zero energy flows and intensities downstream.
    """
    idx = table.sectors.energy_indices
    codes = tuple(table.sectors.codes[i] for i in idx)
    if not np.any(account.values[idx] > 0):
        for k, i in enumerate(idx):
            if not table.total_output[i] - table.imports[i] > 0:
                sector_energy_price(1.0, table.total_output[i], table.imports[i], codes[k])
        zeros = np.zeros(len(idx))
        zeros.setflags(write=False)
        return EnergyPriceVector(codes, zeros, 0.0, method)
    prices = np.array([
        sector_energy_price(account.values[i], table.total_output[i], table.imports[i], codes[k])
        for k, i in enumerate(idx)
    ])
    weights = table.total_output[idx] - table.imports[idx]
    uniform = uniform_energy_price(prices, method, weights if method == "output_weighted" else None)
    prices.setflags(write=False)
    return EnergyPriceVector(codes, prices, uniform, method)


def build_energy_flow_table(table: EconomyTable, uniform_price: float) -> EnergyFlowTable:
    """Convert the energy-sector rows of the flow matrix to ktoe at one price."""
    if not uniform_price >= 0:
        raise PricingError(f"uniform price must be nonnegative, got {uniform_price}")
    idx = table.sectors.energy_indices
    return EnergyFlowTable(
        energy_codes=tuple(table.sectors.codes[i] for i in idx),
        flows=table.flows[idx, :] * uniform_price,
        year=table.year,
    )


def intermediate_demand_share(table: EconomyTable, account: EnergyAccount | None = None) -> float:
    """Fraction of energy-sector demand that goes to intermediate use.

    Computed on monetary flows; under a single uniform price the physical
    share is the same number. ``account`` is accepted for symmetry with the
    other energy functions and is not needed for the ratio.
    """
    idx = table.sectors.energy_indices
    intermediate = float(table.flows[idx, :].sum())
    total = intermediate + float(table.final_demand[idx].sum())
    if not total > 0:
        raise PricingError("total demand for energy sectors is zero")
    return intermediate / total

