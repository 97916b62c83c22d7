"""Direct, total and indirect sectoral energy intensities (ktoe per USD million)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import (EnergyAccount, EnergyFlowTable, EnergyPriceVector, build_energy_flow_table,
                     energy_prices)
from .errors import DataFormatError, SolveError
from .io_core import (DEFAULT_SOLVE_TOL, CoefficientMatrix, EconomyTable, LeontiefInverse,
                      SectorCatalog, _require_productive, technical_coefficients)


@dataclass(frozen=True)
class IntensitySet:
    sectors: SectorCatalog
    direct: np.ndarray
    total: np.ndarray
    indirect: np.ndarray
    year: int = 0
    unit: str = "ktoe/USDm"

    @property
    def share(self) -> np.ndarray:
        return direct_share(self.direct, self.total)


@dataclass(frozen=True)
class AggregateIntensity:
    value: float
    energy: float
    denominator: float
    basis: str


def _vector(values, n=None, name="vector") -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or (n is not None and v.shape[0] != n):
        raise DataFormatError(f"{name} has shape {v.shape}, expected ({n},)")
    return v


def direct_intensity(energy_flows: EnergyFlowTable, table: EconomyTable) -> np.ndarray:
    """Energy bought from all energy sectors per unit of each sector's output."""
    if energy_flows.flows.shape[1] != table.n:
        raise DataFormatError(
            f"energy flow table has {energy_flows.flows.shape[1]} columns, table has {table.n} sectors"
        )
    return energy_flows.flows.sum(axis=0) / table.total_output


def total_intensity(direct, inverse, solve_tol: float = DEFAULT_SOLVE_TOL) -> np.ndarray:
    """Propagate direct intensities through the supply chain: total = direct @ L.

    ``inverse`` may be a :class:`CoefficientMatrix` (transposed solve of
    (I - A)^T t = direct, no explicit inverse), a :class:`LeontiefInverse`,
    or a plain matrix taken to be L itself.

    When A is known the result is finished with one sweep of the identity
    total = direct + total @ A, which keeps total >= direct in floating point.
    """
    d = np.asarray(direct, dtype=float)
    if isinstance(inverse, CoefficientMatrix):
        a = _require_productive(inverse)
        if d.shape != (a.shape[0],):
            raise DataFormatError(f"direct intensity has shape {d.shape}, expected ({a.shape[0]},)")
        ia_t = (np.eye(a.shape[0]) - a).T
        try:
            t = np.linalg.solve(ia_t, d)
        except np.linalg.LinAlgError as exc:
            raise SolveError(f"(I - A) is singular: {exc}") from exc
        residual = float(np.max(np.abs(ia_t @ t - d), initial=0.0))
        if not residual <= solve_tol * max(1.0, float(np.max(np.abs(d), initial=0.0))):
            raise SolveError(f"intensity solve residual {residual:.3e} exceeds tolerance")
    else:
        if isinstance(inverse, LeontiefInverse):
            lv, a = inverse.values, inverse.coefficients
        else:
            lv, a = np.asarray(inverse, dtype=float), None
        if lv.ndim != 2 or d.shape != (lv.shape[0],):
            raise DataFormatError(f"direct intensity has shape {d.shape}, Leontief inverse {lv.shape}")
        t = d @ lv
    if a is None:
        return t
    if np.all(d >= 0):
        # true totals are nonnegative here; clipping only removes solver round-off
        t = np.maximum(t, 0.0)
    return d + t @ a


def indirect_intensity(total, direct) -> np.ndarray:
    t = np.asarray(total, dtype=float)
    d = _vector(direct, t.shape[0] if t.ndim == 1 else None, "direct intensity")
    if t.shape != d.shape:
        raise DataFormatError(f"total {t.shape} and direct {d.shape} differ in shape")
    return t - d


def direct_share(direct, total) -> np.ndarray:
    """Direct intensity as a percentage of total; NaN marks sectors with zero total."""
    d = np.asarray(direct, dtype=float)
    t = np.asarray(total, dtype=float)
    if d.shape != t.shape:
        raise DataFormatError(f"direct {d.shape} and total {t.shape} differ in shape")
    out = np.full(t.shape, np.nan)
    np.divide(100.0 * d, t, out=out, where=t > 0)
    return out


def aggregate_intensity(energy, denominator: float, basis: str = "total_output") -> AggregateIntensity:
    """Economy-wide energy per unit of a monetary aggregate (GDP or total output)."""
    if isinstance(energy, EnergyAccount):
        energy = energy.energy_sector_total
    energy = float(energy)
    denominator = float(denominator)
    if not denominator > 0:
        raise DataFormatError(f"aggregate denominator ({basis}) must be positive, got {denominator:g}")
    return AggregateIntensity(energy / denominator, energy, denominator, basis)


def compute_intensities(table: EconomyTable, account: EnergyAccount, *,
                        averaging_method: str = "arithmetic_mean",
                        solve_tol: float = DEFAULT_SOLVE_TOL,
                        coefficients: CoefficientMatrix | None = None,
                        ) -> tuple[IntensitySet, EnergyPriceVector, EnergyFlowTable]:
    """Prices, physical energy flows and the three intensity vectors for one year."""
    if coefficients is None:
        coefficients = technical_coefficients(table)
    prices = energy_prices(table, account, averaging_method)
    flows = build_energy_flow_table(table, prices.uniform)
    direct = direct_intensity(flows, table)
    total = total_intensity(direct, coefficients, solve_tol)
    indirect = indirect_intensity(total, direct)
    return IntensitySet(table.sectors, direct, total, indirect, year=table.year), prices, flows
