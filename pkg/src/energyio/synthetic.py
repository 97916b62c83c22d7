"""Random, exactly balanced economies for tests and demos."""

from __future__ import annotations

import numpy as np

from .io_core import EconomyTable, SectorCatalog, solve_output


def random_coefficients(rng: np.random.Generator, n: int, max_column_sum: float = 0.9,
                        density: float = 1.0) -> np.ndarray:
    """Nonnegative n x n matrix whose column sums are each at most ``max_column_sum``."""
    a = rng.random((n, n))
    if density < 1.0:
        a *= rng.random((n, n)) < density
    sums = a.sum(axis=0)
    targets = rng.uniform(0.0, max_column_sum, size=n)
    scale = np.divide(targets, sums, out=np.zeros(n), where=sums > 0)
    return a * scale[np.newaxis, :]


def synthetic_catalog(n: int, n_energy: int = 1) -> SectorCatalog:
    if not 1 <= n_energy < n:
        raise ValueError(f"need 1 <= n_energy < n, got n_energy={n_energy}, n={n}")
    return SectorCatalog.from_records(
        [(f"S{k:02d}", f"Sector {k}", k < n_energy) for k in range(n)]
    )


def synthetic_economy(rng: np.random.Generator, n: int, n_energy: int = 1, *,
                      max_column_sum: float = 0.9, demand_scale: float = 100.0,
                      year: int = 2000) -> EconomyTable:
    """Draw A and Y, then set X = (I-A)^-1 Y, Z = A diag(X), V = X - colsum(Z), M = 0.

    Both balances close up to round-off, whatever ``n`` is.
    """
    a = random_coefficients(rng, n, max_column_sum)
    y = rng.uniform(0.1, 1.0, size=n) * demand_scale
    x = solve_output(a, y)
    z = a * x[np.newaxis, :]
    v = np.maximum(x - z.sum(axis=0), 0.0)
    return EconomyTable(
        sectors=synthetic_catalog(n, n_energy),
        flows=z,
        final_demand=y,
        imports=np.zeros(n),
        value_added=v,
        total_output=x,
        year=year,
    )
