"""
Direct and total energy intensities for the bundled fixture
===========================================================

The package ships a small five-sector economy with two energy sectors
(MIN and ELG) observed in 2005 and 2011.
"""

import numpy as np

from energyio import (compute_intensities, energy_prices, load_config, technical_coefficients,
                      validate_balances)
from energyio.datasets import synthetic5_config
from energyio.report import load_year

config = load_config(synthetic5_config())
table, account = load_year(config, 2011)
print(table.sectors.codes)

# Row and column balances close exactly on this fixture
print(validate_balances(table, config.balance_rel_tol).summary())

# Energy price per sector: energy use over domestic production (X - M).
# The uniform price is their plain average unless configured otherwise.
prices = energy_prices(table, account)
print(prices.as_dict(), prices.uniform)

s, prices, flows = compute_intensities(table, account)
np.set_printoptions(precision=2, suppress=True)
print("direct  ", s.direct)
print("total   ", s.total)
print("indirect", s.indirect)
print("share % ", s.share)

# total - direct - indirect is zero to the last bit, not merely small
print((s.total - s.direct - s.indirect).tolist())

# Re-denominating money (USD million -> USD thousand) leaves A unchanged and
# divides every intensity by 1000.
big = table.scaled(1000.0)
print(np.array_equal(technical_coefficients(table).values, technical_coefficients(big).values))
s_big, _, _ = compute_intensities(big, account)
print(s_big.total * 1000 / s.total)
