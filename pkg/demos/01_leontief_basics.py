"""
Leontief inverse on a two-sector economy
========================================

"""

import numpy as np

from energyio import (CoefficientMatrix, hawkins_simon_check, leontief_inverse,
                      leontief_series_oracle, solve_output)

# Each column of A says how much of every input one unit of that sector's
# output needs. Here sector 0 buys 0.2 from sector 1, sector 1 buys 0.5 from 0.
a = CoefficientMatrix(np.array([[0.0, 0.5],
                                [0.2, 0.0]]))
print(a.column_sums)

# The leading principal minors of (I - A) are all positive, so the economy
# can meet any nonnegative final demand.
print(hawkins_simon_check(a.values))

L = leontief_inverse(a)
print(L.values)            # [[1, .5], [.2, 1]] / 0.9
print(L.residual_norm)

# The inverse is the limit of I + A + A^2 + ... ; a short series already agrees
print(np.abs(L.values - leontief_series_oracle(a.values, 60)).max())

# Gross output needed to deliver 100 units of final demand from sector 0
print(solve_output(a, [100.0, 0.0]))

# A = I is the textbook non-productive case: every unit of output is used up
# producing itself.
try:
    leontief_inverse(CoefficientMatrix(np.eye(2)))
except Exception as exc:
    print(type(exc).__name__, exc)
