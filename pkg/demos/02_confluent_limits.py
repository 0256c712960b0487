"""
Coinciding coordinates
======================

When coordinates of F or Y coincide the determinant formula is 0/0.
The library evaluates the limit with divided differences, so nothing
special happens as a gap closes.
"""

import numpy as np

from maxent_orbits import CoincidencePattern, confluent_limit, log_integral, make_group_spec

u2 = make_group_spec("U", 2)

# F = (1, 1) is a single point, so the integral is exp(-<Y, F>) = e
lim = confluent_limit(u2, [1.0, 1.0], [0.0, -1.0], CoincidencePattern(f_groups=[[0, 1]]))
print("U(2) limit:", lim.log_value)

# the value is continuous as the gap shrinks
for gap in [1e-1, 1e-3, 1e-6, 1e-9, 0.0]:
    v = log_integral(u2, [1.0, 1.0 + gap], [0.0, -1.0]).log_value
    print(f"  gap {gap:7.0e}: {v:.15f}")

# SO(5): a zero coordinate of F is another confluent case
so5 = make_group_spec("SOodd", 2)
Y = np.array([0.4, -1.3])
lim = confluent_limit(so5, [0.9, 0.0], Y, CoincidencePattern(f_zeros=[1])).log_value
for xi in [1e-4, 1e-5, 1e-6]:
    print(f"SO(5) F2 = {xi:.0e}: error {abs(log_integral(so5, [0.9, xi], Y).log_value - lim):.2e}")
