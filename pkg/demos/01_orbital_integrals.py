"""
Orbital integrals in closed form
================================

The log-partition function of the uniform measure on an adjoint orbit,
``E_F(Y) = log E[exp(-<Y, X>)]``, is a ratio of determinants.  Here it is
compared against brute-force Haar averages for every supported family.
"""

import numpy as np

from maxent_orbits import log_integral, make_group_spec, mc_log_integral

# U(2) with unit gaps: the closed form gives log(e - 1)
u2 = make_group_spec("U", 2)
print("U(2):", log_integral(u2, [0.0, 1.0], [0.0, -1.0]).log_value, "vs", np.log(np.e - 1))

# SU(2): the diagonal entry of a rotated diag(if, -if) is uniform on [-f, f]
su2 = make_group_spec("SU", 2)
f, y = 1.0, 0.6
print("SU(2):", log_integral(su2, [f, -f], [y, -y]).log_value, "vs", np.log(np.sinh(2 * f * y) / (2 * f * y)))

# every family against 10^5 Haar samples
rng = np.random.default_rng(0)
print(f"\n{'group':>8} {'closed form':>12} {'Monte Carlo':>12} {'stderr':>8}")
for family, n in [("U", 3), ("SU", 3), ("SOeven", 2), ("SOodd", 2), ("Oeven", 2), ("USp", 2)]:
    s = make_group_spec(family, n)
    F, Y = rng.uniform(-1.5, 1.5, n), rng.uniform(-1.5, 1.5, n)
    if family == "SU":
        F, Y = F - F.mean(), Y - Y.mean()
    exact = log_integral(s, F, Y)
    mc = mc_log_integral(s, F, Y, 100_000, seed=1)
    print(f"{str(s):>8} {exact.log_value:12.6f} {mc.mean:12.6f} {mc.stderr:8.4f}")

# The gradient is minus the Cartan projection of the tilted orbit mean.
r = log_integral(u2, [1.0, 0.0], [0.0, 0.0])
print("\nU(2) orbit mean at Y = 0:", -r.gradient)

# Large arguments are handled in the log domain.
big = log_integral(make_group_spec("USp", 3), [-1.0, 0.15, 1.3], [700.0, -600.0, -1900.0])
print("USp(3) at |Y| ~ 2000:", big.log_value, "condition estimate", round(big.condition_estimate, 2))
