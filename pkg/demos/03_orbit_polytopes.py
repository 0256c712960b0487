"""
Orbit polytopes and Kostant convexity
=====================================

Projecting an orbit onto the Cartan subalgebra lands in the convex hull
of a Weyl orbit.  Membership in that polytope decides whether a mean is
attainable, and the interior margin sets the solver's search radius.
"""

import numpy as np

from maxent_orbits import kostant_project, majorization_member, make_group_spec, membership, weyl_orbit
from maxent_orbits.montecarlo import haar_batch, orbit_points, rng_stream

usp2 = make_group_spec("USp", 2)
F = np.array([1.0, 2.0])
print("Weyl orbit of", F, "in", usp2)
print(weyl_orbit(usp2, F))

# projections of random orbit points are never outside
X = orbit_points(usp2, F, haar_batch(usp2, 200, rng_stream(0, 0)))
statuses = {membership(usp2, F, kostant_project(usp2, x)).status for x in X}
print("statuses of 200 projected orbit points:", statuses)

# interior, boundary and outside
u2 = make_group_spec("U", 2)
for A in ([0.5, 0.5], [1.0, 0.0], [1.2, -0.2]):
    r = membership(u2, [1.0, 0.0], A)
    print(f"U(2) A = {A}: {r.status:8s} margin {r.margin:.6f}  majorized: {majorization_member([1, 0], A)}")

# an outside report carries a separating functional
r = membership(u2, [1.0, 0.0], [1.2, -0.2])
print("separating functional:", r.certificate)
