"""
Sweeping the angle parameter across one full period
===================================================

The lower bound from a fixed truncation depth is a function of the site
angle. Sweeping it shows the generic plateau and the dips near angles
where conditional norms degenerate. A crude text plot is enough to see
the shape.
"""

import math

from affdim import SolverOptions, affinity_dimension
from affdim import AffineMap2, IfsFamily, Mat2, RankOneSite

family = IfsFamily(
    regular=(AffineMap2(Mat2.diagonal(1 / 3, 1 / 3), (0.0, 0.0)),),
    singular=(
        RankOneSite(rho=0.5, v_angle=0.0, c=0.0, beta=1.0, translation=(1.0, 0.0)),
    ),
)

opts = SolverOptions(depth=10)
steps = 48
period = 2.0 * math.pi  # beta = 1
values = []
for k in range(steps + 1):
    alpha = k * period / steps
    values.append(affinity_dimension(family, alpha, opts).lower)

top = max(values)
print("lower bound over one period (depth 10), full scale = %.6f" % top)
for k, value in enumerate(values):
    alpha = k * period / steps
    bar = "#" * int(round(60 * value / top))
    print("%.3f  %.6f  %s" % (alpha, value, bar))

# The dips sit where the row direction of the site turns orthogonal to
# the directions the truncated words can produce: the finite sums lose
# almost all their mass there, and the bound honestly reflects it.
floor = min(values)
print()
print("plateau %.6f, deepest dip %.6f at angle %.3f"
      % (top, floor, values.index(floor) * period / steps))
