"""
Bracketing the critical exponent of a mixed affine family
=========================================================

The family here has one invertible contraction x -> x/3 and one rank-one
map that crushes the plane onto a line. For this particular pair the
critical exponent solves (1/2)^s + (1/3)^s = 1 exactly, so we can watch
the certified bracket close in on a value we can check by hand.
"""

import math

from affdim import AffineMap2, IfsFamily, Mat2, RankOneSite, SolverOptions
from affdim import affinity_dimension

family = IfsFamily(
    regular=(AffineMap2(Mat2.diagonal(1 / 3, 1 / 3), (0.0, 0.0)),),
    singular=(
        RankOneSite(rho=0.5, v_angle=0.0, c=0.0, beta=1.0, translation=(1.0, 0.0)),
    ),
)

# The exact exponent, found by ordinary bisection on the scalar equation.
lo, hi = 0.0, 2.0
for _ in range(80):
    mid = 0.5 * (lo + hi)
    if 0.5 ** mid + (1 / 3) ** mid > 1.0:
        lo = mid
    else:
        hi = mid
exact = 0.5 * (lo + hi)
print("exact exponent  %.12f" % exact)
print()

# Deeper truncations tighten both ends. The lower end is the root of a
# finite sum and can only go up; the upper end carries a tail bound.
print("depth   lower          upper          width")
for depth in (2, 4, 6, 8, 10, 12):
    bracket = affinity_dimension(family, 0.0, SolverOptions(depth=depth))
    print(
        "%5d   %.9f    %.9f    %.2e"
        % (depth, bracket.lower, bracket.upper, bracket.upper - bracket.lower)
    )

bracket = affinity_dimension(family, 0.0, SolverOptions(depth=12))
assert bracket.lower <= exact <= bracket.upper
print()
print("the depth-12 bracket traps the exact value, as it must")

# The same call works at any angle of the rank-one row direction; the
# exponent changes because the conditional norms do.
print()
print("angle    lower bound")
for k in range(7):
    alpha = k * math.pi / 6
    b = affinity_dimension(family, alpha, SolverOptions(depth=10))
    print("%.3f    %.6f" % (alpha, b.lower))
