"""Planar linear algebra kit: directions mod pi, 2x2 matrices with
closed-form singular values, factored rank-one maps, and the singular
value function that drives every dimension estimate in this package.

Everything here is exact-formula numerics on scalars; batch variants for
large word enumerations live at the bottom and operate on stacked arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

_WRAP_TOL = 1e-12


def unit_vector(angle: float) -> np.ndarray:
    """Unit vector (cos angle, sin angle)."""
    return np.array([math.cos(angle), math.sin(angle)])


@dataclass(frozen=True)
class LineDir:
    """Direction of an unoriented line through the origin.

    The angle is canonicalized to [0, pi); values within 1e-12 of pi wrap
    to 0 so that near-horizontal lines compare equal regardless of the
    side they were produced from.
    """

    angle: float

    def __post_init__(self):
        a = self.angle % math.pi
        if a >= math.pi - _WRAP_TOL:
            a = 0.0
        object.__setattr__(self, "angle", a)

    @classmethod
    def from_vector(cls, v) -> "LineDir":
        v = np.asarray(v, dtype=float)
        n = math.hypot(v[0], v[1])
        if n == 0.0:
            raise ValueError("zero vector has no direction")
        return cls(math.atan2(v[1], v[0]))

    def unit(self) -> np.ndarray:
        return unit_vector(self.angle)

    def perpendicular(self) -> "LineDir":
        return LineDir(self.angle + math.pi / 2)

    def distance_to(self, other: "LineDir") -> float:
        """Metric on directions: angular gap mod pi, in [0, pi/2]."""
        d = abs(self.angle - other.angle) % math.pi
        return min(d, math.pi - d)


@dataclass(frozen=True)
class Mat2:
    """Dense 2x2 matrix stored as four scalars.

    Scalar storage keeps word-by-word compositions allocation-free and
    makes the closed-form singular values below trivially branch-exact.
    """

    a11: float
    a12: float
    a21: float
    a22: float

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diagonal(cls, d1: float, d2: float) -> "Mat2":
        return cls(d1, 0.0, 0.0, d2)

    @classmethod
    def scaled_rotation(cls, scale: float, angle: float) -> "Mat2":
        c, s = scale * math.cos(angle), scale * math.sin(angle)
        return cls(c, -s, s, c)

    @classmethod
    def from_array(cls, arr) -> "Mat2":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (2, 2):
            raise ValueError("expected a 2x2 array")
        return cls(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def singular_values(self) -> tuple:
        """(largest, smallest) singular value, closed form.

        Uses the rotation-split identities: with E,F the symmetric and
        H,G the antisymmetric combinations of the entries, the two
        singular values are hypot(E,H) +- hypot(F,G).
        """
        e = (self.a11 + self.a22) / 2.0
        f = (self.a11 - self.a22) / 2.0
        g = (self.a21 + self.a12) / 2.0
        h = (self.a21 - self.a12) / 2.0
        q = math.hypot(e, h)
        r = math.hypot(f, g)
        return q + r, abs(q - r)

    def operator_norm(self) -> float:
        return self.singular_values()[0]

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.array(
            [self.a11 * v[0] + self.a12 * v[1], self.a21 * v[0] + self.a22 * v[1]]
        )

    def transpose(self) -> "Mat2":
        return Mat2(self.a11, self.a21, self.a12, self.a22)

    def inverse(self) -> "Mat2":
        d = self.det()
        if abs(d) < 1e-300:
            raise ZeroDivisionError("matrix is singular")
        return Mat2(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def __mul__(self, scalar: float) -> "Mat2":
        return Mat2(
            self.a11 * scalar, self.a12 * scalar, self.a21 * scalar, self.a22 * scalar
        )

    __rmul__ = __mul__


@dataclass(frozen=True)
class RankOneFactor:
    """Rank-one map rho * v w^T kept in factored form.

    v and w are unit vectors given by their angles. Compositions with
    rank-one factors stay factored (see ifs.compose_linear), which keeps
    the conditional-norm formulas exact instead of reconstructing a
    nearly-singular dense matrix.
    """

    rho: float
    v_angle: float
    w_angle: float

    def __post_init__(self):
        if self.rho <= 0.0:
            raise ValueError("rank-one factor needs rho > 0")

    def v(self) -> np.ndarray:
        return unit_vector(self.v_angle)

    def w(self) -> np.ndarray:
        return unit_vector(self.w_angle)

    def as_mat2(self) -> Mat2:
        v, w = self.v(), self.w()
        return Mat2(
            self.rho * v[0] * w[0],
            self.rho * v[0] * w[1],
            self.rho * v[1] * w[0],
            self.rho * v[1] * w[1],
        )

    def singular_values(self) -> tuple:
        return self.rho, 0.0

    def operator_norm(self) -> float:
        return self.rho

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        w = self.w()
        return (self.rho * (w[0] * x[0] + w[1] * x[1])) * self.v()


Linear = Union[Mat2, RankOneFactor]


def image_dir(r: RankOneFactor) -> LineDir:
    """Direction of the image line of a rank-one map."""
    return LineDir(r.v_angle)


def kernel_dir(r: RankOneFactor) -> LineDir:
    """Direction of the kernel line (perpendicular to the row vector w)."""
    return LineDir(r.w_angle + math.pi / 2)


def singular_values(m: Linear) -> tuple:
    return m.singular_values()


def svf(m: Linear, t: float) -> float:
    """Singular value function phi^t(m).

    phi^t interpolates the singular values: alpha1^t up to t=1, then
    alpha1 * alpha2^(t-1) up to t=2, then |det|^(t/2). For rank-one
    maps this is rho^t for t <= 1 and exactly 0 beyond, which is the
    behaviour the anchored sums rely on.
    """
    if t < 0.0:
        raise ValueError("svf needs t >= 0")
    a1, a2 = m.singular_values()
    if t == 0.0:
        return 1.0
    if t <= 1.0:
        return a1 ** t
    if a2 == 0.0:
        return 0.0
    if t <= 2.0:
        return a1 * a2 ** (t - 1.0)
    return (a1 * a2) ** (t / 2.0)


def conditional_norm(m: Linear, line: LineDir) -> float:
    """Operator norm of m restricted to a line through the origin.

    Equals |m u| for the unit vector u of the line; for a factored
    rank-one map this reduces to rho * |<w, u>| without any cancellation.
    """
    u = line.unit()
    if isinstance(m, RankOneFactor):
        w = m.w()
        return m.rho * abs(w[0] * u[0] + w[1] * u[1])
    mu = m.apply(u)
    return math.hypot(mu[0], mu[1])


# --- batch variants ---------------------------------------------------------
#
# Stacked (n,2,2) products appear in the dimension solvers; the formulas
# mirror the scalar ones entry for entry so both paths agree bit for bit
# on the same inputs.


def batch_singular_values(prods: np.ndarray) -> tuple:
    """Largest and smallest singular values of a stack of 2x2 matrices."""
    e = (prods[:, 0, 0] + prods[:, 1, 1]) / 2.0
    f = (prods[:, 0, 0] - prods[:, 1, 1]) / 2.0
    g = (prods[:, 1, 0] + prods[:, 0, 1]) / 2.0
    h = (prods[:, 1, 0] - prods[:, 0, 1]) / 2.0
    q = np.hypot(e, h)
    r = np.hypot(f, g)
    return q + r, np.abs(q - r)


def batch_svf(prods: np.ndarray, t: float) -> np.ndarray:
    """Singular value function over a stack of 2x2 matrices."""
    if t < 0.0:
        raise ValueError("svf needs t >= 0")
    a1, a2 = batch_singular_values(prods)
    if t == 0.0:
        return np.ones_like(a1)
    if t <= 1.0:
        return a1 ** t
    out = np.zeros_like(a1)
    pos = a2 > 0.0
    if t <= 2.0:
        out[pos] = a1[pos] * a2[pos] ** (t - 1.0)
    else:
        out[pos] = (a1[pos] * a2[pos]) ** (t / 2.0)
    return out
