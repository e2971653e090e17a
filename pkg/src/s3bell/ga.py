"""Clifford algebra Cl(3,0) kernel.

Multivectors are stored as 8 coefficients over the blades::

    1, e_x, e_y, e_z, e_x^e_y, e_y^e_z, e_z^e_x, I = e_x^e_y^e_z

Every product is read off a single precomputed table, so all identities
hold to floating point rounding.  ``gp`` works on stacked arrays of shape
``(..., 8)``; :class:`Multivector3` is the immutable scalar-at-a-time wrapper.
"""

from __future__ import annotations

import numpy as np

BLADE_NAMES = ("1", "e_x", "e_y", "e_z", "e_xy", "e_yz", "e_zx", "I")

# (bitmask, sign) with blade = sign * canonical ordered product of the bits.
# e_zx is stored as -e_xz.
_BLADES = ((0, 1), (1, 1), (2, 1), (4, 1), (3, 1), (6, 1), (5, -1), (7, 1))
_INDEX = {mask: (i, s) for i, (mask, s) in enumerate(_BLADES)}

SCALAR = 0
VECTOR = slice(1, 4)
BIVECTOR = slice(4, 7)
PSEUDOSCALAR = 7

# Blade indices holding the dual of e_x, e_y, e_z: I e_x = e_yz etc.
DUAL_INDEX = (5, 6, 4)

UNIT_TOL = 1e-12


def _reorder_sign(a: int, b: int) -> int:
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def _build_table() -> np.ndarray:
    table = np.zeros((8, 8, 8))
    for i, (mi, si) in enumerate(_BLADES):
        for j, (mj, sj) in enumerate(_BLADES):
            k, sk = _INDEX[mi ^ mj]
            table[i, j, k] = si * sj * sk * _reorder_sign(mi, mj)
    return table


PRODUCT_TABLE = _build_table()
PRODUCT_TABLE.setflags(write=False)
_FLAT_TABLE = PRODUCT_TABLE.reshape(64, 8)

_REVERSE_SIGNS = np.array([1, 1, 1, 1, -1, -1, -1, -1], dtype=float)


def gp(lhs, rhs) -> np.ndarray:
    """Geometric product of coefficient arrays, broadcasting over leading axes."""
    lhs = np.asarray(lhs, float)
    rhs = np.asarray(rhs, float)
    outer = lhs[..., :, None] * rhs[..., None, :]
    return outer.reshape(outer.shape[:-2] + (64,)) @ _FLAT_TABLE


def vector_coeffs(v) -> np.ndarray:
    v = np.asarray(v, float)
    out = np.zeros(v.shape[:-1] + (8,))
    out[..., VECTOR] = v
    return out


def dual_coeffs(v) -> np.ndarray:
    """Coefficients of I*v for vectors ``v`` of shape (..., 3)."""
    v = np.asarray(v, float)
    out = np.zeros(v.shape[:-1] + (8,))
    out[..., list(DUAL_INDEX)] = v
    return out


def bivector_dual(m) -> np.ndarray:
    """Vector w with bivector part of ``m`` equal to I*w."""
    m = np.asarray(m, float)
    return m[..., list(DUAL_INDEX)]


class Multivector3:
    """Immutable element of Cl(3,0)."""

    __slots__ = ("_c",)

    def __init__(self, coefficients=None):
        c = np.zeros(8) if coefficients is None else np.array(coefficients, dtype=float)
        if c.shape != (8,):
            raise ValueError(f"expected 8 coefficients, got shape {c.shape}")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def scalar(cls, value: float) -> "Multivector3":
        c = np.zeros(8)
        c[SCALAR] = value
        return cls(c)

    @classmethod
    def vector(cls, v) -> "Multivector3":
        return cls(vector_coeffs(v))

    @classmethod
    def blade(cls, name: str, value: float = 1.0) -> "Multivector3":
        c = np.zeros(8)
        c[BLADE_NAMES.index(name)] = value
        return cls(c)

    @property
    def coefficients(self) -> np.ndarray:
        return self._c

    def grade_part(self, grade: int) -> "Multivector3":
        sl = {0: slice(0, 1), 1: VECTOR, 2: BIVECTOR, 3: slice(7, 8)}[grade]
        c = np.zeros(8)
        c[sl] = self._c[sl]
        return Multivector3(c)

    @property
    def scalar_part(self) -> float:
        return float(self._c[SCALAR])

    @property
    def vector_part(self) -> np.ndarray:
        return self._c[VECTOR].copy()

    @property
    def bivector_dual(self) -> np.ndarray:
        return bivector_dual(self._c)

    def reverse(self) -> "Multivector3":
        return Multivector3(self._c * _REVERSE_SIGNS)

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self._c, self._c)))

    def is_even(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self._c[[1, 2, 3, 7]]) <= tol))

    def is_scalar(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self._c[1:]) <= tol))

    def isclose(self, other, tol: float = UNIT_TOL) -> bool:
        other = _coerce(other)
        return bool(np.max(np.abs(self._c - other._c)) <= tol)

    def __add__(self, other):
        return Multivector3(self._c + _coerce(other)._c)

    __radd__ = __add__

    def __sub__(self, other):
        return Multivector3(self._c - _coerce(other)._c)

    def __rsub__(self, other):
        return Multivector3(_coerce(other)._c - self._c)

    def __neg__(self):
        return Multivector3(-self._c)

    def __mul__(self, other):
        if isinstance(other, Multivector3):
            return Multivector3(gp(self._c, other._c))
        return Multivector3(self._c * float(other))

    def __rmul__(self, other):
        return Multivector3(float(other) * self._c)

    def __eq__(self, other):
        if not isinstance(other, Multivector3):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        terms = [f"{v:+.6g}*{n}" for v, n in zip(self._c, BLADE_NAMES) if v != 0.0]
        return f"Multivector3({' '.join(terms) or '0'})"


def _coerce(x) -> Multivector3:
    if isinstance(x, Multivector3):
        return x
    return Multivector3.scalar(float(x))


I = Multivector3.blade("I")


def geometric_product(lhs: Multivector3, rhs: Multivector3) -> Multivector3:
    return lhs * rhs


def as_unit(v, tol: float = UNIT_TOL) -> np.ndarray:
    """Validate a unit 3-vector and return it as a float array."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValueError(f"not a finite 3-vector: {v!r}")
    if abs(float(np.dot(v, v)) - 1.0) > tol:
        raise ValueError(f"not a unit vector (|v|^2 = {float(np.dot(v, v))!r})")
    return v


def wedge(v, w) -> Multivector3:
    """Outer product of two vectors, returned through the duality v^w = I(v x w)."""
    return Multivector3(dual_coeffs(np.cross(v, w)))


def dual(v) -> Multivector3:
    """I*v for a vector v."""
    return Multivector3(dual_coeffs(v))


def quaternion_exp(axis, half_angle: float) -> Multivector3:
    """cos(eta) + (I v) sin(eta)."""
    axis = as_unit(axis)
    if not np.isfinite(half_angle):
        raise ValueError("half_angle must be finite")
    return Multivector3.scalar(np.cos(half_angle)) + dual(axis) * np.sin(half_angle)


def _plane_quaternion(u, v) -> Multivector3:
    u = as_unit(u)
    v = as_unit(v)
    cos_eta = float(np.clip(np.dot(u, v), -1.0, 1.0))
    normal = np.cross(u, v)
    size = float(np.linalg.norm(normal))
    if size < UNIT_TOL:
        # collinear: sine factor vanishes, cos is exactly +-1
        return Multivector3.scalar(1.0 if cos_eta >= 0 else -1.0)
    eta = np.arccos(cos_eta)
    return Multivector3.scalar(cos_eta) + dual(normal / size) * np.sin(eta)


def make_P(n, e0) -> Multivector3:
    """Unit quaternion cos(eta) + (n^e0/|n^e0|) sin(eta), eta = angle(n, e0)."""
    return _plane_quaternion(n, e0)


def make_Q(z, s0) -> Multivector3:
    """Unit quaternion built from the reference vector z and the pair spin s0."""
    return _plane_quaternion(z, s0)


def spin_bivector(n, lam: int) -> Multivector3:
    """L(n, lambda) = lambda * I * n."""
    if lam not in (-1, 1):
        raise ValueError(f"lambda must be -1 or +1, got {lam!r}")
    return dual(np.asarray(n, float)) * lam


def detector_bivector(n) -> Multivector3:
    """D(n) = I * n, the detector's fixed-orientation bivector."""
    return dual(np.asarray(n, float))
