"""Linear and affine algebra of flat Newtonian space-time in a fixed chart.

Conventions used by every module in this package:

* An event is a coordinate tuple (t, q1, q2, q3).
* Vectors and covectors carry four components c0..c3 / a0..a3 and pair by
  the plain sum a0*c0 + a1*c1 + a2*c2 + a3*c3.
* The time covector TAU is (1, 0, 0, 0).  Vectors with vanishing first
  component are spatial (they connect simultaneous events); the metric acts
  on their three spatial components only.
* A frame is a vector with time component exactly 1; its spatial part is the
  constant velocity of the corresponding family of inertial observers.

Everything here is a pure function of immutable values.  No state, no
globals beyond TAU.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GalimechError(Exception):
    """Base class for every error raised by this package."""


class NotSimultaneous(GalimechError):
    """Spatial distance requested between events at different times."""


class SingularMetric(GalimechError):
    """A candidate metric matrix is not positive definite at tolerance."""


# Eigenvalues of a spatial metric must clear this floor.
_SPD_EIGENVALUE_FLOOR = 1e-12

# |t(x) - t(x')| below this (scaled) threshold counts as simultaneous.
_SIMULTANEITY_REL = 1e-12


@dataclass(frozen=True)
class Vector4:
    """Displacement between events, or a velocity of a parametrized motion."""

    c0: float
    c1: float
    c2: float
    c3: float

    @classmethod
    def from_array(cls, a) -> "Vector4":
        a = np.asarray(a, dtype=float)
        if a.shape != (4,):
            raise ValueError(f"Vector4 needs 4 components, got shape {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2, self.c3], dtype=float)

    @property
    def spatial(self) -> np.ndarray:
        """Components along the three simultaneity directions."""
        return np.array([self.c1, self.c2, self.c3], dtype=float)

    def __add__(self, other: "Vector4") -> "Vector4":
        return Vector4(self.c0 + other.c0, self.c1 + other.c1,
                       self.c2 + other.c2, self.c3 + other.c3)

    def __sub__(self, other: "Vector4") -> "Vector4":
        return Vector4(self.c0 - other.c0, self.c1 - other.c1,
                       self.c2 - other.c2, self.c3 - other.c3)

    def __neg__(self) -> "Vector4":
        return Vector4(-self.c0, -self.c1, -self.c2, -self.c3)

    def __mul__(self, scalar: float) -> "Vector4":
        return Vector4(scalar * self.c0, scalar * self.c1,
                       scalar * self.c2, scalar * self.c3)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Covector4:
    """Linear functional on four-component vectors."""

    a0: float
    a1: float
    a2: float
    a3: float

    @classmethod
    def from_array(cls, a) -> "Covector4":
        a = np.asarray(a, dtype=float)
        if a.shape != (4,):
            raise ValueError(f"Covector4 needs 4 components, got shape {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3], dtype=float)

    @property
    def spatial(self) -> np.ndarray:
        """Restriction to the simultaneity directions (components a1..a3)."""
        return np.array([self.a1, self.a2, self.a3], dtype=float)

    def pair(self, v) -> float:
        """Evaluate on a Vector4 or on a Frame (through its velocity)."""
        if isinstance(v, Frame):
            v = v.velocity
        return self.a0 * v.c0 + self.a1 * v.c1 + self.a2 * v.c2 + self.a3 * v.c3

    def __add__(self, other: "Covector4") -> "Covector4":
        return Covector4(self.a0 + other.a0, self.a1 + other.a1,
                         self.a2 + other.a2, self.a3 + other.a3)

    def __sub__(self, other: "Covector4") -> "Covector4":
        return Covector4(self.a0 - other.a0, self.a1 - other.a1,
                         self.a2 - other.a2, self.a3 - other.a3)

    def __neg__(self) -> "Covector4":
        return Covector4(-self.a0, -self.a1, -self.a2, -self.a3)

    def __mul__(self, scalar: float) -> "Covector4":
        return Covector4(scalar * self.a0, scalar * self.a1,
                         scalar * self.a2, scalar * self.a3)

    __rmul__ = __mul__


TAU = Covector4(1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Event:
    """Point of space-time in the global chart (t, q1, q2, q3)."""

    t: float
    q1: float
    q2: float
    q3: float

    @classmethod
    def from_array(cls, a) -> "Event":
        a = np.asarray(a, dtype=float)
        if a.shape != (4,):
            raise ValueError(f"Event needs 4 coordinates, got shape {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.q1, self.q2, self.q3], dtype=float)

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.q3], dtype=float)

    def __sub__(self, other: "Event") -> Vector4:
        return Vector4(self.t - other.t, self.q1 - other.q1,
                       self.q2 - other.q2, self.q3 - other.q3)

    def __add__(self, v: Vector4) -> "Event":
        return Event(self.t + v.c0, self.q1 + v.c1,
                     self.q2 + v.c2, self.q3 + v.c3)


@dataclass(frozen=True)
class Frame:
    """Inertial frame: a four-velocity whose time component is exactly 1."""

    velocity: Vector4

    def __post_init__(self):
        if self.velocity.c0 != 1.0:
            raise ValueError(
                f"frame velocity must have time component 1, got {self.velocity.c0}")

    @classmethod
    def from_spatial(cls, s) -> "Frame":
        s = np.asarray(s, dtype=float)
        if s.shape != (3,):
            raise ValueError(f"frame spatial velocity needs 3 components, got {s.shape}")
        return cls(Vector4(1.0, float(s[0]), float(s[1]), float(s[2])))

    @property
    def spatial(self) -> np.ndarray:
        return self.velocity.spatial

    def midpoint(self, other: "Frame") -> "Frame":
        return Frame.from_spatial((self.spatial + other.spatial) / 2.0)


class SpatialMetric:
    """Euclidean metric on the simultaneity directions.

    Wraps a symmetric positive-definite 3x3 matrix together with its inverse.
    Construction rejects asymmetric input and matrices whose smallest
    eigenvalue does not clear a fixed floor, so every instance is safely
    invertible downstream.
    """

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"metric must be a 3x3 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("metric entries must be finite")
        scale = max(1.0, float(np.max(np.abs(m))))
        if float(np.max(np.abs(m - m.T))) > 1e-12 * scale:
            raise ValueError("metric must be symmetric")
        eigenvalues = np.linalg.eigvalsh(m)
        if float(eigenvalues[0]) <= _SPD_EIGENVALUE_FLOOR:
            raise SingularMetric(
                f"metric is not positive definite: smallest eigenvalue "
                f"{eigenvalues[0]:.3e} <= {_SPD_EIGENVALUE_FLOOR:.0e}")
        m = m.copy()
        m.setflags(write=False)
        self._matrix = m
        inv = np.linalg.inv(m)
        inv.setflags(write=False)
        self._inverse = inv

    @classmethod
    def identity(cls) -> "SpatialMetric":
        return cls(np.eye(3))

    @classmethod
    def diagonal(cls, d1: float, d2: float, d3: float) -> "SpatialMetric":
        return cls(np.diag([d1, d2, d3]))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def inverse(self) -> np.ndarray:
        return self._inverse

    def apply(self, s) -> np.ndarray:
        """Lower an index: spatial vector components -> functional components."""
        return self._matrix @ np.asarray(s, dtype=float)

    def apply_inverse(self, f) -> np.ndarray:
        """Raise an index: functional components -> spatial vector components."""
        return self._inverse @ np.asarray(f, dtype=float)

    def quadratic(self, s, s2=None) -> float:
        """Inner product of two spatial vectors (of s with itself if s2 is None)."""
        s = np.asarray(s, dtype=float)
        s2 = s if s2 is None else np.asarray(s2, dtype=float)
        return float(s @ self._matrix @ s2)

    def __repr__(self):
        return f"SpatialMetric({self._matrix.tolist()})"


def time_between(x: Event, xp: Event) -> float:
    """Time elapsed from xp to x: the time covector applied to x - xp."""
    return TAU.pair(x - xp)


def spatial_distance(x: Event, xp: Event, g: SpatialMetric) -> float:
    """Metric distance between two simultaneous events.

    Raises NotSimultaneous unless the time coordinates agree to rounding
    (relative threshold 1e-12, scaled by the magnitude of t).
    """
    dt = x.t - xp.t
    if abs(dt) >= _SIMULTANEITY_REL * (1.0 + max(abs(x.t), abs(xp.t))):
        raise NotSimultaneous(
            f"events are separated by dt={dt!r}; spatial distance is only "
            "defined between simultaneous events")
    return float(np.sqrt(g.quadratic((x - xp).spatial)))


def iota_u(u: Frame, v) -> Vector4:
    """Project a vector onto the simultaneity directions along the frame u.

    Subtracts the frame velocity scaled by the time component, so the result
    has time component exactly 0.  Spatial vectors pass through unchanged,
    and the frame's own velocity maps to zero.
    """
    if isinstance(v, Frame):
        v = v.velocity
    tv = v.c0
    us = u.spatial
    return Vector4(0.0, v.c1 - tv * us[0], v.c2 - tv * us[1], v.c3 - tv * us[2])


def split(u: Frame, v) -> tuple[np.ndarray, float]:
    """Decompose a vector into (spatial part seen from u, time component)."""
    if isinstance(v, Frame):
        v = v.velocity
    return iota_u(u, v).spatial, TAU.pair(v)


def unsplit(u: Frame, spatial, time: float) -> Vector4:
    """Inverse of split: rebuild the vector time * u + (spatial lift)."""
    s = np.asarray(spatial, dtype=float)
    us = u.spatial
    return Vector4(float(time), float(s[0] + time * us[0]),
                   float(s[1] + time * us[1]), float(s[2] + time * us[2]))


def cosplit(u: Frame, p: Covector4) -> tuple[np.ndarray, float]:
    """Decompose a covector into (spatial restriction, value on u)."""
    return p.spatial, p.pair(u)


def uncosplit(u: Frame, spatial, value_on_u: float) -> Covector4:
    """Inverse of cosplit: unique covector with given restriction and u-value."""
    f = np.asarray(spatial, dtype=float)
    a0 = float(value_on_u) - float(f @ u.spatial)
    return Covector4(a0, float(f[0]), float(f[1]), float(f[2]))


def g_prime(g: SpatialMetric, p: Covector4) -> Vector4:
    """Degenerate inverse metric on covectors.

    Raises the spatial restriction of p and lifts it back as a spatial
    vector; the time component of p is discarded, so multiples of TAU span
    the kernel.
    """
    raised = g.apply_inverse(p.spatial)
    return Vector4(0.0, float(raised[0]), float(raised[1]), float(raised[2]))


def sigma(g: SpatialMetric, u_prime: Frame, u: Frame) -> Covector4:
    """Momentum shift covector attached to a change of frame u -> u_prime.

    Lowers the relative velocity u_prime - u with the metric and extends the
    result to a covector on all vectors using the projection along the
    midpoint frame: the value on v is

        <g(u' - u), v - <TAU, v> (u + u')/2>.

    Antisymmetric in its frame arguments and additive along chains of
    frames; both properties are exercised by the test suite.
    """
    f = g.apply(u_prime.spatial - u.spatial)
    mid = (u_prime.spatial + u.spatial) / 2.0
    return Covector4(-float(f @ mid), float(f[0]), float(f[1]), float(f[2]))
