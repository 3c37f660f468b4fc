"""Mechanics of a single massive particle relative to an inertial frame.

Two equivalent pictures are implemented side by side.

In the *inhomogeneous* picture a state is an event plus a spatial momentum
(three components).  The lagrangian is kinetic energy relative to the frame
minus a potential, the Legendre map lowers the relative velocity with the
metric, and trajectories are integrated in time with a classical fixed-step
RK4 scheme.

In the *homogeneous* picture the velocity is an arbitrary future-directed
four-vector and the momentum a full covector.  The lagrangian extends the
inhomogeneous one as a positively homogeneous function of degree one, its
fiber derivative lands on the zero set of the mass-shell residual, and a
change of frame acts on momenta by adding a fixed multiple of the
frame-shift covector.  Homogeneous dynamics is checked pointwise
(membership of a state-with-derivatives tuple) rather than integrated.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .galilean_core import (
    TAU,
    Covector4,
    Event,
    Frame,
    GalimechError,
    SpatialMetric,
    Vector4,
    iota_u,
    sigma,
)

log = logging.getLogger(__name__)

# Relative scale for one-sided offsets in central finite differences.
FD_STEP = 1e-6


class NotFutureDirected(GalimechError):
    """Homogeneous-picture velocity has non-positive time component."""


class NonFiniteState(GalimechError):
    """An integration step produced an overflow, inf, or nan."""


def _fd_steps(values: np.ndarray) -> np.ndarray:
    return FD_STEP * (1.0 + np.abs(values))


@dataclass(frozen=True)
class Potential:
    """Scalar potential on space-time with optional analytic derivatives.

    ``value`` maps an Event to a real.  When the gradient callables are
    omitted they are replaced by central finite differences with step
    1e-6 * (1 + |coordinate|); when present they must agree with those
    differences to about 1e-6 relative (the test suite enforces this for
    the built-in constructors).
    """

    value: Callable[[Event], float]
    spatial_gradient: Callable[[Event], np.ndarray] | None = None
    gradient: Callable[[Event], Covector4] | None = None

    def at(self, x: Event) -> float:
        return float(self.value(x))

    def d_s(self, x: Event) -> np.ndarray:
        """Derivative along the three spatial coordinates."""
        if self.spatial_gradient is not None:
            return np.asarray(self.spatial_gradient(x), dtype=float)
        if self.gradient is not None:
            return self.gradient(x).spatial
        coords = x.as_array()
        steps = _fd_steps(coords)
        out = np.empty(3)
        for i in range(3):
            plus = coords.copy()
            minus = coords.copy()
            plus[1 + i] += steps[1 + i]
            minus[1 + i] -= steps[1 + i]
            out[i] = (self.at(Event.from_array(plus)) -
                      self.at(Event.from_array(minus))) / (2.0 * steps[1 + i])
        return out

    def d(self, x: Event) -> Covector4:
        """Full differential, time component included."""
        if self.gradient is not None:
            return self.gradient(x)
        coords = x.as_array()
        step_t = _fd_steps(coords)[0]
        plus = coords.copy()
        minus = coords.copy()
        plus[0] += step_t
        minus[0] -= step_t
        dt = (self.at(Event.from_array(plus)) -
              self.at(Event.from_array(minus))) / (2.0 * step_t)
        ds = self.d_s(x)
        return Covector4(float(dt), float(ds[0]), float(ds[1]), float(ds[2]))


def free_potential() -> Potential:
    """Identically zero potential."""
    return Potential(value=lambda x: 0.0,
                     spatial_gradient=lambda x: np.zeros(3),
                     gradient=lambda x: Covector4(0.0, 0.0, 0.0, 0.0))


def uniform_potential(force) -> Potential:
    """Potential of a constant force field: value -force . q."""
    f = np.array(force, dtype=float)
    if f.shape != (3,):
        raise ValueError(f"force needs 3 components, got shape {f.shape}")

    return Potential(
        value=lambda x: -float(f @ x.spatial),
        spatial_gradient=lambda x: -f.copy(),
        gradient=lambda x: Covector4(0.0, -f[0], -f[1], -f[2]),
    )


def harmonic_potential(k: float, center=(0.0, 0.0, 0.0)) -> Potential:
    """Quadratic well of stiffness k about a fixed spatial point."""
    c = np.array(center, dtype=float)
    if c.shape != (3,):
        raise ValueError(f"center needs 3 components, got shape {c.shape}")
    k = float(k)

    def grad(x: Event) -> Covector4:
        ds = k * (x.spatial - c)
        return Covector4(0.0, float(ds[0]), float(ds[1]), float(ds[2]))

    return Potential(
        value=lambda x: 0.5 * k * float((x.spatial - c) @ (x.spatial - c)),
        spatial_gradient=lambda x: k * (x.spatial - c),
        gradient=grad,
    )


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """State of the particle in one of the two pictures.

    Exactly one of ``p`` (spatial momentum, inhomogeneous picture) and
    ``p4`` (full covector momentum, homogeneous picture) should be set.
    """

    x: Event
    p: np.ndarray | None = None
    p4: Covector4 | None = None

    def __post_init__(self):
        if self.p is not None:
            arr = np.array(self.p, dtype=float)
            if arr.shape != (3,):
                raise ValueError(f"spatial momentum needs 3 components, got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, "p", arr)

    @classmethod
    def spatial(cls, x: Event, p) -> "PhasePoint":
        return cls(x=x, p=np.asarray(p, dtype=float))

    @classmethod
    def full(cls, x: Event, p4: Covector4) -> "PhasePoint":
        return cls(x=x, p4=p4)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Fixed-step discrete trajectory in the inhomogeneous picture.

    Point k sits at time x0.t + k*h; the integrator guarantees the time
    coordinate advances by exactly the float h each step (up to the rounding
    of the final addition).
    """

    points: tuple[PhasePoint, ...]
    h: float
    frame: Frame
    mass: float

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def events(self) -> np.ndarray:
        """All events as an (n+1, 4) array."""
        return np.array([pt.x.as_array() for pt in self.points])

    def momenta(self) -> np.ndarray:
        """All spatial momenta as an (n+1, 3) array."""
        return np.array([pt.p for pt in self.points])


def lagrangian_inhom(u: Frame, m: float, g: SpatialMetric,
                     potential: Potential, x: Event, w: Frame) -> float:
    """Kinetic energy of w relative to u, minus the potential.

    The velocity w lives on the unit-time-component slice, so w - u is
    spatial and the value is m/2 <g(w - u), w - u> - phi(x).
    """
    rel = w.spatial - u.spatial
    return 0.5 * m * g.quadratic(rel) - potential.at(x)


def legendre_inhom(u: Frame, m: float, g: SpatialMetric, w: Frame) -> np.ndarray:
    """Spatial momentum conjugate to w in frame u: m times the lowered
    relative velocity."""
    return m * g.apply(w.spatial - u.spatial)


def hamiltonian_inhom(u: Frame, m: float, g: SpatialMetric,
                      potential: Potential, x: Event, p) -> float:
    """Energy as a function of spatial momentum: |p|^2 / 2m + phi(x)."""
    p = np.asarray(p, dtype=float)
    return 0.5 / m * float(p @ g.apply_inverse(p)) + potential.at(x)


def vector_field_inhom(u: Frame, m: float, g: SpatialMetric,
                       potential: Potential,
                       state: PhasePoint) -> tuple[Vector4, np.ndarray]:
    """Right-hand side of the equations of motion in frame u.

    Returns (xdot, pdot) with xdot = raised p/m + u (time component 1) and
    pdot = minus the spatial gradient of the potential.
    """
    if state.p is None:
        raise ValueError("vector_field_inhom needs a spatial-momentum state")
    vel = g.apply_inverse(state.p) / m + u.spatial
    xdot = Vector4(1.0, float(vel[0]), float(vel[1]), float(vel[2]))
    pdot = -potential.d_s(state.x)
    return xdot, pdot


def _require_future(v: Vector4) -> float:
    tv = TAU.pair(v)
    if tv <= 0.0:
        raise NotFutureDirected(
            f"velocity must have positive time component, got {tv!r}")
    return tv


def lagrangian_hom(u: Frame, m: float, g: SpatialMetric,
                   potential: Potential, x: Event, v: Vector4) -> float:
    """Degree-one homogeneous extension of the frame-u lagrangian.

    For a future-directed v with time component tv,

        m / (2 tv) <g(iota_u v), iota_u v>  -  tv * phi(x).

    Restricting to tv = 1 recovers lagrangian_inhom, and rescaling v by
    c > 0 rescales the value by c.
    """
    tv = _require_future(v)
    s = iota_u(u, v).spatial
    return 0.5 * m / tv * g.quadratic(s) - tv * potential.at(x)


def legendre_hom(u: Frame, m: float, g: SpatialMetric,
                 potential: Potential, x: Event, v: Vector4) -> Covector4:
    """Fiber derivative of the homogeneous lagrangian in the velocity.

    Spatial components lower the projected velocity, the time component
    balances them so the output lands on the zero set of
    mass_shell_residual.  Invariant under positive rescaling of v.
    """
    tv = _require_future(v)
    s = iota_u(u, v).spatial
    f = (m / tv) * g.apply(s)
    a0 = -float(f @ u.spatial) - 0.5 * m / (tv * tv) * g.quadratic(s) \
        - potential.at(x)
    return Covector4(a0, float(f[0]), float(f[1]), float(f[2]))


def mass_shell_residual(u: Frame, m: float, g: SpatialMetric,
                        potential: Potential, x: Event, p: Covector4) -> float:
    """Defect of the frame-u energy constraint for a covector momentum:

        <p, g'(p)> / 2m + <p, u> + phi(x).

    Zero exactly on momenta produced by legendre_hom.
    """
    ps = p.spatial
    return 0.5 / m * float(ps @ g.apply_inverse(ps)) + p.pair(u) + potential.at(x)


def homogeneous_dynamics_violation(u: Frame, m: float, g: SpatialMetric,
                                   potential: Potential, x: Event,
                                   p: Covector4, xdot: Vector4,
                                   pdot: Covector4) -> float:
    """Largest defect of the homogeneous equations of motion at one state.

    Checks that p is the fiber derivative of the lagrangian at xdot and that
    pdot is minus the time-component-scaled differential of the potential.
    Returns +inf when xdot is not future-directed.
    """
    tv = TAU.pair(xdot)
    if tv <= 0.0:
        return float("inf")
    p_expected = legendre_hom(u, m, g, potential, x, xdot)
    pdot_expected = (-tv) * potential.d(x)
    err_p = float(np.max(np.abs((p - p_expected).as_array())))
    err_pdot = float(np.max(np.abs((pdot - pdot_expected).as_array())))
    return max(err_p, err_pdot)


def in_homogeneous_dynamics(u: Frame, m: float, g: SpatialMetric,
                            potential: Potential,
                            element: tuple[Event, Covector4, Vector4, Covector4],
                            tol: float) -> bool:
    """Membership test for a (state, derivative) tuple in the frame-u
    homogeneous dynamics.  element = (x, p, xdot, pdot)."""
    x, p, xdot, pdot = element
    return homogeneous_dynamics_violation(u, m, g, potential, x, p, xdot, pdot) <= tol


def boost(u_prime: Frame, u: Frame, m: float, g: SpatialMetric,
          state: tuple[Event, Covector4]) -> tuple[Event, Covector4]:
    """Carry a homogeneous state from frame u_prime bookkeeping to frame u.

    Adds m * sigma(u_prime, u) to the momentum and leaves the event alone.
    A momentum satisfying the u_prime mass-shell constraint is mapped onto
    the u constraint set with the residual value preserved exactly.
    """
    x, p = state
    return x, p + m * sigma(g, u_prime, u)


def integrate(u: Frame, m: float, g: SpatialMetric, potential: Potential,
              initial: PhasePoint, h: float, n: int) -> Trajectory:
    """Classical RK4 integration of the frame-u equations of motion.

    Produces n+1 points including the initial one.  Raises ValueError for a
    non-positive step or n < 1 and NonFiniteState as soon as any state
    component stops being finite.
    """
    if m <= 0.0:
        raise ValueError(f"mass must be positive, got {m!r}")
    if not (h > 0.0):
        raise ValueError(f"step must be positive, got {h!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"step count must be an integer >= 1, got {n!r}")
    if initial.p is None:
        raise ValueError("integrate needs a spatial-momentum initial state")

    g_inv = g.inverse
    u_s = u.spatial

    def q_rate(p: np.ndarray) -> np.ndarray:
        return g_inv @ p / m + u_s

    def p_rate(t: float, q: np.ndarray) -> np.ndarray:
        return -potential.d_s(Event(t, q[0], q[1], q[2]))

    t = float(initial.x.t)
    q = initial.x.spatial
    p = np.array(initial.p, dtype=float)
    points = [initial]

    # Overflow is handled by the isfinite check below, not by numpy warnings.
    with np.errstate(over="ignore", invalid="ignore"):
        return _rk4_loop(q_rate, p_rate, t, q, p, points, h, n, u, m)


def _rk4_loop(q_rate, p_rate, t, q, p, points, h, n, u, m) -> Trajectory:
    for step in range(n):
        k1q = q_rate(p)
        k1p = p_rate(t, q)
        k2q = q_rate(p + 0.5 * h * k1p)
        k2p = p_rate(t + 0.5 * h, q + 0.5 * h * k1q)
        k3q = q_rate(p + 0.5 * h * k2p)
        k3p = p_rate(t + 0.5 * h, q + 0.5 * h * k2q)
        k4q = q_rate(p + h * k3p)
        k4p = p_rate(t + h, q + h * k3q)
        q = q + h * ((k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0)
        p = p + h * ((k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0)
        # The four stage time-rates are all exactly 1, so the combination
        # below is h * 1.0 and the time coordinate advances by exactly h.
        t = t + h * 1.0
        if not (np.isfinite(t) and np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise NonFiniteState(f"state became non-finite at step {step + 1}")
        points.append(PhasePoint.spatial(Event(t, q[0], q[1], q[2]), p))

    return Trajectory(points=tuple(points), h=h, frame=u, mass=m)


def write_trajectory_csv(traj: Trajectory, g: SpatialMetric,
                         potential: Potential, stream: TextIO) -> None:
    """Write a trajectory as CSV rows step,t,q1,q2,q3,p1,p2,p3,H.

    Floats carry 17 significant digits so values round-trip bit for bit.
    """
    stream.write("step,t,q1,q2,q3,p1,p2,p3,H\n")
    for k, pt in enumerate(traj.points):
        energy = hamiltonian_inhom(traj.frame, traj.mass, g, potential, pt.x, pt.p)
        fields = [pt.x.t, pt.x.q1, pt.x.q2, pt.x.q3,
                  pt.p[0], pt.p[1], pt.p[2], energy]
        stream.write(str(k) + "," + ",".join(f"{v:.17g}" for v in fields) + "\n")
