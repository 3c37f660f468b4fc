"""Function families over product fibrations and their generated covectors.

A family assigns a real value to (base, fiber) points of R^b x R^f.  Points
where the fiber gradient vanishes form the critical set; at such points the
base-direction gradient is well defined independently of how base vectors
are lifted, and collecting it over many base points samples the covector
set the family generates.  A family is Morse when the mixed second
derivative matrix (fiber rows, base-plus-fiber columns) has full row rank
along the critical set; ranks are certified through singular values.

The engine is generic.  Families for the particle system live at the bottom
of the module: the velocity-fibered family whose critical covectors are the
equations of motion in a fixed frame, its one-variable reduction to a
scaled energy constraint, and a cotangent-bundle textbook family used as a
rank reference.

Solvers here are deliberately plain: damped Newton iteration on the fiber
gradient with a finite-difference Jacobian, least-squares steps so rank
deficient Jacobians (which occur by construction for degree-one homogeneous
fibers) still make progress.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .galilean_core import (
    TAU,
    Covector4,
    Event,
    Frame,
    GalimechError,
    SpatialMetric,
    Vector4,
)
from .frame_dynamics import (
    Potential,
    lagrangian_hom,
    legendre_hom,
    mass_shell_residual,
)

log = logging.getLogger(__name__)

# Step scales for the finite-difference fallbacks.
_GRAD_STEP = 1e-6       # first derivatives of the family value
_HESS_GRAD_STEP = 1e-5  # differencing an analytic gradient
_HESS_VALUE_STEP = 2e-4 # direct mixed second differences of the value

# Dedup radius for critical points, in units of the solver tolerance.
_MERGE_FACTOR = 10.0


class NoConvergence(GalimechError):
    """Newton iteration failed to reach the requested tolerance."""


class NotCritical(GalimechError):
    """Covector extraction requested at a point with non-zero fiber gradient."""


class SectionNotUnique(GalimechError):
    """Fiber elimination found several stationary points over one base point."""


@dataclass(frozen=True, eq=False)
class FunctionFamily:
    """Real function on R^base_dim x R^fiber_dim with an optional gradient.

    ``value(base, fiber)`` returns a float.  ``gradient(base, fiber)``, when
    provided, returns the pair (d/d base, d/d fiber) as arrays; otherwise
    central differences with step 1e-6 * (1 + |coordinate|) stand in.
    """

    base_dim: int
    fiber_dim: int
    value: Callable[[np.ndarray, np.ndarray], float]
    gradient: Callable[[np.ndarray, np.ndarray],
                       tuple[np.ndarray, np.ndarray]] | None = None
    name: str = "family"


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    """Point of the critical set, with the achieved fiber-gradient norm."""

    base: np.ndarray
    fiber: np.ndarray
    residual_norm: float = 0.0


@dataclass(frozen=True, eq=False)
class GeneratedCovector:
    """Base point paired with the covector the family generates there."""

    base: np.ndarray
    covector: np.ndarray
    source: CriticalPoint


def _gradient_split(fam: FunctionFamily, base: np.ndarray,
                    fiber: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if fam.gradient is not None:
        gb, gf = fam.gradient(base, fiber)
        return np.asarray(gb, dtype=float), np.asarray(gf, dtype=float)
    joint = np.concatenate([base, fiber])

    def value_at(z: np.ndarray) -> float:
        return float(fam.value(z[:fam.base_dim], z[fam.base_dim:]))

    grad = np.empty(len(joint))
    for i in range(len(joint)):
        h = _GRAD_STEP * (1.0 + abs(joint[i]))
        plus, minus = joint.copy(), joint.copy()
        plus[i] += h
        minus[i] -= h
        grad[i] = (value_at(plus) - value_at(minus)) / (2.0 * h)
    return grad[:fam.base_dim], grad[fam.base_dim:]


def fiber_gradient(fam: FunctionFamily, base, fiber) -> np.ndarray:
    """Gradient of the family value along the fiber directions."""
    base = np.asarray(base, dtype=float)
    fiber = np.asarray(fiber, dtype=float)
    return _gradient_split(fam, base, fiber)[1]


def base_gradient(fam: FunctionFamily, base, fiber) -> np.ndarray:
    """Gradient of the family value along the base directions of the
    product chart.  Lift independent only where the fiber gradient is zero."""
    base = np.asarray(base, dtype=float)
    fiber = np.asarray(fiber, dtype=float)
    return _gradient_split(fam, base, fiber)[0]


def _fiber_jacobian(fam: FunctionFamily, base: np.ndarray,
                    fiber: np.ndarray) -> np.ndarray:
    f = fam.fiber_dim
    jac = np.empty((f, f))
    for j in range(f):
        h = _GRAD_STEP * (1.0 + abs(fiber[j]))
        plus, minus = fiber.copy(), fiber.copy()
        plus[j] += h
        minus[j] -= h
        jac[:, j] = (fiber_gradient(fam, base, plus) -
                     fiber_gradient(fam, base, minus)) / (2.0 * h)
    return jac


def _newton_fiber(fam: FunctionFamily, base: np.ndarray, seed: np.ndarray,
                  tol: float, max_iter: int) -> tuple[np.ndarray, float]:
    fiber = np.array(seed, dtype=float)
    grad = fiber_gradient(fam, base, fiber)
    norm = float(np.max(np.abs(grad)))
    for _ in range(max_iter):
        if norm <= tol:
            return fiber, norm
        jac = _fiber_jacobian(fam, base, fiber)
        # rcond well above FD noise: a Jacobian direction whose singular
        # value is pure differencing error must not steer the step.
        step, *_ = np.linalg.lstsq(jac, -grad, rcond=1e-8)
        scale = 1.0
        for _ in range(25):
            trial = fiber + scale * step
            try:
                trial_grad = fiber_gradient(fam, base, trial)
            except (GalimechError, FloatingPointError):
                # Trial left the family's domain; shorten the step.
                scale *= 0.5
                continue
            trial_norm = float(np.max(np.abs(trial_grad)))
            if trial_norm < norm or trial_norm <= tol:
                fiber, grad, norm = trial, trial_grad, trial_norm
                break
            scale *= 0.5
        else:
            raise NoConvergence(
                f"{fam.name}: damped Newton stalled at |grad|={norm:.3e} "
                f"over base {base.tolist()}")
    if norm <= tol:
        return fiber, norm
    raise NoConvergence(
        f"{fam.name}: no critical point within {max_iter} iterations "
        f"from seed {np.asarray(seed).tolist()} (|grad|={norm:.3e})")


def solve_critical(fam: FunctionFamily, base, seeds: Sequence,
                   tol: float = 1e-10, max_iter: int = 60) -> list[CriticalPoint]:
    """Find critical fiber points over one base point.

    Runs damped Newton from every seed.  Seeds that fail to converge are
    logged and skipped; solutions closer than 10 * tol to an already found
    one are merged (the representative with the smaller gradient norm is
    kept).  The returned list can be empty.
    """
    base = np.asarray(base, dtype=float)
    found: list[CriticalPoint] = []
    for seed in seeds:
        seed = np.asarray(seed, dtype=float)
        try:
            fiber, norm = _newton_fiber(fam, base, seed, tol, max_iter)
        except NoConvergence as err:
            log.debug("seed rejected: %s", err)
            continue
        for k, existing in enumerate(found):
            if float(np.linalg.norm(existing.fiber - fiber)) < _MERGE_FACTOR * tol:
                if norm < existing.residual_norm:
                    found[k] = CriticalPoint(base, fiber, norm)
                break
        else:
            found.append(CriticalPoint(base, fiber, norm))
    return found


def hessian(fam: FunctionFamily, point: CriticalPoint) -> np.ndarray:
    """Mixed second derivatives at a critical point.

    Rows run over the fiber directions, columns over base directions then
    fiber directions, giving a fiber_dim x (base_dim + fiber_dim) matrix.
    When the family has an analytic gradient the matrix is obtained by
    central-differencing it; otherwise by four-point second differences of
    the value.
    """
    b, f = fam.base_dim, fam.fiber_dim
    joint = np.concatenate([point.base, point.fiber])
    out = np.empty((f, b + f))
    if fam.gradient is not None:
        for j in range(b + f):
            h = _HESS_GRAD_STEP * (1.0 + abs(joint[j]))
            plus, minus = joint.copy(), joint.copy()
            plus[j] += h
            minus[j] -= h
            gp = fiber_gradient(fam, plus[:b], plus[b:])
            gm = fiber_gradient(fam, minus[:b], minus[b:])
            out[:, j] = (gp - gm) / (2.0 * h)
        return out

    def value_at(z: np.ndarray) -> float:
        return float(fam.value(z[:b], z[b:]))

    for i in range(f):
        hi = _HESS_VALUE_STEP * (1.0 + abs(joint[b + i]))
        for j in range(b + f):
            hj = _HESS_VALUE_STEP * (1.0 + abs(joint[j]))
            pp, pm, mp, mm = (joint.copy() for _ in range(4))
            pp[b + i] += hi
            pp[j] += hj
            pm[b + i] += hi
            pm[j] -= hj
            mp[b + i] -= hi
            mp[j] += hj
            mm[b + i] -= hi
            mm[j] -= hj
            out[i, j] = (value_at(pp) - value_at(pm) - value_at(mp) +
                         value_at(mm)) / (4.0 * hi * hj)
    return out


@dataclass(frozen=True)
class MorseReport:
    """Outcome of a full-rank certification over sampled critical points."""

    ok: bool
    ranks: tuple[int, ...]
    required_rank: int

    def __bool__(self) -> bool:
        return self.ok


def numerical_rank(matrix: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Number of singular values above rel_tol times the largest one."""
    sv = np.linalg.svd(matrix, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


def is_morse(fam: FunctionFamily, points: Sequence[CriticalPoint],
             rank_tol: float = 1e-8) -> MorseReport:
    """Certify that the mixed Hessian has full row rank at every point."""
    ranks = tuple(numerical_rank(hessian(fam, pt), rank_tol) for pt in points)
    ok = all(r == fam.fiber_dim for r in ranks)
    return MorseReport(ok=ok, ranks=ranks, required_rank=fam.fiber_dim)


def kappa(fam: FunctionFamily, point: CriticalPoint,
          tol: float = 1e-8) -> GeneratedCovector:
    """Covector generated at a critical point: the base-direction gradient.

    Well defined because any two lifts of a base vector differ by a fiber
    vector, on which the gradient vanishes at criticality.  Raises
    NotCritical when the fiber gradient exceeds tol.
    """
    grad_norm = float(np.max(np.abs(fiber_gradient(fam, point.base, point.fiber))))
    if grad_norm > tol:
        raise NotCritical(
            f"{fam.name}: fiber gradient norm {grad_norm:.3e} exceeds {tol:.1e}")
    return GeneratedCovector(base=point.base,
                             covector=base_gradient(fam, point.base, point.fiber),
                             source=point)


def generate(fam: FunctionFamily, bases: Sequence, seeds: Sequence,
             tol: float = 1e-10, check_morse: bool = True,
             rank_tol: float = 1e-8) -> list[GeneratedCovector]:
    """Sample the generated covector set over a collection of base points.

    For each base point, finds critical fiber points from the given seeds
    and maps them through kappa.  With check_morse (the default) a rank
    defect at any discovered point raises ValueError; base points where no
    seed converges contribute nothing.
    """
    out: list[GeneratedCovector] = []
    for base in bases:
        points = solve_critical(fam, base, seeds, tol=tol)
        if not points:
            continue
        if check_morse:
            report = is_morse(fam, points, rank_tol)
            if not report:
                raise ValueError(
                    f"{fam.name} is not a Morse family over base "
                    f"{np.asarray(base).tolist()}: ranks {report.ranks} "
                    f"(need {report.required_rank})")
        out.extend(kappa(fam, pt, tol=max(10.0 * tol, 1e-12)) for pt in points)
    return out


def reduce_family(fam: FunctionFamily, eliminate: int, seeds: Sequence,
                  tol: float = 1e-12, max_iter: int = 60) -> FunctionFamily:
    """Eliminate the leading block of fiber variables by stationarity.

    The fiber R^f is read as R^eliminate x R^(f - eliminate).  Evaluating
    the reduced family at (base, kept) solves the stationarity equations of
    the eliminated block by Newton iteration from each seed and substitutes
    the solution.  The reduced gradient uses the stationarity of the
    eliminated block, so it is the restriction of the parent gradient to
    the section.

    Raises NoConvergence at evaluation when no seed converges and
    SectionNotUnique when distinct seeds land on distinct stationary
    points, which happens exactly when the elimination leaves the
    hyperregular regime.
    """
    if eliminate == 0:
        return fam
    if not 0 < eliminate < fam.fiber_dim:
        raise ValueError(
            f"cannot eliminate {eliminate} of {fam.fiber_dim} fiber variables")
    seed_list = [np.asarray(s, dtype=float) for s in seeds]
    if not seed_list:
        raise ValueError("reduce_family needs at least one seed")
    kept = fam.fiber_dim - eliminate

    def section(base: np.ndarray, tail: np.ndarray) -> np.ndarray:
        solutions: list[np.ndarray] = []
        failures = 0
        for seed in seed_list:
            fiber0 = np.concatenate([seed, tail])
            try:
                fiber, _ = _newton_fiber_block(fam, base, fiber0, eliminate,
                                               tol, max_iter)
            except NoConvergence:
                failures += 1
                continue
            head = fiber[:eliminate]
            if not any(float(np.linalg.norm(head - s)) < _MERGE_FACTOR * tol
                       for s in solutions):
                solutions.append(head)
        if not solutions:
            raise NoConvergence(
                f"{fam.name}: eliminated-block stationarity has no solution "
                f"over base {base.tolist()} ({failures} seed(s) tried)")
        if len(solutions) > 1:
            raise SectionNotUnique(
                f"{fam.name}: {len(solutions)} stationary points of the "
                f"eliminated block over base {base.tolist()}")
        return solutions[0]

    def value(base: np.ndarray, tail: np.ndarray) -> float:
        base = np.asarray(base, dtype=float)
        tail = np.asarray(tail, dtype=float)
        head = section(base, tail)
        return float(fam.value(base, np.concatenate([head, tail])))

    def gradient(base: np.ndarray, tail: np.ndarray):
        base = np.asarray(base, dtype=float)
        tail = np.asarray(tail, dtype=float)
        head = section(base, tail)
        gb, gf = _gradient_split(fam, base, np.concatenate([head, tail]))
        return gb, gf[eliminate:]

    return FunctionFamily(base_dim=fam.base_dim, fiber_dim=kept,
                          value=value, gradient=gradient,
                          name=f"{fam.name}/reduced")


def _newton_fiber_block(fam: FunctionFamily, base: np.ndarray,
                        fiber: np.ndarray, head: int, tol: float,
                        max_iter: int) -> tuple[np.ndarray, float]:
    """Newton iteration on the first ``head`` fiber components only."""
    fiber = np.array(fiber, dtype=float)

    def head_grad(fb: np.ndarray) -> np.ndarray:
        return fiber_gradient(fam, base, fb)[:head]

    grad = head_grad(fiber)
    norm = float(np.max(np.abs(grad)))
    for _ in range(max_iter):
        if norm <= tol:
            return fiber, norm
        jac = np.empty((head, head))
        for j in range(head):
            h = _GRAD_STEP * (1.0 + abs(fiber[j]))
            plus, minus = fiber.copy(), fiber.copy()
            plus[j] += h
            minus[j] -= h
            jac[:, j] = (head_grad(plus) - head_grad(minus)) / (2.0 * h)
        step, *_ = np.linalg.lstsq(jac, -grad, rcond=None)
        scale = 1.0
        for _ in range(25):
            trial = fiber.copy()
            trial[:head] += scale * step
            trial_grad = head_grad(trial)
            trial_norm = float(np.max(np.abs(trial_grad)))
            if trial_norm < norm or trial_norm <= tol:
                fiber, grad, norm = trial, trial_grad, trial_norm
                break
            scale *= 0.5
        else:
            raise NoConvergence(f"{fam.name}: block Newton stalled")
    if norm <= tol:
        return fiber, norm
    raise NoConvergence(f"{fam.name}: block Newton did not converge")


def write_covectors_csv(covectors: Sequence[GeneratedCovector], stream) -> None:
    """Dump generated covectors as CSV rows base_0..,cov_0.. (17 digits)."""
    if not covectors:
        stream.write("\n")
        return
    b = len(covectors[0].base)
    header = [f"base_{i}" for i in range(b)] + [f"cov_{i}" for i in range(b)]
    stream.write(",".join(header) + "\n")
    for gc in covectors:
        vals = list(gc.base) + list(gc.covector)
        stream.write(",".join(f"{v:.17g}" for v in vals) + "\n")


# ---------------------------------------------------------------------------
# Families for the particle system.


def family_example31(mass: float = 1.0, stiffness: float = 1.0) -> FunctionFamily:
    """Cotangent-bundle family over (q, p) with fiber velocity v.

    Value L(q, v) - <p, v> for the quadratic lagrangian
    L = mass/2 |v|^2 - stiffness/2 |q|^2.  The p-block of the mixed Hessian
    is minus the identity, so the rank equals the configuration dimension 3
    everywhere on the critical set v = p / mass.
    """
    m = float(mass)
    k = float(stiffness)

    def value(base: np.ndarray, fiber: np.ndarray) -> float:
        q, p, v = base[:3], base[3:], fiber
        return 0.5 * m * float(v @ v) - 0.5 * k * float(q @ q) - float(p @ v)

    def gradient(base: np.ndarray, fiber: np.ndarray):
        q, p, v = base[:3], base[3:], fiber
        return np.concatenate([-k * q, -v]), m * v - p

    return FunctionFamily(base_dim=6, fiber_dim=3, value=value,
                          gradient=gradient, name="example31")


# Fiber ordering for the velocity-fibered families: the three spatial
# components come first and the time component last, so that eliminating
# the leading block removes exactly the spatial directions.
_V_NATURAL_TO_FIBER = (1, 2, 3, 0)


def _fiber_to_vector(fiber: np.ndarray) -> Vector4:
    return Vector4(float(fiber[3]), float(fiber[0]), float(fiber[1]),
                   float(fiber[2]))


def _base_to_state(base: np.ndarray) -> tuple[Event, Covector4]:
    return Event.from_array(base[:4]), Covector4.from_array(base[4:])


def state_to_base(x: Event, p: Covector4) -> np.ndarray:
    """Pack an event and a covector momentum into the 8-component base chart
    used by the velocity-fibered families."""
    return np.concatenate([x.as_array(), p.as_array()])


def vector_to_fiber(v: Vector4) -> np.ndarray:
    """Pack a four-velocity into fiber coordinates (spatial block, time)."""
    return v.as_array()[list(_V_NATURAL_TO_FIBER)]


def family_fam1(u: Frame, m: float, g: SpatialMetric,
                potential: Potential) -> FunctionFamily:
    """Velocity-fibered family over (event, covector momentum).

    Value <p, v> minus the homogeneous frame-u lagrangian.  Critical points
    pick out velocities whose fiber derivative reproduces p; the p-block of
    the mixed Hessian is a permuted identity, so the family is Morse with
    rank 4.  Fiber coordinates are ordered (v1, v2, v3, v0) so that
    reduce_family with eliminate=3 removes the spatial directions and
    leaves the time component.
    """

    def value(base: np.ndarray, fiber: np.ndarray) -> float:
        x, p = _base_to_state(base)
        v = _fiber_to_vector(fiber)
        return p.pair(v) - lagrangian_hom(u, m, g, potential, x, v)

    def gradient(base: np.ndarray, fiber: np.ndarray):
        x, p = _base_to_state(base)
        v = _fiber_to_vector(fiber)
        tv = TAU.pair(v)
        gx = tv * potential.d(x).as_array()
        gp = v.as_array()
        gv = (p - legendre_hom(u, m, g, potential, x, v)).as_array()
        return np.concatenate([gx, gp]), gv[list(_V_NATURAL_TO_FIBER)]

    return FunctionFamily(base_dim=8, fiber_dim=4, value=value,
                          gradient=gradient, name="fam1")


def family_fam2(u: Frame, m: float, g: SpatialMetric,
                potential: Potential) -> FunctionFamily:
    """One-variable family over (event, covector momentum).

    Value r times the frame-u mass-shell residual.  Critical points exist
    exactly over on-shell base points, where every r is stationary; the
    generated covector scales the residual differentials by r.
    """

    def value(base: np.ndarray, fiber: np.ndarray) -> float:
        x, p = _base_to_state(base)
        return float(fiber[0]) * mass_shell_residual(u, m, g, potential, x, p)

    def gradient(base: np.ndarray, fiber: np.ndarray):
        x, p = _base_to_state(base)
        r = float(fiber[0])
        res = mass_shell_residual(u, m, g, potential, x, p)
        dres_dx = potential.d(x).as_array()
        dres_dp = np.concatenate([[1.0], g.apply_inverse(p.spatial) / m + u.spatial])
        return r * np.concatenate([dres_dx, dres_dp]), np.array([res])

    return FunctionFamily(base_dim=8, fiber_dim=1, value=value,
                          gradient=gradient, name="fam2")
