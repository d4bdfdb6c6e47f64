"""Disk suspension flows: Hamiltonian fields, contact constant, return maps.

The mapping-torus construction suspends a time-periodic Hamiltonian
isotopy of the disk: with lambda = r^2 dphi (written x dy - y dx), the
field X_t solves the contraction identity i_{X_t} d(lambda) = dH_t, the
one-form (H + C) dz + lambda is a contact form once C clears a threshold
set by the C^1 size of H, and the flow of d/dz + X_z returns to the z = 0
section as the time-one Hamiltonian map. Everything here is numerical and
works on user-supplied smooth families; two parametric bump families are
built in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from random import Random

import numpy as np
from scipy.integrate import quad, solve_ivp


class SuspensionError(ValueError):
    pass


class OutOfDisk(SuspensionError):
    pass


class IntegrationFailure(SuspensionError):
    pass


class LeftDisk(SuspensionError):
    pass


class DegenerateDenominator(SuspensionError):
    """The Reeb normalization denominator is non-positive; C is too small."""


class HamiltonianFamily:
    """A smooth time-dependent Hamiltonian on the unit disk.

    Subclasses implement vectorized ``value`` and ``grad`` and declare the
    support margins: the function vanishes for r > 1 - boundary_margin and
    for t outside [time_margin, 1 - time_margin].
    """

    name = "family"
    boundary_margin = 0.0
    time_margin = 0.0

    def value(self, x, y, t):
        raise NotImplementedError

    def grad(self, x, y, t):
        raise NotImplementedError

    def params(self) -> dict[str, float]:
        return {}

    def exact_return_map(self, x, y):
        """Closed-form time-one map when the family admits one, else None."""
        return None


def _bump(u):
    """exp(-u/(1-u)) on [0, 1), smoothly flat at u = 1, value 1 at u = 0."""
    u = np.asarray(u, dtype=float)
    inside = u < 1.0
    with np.errstate(over="ignore", under="ignore"):
        w = np.where(inside, u, 0.0)
        return np.where(inside, np.exp(-w / (1.0 - w)), 0.0)


def _bump_deriv(u):
    """Derivative of :func:`_bump`: -1/(1-u)^2 times the bump."""
    u = np.asarray(u, dtype=float)
    inside = u < 1.0
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        w = np.where(inside, u, 0.0)
        out = np.where(inside, -_bump(w) / (1.0 - w) ** 2, 0.0)
    return out


class _TimeProfile:
    """A smooth bump on [delta, 1 - delta] normalized to unit integral."""

    def __init__(self, delta: float):
        if not 0 < delta < 0.5:
            raise SuspensionError("time margin must lie in (0, 0.5)")
        self.delta = delta
        total, _ = quad(self._raw, delta, 1.0 - delta, epsabs=1e-14, epsrel=1e-13)
        self._scale = 1.0 / total

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.delta, 1.0 - self.delta
        inside = (t > lo) & (t < hi)
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            span = np.where(inside, (t - lo) * (hi - t), 1.0)
            out = np.where(inside, np.exp(-1.0 / span), 0.0)
        return out

    def __call__(self, t):
        return self._scale * self._raw(t)


class RadialBump(HamiltonianFamily):
    """H = amplitude * eta(t) * g(r^2), a rotationally symmetric bump.

    The time-one map is the closed-form twist sending (x, y) to its
    rotation by angle -amplitude * g'(r^2), which makes this the reference
    fixture for return-map comparisons.
    """

    name = "radial"

    def __init__(
        self,
        amplitude: float = 1.0,
        boundary_margin: float = 0.2,
        time_margin: float = 0.1,
    ):
        if not 0 < boundary_margin < 1:
            raise SuspensionError("boundary margin must lie in (0, 1)")
        self.amplitude = amplitude
        self.boundary_margin = boundary_margin
        self.time_margin = time_margin
        self.s1 = (1.0 - boundary_margin) ** 2
        self.eta = _TimeProfile(time_margin)

    def params(self):
        return {
            "amplitude": self.amplitude,
            "boundary_margin": self.boundary_margin,
            "time_margin": self.time_margin,
        }

    def _g(self, s):
        return _bump(np.asarray(s) / self.s1)

    def _g_deriv(self, s):
        return _bump_deriv(np.asarray(s) / self.s1) / self.s1

    def value(self, x, y, t):
        s = np.asarray(x) ** 2 + np.asarray(y) ** 2
        return self.amplitude * self.eta(t) * self._g(s)

    def grad(self, x, y, t):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s = x**2 + y**2
        common = self.amplitude * self.eta(t) * self._g_deriv(s)
        return 2.0 * x * common, 2.0 * y * common

    def rotation_angle(self, s):
        """Time-one rotation angle at squared radius s."""
        return -self.amplitude * self._g_deriv(s)

    def exact_return_map(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        theta = self.rotation_angle(x**2 + y**2)
        c, s = np.cos(theta), np.sin(theta)
        return c * x - s * y, s * x + c * y


class AngularBump(HamiltonianFamily):
    """H = amplitude * eta(t) * g(r^2) * x, an angle-dependent bump."""

    name = "angular"

    def __init__(
        self,
        amplitude: float = 1.0,
        boundary_margin: float = 0.2,
        time_margin: float = 0.1,
    ):
        if not 0 < boundary_margin < 1:
            raise SuspensionError("boundary margin must lie in (0, 1)")
        self.amplitude = amplitude
        self.boundary_margin = boundary_margin
        self.time_margin = time_margin
        self.s1 = (1.0 - boundary_margin) ** 2
        self.eta = _TimeProfile(time_margin)

    def params(self):
        return {
            "amplitude": self.amplitude,
            "boundary_margin": self.boundary_margin,
            "time_margin": self.time_margin,
        }

    def _g(self, s):
        return _bump(np.asarray(s) / self.s1)

    def _g_deriv(self, s):
        return _bump_deriv(np.asarray(s) / self.s1) / self.s1

    def value(self, x, y, t):
        x = np.asarray(x, dtype=float)
        s = x**2 + np.asarray(y) ** 2
        return self.amplitude * self.eta(t) * self._g(s) * x

    def grad(self, x, y, t):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s = x**2 + y**2
        a = self.amplitude * self.eta(t)
        g = self._g(s)
        gp = self._g_deriv(s)
        return a * (2.0 * x**2 * gp + g), a * (2.0 * x * y * gp)


FAMILIES = {"radial": RadialBump, "angular": AngularBump}


def family_from_name(name: str, **params) -> HamiltonianFamily:
    try:
        cls = FAMILIES[name]
    except KeyError:
        raise SuspensionError(f"unknown family {name!r}") from None
    return cls(**params)


def hamiltonian_vector_field(family: HamiltonianFamily, t: float, q) -> np.ndarray:
    """The field solving the contraction identity against d(lambda) = 2 dx^dy.

    Componentwise X = (dH/dy, -dH/dx) / 2; requires the evaluation point to
    lie in the open unit disk.
    """
    q = np.asarray(q, dtype=float)
    if q[0] ** 2 + q[1] ** 2 >= 1.0:
        raise OutOfDisk(f"point {tuple(q)} is not in the open unit disk")
    hx, hy = family.grad(q[0], q[1], t)
    return np.array([0.5 * hy, -0.5 * hx])


def _velocity(family: HamiltonianFamily, t, x, y):
    hx, hy = family.grad(x, y, t)
    return 0.5 * np.asarray(hy), -0.5 * np.asarray(hx)


def contact_density(family: HamiltonianFamily, C: float, x, y, t):
    """Density of alpha ^ d(alpha) relative to d(lambda) ^ dz.

    Equals (H + C) minus the radial correction (x Hx + y Hy) / 2; the form
    is contact on the region where this is positive.
    """
    h = family.value(x, y, t)
    hx, hy = family.grad(x, y, t)
    return h + C - 0.5 * (np.asarray(x) * hx + np.asarray(y) * hy)


def disk_grid(resolution: int):
    """Disk x time grid points (x, y, t arrays) at the given per-axis count."""
    u = np.linspace(-1.0, 1.0, resolution)
    t = np.linspace(0.0, 1.0, resolution)
    xg, yg, tg = np.meshgrid(u, u, t, indexing="ij")
    mask = xg**2 + yg**2 < 1.0
    return xg[mask], yg[mask], tg[mask]


def estimate_c0(
    family: HamiltonianFamily, grid: int = 32, safety: float = 1.25
) -> float:
    """Grid estimate of the contactness threshold.

    Returns the largest grid value of (x Hx + y Hy)/2 - H, floored at zero
    and inflated by ``safety`` to absorb grid subsampling. Any constant
    strictly above the true threshold makes the form contact.
    """
    if grid < 16:
        raise SuspensionError("grid resolution must be >= 16 per axis")
    x, y, t = disk_grid(grid)
    h = family.value(x, y, t)
    hx, hy = family.grad(x, y, t)
    worst = float(np.max(0.5 * (x * hx + y * hy) - h, initial=0.0))
    return max(0.0, worst) * safety


@dataclass(frozen=True)
class SuspensionProblem:
    """A Hamiltonian family plus the contact constant and numeric settings."""

    family: HamiltonianFamily
    C: float | None = None
    tolerance: float = 1e-10
    grid: int = 32
    c0_estimate: float = field(init=False, default=0.0)

    def __post_init__(self):
        c0 = estimate_c0(self.family, self.grid)
        object.__setattr__(self, "c0_estimate", c0)
        if self.C is None:
            object.__setattr__(self, "C", 2.0 * c0 + 1.0)
        elif self.C <= c0:
            raise SuspensionError(
                f"C={self.C} does not exceed the estimated threshold {c0}"
            )


def integrate_suspension(problem: SuspensionProblem, start) -> np.ndarray:
    """Integrate d/dz + X_z from the z = 0 section once around to z = 1.

    Adaptive high-order integration at the problem tolerance; the endpoint
    is the numerical first-return map applied to ``start``.
    """
    start = np.asarray(start, dtype=float)
    if start[0] ** 2 + start[1] ** 2 >= 1.0:
        raise OutOfDisk(f"start {tuple(start)} is not in the open unit disk")

    def rhs(z, q):
        vx, vy = _velocity(problem.family, z, q[0], q[1])
        return (float(vx), float(vy))

    sol = solve_ivp(
        rhs,
        (0.0, 1.0),
        start,
        method="DOP853",
        rtol=problem.tolerance,
        atol=problem.tolerance,
    )
    if not sol.success:
        raise IntegrationFailure(sol.message)
    end = sol.y[:, -1]
    if end[0] ** 2 + end[1] ** 2 > 1.0:
        raise LeftDisk(f"orbit left the disk at {tuple(end)}")
    return end


def reeb_field(problem: SuspensionProblem, point):
    """The normalized suspension field and its two defining-equation defects.

    Returns (R, alpha_defect, contraction_defect) at (x, y, z): R is the
    vertical-plus-Hamiltonian direction divided by alpha of it, so the
    first defect |alpha(R) - 1| vanishes identically and the second, the
    sup-norm of the contraction of d(alpha) with R against the coordinate
    coframe, measures the consistency of the supplied derivatives.
    """
    x, y, z = (float(v) for v in point)
    if x * x + y * y >= 1.0:
        raise OutOfDisk(f"point {(x, y)} is not in the open unit disk")
    h = float(problem.family.value(x, y, z))
    hx, hy = problem.family.grad(x, y, z)
    hx, hy = float(hx), float(hy)
    vx, vy = 0.5 * hy, -0.5 * hx
    lam = x * vy - y * vx
    den = h + problem.C + lam
    if den <= 0.0:
        raise DegenerateDenominator(
            f"alpha(dz + X) = {den} <= 0 at {(x, y, z)}; increase C"
        )
    r = np.array([vx / den, vy / den, 1.0 / den])
    alpha_defect = abs((h + problem.C) * r[2] + x * r[1] - y * r[0] - 1.0)
    contraction = np.array(
        [
            -2.0 * r[1] - hx * r[2],
            2.0 * r[0] - hy * r[2],
            hx * r[0] + hy * r[1],
        ]
    )
    return r, alpha_defect, float(np.max(np.abs(contraction)))


def sample_disk(rng: Random, count: int, radius: float = 0.95) -> np.ndarray:
    """Deterministic rejection sampling of points in the disk of ``radius``."""
    pts = []
    while len(pts) < count:
        x = rng.uniform(-radius, radius)
        y = rng.uniform(-radius, radius)
        if x * x + y * y < radius * radius:
            pts.append((x, y))
    return np.array(pts)


@dataclass(frozen=True)
class ReturnMapReport:
    """Comparison of the integrated return map against the reference map."""

    family_name: str
    family_params: dict[str, float]
    C: float
    c0_estimate: float
    tolerance: float
    grid: int
    samples: int
    seed: int
    starts: np.ndarray
    returns: np.ndarray
    references: np.ndarray
    max_deviation: float
    contact_min: float
    alpha_defect_max: float
    contraction_defect_max: float
    alignment_defect_max: float

    def to_record(self) -> str:
        parts = [
            f"family={self.family_name}",
            *(f"{k}={v!r}" for k, v in sorted(self.family_params.items())),
            f"C={self.C!r}",
            f"c0_estimate={self.c0_estimate!r}",
            f"tolerance={self.tolerance!r}",
            f"grid={self.grid}",
            f"samples={self.samples}",
            f"seed={self.seed}",
            f"max_deviation={self.max_deviation!r}",
            f"contact_min={self.contact_min!r}",
            f"alpha_defect_max={self.alpha_defect_max!r}",
            f"contraction_defect_max={self.contraction_defect_max!r}",
            f"alignment_defect_max={self.alignment_defect_max!r}",
        ]
        return " ".join(parts)


def compare_return_map(
    problem: SuspensionProblem,
    samples: int = 100,
    seed: int = 0,
    defect_samples: int = 1000,
) -> ReturnMapReport:
    """Integrate the return map on sampled points and audit the construction.

    The reference is the family's closed-form time-one map when available,
    otherwise a re-integration at a hundredfold tighter tolerance. The
    report also records the grid minimum of the contact density and the
    maxima of the Reeb defects and of the alignment defect
    |alpha(dz + X)/C - 1| over random sample points.
    """
    rng = Random(seed)
    family = problem.family
    starts = sample_disk(rng, samples)
    returns = np.array([integrate_suspension(problem, p) for p in starts])
    exact = family.exact_return_map(starts[:, 0], starts[:, 1])
    if exact is not None:
        references = np.column_stack(exact)
    else:
        tight = SuspensionProblem(
            family, C=problem.C, tolerance=problem.tolerance * 1e-2, grid=problem.grid
        )
        references = np.array([integrate_suspension(tight, p) for p in starts])
    max_dev = float(np.max(np.linalg.norm(returns - references, axis=1)))

    x, y, t = disk_grid(problem.grid)
    contact_min = float(np.min(contact_density(family, problem.C, x, y, t)))

    alpha_max = 0.0
    contraction_max = 0.0
    alignment_max = 0.0
    for _ in range(defect_samples):
        px, py = sample_disk(rng, 1)[0]
        pz = rng.random()
        _, a, c = reeb_field(problem, (px, py, pz))
        alpha_max = max(alpha_max, a)
        contraction_max = max(contraction_max, c)
        h = float(family.value(px, py, pz))
        hx, hy = family.grad(px, py, pz)
        lam = px * (-0.5 * float(hx)) - py * (0.5 * float(hy))
        alignment_max = max(alignment_max, abs((h + lam) / problem.C))
    return ReturnMapReport(
        family_name=family.name,
        family_params=family.params(),
        C=float(problem.C),
        c0_estimate=problem.c0_estimate,
        tolerance=problem.tolerance,
        grid=problem.grid,
        samples=samples,
        seed=seed,
        starts=starts,
        returns=returns,
        references=references,
        max_deviation=max_dev,
        contact_min=contact_min,
        alpha_defect_max=alpha_max,
        contraction_defect_max=contraction_max,
        alignment_defect_max=alignment_max,
    )
