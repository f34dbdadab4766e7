# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.
"""
Best Approximation and Best Coapproximation on Flats.

x in K is a best coapproximation of y when γ(x - z) <= γ(y - z) for every z
in K. Equivalently the convex violation functional

    V(x) = sup_{z in K} [γ(x - z) - γ(y - z)]

is at most 0. The solver here minimises V over K with a cutting-plane
linear program and either returns a point with V <= tol or certifies that
min V exceeds the emptiness margin.
"""
import itertools
import logging
import math
import typing
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from minkowski_coapprox.flats import (
    Flat,
    LinearFunctional,
    euclidean_project,
    flat_membership,
    flat_sample,
    make_flat,
    span_basis,
)
from minkowski_coapprox.gauge import (
    EllipsoidGauge,
    Gauge,
    PolytopeGauge,
    PullbackGauge,
    ShiftedGauge,
    direction_sample,
    is_norm,
)
from minkowski_coapprox.solvers import lexicographic_min, lpsolve_checked

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6

EMPTY_MARGIN = 2.0
"""Empty needs a lower bound of at least EMPTY_MARGIN * tol"""
EMPTY_MARGIN_SMOOTH = 20.0
"""margin for non-polytopal gauges, whose cuts are only linearisations"""

ON_FLAT_TOL = 1e-9
RING_DIRECTIONS = 72
"""recession directions sampled in a plane when no exact set is known"""
SEED_POINTS_PER_AXIS = 5


@dataclass(frozen=True)
class SearchBudget:
    """Limits and knobs of the violation search and the cutting planes"""

    max_grid_evals: int = 64**3
    max_axis_points: int = 4097
    max_rounds: int = 200
    radius_factor: float = 4.0
    """grid half-width R = radius_factor * (1 + |x| + |y|)"""
    refine_passes: int = 3
    refine_points: int = 21
    audit_samples: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.max_grid_evals < 2 or self.max_rounds < 1:
            raise ValueError(f"Budget too small to search: {self}")


class CoapproxStatus(str, Enum):
    """Outcome of a Q_K(y) query"""

    NON_EMPTY = "nonempty"
    EMPTY = "empty"
    UNDECIDED = "undecided"


@dataclass(frozen=True, eq=False)
class ViolationPoint:
    """One term γ(x - z) - γ(y - z) of the violation supremum"""

    z: np.ndarray
    value: float
    is_asymptotic: bool = False
    direction: typing.Optional[np.ndarray] = None
    """recession direction d; the point stands for z + t·d, t -> infinity"""


@dataclass
class CoapproxResult:
    """Certified outcome of coapprox_solve"""

    status: CoapproxStatus
    witness: typing.Optional[np.ndarray]
    violation_at_witness: float
    emptiness_lower_bound: typing.Optional[float]
    active_z: typing.List[np.ndarray] = field(default_factory=list)
    iterations: int = 0

    def to_dict(self) -> dict:
        """Result JSON with the field names used on the command line"""
        return {
            "status": self.status.value,
            "witness": None if self.witness is None else self.witness.tolist(),
            "violation": float(self.violation_at_witness),
            "lower_bound": (
                None
                if self.emptiness_lower_bound is None
                else float(self.emptiness_lower_bound)
            ),
            "iterations": self.iterations,
            "active_z": [z.tolist() for z in self.active_z],
        }


def _check_problem(g: Gauge, flat: Flat, y) -> np.ndarray:
    if flat.dim != g.dim:
        raise ValueError(
            f"Flat of dimension {flat.dim} in a {g.dim}-dimensional space"
        )
    return g.check_vector(y)


def _on_flat(flat: Flat, x: np.ndarray) -> bool:
    return flat_membership(
        flat, x, ON_FLAT_TOL * max(1.0, float(np.linalg.norm(x)))
    )


def _face_subsets(g: PolytopeGauge, size: int) -> typing.List[tuple]:
    """Vertex subsets of the given size lying on a common boundary simplex"""
    subsets = set()
    for simplex in g.simplices:
        subsets.update(itertools.combinations(sorted(simplex), size))
    return sorted(subsets)


def _fan_breakpoints(g: Gauge, flat: Flat, y: np.ndarray) -> np.ndarray:
    """
    Points z of the flat where y - z crosses a cone of the ball's face fan.

    z -> γ(y - z) is linear between these points, so for a polytope the
    supremum defining V is attained on them or along a recession direction.
    """
    codim = flat.dim - flat.rank
    if g.simplices is None or codim < 1:
        return np.empty((0, flat.dim))
    found = []
    for subset in _face_subsets(g, codim):
        # y - z = sum alpha_j v_j with z = base + t·basis
        matrix = np.column_stack((flat.basis.T, g.vertices[list(subset)].T))
        if np.linalg.cond(matrix) > 1e12:
            continue
        solution = np.linalg.solve(matrix, y - flat.base)
        if np.all(solution[flat.rank :] >= -1e-12):
            found.append(flat.point(solution[: flat.rank]))
    if not found:
        return np.empty((0, flat.dim))
    return np.unique(np.round(np.array(found), 12), axis=0)


def _recession_directions(g: Gauge, flat: Flat) -> np.ndarray:
    """
    Unit directions of the flat along which asymptotic rays are taken.

    Always ±basis. For planes under a polytope, add the directions where the
    active facet changes plus one direction inside each arc between them;
    the limit of the violation term is constant on those arcs. Other gauges
    get an even ring (planes) or a sphere sample (higher ranks).
    """
    basis = flat.basis
    directions = [basis, -basis]
    k = flat.rank
    if k == 2 and g.simplices is not None:
        crossings = []
        for subset in _face_subsets(g, flat.dim - k + 1):
            matrix = np.column_stack((basis.T, -g.vertices[list(subset)].T))
            _, singular, vt = np.linalg.svd(matrix)
            if singular[-1] < 1e-12 * singular[0]:
                # more than one solution: the subset is degenerate
                continue
            solution = vt[-1]
            weights = solution[k:]
            if np.all(weights <= 1e-12):
                solution = -solution
                weights = -weights
            if np.all(weights >= -1e-12):
                crossings.append(solution[:k])
        if crossings:
            params = np.array(crossings)
            angles = np.unique(
                np.round(np.arctan2(params[:, 1], params[:, 0]), 12)
            )
            angles = np.concatenate((angles, angles + np.pi))
            angles = np.unique(np.mod(angles + np.pi, 2 * np.pi) - np.pi)
            gaps = np.diff(np.append(angles, angles[0] + 2 * np.pi))
            angles = np.concatenate((angles, angles + gaps / 2))
            plane = np.column_stack((np.cos(angles), np.sin(angles)))
            directions.append(plane @ basis)
    elif k == 2:
        theta = np.arange(RING_DIRECTIONS) * (2 * np.pi / RING_DIRECTIONS)
        plane = np.column_stack((np.cos(theta), np.sin(theta)))
        directions.append(plane @ basis)
    elif k > 2:
        directions.append(direction_sample(k) @ basis)
    return np.vstack(directions)


class ViolationSearch:
    """
    Approximate sup_{z in K} [γ(x - z) - γ(y - z)] for many x.

    Everything that only depends on (g, K, y) is computed once: the exact
    polytope candidates, the recession directions and γ(y - z) on the
    grid.
    """

    def __init__(
        self,
        g: Gauge,
        flat: Flat,
        y: np.ndarray,
        budget: typing.Optional[SearchBudget] = None,
    ):
        self.g = g
        self.flat = flat
        self.y = _check_problem(g, flat, y)
        self.budget = budget or SearchBudget()
        self.candidates = _fan_breakpoints(g, flat, self.y)
        self.directions = _recession_directions(g, flat)
        self._center = flat.coordinates(self.y)
        self._y_from_base = self.y - flat.base
        self._grid_cache: typing.Dict[float, tuple] = {}

    def radius(self, x: np.ndarray) -> float:
        """
        Half-width of the parameter grid.

        At least radius_factor * (1 + |x| + |y|), rounded up to a power of
        two so that successive x share the cached grid.
        """
        wanted = self.budget.radius_factor * (
            1.0 + float(np.linalg.norm(x)) + float(np.linalg.norm(self.y))
        )
        return float(2.0 ** math.ceil(math.log2(wanted)))

    def _per_axis(self) -> int:
        k = self.flat.rank
        per_axis = int(self.budget.max_grid_evals ** (1.0 / k) + 1e-9)
        return max(2, min(per_axis, self.budget.max_axis_points))

    def _grid(self, radius: float) -> typing.Tuple[np.ndarray, np.ndarray]:
        """Grid points of K and γ(y - z) on them, cached for one radius"""
        if radius not in self._grid_cache:
            axis = np.linspace(-radius, radius, self._per_axis())
            mesh = np.meshgrid(*[axis] * self.flat.rank, indexing="ij")
            params = self._center + np.column_stack([m.ravel() for m in mesh])
            points = self.flat.points(params)
            self._grid_cache = {
                radius: (points, self.g.evaluate(self.y - points))
            }
        return self._grid_cache[radius]

    def _terms(self, x: np.ndarray, points: np.ndarray) -> np.ndarray:
        return self.g.evaluate(x - points) - self.g.evaluate(self.y - points)

    def asymptotic_point(
        self, x: np.ndarray, direction: np.ndarray
    ) -> ViolationPoint:
        """Limit of the violation term along z = base + t·direction"""
        value = self.g.asymptotic_difference(
            -direction, x - self.flat.base, self._y_from_base
        )
        return ViolationPoint(
            self.flat.base, float(value), True, np.array(direction)
        )

    def maximize(self, x: np.ndarray) -> ViolationPoint:
        """
        The largest violation term found for x.

        Search order: exact candidates, asymptotic rays, the parameter
        grid, then zoomed grids around the best grid point. Ties keep the
        first point found.
        """
        best = self.asymptotic_point(x, self.directions[0])
        if len(self.candidates):
            values = self._terms(x, self.candidates)
            index = int(np.argmax(values))
            if values[index] >= best.value:
                best = ViolationPoint(
                    self.candidates[index], float(values[index])
                )
        for direction in self.directions[1:]:
            found = self.asymptotic_point(x, direction)
            if found.value > best.value:
                best = found
        radius = self.radius(x)
        points, y_terms = self._grid(radius)
        values = self.g.evaluate(x - points) - y_terms
        index = int(np.argmax(values))
        grid_best = ViolationPoint(points[index], float(values[index]))
        grid_best = self._refine(x, grid_best, radius)
        if grid_best.value > best.value:
            best = grid_best
        return best

    def _refine(
        self, x: np.ndarray, start: ViolationPoint, radius: float
    ) -> ViolationPoint:
        k = self.flat.rank
        half_width = 2.0 * radius / (self._per_axis() - 1)
        best = start
        offsets = np.linspace(-1.0, 1.0, self.budget.refine_points)
        mesh = np.meshgrid(*[offsets] * k, indexing="ij")
        unit = np.column_stack([m.ravel() for m in mesh])
        for _ in range(self.budget.refine_passes):
            params = self.flat.coordinates(best.z) + half_width * unit
            points = self.flat.points(params)
            values = self._terms(x, points)
            index = int(np.argmax(values))
            if values[index] > best.value:
                best = ViolationPoint(points[index], float(values[index]))
            half_width *= 2.0 / (self.budget.refine_points - 1)
        return best

    def audit(
        self, x: np.ndarray, count: int, seed: int = 0
    ) -> ViolationPoint:
        """
        Largest violation term over an independent audit sample.

        Half of ``count`` is a lattice over the grid window, the rest is
        uniform over a window ten times wider; the exact candidates and
        asymptotic rays are added on top.
        """
        radius = self.radius(x)
        lattice = flat_sample(self.flat, radius, max(1, count // 2), seed)
        rng = np.random.default_rng(seed + 1)
        spread = rng.uniform(
            -10.0 * radius,
            10.0 * radius,
            (count - count // 2, self.flat.rank),
        )
        points = np.vstack(
            (
                self.candidates,
                lattice,
                self.flat.points(self._center + spread),
            )
        )
        values = self._terms(x, points)
        index = int(np.argmax(values))
        best = ViolationPoint(points[index], float(values[index]))
        for direction in self.directions:
            found = self.asymptotic_point(x, direction)
            if found.value > best.value:
                best = found
        return best


def violation(
    g: Gauge,
    flat: Flat,
    y,
    x,
    budget: typing.Optional[SearchBudget] = None,
) -> typing.Tuple[float, ViolationPoint]:
    """
    Approximate V(x) = sup_{z in K} [γ(x - z) - γ(y - z)].

    :return: the value and the point attaining it
    :raises ValueError: if x is not on the flat
    """
    y = _check_problem(g, flat, y)
    x = g.check_vector(x)
    if not _on_flat(flat, x):
        raise ValueError(f"Point {x.tolist()} is not on the flat")
    found = ViolationSearch(g, flat, y, budget).maximize(x)
    return found.value, found


def audit_violation(
    g: Gauge,
    flat: Flat,
    y,
    x,
    count: typing.Optional[int] = None,
    seed: int = 0,
) -> float:
    """Largest γ(x - z) - γ(y - z) over an audit sample of z in K"""
    search = ViolationSearch(g, flat, _check_problem(g, flat, y))
    count = search.budget.audit_samples if count is None else count
    return search.audit(g.check_vector(x), count, seed).value


def is_best_coapproximation(
    g: Gauge,
    flat: Flat,
    y,
    x,
    tol: float = DEFAULT_TOL,
    budget: typing.Optional[SearchBudget] = None,
) -> bool:
    """Is x in K ∩ (intersection over z in K of B[z, γ(y - z)])?"""
    return violation(g, flat, y, x, budget)[0] <= tol


def _is_smooth(g: Gauge) -> bool:
    """Is γ differentiable away from 0 (so one gradient gives each limit)?"""
    if isinstance(g, PullbackGauge):
        return _is_smooth(g.base)
    return isinstance(g, (EllipsoidGauge, ShiftedGauge))


class _CuttingPlanes:
    """
    LP relaxation  min v  s.t.  γ(x - z) <= γ(y - z) + v  for collected z.

    Variables are the flat parameters t and v. Polytopes contribute one row
    per facet normal, which is exact. Other gauges contribute the
    linearisation g·(x - z) at the current x, a valid under-estimate that
    is refreshed every solve.
    """

    def __init__(self, g: Gauge, flat: Flat, y: np.ndarray, bound: float):
        self.g = g
        self.flat = flat
        self.y = y
        self.points: typing.List[np.ndarray] = []
        self._rows: typing.List[np.ndarray] = []
        self._rhs: typing.List[np.ndarray] = []
        self._bounds = [(-bound, bound)] * flat.rank + [(None, None)]
        self._far = 1e-3 * bound

    def _append(self, normals: np.ndarray, rhs: np.ndarray):
        # normals·(base + t·basis) - v <= rhs
        normals = np.atleast_2d(normals)
        rows = np.column_stack(
            (normals @ self.flat.basis.T, -np.ones(len(normals)))
        )
        self._rows.append(rows)
        self._rhs.append(np.atleast_1d(rhs) - normals @ self.flat.base)

    def add_point(self, z: np.ndarray):
        """Constraint for one z in K"""
        self.points.append(np.array(z))
        if self.g.is_polytopal:
            normals = self.g.normals
            self._append(normals, self.g(self.y - z) + normals @ z)

    def add_direction(self, direction: np.ndarray):
        """Constraint for the limit along z = base + t·direction"""
        u = -np.asarray(direction)
        base = self.flat.base
        if isinstance(self.g, PolytopeGauge):
            active = self.g.active_normals(u, tol=1e-12)
            limit = float(np.max(active @ (self.y - base)))
            self._append(active, limit + active @ base)
        elif _is_smooth(self.g):
            gradient = self.g.subgradient(u)
            self._append(gradient, gradient @ self.y)
        else:
            # no closed-form limit: stand in a distant finite point
            self.add_point(base + self._far * np.asarray(direction))

    def add_violation(self, found: ViolationPoint):
        """Constraint for a point returned by the violation search"""
        if found.is_asymptotic:
            self.add_direction(found.direction)
        else:
            self.add_point(found.z)

    def _linearise(self, x: np.ndarray):
        if self.g.is_polytopal:
            return
        for z in self.points:
            gradient = self.g.subgradient(x - z)
            self._append(gradient, self.g(self.y - z) + gradient @ z)

    def _program(self) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
        c = np.zeros(self.flat.rank + 1)
        c[-1] = 1.0
        return c, np.vstack(self._rows), np.concatenate(self._rhs)

    def solve(self, x: np.ndarray) -> typing.Tuple[np.ndarray, float]:
        """Optimal (t, v) of the current relaxation"""
        self._linearise(x)
        c, rows, rhs = self._program()
        solution = lpsolve_checked(c, rows, rhs, bounds=self._bounds)
        return solution[:-1], float(solution[-1])

    def lexicographic(self) -> np.ndarray:
        """Lexicographically smallest optimal parameter vector"""
        c, rows, rhs = self._program()
        solution = lexicographic_min(
            c, rows, rhs, range(self.flat.rank), bounds=self._bounds
        )
        return solution[:-1]


def coapprox_solve(
    g: Gauge,
    flat: Flat,
    y,
    tol: float = DEFAULT_TOL,
    budget: typing.Optional[SearchBudget] = None,
) -> CoapproxResult:
    """
    Find a point of Q_K(y) or certify that it is empty.

    :return: NonEmpty with a witness whose violation is at most ``tol``,
      Empty with a lower bound on min V of at least the emptiness margin,
      or Undecided when the budget runs out first
    """
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, not {tol}")
    y = _check_problem(g, flat, y)
    budget = budget or SearchBudget()
    if _on_flat(flat, y):
        return CoapproxResult(CoapproxStatus.NON_EMPTY, y, 0.0, None, [], 0)

    search = ViolationSearch(g, flat, y, budget)
    radius = search.radius(y)
    scale = 1.0 + float(np.linalg.norm(y)) + float(np.linalg.norm(flat.base))
    planes = _CuttingPlanes(g, flat, y, bound=1e6 * scale)
    seeds = flat_sample(
        flat, radius, SEED_POINTS_PER_AXIS**flat.rank, budget.seed
    )
    for z in itertools.chain(search.candidates, seeds):
        planes.add_point(z)
    for direction in search.directions:
        planes.add_direction(direction)

    margin = EMPTY_MARGIN if g.is_polytopal else EMPTY_MARGIN_SMOOTH
    x = euclidean_project(flat, y)
    lower = -np.inf
    upper = np.inf
    status = CoapproxStatus.UNDECIDED
    witness = None
    iterations = 0
    for iterations in range(1, budget.max_rounds + 1):
        params, lower = planes.solve(x)
        x = flat.point(params)
        if lower >= margin * tol:
            status = CoapproxStatus.EMPTY
            upper = search.maximize(x).value
            break
        found = search.maximize(x)
        upper = found.value
        logger.debug(
            f"round {iterations}: lower bound {lower:.3e}, "
            f"violation {upper:.3e}"
        )
        if upper <= tol:
            candidate = flat.point(planes.lexicographic())
            check = search.maximize(candidate)
            if check.value <= tol:
                status = CoapproxStatus.NON_EMPTY
                witness = candidate
                upper = check.value
                break
            planes.add_violation(check)
            continue
        if upper - lower < tol / 4:
            break
        planes.add_violation(found)

    logger.info(
        f"Q_K(y) {status.value} after {iterations} rounds "
        f"(lower bound {lower:.3e}, violation {upper:.3e})"
    )
    return CoapproxResult(
        status,
        witness,
        float(upper),
        float(lower) if lower > 0 else None,
        planes.points,
        iterations,
    )


def best_approx(g: Gauge, flat: Flat, y) -> typing.Tuple[np.ndarray, float]:
    """
    A point x of K minimising γ(x - y), and the minimum.

    Polytopes are solved by linear programming (lexicographically smallest
    parameters among the minimisers), other gauges by cyclic
    one-dimensional searches starting from the Euclidean projection.
    """
    y = _check_problem(g, flat, y)
    if _on_flat(flat, y):
        return y, 0.0
    if g.is_polytopal:
        normals = g.normals
        # normals·(base + t·basis - y) <= s
        rows = np.column_stack(
            (normals @ flat.basis.T, -np.ones(len(normals)))
        )
        rhs = normals @ (y - flat.base)
        c = np.zeros(flat.rank + 1)
        c[-1] = 1.0
        solution = lexicographic_min(c, rows, rhs, range(flat.rank))
        x = flat.point(solution[:-1])
        return x, g(x - y)

    start = flat.coordinates(y)
    z0 = flat.point(start)
    # every minimiser is within γ(z0 - y) / min γ(unit) of y
    smallest = float(np.min(g.evaluate(direction_sample(g.dim))))
    reach = 1.1 * g(z0 - y) / smallest + 1e-12

    params = np.array(start)

    def objective_along(axis):
        def objective(value):
            trial = params.copy()
            trial[axis] = value
            return g(flat.point(trial) - y)

        return objective

    for _ in range(50):
        previous = params.copy()
        for axis in range(flat.rank):
            result = minimize_scalar(
                objective_along(axis),
                bounds=(start[axis] - reach, start[axis] + reach),
                method="bounded",
                options={"xatol": 1e-12},
            )
            params[axis] = result.x
        if np.max(np.abs(params - previous)) < 1e-12:
            break
    x = flat.point(params)
    return x, g(x - y)


def supporting_functional(g: Gauge, x0) -> LinearFunctional:
    """
    A functional f with max_{B} f = f(x0) for x0 on the unit sphere.

    At a polytope vertex the mean of the active normals is used, so the
    choice does not depend on facet order.
    """
    x0 = g.check_vector(x0)
    if isinstance(g, PolytopeGauge):
        coeffs = np.mean(g.active_normals(x0), axis=0)
    else:
        coeffs = g.subgradient(x0)
    return LinearFunctional(coeffs, float(coeffs @ x0))


def functional_coapprox_2d(g: Gauge, flat: Flat, y) -> np.ndarray:
    """
    Best coapproximation of y on a line through 0 in a 2D normed plane.

    With x0 = d / γ(d) on the line and f supporting the unit ball at x0,
    the point of the line where f equals f(y) belongs to Q_K(y).
    :raises ValueError: if the gauge is not a 2D norm or the flat is not a
      line through 0
    """
    y = _check_problem(g, flat, y)
    if g.dim != 2 or flat.rank != 1:
        raise ValueError("Functional coapproximation needs a line in 2D")
    if not is_norm(g):
        raise ValueError("Functional coapproximation needs a norm")
    if not _on_flat(flat, np.zeros(2)):
        raise ValueError("The line must pass through 0")
    if _on_flat(flat, y):
        return y
    direction = flat.basis[0]
    x0 = direction / g(direction)
    functional = supporting_functional(g, x0)
    if functional.alpha <= 0.0:
        raise ValueError(f"Degenerate supporting functional at {x0}")
    return x0 * (functional(y) / functional.alpha)


def section_problem(
    g: Gauge, flat: Flat, y
) -> typing.Tuple[Gauge, Flat, np.ndarray, np.ndarray]:
    """
    Restate (g, K, y) inside the subspace lin(K ∪ {y}).

    Q_K(y) is the same set when computed in that subspace, which is how
    questions about lines reduce to two dimensions.
    :return: restricted gauge, flat and point in section coordinates, and
      the orthonormal basis (columns) that embeds them back
    """
    y = _check_problem(g, flat, y)
    basis = span_basis(
        np.vstack((flat.directions, y[np.newaxis, :], flat.base))
    )
    section = make_flat(basis.T @ flat.base, flat.directions @ basis)
    return g.pullback(basis), section, basis.T @ y, basis
