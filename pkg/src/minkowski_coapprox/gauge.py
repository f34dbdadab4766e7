# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.
"""
Gauges: Minkowski functionals of convex bodies with 0 in the interior.

A gauge is stored through its unit ball. Polytopes keep their facet normals
scaled so that the ball is {x : <a_i, x> <= 1}, which makes evaluation a
maximum of linear forms. Quadratic bodies (euclidean, ellipsoid and their
translates) are evaluated in closed form.
"""
import functools
import logging
import typing
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.spatial import ConvexHull, QhullError

from minkowski_coapprox.solvers import lpsolve, lpsolve_checked

logger = logging.getLogger(__name__)

INTERIOR_TOL = 1e-9
"""0 must lie further than this inside every facet of a unit ball"""

SYMMETRY_TOL = 1e-9
"""relative tolerance of :py:func:`is_norm`"""

ACTIVE_TOL = 1e-9
"""relative slack for a facet to count as active at a point"""

DIRECTIONS_2D = 720
DIRECTIONS_3D = 2000
DIRECTIONS_ND = 2000

ASYMPTOTIC_TOL = 1e-10
"""ray searches stop doubling once the value changes by less than this"""
ASYMPTOTIC_DOUBLINGS = 60

REFINE_PASSES = 60
"""local search passes when an extreme has to be sampled"""
SAMPLED_SLACK = 1e-5
"""relative widening of sampled equivalence constants"""

Vector = typing.Union[np.ndarray, typing.Sequence[float]]


@functools.lru_cache(maxsize=None)
def direction_sample(dim: int) -> np.ndarray:
    """
    Deterministic unit directions covering the sphere.

    720 equiangular directions in 2D, 2000 Fibonacci sphere points in 3D and
    2000 seeded gaussian directions above that.
    :return: read-only (n, dim) array
    """
    if dim == 1:
        directions = np.array([[1.0], [-1.0]])
    elif dim == 2:
        theta = np.arange(DIRECTIONS_2D) * (2 * np.pi / DIRECTIONS_2D)
        directions = np.column_stack((np.cos(theta), np.sin(theta)))
    elif dim == 3:
        i = np.arange(DIRECTIONS_3D) + 0.5
        z = 1.0 - 2.0 * i / DIRECTIONS_3D
        r = np.sqrt(1.0 - z**2)
        phi = i * np.pi * (3.0 - np.sqrt(5.0))
        directions = np.column_stack((r * np.cos(phi), r * np.sin(phi), z))
    else:
        rng = np.random.default_rng(0)
        directions = rng.standard_normal((DIRECTIONS_ND, dim))
        directions /= np.linalg.norm(directions, axis=1)[:, np.newaxis]
    directions.setflags(write=False)
    return directions


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


class Gauge(ABC):
    """Minkowski functional of a convex body containing 0 in its interior"""

    normals: typing.Optional[np.ndarray] = None
    """facet normals a_i (ball = {<a_i, x> <= 1}) for polytopal gauges"""
    vertices: typing.Optional[np.ndarray] = None
    """points whose convex hull is the unit ball, when known"""
    simplices: typing.Optional[np.ndarray] = None
    """boundary simplices of the unit ball (rows index ``vertices``)"""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"Gauge dimension must be positive, not {dim}")
        self._dim = dim

    def __repr__(self):
        return f"{type(self).__name__}(dim={self._dim})"

    @property
    def dim(self) -> int:
        """Dimension of the space the gauge lives on"""
        return self._dim

    @property
    def is_polytopal(self) -> bool:
        """Is the gauge a maximum of finitely many linear forms?"""
        return self.normals is not None

    def check_vector(self, x: Vector) -> np.ndarray:
        """
        Coerce x to a finite vector of the right dimension.

        :raises ValueError: on dimension mismatch or non-finite entries
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self._dim,):
            raise ValueError(
                f"Expected a vector of dimension {self._dim}, "
                f"got shape {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise ValueError(f"Vector has non-finite entries: {x}")
        return x

    def check_points(self, points: np.ndarray) -> np.ndarray:
        """Coerce to an (n, dim) array"""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[np.newaxis, :]
        if points.ndim != 2 or points.shape[1] != self._dim:
            raise ValueError(
                f"Expected points of dimension {self._dim}, "
                f"got shape {points.shape}"
            )
        return points

    def __call__(self, x: Vector) -> float:
        return float(self.evaluate(self.check_vector(x)[np.newaxis, :])[0])

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the gauge on each row of an (n, dim) array"""

    @abstractmethod
    def subgradient(self, x: Vector) -> np.ndarray:
        """
        A supporting functional at x: g·x = γ(x) and g·w <= γ(w) for all w
        """

    @abstractmethod
    def reverse(self) -> "Gauge":
        """The reversed gauge x -> γ(-x) (point-reflected unit ball)"""

    @abstractmethod
    def to_spec(self) -> dict:
        """Gauge spec file contents (see :py:mod:`specfile`)"""

    def pullback(self, linear_map: np.ndarray) -> "Gauge":
        """
        The gauge x -> γ(Lx).

        :param linear_map: (dim, m) matrix L with trivial kernel
        """
        return PullbackGauge(self, linear_map)

    def support(self, direction: Vector) -> float:
        """Maximum of <direction, x> over the unit ball"""
        direction = self.check_vector(direction)
        boundary = self._boundary_sample()
        return float(np.max(boundary @ direction))

    def lipschitz(self) -> float:
        """Maximum of the gauge over Euclidean unit vectors"""
        return float(np.max(self.evaluate(direction_sample(self._dim))))

    def asymptotic_difference(
        self, direction: Vector, w1: Vector, w2: Vector, start: float = 1.0
    ) -> float:
        """
        Limit of γ(w1 + t·u) - γ(w2 + t·u) as t grows without bound.

        The generic rule doubles t until the value changes by less than
        ASYMPTOTIC_TOL; subclasses replace it with the exact limit.
        """
        u = self.check_vector(direction)
        w1 = self.check_vector(w1)
        w2 = self.check_vector(w2)
        t = max(start, 1.0)
        previous = None
        value = 0.0
        for _ in range(ASYMPTOTIC_DOUBLINGS):
            value = self(w1 + t * u) - self(w2 + t * u)
            if previous is not None and abs(value - previous) < ASYMPTOTIC_TOL:
                break
            previous = value
            t *= 2.0
        return value

    def _boundary_sample(self) -> np.ndarray:
        directions = direction_sample(self._dim)
        return directions / self.evaluate(directions)[:, np.newaxis]


def _unique_rows(rows: np.ndarray) -> np.ndarray:
    """Drop (numerically) repeated rows, keeping first occurrences in order"""
    _, index = np.unique(np.round(rows, 12), axis=0, return_index=True)
    return rows[np.sort(index)]


def _polar_hull(points: np.ndarray) -> typing.Tuple[np.ndarray, ConvexHull]:
    """
    Hull of a point cloud that must contain 0 in its interior.

    :return: facet normals scaled so that the hull is {<a, x> <= 1}, and the
      hull itself
    :raises ValueError: if the hull is degenerate or 0 is not interior
    """
    try:
        hull = ConvexHull(points)
    except (QhullError, ValueError) as err:
        raise ValueError(f"Degenerate convex body: {err}") from err
    offsets = -hull.equations[:, -1]
    if offsets.min() <= INTERIOR_TOL:
        raise ValueError(
            "0 is not interior to the unit ball "
            f"(closest facet offset {offsets.min():.3g})"
        )
    return hull.equations[:, :-1] / offsets[:, np.newaxis], hull


class PolytopeGauge(Gauge):
    """Gauge of a polytope, γ(x) = max_i <a_i, x>"""

    def __init__(
        self,
        normals: np.ndarray,
        vertices: typing.Optional[np.ndarray] = None,
        simplices: typing.Optional[np.ndarray] = None,
        spec: typing.Optional[dict] = None,
    ):
        """
        Use :py:func:`from_vertices` or :py:func:`from_halfspaces` rather
        than calling this directly, they validate the body.
        """
        normals = np.atleast_2d(normals)
        super().__init__(normals.shape[1])
        self.normals = _frozen(normals)
        if vertices is not None:
            self.vertices = _frozen(vertices)
        if simplices is not None:
            self.simplices = np.array(simplices, dtype=int)
            self.simplices.setflags(write=False)
        self._spec = spec

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = self.check_points(points)
        return np.max(points @ self.normals.T, axis=1)

    def active_normals(self, x: Vector, tol: float = ACTIVE_TOL) -> np.ndarray:
        """Facet normals attaining the maximum at x"""
        values = self.normals @ self.check_vector(x)
        top = values.max()
        return self.normals[values >= top - tol * max(1.0, abs(top))]

    def subgradient(self, x: Vector) -> np.ndarray:
        values = self.normals @ self.check_vector(x)
        return np.array(self.normals[int(np.argmax(values))])

    def reverse(self) -> "PolytopeGauge":
        return PolytopeGauge(
            -self.normals,
            None if self.vertices is None else -self.vertices,
            self.simplices,
            spec=None if self._spec is None else _reverse_spec(self._spec),
        )

    def pullback(self, linear_map: np.ndarray) -> Gauge:
        linear_map = np.asarray(linear_map, dtype=float)
        return from_halfspaces(self.normals @ linear_map)

    def support(self, direction: Vector) -> float:
        direction = self.check_vector(direction)
        if self.vertices is not None:
            return float(np.max(self.vertices @ direction))
        x = lpsolve_checked(
            -direction, self.normals, np.ones(len(self.normals))
        )
        return float(direction @ x)

    def lipschitz(self) -> float:
        return float(np.max(np.linalg.norm(self.normals, axis=1)))

    def asymptotic_difference(
        self, direction: Vector, w1: Vector, w2: Vector, start: float = 1.0
    ) -> float:
        active = self.active_normals(direction, tol=1e-12)
        return float(
            np.max(active @ self.check_vector(w1))
            - np.max(active @ self.check_vector(w2))
        )

    def to_spec(self) -> dict:
        if self._spec is not None:
            return dict(self._spec)
        return {
            "dim": self.dim,
            "kind": "halfspaces",
            "data": self.normals.tolist(),
        }


class VertexLpGauge(Gauge):
    """
    Gauge of the convex hull of vertices in d > 3, by linear programming.

    γ(x) = min sum(λ) subject to V^T λ = x, λ >= 0.
    """

    def __init__(self, vertices: np.ndarray, spec: typing.Optional[dict]):
        vertices = np.atleast_2d(vertices)
        super().__init__(vertices.shape[1])
        self.vertices = _frozen(vertices)
        self._spec = spec

    def _solve(self, x: np.ndarray):
        count = len(self.vertices)
        result = lpsolve(
            np.ones(count),
            a_eq=self.vertices.T,
            b_eq=x,
            bounds=[(0.0, None)] * count,
        )
        if result.status != 0:
            raise RuntimeError(f"Gauge LP failed at {x}: {result.message}")
        return result

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = self.check_points(points)
        return np.array([self._solve(x).fun for x in points])

    def subgradient(self, x: Vector) -> np.ndarray:
        # sensitivities of the optimum with respect to b_eq = x
        return np.array(self._solve(self.check_vector(x)).eqlin.marginals)

    def reverse(self) -> "VertexLpGauge":
        spec = None if self._spec is None else _reverse_spec(self._spec)
        return VertexLpGauge(-self.vertices, spec)

    def support(self, direction: Vector) -> float:
        return float(np.max(self.vertices @ self.check_vector(direction)))

    def to_spec(self) -> dict:
        if self._spec is not None:
            return dict(self._spec)
        return {
            "dim": self.dim,
            "kind": "vertices",
            "data": self.vertices.tolist(),
        }


class EllipsoidGauge(Gauge):
    """γ(x) = sqrt(x^T M x) for a symmetric positive definite M"""

    def __init__(self, matrix: np.ndarray, spec: typing.Optional[dict] = None):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Ellipsoid matrix must be square: {matrix}")
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-12):
            raise ValueError(f"Ellipsoid matrix must be symmetric: {matrix}")
        eigenvalues = np.linalg.eigvalsh(matrix)
        if eigenvalues.min() <= INTERIOR_TOL * max(1.0, eigenvalues.max()):
            raise ValueError(
                f"Ellipsoid matrix must be positive definite: {matrix}"
            )
        super().__init__(matrix.shape[0])
        self.matrix = _frozen(matrix)
        self._eigenvalues = eigenvalues
        self._inverse = _frozen(np.linalg.inv(matrix))
        self._spec = spec

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = self.check_points(points)
        squares = np.einsum("ij,jk,ik->i", points, self.matrix, points)
        return np.sqrt(np.maximum(squares, 0.0))

    def subgradient(self, x: Vector) -> np.ndarray:
        x = self.check_vector(x)
        value = self(x)
        if value == 0.0:
            return np.zeros(self.dim)
        return self.matrix @ x / value

    def reverse(self) -> "EllipsoidGauge":
        return self

    def pullback(self, linear_map: np.ndarray) -> Gauge:
        linear_map = np.asarray(linear_map, dtype=float)
        return EllipsoidGauge(linear_map.T @ self.matrix @ linear_map)

    def support(self, direction: Vector) -> float:
        direction = self.check_vector(direction)
        return float(np.sqrt(direction @ self._inverse @ direction))

    def lipschitz(self) -> float:
        return float(np.sqrt(self._eigenvalues.max()))

    def asymptotic_difference(
        self, direction: Vector, w1: Vector, w2: Vector, start: float = 1.0
    ) -> float:
        gradient = self.subgradient(direction)
        return float(
            gradient @ (self.check_vector(w1) - self.check_vector(w2))
        )

    def to_spec(self) -> dict:
        if self._spec is not None:
            return dict(self._spec)
        return {
            "dim": self.dim,
            "kind": "builtin",
            "data": {
                "tag": "ellipsoid",
                "params": {"matrix": self.matrix.tolist()},
            },
        }


class ShiftedGauge(Gauge):
    """
    Gauge of a translated ellipsoidal ball, {x : ‖x - c‖_M <= 1}.

    γ(x) is the positive root t of ‖x - t·c‖_M = t.
    """

    def __init__(self, base: EllipsoidGauge, offset: Vector):
        super().__init__(base.dim)
        offset = base.check_vector(offset)
        if base(offset) >= 1.0 - INTERIOR_TOL:
            raise ValueError(
                f"Offset {offset.tolist()} leaves 0 outside the shifted ball"
            )
        self.base = base
        self.offset = _frozen(offset)
        self._shift = base.matrix @ offset
        self._scale = 1.0 - float(offset @ self._shift)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = self.check_points(points)
        xmc = points @ self._shift
        xmx = np.einsum("ij,jk,ik->i", points, self.base.matrix, points)
        root = np.sqrt(np.maximum(xmc**2 + self._scale * xmx, 0.0))
        # xmx / (root + xmc) is the cancellation-free form of the root
        denominator = root + xmc
        return np.divide(
            xmx,
            denominator,
            out=np.zeros_like(xmx),
            where=denominator > 0.0,
        )

    def subgradient(self, x: Vector) -> np.ndarray:
        x = self.check_vector(x)
        value = self(x)
        if value == 0.0:
            return np.zeros(self.dim)
        boundary = x / value
        normal = self.base.matrix @ (boundary - self.offset)
        return normal / float(normal @ boundary)

    def reverse(self) -> "ShiftedGauge":
        return ShiftedGauge(self.base, -self.offset)

    def support(self, direction: Vector) -> float:
        direction = self.check_vector(direction)
        return self.base.support(direction) + float(direction @ self.offset)

    def asymptotic_difference(
        self, direction: Vector, w1: Vector, w2: Vector, start: float = 1.0
    ) -> float:
        gradient = self.subgradient(direction)
        return float(
            gradient @ (self.check_vector(w1) - self.check_vector(w2))
        )

    def to_spec(self) -> dict:
        return {
            "dim": self.dim,
            "kind": "builtin",
            "data": {
                "tag": "shifted",
                "params": {
                    "base": self.base.to_spec()["data"],
                    "offset": self.offset.tolist(),
                },
            },
        }


class PullbackGauge(Gauge):
    """γ(Lx) for a gauge γ without a closed form for the composition"""

    def __init__(self, base: Gauge, linear_map: np.ndarray):
        linear_map = np.atleast_2d(np.asarray(linear_map, dtype=float))
        if linear_map.shape[0] != base.dim:
            raise ValueError(
                f"Map with {linear_map.shape[0]} rows cannot feed a "
                f"{base.dim}-dimensional gauge"
            )
        if np.linalg.matrix_rank(linear_map) < linear_map.shape[1]:
            raise ValueError("Pullback map must have a trivial kernel")
        super().__init__(linear_map.shape[1])
        self.base = base
        self.linear_map = _frozen(linear_map)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = self.check_points(points)
        return self.base.evaluate(points @ self.linear_map.T)

    def subgradient(self, x: Vector) -> np.ndarray:
        x = self.check_vector(x)
        return self.linear_map.T @ self.base.subgradient(self.linear_map @ x)

    def reverse(self) -> "PullbackGauge":
        return PullbackGauge(self.base.reverse(), self.linear_map)

    def asymptotic_difference(
        self, direction: Vector, w1: Vector, w2: Vector, start: float = 1.0
    ) -> float:
        return self.base.asymptotic_difference(
            self.linear_map @ self.check_vector(direction),
            self.linear_map @ self.check_vector(w1),
            self.linear_map @ self.check_vector(w2),
            start,
        )

    def to_spec(self) -> dict:
        raise ValueError("A pulled-back gauge has no spec file form")


class SymmetrizedGauge(Gauge):
    """max{γ(x), γ(-x)}, the norm whose unit ball is B ∩ (-B)"""

    def __init__(self, base: Gauge):
        super().__init__(base.dim)
        self.base = base

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = self.check_points(points)
        return np.maximum(
            self.base.evaluate(points), self.base.evaluate(-points)
        )

    def subgradient(self, x: Vector) -> np.ndarray:
        x = self.check_vector(x)
        if self.base(x) >= self.base(-x):
            return self.base.subgradient(x)
        return -self.base.subgradient(-x)

    def reverse(self) -> "SymmetrizedGauge":
        return self

    def to_spec(self) -> dict:
        raise ValueError("A symmetrized gauge has no spec file form")


def _reverse_spec(spec: dict) -> dict:
    """Spec of the reversed gauge"""
    kind = spec["kind"]
    if kind in ("vertices", "halfspaces"):
        data = (-np.asarray(spec["data"], dtype=float)).tolist()
        return {"dim": spec["dim"], "kind": kind, "data": data}
    data = spec["data"]
    if data["tag"] == "shifted":
        params = dict(data["params"])
        params["offset"] = [-c for c in params["offset"]]
        return {
            "dim": spec["dim"],
            "kind": kind,
            "data": {"tag": "shifted", "params": params},
        }
    # the remaining builtins are symmetric
    return dict(spec)


def _interval_gauge(
    right: float, left: float, spec: typing.Optional[dict]
) -> PolytopeGauge:
    """One dimensional ball [left, right]"""
    if right <= INTERIOR_TOL or left >= -INTERIOR_TOL:
        raise ValueError(
            f"0 is not interior to the interval [{left}, {right}]"
        )
    return PolytopeGauge(
        np.array([[1.0 / right], [1.0 / left]]),
        np.array([[right], [left]]),
        spec=spec,
    )


def _from_hull(
    normals: np.ndarray,
    points: np.ndarray,
    hull: ConvexHull,
    spec: typing.Optional[dict],
) -> PolytopeGauge:
    vertices = points[hull.vertices]
    position = {int(index): n for n, index in enumerate(hull.vertices)}
    simplices = np.vectorize(position.__getitem__)(hull.simplices)
    return PolytopeGauge(normals, vertices, simplices, spec)


def from_vertices(
    vertices: np.ndarray, spec: typing.Optional[dict] = None
) -> Gauge:
    """
    Gauge whose unit ball is the convex hull of ``vertices``.

    In d <= 3 the hull is converted to half-spaces; above that each
    evaluation solves a small linear program.
    :raises ValueError: if the hull is degenerate or 0 is not interior
    """
    vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
    if not np.all(np.isfinite(vertices)):
        raise ValueError("Vertices must be finite")
    dim = vertices.shape[1]
    if dim == 1:
        return _interval_gauge(vertices.max(), vertices.min(), spec)
    normals, hull = _polar_hull(vertices)
    if dim > 3:
        return VertexLpGauge(vertices[hull.vertices], spec)
    return _from_hull(_unique_rows(normals), vertices, hull, spec)


def from_halfspaces(
    normals: np.ndarray, spec: typing.Optional[dict] = None
) -> PolytopeGauge:
    """
    Gauge whose unit ball is {x : <a_i, x> <= 1 for all i}.

    :raises ValueError: if the ball is unbounded
    """
    normals = np.atleast_2d(np.asarray(normals, dtype=float))
    if not np.all(np.isfinite(normals)):
        raise ValueError("Normals must be finite")
    dim = normals.shape[1]
    if dim == 1:
        positive = normals[normals > 0.0]
        negative = normals[normals < 0.0]
        if positive.size == 0 or negative.size == 0:
            raise ValueError("Unbounded interval: need normals of both signs")
        return _interval_gauge(
            1.0 / positive.max(), 1.0 / negative.min(), spec
        )
    # the ball is bounded iff 0 is interior to the hull of the normals
    polar_vertices, polar_hull = _polar_hull(normals)
    reduced = normals[np.sort(polar_hull.vertices)]
    if dim > 3:
        return PolytopeGauge(reduced, spec=spec)
    vertices = _unique_rows(polar_vertices)
    return _from_hull(reduced, vertices, ConvexHull(vertices), spec)


def _builtin_spec(dim: int, tag: str, **params) -> dict:
    return {
        "dim": dim,
        "kind": "builtin",
        "data": {"tag": tag, "params": params},
    }


def euclidean(dim: int = 2) -> EllipsoidGauge:
    """The Euclidean norm"""
    return EllipsoidGauge(np.eye(dim), _builtin_spec(dim, "euclidean"))


def lp_gauge(p: typing.Union[int, float, str], dim: int = 2) -> Gauge:
    """
    ℓ_p norm for p in {1, 2, inf}.

    :raises ValueError: for any other p
    """
    if p in ("inf", "infinity") or p == np.inf:
        spec = _builtin_spec(dim, "lp", p="inf")
        eye = np.eye(dim)
        return from_halfspaces(np.vstack((eye, -eye)), spec)
    if p == 2:
        return EllipsoidGauge(np.eye(dim), _builtin_spec(dim, "lp", p=2))
    if p == 1:
        spec = _builtin_spec(dim, "lp", p=1)
        if dim <= 3:
            eye = np.eye(dim)
            return from_vertices(np.vstack((eye, -eye)), spec)
        signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * dim, indexing="ij"))
        return from_halfspaces(signs.reshape(dim, -1).T, spec)
    raise ValueError(f"Only p in {{1, 2, inf}} are supported, not {p}")


def ellipsoid(matrix: np.ndarray) -> EllipsoidGauge:
    """Gauge of {x : x^T M x <= 1}"""
    return EllipsoidGauge(matrix)


def shifted(base: Gauge, offset: Vector) -> Gauge:
    """
    Gauge of a symmetric builtin ball translated by ``offset``.

    0 is interior to the translated ball exactly when γ_base(offset) < 1.
    :raises ValueError: if the base is not symmetric or the offset is too
      long
    """
    offset = base.check_vector(offset)
    if isinstance(base, EllipsoidGauge):
        return ShiftedGauge(base, offset)
    if isinstance(base, PolytopeGauge):
        if not is_norm(base):
            raise ValueError("Only symmetric balls can be shifted")
        if base(offset) >= 1.0 - INTERIOR_TOL:
            raise ValueError(
                f"Offset {offset.tolist()} leaves 0 outside the shifted ball"
            )
        # <a, x - t·c> <= t  <=>  <a / (1 + <a, c>), x> <= t
        scale = 1.0 + base.normals @ offset
        spec = _builtin_spec(
            base.dim,
            "shifted",
            base=base.to_spec()["data"],
            offset=offset.tolist(),
        )
        return from_halfspaces(base.normals / scale[:, np.newaxis], spec)
    raise ValueError(f"Cannot shift a {type(base).__name__}")


def linear_image(g: Gauge, matrix: np.ndarray) -> Gauge:
    """Gauge whose unit ball is A·B for an invertible A"""
    matrix = np.asarray(matrix, dtype=float)
    return g.pullback(np.linalg.inv(matrix))


def gauge_eval(g: Gauge, x: Vector) -> float:
    """γ(x)"""
    return g(x)


def reverse_gauge(g: Gauge) -> Gauge:
    """γ^∨(x) = γ(-x)"""
    return g.reverse()


def sym_norm_eval(g: Gauge, x: Vector) -> float:
    """max{γ(x), γ(-x)}"""
    x = g.check_vector(x)
    return max(g(x), g(-x))


def sym_norm_gauge(g: Gauge) -> Gauge:
    """The symmetrized norm max{γ, γ^∨} as a gauge of its own"""
    if isinstance(g, EllipsoidGauge):
        return g
    if isinstance(g, PolytopeGauge):
        return from_halfspaces(np.vstack((g.normals, -g.normals)))
    return SymmetrizedGauge(g)


def is_norm(g: Gauge, tol: float = SYMMETRY_TOL) -> bool:
    """
    Is γ(x) = γ(-x)?

    Hull-derived polytopes compare the vertex set with its negation, all
    other gauges are compared over :py:func:`direction_sample`.
    """
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, not {tol}")
    if isinstance(g, PolytopeGauge) and g.vertices is not None:
        vertices = g.vertices
        gaps = np.linalg.norm(
            vertices[:, np.newaxis, :] + vertices[np.newaxis, :, :], axis=2
        )
        scale = tol * max(1.0, float(np.abs(vertices).max()))
        return bool(np.all(gaps.min(axis=1) <= scale))
    directions = direction_sample(g.dim)
    if g.vertices is not None:
        directions = np.vstack((directions, g.vertices))
    forward = g.evaluate(directions)
    backward = g.evaluate(-directions)
    return bool(
        np.all(np.abs(forward - backward) <= tol * np.maximum(1.0, forward))
    )


def ball_membership(
    g: Gauge,
    center: Vector,
    radius: float,
    x: Vector,
    kind: str = "closed",
    tol: float = 1e-9,
) -> bool:
    """
    Membership of x in B[center, radius], B(center, radius) or S[...]

    :param kind: "closed", "open" or "sphere"
    """
    if radius < 0:
        raise ValueError(f"Radius must be non-negative, not {radius}")
    distance = g(g.check_vector(x) - g.check_vector(center))
    if kind == "closed":
        return distance <= radius + tol
    if kind == "open":
        return distance < radius - tol
    if kind == "sphere":
        return abs(distance - radius) <= tol
    raise ValueError(f"Unknown ball kind '{kind}'")


@dataclass(frozen=True)
class EquivalenceConstants:
    """c0·γ1(x) <= γ2(x) <= c1·γ1(x)"""

    c0: float
    c1: float
    approximate: bool = False
    """an extreme was sampled, and the constant widened, not computed"""


_EXACT_SUPPORT = (PolytopeGauge, VertexLpGauge, EllipsoidGauge, ShiftedGauge)


def _max_over_ball(outer: Gauge, inner: Gauge) -> typing.Optional[float]:
    """Exact maximum of ``outer`` over the unit ball of ``inner``, if cheap"""
    if inner.vertices is not None:
        # a convex function peaks at a vertex
        return float(np.max(outer.evaluate(inner.vertices)))
    if outer.normals is not None and isinstance(inner, _EXACT_SUPPORT):
        return max(inner.support(a) for a in outer.normals)
    return None


def _sampled_max_ratio(outer: Gauge, inner: Gauge) -> float:
    """max of outer/inner over directions, with a shrinking local search"""

    def ratio(directions):
        return outer.evaluate(directions) / inner.evaluate(directions)

    rng = np.random.default_rng(0)
    directions = direction_sample(inner.dim)
    values = ratio(directions)
    best = directions[int(np.argmax(values))]
    best_value = float(values.max())
    step = 0.1
    for _ in range(REFINE_PASSES):
        trial = best + step * rng.standard_normal((32, inner.dim))
        trial /= np.linalg.norm(trial, axis=1)[:, np.newaxis]
        values = ratio(trial)
        if values.max() > best_value:
            best = trial[int(np.argmax(values))]
            best_value = float(values.max())
        else:
            step *= 0.5
    return best_value


def equivalence_constants(g1: Gauge, g2: Gauge) -> EquivalenceConstants:
    """
    Best constants with c0·γ1 <= γ2 <= c1·γ1.

    c1 is the maximum of γ2 over the γ1 unit ball, and c0 is the reciprocal
    of the maximum of γ1 over the γ2 unit ball. Both are exact when either
    ball has known vertices or the other gauge is polytopal; two ellipsoids
    use the generalized eigenvalues. Otherwise the extremes are sampled,
    widened by SAMPLED_SLACK (c1 up, c0 down) so that the sandwich still
    holds, and the result is flagged approximate.
    """
    if g1.dim != g2.dim:
        raise ValueError(
            f"Dimension mismatch: {g1.dim} and {g2.dim}-dimensional gauges"
        )
    if isinstance(g1, EllipsoidGauge) and isinstance(g2, EllipsoidGauge):
        eigenvalues = eigh(g2.matrix, g1.matrix, eigvals_only=True)
        return EquivalenceConstants(
            float(np.sqrt(eigenvalues.min())),
            float(np.sqrt(eigenvalues.max())),
        )
    approximate = False
    c1 = _max_over_ball(g2, g1)
    if c1 is None:
        c1 = _sampled_max_ratio(g2, g1) * (1.0 + SAMPLED_SLACK)
        approximate = True
    inverse_c0 = _max_over_ball(g1, g2)
    if inverse_c0 is None:
        inverse_c0 = _sampled_max_ratio(g1, g2) * (1.0 + SAMPLED_SLACK)
        approximate = True
    c0 = min(1.0 / inverse_c0, c1)
    logger.debug(f"Equivalence constants c0={c0}, c1={c1}")
    return EquivalenceConstants(c0, c1, approximate)
