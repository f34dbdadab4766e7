# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.
"""
Affine Flats (lines, planes, hyperplanes) and Linear Functionals
"""
import typing
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

RANK_TOL = 1e-10
"""smallest singular value accepted for normalised directions"""

MEMBERSHIP_TOL = 1e-9

Vector = typing.Union[np.ndarray, typing.Sequence[float]]


def _read_only(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Flat:
    """
    Affine subspace base + span(directions).

    Parameters of points are coordinates in the orthonormal ``basis``.
    """

    base: np.ndarray
    directions: np.ndarray
    """the directions as given, (k, d)"""
    basis: np.ndarray
    """orthonormal rows spanning the same space, (k, d)"""

    @property
    def dim(self) -> int:
        """Ambient dimension d"""
        return self.base.size

    @property
    def rank(self) -> int:
        """Dimension k of the flat"""
        return self.basis.shape[0]

    def point(self, params: Vector) -> np.ndarray:
        """Point with parameter vector ``params``"""
        return self.base + np.asarray(params, dtype=float) @ self.basis

    def points(self, params: np.ndarray) -> np.ndarray:
        """Points for each row of an (n, k) parameter array"""
        params = np.asarray(params, dtype=float).reshape(-1, self.rank)
        return self.base + params @ self.basis

    def coordinates(self, x: Vector) -> np.ndarray:
        """Parameters of the projection of x onto the flat"""
        return (np.asarray(x, dtype=float) - self.base) @ self.basis.T

    def translate(self, offset: Vector) -> "Flat":
        """The flat moved by ``offset``"""
        return make_flat(self.base + np.asarray(offset), self.directions)

    def check_vector(self, x: Vector) -> np.ndarray:
        """
        :raises ValueError: if x does not live in the flat's ambient space
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(
                f"Expected a vector of dimension {self.dim}, "
                f"got shape {x.shape}"
            )
        return x

    def to_dict(self) -> dict:
        """Flat spec, as embedded in CLI JSON"""
        return {
            "base": self.base.tolist(),
            "directions": self.directions.tolist(),
        }


def make_flat(base: Vector, directions: typing.Sequence[Vector]) -> Flat:
    """
    Create a flat from a point and linearly independent directions.

    :raises ValueError: if the directions are missing, of the wrong
      dimension, or rank-deficient
    """
    base = np.asarray(base, dtype=float).reshape(-1)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    if directions.size == 0:
        raise ValueError("A flat needs at least one direction")
    if directions.shape[1] != base.size:
        raise ValueError(
            f"Directions of dimension {directions.shape[1]} do not match "
            f"base point of dimension {base.size}"
        )
    if not (np.all(np.isfinite(base)) and np.all(np.isfinite(directions))):
        raise ValueError("Flat coordinates must be finite")
    lengths = np.linalg.norm(directions, axis=1)
    if directions.shape[0] > base.size or np.any(lengths == 0.0):
        raise ValueError(f"Directions are rank deficient: {directions}")
    singular = np.linalg.svd(
        directions / lengths[:, np.newaxis], compute_uv=False
    )
    if singular.min() <= RANK_TOL:
        raise ValueError(f"Directions are rank deficient: {directions}")
    q, r = np.linalg.qr(directions.T)
    # orient each basis vector like the direction it came from
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return Flat(
        _read_only(base),
        _read_only(directions),
        _read_only((q * signs).T),
    )


def euclidean_project(flat: Flat, y: Vector) -> np.ndarray:
    """The point z of the flat with y - z orthogonal to it"""
    return flat.point(flat.coordinates(flat.check_vector(y)))


def flat_membership(
    flat: Flat, x: Vector, tol: float = MEMBERSHIP_TOL
) -> bool:
    """Is x within Euclidean distance ``tol`` of the flat?"""
    x = flat.check_vector(x)
    return bool(np.linalg.norm(x - euclidean_project(flat, x)) <= tol)


def flat_sample(
    flat: Flat, bound: float, count: int, seed: int = 0
) -> np.ndarray:
    """
    Deterministic points of the flat with parameters in [-bound, bound]^k.

    The largest full lattice that fits in ``count`` comes first (its axes
    include both endpoints), the remainder is seeded uniform noise.
    :return: (count, d) array
    """
    if bound <= 0:
        raise ValueError(f"Sample bound must be positive, not {bound}")
    if count < 1:
        raise ValueError(f"Sample count must be at least 1, not {count}")
    k = flat.rank
    per_axis = int(np.floor(count ** (1.0 / k) + 1e-9))
    if per_axis >= 2:
        axis = np.linspace(-bound, bound, per_axis)
        grid = np.meshgrid(*[axis] * k, indexing="ij")
        lattice = np.column_stack([g.ravel() for g in grid])
    else:
        lattice = np.zeros((1, k))
    rng = np.random.default_rng(seed)
    extra = rng.uniform(-bound, bound, (count - len(lattice), k))
    return flat.points(np.vstack((lattice, extra)))


@dataclass(frozen=True, eq=False)
class LinearFunctional:
    """x -> <coeffs, x>, optionally carrying its maximum on a unit ball"""

    coeffs: np.ndarray
    alpha: typing.Optional[float] = None

    def __post_init__(self):
        coeffs = _read_only(np.asarray(self.coeffs).reshape(-1))
        if not np.any(coeffs):
            raise ValueError("A functional needs non-zero coefficients")
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, x: Vector) -> float:
        return float(self.coeffs @ np.asarray(x, dtype=float))

    def to_dict(self) -> dict:
        """JSON form"""
        return {"coeffs": self.coeffs.tolist(), "alpha": self.alpha}


def hyperplane_from_functional(
    functional: LinearFunctional, level: float = 0.0
) -> Flat:
    """The level set {x : f(x) = level} as a flat"""
    coeffs = functional.coeffs
    if coeffs.size < 2:
        raise ValueError("Hyperplanes need an ambient dimension of 2 or more")
    base = level * coeffs / (coeffs @ coeffs)
    return make_flat(base, null_space(coeffs[np.newaxis, :]).T)


def functional_from_hyperplane(
    flat: Flat,
) -> typing.Tuple[LinearFunctional, float]:
    """
    A functional and level whose level set is the given hyperplane.

    The normal is unit length with its first non-zero entry positive.
    :raises ValueError: if the flat is not of codimension one
    """
    if flat.rank != flat.dim - 1:
        raise ValueError(
            f"A {flat.rank}-flat in dimension {flat.dim} is not a hyperplane"
        )
    normal = null_space(flat.basis)[:, 0]
    leading = normal[np.flatnonzero(np.abs(normal) > RANK_TOL)[0]]
    normal = normal * np.sign(leading)
    return LinearFunctional(normal), float(normal @ flat.base)


def span_basis(vectors: typing.Sequence[Vector]) -> np.ndarray:
    """
    Orthonormal basis (columns) of the span of the given vectors.

    Vectors already in the span of earlier ones are skipped.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    columns = []
    for v in vectors:
        residual = v.copy()
        for c in columns:
            residual -= (c @ residual) * c
        length = np.linalg.norm(residual)
        if length > RANK_TOL * max(1.0, np.linalg.norm(v)):
            columns.append(residual / length)
    if not columns:
        raise ValueError("Cannot span a subspace with zero vectors")
    return np.column_stack(columns)
