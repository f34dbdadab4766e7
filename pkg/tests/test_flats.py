# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info
"""Affine flat and linear functional tests"""
import numpy as np
import pytest

from minkowski_coapprox.flats import (
    LinearFunctional,
    euclidean_project,
    flat_membership,
    flat_sample,
    functional_from_hyperplane,
    hyperplane_from_functional,
    make_flat,
    span_basis,
)


class TestFlat:
    """Flat construction and coordinates"""

    def test_basis_orthonormal(self):
        """The basis spans the directions and is orthonormal"""
        flat = make_flat([1.0, 2.0, 3.0], [[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
        np.testing.assert_allclose(
            flat.basis @ flat.basis.T, np.eye(2), atol=1e-12
        )
        assert flat.rank == 2
        assert flat.dim == 3

    def test_basis_orientation(self):
        """A single direction keeps its sign"""
        flat = make_flat([0.0, 0.0], [[-2.0, 0.0]])
        np.testing.assert_allclose(flat.basis, [[-1.0, 0.0]])

    def test_point_coordinates(self):
        """Parameters are coordinates along the basis"""
        flat = make_flat([0.0, 1.0], [[1.0, 0.0]])
        np.testing.assert_allclose(flat.point([2.5]), [2.5, 1.0])
        np.testing.assert_allclose(flat.coordinates([2.5, 7.0]), [2.5])

    @pytest.mark.parametrize(
        "base, directions",
        [
            ([0.0, 0.0], [[1.0, 1.0], [2.0, 2.0]]),
            ([0.0, 0.0], [[0.0, 0.0]]),
            ([0.0, 0.0], [[1.0, 0.0, 0.0]]),
            ([0.0, 0.0], []),
            ([0.0, np.inf], [[1.0, 0.0]]),
        ],
    )
    def test_invalid(self, base, directions):
        """Rank-deficient, mismatched, empty or non-finite input"""
        with pytest.raises(ValueError):
            make_flat(base, directions)

    def test_membership(self):
        """Points on and off a line"""
        flat = make_flat([0.0, 1.0], [[1.0, 1.0]])
        assert flat_membership(flat, [2.0, 3.0])
        assert not flat_membership(flat, [2.0, 3.1])

    def test_project(self):
        """Orthogonal projection onto the x-axis"""
        flat = make_flat([5.0, 0.0], [[1.0, 0.0]])
        np.testing.assert_allclose(euclidean_project(flat, [3, 4]), [3, 0])

    def test_translate(self):
        """Translated flats keep their directions"""
        flat = make_flat([0.0, 0.0], [[1.0, 0.0]]).translate([0.0, 2.0])
        assert flat_membership(flat, [7.0, 2.0])

    def test_to_dict(self):
        """Spec form of a flat"""
        flat = make_flat([0.0, 1.0], [[2.0, 0.0]])
        assert flat.to_dict() == {
            "base": [0.0, 1.0],
            "directions": [[2.0, 0.0]],
        }


class TestSample:
    """Deterministic flat samples"""

    def test_lattice_and_noise(self):
        """Lattice first, then seeded uniform points, all on the flat"""
        flat = make_flat([0.0, 0.0, 1.0], [[1, 0, 0], [0, 1, 0]])
        points = flat_sample(flat, 2.0, 30, seed=5)
        assert points.shape == (30, 3)
        np.testing.assert_allclose(points[:, 2], 1.0)
        # 5 x 5 lattice with corners at the bound
        np.testing.assert_allclose(points[0], [-2.0, -2.0, 1.0])
        np.testing.assert_allclose(points[24], [2.0, 2.0, 1.0])
        assert np.all(np.abs(points[:, :2]) <= 2.0)

    def test_deterministic(self):
        """Same seed, same points"""
        flat = make_flat([0.0, 0.0], [[1.0, 2.0]])
        np.testing.assert_array_equal(
            flat_sample(flat, 1.0, 7, 3), flat_sample(flat, 1.0, 7, 3)
        )

    @pytest.mark.parametrize("bound, count", [(0.0, 5), (1.0, 0)])
    def test_invalid(self, bound, count):
        """Bound and count must be positive"""
        flat = make_flat([0.0, 0.0], [[1.0, 0.0]])
        with pytest.raises(ValueError):
            flat_sample(flat, bound, count)


class TestFunctionals:
    """Functionals and hyperplanes"""

    def test_zero_functional(self):
        """Functionals must be non-zero"""
        with pytest.raises(ValueError):
            LinearFunctional(np.zeros(3))

    def test_hyperplane_round_trip(self):
        """{z = 2} as a flat and back"""
        plane = hyperplane_from_functional(
            LinearFunctional(np.array([0.0, 0.0, 1.0])), level=2.0
        )
        assert plane.rank == 2
        assert flat_membership(plane, [3.0, -1.0, 2.0])
        functional, level = functional_from_hyperplane(plane)
        np.testing.assert_allclose(functional.coeffs, [0, 0, 1], atol=1e-12)
        assert level == pytest.approx(2.0)

    def test_not_hyperplane(self):
        """A line in 3D has no single defining functional"""
        with pytest.raises(ValueError, match="not a hyperplane"):
            functional_from_hyperplane(make_flat([0, 0, 0], [[1, 0, 0]]))

    def test_span_basis(self):
        """Dependent vectors are skipped"""
        basis = span_basis([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1, 1, 0]])
        assert basis.shape == (3, 2)
        np.testing.assert_allclose(basis.T @ basis, np.eye(2), atol=1e-12)

    def test_span_nothing(self):
        """Zero vectors span nothing"""
        with pytest.raises(ValueError):
            span_basis([[0.0, 0.0]])
