# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info
"""Gauge evaluation and construction tests"""
import numpy as np
import pytest

from minkowski_coapprox.analysis import (
    random_asymmetric_polygon,
    random_polytope_3d,
)
from minkowski_coapprox.gauge import (
    EllipsoidGauge,
    PolytopeGauge,
    ball_membership,
    ellipsoid,
    equivalence_constants,
    euclidean,
    from_halfspaces,
    from_vertices,
    gauge_eval,
    is_norm,
    linear_image,
    lp_gauge,
    reverse_gauge,
    shifted,
    sym_norm_eval,
    sym_norm_gauge,
)

from .sample_gauges import HEXAGON, SKEWED_PENTAGON, TRIANGLE


@pytest.fixture
def triangle():
    """Gauge of the triangle (1, 0), (0, 1), (-1, -1)"""
    return from_vertices(np.array(TRIANGLE))


def all_gauges():
    """A mix of every gauge class, in 2D and 3D"""
    return [
        euclidean(2),
        euclidean(3),
        lp_gauge(1, 2),
        lp_gauge(1, 3),
        lp_gauge("inf", 2),
        lp_gauge("inf", 3),
        ellipsoid(np.diag([1.0, 4.0])),
        shifted(euclidean(2), [0.3, 0.0]),
        shifted(lp_gauge("inf", 2), [0.2, -0.4]),
        from_vertices(np.array(TRIANGLE)),
        from_vertices(np.array(SKEWED_PENTAGON)),
        from_vertices(
            np.array(
                [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1.0]]
            )
        ),
        linear_image(lp_gauge("inf", 2), np.array([[2.0, 1.0], [0.0, 1.0]])),
        sym_norm_gauge(shifted(euclidean(2), [0.3, 0.0])),
    ]


def random_gauges():
    """Ten seeded asymmetric polygons and ten seeded 3D polytopes"""
    rng = np.random.default_rng(2022)
    polygons = [random_asymmetric_polygon(rng) for _ in range(10)]
    return polygons + [random_polytope_3d(rng) for _ in range(10)]


class TestEvaluation:
    """Known values"""

    @pytest.mark.parametrize(
        "g, x, value",
        [
            (lp_gauge("inf", 2), (3.0, 4.0), 4.0),
            (lp_gauge(1, 2), (3.0, -4.0), 7.0),
            (euclidean(2), (3.0, 4.0), 5.0),
            (lp_gauge(2, 2), (3.0, 4.0), 5.0),
            (ellipsoid(np.diag([1.0, 4.0])), (0.0, 1.0), 2.0),
            (from_vertices(np.array(TRIANGLE)), (1.0, 0.0), 1.0),
            (from_vertices(np.array(TRIANGLE)), (-1.0, 0.0), 2.0),
            (shifted(euclidean(2), [0.3, 0.0]), (1.3, 0.0), 1.0),
            (shifted(euclidean(2), [0.3, 0.0]), (-0.7, 0.0), 1.0),
            (shifted(lp_gauge("inf", 2), [0.5, 0.0]), (1.5, 0.0), 1.0),
            (lp_gauge(1, 5), (1.0, -1.0, 1.0, 0.0, 0.0), 3.0),
        ],
    )
    def test_values(self, g, x, value):
        """Gauge values with closed forms"""
        assert gauge_eval(g, x) == pytest.approx(value, abs=1e-12)

    def test_zero(self, triangle):
        """γ(0) = 0"""
        assert triangle([0.0, 0.0]) == 0.0

    def test_dimension_mismatch(self, triangle):
        """Vectors of the wrong length are rejected"""
        with pytest.raises(ValueError, match="dimension 2"):
            triangle([1.0, 2.0, 3.0])

    def test_non_finite(self, triangle):
        """NaN entries are rejected"""
        with pytest.raises(ValueError):
            triangle([np.nan, 0.0])

    def test_high_dimension_vertices(self):
        """Above 3D the hull is evaluated by linear programming"""
        eye = np.eye(4)
        g = from_vertices(np.vstack((eye, -eye)))
        assert g([1.0, 1.0, 0.0, -1.0]) == pytest.approx(3.0, abs=1e-9)


class TestAxioms:
    """Homogeneity, subadditivity and definiteness on samples"""

    @pytest.mark.parametrize("g", all_gauges() + random_gauges(), ids=repr)
    def test_axioms(self, g):
        """The three gauge axioms hold within 1e-9 on 1000 samples"""
        rng = np.random.default_rng(1)
        x = rng.standard_normal((1000, g.dim))
        y = rng.standard_normal((1000, g.dim))
        scale = rng.uniform(0.0, 10.0, 1000)
        gx = g.evaluate(x)
        gy = g.evaluate(y)
        assert np.all(gx > 0.0)
        assert g(np.zeros(g.dim)) == 0.0
        assert np.all(g.evaluate(x + y) <= (gx + gy) * (1.0 + 1e-9))
        np.testing.assert_allclose(
            g.evaluate(x * scale[:, np.newaxis]),
            gx * scale,
            rtol=1e-9,
            atol=1e-9,
        )

    def test_random_gauge_mix(self):
        """Twenty random gauges, half of them in 3D, none a norm"""
        gauges = random_gauges()
        assert len(gauges) == 20
        assert [g.dim for g in gauges].count(3) == 10
        assert not any(is_norm(g) for g in gauges[:10])


class TestConstruction:
    """Validation of bodies"""

    def test_origin_outside(self):
        """A body not containing 0 has no gauge"""
        with pytest.raises(ValueError, match="not interior"):
            from_vertices(np.array([[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]]))

    def test_degenerate(self):
        """Collinear vertices do not make a body"""
        with pytest.raises(ValueError):
            from_vertices(np.array([[1.0, 0.0], [-1.0, 0.0], [0.5, 0.0]]))

    def test_unbounded(self):
        """Half-spaces must bound the ball"""
        with pytest.raises(ValueError):
            from_halfspaces(np.array([[1.0, 0.0], [0.0, 1.0]]))

    def test_vertices_and_halfspaces_agree(self):
        """The square from both descriptions"""
        square = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1, -1]])
        by_vertices = from_vertices(square)
        by_halfspaces = lp_gauge("inf", 2)
        points = np.random.default_rng(2).standard_normal((50, 2))
        np.testing.assert_allclose(
            by_vertices.evaluate(points), by_halfspaces.evaluate(points)
        )

    def test_unsupported_p(self):
        """Only p = 1, 2 and infinity"""
        with pytest.raises(ValueError, match="not 3"):
            lp_gauge(3)

    def test_ellipsoid_not_definite(self):
        """A singular matrix has no ellipsoid"""
        with pytest.raises(ValueError, match="positive definite"):
            ellipsoid(np.diag([1.0, 0.0]))

    @pytest.mark.parametrize(
        "base, offset",
        [
            (euclidean(2), [1.5, 0.0]),
            (lp_gauge("inf", 2), [0.0, -1.0]),
            (lp_gauge(1, 2), [0.6, -0.6]),
            (ellipsoid(np.diag([1.0, 4.0])), [0.0, 0.5]),
        ],
    )
    def test_shift_too_far(self, base, offset):
        """Offsets with γ_base(offset) >= 1 leave 0 outside the ball"""
        with pytest.raises(ValueError, match="outside"):
            shifted(base, offset)

    def test_shift_asymmetric_base(self):
        """Only symmetric balls are translated"""
        with pytest.raises(ValueError, match="symmetric"):
            shifted(from_vertices(np.array(TRIANGLE)), [0.1, 0.0])


class TestSymmetry:
    """Reversal, norms and the symmetrized norm"""

    @pytest.mark.parametrize("g", all_gauges(), ids=repr)
    def test_reverse(self, g):
        """γ^∨(x) = γ(-x)"""
        points = np.random.default_rng(3).standard_normal((50, g.dim))
        np.testing.assert_allclose(
            reverse_gauge(g).evaluate(points), g.evaluate(-points)
        )

    @pytest.mark.parametrize(
        "g, expected",
        [
            (euclidean(2), True),
            (lp_gauge("inf", 3), True),
            (from_vertices(np.array(HEXAGON)), True),
            (from_vertices(np.array(TRIANGLE)), False),
            (shifted(euclidean(2), [0.3, 0.0]), False),
        ],
    )
    def test_is_norm(self, g, expected):
        """Symmetric gauges are norms"""
        assert is_norm(g) is expected

    def test_sym_norm(self, triangle):
        """max{γ, γ^∨} is a norm with the expected values"""
        norm = sym_norm_gauge(triangle)
        assert is_norm(norm)
        assert norm([1.0, 0.0]) == pytest.approx(2.0)
        assert sym_norm_eval(triangle, [1.0, 0.0]) == pytest.approx(2.0)

    def test_reverse_spec(self, triangle):
        """The reversed polytope keeps a spec"""
        spec = triangle.reverse().to_spec()
        assert spec["kind"] == "halfspaces"
        assert from_halfspaces(np.array(spec["data"]))(
            [1.0, 0.0]
        ) == pytest.approx(2.0)


class TestSupport:
    """Support functions, subgradients and limits at infinity"""

    @pytest.mark.parametrize(
        "g, direction, value",
        [
            (lp_gauge("inf", 2), (1.0, 1.0), 2.0),
            (lp_gauge(1, 2), (1.0, 1.0), 1.0),
            (euclidean(2), (3.0, 4.0), 5.0),
            (from_vertices(np.array(TRIANGLE)), (-1.0, 0.0), 1.0),
        ],
    )
    def test_support(self, g, direction, value):
        """Maximum of <n, x> over the unit ball"""
        assert g.support(direction) == pytest.approx(value, abs=1e-9)

    @pytest.mark.parametrize("g", all_gauges(), ids=repr)
    def test_subgradient(self, g):
        """g·x = γ(x) and g·w <= γ(w)"""
        rng = np.random.default_rng(4)
        x = rng.standard_normal(g.dim)
        gradient = g.subgradient(x)
        assert gradient @ x == pytest.approx(g(x), abs=1e-6)
        w = rng.standard_normal((100, g.dim))
        assert np.all(w @ gradient <= g.evaluate(w) + 1e-6)

    def test_asymptotic_polytope(self):
        """Exact limit from the facets active at the direction"""
        g = lp_gauge("inf", 2)
        limit = g.asymptotic_difference([1.0, 0.0], [0.0, 5.0], [2.0, 0.0])
        assert limit == pytest.approx(-2.0)

    def test_asymptotic_smooth(self):
        """Gradient limit for the Euclidean norm"""
        g = euclidean(2)
        limit = g.asymptotic_difference([0.0, 1.0], [3.0, 1.0], [0.0, -1.0])
        assert limit == pytest.approx(2.0)


class TestMaps:
    """Pullbacks and linear images"""

    def test_ellipsoid_pullback(self):
        """x -> |(2 x1, x2)|"""
        g = euclidean(2).pullback(np.diag([2.0, 1.0]))
        assert isinstance(g, EllipsoidGauge)
        assert g([1.0, 0.0]) == pytest.approx(2.0)

    def test_polytope_pullback(self):
        """Pulling a polytope back keeps it polytopal"""
        g = lp_gauge("inf", 3).pullback(np.eye(3)[:, :2])
        assert isinstance(g, PolytopeGauge)
        assert g([0.5, -2.0]) == pytest.approx(2.0)

    def test_linear_image(self):
        """The image of the square under 2I is the square of side 4"""
        g = linear_image(lp_gauge("inf", 2), 2.0 * np.eye(2))
        assert g([2.0, 0.0]) == pytest.approx(1.0)


class TestBalls:
    """Ball membership"""

    @pytest.mark.parametrize(
        "x, kind, expected",
        [
            ((1.0, 0.0), "closed", True),
            ((1.0, 0.0), "open", False),
            ((1.0, 0.0), "sphere", True),
            ((0.5, 0.0), "open", True),
            ((2.0, 0.0), "closed", False),
        ],
    )
    def test_membership(self, x, kind, expected):
        """Closed, open and sphere around 0 with radius 1"""
        assert (
            ball_membership(euclidean(2), [0.0, 0.0], 1.0, x, kind)
            is expected
        )

    def test_bad_kind(self):
        """Unknown ball kinds are an error"""
        with pytest.raises(ValueError, match="kind"):
            ball_membership(euclidean(2), [0, 0], 1.0, [0, 0], "fuzzy")


class TestEquivalence:
    """Equivalence constants"""

    def test_euclidean_linf(self):
        """|x|/sqrt(2) <= max|x_i| <= |x|"""
        constants = equivalence_constants(euclidean(2), lp_gauge("inf", 2))
        assert constants.c0 == pytest.approx(1.0 / np.sqrt(2.0))
        assert constants.c1 == pytest.approx(1.0)
        assert not constants.approximate

    def test_ellipsoids(self):
        """Generalized eigenvalues give the constants"""
        constants = equivalence_constants(
            euclidean(2), ellipsoid(np.diag([1.0, 4.0]))
        )
        assert constants.c0 == pytest.approx(1.0)
        assert constants.c1 == pytest.approx(2.0)

    def test_symmetrization(self, triangle):
        """A gauge against its symmetrized norm: c0 = 1"""
        constants = equivalence_constants(triangle, sym_norm_gauge(triangle))
        assert constants.c0 == pytest.approx(1.0)
        assert constants.c1 == pytest.approx(2.0)

    def test_sampled(self):
        """Sampled constants still bracket the ratio"""
        g = shifted(euclidean(2), [0.3, 0.0])
        constants = equivalence_constants(g, sym_norm_gauge(g))
        assert constants.approximate
        # the ratio γ(-x) / γ(x) peaks along the x-axis at 1.3 / 0.7
        assert 1.3 / 0.7 <= constants.c1 <= 1.3 / 0.7 * (1.0 + 1e-4)
        assert 1.0 - 1e-4 <= constants.c0 <= 1.0
        x = np.random.default_rng(3).standard_normal((1000, 2))
        ratio = sym_norm_gauge(g).evaluate(x) / g.evaluate(x)
        assert np.all(ratio <= constants.c1)
        assert np.all(ratio >= constants.c0)

    def test_dimension_mismatch(self):
        """Gauges must share a space"""
        with pytest.raises(ValueError, match="mismatch"):
            equivalence_constants(euclidean(2), euclidean(3))
