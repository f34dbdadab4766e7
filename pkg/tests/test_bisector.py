# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info
"""Bisector sampling and output tests"""
import csv
import xml.etree.ElementTree as ElementTree

import numpy as np
import pytest

from minkowski_coapprox.bisector import (
    BisectorLabel,
    bisector_svg,
    bisector_values,
    classify_point,
    emit_bisector_csv,
    emit_bisector_svg,
    sample_bisector,
)
from minkowski_coapprox.gauge import (
    euclidean,
    from_vertices,
    lp_gauge,
    shifted,
)

from .sample_gauges import SKEWED_PENTAGON, TRIANGLE

WINDOW = ((-2.0, -2.0), (2.0, 2.0))


class TestClassify:
    """Labels of single points"""

    @pytest.mark.parametrize(
        "z, label",
        [
            ((0.0, 5.0), BisectorLabel.BAND),
            ((-1.0, 0.0), BisectorLabel.NEGATIVE),
            ((1.5, 0.3), BisectorLabel.POSITIVE),
        ],
    )
    def test_euclidean(self, z, label):
        """Sign of |z - x| - |z - y| for x = (-1, 0), y = (1, 0)"""
        assert (
            classify_point(euclidean(2), (-1.0, 0.0), (1.0, 0.0), z, 1e-9)
            == label
        )

    def test_same_sites(self):
        """x = y puts everything in the band"""
        g = from_vertices(np.array(TRIANGLE))
        assert classify_point(g, (1, 1), (1, 1), (3, -2), 0.0) == 0

    def test_values(self):
        """F at a few points"""
        values = bisector_values(
            lp_gauge("inf", 2), (0, 0), (2, 0), np.array([[0, 0], [2, 1]])
        )
        np.testing.assert_allclose(values, [-2.0, 1.0])


class TestSample:
    """Grid sampling and contours"""

    def test_euclidean_line(self):
        """One contour, on the perpendicular bisector x = 0"""
        sample = sample_bisector(
            euclidean(2), (-1.0, 0.0), (1.0, 0.0), WINDOW, (256, 256)
        )
        assert len(sample.contours) == 1
        diagonal = np.hypot(4.0 / 255, 4.0 / 255)
        assert np.all(np.abs(sample.contours[0][:, 0]) <= diagonal)
        assert np.all(np.abs(sample.contours[0][:, 0]) <= 1e-9)
        assert sample.labels.shape == (256, 256)

    @pytest.mark.parametrize(
        "g",
        [
            from_vertices(np.array(TRIANGLE)),
            lp_gauge("inf", 2),
            euclidean(2),
        ],
        ids=["triangle", "linf", "euclidean"],
    )
    def test_contour_vertices(self, g):
        """Every contour vertex is within twice the band of F = 0"""
        x, y = np.array([-1.0, 0.0]), np.array([1.0, 0.0])
        sample = sample_bisector(g, x, y, WINDOW, (64, 64))
        assert sample.contours
        for contour in sample.contours:
            values = bisector_values(g, x, y, contour)
            assert np.all(np.abs(values) <= 2 * sample.band_tol)

    @pytest.mark.parametrize(
        "g",
        [
            from_vertices(np.array(TRIANGLE)),
            lp_gauge("inf", 2),
            euclidean(2),
            shifted(euclidean(2), [0.25, 0.0]),
        ],
        ids=["triangle", "linf", "euclidean", "shifted"],
    )
    def test_translation(self, g):
        """Moving both sites and the window by v keeps every label"""
        x, y = np.array([-0.75, 0.5]), np.array([1.0, -0.25])
        offset = np.array([0.5, -1.25])
        # dyadic grid: shifted grid points are exact
        sample = sample_bisector(g, x, y, WINDOW, (33, 33))
        window = (np.array(WINDOW[0]) + offset, np.array(WINDOW[1]) + offset)
        moved = sample_bisector(g, x + offset, y + offset, window, (33, 33))
        np.testing.assert_array_equal(moved.labels, sample.labels)
        assert moved.band_tol == sample.band_tol

    def test_axes(self):
        """xs and ys start at the lower corner and end at the upper one"""
        sample = sample_bisector(
            euclidean(2), (-1.0, 0.0), (1.0, 0.0), WINDOW, (5, 3)
        )
        np.testing.assert_allclose(sample.xs, [-2, -1, 0, 1, 2])
        np.testing.assert_allclose(sample.ys, [-2, 0, 2])
        assert sample.resolution == (5, 3)

    @pytest.mark.parametrize(
        "g",
        [
            euclidean(2),
            lp_gauge("inf", 2),
            lp_gauge(1, 2),
            from_vertices(np.array(TRIANGLE)),
            from_vertices(np.array(SKEWED_PENTAGON)),
            shifted(euclidean(2), [0.3, 0.0]),
        ],
    )
    def test_swap_antisymmetry(self, g):
        """Swapping the sites negates every label"""
        rng = np.random.default_rng(7)
        x, y = rng.uniform(-1.5, 1.5, (2, 2))
        forward = sample_bisector(g, x, y, WINDOW, (40, 30))
        backward = sample_bisector(g, y, x, WINDOW, (40, 30))
        np.testing.assert_array_equal(forward.labels, -backward.labels)

    def test_reverse(self):
        """The reversed gauge's bisector of (x, y) mirrors that of (-x, -y)"""
        g = from_vertices(np.array(TRIANGLE))
        x, y = np.array([0.5, 0.2]), np.array([-0.7, 0.4])
        window = ((-2.0, -2.0), (2.0, 2.0))
        reversed_sample = sample_bisector(
            g, x, y, window, (21, 21), band_tol=1e-9, reverse=True
        )
        mirrored = sample_bisector(
            g, -x, -y, window, (21, 21), band_tol=1e-9
        )
        # z -> -z maps the symmetric grid onto itself
        np.testing.assert_array_equal(
            reversed_sample.labels, mirrored.labels[::-1, ::-1]
        )
        assert reversed_sample.reverse

    def test_linf_band(self):
        """The maximum norm bisector of (0, 0) and (1, 1) has interior"""
        sample = sample_bisector(
            lp_gauge("inf", 2), (0.0, 0.0), (1.0, 1.0), WINDOW, (41, 41)
        )
        assert sample.summary()["labels"]["band"] > 41

    def test_summary(self):
        """Counts add up to the grid size"""
        summary = sample_bisector(
            euclidean(2), (-1.0, 0.0), (1.0, 0.0), WINDOW, (10, 12)
        ).summary()
        assert sum(summary["labels"].values()) == 120
        assert summary["resolution"] == [10, 12]
        assert summary["contours"] == 1

    @pytest.mark.parametrize(
        "window, resolution",
        [
            (WINDOW, (1, 5)),
            (((0.0, 0.0), (0.0, 1.0)), (5, 5)),
            (((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)), (5, 5)),
        ],
    )
    def test_invalid(self, window, resolution):
        """Degenerate windows and grids"""
        with pytest.raises(ValueError):
            sample_bisector(euclidean(2), (0, 0), (1, 0), window, resolution)

    def test_needs_plane(self):
        """Bisectors are sampled in 2D"""
        with pytest.raises(ValueError, match="2D"):
            sample_bisector(
                euclidean(3), (0, 0, 0), (1, 0, 0), WINDOW, (5, 5)
            )


class TestEmit:
    """SVG and CSV files"""

    def test_csv(self, tmp_path):
        """Header and one row per grid point"""
        sample = sample_bisector(
            euclidean(2), (-1.0, 0.0), (1.0, 0.0), WINDOW, (2, 2)
        )
        path = tmp_path / "bisector.csv"
        emit_bisector_csv(sample, path)
        with open(path, encoding="utf-8") as csv_file:
            rows = list(csv.reader(csv_file))
        assert rows[0] == ["zx", "zy", "F", "label"]
        assert len(rows) == 5
        assert rows[1][:2] == ["-2.0", "-2.0"]
        assert {row[3] for row in rows[1:]} <= {"NEGATIVE", "BAND", "POSITIVE"}

    def test_svg(self, tmp_path):
        """An SVG document with one polyline per contour"""
        sample = sample_bisector(
            euclidean(2), (-1.0, 0.0), (1.0, 0.0), WINDOW, (16, 16)
        )
        root = bisector_svg(sample)
        assert root.tag == "svg"
        assert len(root.findall(".//polyline")) == len(sample.contours)
        path = tmp_path / "bisector.svg"
        emit_bisector_svg(sample, path)
        parsed = ElementTree.parse(path).getroot()
        assert parsed.tag.endswith("svg")

    def test_deterministic(self, tmp_path):
        """Same input, same bytes"""
        sample = sample_bisector(
            from_vertices(np.array(TRIANGLE)), (0, 0), (1, 0), WINDOW, (9, 9)
        )
        first, second = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_bisector_svg(sample, first)
        emit_bisector_svg(sample, second)
        assert first.read_bytes() == second.read_bytes()

    def test_unwritable(self, tmp_path):
        """Write errors name the path"""
        sample = sample_bisector(
            euclidean(2), (-1.0, 0.0), (1.0, 0.0), WINDOW, (2, 2)
        )
        path = tmp_path / "missing" / "bisector.csv"
        with pytest.raises(OSError, match="missing"):
            emit_bisector_csv(sample, path)
