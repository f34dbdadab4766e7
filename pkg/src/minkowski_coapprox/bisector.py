# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.
"""
Bisectors {z : γ(z - x) = γ(z - y)} Sampled over Planar Windows.

The sign of F(z) = γ(z - x) - γ(z - y) is tabulated on a grid. Bisectors of
gauges can have interior, so near-zero values are labelled as a band
rather than forced onto a curve. The boundary of {F > 0} is traced with
marching squares.
"""
import csv
import logging
import typing
import xml.etree.ElementTree as ElementTree
from collections import defaultdict
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from minkowski_coapprox.gauge import Gauge

logger = logging.getLogger(__name__)

BAND_SCALE = 1e-3
"""default band tolerance = BAND_SCALE * window diagonal * Lipschitz bound"""
REFINE_STEPS = 60

LABEL_COLOURS = {
    -1: "#4575b4",
    0: "#ffffbf",
    1: "#d73027",
}

Window = typing.Tuple[typing.Sequence[float], typing.Sequence[float]]


class BisectorLabel(IntEnum):
    """Sign of F(z) = γ(z - x) - γ(z - y), with a tolerance band"""

    NEGATIVE = -1
    BAND = 0
    POSITIVE = 1


@dataclass(frozen=True, eq=False)
class BisectorSample:
    """
    F sampled on a grid over a window.

    ``values`` and ``labels`` have shape (ny, nx): row i is zy = ys[i].
    """

    lower: np.ndarray
    upper: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    labels: np.ndarray
    contours: typing.List[np.ndarray]
    band_tol: float
    reverse: bool = False

    @property
    def resolution(self) -> typing.Tuple[int, int]:
        """(nx, ny)"""
        return len(self.xs), len(self.ys)

    def summary(self) -> dict:
        """Label counts and contour sizes"""
        return {
            "window": [self.lower.tolist(), self.upper.tolist()],
            "resolution": list(self.resolution),
            "band_tol": self.band_tol,
            "reverse": self.reverse,
            "labels": {
                label.name.lower(): int(np.sum(self.labels == label))
                for label in BisectorLabel
            },
            "contours": len(self.contours),
            "contour_vertices": int(sum(len(c) for c in self.contours)),
        }


def bisector_values(g: Gauge, x, y, points: np.ndarray) -> np.ndarray:
    """F(z) = γ(z - x) - γ(z - y) for each row z of ``points``"""
    x = g.check_vector(x)
    y = g.check_vector(y)
    points = g.check_points(points)
    return g.evaluate(points - x) - g.evaluate(points - y)


def _label(values: np.ndarray, band_tol: float) -> np.ndarray:
    labels = np.sign(values).astype(np.int8)
    labels[np.abs(values) <= band_tol] = BisectorLabel.BAND
    return labels


def classify_point(g: Gauge, x, y, z, band_tol: float) -> BisectorLabel:
    """Label of z; with x = y every point is in the band"""
    if g.dim != 2:
        raise ValueError(f"Bisectors are sampled in 2D, not {g.dim}D")
    value = bisector_values(g, x, y, np.atleast_2d(z))
    return BisectorLabel(int(_label(value, band_tol)[0]))


def default_band_tol(g: Gauge, lower, upper) -> float:
    """Band tolerance scaled to the window and the gauge"""
    diagonal = float(np.linalg.norm(np.subtract(upper, lower)))
    return BAND_SCALE * diagonal * g.lipschitz()


class _ContourTracer:
    """Marching squares on the sign of F > 0"""

    def __init__(self, sample_f, xs, ys, values, band_tol):
        self._f = sample_f
        self._xs = xs
        self._ys = ys
        self._values = values
        self._positive = values > 0.0
        self._band_tol = band_tol
        self._crossings: typing.Dict[tuple, np.ndarray] = {}

    def _corner(self, i: int, j: int) -> typing.Tuple[np.ndarray, float]:
        return np.array([self._xs[j], self._ys[i]]), self._values[i, j]

    def _crossing(self, key: tuple) -> np.ndarray:
        """Point on a grid edge where F changes sign, |F| <= band_tol"""
        if key in self._crossings:
            return self._crossings[key]
        kind, i, j = key
        end = (i, j + 1) if kind == "h" else (i + 1, j)
        point_a, value_a = self._corner(i, j)
        point_b, value_b = self._corner(*end)
        # keep the F > 0 end as ``inside``
        if value_a > 0.0:
            inside, outside = point_a, point_b
            value_in, value_out = value_a, value_b
        else:
            inside, outside = point_b, point_a
            value_in, value_out = value_b, value_a
        t = value_in / (value_in - value_out)
        point = inside + t * (outside - inside)
        value = self._f(point)
        for _ in range(REFINE_STEPS):
            if abs(value) <= self._band_tol:
                break
            if value > 0.0:
                inside = point
            else:
                outside = point
            point = (inside + outside) / 2.0
            value = self._f(point)
        self._crossings[key] = point
        return point

    def _cell_segments(self, i: int, j: int) -> typing.List[tuple]:
        corners = [(i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j)]
        signs = [self._positive[c] for c in corners]
        edges = [
            ("h", i, j),
            ("v", i, j + 1),
            ("h", i + 1, j),
            ("v", i, j),
        ]
        # edge n joins corner n and corner n + 1
        cut = [n for n in range(4) if signs[n] != signs[(n + 1) % 4]]
        if not cut:
            return []
        if len(cut) == 2:
            return [(edges[cut[0]], edges[cut[1]])]
        centre = np.array(
            [
                (self._xs[j] + self._xs[j + 1]) / 2.0,
                (self._ys[i] + self._ys[i + 1]) / 2.0,
            ]
        )
        centre_positive = self._f(centre) > 0.0
        # corners of the other sign are cut off, each by its two edges
        return [
            (edges[(n - 1) % 4], edges[n])
            for n in range(4)
            if signs[n] != centre_positive
        ]

    def trace(self) -> typing.List[np.ndarray]:
        """Polylines along F = 0, open ones first, in grid order"""
        segments = []
        ny, nx = self._values.shape
        for i in range(ny - 1):
            for j in range(nx - 1):
                segments.extend(self._cell_segments(i, j))
        neighbours = defaultdict(list)
        for a, b in segments:
            neighbours[a].append(b)
            neighbours[b].append(a)
        used = set()

        def link(a, b):
            return (a, b) if a <= b else (b, a)

        def free(key):
            return [n for n in neighbours[key] if link(key, n) not in used]

        def walk(start):
            path = [start]
            current = start
            while free(current):
                step = free(current)[0]
                used.add(link(current, step))
                path.append(step)
                current = step
            return path

        chains = []
        for key in neighbours:
            if len(neighbours[key]) == 1 and free(key):
                chains.append(walk(key))
        for key in neighbours:
            while free(key):
                chains.append(walk(key))
        return [
            np.array([self._crossing(key) for key in chain])
            for chain in chains
        ]


def sample_bisector(
    g: Gauge,
    x,
    y,
    window: Window,
    resolution: typing.Tuple[int, int],
    band_tol: typing.Optional[float] = None,
    reverse: bool = False,
) -> BisectorSample:
    """
    Classify a grid over ``window`` and extract the F = 0 contours.

    :param window: (lower corner, upper corner)
    :param resolution: (nx, ny), each at least 2
    :param band_tol: |F| at most this is labelled BAND; default from
      :py:func:`default_band_tol`
    :param reverse: sample the bisector of the reversed gauge
    """
    if g.dim != 2:
        raise ValueError(f"Bisectors are sampled in 2D, not {g.dim}D")
    lower = np.asarray(window[0], dtype=float)
    upper = np.asarray(window[1], dtype=float)
    if lower.shape != (2,) or upper.shape != (2,):
        raise ValueError(f"Window corners must be 2D points: {window}")
    if np.any(upper <= lower):
        raise ValueError(f"Degenerate window {lower} .. {upper}")
    nx, ny = (int(n) for n in resolution)
    if nx < 2 or ny < 2:
        raise ValueError(f"Resolution must be at least 2x2, not {nx}x{ny}")
    gauge = g.reverse() if reverse else g
    if band_tol is None:
        band_tol = default_band_tol(gauge, lower, upper)
    if band_tol < 0:
        raise ValueError(f"Band tolerance must be non-negative: {band_tol}")

    xs = lower[0] + np.arange(nx) * ((upper[0] - lower[0]) / (nx - 1))
    ys = lower[1] + np.arange(ny) * ((upper[1] - lower[1]) / (ny - 1))
    grid_x, grid_y = np.meshgrid(xs, ys)
    points = np.column_stack((grid_x.ravel(), grid_y.ravel()))
    values = bisector_values(gauge, x, y, points).reshape(ny, nx)
    labels = _label(values, band_tol)

    def f(z):
        return float(bisector_values(gauge, x, y, z[np.newaxis, :])[0])

    contours = _ContourTracer(f, xs, ys, values, band_tol).trace()
    logger.info(
        f"bisector sampled on {nx}x{ny}: {len(contours)} contours, "
        f"{int(np.sum(labels == BisectorLabel.BAND))} band cells"
    )
    return BisectorSample(
        lower, upper, xs, ys, values, labels, contours, band_tol, reverse
    )


def _number(value: float) -> str:
    return repr(float(value))


def bisector_svg(sample: BisectorSample) -> ElementTree.Element:
    """SVG document: label shading by row runs, one polyline per contour"""
    width, height = sample.upper - sample.lower
    root = ElementTree.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "version": "1.1",
            "viewBox": " ".join(
                _number(v)
                for v in (sample.lower[0], -sample.upper[1], width, height)
            ),
        },
    )
    # flip so that y grows upwards
    layer = ElementTree.SubElement(root, "g", {"transform": "scale(1,-1)"})
    nx, ny = sample.resolution
    step_x = width / (nx - 1)
    step_y = height / (ny - 1)
    for i in range(ny):
        row = sample.labels[i]
        start = 0
        for j in range(1, nx + 1):
            if j < nx and row[j] == row[start]:
                continue
            ElementTree.SubElement(
                layer,
                "rect",
                {
                    "x": _number(sample.xs[start] - step_x / 2),
                    "y": _number(sample.ys[i] - step_y / 2),
                    "width": _number((j - start) * step_x),
                    "height": _number(step_y),
                    "fill": LABEL_COLOURS[int(row[start])],
                },
            )
            start = j
    stroke = _number(min(width, height) / 200.0)
    for contour in sample.contours:
        ElementTree.SubElement(
            layer,
            "polyline",
            {
                "points": " ".join(
                    f"{_number(px)},{_number(py)}" for px, py in contour
                ),
                "fill": "none",
                "stroke": "black",
                "stroke-width": stroke,
            },
        )
    return root


def emit_bisector_svg(sample: BisectorSample, path) -> None:
    """
    Write the SVG rendering of a sample.

    :raises OSError: naming the path, if the file cannot be written
    """
    tree = ElementTree.ElementTree(bisector_svg(sample))
    try:
        tree.write(path, encoding="utf-8", xml_declaration=True)
    except OSError as err:
        raise OSError(f"Cannot write bisector SVG to {path}: {err}") from err


def emit_bisector_csv(sample: BisectorSample, path) -> None:
    """
    Write "zx,zy,F,label" rows in row-major grid order.

    :raises OSError: naming the path, if the file cannot be written
    """
    try:
        with open(path, "w", newline="", encoding="utf-8") as csv_file:
            writer = csv.writer(csv_file, lineterminator="\n")
            writer.writerow(["zx", "zy", "F", "label"])
            for i, zy in enumerate(sample.ys):
                for j, zx in enumerate(sample.xs):
                    writer.writerow(
                        [
                            _number(zx),
                            _number(zy),
                            _number(sample.values[i, j]),
                            BisectorLabel(sample.labels[i, j]).name,
                        ]
                    )
    except OSError as err:
        raise OSError(f"Cannot write bisector CSV to {path}: {err}") from err
