# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info
"""Gauge descriptions shared by the tests"""

TRIANGLE = [[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]
"""asymmetric: γ(1, 0) = 1, γ(-1, 0) = 2"""

HEXAGON = [
    [1.0, 0.0],
    [0.5, 0.9],
    [-0.5, 0.9],
    [-1.0, 0.0],
    [-0.5, -0.9],
    [0.5, -0.9],
]
"""centrally symmetric"""

SKEWED_PENTAGON = [
    [1.3, 0.1],
    [0.4, 1.1],
    [-0.8, 0.7],
    [-0.6, -0.9],
    [0.5, -1.2],
]
"""generic: no two edges parallel, not symmetric"""

TRIANGLE_SPEC = {"dim": 2, "kind": "vertices", "data": TRIANGLE}

SQUARE_HALFSPACES_SPEC = {
    "dim": 2,
    "kind": "halfspaces",
    "data": [[1, 0], [0, 1], [-1, 0], [0, -1]],
}

BUILTINS_2D = [
    "builtin:euclidean",
    "builtin:l1",
    "builtin:linf",
    "builtin:ellipsoid:1,0,4",
    "builtin:shifted:euclidean:0.3,0",
]

SUITE_CONFIG = {
    "seed": 0,
    "suites": ["example_sequence", "parallelogram", "equivalence"],
    "parallelogram_samples": 200,
    "example_n_max": 6,
    "example_m": 12,
}
"""quick suites for the command-line tests"""
