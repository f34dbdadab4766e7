# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.
"""
Linear Program Helper Functions
"""
import logging
import typing

import numpy as np
from scipy.optimize import OptimizeResult, linprog

logger = logging.getLogger(__name__)

LP_METHOD = "highs-ds"
"""dual simplex returns vertex solutions, which keeps tie-breaking stable"""

LP_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}

Bounds = typing.Sequence[typing.Tuple[typing.Optional[float], ...]]


def lpsolve(
    c: np.ndarray,
    a_ub: typing.Optional[np.ndarray] = None,
    b_ub: typing.Optional[np.ndarray] = None,
    a_eq: typing.Optional[np.ndarray] = None,
    b_eq: typing.Optional[np.ndarray] = None,
    bounds: typing.Optional[Bounds] = None,
) -> OptimizeResult:
    """
    Minimise c·x subject to a_ub·x <= b_ub and a_eq·x = b_eq.

    :param bounds: per-variable (low, high), ``None`` meaning unbounded.
      Default: every variable free.
    :return: scipy result; ``result.status`` is 0 on success
    """
    c = np.asarray(c, dtype=float)
    if bounds is None:
        bounds = [(None, None)] * c.size
    result = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=bounds,
        method=LP_METHOD,
        options=LP_OPTIONS,
    )
    if result.status not in (0, 2):
        # 2 (infeasible) is a legitimate answer for feasibility tests
        logger.debug(
            f"LP finished with status {result.status}: {result.message}"
        )
    return result


def lpsolve_checked(*args, **kwargs) -> np.ndarray:
    """
    As :py:func:`lpsolve`, but only the optimal point is returned.

    :raises RuntimeError: if the LP is not solved to optimality
    """
    result = lpsolve(*args, **kwargs)
    if result.status != 0:
        raise RuntimeError(f"Linear program failed: {result.message}")
    return result.x


def lexicographic_min(
    c: np.ndarray,
    a_ub: np.ndarray,
    b_ub: np.ndarray,
    order: typing.Sequence[int],
    bounds: typing.Optional[Bounds] = None,
    slack: float = 1e-12,
) -> np.ndarray:
    """
    Optimal point of min c·x with ties broken lexicographically.

    After the main objective, each variable in ``order`` is minimised in
    turn while the previous optima are held (within ``slack``).
    :param order: indices of the variables that take part in tie-breaking
    :return: the lexicographically smallest optimal point found
    """
    c = np.asarray(c, dtype=float)
    a_ub = np.asarray(a_ub, dtype=float)
    b_ub = np.asarray(b_ub, dtype=float)
    best = lpsolve_checked(c, a_ub, b_ub, bounds=bounds)
    rows = [a_ub]
    rhs = [b_ub]
    objective = c
    value = float(c @ best)
    for index in order:
        rows.append(objective[np.newaxis, :])
        rhs.append(np.array([value + slack * (1.0 + abs(value))]))
        objective = np.zeros_like(c)
        objective[index] = 1.0
        result = lpsolve(
            objective, np.vstack(rows), np.concatenate(rhs), bounds=bounds
        )
        if result.status != 0:
            # keep the last good point rather than fail the whole solve
            break
        best = result.x
        value = float(best[index])
    return best
