# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.
"""
Witnesses of Non-Coproximinality.

In the plane, a gauge that is not a norm has a chord [x0, x1] through 0
that is not an affine diameter of the unit ball. A longer parallel chord
[y0, y1] then exists, and the line K through x0, x1 has Q_K(y1) empty.

In three dimensions a line with an empty Q can be widened to a plane with
the same property by separating the line from the set of candidate
coapproximations, enlarged by a small ball.
"""
import logging
import math
import typing
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.spatial import ConvexHull, QhullError

from minkowski_coapprox.coapprox import (
    DEFAULT_TOL,
    CoapproxResult,
    CoapproxStatus,
    SearchBudget,
    ViolationSearch,
    coapprox_solve,
)
from minkowski_coapprox.flats import (
    Flat,
    LinearFunctional,
    flat_membership,
    flat_sample,
    hyperplane_from_functional,
    make_flat,
)
from minkowski_coapprox.gauge import (
    Gauge,
    PolytopeGauge,
    direction_sample,
    from_halfspaces,
    is_norm,
)
from minkowski_coapprox.solvers import lpsolve

logger = logging.getLogger(__name__)

WITNESS_TOL = 1e-8
"""tolerance on the sphere, segment and chord relations of a witness"""
MIN_LAMBDA = 1.0 + 1e-6

ANGLE_TOL = 1e-9
"""normal cones closer than this (radians) count as meeting"""
SAMPLED_ANGLE_TOL = 1e-6
"""the same, for gauges whose normals are only known pointwise"""

SAMPLED_CHORD_STEP = 8
"""smooth gauges try every 8th sample direction when sizing chords"""

PLATEAU_TOL = 1e-9
MAX_ENLARGEMENT = 64
MIN_FEASIBLE_SAMPLES = 10
FEASIBILITY_TOL = 1e-9
REJECTION_SAMPLES = 2000


class WitnessUndecided(RuntimeError):
    """The separating plane could not be certified within the limits"""


@dataclass(frozen=True, eq=False)
class Chord:
    """Chord [x0, x1] of the unit ball through 0"""

    x0: np.ndarray
    x1: np.ndarray
    approximate: bool = False
    """certified from pointwise normals rather than exact normal cones"""


@dataclass(frozen=True, eq=False)
class ChordWitness:
    """
    A chord through 0 with a strictly longer parallel chord.

    y1 - y0 = lam·(x1 - x0) with lam > 1, and Q is empty for ``target``
    (= y1) on the line ``flat`` through x0 and x1.
    """

    x0: np.ndarray
    x1: np.ndarray
    y0: np.ndarray
    y1: np.ndarray
    lam: float
    flat: Flat
    target: np.ndarray
    approximate: bool = False

    def to_dict(self) -> dict:
        """JSON form"""
        return {
            "x0": self.x0.tolist(),
            "x1": self.x1.tolist(),
            "y0": self.y0.tolist(),
            "y1": self.y1.tolist(),
            "lambda": self.lam,
            "flat": self.flat.to_dict(),
            "target": self.target.tolist(),
            "approximate": self.approximate,
        }


@dataclass
class WitnessVerification:
    """Outcome of each step of :py:func:`verify_witness`"""

    steps: typing.List[typing.Tuple[str, bool, str]] = field(
        default_factory=list
    )
    coapprox: typing.Optional[CoapproxResult] = None
    """solver outcome of the final step, when it ran"""

    @property
    def ok(self) -> bool:
        """Did every step pass?"""
        return bool(self.steps) and all(passed for _, passed, _ in self.steps)

    def __bool__(self):
        return self.ok

    def add(self, name: str, passed: bool, detail: str = ""):
        """Record a step"""
        self.steps.append((name, bool(passed), detail))
        if not passed:
            logger.info(f"witness check '{name}' failed: {detail}")

    def to_dict(self) -> dict:
        """JSON form"""
        return {
            "ok": self.ok,
            "steps": [
                {"name": name, "passed": passed, "detail": detail}
                for name, passed, detail in self.steps
            ],
            **(
                {"coapprox": self.coapprox.to_dict()}
                if self.coapprox is not None
                else {}
            ),
        }


@dataclass(frozen=True, eq=False)
class SeparationWitness:
    """A plane through a non-coproximinal line, found by separation"""

    functional: LinearFunctional
    hyperplane: Flat
    subspace: Flat
    y0: np.ndarray
    n0: int
    """the enlargement ball has radius 1/n0"""
    margin: float
    samples: np.ndarray
    """retained points of the candidate set, all with h <= -margin"""
    hyperplane_status: CoapproxStatus

    def to_dict(self) -> dict:
        """JSON form"""
        return {
            "h": self.functional.coeffs.tolist(),
            "hyperplane": self.hyperplane.to_dict(),
            "subspace": self.subspace.to_dict(),
            "y0": self.y0.tolist(),
            "n0": self.n0,
            "margin": self.margin,
            "sample_count": len(self.samples),
            "hyperplane_status": self.hyperplane_status.value,
        }


def _require_plane(g: Gauge):
    if g.dim != 2:
        raise ValueError(f"Chord witnesses live in 2D, not {g.dim}D")


def _is_polygon(g: Gauge) -> bool:
    return isinstance(g, PolytopeGauge) and g.vertices is not None


def _angles(vectors: np.ndarray) -> np.ndarray:
    return np.mod(np.arctan2(vectors[:, 1], vectors[:, 0]), 2 * np.pi)


def _orient(g: Gauge, directions: np.ndarray) -> np.ndarray:
    """Keep directions u with γ(u) <= γ(-u): x1 is the far endpoint"""
    forward = g.evaluate(directions)
    backward = g.evaluate(-directions)
    return directions[forward <= backward * (1.0 + 1e-12)]


def _candidate_directions(g: Gauge) -> np.ndarray:
    """
    Chord directions to scan.

    For polygons: the directions of the vertices of B and of -B, and the
    direction of the boundary midpoint between each consecutive pair. These
    move with any linear map applied to the body.
    """
    if not _is_polygon(g):
        return _orient(g, np.array(direction_sample(2)))
    events = np.vstack((g.vertices, -g.vertices))
    events = events / np.linalg.norm(events, axis=1)[:, np.newaxis]
    _, index = np.unique(np.round(_angles(events), 12), return_index=True)
    events = events[index]
    boundary = events / g.evaluate(events)[:, np.newaxis]
    midpoints = (boundary + np.roll(boundary, -1, axis=0)) / 2.0
    midpoints /= np.linalg.norm(midpoints, axis=1)[:, np.newaxis]
    return _orient(g, np.vstack((events, midpoints)))


def _chord(g: Gauge, direction: np.ndarray) -> typing.Tuple:
    return direction / g(direction), -direction / g(-direction)


def _normal_arc(normals: np.ndarray) -> typing.Tuple[float, float]:
    """(start angle, counter-clockwise width) of the cone of 2D normals"""
    angles = np.sort(_angles(np.atleast_2d(normals)))
    if len(angles) == 1:
        return float(angles[0]), 0.0
    gaps = np.diff(np.append(angles, angles[0] + 2 * np.pi))
    widest = int(np.argmax(gaps))
    return (
        float(angles[(widest + 1) % len(angles)]),
        float(2 * np.pi - gaps[widest]),
    )


def _arcs_meet(first, second, tol: float) -> bool:
    def inside(angle, arc):
        offset = math.fmod(angle - arc[0] + 4 * np.pi, 2 * np.pi)
        return offset <= arc[1] + tol or offset >= 2 * np.pi - tol

    return inside(second[0], first) or inside(first[0], second)


def _certify(g: Gauge, x0: np.ndarray, x1: np.ndarray) -> bool:
    """
    Is [x0, x1] not an affine diameter?

    Parallel supporting lines at both ends exist exactly when the normal
    cone at x1 meets the negated normal cone at x0.
    """
    if _is_polygon(g):
        arc1 = _normal_arc(g.active_normals(x1))
        arc0 = _normal_arc(-g.active_normals(x0))
        return not _arcs_meet(arc1, arc0, ANGLE_TOL)
    arc1 = _normal_arc(g.subgradient(x1))
    arc0 = _normal_arc(-g.subgradient(x0))
    return not _arcs_meet(arc1, arc0, SAMPLED_ANGLE_TOL)


def _certified_chords(g: Gauge) -> typing.Iterator[Chord]:
    approximate = not _is_polygon(g)
    for direction in _candidate_directions(g):
        x1, x0 = _chord(g, direction)
        if _certify(g, x0, x1):
            yield Chord(x0, x1, approximate)


def find_non_diameter_chord(g: Gauge) -> typing.Optional[Chord]:
    """
    The first chord through 0 that is not an affine diameter.

    :return: None when the gauge is a norm, where every such chord is one
    """
    _require_plane(g)
    if is_norm(g):
        return None
    chord = next(_certified_chords(g), None)
    if chord is None:
        logger.warning("asymmetric gauge but no certified chord found")
    return chord


def _min_unit_gauge(g: Gauge) -> float:
    return float(np.min(g.evaluate(direction_sample(g.dim))))


def chord_interval(
    g: Gauge, point, direction
) -> typing.Optional[typing.Tuple[float, float]]:
    """
    Parameters [t_lo, t_hi] of the segment {point + t·direction} ∩ B.

    :return: None if the line misses the unit ball
    """
    point = g.check_vector(point)
    direction = g.check_vector(direction)
    if isinstance(g, PolytopeGauge):
        slopes = g.normals @ direction
        room = 1.0 - g.normals @ point
        if np.any((np.abs(slopes) <= 1e-15) & (room < 0.0)):
            return None
        up = slopes > 1e-15
        down = slopes < -1e-15
        t_hi = float(np.min(room[up] / slopes[up])) if up.any() else np.inf
        t_lo = (
            float(np.max(room[down] / slopes[down])) if down.any() else -np.inf
        )
        return (t_lo, t_hi) if t_lo <= t_hi else None

    def excess(t):
        return g(point + t * direction) - 1.0

    # |point + t·direction| >= 2 / min γ(unit) makes the excess positive
    reach = (
        np.linalg.norm(point) + 2.0 / _min_unit_gauge(g)
    ) / np.linalg.norm(direction)
    lowest = minimize_scalar(
        excess,
        bounds=(-reach, reach),
        method="bounded",
        options={"xatol": 1e-12},
    )
    if lowest.fun > 0.0:
        return None
    if lowest.fun == 0.0:
        return float(lowest.x), float(lowest.x)
    return (
        brentq(excess, -reach, lowest.x, xtol=1e-14),
        brentq(excess, lowest.x, reach, xtol=1e-14),
    )


def _chord_length(g: Gauge, normal, unit, offset: float) -> float:
    interval = chord_interval(g, offset * normal, unit)
    return 0.0 if interval is None else interval[1] - interval[0]


def _longest_parallel_chord(
    g: Gauge, unit: np.ndarray
) -> typing.Tuple[float, float]:
    """
    (offset, length) of the longest chord parallel to ``unit``.

    Lines are {x : <n, x> = s} with n ⊥ unit. The length is concave in s,
    so a bounded golden-section search finds the maximum; when it is a
    plateau (parallel edges) the midpoint of the plateau is used.
    """
    normal = np.array([-unit[1], unit[0]])
    low, high = -g.support(-normal), g.support(normal)

    def length(s):
        return _chord_length(g, normal, unit, s)

    best = minimize_scalar(
        lambda s: -length(s),
        bounds=(low, high),
        method="bounded",
        options={"xatol": 1e-12},
    )
    peak = float(best.x)
    if length(0.0) > length(peak):
        peak = 0.0
    top = length(peak)
    level = top * (1.0 - PLATEAU_TOL)

    def short(s):
        return length(s) - level

    left = low if short(low) >= 0.0 else brentq(short, low, peak, xtol=1e-14)
    right = (
        high if short(high) >= 0.0 else brentq(short, peak, high, xtol=1e-14)
    )
    middle = (left + right) / 2.0
    return middle, length(middle)


def _assemble(g: Gauge, chord: Chord) -> ChordWitness:
    span = chord.x1 - chord.x0
    unit = span / np.linalg.norm(span)
    offset, length = _longest_parallel_chord(g, unit)
    normal = np.array([-unit[1], unit[0]])
    t_lo, t_hi = chord_interval(g, offset * normal, unit)
    y0 = offset * normal + t_lo * unit
    y1 = offset * normal + t_hi * unit
    return ChordWitness(
        chord.x0,
        chord.x1,
        y0,
        y1,
        float(length / np.linalg.norm(span)),
        make_flat(chord.x0, [span]),
        y1,
        chord.approximate,
    )


def construct_witness(g: Gauge) -> ChordWitness:
    """
    Build the chord witness of a planar gauge that is not a norm.

    Every certified chord is sized against its longest parallel chord and
    the one with the largest ratio is kept; that ratio does not change
    under linear maps, so neither does the choice.
    :raises ValueError: if the gauge is a norm
    :raises RuntimeError: if the best parallel chord is not longer
    """
    _require_plane(g)
    if is_norm(g):
        raise ValueError(
            "Gauge is a norm: every chord through 0 is a diameter"
        )
    chords = list(_certified_chords(g))
    if not _is_polygon(g):
        chords = chords[::SAMPLED_CHORD_STEP]
    best = None
    for chord in chords:
        witness = _assemble(g, chord)
        if best is None or witness.lam > best.lam * (1.0 + 1e-12):
            best = witness
    if best is None or best.lam < MIN_LAMBDA:
        raise RuntimeError(
            "No parallel chord is longer than a certified chord "
            f"(best ratio {None if best is None else best.lam})"
        )
    logger.info(f"chord witness with ratio {best.lam:.9f}")
    return best


def verify_witness(
    g: Gauge,
    witness: ChordWitness,
    tol: float = DEFAULT_TOL,
    budget: typing.Optional[SearchBudget] = None,
) -> WitnessVerification:
    """
    Re-check a chord witness step by step.

    The final step runs the coapproximation solver on (K, target) and
    expects an Empty certificate.
    """
    report = WitnessVerification()
    points = np.array([witness.x0, witness.x1, witness.y0, witness.y1])
    values = g.evaluate(points)
    report.add(
        "unit_sphere",
        np.all(np.abs(values - 1.0) <= WITNESS_TOL),
        f"gauge values {values.tolist()}",
    )

    span = witness.x1 - witness.x0
    length = float(np.linalg.norm(span))
    position = float(-witness.x0 @ span) / length**2
    miss = np.linalg.norm(witness.x0 + position * span)
    report.add(
        "origin_on_chord",
        -WITNESS_TOL <= position <= 1.0 + WITNESS_TOL and miss <= WITNESS_TOL,
        f"position {position}, distance {miss}",
    )

    gap = np.linalg.norm(witness.y1 - witness.y0 - witness.lam * span)
    report.add(
        "parallel_longer",
        witness.lam >= MIN_LAMBDA and gap <= WITNESS_TOL,
        f"lambda {witness.lam}, mismatch {gap}",
    )

    unit = span / length
    interval = chord_interval(g, np.zeros(2), unit)
    along = (float(witness.x0 @ unit), float(witness.x1 @ unit))
    report.add(
        "section_is_chord",
        interval is not None
        and abs(interval[0] - along[0]) <= WITNESS_TOL
        and abs(interval[1] - along[1]) <= WITNESS_TOL,
        f"line meets the ball on {interval}, chord is {along}",
    )

    # [x0, x1] + (y1 - y0) along the line
    shift = float((witness.y1 - witness.y0) @ unit)
    report.add(
        "translate_disjoint",
        along[0] + shift > along[1] + WITNESS_TOL,
        f"translated start {along[0] + shift}, chord end {along[1]}",
    )

    if report.ok:
        result = coapprox_solve(g, witness.flat, witness.target, tol, budget)
        report.coapprox = result
        report.add(
            "coapprox_empty",
            result.status == CoapproxStatus.EMPTY,
            f"status {result.status.value}, "
            f"lower bound {result.emptiness_lower_bound}",
        )
    return report


def product_with_interval(g2: Gauge) -> PolytopeGauge:
    """3D gauge whose unit ball is (planar ball) × [-1, 1]"""
    _require_plane(g2)
    if not isinstance(g2, PolytopeGauge):
        raise ValueError("Only polygonal gauges extend to a product gauge")
    lifted = np.column_stack((g2.normals, np.zeros(len(g2.normals))))
    return from_halfspaces(
        np.vstack((lifted, [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]))
    )


def embed_chord_witness(
    witness: ChordWitness,
) -> typing.Tuple[Flat, np.ndarray]:
    """The witness line and target of a planar witness, at height 0 in 3D"""
    span = witness.x1 - witness.x0
    return (
        make_flat(np.append(witness.x0, 0.0), [np.append(span, 0.0)]),
        np.append(witness.target, 0.0),
    )


def _ray_extent(feasible_excess, start: np.ndarray, direction) -> float:
    """Largest s with start + s·direction still feasible"""
    high = 1.0
    for _ in range(60):
        if feasible_excess(start + high * direction) > 0.0:
            break
        high *= 2.0
    else:
        raise WitnessUndecided("Candidate set is unbounded")
    return brentq(
        lambda s: feasible_excess(start + s * direction), 0.0, high, xtol=1e-12
    )


def _candidate_set(
    g: Gauge, subspace: Flat, y0: np.ndarray, budget: SearchBudget
) -> np.ndarray:
    """
    Points of ⋂ B[z, γ(y0 - z)] over a finite set of z in the subspace.

    The set is traced by boundary points along the sample directions from
    y0, then filled with uniform rejection samples from their bounding box.
    """
    search = ViolationSearch(g, subspace, y0, budget)
    radius = search.radius(y0)
    far = [
        subspace.base + sign * scale * radius * subspace.basis[0]
        for sign in (1.0, -1.0)
        for scale in (10.0, 100.0, 1000.0)
    ]
    z = np.vstack(
        (
            search.candidates,
            flat_sample(subspace, radius, 129, budget.seed),
            far,
        )
    )
    budgets = g.evaluate(y0 - z)

    def excess(x):
        return float(np.max(g.evaluate(x - z) - budgets)) - FEASIBILITY_TOL

    boundary = np.array(
        [
            y0 + _ray_extent(excess, y0, direction) * direction
            for direction in direction_sample(3)
        ]
    )
    rng = np.random.default_rng(budget.seed)
    box = rng.uniform(
        boundary.min(axis=0), boundary.max(axis=0), (REJECTION_SAMPLES, 3)
    )
    inside = np.array([excess(x) <= 0.0 for x in box], dtype=bool)
    samples = np.vstack((y0, boundary, box[inside]))
    if len(samples) < MIN_FEASIBLE_SAMPLES:
        raise WitnessUndecided(
            f"Only {len(samples)} feasible points in the candidate set"
        )
    try:
        samples = samples[ConvexHull(samples).vertices]
    except QhullError:
        logger.debug("candidate samples are flat, keeping all of them")
    return samples


def _distance_to_hull(
    g: PolytopeGauge, subspace: Flat, samples: np.ndarray
) -> float:
    """min γ(x - c) over x in the subspace and c in conv(samples)"""
    normals = g.normals
    count = len(samples)
    # variables: t, weights (count), s
    rows = np.hstack(
        (
            (normals @ subspace.basis[0])[:, np.newaxis],
            -normals @ samples.T,
            -np.ones((len(normals), 1)),
        )
    )
    c = np.zeros(count + 2)
    c[-1] = 1.0
    result = lpsolve(
        c,
        rows,
        -normals @ subspace.base,
        a_eq=np.concatenate(([0.0], np.ones(count), [0.0]))[np.newaxis, :],
        b_eq=[1.0],
        bounds=[(None, None)] + [(0.0, None)] * count + [(None, None)],
    )
    if result.status != 0:
        raise RuntimeError(f"Distance LP failed: {result.message}")
    return float(result.fun)


def _separate(
    subspace: Flat, samples: np.ndarray, ball: np.ndarray, n0: int
) -> typing.Tuple[np.ndarray, float]:
    """
    h with h = 0 on the subspace and h <= -margin on samples + ball / n0.

    Maximises the margin over -1 <= h_i <= 1.
    """
    enlarged = samples[:, np.newaxis, :] + ball[np.newaxis, :, :] / n0
    enlarged = enlarged.reshape(-1, 3)
    rows = np.column_stack((enlarged, np.ones(len(enlarged))))
    c = np.array([0.0, 0.0, 0.0, -1.0])
    result = lpsolve(
        c,
        rows,
        np.zeros(len(rows)),
        a_eq=np.append(subspace.basis[0], 0.0)[np.newaxis, :],
        b_eq=[0.0],
        bounds=[(-1.0, 1.0)] * 3 + [(None, None)],
    )
    if result.status != 0:
        raise RuntimeError(f"Separation LP failed: {result.message}")
    return result.x[:3], float(result.x[3])


def extend_to_hyperplane(
    g: Gauge,
    subspace: Flat,
    y0,
    tol: float = DEFAULT_TOL,
    budget: typing.Optional[SearchBudget] = None,
) -> SeparationWitness:
    """
    Widen a non-coproximinal line through 0 in 3D to such a plane.

    The candidate set C is sampled, enlarged by the γ-ball of radius 1/n0
    for the smallest n0 keeping it off the line, and separated from the
    line by a functional h. The plane is the kernel of h; its own Q is
    audited and any disagreement is logged.
    :raises ValueError: if the preconditions fail (3D polytopal gauge, a
      line through 0, Q empty)
    :raises WitnessUndecided: if no n0 <= 64 works or nothing separates
    """
    budget = budget or SearchBudget()
    if g.dim != 3 or not isinstance(g, PolytopeGauge):
        raise ValueError("Separation needs a polytopal gauge in 3D")
    y0 = g.check_vector(y0)
    if subspace.dim != 3 or subspace.rank != 1:
        raise ValueError("Separation starts from a line in 3D")
    if not flat_membership(subspace, np.zeros(3)):
        raise ValueError("The line must pass through 0")
    result = coapprox_solve(g, subspace, y0, tol, budget)
    if result.status != CoapproxStatus.EMPTY:
        raise ValueError(
            f"Q is not certified empty on the line (status "
            f"{result.status.value})"
        )

    samples = _candidate_set(g, subspace, y0, budget)
    distance = _distance_to_hull(g, subspace, samples)
    if distance <= 0.0:
        raise WitnessUndecided("Candidate samples touch the line")
    n0 = int(math.floor(1.0 / distance)) + 1
    if n0 > MAX_ENLARGEMENT:
        raise WitnessUndecided(
            f"Enlargement index {n0} exceeds {MAX_ENLARGEMENT} "
            f"(distance {distance:.3e})"
        )
    h, margin = _separate(subspace, samples, g.vertices, n0)
    if margin <= 1e-12:
        raise WitnessUndecided(f"No separating functional (margin {margin})")

    functional = LinearFunctional(h)
    plane = hyperplane_from_functional(functional)
    audit = coapprox_solve(g, plane, y0, tol, budget)
    if audit.status != CoapproxStatus.EMPTY:
        logger.warning(
            f"separating plane has Q {audit.status.value}, not empty"
        )
    logger.info(f"separating plane with n0={n0}, margin {margin:.3e}")
    return SeparationWitness(
        functional,
        plane,
        subspace,
        y0,
        n0,
        margin,
        samples,
        audit.status,
    )
