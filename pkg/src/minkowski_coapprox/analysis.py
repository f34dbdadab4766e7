# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.
"""
Verification Suites.

Each suite draws seeded random instances, runs them through the solvers
and records every case that breaks the predicted outcome. Reports are
deterministic for a given configuration: wall time is kept out of the JSON
unless asked for.
"""
import dataclasses
import json
import logging
import time
import typing
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from minkowski_coapprox.coapprox import (
    DEFAULT_TOL,
    CoapproxStatus,
    SearchBudget,
    audit_violation,
    coapprox_solve,
    section_problem,
    violation,
)
from minkowski_coapprox.flats import Flat, make_flat
from minkowski_coapprox.gauge import (
    Gauge,
    ellipsoid,
    equivalence_constants,
    euclidean,
    from_vertices,
    is_norm,
    lp_gauge,
    sym_norm_gauge,
)
from minkowski_coapprox.witness import (
    construct_witness,
    embed_chord_witness,
    extend_to_hyperplane,
    product_with_interval,
    verify_witness,
)

logger = logging.getLogger(__name__)

INNER_PRODUCT_TOL = 1e-8
"""parallelogram defect below which a norm counts as an inner product"""
PERTURBATION = 1e-2
WITNESS_MATCH_TOL = 1e-6

TRIANGLE = ((1.0, 0.0), (0.0, 1.0), (-1.0, -1.0))

CORE_SUITES = (
    "symmetric_lines",
    "asymmetric_witness",
    "hyperplane_extension",
    "planes_3d",
)
EXTRA_SUITES = (
    "example_sequence",
    "parallelogram",
    "projection",
    "reduction",
    "equivalence",
)
ALL_SUITES = CORE_SUITES + EXTRA_SUITES


@dataclass
class SuiteReport:
    """Cases run, failing cases (with inputs) and worst margins of a suite"""

    name: str
    cases: int = 0
    failures: typing.List[dict] = field(default_factory=list)
    margins: typing.Dict[str, float] = field(default_factory=dict)
    rows: typing.List[dict] = field(default_factory=list)
    notes: typing.List[str] = field(default_factory=list)
    inconclusive: bool = False
    wall_time: float = 0.0
    suites: typing.List["SuiteReport"] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """No failures here or in any sub-suite"""
        return not self.failures and all(s.passed for s in self.suites)

    def record(self, ok: bool, case: dict):
        """Count a case, keeping its inputs if it failed"""
        self.cases += 1
        if not ok:
            self.failures.append(case)

    def worst(self, name: str, value: float, smallest: bool = True):
        """Track the smallest (or largest) value seen for a margin"""
        value = float(value)
        if name not in self.margins:
            self.margins[name] = value
        elif smallest:
            self.margins[name] = min(self.margins[name], value)
        else:
            self.margins[name] = max(self.margins[name], value)

    def to_dict(self, include_time: bool = False) -> dict:
        """JSON form; byte-stable unless ``include_time``"""
        result = {
            "suite": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "failures": self.failures,
            "margins": self.margins,
        }
        if self.rows:
            result["rows"] = self.rows
        if self.notes:
            result["notes"] = self.notes
        if self.inconclusive:
            result["inconclusive"] = True
        if include_time:
            result["wall_time"] = self.wall_time
        if self.suites:
            result["suites"] = [
                s.to_dict(include_time=include_time) for s in self.suites
            ]
        return result

    def to_json(self, include_time: bool = False) -> str:
        """Indented JSON text"""
        return json.dumps(self.to_dict(include_time), indent=2) + "\n"


@dataclass(frozen=True)
class SuiteConfig:
    """What :py:func:`verify_theorems` runs, and how much of it"""

    seed: int = 0
    tol: float = DEFAULT_TOL
    suites: typing.Tuple[str, ...] = ALL_SUITES
    symmetric_polygons: int = 20
    lines_per_polygon: int = 50
    asymmetric_polygons: int = 20
    product_gauges: int = 1
    """the triangle first, then random asymmetric polygons"""
    planes: int = 30
    linf_draws: int = 500
    projection_trials: int = 100
    reduction_trials: int = 20
    parallelogram_samples: int = 1000
    example_n_max: int = 10
    example_m: int = 30
    audit_samples: int = 10_000
    max_rounds: int = 200
    max_grid_evals: int = 64**3
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "suites", tuple(self.suites))
        unknown = sorted(set(self.suites) - set(ALL_SUITES))
        if unknown:
            raise ValueError(
                f"Unknown suite(s) {unknown}, choose from {list(ALL_SUITES)}"
            )
        if self.tol <= 0:
            raise ValueError(f"Tolerance must be positive, not {self.tol}")

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        """
        :raises ValueError: on fields that SuiteConfig does not have
        """
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ValueError(f"Unknown suite config field(s) {unknown}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str) -> "SuiteConfig":
        """Load from a JSON file"""
        with open(path, encoding="utf-8") as config_file:
            try:
                data = json.load(config_file)
            except json.JSONDecodeError as err:
                raise ValueError(
                    f"{path}: line {err.lineno} column {err.colno}: {err.msg}"
                ) from err
        if not isinstance(data, dict):
            raise ValueError(f"{path}: expected a JSON object")
        return cls.from_dict(data)

    def budget(self) -> SearchBudget:
        """Solver budget for the suites"""
        return SearchBudget(
            max_grid_evals=self.max_grid_evals,
            max_rounds=self.max_rounds,
            audit_samples=self.audit_samples,
            seed=self.seed,
        )


@dataclass(frozen=True)
class TruncatedSequence:
    """Finitely many leading entries of a sequence that is 0 afterwards"""

    entries: typing.Tuple[Fraction, ...]

    def __neg__(self) -> "TruncatedSequence":
        return TruncatedSequence(tuple(-e for e in self.entries))

    def __sub__(self, other: "TruncatedSequence") -> "TruncatedSequence":
        size = max(len(self.entries), len(other.entries))
        left = self.entries + (Fraction(0),) * (size - len(self.entries))
        right = other.entries + (Fraction(0),) * (size - len(other.entries))
        return TruncatedSequence(tuple(a - b for a, b in zip(left, right)))


def l1_gauge_eval(s: TruncatedSequence) -> Fraction:
    """max{sup |ξ_i|, Σ ξ_i}, exact for rational entries"""
    if not s.entries:
        return Fraction(0)
    return max(max(abs(e) for e in s.entries), sum(s.entries, Fraction(0)))


def constant_sequence(n: int) -> TruncatedSequence:
    """(1/n, ..., 1/n) with n entries"""
    if n < 1:
        raise ValueError(f"n must be at least 1, not {n}")
    return TruncatedSequence((Fraction(1, n),) * n)


def geometric_sequence(m: int) -> TruncatedSequence:
    """(1, 1/2, ..., 1/2^(m-1))"""
    if m < 1:
        raise ValueError(f"m must be at least 1, not {m}")
    return TruncatedSequence(tuple(Fraction(1, 2**i) for i in range(m)))


def l1_example_check(n_max: int, m: int) -> SuiteReport:
    """
    The constant sequences x_n stay on the unit sphere, -x_n shrinks like
    1/n and x0 - x_n stays in the unit ball, while the geometric x0 is at
    gauge 2 - 2^(1-m), outside the ball.

    One margin row per n, values exact and reported as floats.
    """
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, not {n_max}")
    if m < n_max:
        raise ValueError(f"m ({m}) must be at least n_max ({n_max})")
    report = SuiteReport("example_sequence")
    x0 = geometric_sequence(m)
    tail = Fraction(2, 2**m)
    x0_value = l1_gauge_eval(x0)
    report.record(
        x0_value == 2 - tail,
        {"check": "gauge(x0)", "m": m, "value": str(x0_value)},
    )
    report.worst("x0_excess", x0_value - 1)
    for n in range(1, n_max + 1):
        xn = constant_sequence(n)
        forward = l1_gauge_eval(xn)
        backward = l1_gauge_eval(-xn)
        distance = l1_gauge_eval(x0 - xn)
        ok = forward == 1 and backward == Fraction(1, n) and distance <= 1
        report.record(
            ok,
            {
                "n": n,
                "m": m,
                "gauge_xn": str(forward),
                "gauge_neg_xn": str(backward),
                "gauge_x0_minus_xn": str(distance),
            },
        )
        report.worst("distance_margin", 1 - distance)
        report.rows.append(
            {
                "n": n,
                "gauge_xn": float(forward),
                "gauge_neg_xn": float(backward),
                "gauge_x0_minus_xn": float(distance),
                "margin": float(1 - distance),
                "tail_bound": float(tail),
            }
        )
    report.notes.append(
        "finite truncations only; the untruncated limit x0 has gauge 2"
    )
    return report


def _pair_sample(dim: int, count: int, seed: int):
    eye = np.eye(dim)
    firsts = [eye[i] for i in range(dim) for j in range(dim) if i != j]
    seconds = [eye[j] for i in range(dim) for j in range(dim) if i != j]
    # diagonals against each other
    firsts += [eye[i] + eye[j] for i in range(dim) for j in range(i + 1, dim)]
    seconds += [eye[i] - eye[j] for i in range(dim) for j in range(i + 1, dim)]
    rng = np.random.default_rng(seed)
    u = np.vstack(firsts + [rng.standard_normal((count, dim))])
    v = np.vstack(seconds + [rng.standard_normal((count, dim))])
    return u, v


def parallelogram_defect(
    g: Gauge, sample_count: int = 1000, seed: int = 0
) -> float:
    """
    max |‖u+v‖² + ‖u-v‖² - 2‖u‖² - 2‖v‖²| over axis, diagonal and seeded
    random pairs.

    :raises ValueError: if the gauge is not a norm
    """
    if not is_norm(g):
        raise ValueError("The parallelogram law applies to norms only")
    u, v = _pair_sample(g.dim, sample_count, seed)
    defect = (
        g.evaluate(u + v) ** 2
        + g.evaluate(u - v) ** 2
        - 2 * g.evaluate(u) ** 2
        - 2 * g.evaluate(v) ** 2
    )
    return float(np.max(np.abs(defect)))


def gram_matrix(g: Gauge) -> np.ndarray:
    """<e_i, e_j> recovered from an inner-product norm by polarisation"""
    eye = np.eye(g.dim)
    plus = g.evaluate((eye[:, np.newaxis, :] + eye).reshape(-1, g.dim))
    minus = g.evaluate((eye[:, np.newaxis, :] - eye).reshape(-1, g.dim))
    return ((plus**2 - minus**2) / 4.0).reshape(g.dim, g.dim)


def inner_product_projection(
    gram: np.ndarray, flat: Flat, y: np.ndarray
) -> np.ndarray:
    """The point x of the flat with y - x orthogonal to it under ``gram``"""
    basis = flat.basis
    params = np.linalg.solve(
        basis @ gram @ basis.T, basis @ gram @ (y - flat.base)
    )
    return flat.point(params)


def random_flat(rng: np.random.Generator, dim: int, rank: int) -> Flat:
    """Gaussian base point and directions"""
    while True:
        try:
            return make_flat(
                rng.standard_normal(dim), rng.standard_normal((rank, dim))
            )
        except ValueError:
            continue


def _polygon_angles(rng: np.random.Generator, count: int) -> np.ndarray:
    """Roughly evenly spread angles around the circle"""
    spacing = 2 * np.pi / count
    jitter = rng.uniform(-0.4, 0.4, count) * spacing
    return np.arange(count) * spacing + jitter + rng.uniform(0, 2 * np.pi)


def random_symmetric_polygon(rng: np.random.Generator) -> Gauge:
    """Centrally symmetric polygon with 6 to 12 vertices"""
    half = int(rng.integers(3, 7))
    angles = _polygon_angles(rng, 2 * half)[:half]
    radii = rng.uniform(0.5, 1.5, half)
    points = np.column_stack((np.cos(angles), np.sin(angles))) * radii[
        :, np.newaxis
    ]
    return from_vertices(np.vstack((points, -points)))


def random_polytope_3d(rng: np.random.Generator) -> Gauge:
    """Hull of 12 random directions with random lengths in [0.5, 1.5]"""
    while True:
        vertices = rng.standard_normal((12, 3))
        vertices /= np.linalg.norm(vertices, axis=1)[:, np.newaxis]
        try:
            return from_vertices(vertices * rng.uniform(0.5, 1.5, (12, 1)))
        except ValueError:
            # 0 not interior to the hull
            continue


def random_asymmetric_polygon(rng: np.random.Generator) -> Gauge:
    """Polygon with 3 to 8 vertices that is not centrally symmetric"""
    while True:
        count = int(rng.integers(3, 9))
        angles = _polygon_angles(rng, count)
        radii = rng.uniform(0.5, 1.5, count)
        points = np.column_stack((np.cos(angles), np.sin(angles)))
        try:
            g = from_vertices(points * radii[:, np.newaxis])
        except ValueError:
            continue
        if not is_norm(g):
            return g


def _case(g: Gauge, flat: Flat, y: np.ndarray, **extra) -> dict:
    try:
        spec = g.to_spec()
    except ValueError:
        spec = repr(g)
    return {"gauge": spec, "flat": flat.to_dict(), "y": y.tolist(), **extra}


def projection_coapprox_check(
    g: Gauge,
    trials: int = 100,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    budget: typing.Optional[SearchBudget] = None,
) -> SuiteReport:
    """
    For an inner-product norm, the coapproximation of y on a flat is the
    orthogonal projection: the projection passes the violation audit and
    matches the solver's witness, and moving it along the flat by 1e-2
    makes the violation positive.

    :raises ValueError: if the gauge is not an inner-product norm
    """
    defect = parallelogram_defect(g, seed=seed)
    if defect > INNER_PRODUCT_TOL:
        raise ValueError(
            f"Not an inner-product norm (parallelogram defect {defect:.3g})"
        )
    budget = budget or SearchBudget(seed=seed)
    gram = gram_matrix(g)
    rng = np.random.default_rng(seed)
    report = SuiteReport(f"projection_{g.dim}d")
    for _ in range(trials):
        rank = int(rng.integers(1, g.dim))
        flat = random_flat(rng, g.dim, rank)
        y = 2.0 * rng.standard_normal(g.dim)
        x = inner_product_projection(gram, flat, y)
        result = coapprox_solve(g, flat, y, tol, budget)
        audited = audit_violation(
            g, flat, y, x, budget.audit_samples, budget.seed
        )
        moved = x + PERTURBATION * flat.basis[0]
        perturbed = violation(g, flat, y, moved, budget)[0]
        distance = None
        if result.witness is not None:
            distance = float(np.linalg.norm(result.witness - x))
            report.worst("witness_distance", distance, smallest=False)
        ok = (
            result.status == CoapproxStatus.NON_EMPTY
            and distance is not None
            and distance <= WITNESS_MATCH_TOL
            and audited <= tol
            and perturbed > tol
        )
        report.record(
            ok,
            _case(
                g,
                flat,
                y,
                projection=x.tolist(),
                status=result.status.value,
                witness_distance=distance,
                audited=audited,
                perturbed=perturbed,
            ),
        )
        report.worst("projection_violation", audited, smallest=False)
        report.worst("perturbed_violation", perturbed)
    return report


def reduction_check(
    g: Gauge,
    trials: int = 20,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    budget: typing.Optional[SearchBudget] = None,
) -> SuiteReport:
    """
    A line problem in 3D and its restriction to lin(K ∪ {y}) have the same
    status, and an embedded section witness passes the 3D violation check.

    Q_K(y) may be a segment, so the two witnesses need not coincide; their
    distance is reported as a margin only.
    """
    if g.dim != 3:
        raise ValueError(f"Reduction check runs in 3D, not {g.dim}D")
    budget = budget or SearchBudget(seed=seed)
    rng = np.random.default_rng(seed)
    report = SuiteReport("reduction")
    for _ in range(trials):
        flat = random_flat(rng, 3, 1)
        y = 2.0 * rng.standard_normal(3)
        full = coapprox_solve(g, flat, y, tol, budget)
        g_section, flat_section, y_section, basis = section_problem(
            g, flat, y
        )
        section = coapprox_solve(
            g_section, flat_section, y_section, tol, budget
        )
        ok = full.status == section.status
        distance = 0.0
        embedded = None
        if full.witness is not None and section.witness is not None:
            lifted = basis @ section.witness
            distance = float(np.linalg.norm(lifted - full.witness))
            embedded = violation(g, flat, y, lifted, budget)[0]
            ok = ok and embedded <= tol
        report.record(
            ok,
            _case(
                g,
                flat,
                y,
                status=full.status.value,
                section_status=section.status.value,
                embedded_violation=embedded,
            ),
        )
        report.worst("witness_distance", distance, smallest=False)
        if embedded is not None:
            report.worst("embedded_violation", embedded, smallest=False)
    return report


def equivalence_check(
    gauges: typing.Sequence[typing.Tuple[str, Gauge]],
    samples: int = 1000,
    seed: int = 0,
) -> SuiteReport:
    """
    Each gauge against its symmetrized norm: c0 is 1, c1 is finite, and
    c0·γ <= max{γ, γ^∨} <= c1·γ holds on seeded samples.
    """
    report = SuiteReport("equivalence")
    rng = np.random.default_rng(seed)
    for name, g in gauges:
        norm = sym_norm_gauge(g)
        constants = equivalence_constants(g, norm)
        points = rng.standard_normal((samples, g.dim))
        ratio = norm.evaluate(points) / g.evaluate(points)
        slack = 1e-3 if constants.approximate else 1e-9
        ok = (
            abs(constants.c0 - 1.0) <= slack
            and np.isfinite(constants.c1)
            and np.all(ratio >= constants.c0 * (1.0 - slack))
            and np.all(ratio <= constants.c1 * (1.0 + slack))
        )
        report.record(
            ok,
            {
                "gauge": name,
                "c0": constants.c0,
                "c1": constants.c1,
                "approximate": constants.approximate,
            },
        )
        report.rows.append(
            {
                "gauge": name,
                "c0": constants.c0,
                "c1": constants.c1,
                "approximate": constants.approximate,
            }
        )
        report.worst("largest_c1", constants.c1, smallest=False)
    return report


def _symmetric_lines(config: SuiteConfig, seed: int) -> SuiteReport:
    """Every line is coproximinal under a symmetric polygon"""
    rng = np.random.default_rng(seed)
    budget = config.budget()
    report = SuiteReport("symmetric_lines")
    for _ in range(config.symmetric_polygons):
        g = random_symmetric_polygon(rng)
        for _ in range(config.lines_per_polygon):
            flat = random_flat(rng, 2, 1)
            y = 2.0 * rng.standard_normal(2)
            result = coapprox_solve(g, flat, y, config.tol, budget)
            if result.witness is None:
                report.record(
                    False, _case(g, flat, y, status=result.status.value)
                )
                continue
            audited = audit_violation(
                g, flat, y, result.witness, config.audit_samples, seed
            )
            report.record(
                audited <= config.tol,
                _case(g, flat, y, status="nonempty", audited=audited),
            )
            report.worst("audited_violation", audited, smallest=False)
    return report


def _asymmetric_witness(config: SuiteConfig, seed: int) -> SuiteReport:
    """Every asymmetric polygon has a verified chord witness"""
    rng = np.random.default_rng(seed)
    budget = config.budget()
    report = SuiteReport("asymmetric_witness")
    for _ in range(config.asymmetric_polygons):
        g = random_asymmetric_polygon(rng)
        case = {"gauge": g.to_spec()}
        try:
            witness = construct_witness(g)
        except (ValueError, RuntimeError) as err:
            report.record(False, {**case, "error": str(err)})
            continue
        checked = verify_witness(g, witness, config.tol, budget)
        bound = (
            None
            if checked.coapprox is None
            else checked.coapprox.emptiness_lower_bound
        )
        ok = checked.ok and bound is not None and bound >= 2 * config.tol
        report.record(ok, {**case, "witness": witness.to_dict()})
        report.worst("lambda", witness.lam)
        if bound is not None:
            report.worst("lower_bound", bound)
    return report


def _hyperplane_extension(config: SuiteConfig, seed: int) -> SuiteReport:
    """Witness lines of product gauges widen to non-coproximinal planes"""
    rng = np.random.default_rng(seed)
    budget = config.budget()
    report = SuiteReport("hyperplane_extension")
    planar = [from_vertices(np.array(TRIANGLE))]
    while len(planar) < config.product_gauges:
        planar.append(random_asymmetric_polygon(rng))
    for g2 in planar[: config.product_gauges]:
        g = product_with_interval(g2)
        case = {"gauge": g.to_spec()}
        try:
            line, target = embed_chord_witness(construct_witness(g2))
            separation = extend_to_hyperplane(
                g, line, target, config.tol, budget
            )
        except (ValueError, RuntimeError) as err:
            report.record(False, {**case, "error": str(err)})
            continue
        ok = separation.hyperplane_status == CoapproxStatus.EMPTY
        report.record(ok, {**case, "separation": separation.to_dict()})
        report.worst("margin", separation.margin)
        report.worst("n0", separation.n0, smallest=False)
    return report


def _planes_3d(config: SuiteConfig, seed: int) -> SuiteReport:
    """
    Planes are coproximinal under inner-product norms; under the maximum
    norm a random search turns up an empty one.
    """
    rng = np.random.default_rng(seed)
    budget = config.budget()
    report = SuiteReport("planes_3d")
    for g in (euclidean(3), ellipsoid(np.diag([1.0, 4.0, 9.0]))):
        for _ in range(config.planes):
            flat = random_flat(rng, 3, 2)
            y = 2.0 * rng.standard_normal(3)
            result = coapprox_solve(g, flat, y, config.tol, budget)
            report.record(
                result.status == CoapproxStatus.NON_EMPTY,
                _case(g, flat, y, status=result.status.value),
            )
    g = lp_gauge("inf", 3)
    for draw in range(1, config.linf_draws + 1):
        flat = random_flat(rng, 3, 2)
        y = 2.0 * rng.standard_normal(3)
        result = coapprox_solve(g, flat, y, config.tol, budget)
        if result.status == CoapproxStatus.EMPTY:
            report.notes.append(f"maximum norm: empty plane at draw {draw}")
            report.rows.append(
                _case(
                    g,
                    flat,
                    y,
                    draw=draw,
                    lower_bound=result.emptiness_lower_bound,
                )
            )
            break
    else:
        report.inconclusive = True
        report.notes.append(
            f"maximum norm: no empty plane in {config.linf_draws} draws "
            "(inconclusive, not a failure)"
        )
        logger.warning(report.notes[-1])
    return report


def _example_sequence(config: SuiteConfig, seed: int) -> SuiteReport:
    return l1_example_check(config.example_n_max, config.example_m)


def _parallelogram(config: SuiteConfig, seed: int) -> SuiteReport:
    """Defect is 0 for inner products and clearly positive otherwise"""
    report = SuiteReport("parallelogram")
    expectations = (
        ("euclidean_2d", euclidean(2), True),
        ("euclidean_3d", euclidean(3), True),
        ("ellipsoid_2d", ellipsoid(np.diag([1.0, 4.0])), True),
        ("l1_2d", lp_gauge(1, 2), False),
        ("linf_2d", lp_gauge("inf", 2), False),
    )
    for name, g, inner in expectations:
        defect = parallelogram_defect(g, config.parallelogram_samples, seed)
        ok = defect <= INNER_PRODUCT_TOL if inner else defect >= 0.1
        report.record(ok, {"gauge": name, "defect": defect})
        report.rows.append({"gauge": name, "defect": defect})
    return report


def _projection(config: SuiteConfig, seed: int) -> SuiteReport:
    report = SuiteReport("projection")
    for offset, g in enumerate(
        (
            euclidean(2),
            euclidean(3),
            ellipsoid(np.diag([1.0, 4.0])),
            ellipsoid(np.diag([1.0, 4.0, 9.0])),
        )
    ):
        report.suites.append(
            projection_coapprox_check(
                g,
                config.projection_trials,
                seed + offset,
                config.tol,
                config.budget(),
            )
        )
    return report


def _reduction(config: SuiteConfig, seed: int) -> SuiteReport:
    g = random_polytope_3d(np.random.default_rng(seed))
    return reduction_check(
        g, config.reduction_trials, seed, config.tol, config.budget()
    )


def _equivalence(config: SuiteConfig, seed: int) -> SuiteReport:
    rng = np.random.default_rng(seed)
    gauges = [
        ("triangle", from_vertices(np.array(TRIANGLE))),
        ("linf_2d", lp_gauge("inf", 2)),
    ]
    gauges += [
        (f"asymmetric_{n}", random_asymmetric_polygon(rng)) for n in range(3)
    ]
    return equivalence_check(gauges, config.parallelogram_samples, seed)


_SUITES = {
    "symmetric_lines": _symmetric_lines,
    "asymmetric_witness": _asymmetric_witness,
    "hyperplane_extension": _hyperplane_extension,
    "planes_3d": _planes_3d,
    "example_sequence": _example_sequence,
    "parallelogram": _parallelogram,
    "projection": _projection,
    "reduction": _reduction,
    "equivalence": _equivalence,
}


def _run_suite(config: SuiteConfig, name: str) -> SuiteReport:
    start = time.perf_counter()
    # each suite draws from its own stream so that suites can be selected
    # or run concurrently without changing each other's cases
    seed = config.seed + 1000 * ALL_SUITES.index(name)
    report = _SUITES[name](config, seed)
    report.wall_time = time.perf_counter() - start
    logger.info(
        f"suite {name}: {report.cases} cases, {len(report.failures)} "
        f"failures, {report.wall_time:.1f} s"
    )
    return report


def verify_theorems(
    config: typing.Optional[SuiteConfig] = None,
) -> SuiteReport:
    """
    Run the configured suites and collect their reports, in config order.

    :param config: suite selection, counts, seed and tolerances
    """
    config = config or SuiteConfig()
    start = time.perf_counter()
    report = SuiteReport("verify")
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            report.suites = list(
                executor.map(
                    lambda name: _run_suite(config, name), config.suites
                )
            )
    else:
        report.suites = [_run_suite(config, name) for name in config.suites]
    report.cases = sum(s.cases for s in report.suites)
    report.inconclusive = any(s.inconclusive for s in report.suites)
    report.notes.append(
        "finite-dimensional instances only; completeness is not checked"
    )
    report.wall_time = time.perf_counter() - start
    return report
