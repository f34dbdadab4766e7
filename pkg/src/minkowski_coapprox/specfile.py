# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.
"""
Gauge Spec Files and Command-Line Geometry Helper Functions

A gauge spec file is a JSON object::

    {"dim": 2, "kind": "vertices", "data": [[1, 0], [0, 1], [-1, -1]]}

with ``kind`` one of "vertices", "halfspaces" or "builtin". Builtin data is
``{"tag": ..., "params": {...}}`` for the tags euclidean, lp (p = 1, 2 or
"inf"), ellipsoid (a symmetric matrix) and shifted (a builtin base and an
offset).
"""
import json
import os
import typing

import numpy as np

from minkowski_coapprox.flats import Flat, make_flat
from minkowski_coapprox.gauge import (
    Gauge,
    ellipsoid,
    euclidean,
    from_halfspaces,
    from_vertices,
    lp_gauge,
    shifted,
)

BUILTIN_PREFIX = "builtin:"

SPEC_FIELDS = {"dim", "kind", "data"}
BUILTIN_FIELDS = {"tag", "params"}
FLAT_FIELDS = {"base", "directions"}


class GaugeSpecError(ValueError):
    """Malformed gauge, flat or point description"""


def _check_fields(data, expected: set, where: str):
    if not isinstance(data, dict):
        raise GaugeSpecError(f"{where}: expected an object, got {data!r}")
    unknown = sorted(set(data) - expected)
    if unknown:
        raise GaugeSpecError(f"{where}: unknown field(s) {unknown}")
    missing = sorted(expected - set(data))
    if missing:
        raise GaugeSpecError(f"{where}: missing field(s) {missing}")


def parse_vector(text: str, dim: typing.Optional[int] = None) -> np.ndarray:
    """
    Parse comma-separated reals, e.g. "3,4" or "0.5, -1e-3".

    :raises GaugeSpecError: on non-numeric entries or a wrong length
    """
    try:
        vector = np.array([float(v) for v in text.split(",")])
    except ValueError as err:
        raise GaugeSpecError(f"Bad vector '{text}': {err}") from err
    if not np.all(np.isfinite(vector)):
        raise GaugeSpecError(f"Vector '{text}' has non-finite entries")
    if dim is not None and vector.size != dim:
        raise GaugeSpecError(
            f"Vector '{text}' has {vector.size} entries, expected {dim}"
        )
    return vector


def _matrix(values, dim: int, where: str) -> np.ndarray:
    """Symmetric matrix from a nested list or its upper triangle"""
    values = np.asarray(values, dtype=float)
    if values.shape == (dim, dim):
        return values
    if values.shape == (dim * (dim + 1) // 2,):
        matrix = np.zeros((dim, dim))
        matrix[np.triu_indices(dim)] = values
        return matrix + np.triu(matrix, 1).T
    raise GaugeSpecError(
        f"{where}: cannot read a {dim}x{dim} matrix from {values.tolist()}"
    )


def _triangle_dim(count: int) -> typing.Optional[int]:
    """d with d(d+1)/2 = count"""
    dim = int(round((np.sqrt(8 * count + 1) - 1) / 2))
    return dim if dim * (dim + 1) // 2 == count else None


def parse_builtin(text: str, dim: typing.Optional[int] = None) -> Gauge:
    """
    Gauge from the builtin grammar.

    ``builtin:euclidean``, ``builtin:l1``, ``builtin:linf``,
    ``builtin:ellipsoid:a11,a12,a22`` (upper triangle, 6 entries in 3D) and
    ``builtin:shifted:<base>:<offset>``, e.g.
    ``builtin:shifted:euclidean:0.3,0``.
    :param dim: required for euclidean, l1 and linf; otherwise inferred
    :raises GaugeSpecError: if the text does not parse
    """
    if not text.startswith(BUILTIN_PREFIX):
        raise GaugeSpecError(f"Builtin gauges start with '{BUILTIN_PREFIX}'")
    tokens = text[len(BUILTIN_PREFIX) :].split(":")
    name = tokens[0]
    try:
        if name == "shifted":
            if len(tokens) < 3:
                raise GaugeSpecError(
                    f"'{text}': shifted needs a base and an offset"
                )
            offset = parse_vector(tokens[-1], dim)
            base = parse_builtin(
                BUILTIN_PREFIX + ":".join(tokens[1:-1]), offset.size
            )
            return shifted(base, offset)
        if name == "ellipsoid":
            if len(tokens) != 2:
                raise GaugeSpecError(f"'{text}': ellipsoid needs parameters")
            params = parse_vector(tokens[1])
            size = _triangle_dim(params.size)
            if size is None or (dim is not None and size != dim):
                raise GaugeSpecError(
                    f"'{text}': {params.size} parameters do not form a "
                    "symmetric matrix of the right size"
                )
            return ellipsoid(_matrix(params, size, text))
        if len(tokens) != 1:
            raise GaugeSpecError(f"'{text}': unexpected parameters")
        if dim is None:
            raise GaugeSpecError(f"'{text}': the dimension is not known")
        if name in ("euclidean", "l2"):
            return euclidean(dim)
        if name == "l1":
            return lp_gauge(1, dim)
        if name == "linf":
            return lp_gauge("inf", dim)
    except GaugeSpecError:
        raise
    except ValueError as err:
        raise GaugeSpecError(f"'{text}': {err}") from err
    raise GaugeSpecError(f"Unknown builtin gauge '{name}'")


def _builtin_from_data(data, dim: int, where: str) -> Gauge:
    _check_fields(data, BUILTIN_FIELDS, where)
    tag = data["tag"]
    params = data["params"]
    where = f"{where}.{tag}"
    if tag == "euclidean":
        _check_fields(params, set(), where)
        return euclidean(dim)
    if tag == "lp":
        _check_fields(params, {"p"}, where)
        if params["p"] not in (1, 2, "inf"):
            raise GaugeSpecError(f"{where}: p must be 1, 2 or \"inf\"")
        return lp_gauge(params["p"], dim)
    if tag == "ellipsoid":
        _check_fields(params, {"matrix"}, where)
        return ellipsoid(_matrix(params["matrix"], dim, where))
    if tag == "shifted":
        _check_fields(params, {"base", "offset"}, where)
        base = _builtin_from_data(params["base"], dim, f"{where}.base")
        offset = np.asarray(params["offset"], dtype=float)
        if offset.shape != (dim,):
            raise GaugeSpecError(f"{where}: offset must have {dim} entries")
        return shifted(base, offset)
    raise GaugeSpecError(f"{where}: unknown builtin tag '{tag}'")


def gauge_from_spec(spec: dict, where: str = "gauge") -> Gauge:
    """
    Build a gauge from parsed spec JSON.

    :raises GaugeSpecError: naming the offending field
    """
    _check_fields(spec, SPEC_FIELDS, where)
    dim = spec["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise GaugeSpecError(f"{where}.dim: expected a positive integer")
    kind = spec["kind"]
    data = spec["data"]
    try:
        if kind in ("vertices", "halfspaces"):
            rows = np.asarray(data, dtype=float)
            if rows.ndim != 2 or rows.shape[1] != dim:
                raise GaugeSpecError(
                    f"{where}.data: expected rows of {dim} numbers"
                )
            if kind == "vertices":
                return from_vertices(rows, spec)
            return from_halfspaces(rows, spec)
        if kind == "builtin":
            return _builtin_from_data(data, dim, f"{where}.data")
    except GaugeSpecError:
        raise
    except (TypeError, ValueError) as err:
        raise GaugeSpecError(f"{where}.data: {err}") from err
    raise GaugeSpecError(f"{where}.kind: unknown kind '{kind}'")


def _read_json(path: str) -> typing.Any:
    with open(path, encoding="utf-8") as json_file:
        text = json_file.read()
    return _loads(text, path)


def _loads(text: str, where: str) -> typing.Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise GaugeSpecError(
            f"{where}: line {err.lineno} column {err.colno}: {err.msg}"
        ) from err


def load_gauge(source: str, dim: typing.Optional[int] = None) -> Gauge:
    """
    Gauge from a builtin string or a spec file path.

    :raises GaugeSpecError: if the source is malformed
    :raises OSError: if the file cannot be read
    """
    if source.startswith(BUILTIN_PREFIX):
        return parse_builtin(source, dim)
    g = gauge_from_spec(_read_json(source), where=source)
    if dim is not None and g.dim != dim:
        raise GaugeSpecError(
            f"{source}: gauge has dimension {g.dim}, expected {dim}"
        )
    return g


def dump_gauge(g: Gauge, path: str):
    """
    Write the spec file of a gauge.

    :raises OSError: naming the path, if the file cannot be written
    """
    try:
        with open(path, "w", encoding="utf-8") as json_file:
            json.dump(g.to_spec(), json_file, indent=2)
            json_file.write("\n")
    except OSError as err:
        raise OSError(f"Cannot write gauge spec to {path}: {err}") from err


def flat_from_dict(data: dict, where: str = "flat") -> Flat:
    """Flat from {"base": [...], "directions": [[...], ...]}"""
    _check_fields(data, FLAT_FIELDS, where)
    try:
        return make_flat(data["base"], data["directions"])
    except (TypeError, ValueError) as err:
        raise GaugeSpecError(f"{where}: {err}") from err


def parse_flat(text: str, dim: typing.Optional[int] = None) -> Flat:
    """
    Flat from "base=0,0;dirs=1,0|0,1" (``dir=`` also accepted), a JSON
    object, or the path of a JSON file holding one.

    :raises GaugeSpecError: if the text does not describe a flat
    """
    text = text.strip()
    if text.startswith("{"):
        flat = flat_from_dict(_loads(text, "flat"))
    elif "=" not in text and os.path.isfile(text):
        flat = flat_from_dict(_read_json(text), where=text)
    else:
        fields = {}
        for part in filter(None, text.split(";")):
            key, _, value = part.partition("=")
            key = key.strip()
            if key == "dir":
                key = "dirs"
            if key not in ("base", "dirs") or not value or key in fields:
                raise GaugeSpecError(f"Bad flat field '{part}' in '{text}'")
            fields[key] = value
        if set(fields) != {"base", "dirs"}:
            raise GaugeSpecError(f"Flat '{text}' needs base= and dirs=")
        base = parse_vector(fields["base"], dim)
        directions = [
            parse_vector(d, base.size) for d in fields["dirs"].split("|")
        ]
        try:
            flat = make_flat(base, directions)
        except ValueError as err:
            raise GaugeSpecError(f"Flat '{text}': {err}") from err
    if dim is not None and flat.dim != dim:
        raise GaugeSpecError(
            f"Flat has dimension {flat.dim}, expected {dim}"
        )
    return flat
