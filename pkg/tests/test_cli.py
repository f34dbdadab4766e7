# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info
"""Command-line tests"""
import csv
import json

import numpy as np
import pytest

from minkowski_coapprox.__main__ import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    build_parser,
    main,
    run,
)
from minkowski_coapprox.coapprox import CoapproxResult, CoapproxStatus
from minkowski_coapprox.gauge import from_vertices
from minkowski_coapprox.witness import construct_witness

from .sample_gauges import SUITE_CONFIG, TRIANGLE, TRIANGLE_SPEC


@pytest.fixture
def triangle_file(tmp_path):
    """Spec file of the triangle gauge"""
    path = tmp_path / "triangle.json"
    path.write_text(json.dumps(TRIANGLE_SPEC), encoding="utf-8")
    return str(path)


@pytest.fixture
def config_file(tmp_path):
    """Quick suite config"""
    path = tmp_path / "suites.json"
    path.write_text(json.dumps(SUITE_CONFIG), encoding="utf-8")
    return str(path)


def run_json(capsys, argv):
    """Exit code and parsed stdout"""
    code = run(argv)
    return code, json.loads(capsys.readouterr().out)


class TestParser:
    """Argument handling"""

    def test_commands(self):
        """Every command has a sub-parser"""
        args = build_parser().parse_args(["verify", "--suites", "planes_3d"])
        assert args.command == "verify"
        assert args.format == "json"

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["eval", "--gauge", "builtin:linf"],
            ["coapprox", "--gauge", "builtin:l1", "--point", "1,2"],
            ["eval", "--gauge", "builtin:l1", "--point", "1,2", "--format=x"],
            ["frobnicate"],
        ],
    )
    def test_usage_errors(self, argv, capsys):
        """Missing or unknown arguments exit with 2"""
        assert run(argv) == EXIT_USAGE
        assert "usage" in capsys.readouterr().err

    def test_main(self, mocker):
        """main exits with run's code"""
        mocker.patch(
            "sys.argv",
            ["minkowski", "eval", "--gauge", "builtin:l1", "--point", "1,1"],
        )
        with pytest.raises(SystemExit) as exit_info:
            main()
        assert exit_info.value.code == EXIT_OK


class TestEval:
    """eval"""

    def test_linf(self, capsys):
        """‖(3, 4)‖∞ = 4"""
        code, payload = run_json(
            capsys, ["eval", "--gauge", "builtin:linf", "--point", "3,4"]
        )
        assert code == EXIT_OK
        assert payload == {"value": 4.0}

    def test_spec_file(self, capsys, triangle_file):
        """γ(-1, 0) = 2 for the triangle"""
        _, payload = run_json(
            capsys, ["eval", "--gauge", triangle_file, "--point=-1,0"]
        )
        assert payload["value"] == pytest.approx(2.0)

    def test_text(self, capsys):
        """Rich table output"""
        code = run(
            [
                "eval",
                "--gauge",
                "builtin:linf",
                "--point",
                "3,4",
                "--format",
                "text",
            ]
        )
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "Gauge" in out
        assert "4" in out

    def test_malformed_file(self, capsys, tmp_path):
        """Syntax errors exit with 2 and report the position"""
        path = tmp_path / "broken.json"
        path.write_text('{"dim": 2,', encoding="utf-8")
        assert (
            run(["eval", "--gauge", str(path), "--point", "1,0"])
            == EXIT_USAGE
        )
        assert "line 1 column" in capsys.readouterr().err

    def test_missing_file(self, capsys, tmp_path):
        """Unreadable files exit with 2"""
        missing = str(tmp_path / "nothing.json")
        assert run(["eval", "--gauge", missing, "--point", "1,0"]) == 2
        assert "ERROR" in capsys.readouterr().err

    def test_dimension_mismatch(self, capsys, triangle_file):
        """A 3D point for a 2D gauge"""
        assert (
            run(["eval", "--gauge", triangle_file, "--point", "1,0,0"])
            == EXIT_USAGE
        )

    def test_out_file(self, tmp_path, capsys):
        """--out writes the JSON to a file instead"""
        out = tmp_path / "value.json"
        code = run(
            [
                "eval",
                "--gauge",
                "builtin:euclidean",
                "--point",
                "3,4",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text(encoding="utf-8")) == {"value": 5.0}

    def test_unwritable_out(self, tmp_path):
        """--out into a missing directory"""
        out = str(tmp_path / "missing" / "value.json")
        argv = ["eval", "--gauge", "builtin:l1", "--point", "1,1"]
        assert run(argv + ["--out", out]) == EXIT_USAGE


class TestApproximation:
    """coapprox and bestapprox"""

    def test_coapprox(self, capsys):
        """Euclidean projection of (3, 4) onto the x-axis"""
        code, payload = run_json(
            capsys,
            [
                "coapprox",
                "--gauge",
                "builtin:euclidean",
                "--flat",
                "base=0,0;dirs=1,0",
                "--point",
                "3,4",
            ],
        )
        assert code == EXIT_OK
        assert payload["status"] == "nonempty"
        assert payload["witness"] == pytest.approx([3.0, 0.0], abs=1e-6)

    def test_coapprox_empty(self, capsys, triangle_file):
        """The triangle's witness line: empty is a successful answer too"""
        witness = construct_witness(from_vertices(np.array(TRIANGLE)))
        code, payload = run_json(
            capsys,
            [
                "coapprox",
                "--gauge",
                triangle_file,
                "--flat",
                json.dumps(witness.flat.to_dict()),
                "--point="
                + ",".join(repr(float(c)) for c in witness.target),
            ],
        )
        assert code == EXIT_OK
        assert payload["status"] == "empty"
        assert payload["lower_bound"] > 0.0

    def test_undecided(self, capsys, mocker):
        """Undecided results exit with 0"""
        patched = mocker.patch(
            "minkowski_coapprox.__main__.coapprox_solve",
            return_value=CoapproxResult(
                CoapproxStatus.UNDECIDED, None, 0.25, None, iterations=3
            ),
        )
        code, payload = run_json(
            capsys,
            [
                "coapprox",
                "--gauge",
                "builtin:l1",
                "--flat",
                "base=0,0;dirs=1,1",
                "--point",
                "1,0",
                "--max-rounds",
                "3",
            ],
        )
        assert code == EXIT_OK
        assert payload["status"] == "undecided"
        assert payload["witness"] is None
        budget = patched.call_args[0][4]
        assert budget.max_rounds == 3

    def test_bad_flat(self, capsys):
        """Flats that do not parse exit with 2"""
        code = run(
            [
                "coapprox",
                "--gauge",
                "builtin:l1",
                "--flat",
                "base=0,0;dirs=1,1|2,2",
                "--point",
                "1,0",
            ]
        )
        assert code == EXIT_USAGE
        assert "Flat" in capsys.readouterr().err

    def test_bestapprox(self, capsys):
        """Maximum norm ties go to the smallest parameter"""
        code, payload = run_json(
            capsys,
            [
                "bestapprox",
                "--gauge",
                "builtin:linf",
                "--flat",
                "base=0,0;dirs=1,0",
                "--point",
                "0,1",
            ],
        )
        assert code == EXIT_OK
        assert payload["distance"] == pytest.approx(1.0)
        assert payload["point"] == pytest.approx([-1.0, 0.0], abs=1e-9)


class TestWitness:
    """witness"""

    def test_triangle(self, capsys, tmp_path, triangle_file):
        """Verified witness, and the gauge written back out"""
        emitted = tmp_path / "emitted.json"
        code, payload = run_json(
            capsys,
            [
                "witness",
                "--gauge",
                triangle_file,
                "--emit-gauge",
                str(emitted),
            ],
        )
        assert code == EXIT_OK
        assert payload["found"]
        assert payload["verification"]["ok"]
        assert payload["witness"]["lambda"] > 1.0
        assert json.loads(emitted.read_text(encoding="utf-8")) == (
            TRIANGLE_SPEC
        )

    def test_norm(self, capsys):
        """Norms have no witness: an answer, reported with exit 1"""
        code = run(["witness", "--gauge", "builtin:linf"])
        captured = capsys.readouterr()
        assert code == EXIT_FAILED
        payload = json.loads(captured.out)
        assert not payload["found"]
        assert payload["witness"] is None
        assert "norm" in payload["reason"]
        assert "norm" in captured.err

    def test_norm_text(self, capsys):
        """The text report says no witness was found"""
        code = run(
            ["witness", "--gauge", "builtin:euclidean", "--format", "text"]
        )
        assert code == EXIT_FAILED
        out = capsys.readouterr().out
        assert "Chord Witness" in out
        assert "False" in out


class TestBisector:
    """bisector"""

    def test_csv(self, capsys, tmp_path):
        """Summary on stdout, grid in the CSV file"""
        out = tmp_path / "grid.csv"
        code, payload = run_json(
            capsys,
            [
                "bisector",
                "--gauge",
                "builtin:euclidean",
                "--x=-1,0",
                "--y",
                "1,0",
                "--window=-2,-2,2,2",
                "--resolution",
                "4,3",
                "--csv",
                str(out),
            ],
        )
        assert code == EXIT_OK
        assert payload["resolution"] == [4, 3]
        assert sum(payload["labels"].values()) == 12
        with open(out, encoding="utf-8") as csv_file:
            assert len(list(csv.reader(csv_file))) == 13

    def test_svg(self, capsys, tmp_path):
        """SVG picture of the maximum norm bisector"""
        out = tmp_path / "bisector.svg"
        code = run(
            [
                "bisector",
                "--gauge",
                "builtin:linf",
                "--x",
                "0,0",
                "--y",
                "1,1",
                "--resolution",
                "32,32",
                "--svg",
                str(out),
            ]
        )
        assert code == EXIT_OK
        assert out.read_text(encoding="utf-8").lstrip().startswith("<")

    @pytest.mark.parametrize(
        "extra", [["--resolution", "4.5,3"], ["--window", "0,0,1"]]
    )
    def test_invalid(self, extra):
        """Fractional resolutions and short windows"""
        argv = ["bisector", "--gauge", "builtin:l1", "--x", "0,0", "--y"]
        assert run(argv + ["1,0"] + extra) == EXIT_USAGE


class TestConstants:
    """constants"""

    def test_symmetrized(self, capsys, triangle_file):
        """Triangle against its symmetrized norm"""
        code, payload = run_json(
            capsys, ["constants", "--gauge", triangle_file]
        )
        assert code == EXIT_OK
        assert payload["c0"] == pytest.approx(1.0)
        assert payload["c1"] == pytest.approx(2.0)

    def test_two_gauges(self, capsys):
        """Euclidean against the maximum norm"""
        _, payload = run_json(
            capsys,
            [
                "constants",
                "--gauge",
                "builtin:euclidean",
                "--gauge2",
                "builtin:linf",
                "--dim",
                "2",
            ],
        )
        assert payload["c0"] == pytest.approx(2**-0.5)
        assert payload["c1"] == pytest.approx(1.0)


class TestVerify:
    """verify"""

    def test_reproducible(self, tmp_path, config_file):
        """Two runs write byte-identical reports"""
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        for out in (first, second):
            code = run(["verify", "--config", config_file, "--out", str(out)])
            assert code == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
        report = json.loads(first.read_text(encoding="utf-8"))
        assert report["passed"]
        assert "wall_time" not in report

    def test_time(self, capsys, config_file):
        """--time adds wall time"""
        _, payload = run_json(
            capsys, ["verify", "--config", config_file, "--time"]
        )
        assert payload["wall_time"] >= 0.0

    def test_suite_override(self, capsys, config_file):
        """--suites replaces the config file selection"""
        _, payload = run_json(
            capsys,
            ["verify", "--config", config_file, "--suites", "parallelogram"],
        )
        assert [s["suite"] for s in payload["suites"]] == ["parallelogram"]

    def test_text(self, capsys, config_file):
        """Text report names each suite"""
        code = run(["verify", "--config", config_file, "--format", "text"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        for name in SUITE_CONFIG["suites"]:
            assert name in out

    @pytest.mark.parametrize(
        "extra", [["--suites", "everything"], ["--workers", "1", "--tol", "0"]]
    )
    def test_invalid(self, config_file, extra):
        """Unknown suites and bad tolerances"""
        assert run(["verify", "--config", config_file] + extra) == EXIT_USAGE

    def test_unknown_config_field(self, tmp_path):
        """Config typos exit with 2"""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"seeds": 1}), encoding="utf-8")
        assert run(["verify", "--config", str(path)]) == EXIT_USAGE


class TestDeterminism:
    """Same arguments and seed, same bytes"""

    @pytest.mark.parametrize(
        "argv",
        [
            ["eval", "--gauge", "builtin:l1", "--point=-0.3,2"],
            [
                "coapprox",
                "--gauge",
                "builtin:shifted:euclidean:0.3,0",
                "--flat",
                "base=0,1;dirs=1,0.5",
                "--point=-0.4,2",
                "--seed",
                "5",
            ],
            [
                "bestapprox",
                "--gauge",
                "builtin:ellipsoid:1,0.2,3",
                "--flat",
                "base=0,0;dirs=1,2",
                "--point",
                "2,0",
            ],
            ["witness", "--gauge", "builtin:linf"],
            ["constants", "--gauge", "builtin:shifted:linf:0.2,0.1"],
        ],
        ids=lambda argv: argv[0],
    )
    def test_commands(self, tmp_path, argv):
        """Two runs of a command write identical output files"""
        outputs = []
        for run_number in range(2):
            out = tmp_path / f"run{run_number}.json"
            run(argv + ["--out", str(out)])
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        assert outputs[0]

    def test_triangle_coapprox(self, tmp_path, triangle_file):
        """An Empty certificate is reproduced exactly"""
        witness = construct_witness(from_vertices(np.array(TRIANGLE)))
        argv = [
            "coapprox",
            "--gauge",
            triangle_file,
            "--flat",
            json.dumps(witness.flat.to_dict()),
            "--point=" + ",".join(repr(float(c)) for c in witness.target),
        ]
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        for out in (first, second):
            assert run(argv + ["--out", str(out)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    def test_bisector_files(self, tmp_path, triangle_file):
        """Summary, SVG and CSV are identical across runs"""
        files = []
        for run_number in range(2):
            paths = [
                tmp_path / f"summary{run_number}.json",
                tmp_path / f"bisector{run_number}.svg",
                tmp_path / f"bisector{run_number}.csv",
            ]
            code = run(
                [
                    "bisector",
                    "--gauge",
                    triangle_file,
                    "--x=-1,0.25",
                    "--y",
                    "0.5,-0.5",
                    "--resolution",
                    "48,40",
                    "--out",
                    str(paths[0]),
                    "--svg",
                    str(paths[1]),
                    "--csv",
                    str(paths[2]),
                ]
            )
            assert code == EXIT_OK
            files.append([path.read_bytes() for path in paths])
        assert files[0] == files[1]
