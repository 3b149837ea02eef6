"""File formats and the command-line front end."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from softarm import io as sio
from softarm.cli import EXIT_FIT, EXIT_INPUT, EXIT_OK, default_data_dir, main
from softarm.deflection import DeflectionModelCoeffs, eval_deflection
from softarm.errors import ParseError
from softarm.material import MooneyRivlinParams, mr_uniaxial_stress

RHO6 = MooneyRivlinParams(-3.19, 4.23, 0.64, -2.65, 4.37)


def write_stress_strain(path, params=RHO6, n=40):
    lines = ["strain,stress_pa"]
    for lam in np.linspace(1.01, 1.5, n):
        stress_pa = mr_uniaxial_stress(params, float(lam)) * 1e6
        lines.append(f"{lam - 1.0:.12g},{stress_pa:.12g}")
    Path(path).write_text("\n".join(lines) + "\n")


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


class TestCsvIngestion:
    def test_bad_value_reports_line_number(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("rpm,eta\n4000,0.895\nfast,0.9\n")
        with pytest.raises(ParseError) as info:
            sio.read_efficiency_csv(p)
        assert info.value.line == 3

    def test_bad_header_reports_line_one(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("speed,eta\n4000,0.895\n")
        with pytest.raises(ParseError) as info:
            sio.read_efficiency_csv(p)
        assert info.value.line == 1

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(ParseError):
            sio.read_efficiency_csv(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            sio.read_efficiency_csv(tmp_path / "nope.csv")

    def test_blank_lines_skipped(self, tmp_path):
        p = tmp_path / "table.csv"
        p.write_text("rpm,eta\n4000,0.895\n\n5000,0.909\n")
        table = sio.read_efficiency_csv(p)
        assert len(table.rows) == 2

    def test_deflection_sweep_converts_percent(self, tmp_path):
        p = tmp_path / "sweep.csv"
        p.write_text("rho_percent,throttle_pct,alpha_deg\n6,50,4.4\n")
        (sample,) = sio.read_deflection_sweep_csv(p)
        assert sample.throttle == pytest.approx(5.0)


class TestGeometryJson:
    def test_shipped_geometry_units(self):
        geom = sio.read_arm_geometry_json(default_data_dir() / "arm_geometry.json")
        assert geom.total_length == pytest.approx(0.175, rel=1e-12)  # mm -> m
        assert geom.total_turning_deg == pytest.approx(95.0)

    def test_missing_key(self, tmp_path):
        p = tmp_path / "geom.json"
        p.write_text('{"segments": []}')
        with pytest.raises(ParseError):
            sio.read_arm_geometry_json(p)

    def test_solution_csv_round_trip(self, tmp_path):
        from softarm.beam import ArmGeometry, LoadCase, Segment, solve_elastica

        geom = ArmGeometry(
            segments=(Segment(0.0, 0.3),),
            section_inertia=(1e-9,),
            section_half_depth=0.005,
        )
        sol = solve_elastica(geom, 1e7, LoadCase(thrust=0.01, gravity=0))
        out = tmp_path / "solution.csv"
        sio.write_solution_csv(out, sol)
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["s_m", "x_m", "z_m", "theta_rad"]
        assert len(rows) - 1 == len(sol.s)
        assert float(rows[-1][0]) == pytest.approx(0.3)


class TestFitMaterialCommand:
    def test_stress_strain_round_trip(self, tmp_path, capsys):
        csv_path = tmp_path / "curve.csv"
        write_stress_strain(csv_path)
        code, out = run(
            capsys,
            ["fit-material", "--stress-strain", str(csv_path), "--infill", "6"],
        )
        assert code == EXIT_OK
        report = json.loads(out)
        mr = report["results"]["material"]["mooney_rivlin"]
        for key, want in zip(
            ("c10", "c01", "c20", "c02", "c11"), RHO6.as_array()
        ):
            assert mr[key] == pytest.approx(want, rel=1e-6)
        assert report["results"]["material"]["small_strain_modulus_mpa"] == pytest.approx(
            6.24, rel=1e-6
        )
        assert len(report["inputs"]["stress_strain_csv"]) == 64  # sha256 hex

    def test_flexural_fit(self, tmp_path, capsys):
        e_true, length, inertia = 25e6, 0.3, 1e-9
        lines = ["force_n,deflection_m"]
        for f in (0.5, 1.0, 2.0):
            lines.append(f"{f},{f * length**3 / (3 * e_true * inertia):.12g}")
        p = tmp_path / "flex.csv"
        p.write_text("\n".join(lines) + "\n")
        code, out = run(
            capsys,
            [
                "fit-material", "--flexural", str(p),
                "--length", "0.3", "--inertia", "1e-9",
            ],
        )
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["results"]["material"]["flexural_modulus_pa"] == pytest.approx(
            e_true, rel=1e-9
        )

    def test_no_input_is_input_error(self, capsys):
        code, _ = run(capsys, ["fit-material"])
        assert code == EXIT_INPUT

    def test_empty_csv_is_input_error(self, tmp_path, capsys):
        p = tmp_path / "empty.csv"
        p.write_text("strain,stress_pa\n")
        code, _ = run(capsys, ["fit-material", "--stress-strain", str(p)])
        assert code == EXIT_INPUT

    def test_degenerate_fit_is_fit_error(self, tmp_path, capsys):
        p = tmp_path / "flat.csv"
        p.write_text("force_n,deflection_m\n1.0,0.0\n2.0,0.0\n")
        code, _ = run(
            capsys,
            ["fit-material", "--flexural", str(p), "--length", "0.3", "--inertia", "1e-9"],
        )
        assert code == EXIT_FIT


class TestAnalyzeCommand:
    def test_full_pipeline(self, capsys):
        code, out = run(capsys, ["analyze"])
        assert code == EXIT_OK
        report = json.loads(out)
        results = report["results"]
        for section in ("material", "beam", "efficiency", "deflection", "pipe_fit"):
            assert section in results
        for rho in ("6", "8", "10"):
            assert results["deflection"]["envelope"][rho]["passes_14deg"]
        rec = results["deflection"]["recommended_infill"]
        assert rec["min_pct"] <= 6.0 and rec["max_pct"] >= 8.0
        assert results["pipe_fit"]["attached"] is True
        assert results["efficiency"]["optimal_motor_station"] == 0.83

    def test_report_matches_schema(self, capsys):
        jsonschema = pytest.importorskip("jsonschema")
        from importlib import resources

        schema = json.loads(
            resources.files("softarm").joinpath("data", "report.schema.json").read_text()
        )
        code, out = run(capsys, ["analyze"])
        assert code == EXIT_OK
        jsonschema.validate(json.loads(out), schema)

    def test_deterministic_output(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["analyze", "--out", str(a), "--quiet"]) == EXIT_OK
        assert main(["analyze", "--out", str(b), "--quiet"]) == EXIT_OK
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_timestamp_flag_adds_field(self, capsys):
        code, out = run(capsys, ["analyze", "--timestamp"])
        assert code == EXIT_OK
        assert "generated_at" in json.loads(out)

    def test_missing_config_is_input_error(self, capsys):
        code, _ = run(capsys, ["analyze", "--config", "/nonexistent/config.json"])
        assert code == EXIT_INPUT

    def test_config_missing_section_is_input_error(self, tmp_path, capsys):
        p = tmp_path / "config.json"
        p.write_text("{}")
        code, _ = run(capsys, ["analyze", "--config", str(p)])
        assert code == EXIT_INPUT


class TestDeflectCommand:
    def test_point_evaluation(self, capsys):
        code, out = run(capsys, ["deflect", "--rho", "6", "--throttle-pct", "50"])
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["results"]["deflection"]["alpha_deg"] == pytest.approx(
            4.4175, abs=1e-9
        )

    def test_envelope_only(self, capsys):
        code, out = run(capsys, ["deflect", "--rho", "6"])
        assert code == EXIT_OK
        env = json.loads(out)["results"]["deflection"]["envelope"]
        assert env["max_abs_deflection_deg"] == pytest.approx(5.388084, abs=1e-6)
        assert env["passes_14deg"] is True


class TestEfficiencyCommand:
    def test_interpolated_lookup(self, capsys):
        code, out = run(capsys, ["efficiency", "--rpm", "4500"])
        assert code == EXIT_OK
        eff = json.loads(out)["results"]["efficiency"]
        assert eff["eta"] == pytest.approx(0.902, abs=1e-12)
        assert eff["eta_model"] == pytest.approx(0.902, abs=1e-9)  # at the optimum


class TestPipeFitCommand:
    def test_feasible_pipe(self, capsys):
        code, out = run(capsys, ["pipe-fit", "--diameter", "0.2"])
        assert code == EXIT_OK
        fit = json.loads(out)["results"]["pipe_fit"]
        assert fit["total_turning_deg"] == pytest.approx(95.0)
        assert fit["attached"] is True

    def test_pipe_too_small_is_input_error(self, capsys):
        code, _ = run(capsys, ["pipe-fit", "--diameter", "0.054"])
        assert code == EXIT_INPUT


class TestSweepCommand:
    def test_motor_station_interior_maximum(self, capsys):
        code, out = run(capsys, ["sweep", "--axis", "motor_station", "--rpm", "4000"])
        assert code == EXIT_OK
        rows = list(csv.DictReader(out.splitlines()))
        best = max(rows, key=lambda r: float(r["eta"]))
        assert abs(float(best["x_c"]) - 0.83) <= 0.02

    def test_throttle_matches_model(self, capsys):
        code, out = run(capsys, ["sweep", "--axis", "throttle", "--rho", "6"])
        assert code == EXIT_OK
        coeffs = sio.read_deflection_coeffs_json(
            default_data_dir() / "deflection_coeffs.json"
        )
        for row in csv.DictReader(out.splitlines()):
            t = float(row["throttle_t"])
            assert float(row["alpha_deg"]) == pytest.approx(
                eval_deflection(coeffs, 6.0, t), rel=1e-9, abs=1e-12
            )

    def test_infill_attachment_flips_at_15(self, capsys):
        code, out = run(capsys, ["sweep", "--axis", "infill"])
        assert code == EXIT_OK
        rows = {float(r["rho_pct"]): r for r in csv.DictReader(out.splitlines())}
        assert rows[14.5]["attached"] == "true"
        assert rows[15.0]["attached"] == "false"
        assert rows[15.0]["bendable"] == "false"

    def test_json_format(self, capsys):
        code, out = run(
            capsys, ["sweep", "--axis", "arm_angle", "--format", "json"]
        )
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["results"]["sweep"]["axis"] == "arm_angle"

    def test_unknown_axis_rejected(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["sweep", "--axis", "banana"])
        assert info.value.code == 2
        capsys.readouterr()


class TestGlobalFlags:
    def test_out_file_and_quiet(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        code = main(["efficiency", "--rpm", "4500", "--out", str(target), "--quiet"])
        assert code == EXIT_OK
        assert capsys.readouterr().out == ""
        assert json.loads(target.read_text())["tool"]["name"] == "softarm"

    def test_out_echoes_path_by_default(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        code = main(["efficiency", "--rpm", "4500", "--out", str(target)])
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == str(target)

    def test_global_flags_before_subcommand(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        code = main(["--out", str(target), "--quiet", "efficiency", "--rpm", "4500"])
        assert code == EXIT_OK
        assert target.exists()
