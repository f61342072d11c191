"""Tests for the icd-photon command line."""

import json

import pytest
from click.testing import CliRunner

from icd_photon import __version__
from icd_photon.cli import EXIT_DOMAIN, EXIT_IO, EXIT_USAGE, main
from icd_photon.emitter import read_scan_csv

NE_HE_NE = ["--pos-d", "0,0,0", "--pos-a", "0,0,10", "--pos-m", "0,0,5",
            "--alpha", "0.205", "--c6", "3.6"]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def widths_file(tmp_path):
    path = tmp_path / "widths.csv"
    rows = "\n".join(f"{rho},{3.6 / rho ** 6!r}" for rho in range(10, 21))
    path.write_text("rho_AA,width_eV\n" + rows + "\n")
    return path


def _json_report(runner, tmp_path, args):
    out = tmp_path / "report.json"
    result = runner.invoke(main, args + ["--format", "json", "-o", str(out)])
    assert result.exit_code == 0, result.output
    return json.loads(out.read_text())


class TestRate:
    def test_neon_helium_neon(self, runner, tmp_path):
        report = _json_report(runner, tmp_path, ["rate"] + NE_HE_NE + ["--kind", "nonretarded"])
        assert report["kind"] == "nonretarded"
        assert report["width_eV"]["direct"] == pytest.approx(3.6e-6, rel=1e-9)
        assert report["width_eV"]["total"] == pytest.approx(3.696e-6, rel=1e-3)
        assert report["ratio"] == pytest.approx(1.02676, abs=1e-5)
        assert report["u_NR"] == pytest.approx(0.01312, rel=1e-10)
        assert report["perturbative_ok"] is True
        assert report["closed_form"]["relative_difference"] < 1e-10
        params = report["parameters"]
        assert params["C6_eV_A6"] == pytest.approx(3.6)
        assert params["coefficient_source"] == "user-supplied"
        assert params["wavelength_A"] == pytest.approx(480.0)
        assert params["pos_m_A"] == pytest.approx([0.0, 0.0, 5.0])

    def test_zero_polarisability(self, runner, tmp_path):
        args = ["rate", "--pos-a", "0,0,10", "--pos-m", "0,0,5", "--alpha", "0", "--c6", "3.6",
                "--kind", "nonretarded"]
        report = _json_report(runner, tmp_path, args)
        assert report["width_eV"]["cross"] == 0.0
        assert report["width_eV"]["scattered"] == 0.0
        assert report["ratio"] == pytest.approx(1.0)

    def test_two_body_only(self, runner, tmp_path):
        report = _json_report(runner, tmp_path, ["rate", "--pos-a", "0,0,5", "--c6", "3.6"])
        assert report["requested_kind"] == "auto"
        assert report["kind"] == "nonretarded"
        assert report["closed_form"] is None
        assert report["parameters"]["pos_m_A"] is None
        assert report["width_eV"]["total"] == pytest.approx(3.6 / 5 ** 6, rel=1e-9)

    def test_text_report(self, runner):
        result = runner.invoke(main, ["rate"] + NE_HE_NE + ["--kind", "nonretarded"])
        assert result.exit_code == 0, result.output
        assert "ICD rate" in result.output
        assert "total" in result.output
        assert "Closed form" in result.output

    def test_text_report_to_file(self, runner, tmp_path):
        out = tmp_path / "rate.txt"
        result = runner.invoke(main, ["rate"] + NE_HE_NE + ["-o", str(out)])
        assert result.exit_code == 0, result.output
        assert "written to" in result.output
        assert "Ratio to two-body" in out.read_text()

    def test_strong_coupling_warns(self, runner, caplog):
        args = ["rate", "--pos-a", "0,0,10", "--pos-m", "0,0,5", "--alpha", "100", "--c6", "3.6",
                "--kind", "nonretarded"]
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
        assert "Warning:" in result.output
        assert result.output.count("mediator coupling u") == 1
        assert not [r for r in caplog.records if r.name == "icd_photon.rates"]

    def test_atomic_data(self, runner, tmp_path):
        args = ["rate", "--pos-a", "0,0,10", "--gamma-d", "1e9", "--sigma-a", "10",
                "--kind", "nonretarded"]
        report = _json_report(runner, tmp_path, args)
        assert report["parameters"]["coefficient_source"] == "computed-from-atoms"
        assert report["parameters"]["C2_eV_A2"] is not None

    def test_conflicting_coupling(self, runner):
        args = ["rate", "--pos-a", "0,0,10", "--c6", "3.6", "--gamma-d", "1e9", "--sigma-a", "10"]
        result = runner.invoke(main, args)
        assert result.exit_code == EXIT_USAGE
        assert "Error:" in result.output

    def test_wavelength_and_omega(self, runner):
        args = ["rate", "--pos-a", "0,0,10", "--c6", "3.6", "--wavelength", "480",
                "--omega", "25.8"]
        assert runner.invoke(main, args).exit_code == EXIT_USAGE

    def test_bad_unit(self, runner):
        result = runner.invoke(main, ["rate", "--pos-a", "0,0,10", "--c6", "3.6",
                                      "--alpha", "0.2parsecs"])
        assert result.exit_code == EXIT_USAGE
        assert "parsecs" in result.output

    def test_missing_acceptor(self, runner):
        assert runner.invoke(main, ["rate", "--c6", "3.6"]).exit_code == EXIT_USAGE

    def test_mediator_on_donor(self, runner):
        args = ["rate", "--pos-a", "0,0,10", "--pos-m", "0,0,0", "--alpha", "0.205",
                "--c6", "3.6", "--kind", "nonretarded"]
        result = runner.invoke(main, args)
        assert result.exit_code == EXIT_DOMAIN
        assert "Error:" in result.output


class TestScan:
    def test_figure_3(self, runner, tmp_path):
        out = tmp_path / "fig3.csv"
        result = runner.invoke(main, ["scan", "--figure", "3", "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert "Wrote 41 rows" in result.output
        assert "Summary:" in result.output
        for key in ("kind", "alpha_m3", "C6_eV_A6", "omega_rad_per_s", "rho_max_m", "units"):
            assert key in result.output
        scan = read_scan_csv(out.read_text())
        assert scan.metadata["preset"] == "figure-3"
        assert scan.column("ratio").min() > 1.0

    def test_figure_4_upper_json(self, runner, tmp_path):
        out = tmp_path / "fig4.json"
        result = runner.invoke(main, ["scan", "--figure", "4-upper", "--format", "json",
                                      "-o", str(out)])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["metadata"]["preset"] == "figure-4-upper"
        assert len(data["rows"]) == 801

    def test_mediator_1d_into_output_dir(self, runner, tmp_path):
        args = ["scan", "--mode", "mediator-1d", "--pos-a", "0,0,1440", "--alpha", "1728000",
                "--axis-min", "1920", "--axis-max", "2400", "--points", "5", "--no-full"]
        result = runner.invoke(main, args, env={"ICD_PHOTON_OUTPUT_DIR": str(tmp_path)})
        assert result.exit_code == 0, result.output
        scan = read_scan_csv((tmp_path / "scan-mediator-1d.csv").read_text())
        assert len(scan) == 5
        assert scan.metadata["include_full"] == "false"

    def test_mediator_2d_yaml(self, runner, tmp_path):
        out = tmp_path / "map.yaml"
        args = ["scan", "--mode", "mediator-2d", "--pos-a", "0,0,1440", "--alpha", "1728000",
                "--axis-min", "1920", "--axis-max", "2400", "--points", "3",
                "--x-min", "-480", "--x-max", "480", "--x-points", "3",
                "--format", "yaml", "-o", str(out)]
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
        assert "Wrote 9 rows" in result.output
        assert "scan: mediator-2d" in out.read_text()

    def test_distance_auto_kind(self, runner, tmp_path):
        out = tmp_path / "distance.csv"
        args = ["scan", "--mode", "distance", "--rho-min", "5", "--rho-max", "50",
                "--points", "4", "--alpha", "0.205", "--c6", "3.6", "-o", str(out)]
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
        scan = read_scan_csv(out.read_text())
        assert scan.metadata["kind"] == "full"
        assert float(scan.metadata["C6_eV_A6"]) == pytest.approx(3.6)

    def test_distance_needs_range(self, runner):
        args = ["scan", "--mode", "distance", "--rho-min", "5", "--alpha", "0.205", "--c6", "3.6"]
        result = runner.invoke(main, args)
        assert result.exit_code == EXIT_USAGE
        assert "--rho-max" in result.output

    @pytest.mark.parametrize("args", [[], ["--figure", "3", "--mode", "distance"]])
    def test_figure_or_mode(self, runner, args):
        assert runner.invoke(main, ["scan"] + args).exit_code == EXIT_USAGE

    def test_bad_grid_is_a_domain_error(self, runner, tmp_path):
        args = ["scan", "--mode", "mediator-1d", "--pos-a", "0,0,1440", "--alpha", "1728000",
                "--axis-min", "2400", "--axis-max", "1920", "-o", str(tmp_path / "x.csv")]
        assert runner.invoke(main, args).exit_code == EXIT_DOMAIN


class TestFit:
    def test_json(self, runner, tmp_path, widths_file):
        report = _json_report(runner, tmp_path, ["fit", "--input", str(widths_file)])
        assert report["C6_eV_A6"] == pytest.approx(3.6, rel=1e-9)
        assert report["C2_eV_A2"] is None
        assert report["source"] == "fitted"
        assert report["fit"]["n_rows"] == 11

    def test_with_wavelength_and_rho_min(self, runner, tmp_path, widths_file):
        args = ["fit", "--input", str(widths_file), "--wavelength", "480", "--rho-min", "14.5"]
        report = _json_report(runner, tmp_path, args)
        assert report["C2_eV_A2"] is not None
        assert report["fit"]["n_rows"] == 6

    def test_text(self, runner, widths_file):
        result = runner.invoke(main, ["fit", "--input", str(widths_file)])
        assert result.exit_code == 0, result.output
        assert "Read 11 rows" in result.output
        assert "C6 (eV·Å⁶)" in result.output
        assert "requested ρ min (Å)" in result.output
        assert "not given" in result.output

    def test_text_echoes_frequency(self, runner, widths_file):
        args = ["fit", "--input", str(widths_file), "--wavelength", "480", "--rho-min", "12"]
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
        assert "λ (Å)" in result.output
        assert "480" in result.output

    def test_json_echoes_request(self, runner, tmp_path, widths_file):
        args = ["fit", "--input", str(widths_file), "--rho-min", "12"]
        report = _json_report(runner, tmp_path, args)
        assert report["input"] == str(widths_file)
        assert report["rho_min_fit_A"] == pytest.approx(12.0)
        assert report["omega_rad_per_s"] is None

    def test_missing_input(self, runner, tmp_path):
        result = runner.invoke(main, ["fit", "--input", str(tmp_path / "absent.csv")])
        assert result.exit_code == EXIT_IO

    def test_malformed_input(self, runner, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("distance,width\n10,1e-6\n")
        assert runner.invoke(main, ["fit", "--input", str(path)]).exit_code == EXIT_IO

    @pytest.mark.parametrize("row", ["12,nan", "12,inf"])
    def test_non_finite_input(self, runner, tmp_path, row):
        path = tmp_path / "widths.csv"
        path.write_text(f"rho_AA,width_eV\n{row}\n13,1e-6\n14,5e-7\n")
        result = runner.invoke(main, ["fit", "--input", str(path)])
        assert result.exit_code == EXIT_IO
        assert "non-finite" in result.output

    def test_too_few_rows(self, runner, widths_file):
        args = ["fit", "--input", str(widths_file), "--rho-min", "20"]
        assert runner.invoke(main, args).exit_code == EXIT_DOMAIN


class TestConfigFile:
    def test_key_value_file(self, runner, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("pos-a=0,0,10\npos-m=0,0,5\nalpha=0.205\nc6=3.6\n"
                          "kind=nonretarded\nformat=json\n")
        out = tmp_path / "report.json"
        result = runner.invoke(main, ["--config", str(config), "rate", "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())["ratio"] == pytest.approx(1.02676, abs=1e-5)

    def test_command_line_overrides_file(self, runner, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("pos-a=0,0,10\nc6=3.6\nkind=nonretarded\n")
        report = _json_report(runner, tmp_path,
                              ["--config", str(config), "rate", "--pos-a", "0,0,5"])
        assert report["parameters"]["pos_a_A"] == pytest.approx([0.0, 0.0, 5.0])

    def test_yaml_file(self, runner, tmp_path, widths_file):
        config = tmp_path / "fit.yaml"
        config.write_text(f"input: {widths_file}\nformat: json\n")
        out = tmp_path / "fit.json"
        result = runner.invoke(main, ["--config", str(config), "fit", "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())["C6_eV_A6"] == pytest.approx(3.6, rel=1e-9)

    def test_shared_file_with_command_specific_choice(self, runner, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("format=text\nc6=3.6\npos-a=0,0,10\n")
        out = tmp_path / "fig3.csv"
        result = runner.invoke(main, ["--config", str(config), "scan", "--figure", "3",
                                      "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert len(read_scan_csv(out.read_text())) == 41
        result = runner.invoke(main, ["--config", str(config), "rate"])
        assert result.exit_code == 0, result.output
        assert "ICD rate" in result.output

    def test_missing_config(self, runner, tmp_path):
        args = ["--config", str(tmp_path / "absent.conf"), "rate", "--pos-a", "0,0,10",
                "--c6", "3.6"]
        assert runner.invoke(main, args).exit_code == EXIT_IO


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output
