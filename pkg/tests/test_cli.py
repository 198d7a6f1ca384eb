import os
from fractions import Fraction as F

import pytest

from siacpost.cli import main


SUBCOMMANDS = ("kernel", "solve", "filter", "converge", "timeseries")


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help_exits_zero(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    assert "--" in capsys.readouterr().out


def test_unknown_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "tp1", "--d", "1", "--n", "20", "--t", "0", "--bogus"])
    assert exc.value.code == 2


def test_bad_problem_exit_code(tmp_path, capsys):
    rc = main(["solve", "tp9", "--d", "1", "--n", "20", "--t", "0",
               "--out", str(tmp_path)])
    assert rc == 2
    assert "tp9" in capsys.readouterr().err


def test_kernel_exact_symmetric(tmp_path, capsys):
    rc = main(["kernel", "symmetric", "1", "interior", "--exact",
               "--out", str(tmp_path)])
    assert rc == 0
    text = (tmp_path / "kernel_symmetric_d1_interior_coeffs.csv").read_text()
    rows = text.strip().splitlines()
    assert rows[1].split(",")[1] == "-1/12"
    assert rows[2].split(",")[1] == "7/6"
    assert rows[3].split(",")[1] == "-1/12"


def test_kernel_np0_denominators(tmp_path):
    rc = main(["kernel", "np0", "3", "left", "--exact", "--out", str(tmp_path)])
    assert rc == 0
    vec = (tmp_path / "kernel_np0_d3_left_endpoint_vector.csv").read_text()
    lines = vec.strip().splitlines()[1:]
    assert len(lines) == 40
    for line in lines:
        val = F(line.split(",")[1])
        assert 10080 % val.denominator == 0


def test_kernel_srv_magnitudes(tmp_path):
    main(["kernel", "srv", "3", "left", "--exact", "--out", str(tmp_path)])
    main(["kernel", "np0", "3", "left", "--exact", "--out", str(tmp_path)])
    def max_entry(name):
        lines = (tmp_path / name).read_text().strip().splitlines()[1:]
        return max(abs(F(l.split(",")[1])) for l in lines)
    srv = max_entry("kernel_srv_d3_left_endpoint_vector.csv")
    np0 = max_entry("kernel_np0_d3_left_endpoint_vector.csv")
    assert len((tmp_path / "kernel_srv_d3_left_coeffs.csv")
               .read_text().strip().splitlines()) == 14  # 13 polynomials + header
    assert srv / np0 > 50


def test_kernel_samples(tmp_path):
    rc = main(["kernel", "np0", "1", "left", "--samples", "33", "--out", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "kernel_np0_d1_left_samples.csv").read_text().strip().splitlines()
    assert lines[0] == "x,value" and len(lines) == 34


def test_kernel_needs_mode(tmp_path):
    assert main(["kernel", "np0", "1", "left", "--out", str(tmp_path)]) == 2


def test_solve_and_filter_smoke(tmp_path):
    rc = main(["solve", "tp1", "--d", "1", "--n", "20", "--t", "0.1",
               "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "solve_tp1_d1_n20_samples.csv").exists()
    rc = main(["filter", "tp1", "--family", "np0", "--d", "1", "--n", "20",
               "--t", "0.1", "--out", str(tmp_path)])
    assert rc == 0
    text = (tmp_path / "filter_tp1_np0_d1_n20_left_samples.csv").read_text()
    assert text.startswith("x,value,exact_solution,abs_error")


def test_timeseries_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# tiny smoke configuration\n"
        "problem = tp1\n"
        "d = 1\n"
        "filters = dg,np0\n"
        "mesh_sizes = 20,40\n"
        "final_times = 0.0\n"
        "blend = false\n")
    rc = main(["timeseries", str(cfg), "--out", str(tmp_path)])
    assert rc == 0
    out = (tmp_path / "timeseries_tp1_d1.csv").read_text().strip().splitlines()
    assert out[0] == "problem,d,filter,region,norm,N,T,value,kind"
    assert len(out) > 1


def test_timeseries_empty_filters(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("problem = tp1\nd = 1\nfilters =\n"
                   "mesh_sizes = 20\nfinal_times = 0.0\n")
    rc = main(["timeseries", str(cfg), "--out", str(tmp_path)])
    assert rc == 0
    out = (tmp_path / "timeseries_tp1_d1.csv").read_text().strip().splitlines()
    assert len(out) == 1  # header only


def test_timeseries_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("problem = tp1\nwibble = 3\n")
    assert main(["timeseries", str(cfg), "--out", str(tmp_path)]) == 2
    cfg.write_text("problem = nothere\nd = 1\nfilters = dg\n"
                   "mesh_sizes = 20\nfinal_times = 0\n")
    assert main(["timeseries", str(cfg), "--out", str(tmp_path)]) == 2


def test_timeseries_flag_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("problem = tp1\nd = 1\nfilters = dg\n"
                   "mesh_sizes = 20\nfinal_times = 0.0\n")
    rc = main(["timeseries", str(cfg), "--filters", "np0", "--no-blend",
               "--out", str(tmp_path)])
    assert rc == 0
    text = (tmp_path / "timeseries_tp1_d1.csv").read_text()
    assert "np0" in text and ",dg," not in text


def test_config_linspace_times():
    import numpy as np
    from siacpost.cli import _times_from
    ts = _times_from("linspace:0:1:5")
    assert ts == tuple(np.linspace(0, 1, 5))


def test_converge_smoke(tmp_path, capsys):
    rc = main(["converge", "tp1", "--d", "1", "--filters", "np0",
               "--n-list", "20,40", "--t", "0.25", "--no-blend",
               "--out", str(tmp_path / "c.csv")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "rate" in out and (tmp_path / "c.csv").exists()


def test_outdir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SIACPOST_OUTDIR", str(tmp_path / "envout"))
    rc = main(["kernel", "symmetric", "1", "--exact"])
    assert rc == 0
    assert (tmp_path / "envout" / "kernel_symmetric_d1_interior_coeffs.csv").exists()
