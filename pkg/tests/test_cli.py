import csv
import io
import json
import math

import numpy as np
import pytest

from radpoly.basis import degree_for_size
from radpoly.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_OK, main
from radpoly.experiments import (
    ConfigError,
    ExperimentConfig,
    check_report,
    pool_map,
    run_cond,
    run_gram,
    run_interp,
    table2_deviations,
)
from radpoly.report import ExperimentReport, fmt


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _parse(text):
    prov = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            k, v = line[2:].split(": ", 1)
            prov[k] = json.loads(v)
        else:
            body.append(line)
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return prov, rows[0], rows[1:]


class TestFormat:
    def test_six_significant_digits(self):
        assert fmt(4.2858412e-4) == "4.28584e-04"
        assert fmt(1.0) == "1.00000e+00"

    def test_specials(self):
        assert fmt(math.nan) == "nan"
        assert fmt(math.inf) == "inf"
        assert fmt(3) == "3"
        assert fmt(True) == "1"
        assert fmt(np.float64(2.5)) == "2.50000e+00"

    def test_row_width_checked(self):
        with pytest.raises(ValueError):
            ExperimentReport(["a", "b"]).add(1)

    def test_quoting(self):
        rep = ExperimentReport(["label"])
        rep.add("a,b")
        assert rep.to_csv().splitlines()[-1] == '"a,b"'


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig("interp")
        assert cfg.dim == 2 and cfg.degree() == 20
        assert len(cfg.eps_values()) == 30
        assert cfg.eps_values()[0] == pytest.approx(1e-2)
        assert cfg.eps_values()[-1] == pytest.approx(1e2)

    def test_cube_is_three_dimensional(self):
        assert ExperimentConfig("interp", points="cube", N=1331).dim == 3

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(points="disk"),
            dict(points="star", dim=3),
            dict(eps_min=0.0),
            dict(eps_min=2.0, eps_max=1.0),
            dict(kernel="TPS"),
            dict(families=("r",)),
            dict(N=0),
            dict(n=0),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            ExperimentConfig("interp", **kwargs)

    def test_n_too_large_for_N(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("interp", N=441, n=21).degree()


def test_pool_map_keeps_order():
    assert pool_map(lambda x: x * x, range(20), jobs=4) == [x * x for x in range(20)]


class TestRunners:
    def test_interp_row_count(self):
        rep = run_interp(ExperimentConfig("interp", N=121))
        assert len(rep.rows) == 30 + 4
        assert rep.column("family")[:30] == ["GA"] * 30
        assert rep.column("family")[30:] == ["p", "p_2", "q", "q_2"]

    def test_jobs_do_not_change_results(self):
        a = run_interp(ExperimentConfig("interp", N=49, eps_count=6, jobs=1))
        b = run_interp(ExperimentConfig("interp", N=49, eps_count=6, jobs=3))
        # the config echo differs in ``jobs``; compare the data rows
        assert a.to_csv().split("family,")[1] == b.to_csv().split("family,")[1]

    def test_interp_star_all_families(self):
        rep = run_interp(ExperimentConfig("interp", points="star", N=121, eps_count=3))
        recs = rep.records()
        assert {r["family"] for r in recs} == {"GA", "p", "p_2", "q", "q_2"}
        assert all(np.isfinite(r["rmse"]) for r in recs)

    def test_interp_cube(self):
        rep = run_interp(ExperimentConfig("interp", points="cube", N=125, eps_count=2))
        assert rep.records()[-1]["n"] == degree_for_size(125, 3)

    def test_cond_rows(self):
        rep = run_cond(ExperimentConfig("cond"))
        assert len(rep.rows) == 15
        assert all(len(r) == len(rep.header) for r in rep.rows)
        first = rep.records()[0]
        assert all(first[k] < 1e3 for k in rep.header if k.startswith("cond_"))

    def test_gram_symmetric(self):
        rep = run_gram(ExperimentConfig("gram"))
        A = np.array([r[2:] for r in rep.rows if r[0] == "p_2"])
        np.testing.assert_allclose(A, A.T, rtol=0, atol=1e-12 * np.abs(A).max())
        assert not check_report(ExperimentConfig("gram"), rep)

    def test_table2_deviation_detector(self):
        rep = ExperimentReport(["rbf", "space", "n", "distance", "cond", "quad_order"])
        rep.add("GA", "H_n", 2, 4.5e-4, 1.0, 60)
        rep.add("GA", "H_n", 7, 2.5e-12, 1.0, 60)
        assert len(table2_deviations(rep)) == 1


class TestCli:
    def test_table2_default(self, capsys):
        code, out, _ = _run(capsys, "table2", "--check")
        assert code == EXIT_OK
        prov, header, rows = _parse(out)
        assert header == ["rbf", "space", "n", "distance", "cond", "quad_order"]
        assert len(rows) == 72
        ga_h2 = next(r for r in rows if r[:3] == ["GA", "H_n", "2"])
        assert float(ga_h2[3]) == pytest.approx(4.28e-4, rel=0.05)
        assert prov["config"]["quad_order"] == 60
        assert prov["rank_collapse"] == []

    def test_table2_low_quadrature_rejected(self, capsys):
        code, _, err = _run(capsys, "table2", "--quad-order", "10")
        assert code == EXIT_CONFIG
        assert "at least 16" in err

    def test_interp_bad_N(self, capsys):
        code, _, _ = _run(capsys, "interp", "--N", "440")
        assert code == EXIT_CONFIG

    def test_pde_star_rejected(self, capsys):
        code, _, _ = _run(capsys, "pde", "--points", "star", "--N", "121")
        assert code == EXIT_CONFIG

    def test_check_failure_code(self, capsys):
        # n=1 is far too coarse for sin(x+y), so the 1e-9 threshold cannot hold
        code, _, err = _run(capsys, "pde", "--points", "halton", "--n", "1", "--eps-count", "0", "--check")
        assert code == EXIT_CHECK
        assert "CHECK FAIL" in err

    def test_out_file_and_provenance(self, capsys, tmp_path):
        path = tmp_path / "cond.csv"
        code, out, _ = _run(capsys, "cond", "--n-max", "4", "--out", str(path))
        assert code == EXIT_OK and out == ""
        prov, header, rows = _parse(path.read_text())
        assert header == ["n", "N", "cond_GA", "cond_p", "cond_p_0", "cond_p_1", "cond_p_2"]
        assert [r[1] for r in rows] == ["3", "5", "7", "9"]
        assert prov["config"]["n_max"] == 4
        assert prov["ga_eps"] == 1.0
        assert prov["backend"] in ("numba", "numpy")

    def test_points_export(self, capsys):
        code, out, _ = _run(capsys, "points", "--points", "halton", "--pde-points")
        _, header, rows = _parse(out)
        assert header == ["x", "y", "is_boundary"]
        assert len(rows) == 441
        assert sum(int(r[2]) for r in rows) == 80

    @pytest.mark.parametrize(
        "argv",
        [
            ("interp", "--N", "49", "--eps-count", "5"),
            ("pde", "--points", "halton", "--N", "121", "--eps-count", "4"),
            ("gram", "--n", "5"),
            ("points", "--points", "star", "--N", "121"),
        ],
    )
    def test_deterministic_bytes(self, capsys, argv):
        _, a, _ = _run(capsys, *argv)
        _, b, _ = _run(capsys, *argv)
        assert a == b and a

    def test_family_subset(self, capsys):
        code, out, _ = _run(capsys, "interp", "--N", "49", "--eps-count", "0", "--family", "q_2,p_1")
        _, _, rows = _parse(out)
        assert code == EXIT_OK
        assert [r[0] for r in rows] == ["q_2", "p_1"]
