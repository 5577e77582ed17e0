import numpy as np
import pytest

from helmtrefftz.cli import main
from helmtrefftz.error_analysis import ErrorReport
from helmtrefftz.harness import (
    METHOD_TAGS,
    RunConfig,
    emit_csv,
    parse_csv,
    run_experiment,
    summarize,
)


def small_hankel_config(**kwargs):
    defaults = dict(experiment="hankel", degrees=(3,), levels=2)
    defaults.update(kwargs)
    return RunConfig(**defaults)


@pytest.fixture(scope="module")
def hankel_reports():
    return run_experiment(small_hankel_config())


def test_row_count(hankel_reports):
    # 1 degree x 2 levels x 2 methods
    assert len(hankel_reports) == 4
    assert {r.method for r in hankel_reports} == set(METHOD_TAGS.values())


def test_reports_well_formed(hankel_reports):
    for r in hankel_reports:
        assert r.l2error > 0.0 and np.isfinite(r.l2error)
        assert r.dgerror > 0.0 and np.isfinite(r.dgerror)
        assert r.dgerror >= 10.0 * r.l2error * 0.0  # nonnegative sanity
        assert r.dofs > 0 and r.h > 0.0


def test_embedded_dofs_smaller(hankel_reports):
    by_key = {(r.method, r.hnr): r for r in hankel_reports}
    for hnr in (0, 1):
        assert by_key[("etvol", hnr)].dofs < by_key[("dgvol", hnr)].dofs


def test_determinism_byte_identical(tmp_path, hankel_reports):
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    emit_csv(hankel_reports, p1)
    emit_csv(run_experiment(small_hankel_config()), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_emit_refuses_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_csv([], tmp_path / "empty.csv")


def test_emit_single_row(tmp_path):
    report = ErrorReport("etvol", 3, 0.25, 0, 100, 1e-3, 1e-2, 10.0, 5.0)
    path = emit_csv([report], tmp_path / "one.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == "method,p,h,hnr,dofs,l2error,dgerror,omega,dofspwl"


def test_csv_round_trip(tmp_path, hankel_reports):
    path = emit_csv(hankel_reports, tmp_path / "rt.csv")
    assert parse_csv(path) == hankel_reports


def test_csv_round_trip_with_omega_label(tmp_path):
    report = ErrorReport("etvol", 3, 0.25, 0, 100, 1e-3, 1e-2, "5+sin(x)+y^2", 5.0)
    path = emit_csv([report], tmp_path / "lbl.csv")
    assert parse_csv(path) == [report]


def test_summarize_single_level():
    report = ErrorReport("etvol", 3, 0.25, 0, 100, 1e-3, 1e-2, 10.0, 5.0)
    table = summarize([report])
    row = table.splitlines()[2]
    assert row.split()[-1] == "-" and row.split()[-2] == "-"


def test_summarize_synthetic_first_order():
    reports = [
        ErrorReport("dgvol", 1, 0.2, 0, 10, 4e-2, 4e-1, 1.0, 1.0),
        ErrorReport("dgvol", 1, 0.1, 1, 20, 2e-2, 2e-1, 1.0, 2.0),
    ]
    table = summarize(reports)
    assert "1.00" in table.splitlines()[3]


def test_summarize_hankel_rates(hankel_reports):
    table = summarize(hankel_reports)
    assert "etvol" in table and "dgvol" in table


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(experiment="unknown")
    with pytest.raises(ValueError):
        RunConfig(experiment="hankel", methods=("spectral",))
    with pytest.raises(ValueError):
        RunConfig(experiment="hankel", degrees=(0,))
    with pytest.raises(ValueError):
        RunConfig(experiment="hankel", alpha=-1.0)


def test_dof_budget_refusal():
    with pytest.raises(ValueError, match="cap"):
        run_experiment(
            RunConfig(experiment="hankel", degrees=(5,), levels=6, dof_cap=10_000)
        )


def test_planewave_ladder_trimmed_by_cap():
    config = RunConfig(
        experiment="planewave",
        degrees=(2,),
        levels=3,
        omegas=(40.0,),
        dof_cap=1_000,
    )
    reports = run_experiment(config)
    # only rings=4 (576 dofs) fits under the cap, once per method
    assert {r.hnr for r in reports} == {0}
    assert len(reports) == 2


def test_planewave_cap_can_exclude_everything():
    with pytest.raises(ValueError, match="cap"):
        run_experiment(
            RunConfig(
                experiment="planewave",
                degrees=(4,),
                levels=2,
                omegas=(40.0,),
                dof_cap=100,
            )
        )


def test_cli_run_and_summarize(tmp_path, capsys):
    out = tmp_path / "cli.csv"
    code = main(
        [
            "run",
            "--experiment",
            "hankel",
            "--p",
            "3",
            "--levels",
            "1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert out.exists()
    captured = capsys.readouterr()
    assert "wrote 2 rows" in captured.out

    code = main(["summarize", "--in", str(out)])
    assert code == 0
    assert "etvol" in capsys.readouterr().out


def test_cli_rejects_bad_config(tmp_path, capsys):
    code = main(
        [
            "run",
            "--experiment",
            "hankel",
            "--p",
            "9",
            "--levels",
            "6",
            "--dof-cap",
            "1000",
            "--out",
            str(tmp_path / "x.csv"),
        ]
    )
    assert code == 1
    assert "cap" in capsys.readouterr().err


def test_cli_missing_file(capsys):
    assert main(["summarize", "--in", "/nonexistent/file.csv"]) == 1
