import os

import numpy as np
import pytest

from unittest import mock

from sbm_gft import __version__
from sbm_gft.config import Config
from sbm_gft.errors import ValidationError
from sbm_gft.utils import read_csv_rows, read_json_file, write_csv
from sbm_gft.experiments import (
    ExperimentConfig,
    execute,
    manifest_line,
    run_compare_bases,
    run_convergence_check,
    run_perturb_sweep,
    run_z5_fig4,
    run_z5_fig5,
    run_z5_fig5a,
    run_z5_fig5b,
    run_z5_table1,
    run_z5_table2,
    sweep_measure,
    z5_connection,
    z5_group,
    z5_spec,
)

Z5_MODEL_ROW = [2622.1, -1290.3, -970.82, 468.1, 370.8, 0.]

CAYLEY_CONFIG = {
    "group": [5],
    "connection": {"0": 0.2, "1": 0.8, "2": 0.2, "3": 0.2, "4": 0.8},
    "mu": [0.4, 0.15, 0.15, 0.15, 0.15],
    "N": 600,
}


def test_sweep_measure():
    np.testing.assert_allclose(sweep_measure(0, (4, -1, -1, -1, -1), 300), 0.2)
    np.testing.assert_allclose(sweep_measure(20, (4, -1, -1, -1, -1), 300), [140 / 300] + [40 / 300] * 4)
    np.testing.assert_allclose(sweep_measure(10, (2, 1, -1, -1, -1), 150), np.array([50, 40, 20, 20, 20]) / 150)
    with pytest.raises(ValidationError):
        sweep_measure(60, (4, -1, -1, -1, -1), 300)
    with pytest.raises(ValidationError):
        sweep_measure(1, (1, 1), 10)


def test_z5_table1_model_row():
    table = run_z5_table1(N=600, seeds=(1,))
    assert table.header == ("row", "seed", "lambda_1", "lambda_2", "lambda_3", "lambda_4", "lambda_5", "lambda_6")
    model, sample = table.rows
    assert model[:2] == ("model", "")
    np.testing.assert_allclose(model[2:], np.array(Z5_MODEL_ROW) / 10, atol=0.01)
    assert sample[:2] == ("sample", 1)
    assert sample[2] == pytest.approx(model[2], rel=0.05)


@pytest.mark.slow
def test_z5_table1_samples():
    table = run_z5_table1(seeds=(1, 2, 3))
    model = np.array(table.rows[0][2:], dtype=float)
    np.testing.assert_allclose(model, Z5_MODEL_ROW, atol=0.1)
    for row in table.rows[1:]:
        sample = np.array(row[2:], dtype=float)
        np.testing.assert_allclose(sample[:5], model[:5], rtol=0.01)
        assert abs(sample[5]) < 0.3 * abs(model[4])


@pytest.mark.slow
def test_z5_table2_full_size():
    table = run_z5_table2(seeds=(1, 2, 3))
    assert len(table.rows) == 3 * 5
    assert min(table.column("agreement")) >= 0.99
    assert min(table.column("paired_agreement")) >= 0.99
    assert min(row[4] for row in table.rows if row[1] == 1) >= 0.999


def test_z5_table2_agreement():
    table = run_z5_table2(N=1500, seeds=(1, 2, 3))
    assert len(table.rows) == 3 * 5
    assert [row[1] for row in table.rows[:5]] == [1, 2, 3, 4, 5]
    assert min(table.column("agreement")) >= 0.97
    graph = np.array(table.column("graph_eigenvalue"))
    model = np.array(table.column("model_eigenvalue"))
    np.testing.assert_allclose(graph, model, rtol=0.05)
    np.testing.assert_allclose(table.column("paired_agreement"), table.column("agreement"), atol=1e-12)


def test_z5_fig4_sine_vectors_stay_exact():
    table = run_z5_fig4(steps=(0, 5, 20))
    assert len(table.rows) == 3 * 5
    for k, i, agreement in table.rows:
        if k == 0 or i in (3, 5):
            assert agreement == pytest.approx(1., abs=1e-8)
        assert 0. < agreement <= 1.
    first = [row[2] for row in table.rows if row[0] == 20 and row[1] == 1]
    assert first[0] < 1. - 1e-4


def test_z5_fig5a():
    table = run_z5_fig5a(steps=(0, 10))
    uniform = [agreement for k, i, agreement in table.rows if k == 0]
    np.testing.assert_allclose(uniform, 1., atol=1e-8)
    assert min(agreement for k, i, agreement in table.rows if k == 10) < 1. - 1e-4


def test_z5_fig5b():
    table = run_z5_fig5b()
    first = [agreement for model, i, agreement in table.rows if model == 1]
    second = [agreement for model, i, agreement in table.rows if model == 2]
    assert len(first) == len(second) == 5
    assert min(second) >= min(first)
    np.testing.assert_allclose([first[2], first[4]], 1., atol=1e-8)


def test_z5_fig5_custom_models():
    sweep, comparison = run_z5_fig5(model_b=(1200, 1200, 1200, 1200, 1200), steps=(0,))
    assert sweep.name == "z5_fig5a"
    np.testing.assert_allclose(sweep.column("agreement"), 1., atol=1e-8)
    second = [agreement for model, i, agreement in comparison.rows if model == 2]
    np.testing.assert_allclose(second, 1., atol=1e-8)


def test_compare_bases():
    config = ExperimentConfig("compare-bases", CAYLEY_CONFIG)
    group, f = config.cayley()
    table = run_compare_bases(group, f, config.spec())
    assert table.column("i") == [1, 2, 3, 4, 5]
    np.testing.assert_allclose(table.column("cayley_eigenvalue"), [2.2, -0.970820, -0.970820, 0.370820, 0.370820],
                               atol=1e-6)
    agreement = table.column("agreement")
    assert agreement[2] == pytest.approx(1., abs=1e-8)
    assert agreement[4] == pytest.approx(1., abs=1e-8)
    # The exact sine vectors keep their eigenvalue, N tau gamma.
    assert table.column("model_eigenvalue")[4] == pytest.approx(90 * 0.370820, abs=1e-3)


def test_perturb_sweep_summary():
    sweep, summary = run_perturb_sweep(z5_spec(600), [0., 0.05], trials=2, signals=2, seed=3)
    assert len(sweep.rows) == 2 * 2 * 5
    assert summary.header == ("epsilon", "rows", "projection_violations", "v_violations", "shift_violations",
                              "max_ratio")
    assert [row[:5] for row in summary.rows] == [(0., 10, 0, 0, 0), (0.05, 10, 0, 0, 0)]
    assert summary.rows[0][5] == 0.
    assert 0. < summary.rows[1][5] <= 1.


def test_convergence_check_validation():
    spec = z5_spec(250)
    with pytest.raises(ValidationError):
        run_convergence_check(spec, [500, 250], [1])
    with pytest.raises(ValidationError):
        run_convergence_check(spec, [250], [])


def test_convergence_of_the_leading_eigenspace():
    table = run_convergence_check(z5_spec(), [250, 2000], seeds=(1, 2, 3))
    assert table.header == ("N", "group", "W_eigenvalue", "d", "mean_distance", "samples")
    leading = {row[0]: row for row in table.rows if row[1] == "1"}
    assert leading[250][5] == 3
    assert leading[2000][2] == pytest.approx(2622.1 / 3, rel=0.01)
    assert leading[2000][4] < leading[250][4]
    assert leading[250][4] < 0.2
    assert leading[2000][4] < 0.06


def test_experiment_config_validation(tmp_path):
    with pytest.raises(ValidationError):
        ExperimentConfig("unknown")
    with pytest.raises(ValidationError):
        ExperimentConfig("basis", {"N": "many"})
    with pytest.raises(ValidationError):
        ExperimentConfig("basis", scale=0)
    with pytest.raises(ValidationError):
        ExperimentConfig("basis", scale=True)
    with pytest.raises(ValidationError):
        ExperimentConfig("perturb-sweep", trials=0)
    with pytest.raises(ValidationError):
        ExperimentConfig("sample", seeds=(-1,))
    with pytest.raises(ValidationError):
        ExperimentConfig("gft")
    with pytest.raises(ValidationError):
        ExperimentConfig("gft", {"signal": str(tmp_path / "missing.csv")})
    with pytest.raises(ValidationError):
        ExperimentConfig("compare-bases")
    with pytest.raises(ValidationError):
        ExperimentConfig("basis", {"A": [[0.5]], "mu": [1.]}).spec()
    with mock.patch.object(Config, "default_seeds", []):
        with pytest.raises(ValidationError):
            ExperimentConfig("sample")


def test_experiment_config_resolution():
    assert ExperimentConfig("sample").seeds == tuple(Config.default_seeds)
    assert ExperimentConfig("sample", {"seeds": [4, 5]}).seeds == (4, 5)
    assert ExperimentConfig("sample", {"seeds": [4, 5]}, seeds=(6,)).seeds == (6,)

    default = ExperimentConfig("basis")
    assert not default.has_model()
    assert default.spec().N == Config.z5_graph_size
    assert ExperimentConfig("basis", scale=600).spec().k == (200, 100, 100, 100, 100)

    explicit = ExperimentConfig("basis", {"A": [[0.5, 0.1], [0.1, 0.5]], "mu": [0.5, 0.5], "N": 10})
    assert explicit.spec().k == (5, 5)
    assert explicit.epsilons == tuple(Config.sweep_epsilons)
    assert ExperimentConfig("perturb-sweep", {"trials": 7}).trial_count == 7
    assert ExperimentConfig("perturb-sweep", {"trials": 7}, trials=2).trial_count == 2

    cayley = ExperimentConfig("compare-bases", CAYLEY_CONFIG)
    assert cayley.spec().k == (240, 90, 90, 90, 90)
    uniform = ExperimentConfig("basis", {"group": [5], "connection": {"0": 0.5}, "N": 50})
    assert uniform.spec().k == (10,) * 5

    assert default.digest() == ExperimentConfig("basis", output="elsewhere/").digest()
    assert default.digest() != ExperimentConfig("basis", scale=600).digest()
    assert default.manifest_line() == f'sbm-gft {__version__} config={default.digest()}'
    assert manifest_line("abc") == f'sbm-gft {__version__} config=abc'


def test_from_file(tmp_path):
    path = str(tmp_path / "run.json")
    with open(path, "w") as fl:
        fl.write('{"A": [[0.5, 0.1], [0.1, 0.5]], "mu": [0.5, 0.5], "N": 10, "seeds": [9]}')
    config = ExperimentConfig.from_file("sample", path, output=str(tmp_path))
    assert config.seeds == (9,)
    assert config.spec().N == 10
    assert ExperimentConfig.from_file("basis", None).data == {}


def test_execute_basis(tmp_path):
    config = ExperimentConfig("basis", output=str(tmp_path / "a"), scale=60)
    manifest = execute(config)
    assert set(manifest.outputs) == {"basis.csv", "basis.json", "spectrum.csv"}
    assert manifest.version == __version__
    assert manifest.config_hash == config.digest()

    written = read_json_file(str(tmp_path / "a" / "manifest.json"))
    assert written["outputs"] == manifest.outputs

    with open(str(tmp_path / "a" / "basis.csv")) as fl:
        assert fl.readline() == f'# {config.manifest_line()}\n'
    spectrum = read_csv_rows(str(tmp_path / "a" / "spectrum.csv"))
    assert spectrum[0] == ["index", "eigenvalue", "residual"]
    assert float(spectrum[1][1]) == pytest.approx(2622.1 / 100, abs=0.01)

    rerun = execute(ExperimentConfig("basis", output=str(tmp_path / "b"), scale=60))
    assert rerun.outputs == manifest.outputs


def test_execute_sample_is_reproducible(tmp_path):
    first = execute(ExperimentConfig("sample", seeds=(1, 2), output=str(tmp_path / "a"), scale=120))
    second = execute(ExperimentConfig("sample", seeds=(1, 2), output=str(tmp_path / "b"), scale=120))
    assert set(first.outputs) == {"graph_1.csv", "graph_1.json", "graph_2.csv", "graph_2.json"}
    assert first.outputs == second.outputs
    assert first.outputs["graph_1.csv"] != first.outputs["graph_2.csv"]


def test_execute_gft(tmp_path):
    signal_path = str(tmp_path / "signal.csv")
    write_csv(signal_path, ["x"], [[float(i % 7)] for i in range(60)])
    config = ExperimentConfig("gft", {"signal": signal_path}, seeds=(3,), output=str(tmp_path / "out"), scale=60)
    manifest = execute(config)
    assert set(manifest.outputs) == {"gft.csv", "gft_graph_3.csv"}

    rows = read_csv_rows(str(tmp_path / "out" / "gft.csv"))
    assert rows[0] == ["group", "W_eigenvalue", "d", "projection_norm", "coefficient_real", "coefficient_imag"]
    assert len(rows) == 1 + 5 + 1
    assert rows[-1][0] == "kernel"
    assert rows[-1][2] == "55"
    energy = sum(float(row[3]) ** 2 for row in rows[1:])
    assert energy == pytest.approx(sum(float(i % 7) ** 2 for i in range(60)), rel=1e-6)


def test_execute_sweep_and_compare(tmp_path):
    sweep = ExperimentConfig("perturb-sweep", {"epsilons": [0.01], "signals": 1}, seeds=(2,),
                             output=str(tmp_path), scale=600, trials=1)
    assert set(execute(sweep).outputs) == {"perturb_sweep.csv", "perturb_sweep_summary.csv"}

    compare = ExperimentConfig("compare-bases", CAYLEY_CONFIG, output=str(tmp_path))
    assert set(execute(compare).outputs) == {"compare_bases.csv"}
    assert os.path.isfile(str(tmp_path / "manifest.json"))
