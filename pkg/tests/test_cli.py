"""Command line interface, exercised in-process through main()."""

import csv
import json

import numpy as np
import pytest

from skewdisc.cli import CHAT_COLUMNS, MSI_COLUMNS, CsvFormatError, load_csv, main
from skewdisc.linalg import SpdMatrix
from skewdisc.model import MixtureParams, sample
from skewdisc.montecarlo import msi


def mixture_params(tau=8.0):
    h1 = np.sqrt(tau)
    return MixtureParams(alpha1=0.7,
                         mu1=np.array([-0.3 * h1, 0.0, 0.0]),
                         mu2=np.array([0.7 * h1, 0.0, 0.0]),
                         sigma=SpdMatrix(np.eye(3)))


def write_dataset(path, data, with_labels=False):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        names = [f"x{j}" for j in range(data.p)]
        writer.writerow(names + ["label"] if with_labels else names)
        for i in range(data.n):
            row = [repr(float(v)) for v in data.observations[i]]
            if with_labels:
                row.append(str(int(data.labels[i])))
            writer.writerow(row)
    return str(path)


@pytest.fixture
def sample_csv(tmp_path):
    data = sample(mixture_params(), 2000, np.random.default_rng(60))
    return write_dataset(tmp_path / "data.csv", data)


@pytest.fixture
def labeled_csv(tmp_path):
    data = sample(mixture_params(), 2000, np.random.default_rng(61))
    return write_dataset(tmp_path / "labeled.csv", data, with_labels=True)


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def stderr_payload(err):
    return json.loads(err.strip().splitlines()[-1])


class TestLoadCsv:
    def test_plain_features(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text("x,y\n1.0,2.0\n3.0,4.0\n")
        ds = load_csv(str(path))
        assert ds.labels is None
        np.testing.assert_allclose(ds.observations,
                                   [[1.0, 2.0], [3.0, 4.0]])

    def test_label_column_any_position(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("x,label,y\n1.0,-1,2.0\n3.0,+1,4.0\n")
        ds = load_csv(str(path))
        np.testing.assert_array_equal(ds.labels, [-1, 1])
        np.testing.assert_allclose(ds.observations,
                                   [[1.0, 2.0], [3.0, 4.0]])

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("x,y\n1.0,2.0\n\n3.0,4.0\n")
        assert load_csv(str(path)).n == 2

    @pytest.mark.parametrize("content,line", [
        ("", 1),
        ("label\n-1\n", 1),
        ("x,y\n1.0\n", 2),
        ("x,y\n1.0,2.0\n3.0,oops\n", 3),
        ("x,label\n1.0,7\n", 2),
        ("x,y\n", 2),
    ])
    def test_errors_carry_line_numbers(self, tmp_path, content, line):
        path = tmp_path / "bad.csv"
        path.write_text(content)
        with pytest.raises(CsvFormatError) as excinfo:
            load_csv(str(path))
        assert f"line {line}" in str(excinfo.value)
        assert str(path) in str(excinfo.value)


class TestEstimate:
    def test_report_to_stdout(self, sample_csv, capsys):
        code, out, err = run_cli(
            ["estimate", sample_csv, "--method", "tobi"], capsys)
        assert code == 0 and err == ""
        report = json.loads(out)
        assert report["method"] == "TOBI"
        assert report["n"] == 2000 and report["p"] == 3
        assert len(report["scores"]) == 2000
        assert np.linalg.norm(report["unit"]) == pytest.approx(1.0, abs=1e-9)
        assert report["converged"] is True

    def test_report_to_file(self, sample_csv, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, out, _ = run_cli(
            ["estimate", sample_csv, "--method", "skewvec",
             "--output", str(out_path)], capsys)
        assert code == 0 and out == ""
        report = json.loads(out_path.read_text())
        assert report["method"] == "SKEWVEC"

    def test_every_method(self, labeled_csv, capsys):
        for method in ("mom", "skewvec", "tobi", "jade3", "lda", "pp"):
            argv = ["estimate", labeled_csv, "--method", method]
            if method == "mom":
                argv += ["--alpha1", "0.7"]
            code, out, err = run_cli(argv, capsys)
            assert code == 0, (method, err)
            assert json.loads(out)["method"] == method.upper()

    def test_mom_without_alpha_is_usage_error(self, sample_csv, capsys):
        code, _, err = run_cli(
            ["estimate", sample_csv, "--method", "mom"], capsys)
        assert code == 2
        payload = stderr_payload(err)
        assert payload["error"] == "UsageError"
        assert "--alpha1" in payload["message"]

    def test_missing_input_file(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["estimate", str(tmp_path / "nope.csv"), "--method", "tobi"],
            capsys)
        assert code == 2
        assert stderr_payload(err)["error"] == "UsageError"

    def test_lda_without_labels(self, sample_csv, capsys):
        code, _, err = run_cli(
            ["estimate", sample_csv, "--method", "lda"], capsys)
        assert code == 2
        assert stderr_payload(err)["error"] == "SupervisionRequiredError"

    def test_degenerate_sample(self, tmp_path, capsys):
        r = np.random.default_rng(62).standard_normal((100, 3))
        path = tmp_path / "sym.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["a", "b", "c"])
            for row in np.vstack([r, -r]):
                writer.writerow([repr(float(v)) for v in row])
        code, _, err = run_cli(
            ["estimate", str(path), "--method", "skewvec"], capsys)
        assert code == 1
        assert stderr_payload(err)["error"] == "DegenerateSkewnessError"

    def test_malformed_csv(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n1.0,2.0\n3.0\n")
        code, _, err = run_cli(
            ["estimate", str(path), "--method", "tobi"], capsys)
        assert code == 1
        payload = stderr_payload(err)
        assert payload["error"] == "CsvFormatError"
        assert "line 3" in payload["message"]

    def test_seed_reproducible(self, sample_csv, capsys):
        argv = ["estimate", sample_csv, "--method", "jade3", "--seed", "3"]
        _, first, _ = run_cli(argv, capsys)
        _, second, _ = run_cli(argv, capsys)
        assert first == second

    def test_unknown_method_rejected_by_parser(self, sample_csv):
        with pytest.raises(SystemExit):
            main(["estimate", sample_csv, "--method", "pca"])

    def test_round_trip_direction_quality(self, tmp_path, capsys):
        # median MSI against the true direction over 20 independent
        # datasets, fitting through the full CSV -> CLI -> JSON path
        params = mixture_params(tau=8.0)
        scores = []
        for seed in range(20):
            data = sample(params, 4000, np.random.default_rng(200 + seed))
            path = write_dataset(tmp_path / f"rt{seed}.csv", data)
            code, out, err = run_cli(
                ["estimate", path, "--method", "jade3"], capsys)
            assert code == 0, err
            unit = np.array(json.loads(out)["unit"])
            scores.append(msi(unit, np.array([1.0, 0.0, 0.0])))
        assert float(np.median(scores)) > 0.95


class TestConstants:
    def test_scalar_output(self, capsys):
        code, out, err = run_cli(
            ["constants", "--alpha1", "0.7", "--tau", "4", "--p", "3"],
            capsys)
        assert code == 0 and err == ""
        assert "42.37528344671205" in out
        assert "2.1904761904761902" in out
        assert "245.43451247165544" in out

    def test_full_matrices(self, capsys):
        code, out, _ = run_cli(
            ["constants", "--alpha1", "0.7",
             "--sigma", "1,0,0;0,1,0;0,0,1", "--h", "2,0,0"], capsys)
        assert code == 0
        assert out.count("limiting covariance") == 3
        assert "tau = 4.0" in out
        # the equivariant matrix here is diag(0, C0, C0)
        assert "42.375283" in out

    def test_tau_derived_and_checked(self, capsys):
        code, _, _ = run_cli(
            ["constants", "--alpha1", "0.7", "--tau", "4.0",
             "--sigma", "1,0;0,1", "--h", "2,0"], capsys)
        assert code == 0
        code, _, err = run_cli(
            ["constants", "--alpha1", "0.7", "--tau", "5.0",
             "--sigma", "1,0;0,1", "--h", "2,0"], capsys)
        assert code == 2
        assert "disagrees" in stderr_payload(err)["message"]

    @pytest.mark.parametrize("argv", [
        ["constants", "--alpha1", "0.7", "--tau", "4"],
        ["constants", "--alpha1", "0.7", "--p", "3"],
        ["constants", "--alpha1", "0.7", "--tau", "4", "--p", "3",
         "--sigma", "1,0;0,1"],
        ["constants", "--alpha1", "0.7", "--p", "3",
         "--sigma", "1,0;0,1", "--h", "2,0"],
        ["constants", "--alpha1", "0.7", "--tau", "4", "--p", "3",
         "--h", "1,0,oops"],
    ])
    def test_usage_errors(self, argv, capsys):
        code, _, err = run_cli(argv, capsys)
        assert code == 2
        assert stderr_payload(err)["error"] == "UsageError"

    def test_symmetric_weight_refused(self, capsys):
        code, _, err = run_cli(
            ["constants", "--alpha1", "0.5", "--tau", "4", "--p", "3"],
            capsys)
        assert code == 2
        payload = stderr_payload(err)
        assert payload["error"] == "WeightDivergenceError"
        assert "0.5" in payload["message"]


def write_config(path, **overrides):
    payload = dict(p=2, alpha_grid=[0.7], tau_grid=[8.0], n_grid=[300],
                   reps=6, master_seed=3, methods=["TOBI", "LDA"])
    payload.update(overrides)
    path.write_text(json.dumps(payload))
    return str(path)


class TestSimulate:
    def test_chat_writes_csv(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        out_csv = tmp_path / "chat.csv"
        code, out, err = run_cli(
            ["simulate-chat", cfg, str(out_csv)], capsys)
        assert code == 0, err
        assert out.strip() == f"wrote 2 rows to {out_csv}"
        with open(out_csv, newline="") as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == CHAT_COLUMNS
        assert len(rows) == 3
        assert {r[0] for r in rows[1:]} == {"TOBI", "LDA"}

    def test_msi_writes_csv(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json", p=3,
                           sigma_mode="random-aat")
        out_csv = tmp_path / "msi.csv"
        code, out, _ = run_cli(["simulate-msi", cfg, str(out_csv)], capsys)
        assert code == 0
        with open(out_csv, newline="") as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == MSI_COLUMNS
        header = rows[0]
        msi_col = header.index("mean_msi")
        for r in rows[1:]:
            assert 0.0 < float(r[msi_col]) <= 1.0

    def test_deterministic_across_workers(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json", reps=8)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(["simulate-chat", cfg, str(a), "--workers", "1"],
                       capsys)[0] == 0
        assert run_cli(["simulate-chat", cfg, str(b), "--workers", "2"],
                       capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_minimal_config_single_row(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json", methods=["TOBI"], reps=10)
        out_csv = tmp_path / "one.csv"
        code, _, _ = run_cli(["simulate-chat", cfg, str(out_csv)], capsys)
        assert code == 0
        with open(out_csv, newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 2

    def test_single_replicate_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json", reps=1)
        code, _, err = run_cli(
            ["simulate-chat", cfg, str(tmp_path / "o.csv")], capsys)
        assert code == 2
        payload = stderr_payload(err)
        assert payload["error"] == "ConfigError"
        assert payload["message"].startswith("reps:")

    def test_unknown_config_field(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json", extra=1)
        code, _, err = run_cli(
            ["simulate-chat", cfg, str(tmp_path / "o.csv")], capsys)
        assert code == 2
        assert "extra: unknown config field" in stderr_payload(err)["message"]

    def test_missing_config_field(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"p": 2}))
        code, _, err = run_cli(
            ["simulate-chat", str(path), str(tmp_path / "o.csv")], capsys)
        assert code == 2
        assert "missing config field" in stderr_payload(err)["message"]

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        code, _, err = run_cli(
            ["simulate-chat", str(path), str(tmp_path / "o.csv")], capsys)
        assert code == 2
        assert stderr_payload(err)["error"] == "ConfigError"

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["simulate-chat", str(tmp_path / "nope.json"),
             str(tmp_path / "o.csv")], capsys)
        assert code == 2
        assert stderr_payload(err)["error"] == "UsageError"

    def test_missing_output_directory(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        code, _, err = run_cli(
            ["simulate-chat", cfg, str(tmp_path / "no_dir" / "o.csv")],
            capsys)
        assert code == 2
        assert stderr_payload(err)["error"] == "UsageError"

    def test_none_cells_serialized_empty(self, tmp_path, capsys):
        # MOM has no shared limiting constant: c_theory must be blank
        cfg = write_config(tmp_path / "cfg.json", methods=["MOM"])
        out_csv = tmp_path / "chat.csv"
        run_cli(["simulate-chat", cfg, str(out_csv)], capsys)
        with open(out_csv, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["c_theory"] == ""
