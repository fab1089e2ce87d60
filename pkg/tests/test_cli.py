import json

import numpy as np
import pytest

from privsense import cli, dataset, pipeline


def run(argv):
    assert cli.main(argv) == 0


def test_synth_keygen_publish_reconstruct_roundtrip(tmp_path):
    data = tmp_path / "data.csv"
    keys_dir = tmp_path / "keys"
    published = tmp_path / "published.csv"
    recovered = tmp_path / "recovered.csv"

    run(["synth", "--out", str(data), "--records", "20", "--features", "64",
         "--sparsity", "3", "--seed", "5"])
    run(["keygen", "--n", "64", "--keys", str(keys_dir), "--in", str(data),
         "--seed", "7"])
    run(["publish", "--in", str(data), "--out", str(published),
         "--keys", str(keys_dir), "--epsilon", "1e9", "--seed", "9"])
    run(["reconstruct", "--in", str(published), "--out", str(recovered),
         "--keys", str(keys_dir), "--level", "l2"])

    original = dataset.load_table_csv(data)
    table, provenance = pipeline.load_published_csv(published)
    assert table.shape == (20, 32)
    assert provenance["epsilon"] == 1e9

    lines = recovered.read_text().splitlines()
    assert lines[0].startswith("rec_id,x_1")
    values = np.array([[float(v) for v in line.split(",")[1:]]
                       for line in lines[1:]])
    err = np.mean(np.linalg.norm(values - original.values, axis=1))
    assert err < 1e-3

    diagnostics = json.loads(
        (tmp_path / "recovered.csv.diagnostics.json").read_text())
    assert diagnostics["level"] == "l2"
    assert len(diagnostics["converged"]) == 20
    assert "decoded_bits" in diagnostics
    assert diagnostics["input_kind"] == "watermarked"


def test_reconstruct_l0_without_keys(tmp_path):
    data = tmp_path / "data.csv"
    keys_dir = tmp_path / "keys"
    published = tmp_path / "published.csv"
    out = tmp_path / "l0.csv"
    run(["synth", "--out", str(data), "--records", "8", "--features", "16"])
    run(["keygen", "--n", "16", "--keys", str(keys_dir), "--in", str(data)])
    run(["publish", "--in", str(data), "--out", str(published),
         "--keys", str(keys_dir), "--epsilon", "0.5"])
    run(["reconstruct", "--in", str(published), "--out", str(out),
         "--level", "l0"])
    table, _ = pipeline.load_published_csv(published)
    values = np.array([[float(v) for v in line.split(",")[1:]]
                       for line in out.read_text().splitlines()[1:]])
    assert np.array_equal(values, table)


def test_reconstruct_without_required_keys_fails(tmp_path, capsys):
    data = tmp_path / "data.csv"
    keys_dir = tmp_path / "keys"
    published = tmp_path / "published.csv"
    run(["synth", "--out", str(data), "--records", "8", "--features", "16"])
    run(["keygen", "--n", "16", "--keys", str(keys_dir), "--in", str(data),
         "--bundle", "l1"])
    run(["publish", "--in", str(data), "--out", str(published),
         "--keys", str(keys_dir), "--epsilon", "1.0", "--no-embed"])
    code = cli.main(["reconstruct", "--in", str(published), "--out",
                     str(tmp_path / "x.csv"), "--keys", str(keys_dir),
                     "--level", "l2"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_sweep_command_writes_report_and_summary(tmp_path):
    report = tmp_path / "report.csv"
    run(["sweep", "--out", str(report), "--epsilon", "0.1", "1.6",
         "--trials", "1", "--records", "16", "--features", "16",
         "--seed", "3"])
    lines = report.read_text().splitlines()
    assert lines[0] == "epsilon,level,trial,metric,value"
    summary = json.loads((tmp_path / "report.csv.summary.json").read_text())
    assert summary["format"] == "privsense-report 1"
    assert summary["cells"]


def test_cli_flags_exist():
    import argparse
    parser = cli.build_parser()
    help_text = parser.format_help()
    for sub in ("keygen", "publish", "reconstruct", "sweep", "synth"):
        assert sub in help_text
    sub_action = next(a for a in parser._actions
                      if isinstance(a, argparse._SubParsersAction))
    sweep_help = sub_action.choices["sweep"].format_help()
    for flag in ("--epsilon", "--measurement-rate", "--embedding-rate",
                 "--sparsity-rule", "--power-fraction", "--calibration",
                 "--level", "--trials", "--seed", "--out"):
        assert flag in sweep_help
