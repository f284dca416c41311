import json
import os

import numpy as np
import pytest

from fieldcomm.cli import main


def write_config(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run_cli(tmp_path, experiment, cfg, extra=()):
    cfg_path = write_config(tmp_path, f"{experiment}.json", cfg)
    out = str(tmp_path / f"{experiment}.csv")
    code = main([experiment, "--config", cfg_path, "--out", out, *extra])
    return code, out


class TestExperiments:
    def test_coherent_info_sweep(self, tmp_path):
        cfg = {"mu_over_ell": {"start": 0.0, "stop": 3.0, "step": 0.5}, "delay_over_ell": 1.5}
        code, out = run_cli(tmp_path, "coherent-info-sweep", cfg)
        assert code == 0
        lines = open(out).read().splitlines()
        assert lines[0] == "mu_over_ell,delay_over_ell,coherent_info_bits"
        assert len(lines) == 8  # header + 7 grid rows
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[2]) == pytest.approx(-1.0, abs=1e-9)

    def test_erasure_rows(self, tmp_path):
        code, out = run_cli(tmp_path, "erasure", {"receivers": [1, 2, 3]})
        assert code == 0
        rows = [line.split(",") for line in open(out).read().splitlines()[1:]]
        values = {int(r[0]): float(r[1]) for r in rows}
        assert values[1] == pytest.approx(1.0, abs=1e-12)
        assert values[2] == pytest.approx(0.0, abs=1e-12)
        assert values[3] == pytest.approx(-1.0 / 3.0, abs=1e-10)

    def test_state_transfer_rows_beat_bound(self, tmp_path):
        cfg = {"gamma1_norm_sq": [0.02], "haar_inputs": 5}
        code, out = run_cli(tmp_path, "state-transfer", cfg)
        assert code == 0
        lines = open(out).read().splitlines()
        assert lines[0] == "mu_A,gamma1_norm_sq,input_label,fidelity,bound"
        for line in lines[1:]:
            cols = line.split(",")
            assert float(cols[3]) >= float(cols[4]) - 1e-9

    def test_cavity_rows(self, tmp_path):
        cfg = {"lambda1": [5.0], "mode_cutoff": 1024}
        code, out = run_cli(tmp_path, "cavity", cfg)
        assert code == 0
        lines = open(out).read().splitlines()
        assert lines[0] == "lambda1,gamma_norm_sq,fidelity,bound"
        for line in lines[1:]:
            cols = line.split(",")
            assert float(cols[2]) >= float(cols[3]) - 1e-9

    def test_delocalize_rows(self, tmp_path):
        cfg = {"gamma2_norm_sq": [0.02], "haar_inputs": 0}
        code, out = run_cli(tmp_path, "delocalize", cfg)
        assert code == 0
        lines = open(out).read().splitlines()
        assert (
            lines[0]
            == "gamma2_norm_sq,input_label,ghz_fidelity,fidelity_bound,coherence,coherence_bound"
        )
        for line in lines[1:]:
            cols = line.split(",")
            assert float(cols[4]) <= float(cols[5])

    def test_audit_rows(self, tmp_path):
        cfg = {"gamma1_norm_sq": [0.05], "haar_inputs": 0}
        code, out = run_cli(tmp_path, "audit", cfg)
        assert code == 0
        lines = open(out).read().splitlines()
        assert lines[0] == "check,passed,margin"
        names = [line.split(",")[0] for line in lines[1:]]
        assert names == ["overlap-bound", "norm-inequality", "equal-profiles"]
        assert all(line.split(",")[1] == "true" for line in lines[1:])


class TestContract:
    def test_determinism_byte_identical(self, tmp_path):
        cfg = {"gamma1_norm_sq": [0.05], "haar_inputs": 10, "seed": 3}
        _, out1 = run_cli(tmp_path, "state-transfer", cfg)
        first = open(out1, "rb").read()
        _, out2 = run_cli(tmp_path, "state-transfer", cfg)
        assert open(out2, "rb").read() == first

    def test_jobs_do_not_change_output(self, tmp_path):
        cfg = {"mu_over_ell": [0.0, 0.5, 1.0, 1.5], "delay_over_ell": 1.5}
        _, out1 = run_cli(tmp_path, "coherent-info-sweep", cfg)
        serial = open(out1, "rb").read()
        code, out2 = run_cli(tmp_path, "coherent-info-sweep", cfg, extra=["--jobs", "4"])
        assert code == 0
        assert open(out2, "rb").read() == serial

    def test_rerun_replaces_not_appends(self, tmp_path):
        cfg = {"receivers": [1, 2]}
        _, out = run_cli(tmp_path, "erasure", cfg)
        n1 = len(open(out).read().splitlines())
        run_cli(tmp_path, "erasure", cfg)
        assert len(open(out).read().splitlines()) == n1

    def test_manifest_written(self, tmp_path):
        code, out = run_cli(tmp_path, "erasure", {"receivers": [2]})
        manifest = json.loads(open(out + ".manifest.json").read())
        assert manifest["experiment"] == "erasure"
        assert manifest["rows"] == 1
        assert "numpy" in manifest["versions"]

    def test_float_format_12_digits(self, tmp_path):
        _, out = run_cli(tmp_path, "erasure", {"receivers": [3]})
        value = open(out).read().splitlines()[1].split(",")[1]
        assert value == "-3.33333333333e-01"

    def test_validation_error_exit_2(self, tmp_path):
        code, _ = run_cli(tmp_path, "coherent-info-sweep", {"delay_over_ell": 0.5})
        assert code == 2

    def test_unreadable_config_exit_2(self, tmp_path):
        code = main(["erasure", "--config", str(tmp_path / "missing.json")])
        assert code == 2

    def test_forged_audit_exit_3(self, tmp_path):
        cfg = {
            "gamma1_norm_sq": [0.05],
            "forged": {
                "alpha1_norm_sq": 1.0,
                "gamma1_norm_sq": 0.05,
                "gamma2_norm_sq": 0.05,
                "phi_gamma1_alpha1": np.pi / 2,
                "min_fidelity": 0.999,
            },
        }
        code, out = run_cli(tmp_path, "audit", cfg)
        assert code == 3
        assert not os.path.exists(out)  # partial outputs removed on failure

    def test_seed_changes_haar_rows(self, tmp_path):
        cfg = {"gamma1_norm_sq": [0.05], "haar_inputs": 3}
        _, out1 = run_cli(tmp_path, "state-transfer", cfg, extra=["--seed", "1"])
        data1 = open(out1).read()
        _, out2 = run_cli(tmp_path, "state-transfer", cfg, extra=["--seed", "2"])
        assert open(out2).read() != data1
