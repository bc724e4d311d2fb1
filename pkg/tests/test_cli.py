"""Command line interface tests, run in process through ``main``."""

import json
import math

import pytest

from sccomp.cli import KEPLER_LADDERS, PARABOLIC_LADDER, main


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestCoeffs:
    def test_prints_table_with_conditions(self, capsys):
        rc, out, _ = run(capsys, "coeffs", "--kind", "T", "--n", "1", "--k", "1")
        assert rc == 0
        payload = json.loads(out)
        assert payload["kind"] == "T"
        first = payload["rows"][0]["coeffs"][0]
        assert first == pytest.approx([0.5, 0.28867513459481287])
        assert payload["order_conditions"]["required"] == ["c3_1"]

    def test_writes_file(self, capsys, tmp_path):
        path = tmp_path / "table.json"
        rc, _, _ = run(
            capsys, "coeffs", "--kind", "R", "--n", "2", "--k", "2", "--out", str(path)
        )
        assert rc == 0
        payload = json.loads(path.read_text())
        assert len(payload["rows"]) == 4
        assert payload["order_conditions"]["max_magnitude"] < 1e-12

    def test_requires_kind(self, capsys):
        rc, _, err = run(capsys, "coeffs")
        assert rc == 2
        assert "--kind" in err

    def test_rejects_unknown_kind(self):
        with pytest.raises(SystemExit) as info:
            main(["coeffs", "--kind", "banana"])
        assert info.value.code == 2


class TestConfig:
    def test_config_file_supplies_defaults(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"kind": "T", "n": 1, "k": 1}))
        rc, out, _ = run(capsys, "coeffs", "--config", str(config))
        assert rc == 0
        assert json.loads(out)["k"] == 1

    def test_explicit_flag_beats_config(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"kind": "T", "n": 1, "k": 1}))
        rc, out, _ = run(capsys, "coeffs", "--config", str(config), "--k", "2")
        assert rc == 0
        assert json.loads(out)["k"] == 2

    def test_unknown_config_key_fails(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"kind": "T", "bogus_key": 1}))
        rc, _, err = run(capsys, "coeffs", "--config", str(config))
        assert rc == 2
        assert "bogus_key" in err


class TestVerify:
    def test_passes_and_reports(self, capsys):
        rc, out, _ = run(capsys, "verify", "--seed", "5")
        assert rc == 0
        assert "checks passed" in out
        assert "FAIL" not in out

    def test_output_is_deterministic_per_seed(self, capsys):
        _, first, _ = run(capsys, "verify", "--seed", "9")
        _, second, _ = run(capsys, "verify", "--seed", "9")
        assert first == second


class TestKepler:
    def test_single_cell(self, capsys, tmp_path):
        path = tmp_path / "k.csv"
        rc, out, _ = run(
            capsys,
            "kepler", "--kind", "T", "--k", "1", "--steps", "150", "--out", str(path),
        )
        assert rc == 0
        assert "wrote 1 records" in out
        lines = path.read_text().splitlines()
        header = [l for l in lines if l.startswith("#")]
        data = [l for l in lines if not l.startswith("#")]
        assert any(l.startswith("# command=kepler") for l in header)
        assert data[0].startswith("method,kind,")
        fields = data[1].split(",")
        assert fields[0] == "T1"
        assert int(fields[5]) == 150

    def test_default_ladder(self, capsys, tmp_path):
        path = tmp_path / "ladder.csv"
        rc, out, _ = run(
            capsys, "kepler", "--kind", "T", "--k", "1", "--out", str(path)
        )
        assert rc == 0
        data = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert len(data) == 1 + len(KEPLER_LADDERS["T1"])
        steps = [int(l.split(",")[5]) for l in data[1:]]
        assert steps == list(KEPLER_LADDERS["T1"])

    def test_output_bytes_are_reproducible(self, capsys, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for path in (a, b):
            rc, _, _ = run(
                capsys,
                "kepler", "--kind", "T", "--k", "2", "--steps", "90",
                "--out", str(path),
            )
            assert rc == 0
        # identical except the line recording the output path
        strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("# out=")]
        assert strip(a) == strip(b)


class TestParabolic:
    def test_single_cell(self, capsys, tmp_path):
        path = tmp_path / "p.csv"
        rc, _, _ = run(
            capsys,
            "parabolic", "--kind", "T", "--k", "2", "--steps", "8", "--out", str(path),
        )
        assert rc == 0
        data = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        fields = data[1].split(",")
        assert fields[0] == "T2"
        assert float(fields[10]) < 1e-3  # final_state_rel

    def test_default_ladder_matches_published_steps(self, capsys, tmp_path):
        path = tmp_path / "pl.csv"
        rc, _, _ = run(
            capsys, "parabolic", "--kind", "basic", "--out", str(path)
        )
        assert rc == 0
        data = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        steps = [int(l.split(",")[5]) for l in data[1:]]
        assert steps[: len(PARABOLIC_LADDER)] == list(PARABOLIC_LADDER)

    def test_grid_size_must_be_power_of_two(self, capsys):
        rc, _, err = run(capsys, "parabolic", "--N", "100", "--steps", "4")
        assert rc == 2
        assert "power of two" in err


class TestEfficiency:
    def test_custom_step_sizes(self, capsys, tmp_path):
        path = tmp_path / "eff.csv"
        h = 20.0 * math.pi / 71.0
        rc, out, _ = run(
            capsys, "efficiency", "--h-list", f"{h}", "--out", str(path)
        )
        assert rc == 0
        data = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        # eight methods, one step size each
        assert len(data) == 1 + 8
        methods = [l.split(",")[0] for l in data[1:]]
        assert methods[:3] == ["T1", "T2", "T3"]
        assert "R2" in methods and "R3" in methods
