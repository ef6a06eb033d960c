import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from ifslab.cli import main
from ifslab.io import (
    family_from_json,
    family_to_json,
    ifs_from_json,
    ifs_to_json,
)
from ifslab.presets import bernoulli_family, gasket_ifs, sinai_ifs
from ifslab.exact import NumberField


def run(args, tmp: Path, sub: str = "out"):
    out = tmp / sub
    rc = main(args + ["--out", str(out)])
    return rc, out


def read_all(d: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


SMALL_CONFIGS = [
    (["overlaps", "--set", 'scenario="bernoulli"',
      "--set", 'params={"lambda":"1/3"}', "--set", "n_range=[2,5]"], "overlaps"),
    (["entropy", "--set", 'scenario="cantor"', "--set", "n_range=[2,5]",
      "--resolution", "10"], "entropy"),
    (["inverse", "--resolution", "10", "--m", "3", "--epsilon", "1/10",
      "--set", 'mu={"scenario":"lebesgue"}',
      "--set", 'nu={"scenario":"cantor"}'], "inverse"),
    (["saturate", "--resolution", "10", "--m", "3", "--set", "k=3",
      "--levels", "1..6"], "saturate"),
    (["kv", "--resolution", "8", "--set", "k_max=4",
      "--set", 'mu={"scenario":"cantor"}',
      "--set", 'nu={"scenario":"cantor"}'], "kv"),
    (["cover", "--set", 'polynomial=["-1/2","1"]',
      "--set", 'interval=["0","1"]', "--set", 'rho="1/100"',
      "--set", 'c="1"', "--set", "k=1"], "cover"),
    (["scan", "--set", 'scenario="gasket"',
      "--set", 'grid={"lo":"1/2","hi":"1","step":"1/4"}',
      "--set", "n=4"], "scan"),
    (["liouville", "--set", 'values=["1/3"]', "--set", "n_range=[1,5]",
      "--set", "cross_check=true"], "liouville"),
]


class TestDeterminism:
    @pytest.mark.parametrize("args,name", SMALL_CONFIGS,
                             ids=[name for _, name in SMALL_CONFIGS])
    def test_byte_identical_reruns(self, args, name, tmp_path):
        rc1, d1 = run(list(args), tmp_path, "a")
        rc2, d2 = run(list(args), tmp_path, "b")
        assert rc1 == rc2 == 0
        assert read_all(d1) == read_all(d2)

    def test_plot_outputs_deterministic(self, tmp_path):
        args = ["overlaps", "--set", 'scenario="bernoulli"',
                "--set", 'params={"lambda":"1/3"}', "--set", "n_range=[2,5]",
                "--plot"]
        _, d1 = run(list(args), tmp_path, "a")
        _, d2 = run(list(args), tmp_path, "b")
        assert (d1 / "overlaps.png").exists()
        assert read_all(d1) == read_all(d2)


class TestConfigHandling:
    def test_config_file_roundtrip(self, tmp_path):
        cfg = {"scenario": "bernoulli", "params": {"lambda": "1/3"},
               "n_range": [2, 4]}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        rc, out = run(["overlaps", "--config", str(cfg_path)], tmp_path)
        assert rc == 0
        report = json.loads((out / "overlaps_report.json").read_text())
        assert report["config"] == cfg  # parse(emit(config)) == config
        assert report["version_hash"]

    def test_json_format(self, tmp_path):
        rc, out = run(["overlaps", "--format", "json",
                       "--set", 'scenario="bernoulli"',
                       "--set", 'params={"lambda":"1/3"}',
                       "--set", "n_range=[2,4]"], tmp_path)
        assert rc == 0
        rows = json.loads((out / "overlaps.json").read_text())
        assert rows[0]["n"] == 2

    def test_exit_discipline_budget(self, tmp_path, capsys):
        rc, _ = run(["overlaps", "--budget-atoms", "4",
                     "--set", 'scenario="bernoulli"',
                     "--set", 'params={"lambda":"1/3"}',
                     "--set", "n_range=[8,9]"], tmp_path)
        assert rc != 0
        err = capsys.readouterr().err
        obj = json.loads(err.strip().splitlines()[-1])
        assert obj["error"] == "BudgetExceededError"

    def test_exit_discipline_backend(self, tmp_path, capsys):
        rc, _ = run(["overlaps", "--backend", "float",
                     "--set", 'scenario="cantor"'], tmp_path)
        assert rc != 0
        obj = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert obj["error"] == "ConfigError"

    def test_console_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "ifslab.cli", "overlaps",
             "--set", 'scenario="gasket"', "--set", 'params={"t":"1"}',
             "--set", "n_range=[1,2]", "--out", str(tmp_path / "o")],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "elapsed" in proc.stderr  # timing on stderr, not in files


class TestSerializationConfigs:
    def test_ifs_roundtrip_rational(self):
        ifs = gasket_ifs(F(4, 7))
        again = ifs_from_json(ifs_to_json(ifs))
        assert [(m.ratio, m.translation) for m in again.maps] == \
            [(m.ratio, m.translation) for m in ifs.maps]
        assert again.probs == ifs.probs

    def test_ifs_roundtrip_algebraic(self):
        alpha = NumberField([-3, 0, 4], (F(4, 5), F(9, 10))).generator()
        ifs = sinai_ifs(alpha)
        again = ifs_from_json(ifs_to_json(ifs))
        assert again.contract_on_average
        assert abs(float(again.maps[0].ratio) - float(ifs.maps[0].ratio)) < 1e-12

    def test_family_roundtrip(self):
        fam = bernoulli_family("1/2", "3/5")
        again = family_from_json(family_to_json(fam))
        assert again.interval == fam.interval
        assert again.symbols == fam.symbols


class TestAlgebraicConfigs:
    def test_golden_ratio_overlaps_end_to_end(self, tmp_path):
        cfg = {
            "ifs": {"maps": [
                {"r": {"minpoly": [-1, 1, 1], "interval": ["1/2", "7/10"]},
                 "a": "-1"},
                {"r": {"minpoly": [-1, 1, 1], "interval": ["1/2", "7/10"]},
                 "a": "1"}],
                "probs": ["1/2", "1/2"]},
            "n_range": [2, 4],
        }
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(cfg))
        rc, out = run(["overlaps", "--config", str(p)], tmp_path)
        assert rc == 0
        rows = (out / "overlaps.csv").read_text().splitlines()
        assert rows[2].startswith("3,0,0.0,inf,1")   # certified exact overlap
        assert rows[3].startswith("4,0,0.0,inf,1")
