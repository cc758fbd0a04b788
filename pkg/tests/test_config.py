import json

import pytest

from pgtnet.config import DEFAULT_SEED, resolve_configs
from pgtnet.errors import ConfigError
from pgtnet.manifest import RunManifest
from pgtnet.model.config import Readout
from pgtnet.synthetic import SyntheticConfig, generate_synthetic_log
from pgtnet.utils.markdown_formatter import format_list_to_markdown_table, format_mapping_to_markdown_list
from pgtnet.utils.utils import derive_seed, format_number, format_percentage, safe_float


# ==================== 配置分层 ====================

def test_profiles(monkeypatch):
    monkeypatch.delenv("PGTNET_SEED", raising=False)
    model, train = resolve_configs("paper")
    assert (model.hidden_dim, model.num_layers, model.num_heads) == (64, 5, 8)
    assert (train.epochs, train.warmup_epochs, train.batch_size) == (600, 50, 128)
    assert model.seed == train.seed == DEFAULT_SEED

    model, train = resolve_configs("desk")
    assert (model.hidden_dim, model.num_layers, model.num_heads) == (32, 3, 4)
    assert train.epochs == 300


def test_file_then_flags(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('[model]\nhidden_dim = 16\nreadout = "sum"\n\n[train]\nepochs = 40\nbatch_size = 8\n',
                    encoding="utf-8")
    model, train = resolve_configs("desk", path, {"num_heads": 2, "d_pe": None}, {"batch_size": 4}, seed=5)
    assert model.hidden_dim == 16
    assert model.readout == Readout.SUM
    assert model.num_heads == 2
    assert model.d_pe == 8
    assert (train.epochs, train.batch_size) == (40, 4)
    assert model.seed == train.seed == 5


def test_json_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"train": {"base_lr": 0.01}}), encoding="utf-8")
    _, train = resolve_configs("desk", path, seed=1)
    assert train.base_lr == 0.01


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("PGTNET_SEED", "123")
    model, train = resolve_configs("desk")
    assert model.seed == train.seed == 123
    monkeypatch.setenv("PGTNET_SEED", "many")
    with pytest.raises(ConfigError):
        resolve_configs("desk")


@pytest.mark.parametrize("content", [
    "[optimizer]\nlr = 1\n",
    "[model]\nwidth = 3\n",
    "[model\n",
])
def test_bad_config_files(tmp_path, content):
    path = tmp_path / "bad.toml"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigError):
        resolve_configs("desk", path, seed=0)


def test_unknown_profile_and_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        resolve_configs("laptop")
    with pytest.raises(ConfigError):
        resolve_configs("desk", tmp_path / "nope.toml")


# ==================== 运行清单 ====================

def test_manifest_hash_ignores_timestamps(tmp_path):
    source = tmp_path / "log.csv"
    source.write_text("case_id,activity,timestamp\n", encoding="utf-8")
    first = RunManifest.for_inputs("convert", {"d_pe": 8}, {"log": str(source), "schema": None}, 3)
    second = RunManifest.for_inputs("convert", {"d_pe": 8}, {"log": str(source)}, 3)
    second.started_at = "1970-01-01T00:00:00+00:00"
    assert first.hash == second.hash
    assert RunManifest.for_inputs("convert", {"d_pe": 4}, {"log": str(source)}, 3).hash != first.hash
    assert RunManifest.for_inputs("convert", {"d_pe": 8}, {"log": str(source)}, 4).hash != first.hash

    path = first.write(tmp_path)
    document = json.loads(path.read_text(encoding="utf-8"))
    assert path.name == "manifest_convert.json"
    assert document["manifest_hash"] == first.hash
    assert document["finished_at"]


# ==================== 工具函数 ====================

def test_derive_seed_streams():
    assert derive_seed(42, 10, 0) == derive_seed(42, 10, 0)
    assert derive_seed(42, 10, 0) != derive_seed(42, 10, 1)
    assert derive_seed(42, 10, 0) != derive_seed(43, 10, 0)


def test_number_formatting():
    assert format_number(1234.5678) == "1,234.57"
    assert format_number(None) == "N/A"
    assert format_percentage(0.0512) == "5.12%"
    assert safe_float("3.5") == 3.5
    assert safe_float("nan", 0.0) == 0.0
    assert safe_float("abc") is None


def test_markdown_helpers():
    table = format_list_to_markdown_table([{"k": 2, "MAE": "1.5"}, {"k": 3, "MAE": "0.5"}])
    assert table.splitlines() == ["| k | MAE |", "| --- | --- |", "| 2 | 1.5 |", "| 3 | 0.5 |"]
    assert format_list_to_markdown_table([]) == ""
    assert format_mapping_to_markdown_list("## x", {"a": 1}) == "## x\n\n- a: 1\n"


# ==================== 合成日志 ====================

def test_synthetic_log_is_deterministic():
    a = generate_synthetic_log(SyntheticConfig(cases=10, seed=4, jitter=0.2))
    b = generate_synthetic_log(SyntheticConfig(cases=10, seed=4, jitter=0.2))
    assert a.case_ids == b.case_ids
    assert [[e.seconds for e in t] for t in a] == [[e.seconds for e in t] for t in b]
    assert len(generate_synthetic_log(SyntheticConfig(cases=5, short_traces=2))) == 7


def test_synthetic_config_validation():
    with pytest.raises(ConfigError):
        SyntheticConfig(cases=0)
    with pytest.raises(ConfigError):
        SyntheticConfig(jitter=1.0)
