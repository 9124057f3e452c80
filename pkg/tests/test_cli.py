import json

import pytest

from weylwalk.cli import (Cache, CacheError, Pipeline, RunConfig, build_parser, config_from_args,
                          main)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_cache_round_trip(tmp_path):
    c = Cache(tmp_path)
    k = Cache.key("a", 1)
    assert c.get(k) is None
    c.put(k, {"x": [1, 2]})
    assert c.get(k) == {"x": [1, 2]}
    calls = []
    assert c.fetch(k, lambda: calls.append(1)) == {"x": [1, 2]} and not calls
    assert not list(tmp_path.glob("*.tmp"))


def test_cache_detects_tampering(tmp_path):
    c = Cache(tmp_path)
    k = Cache.key("b")
    c.put(k, [1, 2, 3])
    path = tmp_path / f"{k}.json"
    entry = json.loads(path.read_text())
    entry["payload"] = [1, 2, 4]
    path.write_text(json.dumps(entry))
    with pytest.raises(CacheError):
        c.get(k)


def test_config_env_overrides(monkeypatch):
    monkeypatch.setenv("WEYLWALK_JOBS", "3")
    monkeypatch.setenv("WEYLWALK_SEED", "7")
    cfg = config_from_args(build_parser().parse_args(["curves"]))
    assert cfg.jobs == 3 and cfg.seed == 7 and cfg.max_degree == 9
    cfg = config_from_args(build_parser().parse_args(["curves", "--jobs", "2"]))
    assert cfg.jobs == 2
    with pytest.raises(ValueError):
        RunConfig(jobs=0)


def test_flags_before_and_after_subcommand():
    a = build_parser().parse_args(["--seed", "4", "curves"])
    b = build_parser().parse_args(["curves", "--seed", "4"])
    assert a.seed == b.seed == 4


def test_curves_command(capsys):
    code, out = run(capsys, "curves", "--max-degree", "5", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"]
    assert rep["info"]["counts"] == {"1": 32, "2": 0, "3": 0, "4": 0, "5": 480}


def test_walls_report_is_byte_identical(capsys, cfg):
    args = ("walls", "s16", "--cache", str(cfg.cache), "--format", "json")
    code1, out1 = run(capsys, *args)
    code2, out2 = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert json.loads(out1)["passed"]


def test_markdown_report(capsys, cfg):
    code, out = run(capsys, "walls", "s16", "--cache", str(cfg.cache), "--format", "md")
    assert code == 0
    assert out.startswith("## walls of D0 on S16")
    assert "| walls | 316 | 316 | pass |" in out


def test_corrupt_cache_is_an_error(capsys, tmp_path):
    p = Pipeline("s16", RunConfig(cache=tmp_path))
    (tmp_path / f"{p.key}.json").write_text("{broken")
    code = main(["walls", "s16", "--cache", str(tmp_path)])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_generators_json(capsys, cfg, gens):
    code, out = run(capsys, "generators", "s15", "--json", "--cache", str(cfg.cache))
    assert code == 0
    data = json.loads(out)
    assert len(data["generators"]) == 264
    assert data["report"]["condition4"] is True


def test_relations_gap(capsys, cfg, gens):
    code, out = run(capsys, "relations", "s15", "--gap", "--cache", str(cfg.cache))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("generators: ")
    assert len(lines) == 1 + 144 + 60 + 5235


def test_wordify_command(capsys, cfg, gens, tmp_path):
    from weylwalk.autgrp import evaluate, parse_word
    word = parse_word("(g8((12)), g5(1), g7(2))")
    m = tmp_path / "g.json"
    m.write_text(json.dumps(evaluate(word, gens).to_json("S15")))
    code, out = run(capsys, "wordify", "--matrix", str(m), "--cache", str(cfg.cache))
    assert code == 0
    assert evaluate(parse_word(out.strip()), gens) == evaluate(word, gens)


def test_pentads_command(capsys, cfg, gens):
    code, out = run(capsys, "pentads", "verify", "--cache", str(cfg.cache))
    assert code == 0 and "overall: pass" in out
