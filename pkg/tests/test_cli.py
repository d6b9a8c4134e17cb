import json
import subprocess
import sys

import pytest

from asrnoise.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main

from helpers import DEMO_DICT, synthetic_inventory, synthetic_lines, write_dict, write_lines


@pytest.fixture
def demo(tmp_path, demo_dict_path):
    src = write_lines(tmp_path / "demo.zh", ["语音", "语译"])
    return tmp_path, src, demo_dict_path


@pytest.fixture
def synth(tmp_path):
    chars, mapping = synthetic_inventory(12, 3)
    lines = synthetic_lines(chars, 100, 10, seed=1, other_every=9)
    src = write_lines(tmp_path / "test.zh", lines)
    refs = write_lines(tmp_path / "test.en", [f"reference {i}" for i in range(100)])
    d = write_dict(tmp_path / "syn.tsv", mapping)
    return tmp_path, src, refs, d, lines


def read(path):
    return path.read_text(encoding="utf-8")


def test_stats_demo(demo, capsys):
    tmp, src, _ = demo
    assert main(["stats", str(src), "--out", str(tmp / "s.tsv")]) == EXIT_OK
    assert read(tmp / "s.tsv") == "语\t2\n译\t1\n音\t1\n"
    assert "vocabulary=3 cjk_tokens=4" in capsys.readouterr().out


def test_stats_empty(tmp_path, capsys):
    src = write_lines(tmp_path / "e.zh", [])
    assert main(["stats", str(src), "--out", str(tmp_path / "s.tsv")]) == EXIT_OK
    assert read(tmp_path / "s.tsv") == ""
    assert "vocabulary=0 cjk_tokens=0" in capsys.readouterr().out


def test_stats_missing_file(tmp_path, capsys):
    assert main(["stats", str(tmp_path / "nope"), "--out", str(tmp_path / "s")]) == EXIT_IO
    assert "no such file" in capsys.readouterr().err


def test_stats_line_mismatch(demo):
    tmp, src, _ = demo
    tgt = write_lines(tmp / "demo.en", ["a"])
    assert main(["stats", str(src), "--tgt", str(tgt), "--out", str(tmp / "s")]) == EXIT_VALIDATION


def test_usage_errors(demo):
    tmp, src, _ = demo
    assert main(["noise", str(src), "--p", "1.5"]) == EXIT_USAGE
    assert main(["bogus"]) == EXIT_USAGE
    assert main(["testset", str(src), "--k", "0"]) == EXIT_USAGE


def test_noise_homophone_deterministic(synth, capsys):
    tmp, src, refs, d, _ = synth
    args = ["noise", str(src), "--strategy", "homophone", "--p", "0.1", "--seed", "42",
            "--pinyin-dict", str(d)]
    assert main(args + ["--out-dir", str(tmp / "a")]) == EXIT_OK
    assert main(args + ["--out-dir", str(tmp / "b")]) == EXIT_OK
    a, b = read(tmp / "a/test.zh.epoch1.noised"), read(tmp / "b/test.zh.epoch1.noised")
    assert a == b and a != read(src)
    captured = capsys.readouterr()
    assert "seed=42" in captured.err and "substitution_rate=" in captured.out


def test_noise_p_zero_identity(synth):
    tmp, src, refs, d, _ = synth
    assert main(["noise", str(src), "--strategy", "uniform", "--p", "0", "--tgt", str(refs),
                 "--out-dir", str(tmp / "o")]) == EXIT_OK
    assert (tmp / "o/test.zh.epoch1.noised").read_bytes() == src.read_bytes()


def test_noise_placeholder_log(synth):
    tmp, src, refs, d, _ = synth
    assert main(["noise", str(src), "--strategy", "placeholder", "--p", "0.2", "--log",
                 "--epochs", "2", "--out-dir", str(tmp / "o")]) == EXIT_OK
    for e in (1, 2):
        rows = [r.split("\t") for r in read(tmp / f"o/test.zh.epoch{e}.log.tsv").splitlines()]
        assert rows and all(r[3] == "<SUB>" for r in rows)
        noised = read(tmp / f"o/test.zh.epoch{e}.noised").splitlines()
        assert len(noised) == 100
        assert sum(l.count("<SUB>") for l in noised) == len(rows)
    assert read(tmp / "o/test.zh.epoch1.noised") != read(tmp / "o/test.zh.epoch2.noised")


def test_noise_homophone_needs_dict(synth, capsys):
    tmp, src, *_ = synth
    assert main(["noise", str(src), "--strategy", "homophone"]) == EXIT_VALIDATION
    assert "--pinyin-dict" in capsys.readouterr().err


def test_noise_with_stats_file_and_config(synth):
    tmp, src, refs, d, _ = synth
    assert main(["stats", str(src), "--out", str(tmp / "s.tsv")]) == EXIT_OK
    cfg = tmp / "cfg.json"
    cfg.write_text(json.dumps({"strategy": "frequency", "p": 0.3, "seed": 7}))
    assert main(["noise", str(src), "--config", str(cfg), "--stats", str(tmp / "s.tsv"),
                 "--out-dir", str(tmp / "a")]) == EXIT_OK
    assert main(["noise", str(src), "--strategy", "frequency", "--p", "0.3", "--seed", "7",
                 "--out-dir", str(tmp / "b")]) == EXIT_OK
    assert read(tmp / "a/test.zh.epoch1.noised") == read(tmp / "b/test.zh.epoch1.noised")


def test_testset_three_sizes(synth, capsys):
    tmp, src, refs, d, _ = synth
    args = ["testset", str(src), "--refs", str(refs), "--k", "1", "2", "3",
            "--pinyin-dict", str(d), "--out-dir", str(tmp / "t")]
    assert main(args) == EXIT_OK
    first = {}
    for k in (1, 2, 3):
        noisy = read(tmp / f"t/test.zh.k{k}.noisy").splitlines()
        ref_lines = read(tmp / f"t/test.zh.k{k}.refs").splitlines()
        assert len(noisy) == len(ref_lines) == 300
        assert ref_lines[:3] == ["reference 0"] * 3
        first[k] = read(tmp / f"t/test.zh.k{k}.noisy")
    out = capsys.readouterr().out
    assert out.count(": OK") == 3
    assert main(args) == EXIT_VALIDATION  # refuses to overwrite
    assert main(args + ["--force"]) == EXIT_OK
    assert all(read(tmp / f"t/test.zh.k{k}.noisy") == first[k] for k in (1, 2, 3))


def test_testset_audit_rows(synth):
    tmp, src, refs, d, lines = synth
    assert main(["testset", str(src), "--k", "2", "--pinyin-dict", str(d),
                 "--out-dir", str(tmp / "t")]) == EXIT_OK
    rows = [r.split("\t") for r in read(tmp / "t/test.zh.k2.audit.tsv").splitlines()]
    subs = [r for r in rows if r[2] != "shortfall"]
    assert all(len(r) == 5 for r in rows)
    assert len(subs) == 2 * 300 - sum(2 - int(r[3]) for r in rows if r[2] == "shortfall")
    assert not (tmp / "t/test.zh.k2.refs").exists()


def test_factorize(demo, capsys):
    tmp, src, d = demo
    one = write_lines(tmp / "one.zh", ["语音翻译"])
    assert main(["factorize", str(one), "--pinyin-dict", str(d), "--out-dir", str(tmp / "f")]) == EXIT_OK
    assert read(tmp / "f/one.zh.factored") == "语|yu 音|yin 翻|fan 译|yi\n"
    assert "100.00%" in capsys.readouterr().out


def test_factorize_split_and_unknown(tmp_path, demo_dict_path, capsys):
    src = write_lines(tmp_path / "x.zh", ["语字猫", "90% 音"])
    assert main(["factorize", str(src), "--pinyin-dict", str(demo_dict_path), "--format", "split",
                 "--embedding-spec", str(tmp_path / "emb.json")]) == EXIT_OK
    chars = read(tmp_path / "x.zh.chars").splitlines()
    pins = read(tmp_path / "x.zh.pinyin").splitlines()
    assert [len(l.split()) for l in chars] == [len(l.split()) for l in pins]
    assert pins[0] == "yu zi <unk>"
    assert "75.00%" in capsys.readouterr().out
    assert json.loads(read(tmp_path / "emb.json")) == {"char_dim": 64, "pinyin_dim": 448}


def test_analyze(tmp_path, capsys):
    refs = write_lines(tmp_path / "r", ["语音翻译"])
    assert main(["analyze", str(refs), str(refs)]) == EXIT_OK
    assert "WER          0.0000" in capsys.readouterr().out
    hyps = write_lines(tmp_path / "h", ["语音翻一"])
    assert main(["analyze", str(refs), str(hyps), "--out", str(tmp_path / "rep.tsv")]) == EXIT_OK
    assert "substitution\t1\t0.2500" in read(tmp_path / "rep.tsv")
    short = write_lines(tmp_path / "s", [])
    assert main(["analyze", str(refs), str(short)]) == EXIT_VALIDATION


def test_analyze_audit_noiser_output(synth, capsys):
    tmp, src, refs, d, _ = synth
    main(["noise", str(src), "--strategy", "uniform", "--p", "0.3", "--out-dir", str(tmp / "o")])
    capsys.readouterr()
    assert main(["analyze", str(src), str(tmp / "o/test.zh.epoch1.noised"), "--audit"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "length_mismatches=0" in out
    bad = write_lines(tmp / "bad", [l[1:] for l in read(src).splitlines()])
    assert main(["analyze", str(src), str(bad), "--audit"]) == EXIT_VALIDATION


def test_module_entry_point(demo):
    tmp, src, _ = demo
    proc = subprocess.run(
        [sys.executable, "-m", "asrnoise", "stats", str(src), "--out", str(tmp / "s.tsv")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and "vocabulary=3" in proc.stdout
