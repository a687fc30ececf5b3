import json

import pytest

from lmc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prove_emits_derivation(capsys, tmp_path):
    target = tmp_path / "proof.d"
    code, out, _ = run(capsys, "prove", "dia box x |- x", "--emit", str(target))
    assert code == 0
    assert out.startswith("proved")
    code, out, _ = run(capsys, "check", str(target), "--cut-free")
    assert code == 0 and out.startswith("valid:")


def test_check_corrupted_file_reports_node_path(capsys, tmp_path):
    target = tmp_path / "proof.d"
    assert run(capsys, "prove", "dia box x |- x", "--emit", str(target))[0] == 0
    record = json.loads(target.read_text())
    # swap the leaf conclusion for an unrelated axiom instance
    node = record
    while node["premises"]:
        node = node["premises"][0]
    node["conclusion"] = "y |- y"
    target.write_text(json.dumps(record))
    code, out, _ = run(capsys, "check", str(target))
    assert code == 1
    assert out.startswith("invalid: node [")


def test_countermodel_finds_z2_total(capsys):
    code, out, _ = run(capsys, "countermodel", "dia 1 |- 1")
    assert code == 1
    assert "Z2-total" in out


def test_countermodel_none_for_valid_law(capsys):
    code, _, _ = run(capsys, "countermodel", "dia dia x |- dia x", "--max-monoid-size", "2")
    assert code == 0


def test_prove_exhausts_on_non_derivable(capsys):
    code, out, _ = run(capsys, "prove", "box x |- (box x * box 1)")
    assert code == 1 and out.startswith("exhausted")


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "prove")[0] == 2
    code, _, err = run(capsys, "parse", "(x *")
    assert code == 2 and err.startswith("lmc: error:")
    code, _, err = run(capsys, "check", "/nonexistent/file.d")
    assert code == 2 and "cannot read" in err
    assert run(capsys, "soundness", "--rule", "nosuchrule")[0] == 2
    assert run(capsys, "eval", "x <= x", "--model", "nonsense model")[0] == 2


def test_parse_renders(capsys):
    code, out, _ = run(capsys, "parse", "(x * y) |- dia x")
    assert code == 0
    assert "cp = 1" in out


def test_eval_and_assign(capsys):
    assert run(capsys, "eval", "dia box x <= x")[0] == 0
    code, out, _ = run(capsys, "eval", "dia x", "--assign", "x={a}")
    assert code == 0 and "ε" in out
    code, out, _ = run(capsys, "eval", "x <= box x")
    assert code == 1 and "counterexample" in out


def test_soundness_and_inverted_harness(capsys):
    assert run(capsys, "soundness", "--rule", "K", "--rule", "diaL")[0] == 0
    assert run(capsys, "soundness", "--rule", "T", "--invert")[0] == 1


def test_random_sweep_is_reproducible(capsys):
    argv = ("eval", "dia (x * y) <= dia x | (x * dia y)", "--model", "truncated alphabet=ab L=2",
            "--strategy", "random", "--samples", "200", "--seed", "7")
    first = run(capsys, *argv)
    assert first == run(capsys, *argv)


def test_eliminate_roundtrip(capsys, tmp_path):
    from lmc.calculus import dumps
    from lmc.corpus import generated_mix_corpus

    src, out = tmp_path / "in.d", tmp_path / "out.d"
    src.write_text(dumps(generated_mix_corpus(n=3, seed=1)[2].derivation))
    code, text, _ = run(capsys, "eliminate", str(src), "--trace", "--emit", str(out))
    assert code == 0 and "schema applications" in text
    assert run(capsys, "check", str(out), "--cut-free")[0] == 0


def test_traces_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "traces", "enumerate", "--rooted", "--strict", "--max-len", "8", "--count")
    assert code == 0 and out.strip() == "31 valid traces of length <= 8"
    code, _, _ = run(capsys, "traces", "policy", "--strict", "(s0,conn),(s1,snd)")
    assert code == 0
    prop = tmp_path / "p.txt"
    prop.write_text("\n(s0,conn)\n")
    code, out, _ = run(capsys, "traces", "classify", str(prop), "--max-len", "1")
    assert code == 0 and "box agrees: True" in out


def test_algebra_commands(capsys):
    assert run(capsys, "algebra", "endz")[0] == 0
    code, out, _ = run(capsys, "algebra", "rdp", "ab", "ba", "abb")
    assert code == 0 and "'ab' . 'b'" in out
    assert run(capsys, "algebra", "rdp", "ab", "ba", "bb")[0] == 1
    code, out, _ = run(capsys, "algebra", "monoid")
    assert code == 0 and "cancellative=True conical=False" in out


@pytest.mark.parametrize("argv", [["--help"], ["prove", "--help"]])
def test_help_exits_zero(capsys, argv):
    assert main(argv) == 0
    assert "usage" in capsys.readouterr().out
