import io
import json

import pytest

from autostruct import cli
from autostruct.builtins import builtin_text
from autostruct.turing import FIXTURES

ZERO_STAR_ONE = "alphabet: 0 1\ndomain regex: 0*1\n"


@pytest.fixture
def tm_file(tmp_path):
    def write(name):
        path = tmp_path / f"{name}.tm"
        path.write_text(FIXTURES[name])
        return str(path)
    return write


def lines(capsys):
    return capsys.readouterr().out.splitlines()


@pytest.mark.parametrize("argv, code", [
    (["eval", "nat_le", "-q", "A x. E y. le(x,y)"], 0),
    (["eval", "nat_le", "-q", "E x. A y. le(y,x)"], 1),
    (["eval", "nat_le", "-q", "le(x,y)"], 2),
    (["eval", "nat_le", "-q", "lt(x,y)"], 2),
    (["eval", "no_such_file.pres", "-q", "true"], 2),
    (["frobnicate"], 2),
    (["eval", "nat_le"], 2),
    (["ba-invariant", "b_omega", "--cap", "0"], 3),
    (["ba-invariant", "b_omega"], 0),
    (["check", "presburger"], 0),
    (["gap", "nat_succ", "-r", "succ", "--split", "1,1", "--depth", "6"], 0),
    (["gap", "nat_succ", "-r", "succ", "--split", "2,1"], 2),
    (["builtin", "reals"], 2),
])
def test_exit_codes(argv, code, capsys):
    assert cli.run(argv) == code
    if code == 2:
        assert capsys.readouterr().err.startswith("autostruct: error:")


def test_eval_output_is_deterministic(capsys):
    for _ in range(2):
        assert cli.run(["eval", "presburger", "-q", "A x. A y. E z. plus(x,y,z)"]) == 0
    assert lines(capsys) == ["true", "true"]


def test_count_from_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(ZERO_STAR_ONE))
    assert cli.run(["count", "-", "--max-n", "3"]) == 0
    assert lines(capsys)[-1] == "n=3 count=1 cumulative=3"


def test_json_is_one_object_per_line(tmp_path, capsys):
    path = tmp_path / "d.pres"
    path.write_text(ZERO_STAR_ONE)
    assert cli.run(["--json", "count", str(path), "--max-n", "3"]) == 0
    records = [json.loads(line) for line in lines(capsys)]
    assert [r["cumulative"] for r in records] == [0, 1, 2, 3]
    assert cli.run(["solve", "nat_le", "-q", "le(x,y)", "--max-len", "1", "--json"]) == 0
    records = [json.loads(line) for line in lines(capsys)]
    assert {(r["x"], r["y"]) for r in records} == {("", ""), ("1", "1"), ("", "1")}


def test_builtin_emit(capsys):
    assert cli.run(["builtin", "nat_le", "--emit"]) == 0
    assert capsys.readouterr().out == builtin_text("nat_le")


def test_census_and_prodlen(capsys):
    assert cli.run(["--json", "census", "nat_le", "-q", "le(x,y)", "-n", "4", "--slack", "4"]) == 0
    record = json.loads(lines(capsys)[-1])
    assert record["distinct_columns"] == 16
    assert cli.run(["prodlen", "presburger", "-r", "plus", "--m", "2", "--factor-len", "2"]) == 0


def test_machine_commands(tm_file, tmp_path, capsys):
    out = tmp_path / "ar.pres"
    assert cli.run(["build-ar", tm_file("always_accept"), "-o", str(out)]) == 0
    assert out.read_text().startswith("alphabet:")
    assert cli.run(["probe-ar", str(out), "--depth", "4", "--max-base-len", "2",
                    "--tm", tm_file("always_accept")]) == 0
    assert lines(capsys)[-1] == "probe depth=4: ok"
    assert cli.run(["build-ar", tm_file("eraser")]) == 2
    cfg = tmp_path / "cfg.pres"
    assert cli.run(["tm-config", tm_file("looper"), "-o", str(cfg)]) == 0
    capsys.readouterr()
    assert cli.run(["dot", str(cfg), "--max-len", "2"]) == 0
    assert capsys.readouterr().out.startswith("digraph")


def test_main_exits_with_code():
    with pytest.raises(SystemExit) as info:
        cli.main(["eval", "nat_le", "-q", "false"])
    assert info.value.code == 1
