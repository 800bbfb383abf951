import json
import math
from fractions import Fraction

import pytest

from harmshear.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, cli_main
from harmshear.errors import UsageError
from harmshear.runner import run_scenario, thread_cap
from harmshear.scenario import bundled_scenarios, load_scenario, parse_directive, parse_number, parse_scenario

SMALL = """\
schema=1
name=small
exercises=a quick two-map combination
order=512
grid=8 0.9 64
polygon=0.95 256

[map f1]
target=kernel mu=0 nu=0
shear=constant c=1
omega=monomial alpha=0.5

[map f2]
target=kernel mu=0 nu=0
shear=constant c=1
omega=monomial alpha=-0.5

[combination]
mode=same
maps=f1 f2
eta=0 0.5 1

[checks]
univalence
direction phi=0
injectivity
"""


@pytest.fixture
def small_file(tmp_path):
    p = tmp_path / "small.scn"
    p.write_text(SMALL)
    return p


@pytest.mark.parametrize(
    "text,want",
    [
        ("pi", math.pi),
        ("-pi/2", -math.pi / 2),
        ("pi*0.25", math.pi / 4),
        ("1/5", Fraction(1, 5)),
        ("3", 3),
        ("0.5", 0.5),
        ("-1+0.2j", complex(-1, 0.2)),
    ],
)
def test_parse_number(text, want):
    got = parse_number(text)
    assert got == pytest.approx(want)
    if isinstance(want, Fraction):
        assert isinstance(got, Fraction)


@pytest.mark.parametrize("text", ["", "abc", "pi/", "1/0", "pi*x"])
def test_parse_number_errors(text):
    with pytest.raises(UsageError):
        parse_number(text)


def test_parse_directive():
    assert parse_directive("direction phi=pi/4 on=f1") == ("direction", {"phi": "pi/4", "on": "f1"})
    with pytest.raises(UsageError):
        parse_directive("direction phi")


@pytest.mark.parametrize(
    "text",
    [
        "name=x\n",  # no schema
        "schema=2\nname=x\n",
        "schema=1\n",  # no name
        "schema=1\nname=x\n[bogus]\n",
        "schema=1\nname=x\n[map f]\nshear=constant c=1\n",  # no target
        "schema=1\nname=x\n[map f]\ntarget=kernel mu=0 nu=0\n[combination]\nmaps=f g\neta=0\n",
        "schema=1\nname=x\n[checks]\nunivalence expect=maybe\n",
    ],
)
def test_scenario_parse_errors(text):
    with pytest.raises(UsageError):
        parse_scenario(text)


def test_bundled_scenarios_parse():
    paths = bundled_scenarios()
    assert len(paths) >= 10
    names = {parse_scenario(p.read_text(), p.name).name for p in paths}
    assert "wang-real-direction" in names


def test_run_small(small_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert cli_main(["run", str(small_file), "--out", str(out)]) == EXIT_OK
    rep = json.loads((out / "small.json").read_text())
    assert rep["overall"] == "pass"
    assert rep["scenario"] == "small"
    assert len(rep["checks"]) == 3 * 3
    assert (out / "small.txt").read_text() == capsys.readouterr().out


def test_run_json_flag(small_file, capsys):
    assert cli_main(["run", str(small_file), "--json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["environment"]["order"] == 512


def test_run_bundled_by_name(capsys):
    assert cli_main(["run", "wang-real-direction"]) == EXIT_OK


def test_usage_errors(capsys):
    assert cli_main(["run", "missing.scn"]) == EXIT_USAGE
    assert cli_main(["frobnicate"]) == EXIT_USAGE
    assert cli_main([]) == EXIT_USAGE


def test_failing_check_exits_two(tmp_path, capsys):
    p = tmp_path / "bad.scn"
    # eta = 3 pushes the combined dilatation past one
    p.write_text(SMALL.replace("eta=0 0.5 1", "eta=3").replace("direction phi=0\ninjectivity\n", ""))
    assert cli_main(["run", str(p)]) == EXIT_FAIL


def test_expected_failure_counts_as_met(tmp_path, capsys):
    p = tmp_path / "exp.scn"
    p.write_text(SMALL.replace("eta=0 0.5 1", "eta=3").replace("univalence\n", "univalence expect=fail\n", 1)
                 .replace("direction phi=0\ninjectivity\n", ""))
    assert cli_main(["run", str(p)]) == EXIT_OK


def test_empty_checks_report_environment_only():
    sc = parse_scenario("schema=1\nname=empty\n")
    rep = run_scenario(sc)
    assert rep["checks"] == []
    assert rep["overall"] == "pass"
    env = rep["environment"]
    for key in ("order", "grid", "polygon", "tolerances", "seed"):
        assert key in env


def test_emit_boundary(small_file, tmp_path, capsys):
    out = tmp_path / "b.csv"
    # order 512 is too short at r = 0.99, so the boundary is refused
    assert cli_main(["emit-boundary", str(small_file), "f1", "--out", str(out)]) == EXIT_FAIL
    args = ["emit-boundary", str(small_file), "f1", "--r", "0.9", "--samples", "1024", "--out", str(out)]
    assert cli_main(args) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "re,im"
    assert len(lines) == 1025
    out2 = tmp_path / "c.csv"
    assert cli_main(["emit-boundary", str(small_file), "eta=0.5", "--r", "0.9", "--samples", "64", "--out", str(out2)]) == EXIT_OK
    assert cli_main(["emit-boundary", str(small_file), "nope", "--out", str(out2)]) == EXIT_USAGE
    assert cli_main(["emit-boundary", str(small_file), "f1", "--samples", "4", "--out", str(out2)]) == EXIT_USAGE


def test_list_scenarios(capsys):
    assert cli_main(["list-scenarios"]) == EXIT_OK
    assert "wang-real-direction" in capsys.readouterr().out


def test_sweep_eta(small_file, tmp_path, capsys):
    out = tmp_path / "sweep.json"
    code = cli_main(["sweep-eta", str(small_file), "--radius", "1", "--steps", "2", "--out", str(out)])
    rows = json.loads(out.read_text())["sweep"]
    assert len(rows) == 1 + 2 * 8
    assert code == (EXIT_OK if all(r["verdict"] == "pass" for r in rows) else EXIT_FAIL)
    assert cli_main(["sweep-eta", str(small_file), "--steps", "0"]) == EXIT_USAGE


def test_reports_identical_across_thread_counts(small_file, monkeypatch):
    sc = load_scenario(str(small_file))
    monkeypatch.setenv("HARMSHEAR_THREADS", "1")
    a = json.dumps(run_scenario(sc), sort_keys=True, default=str)
    monkeypatch.setenv("HARMSHEAR_THREADS", "4")
    b = json.dumps(run_scenario(sc), sort_keys=True, default=str)
    assert a == b


def test_bad_thread_setting(small_file, monkeypatch, capsys):
    monkeypatch.setenv("HARMSHEAR_THREADS", "zero")
    with pytest.raises(UsageError):
        thread_cap()
    assert cli_main(["run", str(small_file)]) == EXIT_USAGE
