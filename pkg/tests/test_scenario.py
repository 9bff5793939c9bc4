import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbcrit.scenario import (
    RunConfig,
    Scenario,
    ScenarioError,
    builtin_scenario,
    builtin_scenarios,
    default_precision_cap,
    dump_scenario,
    load_scenario,
    parse_scenario,
)

AS_TEXT = """
[field]
characteristic = 2
p = 2

[extension]
layer1 = artin_schreier 1@-1
layer2 = artin_schreier 1@-3

[run]
seed = 3
"""


def test_builtins_listed():
    assert set(builtin_scenarios()) >= {"example1_p2", "example1_p3", "q2_i", "as_1_5", "q2_i_sqrt2", "q2sqrt2_kummer"}


def test_parse_example():
    sc = parse_scenario(AS_TEXT, "as")
    assert (sc.characteristic, sc.p, sc.tower) == (2, 2, ())
    assert sc.layers == (("artin_schreier", "1@-1"), ("artin_schreier", "1@-3"))
    assert sc.run.seed == 3 and sc.run.trials == RunConfig().trials
    N = sc.build()
    assert N.degree == 4


def test_tower_parsed():
    sc = builtin_scenario("example1_p3")
    assert sc.tower == (("3", "3", "1"),)
    assert sc.ground().e == 2


@pytest.mark.parametrize(
    "text,match",
    [
        (AS_TEXT + "colour = red\n", "unknown key"),
        (AS_TEXT.replace("p = 2", "p = 2\nprecsion = 9"), "unknown key"),
        (AS_TEXT + "\n[extras]\nx = 1\n", "unknown section"),
        (AS_TEXT.replace("layer2", "layer3"), "without gaps"),
        (AS_TEXT.replace("artin_schreier 1@-3", "witt 1@-3"), "layer2"),
        (AS_TEXT.replace("1@-3", "1@x"), "layer2"),
        (AS_TEXT.replace("p = 2\n", ""), "missing p"),
        (AS_TEXT.replace("seed = 3", "seed = three"), "not an integer"),
        (AS_TEXT.replace("seed = 3", "trials = -1"), "trials"),
        ("[extension]\nlayer1 = kummer 1\n", "missing \\[field\\]"),
        ("not ini at all", "unreadable"),
    ],
)
def test_rejections(text, match):
    with pytest.raises(ScenarioError, match=match):
        parse_scenario(text)


def test_unknown_builtin():
    with pytest.raises(ScenarioError, match="no built-in"):
        builtin_scenario("nope")


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "absent.ini")


@pytest.mark.parametrize("name", builtin_scenarios())
def test_builtin_round_trip(name):
    sc = builtin_scenario(name)
    again = parse_scenario(dump_scenario(sc), sc.name)
    assert again == sc


digit_tokens = st.builds(
    lambda ds, v: ",".join(map(str, ds)) + f"@{v}",
    st.lists(st.integers(0, 4), min_size=1, max_size=4),
    st.integers(-5, 5),
)


@given(
    p=st.sampled_from([2, 3, 5]),
    layers=st.lists(st.tuples(st.sampled_from(["kummer", "artin_schreier"]), digit_tokens), max_size=3),
    seed=st.integers(0, 99),
    trials=st.integers(0, 500),
    digits=st.integers(1, 40),
)
def test_round_trip_generated(p, layers, seed, trials, digits):
    run = RunConfig(seed=seed, trials=trials, digits=digits)
    sc = Scenario(0, p, (), tuple(layers), run, "gen")
    assert parse_scenario(dump_scenario(sc), "gen") == sc


def test_file_round_trip(tmp_path):
    sc = builtin_scenario("q2sqrt2_kummer")
    path = tmp_path / "copy.ini"
    path.write_text(dump_scenario(sc))
    copy = load_scenario(path)
    assert copy.name == "copy"
    assert dataclasses.replace(copy, name=sc.name) == sc


def test_precision_cap_from_environment(monkeypatch):
    monkeypatch.setenv("NBCRIT_PRECISION_CAP", "77")
    assert default_precision_cap() == 77
    monkeypatch.setenv("NBCRIT_PRECISION_CAP", "lots")
    with pytest.raises(ScenarioError):
        default_precision_cap()


def test_to_json_is_plain():
    js = builtin_scenario("q2_i").to_json()
    assert js["field"]["p"] == 2
    assert js["run"]["trials"] == 200
