import json

import numpy as np
import pytest

from bdriccati import (
    ScheduleError,
    check_positivity_condition,
    load_schedule,
    make_asymmetric,
    make_constant,
    make_explicit,
    make_offset_exponential,
    save_schedule,
)
from bdriccati.schedules import asymmetry_q

from conftest import BUILTIN


def test_constant_values():
    s = make_constant(0.5, 20)
    assert s.b(7) == 0.5 and s.d(7) == 0.5
    assert s.sigma(7) == 1.0
    assert s.b(-1) == 0.0 and s.d(0) == 0.0
    assert s.kind == "constant"
    assert len(s.birth) == 22 and len(s.death) == 23


@pytest.mark.parametrize("b_val", [0.0, -0.1, 1.0, 1.5])
def test_constant_rejects_rate(b_val):
    with pytest.raises(ScheduleError):
        make_constant(b_val, 20)


def test_constant_rejects_N():
    with pytest.raises(ScheduleError):
        make_constant(0.5, 0)


def test_constant_positivity_all_equalities():
    rep = check_positivity_condition(make_constant(0.3, 20))
    assert rep.verdict and rep.holds.all() and rep.advisory
    assert list(rep.indices) == list(range(1, 20))


def test_asymmetric_values():
    s = make_asymmetric(0.02, 100)
    assert np.all(s.birth == 0.51) and np.all(s.death == 0.49)
    assert s.params["q"] == pytest.approx(0.49 / 0.51, rel=1e-15)
    assert check_positivity_condition(s).verdict


def test_asymmetric_q():
    assert asymmetry_q(0.5) == pytest.approx(1 / 3, rel=1e-15)
    assert make_asymmetric(0.5, 10).params["q"] == pytest.approx(1 / 3, rel=1e-15)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.2, 1.3])
def test_asymmetric_rejects(eps):
    with pytest.raises(ScheduleError):
        make_asymmetric(eps, 10)


def test_offset_exponential_figure3():
    s = make_offset_exponential(0.1, 0.12, 0.1, 0.15, 1, 50)
    assert s.b(0) == pytest.approx(1.1)
    assert s.d(0) == 0.0
    assert s.death[0] == pytest.approx(1.1)
    for i in (1, 5, 49, 51):
        assert s.b(i) == pytest.approx(0.1 + np.exp(-0.12 * i), rel=1e-15)
    assert s.d(52) == pytest.approx(0.1 + np.exp(-0.15 * 52), rel=1e-15)


def test_offset_exponential_figure4_sqrt():
    s = make_offset_exponential(0, 0.12, 0, 0.15, 0.5, 50)
    for i in (0, 4, 9, 50):
        assert s.b(i) == pytest.approx(np.exp(-0.12 * np.sqrt(i)), rel=1e-15)
        assert s.death[i] == pytest.approx(np.exp(-0.15 * np.sqrt(i)), rel=1e-15)


def test_offset_exponential_figure5():
    s = make_offset_exponential(0.01, 0.15, 0.01, 0.12, 1, 50)
    assert s.b(3) == pytest.approx(0.01 + np.exp(-0.45), rel=1e-15)
    assert s.d(3) == pytest.approx(0.01 + np.exp(-0.36), rel=1e-15)


def test_offset_exponential_rejects_zero_rate():
    # exp(-1000 * i) underflows to 0 for i >= 1
    with pytest.raises(ScheduleError):
        make_offset_exponential(0.0, 1000.0, 0.1, 0.1, 1, 5)


def test_figure5_positivity_per_index():
    s = make_offset_exponential(0.01, 0.15, 0.01, 0.12, 1, 50)
    rep = check_positivity_condition(s)
    expected = [s.b(i) / s.d(i + 1) >= s.b(i - 1) / s.d(i) for i in range(1, 50)]
    assert list(rep.holds) == expected
    assert rep.verdict == all(expected)
    assert not rep.verdict


def test_constructed_violation():
    N = 4
    b = [1.0, 0.1, 0.1, 0.1, 0.1, 0.1]
    d = [0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]
    rep = check_positivity_condition(make_explicit(b, d, N))
    assert not rep.holds[0]
    assert rep.violations[0] == 1


def test_accessor_bounds():
    s = make_constant(0.5, 3)
    with pytest.raises(IndexError):
        s.b(5)
    with pytest.raises(IndexError):
        s.d(6)
    with pytest.raises(IndexError):
        s.b(-2)


def test_immutable():
    s = make_constant(0.5, 3)
    with pytest.raises(ValueError):
        s.birth[0] = 2.0


@pytest.mark.parametrize(
    "doc, expected",
    [
        ({"kind": "constant", "b": 0.5, "N": 20}, make_constant(0.5, 20)),
        ({"kind": "asymmetric", "epsilon": 0.02, "N": 100}, make_asymmetric(0.02, 100)),
        (
            {"kind": "explicit", "b": [0.4] * 7, "d": [0.4] * 8, "N": 5},
            make_constant(0.4, 5),
        ),
        (
            {"kind": "offset_exponential", "c_b": 0.1, "alpha_b": 0.12, "c_d": 0.1,
             "alpha_d": 0.15, "power": 1, "N": 50},
            make_offset_exponential(0.1, 0.12, 0.1, 0.15, 1, 50),
        ),
    ],
)
def test_load_schedule(doc, expected):
    assert load_schedule(doc) == expected
    assert load_schedule(json.dumps(doc)) == expected


def test_load_schedule_from_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"kind": "constant", "b": 0.5, "N": 20}))
    assert load_schedule(p) == make_constant(0.5, 20)
    assert load_schedule(str(p)) == make_constant(0.5, 20)


@pytest.mark.parametrize(
    "doc",
    [
        "{not json",
        {"kind": "weird", "N": 3},
        {"kind": "constant", "N": 3},
        {"kind": "explicit", "b": [0.4] * 3, "d": [0.4] * 8, "N": 5},
        {"kind": "explicit", "b": [0.4] * 7, "d": [0.4] * 4, "N": 5},
        {"kind": "explicit", "b": [0.4, 0.4, -0.4, 0.4, 0.4, 0.4, 0.4], "d": [0.4] * 8, "N": 5},
        {"kind": "constant", "b": 0.5, "N": "7"},
    ],
)
def test_load_schedule_rejects(doc):
    with pytest.raises(ScheduleError):
        load_schedule(doc)


def test_negative_rate_names_index():
    with pytest.raises(ScheduleError) as info:
        load_schedule({"kind": "explicit", "b": [0.4, 0.4, -0.4, 0.4, 0.4, 0.4, 0.4], "d": [0.4] * 8, "N": 5})
    assert info.value.index == 2


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_save_load_round_trip(name, tmp_path):
    s = BUILTIN[name]
    path = tmp_path / "s.json"
    save_schedule(s, path)
    back = load_schedule(path)
    assert back == s
    assert np.array_equal(back.birth, s.birth) and np.array_equal(back.death, s.death)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_builtin_invariants(name):
    s = BUILTIN[name]
    assert np.all(np.isfinite(s.birth)) and np.all(np.isfinite(s.death))
    assert np.all(s.birth[: s.N] > 0) and np.all(s.death[1 : s.N + 1] > 0)
    assert s.b(-1) == 0.0 and s.d(0) == 0.0
    for n in range(s.N + 1):
        assert s.sigma(n) == s.b(n) + s.d(n)
