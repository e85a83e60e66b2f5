import numpy as np
import pytest

from bdriccati import (
    DParameter,
    build_generator,
    classical_stationary,
    current_profile,
    effective_schedule,
    evolve,
    make_asymmetric,
    make_constant,
    make_explicit,
    null_space_stationary,
    parametric_stationary,
    probability_current,
    stationarity_residual,
    total_variation,
)
from bdriccati.distribution import Distribution
from bdriccati.dynamics import ReducibleChainError, max_stable_step

from conftest import BUILTIN


def test_generator_constant_small():
    g = build_generator(make_constant(0.5, 2))
    np.testing.assert_array_equal(g.diag, [0.5, 1.0, 0.5])
    np.testing.assert_array_equal(g.sub, [0.5, 0.5])
    np.testing.assert_array_equal(g.sup, [0.5, 0.5])


def test_generator_two_state():
    g = build_generator(make_asymmetric(0.5, 1))
    np.testing.assert_array_equal(g.sub, [0.75])
    np.testing.assert_array_equal(g.sup, [0.25])
    np.testing.assert_array_equal(g.diag, [0.75, 0.25])


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_generator_columns_sum_to_zero(name):
    Q = build_generator(BUILTIN[name]).matrix()
    assert np.max(np.abs(Q.sum(axis=0))) <= 1e-15
    off = Q - np.diag(np.diag(Q))
    assert np.all(off >= 0)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_apply_matches_dense(name):
    g = build_generator(BUILTIN[name])
    p = np.random.default_rng(0).random(g.N + 1)
    np.testing.assert_allclose(g.apply(p), g.matrix() @ p, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_classical_is_stationary(name):
    s = BUILTIN[name]
    assert stationarity_residual(build_generator(s), classical_stationary(s).p) <= 1e-14


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_parametric_stationary_only_for_effective_chain(name):
    s = BUILTIN[name]
    dp = DParameter(-4)
    p = parametric_stationary(s, dp).p
    g = build_generator(s)
    noise = 1e3 * np.finfo(float).eps * np.max(g.diag * p)
    assert stationarity_residual(g, p) > noise
    assert stationarity_residual(build_generator(effective_schedule(s, dp)), p) <= 1e-12


def test_stationarity_residual_dimension():
    with pytest.raises(ValueError):
        stationarity_residual(build_generator(make_constant(0.5, 3)), np.ones(3) / 3)


def test_null_space_constant_uniform():
    p = null_space_stationary(build_generator(make_constant(0.5, 20)))
    np.testing.assert_allclose(p.p, 1 / 21, rtol=1e-13)
    assert p.provenance == "oracle"


def test_null_space_matches_dense_solver():
    # independent check of the banded elimination: dense least squares on [Q; 1^T]
    s = BUILTIN["figure5"]
    g = build_generator(s)
    A = np.vstack([g.matrix(), np.ones(g.N + 1)])
    rhs = np.zeros(g.N + 2)
    rhs[-1] = 1.0
    x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    assert total_variation(x, null_space_stationary(g)) <= 1e-10


def test_null_space_figure4_vs_classical():
    s = BUILTIN["figure4"]
    assert total_variation(null_space_stationary(build_generator(s)), classical_stationary(s)) <= 1e-10


def test_null_space_effective_asymmetric_vs_closed_form():
    from bdriccati import asymmetric_closed_form

    s = make_asymmetric(0.02, 100)
    dp = DParameter(-4)
    oracle = null_space_stationary(build_generator(effective_schedule(s, dp)))
    assert total_variation(oracle, asymmetric_closed_form(0.02, 100, dp)) <= 1e-10


def test_null_space_reducible():
    b = [0.5, 0.5, 0.5, 0.5, 0.5]
    d = [0.5, 0.5, 0.5, 0.5, 0.5, 0.5]
    s = make_explicit(b, d, 3)
    g = build_generator(s)
    broken = type(g)(g.N, np.array([0.5, 0.0, 0.5]), g.diag, g.sup)
    with pytest.raises(ReducibleChainError):
        null_space_stationary(broken)


# --- currents ---------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_classical_current_zero(name):
    s = BUILTIN[name]
    p = classical_stationary(s).p
    assert max(abs(probability_current(s, p, n)) for n in range(1, s.N + 1)) <= 1e-14


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_parametric_current_zero_in_effective_chain(name):
    s = BUILTIN[name]
    dp = DParameter(-4)
    p = parametric_stationary(s, dp).p
    assert np.max(np.abs(current_profile(effective_schedule(s, dp), p))) <= 1e-12
    J = current_profile(s, p)
    noise = 1e3 * np.finfo(float).eps * np.max(s.birth[: s.N] * p[:-1])
    assert np.max(np.abs(J)) > noise


def test_current_matches_scalar():
    s = BUILTIN["figure3"]
    p = parametric_stationary(s, DParameter(-4)).p
    J = current_profile(s, p)
    assert all(J[n - 1] == probability_current(s, p, n) for n in range(1, s.N + 1))


def test_current_index_bounds():
    s = make_constant(0.5, 3)
    for n in (0, 4):
        with pytest.raises(IndexError):
            probability_current(s, np.ones(4) / 4, n)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_current_decomposition(name):
    s = BUILTIN[name]
    g = build_generator(s)
    p = np.random.default_rng(3).dirichlet(np.ones(s.N + 1))
    J = np.concatenate(([0.0], current_profile(s, p), [0.0]))
    np.testing.assert_allclose(g.apply(p), J[:-1] - J[1:], atol=1e-15)


# --- evolution --------------------------------------------------------------

def test_evolve_fixed_point():
    s = BUILTIN["figure3"]
    g = build_generator(s)
    p0 = classical_stationary(s)
    out = evolve(g, p0.p, 50.0, max_stable_step(g))
    assert np.max(np.abs(out.p - p0.p)) <= 1e-10


def test_evolve_rejects_large_step():
    g = build_generator(make_constant(0.5, 5))
    with pytest.raises(ValueError):
        evolve(g, np.ones(6) / 6, 1.0, 0.2)


def test_evolve_point_mass_to_uniform():
    s = make_constant(0.5, 20)
    g = build_generator(s)
    p0 = np.zeros(21)
    p0[0] = 1.0
    out, times, path = evolve(g, p0, 2000.0, 0.1, return_path=True)
    assert total_variation(out, null_space_stationary(g)) <= 1e-6
    assert np.max(np.abs(path.sum(axis=1) - 1.0)) <= 1e-10
    assert times[-1] == 2000.0 and len(times) == len(path)


@pytest.mark.parametrize("name", ["constant", "figure3", "random"])
def test_propagator_matches_stepping(name):
    s = BUILTIN[name]
    g = build_generator(s)
    p0 = np.random.default_rng(1).dirichlet(np.ones(g.N + 1))
    dt = max_stable_step(g)
    fast = evolve(g, p0, 37.3, dt)
    slow, _, _ = evolve(g, p0, 37.3, dt, return_path=True)
    np.testing.assert_allclose(fast.p, slow.p, atol=1e-13)


def test_evolve_zero_time():
    g = build_generator(make_constant(0.5, 5))
    p0 = np.eye(6)[2]
    assert np.array_equal(evolve(g, p0, 0.0, 0.1).p, p0)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_evolve_converges_from_random_starts(name):
    s = BUILTIN[name]
    g = build_generator(s)
    target = null_space_stationary(g)
    # relaxation time from the spectral gap of the dense generator
    ev = np.sort(np.linalg.eigvals(g.matrix()).real)
    gap = -ev[-2]
    t_final = np.log(1e9 / target.p.min()) / gap
    dt = max_stable_step(g)
    rng = np.random.default_rng(5)
    for _ in range(5):
        p0 = rng.dirichlet(np.ones(g.N + 1))
        out = evolve(g, p0, t_final, dt)
        assert total_variation(out, target) <= 1e-6
        assert abs(out.p.sum() - 1) <= 1e-10 * max(1.0, t_final)
