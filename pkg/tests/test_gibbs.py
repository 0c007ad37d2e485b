import json
import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from backend.core.exception_handler import (
    BadConfig,
    InvalidHamiltonian,
    NoGibbsState,
    OutOfRange,
)
from backend.gibbs import solver
from backend.gibbs.solver import (
    FiniteHamiltonian,
    SequenceHamiltonian,
    g_abscissa,
    h_star,
    load_hamiltonian,
    max_entropy,
    mean_energy,
    partition_function,
    solve_gibbs,
    weights_entropy,
)
from backend.spectra.spectrum import oscillator_entropy


def number_operator() -> SequenceHamiltonian:
    return SequenceHamiltonian(lambda i: np.asarray(i, dtype=float) - 1.0, min_gap=1.0)


def log_levels() -> SequenceHamiltonian:
    def tail_bound(b, N):
        # Σ_{i>N} i^{-b} ≤ N^{1-b}/(b-1)
        return N ** (1.0 - b) / (b - 1.0) if b > 1 else math.inf

    return SequenceHamiltonian(lambda i: np.log(np.asarray(i, dtype=float)), tail_bound=tail_bound)


def test_finite_hamiltonian_validation():
    with pytest.raises(InvalidHamiltonian):
        FiniteHamiltonian([0.0, -1.0])
    with pytest.raises(InvalidHamiltonian):
        FiniteHamiltonian([0.5, 1.0])
    with pytest.raises(InvalidHamiltonian):
        FiniteHamiltonian([0.0, float("nan")])
    H = FiniteHamiltonian([2.0, 0.0, math.inf, 1.0])
    assert H.dimension == 3
    assert H.levels(3).tolist() == [0.0, 1.0, 2.0]


def test_partition_function_needs_positive_b():
    H = FiniteHamiltonian([0.0, 1.0])
    with pytest.raises(OutOfRange):
        partition_function(H, 0.0)
    with pytest.raises(OutOfRange):
        mean_energy(H, -1.0)
    assert partition_function(H, 1.0) == pytest.approx(1.0 + math.exp(-1.0))


def test_two_level_gibbs_state():
    H = FiniteHamiltonian([0.0, 1.0])
    state = solve_gibbs(H, 0.25)
    assert state.beta == pytest.approx(math.log(3), abs=1e-9)
    assert state.weights == pytest.approx([0.75, 0.25], abs=1e-12)
    assert state.mean_energy == pytest.approx(0.25, abs=1e-10)
    assert state.entropy == pytest.approx(weights_entropy(state.weights), abs=1e-12)


def test_finite_domain_switches_to_uniform_state():
    H = FiniteHamiltonian([0.0, 1.0])
    assert h_star(H) == pytest.approx(0.5)
    state = solve_gibbs(H, 0.7)
    assert state.finite_dim_uniform
    assert state.beta == 0.0
    assert state.entropy == pytest.approx(math.log(2))
    assert state.mean_energy == pytest.approx(0.5)


def test_energy_must_be_positive():
    with pytest.raises(OutOfRange):
        solve_gibbs(FiniteHamiltonian([0.0, 1.0]), 0.0)


@pytest.mark.parametrize("E", [0.3, 1.0, 2.5, 5.0])
def test_number_operator_gives_oscillator_entropy(E):
    H = number_operator()
    state = solve_gibbs(H, E)
    assert abs(state.mean_energy - E) <= 1e-10 * max(1.0, E)
    assert state.beta == pytest.approx(math.log1p(1.0 / E), rel=1e-9)
    assert state.entropy == pytest.approx(oscillator_entropy(E), abs=1e-9)


def test_number_operator_has_no_convergence_threshold():
    H = number_operator()
    assert g_abscissa(H) == 0.0
    assert h_star(H) == math.inf


def test_log_levels_convergence_abscissa():
    H = log_levels()
    assert H.converges(1.5)
    assert not H.converges(0.9)
    assert g_abscissa(H) == pytest.approx(1.0, abs=1e-8)


def test_no_gibbs_state_above_h_star(monkeypatch):
    monkeypatch.setattr(solver, "h_star", lambda H: 2.0)
    with pytest.raises(NoGibbsState):
        solve_gibbs(number_operator(), 3.0)


def log_log_levels(k: int = 25) -> SequenceHamiltonian:
    """h_i = ln i + k ln(1 + ln i): g(H) = 1 이고 ⟨H⟩_1 이 유한"""

    def level_fn(i):
        i = np.asarray(i, dtype=float)
        return np.log(i) + k * np.log1p(np.log(i))

    def tail_bound(b, N):
        # Σ_{i>N} i^{-b}(1+ln i)^{-kb} ≤ N^{1-b} (1+ln N)^{1-kb} / (kb-1)
        if b < 1 or k * b <= 1:
            return math.inf
        return N ** (1.0 - b) * (1.0 + math.log(N)) ** (1.0 - k * b) / (k * b - 1.0)

    def energy_tail_bound(b, N):
        # h_i ≤ (k+1)(1 + ln i)
        if b < 1 or k * b <= 2:
            return math.inf
        return (k + 1) * N ** (1.0 - b) * (1.0 + math.log(N)) ** (2.0 - k * b) / (k * b - 2.0)

    return SequenceHamiltonian(level_fn, tail_bound=tail_bound, energy_tail_bound=energy_tail_bound)


def test_convergence_abscissa_is_on_the_convergent_side():
    H = log_log_levels()
    g = g_abscissa(H)
    assert 1.0 <= g <= 1.0 + 1e-8
    assert H.converges(g)


def test_finite_h_star_on_infinite_domain():
    H = log_log_levels()
    hs = h_star(H)
    assert math.isfinite(hs)
    assert 1e-5 < hs < 2e-5
    with pytest.raises(NoGibbsState):
        solve_gibbs(H, 1.0)

    E = 0.5 * hs
    state = solve_gibbs(H, E)
    assert state.beta > g_abscissa(H)
    assert abs(state.mean_energy - E) <= 1e-10


@pytest.mark.parametrize("b", [0.05, 0.3, 1.0, 2.7])
def test_mean_energy_decreases_for_number_operator(b):
    H = number_operator()
    assert mean_energy(H, b) > mean_energy(H, b * 1.001)


@given(
    st.lists(st.floats(min_value=0.01, max_value=50.0), min_size=1, max_size=20),
    st.floats(min_value=0.05, max_value=5.0),
)
@hyp_settings(max_examples=150, deadline=None)
def test_mean_energy_strictly_decreasing(raw, b):
    H = FiniteHamiltonian([0.0] + raw)
    assert mean_energy(H, b) > mean_energy(H, b * 1.001)



@pytest.mark.parametrize("c", [0.1, 3.0, 42.0])
def test_scaling_of_max_entropy(c):
    finite = FiniteHamiltonian([0.0, 0.4, 1.1, 2.0, 3.5])
    for E in (0.2, 0.9, 1.3):
        assert max_entropy(finite.scaled(c), c * E) == pytest.approx(max_entropy(finite, E), abs=1e-10)
    oscillator = number_operator()
    assert max_entropy(oscillator.scaled(c), c * 1.5) == pytest.approx(max_entropy(oscillator, 1.5), abs=1e-10)


@given(
    st.lists(st.floats(min_value=0.01, max_value=50.0), min_size=1, max_size=20),
    st.floats(min_value=0.05, max_value=0.95),
)
@hyp_settings(max_examples=150, deadline=None)
def test_gibbs_residual_on_random_levels(raw, fraction):
    H = FiniteHamiltonian([0.0] + raw)
    E = fraction * h_star(H)
    state = solve_gibbs(H, E)
    assert abs(state.mean_energy - E) <= 1e-10 * max(1.0, E)
    assert sum(state.weights) == pytest.approx(1.0, abs=1e-12)
    assert state.entropy == pytest.approx(weights_entropy(state.weights), abs=1e-9)
    assert state.beta > 0


def test_load_hamiltonian(tmp_path):
    path = tmp_path / "H.json"
    path.write_text(json.dumps({"levels": [0, 1, 2], "finite_domain": True}), encoding="utf-8")
    assert load_hamiltonian(str(path)).dimension == 3

    path.write_text(json.dumps({"levels": [0, 1], "finite_domain": False}), encoding="utf-8")
    with pytest.raises(BadConfig):
        load_hamiltonian(str(path))
    with pytest.raises(BadConfig):
        load_hamiltonian(str(tmp_path / "missing.json"))
