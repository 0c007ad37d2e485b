import json
import math

import numpy as np
import pytest

from backend.bounds.lsb import (
    binary_entropy_envelope,
    find_preset,
    gibbs_condition_report,
    load_presets,
    lsb_bound,
    lsb_main_term,
)
from backend.core.exception_handler import BadConfig, OutOfRange
from backend.gibbs.solver import FiniteHamiltonian, max_entropy
from backend.spectra.spectrum import (
    ExplicitSpectrum,
    GeometricSpectrum,
    LinearSpectrum,
    TruncatedSpectrum,
    UniformSpectrum,
)


def test_envelope_values():
    assert binary_entropy_envelope(0.0) == 0.0
    assert binary_entropy_envelope(0.8) == math.log(2)
    assert binary_entropy_envelope(0.5) == pytest.approx(math.log(2), abs=1e-15)
    assert binary_entropy_envelope(0.25) == pytest.approx(0.5623351446, abs=1e-9)
    with pytest.raises(OutOfRange):
        binary_entropy_envelope(1.5)
    with pytest.raises(OutOfRange):
        binary_entropy_envelope(-0.1)


def test_envelope_is_nondecreasing():
    values = [binary_entropy_envelope(e) for e in np.linspace(0.0, 1.0, 201)]
    assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("spec", [
    ExplicitSpectrum([0.5, 0.3, 0.15, 0.05]),
    LinearSpectrum(10),
    GeometricSpectrum.from_energy(1.0),
])
def test_main_term_at_unit_distance_is_entropy(spec):
    assert lsb_main_term(spec, 1.0) == pytest.approx(spec.entropy, abs=1e-12)


def test_main_term_saturates_for_finite_rank():
    spec = UniformSpectrum(10)
    for eps in (0.5, 1e-2, 1e-6):
        assert lsb_main_term(spec, eps) == pytest.approx(math.log(10), abs=1e-12)


def test_main_term_rejects_bad_eps():
    with pytest.raises(OutOfRange):
        lsb_main_term(UniformSpectrum(3), 0.0)
    with pytest.raises(OutOfRange):
        lsb_main_term(UniformSpectrum(3), 1.2)


@pytest.mark.parametrize("spec", [
    LinearSpectrum(10),
    GeometricSpectrum(0.5),
    ExplicitSpectrum([0.5, 0.3, 0.15, 0.05]),
])
def test_scaled_main_term_shrinks_on_dyadic_grid(spec):
    values = [2.0 ** -k * lsb_main_term(spec, 2.0 ** -k) for k in range(13)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("spec", [LinearSpectrum(10), ExplicitSpectrum([0.5, 0.3, 0.15, 0.05])])
@pytest.mark.parametrize("eps", [0.5, 0.1, 0.02])
def test_main_term_is_minimal_under_energy_budget(spec, eps):
    rng = np.random.default_rng(17)
    p = spec.eigenvalues(spec.rank)
    main = lsb_main_term(spec, eps)
    for _ in range(200):
        # 오름차순 준위를 내림차순 p 에 대응, Σ p_i h_i ≤ 1
        levels = np.concatenate([[0.0], np.cumsum(rng.exponential(1.0, p.size - 1))])
        levels *= rng.uniform(0.05, 1.0) / np.dot(p, levels)
        assert max_entropy(FiniteHamiltonian(levels), 1.0 / eps) >= main - 1e-9


def test_preset_catalog():
    presets = load_presets()
    assert [(p.C, p.D) for p in presets] == [
        (1, 1), (1, 1), (1, 1), (2, 2), (2, 2), (1, 1), (1, 2), (2, 2), (1, 2), (1, 2),
    ]
    assert find_preset("entanglement-of-formation").metric_note == "sqrt(1 - fidelity)"
    assert find_preset("Von Neumann Entropy").key == "entropy"
    assert find_preset("conditional-mutual-information").n_parties == 3


def test_unknown_preset():
    with pytest.raises(BadConfig) as info:
        find_preset("negativity")
    assert "mutual-information" in info.value.message


def test_broken_preset_file(tmp_path):
    path = tmp_path / "presets.json"
    path.write_text(json.dumps([{"key": "x", "name": "x", "n_parties": 1, "C": -1, "D": 1,
                                 "metric_note": "?"}]), encoding="utf-8")
    with pytest.raises(BadConfig):
        load_presets(path)
    with pytest.raises(BadConfig):
        load_presets(tmp_path / "missing.json")


def test_bound_at_unit_distance():
    spec = GeometricSpectrum.from_energy(1.0)
    result = lsb_bound(spec, 1.0, find_preset("entropy"))
    assert result.value == pytest.approx(spec.entropy + math.log(2), abs=1e-12)
    assert result.main_term == pytest.approx(spec.entropy, abs=1e-12)
    assert result.gibbs_condition.satisfied is True

    doubled = lsb_bound(spec, 1.0, find_preset("mutual-information"))
    assert doubled.value == pytest.approx(2 * result.value, abs=1e-12)


def test_bound_shrinks_with_distance():
    spec = GeometricSpectrum(0.5)
    preset = find_preset("entropy")
    values = [lsb_bound(spec, eps, preset).value for eps in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_gibbs_condition_report():
    assert gibbs_condition_report(UniformSpectrum(4)).satisfied is True
    assert gibbs_condition_report(GeometricSpectrum(0.3)).satisfied is True
    truncated = TruncatedSpectrum((0.5 ** np.arange(1, 61)).tolist())
    report = gibbs_condition_report(truncated)
    assert report.satisfied is None
    assert "truncated" in report.reason
