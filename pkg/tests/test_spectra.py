import json
import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from scipy.optimize import brentq
from scipy.special import entr

from backend.core.exception_handler import (
    BadConfig,
    IndexBeyondRank,
    InfiniteEntropy,
    NonNormalized,
    NotMixed,
)
from backend.optimal.hamiltonian import optimal_hamiltonian
from backend.spectra.spectrum import (
    ExplicitSpectrum,
    GeometricSpectrum,
    LinearSpectrum,
    TruncatedSpectrum,
    UniformSpectrum,
    make_spectrum,
    oscillator_entropy,
    parse_spectrum_source,
)


def test_explicit_rejects_bad_mass():
    with pytest.raises(NonNormalized):
        ExplicitSpectrum([0.5, 0.4])
    with pytest.raises(NonNormalized):
        ExplicitSpectrum([1.2, -0.2])
    with pytest.raises(NonNormalized):
        ExplicitSpectrum([0.5, float("nan")])


def test_explicit_pure_state_is_not_mixed():
    with pytest.raises(NotMixed):
        ExplicitSpectrum([1.0])
    with pytest.raises(NotMixed):
        ExplicitSpectrum([1.0, 0.0, 0.0])


def test_explicit_sorts_and_drops_zeros():
    spec = ExplicitSpectrum([0.2, 0.0, 0.5, 0.3])
    assert spec.rank == 3
    assert spec.eigenvalues(3).tolist() == pytest.approx([0.5, 0.3, 0.2], abs=1e-15)


def test_uniform_tail_sums():
    n = 10
    spec = UniformSpectrum(n)
    assert spec.entropy == pytest.approx(math.log(n), abs=1e-15)
    for k in range(1, n):
        tails = spec.tail_sums(k)
        assert tails.d == pytest.approx((n - k) / n, abs=1e-15)
        assert tails.s == pytest.approx((n - k) / n * math.log(n), abs=1e-14)
    assert spec.tail_sums(n).d == 0.0
    assert spec.tail_sums(n + 5).s == 0.0
    with pytest.raises(IndexBeyondRank):
        spec.tail_sums(0)


def test_linear_spectrum_shape():
    n = 10
    spec = LinearSpectrum(n)
    p = spec.eigenvalues(n)
    assert p.sum() == pytest.approx(1.0, abs=1e-15)
    assert p[0] == pytest.approx(2 / (n + 1))
    assert p[-1] == pytest.approx(2 / (n * (n + 1)))
    _, d, _ = spec.tail_arrays(n)
    assert d == pytest.approx(1.0 - np.cumsum(p), abs=1e-14)


def test_geometric_matches_direct_sums():
    spec = GeometricSpectrum.from_energy(1.0)
    assert spec.q == pytest.approx(0.5)
    assert spec.entropy == pytest.approx(2 * math.log(2), abs=1e-15)

    p, d, s = spec.tail_arrays(20)
    direct = 0.5 ** np.arange(1, 80)
    assert p == pytest.approx(direct[:20], rel=1e-14)
    assert d == pytest.approx(1.0 - np.cumsum(direct)[:20], abs=1e-14)
    assert s == pytest.approx(spec.entropy - np.cumsum(entr(direct))[:20], abs=1e-13)


def test_geometric_power_tail():
    q = 0.5
    spec = GeometricSpectrum(q)
    assert spec.power_tail(1.0, 0) == pytest.approx(1.0)
    assert spec.power_tail(2.0, 0) == pytest.approx((1 - q) / (1 + q))
    assert spec.power_tail(1.0, 3) == pytest.approx(q ** 3)
    assert spec.has_all_power_sums() is True


def test_oscillator_entropy():
    assert oscillator_entropy(0.0) == 0.0
    assert oscillator_entropy(1.0) == pytest.approx(2 * math.log(2))
    assert oscillator_entropy(10.0) == pytest.approx(11 * math.log(11) - 10 * math.log(10))


def test_truncated_spectrum_certificates():
    prefix = (0.5 ** np.arange(1, 61)).tolist()
    spec = TruncatedSpectrum(prefix)
    assert spec.rank is None
    assert spec.known_prefix == 60
    assert spec.entropy == pytest.approx(2 * math.log(2), abs=1e-12)
    assert spec.has_all_power_sums() is None
    assert spec.power_tail(0.5, 10) == math.inf
    with pytest.raises(IndexBeyondRank):
        spec.eigenvalue(61)


def test_truncated_spectrum_rejects_missing_mass():
    with pytest.raises(NonNormalized):
        TruncatedSpectrum([0.5, 0.25, 0.125])


def test_truncated_spectrum_unsettled_entropy():
    with pytest.raises(InfiniteEntropy):
        TruncatedSpectrum([0.6, 0.4 - 1e-13, 1e-13])


def test_truncated_spectrum_bounds_residual_entropy():
    # 마지막 항은 τ 이하지만 빠진 질량 9e-13 의 엔트로피는 ≥ 9e-13·ln(1e14)
    with pytest.raises(InfiniteEntropy):
        TruncatedSpectrum([0.5, 0.5 - 9e-13 - 1e-14, 1e-14])


def test_truncated_tail_sums_include_residual():
    prefix = (0.5 ** np.arange(1, 41)).tolist()
    spec = TruncatedSpectrum(prefix, tau=1e-9)
    reference = GeometricSpectrum(0.5)
    tail = spec.tail_sums(40)
    assert tail.d == 0.5 ** 40
    assert tail.s > 0
    assert tail.s == pytest.approx(reference.tail_sums(40).s, rel=1e-9)
    assert spec.tail_sums(10).s == pytest.approx(reference.tail_sums(10).s, rel=1e-9)
    assert spec.entropy == pytest.approx(reference.entropy, abs=1e-12)
    assert TruncatedSpectrum.residual_entropy(0.0, 1e-3) == 0.0


def test_make_spectrum_descriptors():
    assert make_spectrum({"type": "uniform", "n": 4}).rank == 4
    assert make_spectrum({"type": "geometric", "q": 0.25}).rank is None
    with pytest.raises(BadConfig):
        make_spectrum({"type": "geometric", "q": 0.25, "E0": 1.0})
    with pytest.raises(BadConfig):
        make_spectrum({"type": "sawtooth", "n": 4})


def test_parse_spectrum_source(tmp_path):
    assert parse_spectrum_source("uniform:10").entropy == pytest.approx(math.log(10))
    assert parse_spectrum_source("geometric:1").entropy == pytest.approx(2 * math.log(2))
    assert parse_spectrum_source("explicit:0.5,0.3,0.2").rank == 3

    path = tmp_path / "rho.json"
    path.write_text(json.dumps({"type": "linear", "n": 5}), encoding="utf-8")
    assert parse_spectrum_source(str(path)).model == "linear"

    with pytest.raises(BadConfig):
        parse_spectrum_source("bogus:3")
    with pytest.raises(BadConfig):
        parse_spectrum_source("uniform:ten")


def test_describe_lists_tail_sums():
    info = UniformSpectrum(4).describe(preview=3)
    assert info["rank"] == 4
    assert len(info["leading_eigenvalues"]) == 3
    assert info["tail_sums"][0]["d"] == pytest.approx(0.75)


@given(st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=2, max_size=40))
@hyp_settings(max_examples=100, deadline=None)
def test_tail_sums_partition_the_spectrum(raw):
    p = np.sort(np.asarray(raw))[::-1]
    spec = ExplicitSpectrum((p / p.sum()).tolist())
    q, d, s = spec.tail_arrays(spec.rank)
    assert d + np.cumsum(q) == pytest.approx(np.ones(spec.rank), abs=1e-12)
    assert s + np.cumsum(entr(q)) == pytest.approx(np.full(spec.rank, spec.entropy), abs=1e-12)


def test_optimal_parameters_depend_only_on_leading_eigenvalues_and_entropy():
    # tails (0.15, 0.15) and (a, b, b) share mass and entropy
    target = 2 * entr(0.15)
    a = brentq(lambda t: entr(t) + 2 * entr((0.3 - t) / 2) - target, 0.1, 0.3, xtol=1e-15)
    b = (0.3 - a) / 2
    first = ExplicitSpectrum([0.4, 0.3, 0.15, 0.15])
    second = ExplicitSpectrum([0.4, 0.3, a, b, b])
    assert first.entropy == pytest.approx(second.entropy, abs=1e-13)

    E = 0.8
    H1 = optimal_hamiltonian(first, 1.0, E)
    H2 = optimal_hamiltonian(second, 1.0, E)
    assert H1.m == H2.m == 1
    assert H1.beta == pytest.approx(H2.beta, abs=1e-12)
    assert H1.C == pytest.approx(H2.C, abs=1e-12)
    assert H1.D == pytest.approx(H2.D, abs=1e-12)
    assert H1.entropy == pytest.approx(H2.entropy, abs=1e-12)
    assert H1.levels(2) == pytest.approx(H2.levels(2), abs=1e-12)
