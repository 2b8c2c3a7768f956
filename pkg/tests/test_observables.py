import numpy as np
import pytest
from numpy.testing import assert_allclose

from spincat.dynamics import DecoherenceSpec, TimeGrid, evolve_lindblad
from spincat.observables import (
    SizeSeries,
    cat_coherence,
    effective_size,
    expectation_and_variance,
    flip_probability,
    flip_probability_peak,
    husimi_q,
    revival_peaks,
    save_husimi,
    save_size_series,
)
from spincat.spin import (
    SpinQuantum,
    coherent_state,
    eigenstate,
    rotation_operator,
    spin_operators,
)

TWO_PI = 2 * np.pi


def zcat(spin):
    return (eigenstate(spin, spin.i) + eigenstate(spin, -spin.i)) / np.sqrt(2)


def test_expectation_and_variance_examples():
    spin = SpinQuantum(7)
    ops = spin_operators(spin)
    e, v = expectation_and_variance(eigenstate(spin, 3.5), ops.Iz)
    assert (e, v) == (pytest.approx(3.5), pytest.approx(0.0, abs=1e-12))
    e, v = expectation_and_variance(coherent_state(spin, np.pi / 2, 0.0), ops.Ix)
    assert e == pytest.approx(3.5, abs=1e-10)
    assert v == pytest.approx(0.0, abs=1e-10)
    e, v = expectation_and_variance(zcat(spin), ops.Iz)
    assert e == pytest.approx(0.0, abs=1e-12)
    assert v == pytest.approx(3.5 ** 2, rel=1e-12)


def test_expectation_rejects_non_hermitian():
    spin = SpinQuantum(3)
    with pytest.raises(ValueError):
        expectation_and_variance(eigenstate(spin, 1.5), np.triu(np.ones((4, 4))))


def test_effective_size_reference_points():
    spin = SpinQuantum(7)
    ops = spin_operators(spin)
    coh = coherent_state(spin, np.pi / 2, 0.0)
    assert effective_size(coh, ops.Iy, spin) == pytest.approx(1.0, rel=1e-10)
    assert effective_size(zcat(spin), ops.Iz, spin) == pytest.approx(7.0, rel=1e-12)
    assert effective_size(eigenstate(spin, 3.5), ops.Iz, spin) == pytest.approx(
        0.0, abs=1e-12
    )
    # density-matrix route agrees with the pure route
    rho = np.outer(zcat(spin), zcat(spin).conj())
    assert effective_size(rho, ops.Iz, spin) == pytest.approx(7.0, rel=1e-10)


def test_effective_size_rotation_invariance():
    rng = np.random.default_rng(4)
    spin = SpinQuantum(7)
    ops = spin_operators(spin)
    psi = zcat(spin)
    for _ in range(5):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        u = rotation_operator(spin, axis, rng.uniform(0, TWO_PI))
        rotated_size = effective_size(u @ psi, u @ ops.Iz @ u.conj().T, spin)
        assert rotated_size == pytest.approx(
            effective_size(psi, ops.Iz, spin), rel=1e-10
        )


def test_effective_size_bounded_by_2i():
    rng = np.random.default_rng(9)
    for twice_i in (3, 7, 9):
        spin = SpinQuantum(twice_i)
        ops = spin_operators(spin)
        for _ in range(20):
            psi = rng.normal(size=spin.dimension) + 1j * rng.normal(size=spin.dimension)
            psi /= np.linalg.norm(psi)
            for op in (ops.Ix, ops.Iy, ops.Iz):
                assert effective_size(psi, op, spin) <= 2 * spin.i + 1e-9


def test_husimi_stretched_state():
    spin = SpinQuantum(7)
    grid = husimi_q(eigenstate(spin, 3.5), spin)
    peak_idx = np.unravel_index(np.argmax(grid.values), grid.values.shape)
    assert grid.thetas[peak_idx[0]] == pytest.approx(0.0)
    assert_allclose(grid.values[0, :], spin.dimension / (4 * np.pi), rtol=1e-12)


def test_husimi_cat_bimodality_and_suppression():
    spin = SpinQuantum(7)
    grid = husimi_q(zcat(spin), spin)
    pole_val = grid.values[0, 0]
    south_val = grid.values[-1, 0]
    assert pole_val == pytest.approx(south_val, rel=1e-9)
    equator = grid.values[grid.values.shape[0] // 2, :]
    # equator overlap (1/2)|cos^{2I} + e^{i chi} sin^{2I}|^2 at theta/2 = pi/4
    # is suppressed by 2^{-2I} up to the cross-term factor <= 4 and the pole
    # weight 1/2, i.e. max ratio = 2^{-2I+2}
    ratio = np.max(equator) / pole_val
    assert ratio <= 2.0 ** (-2 * spin.i + 2) * (1 + 1e-9)
    assert ratio >= 2.0 ** (-2 * spin.i)


def test_husimi_bimodality_grows_with_spin():
    ratios = []
    for twice_i in (2, 3, 5, 7):
        spin = SpinQuantum(twice_i)
        grid = husimi_q(zcat(spin), spin, n_theta=91, n_phi=181)
        equator_max = grid.values[45, :].max()
        ratios.append(equator_max / grid.values[0, 0])
    # spin-1 lobes overlap strongly; higher spins suppress the equator
    assert ratios[0] > 0.2
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_husimi_normalization_and_refinement():
    for twice_i in (3, 7, 9):
        spin = SpinQuantum(twice_i)
        psi = zcat(spin)
        fine = husimi_q(psi, spin, n_theta=181, n_phi=361)
        assert abs(fine.integral() - 1.0) < 1e-3
        coarse = husimi_q(psi, spin, n_theta=61, n_phi=121)
        assert abs(fine.integral() - 1.0) <= abs(coarse.integral() - 1.0)


def test_husimi_mixed_state_route():
    spin = SpinQuantum(5)
    psi = coherent_state(spin, 1.1, 0.4)
    pure_grid = husimi_q(psi, spin, n_theta=61, n_phi=121)
    mixed_grid = husimi_q(np.outer(psi, psi.conj()), spin, n_theta=61, n_phi=121)
    assert_allclose(mixed_grid.values, pure_grid.values, atol=1e-12)


def test_cat_coherence_values():
    spin = SpinQuantum(7)
    rho = np.outer(zcat(spin), zcat(spin).conj())
    assert cat_coherence(rho, spin) == pytest.approx(0.5, rel=1e-12)
    assert cat_coherence(zcat(spin), spin) == pytest.approx(0.5, rel=1e-12)


def test_cat_coherence_dephasing_decay():
    spin = SpinQuantum(5)
    rho0 = np.outer(zcat(spin), zcat(spin).conj())
    gm, t = 1000.0, 5e-4
    grid = TimeGrid(0.0, t, dt=5e-7, output_stride=10 ** 9)
    rho = evolve_lindblad(np.zeros((6, 6)), rho0, DecoherenceSpec(gamma_m=gm), grid).final_state
    expected = 0.5 * np.exp(-gm * 5 ** 2 * t / 2)
    assert cat_coherence(rho, spin) == pytest.approx(expected, rel=1e-6)


def test_flip_probability_reference_points():
    gb1 = TWO_PI * 0.8e3
    assert flip_probability(gb1, 0.0, np.pi / (2 * gb1)) == pytest.approx(1.0)
    assert flip_probability(gb1, TWO_PI * 80e3, 0.0) == 0.0
    peak = flip_probability_peak(gb1, 2 * TWO_PI * 40e3)
    assert peak == pytest.approx(0.64 / 1600.64, rel=1e-12)
    assert peak < 0.0004
    assert flip_probability_peak(0.0, 0.0) == 0.0


def test_flip_probability_bounded_by_peak():
    gb1 = TWO_PI * 0.8e3
    dw = TWO_PI * 30e3
    peak = flip_probability_peak(gb1, dw)
    ts = np.linspace(0, 1e-3, 500)
    vals = [flip_probability(gb1, dw, t) for t in ts]
    assert max(vals) <= peak * (1 + 1e-12)


def test_revival_peaks_extraction():
    t = np.linspace(0, 3 * np.pi, 2001)
    series = SizeSeries(times=t, values=np.sin(t) + 2, operator_tag="Iz")
    peaks = revival_peaks(series)
    assert_allclose(peaks.times, [np.pi / 2, 5 * np.pi / 2], atol=0.01)
    tall_only = revival_peaks(series, min_height=3.5)
    assert len(tall_only.times) == 0


def test_size_series_validation():
    with pytest.raises(ValueError):
        SizeSeries(times=np.arange(3), values=np.arange(4))


def test_serialization_round_trips(tmp_path):
    series = SizeSeries(
        times=np.array([0.0, 1.25e-8, 2.5e-8]),
        values=np.array([1.0, 1.0002960754691597, 7.0]),
        operator_tag="Iy",
    )
    path = tmp_path / "series.csv"
    save_size_series(series, path, header_extra="demo run")
    rows = [
        line.split(",") for line in path.read_text().splitlines()
        if not line.startswith("#")
    ]
    assert [float(r[0]) for r in rows] == series.times.tolist()
    assert [float(r[1]) for r in rows] == series.values.tolist()

    spin = SpinQuantum(5)
    grid = husimi_q(eigenstate(spin, 2.5), spin, n_theta=11, n_phi=21)
    hpath = tmp_path / "husimi.csv"
    save_husimi(grid, hpath)
    text = hpath.read_text().splitlines()
    assert text[0] == "# twice_i: 5"
    data = np.array(
        [[float(x) for x in line.split(",")] for line in text if not line.startswith("#")]
    )
    assert data.shape == (11 * 21, 3)
    assert_allclose(data[:, 2].reshape(11, 21), grid.values, rtol=0, atol=0)
