from fractions import Fraction

import numpy as np
import pytest

from ehom import fock
from ehom.fock import ExactAmplitude, ScatteringMatrix


def test_hom_amplitude_is_exactly_zero():
    amplitude = fock.bs_amplitude(1, 1, 1, 1)
    assert isinstance(amplitude, ExactAmplitude)
    assert amplitude.q == 0
    assert amplitude.is_zero()


@pytest.mark.parametrize("n", range(17))
def test_coincidence_amplitude_is_zero_exactly_for_odd_odd_inputs(n):
    for m in range(17 - n):
        if (n + m) % 2:
            continue
        N = (n + m) // 2
        amplitude = fock.bs_amplitude(n, m, N, N)
        if n % 2 == 1:
            assert amplitude.is_zero(), (n, m)
        else:
            assert not amplitude.is_zero(), (n, m)


@pytest.mark.parametrize("n", range(17))
def test_coincidence_amplitude_is_zero_for_odd_total_inputs(n):
    for m in range(17 - n):
        if (n + m) % 2 == 0:
            continue
        for N in range(n + m + 1):
            assert fock.bs_amplitude(n, m, N, N).is_zero(), (n, m, N)


def test_two_two_coincidence_amplitude():
    assert fock.bs_amplitude(2, 2, 2, 2).as_fraction() == Fraction(-1, 2)


def test_single_photon_amplitudes_follow_scattering_matrix():
    assert fock.bs_amplitude(1, 0, 1, 0) == ExactAmplitude(1, 1)
    assert fock.bs_amplitude(1, 0, 0, 1) == ExactAmplitude(1, 1)
    assert fock.bs_amplitude(0, 1, 1, 0) == ExactAmplitude(-1, 1)
    assert fock.bs_amplitude(0, 1, 0, 1) == ExactAmplitude(1, 1)


def test_amplitude_is_zero_if_photon_number_is_not_conserved():
    assert fock.bs_amplitude(2, 1, 2, 2).is_zero()
    S = ScatteringMatrix.from_transmission(0.6)
    assert fock.bs_amplitude(2, 1, 2, 2, S) == 0.0


def test_bs_amplitude_rejects_invalid_photon_numbers():
    with pytest.raises(ValueError):
        fock.bs_amplitude(-1, 1, 0, 0)
    with pytest.raises(TypeError):
        fock.bs_amplitude(1.0, 1, 1, 1)


@pytest.mark.parametrize("n", range(13))
def test_bs_amplitude_matches_matrix_exponential_oracle(n):
    for m in range(13 - n):
        oracle = fock.bs_unitary_oracle(n, m)
        for (n_a, n_b), amplitude in fock.output_state(n, m).items():
            assert float(amplitude) == pytest.approx(oracle[n_a, n_b].real, abs=1e-10)
        assert np.max(np.abs(oracle.imag)) < 1e-10


@pytest.mark.parametrize("t", [0.0, 0.3, 0.6, 0.9, 1.0])
@pytest.mark.parametrize("n, m", [(1, 1), (2, 3), (3, 3), (4, 1)])
def test_unbalanced_amplitude_matches_matrix_exponential_oracle(t, n, m):
    S = ScatteringMatrix.from_transmission(t)
    oracle = fock.bs_unitary_oracle(n, m, S)
    for (n_a, n_b), amplitude in fock.output_state(n, m, S).items():
        assert amplitude == pytest.approx(oracle[n_a, n_b].real, abs=1e-10)


@pytest.mark.parametrize("n, m", [(0, 0), (1, 1), (2, 5), (4, 4), (7, 3)])
def test_output_state_is_normalised_exactly(n, m):
    total = sum(amplitude.abs2() for amplitude in fock.output_state(n, m).values())
    assert total == 1


def test_diagrams_sum_to_amplitude():
    for n, m, n_a in [(1, 1, 1), (2, 3, 2), (3, 5, 4), (4, 2, 1)]:
        n_b = n + m - n_a
        diagrams = fock.enumerate_diagrams(n, m, n_a, n_b)
        total = sum((diagram.amplitude() for diagram in diagrams), ExactAmplitude(0))
        assert total == fock.bs_amplitude(n, m, n_a, n_b)


def test_hom_diagrams():
    both_reflected, both_transmitted = fock.enumerate_diagrams(1, 1, 1, 1)
    assert both_transmitted.exponents == {"S11": 1, "S21": 0, "S12": 0, "S22": 1}
    assert both_reflected.exponents == {"S11": 0, "S21": 1, "S12": 1, "S22": 0}
    assert both_reflected.amplitude() == ExactAmplitude(Fraction(-1, 2))
    assert both_transmitted.amplitude() == ExactAmplitude(Fraction(1, 2))


def test_diagram_amplitude_for_unbalanced_beamsplitter():
    S = ScatteringMatrix.from_transmission(0.8)
    both_reflected, both_transmitted = fock.enumerate_diagrams(1, 1, 1, 1)
    assert both_reflected.amplitude(S) == pytest.approx(-0.36)
    assert both_transmitted.amplitude(S) == pytest.approx(0.64)


def test_enumerate_diagrams_rejects_non_conserving_output():
    with pytest.raises(ValueError):
        fock.enumerate_diagrams(1, 1, 2, 1)


@pytest.mark.parametrize("n", [1, 3, 5, 7])
def test_mirror_pairs_cancel_for_odd_inputs(n):
    for m in range(n, 17 - n, 2):
        report = fock.mirror_pair_check(n, m)
        assert report.cancels
        assert report.unpaired_middle is None
        assert len(report.pairs) == (n + 1) // 2
        assert all(verdict == "cancel" for _, _, verdict in report.verdicts())


@pytest.mark.parametrize("n", [0, 2, 4, 6])
def test_middle_diagram_survives_for_even_inputs(n):
    for m in range(n, 17 - n, 2):
        report = fock.mirror_pair_check(n, m)
        assert not report.cancels
        assert not report.unpaired_middle.is_zero()
        assert all(verdict == "constructive" for _, _, verdict in report.verdicts())


def test_mirror_pair_check_rejects_invalid_inputs():
    with pytest.raises(ValueError):
        fock.mirror_pair_check(1, 2)
    with pytest.raises(ValueError):
        fock.mirror_pair_check(5, 3)


def test_exact_amplitude_arithmetic():
    inv_sqrt2 = ExactAmplitude(1, 1)
    assert inv_sqrt2 * inv_sqrt2 == ExactAmplitude(Fraction(1, 2))
    assert (inv_sqrt2**2).as_fraction() == Fraction(1, 2)
    assert inv_sqrt2.as_fraction() is None
    assert float(inv_sqrt2) == pytest.approx(2**-0.5)
    assert (inv_sqrt2 - inv_sqrt2).is_zero()
    assert -inv_sqrt2 == ExactAmplitude(-1, 1)
    assert 1 - ExactAmplitude(Fraction(1, 4)) == ExactAmplitude(Fraction(3, 4))
    assert ExactAmplitude(3, 2) + ExactAmplitude(1, 0) == ExactAmplitude(Fraction(5, 2))


def test_exact_amplitude_folds_perfect_square_radicand():
    amplitude = ExactAmplitude(1, 0, Fraction(9, 4))
    assert amplitude.q == Fraction(3, 2)
    assert amplitude.radicand == 1


def test_exact_amplitude_with_irrational_radicand():
    amplitude = ExactAmplitude(2, 0, 3)
    assert amplitude.abs2() == 12
    assert float(amplitude) == pytest.approx(2 * np.sqrt(3))
    assert amplitude + ExactAmplitude(1, 0, 12) == ExactAmplitude(4, 0, 3)


def test_exact_amplitude_refuses_incommensurate_sums():
    with pytest.raises(ArithmeticError):
        ExactAmplitude(1, 0, 2) + ExactAmplitude(1, 0, 3)


def test_exact_amplitude_validation():
    with pytest.raises(ValueError):
        ExactAmplitude(1, 0, 0)
    with pytest.raises(ValueError):
        ExactAmplitude(1, -1)


def test_exact_amplitude_repr():
    assert repr(ExactAmplitude(-1, 1)) == "ExactAmplitude(q=-1, h=1)"
    assert repr(ExactAmplitude(1, 2, 3)) == "ExactAmplitude(q=1, h=2, radicand=3)"


def test_scattering_matrix_validation():
    with pytest.raises(ValueError):
        ScatteringMatrix(0.5, 0.5)
    with pytest.raises(ValueError):
        ScatteringMatrix(0.6, 0.8, exact=True)
    with pytest.raises(TypeError):
        ScatteringMatrix("0.6", 0.8)
    with pytest.raises(ValueError):
        ScatteringMatrix.from_transmission(1.2)


def test_scattering_matrix_is_unitary():
    for S in [ScatteringMatrix.balanced(), ScatteringMatrix.from_transmission(0.3)]:
        assert S.unitarity_residual() < 1e-12
    assert ScatteringMatrix.from_transmission(1 / np.sqrt(2)).exact
    assert ScatteringMatrix.from_transmission(0.6).element(1, 2) == pytest.approx(-0.8)


def test_amplitude_cache_is_bounded():
    assert fock._bs_amplitude.cache_info().maxsize == fock.AMPLITUDE_CACHE_SIZE
    for n in range(40):
        fock.bs_amplitude(n, 3, 2, n + 1)
    assert fock._bs_amplitude.cache_info().currsize <= fock.AMPLITUDE_CACHE_SIZE
