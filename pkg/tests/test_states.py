import numpy as np
import pytest

from ehom import states
from ehom._module_utils import CutoffError


@pytest.mark.parametrize("n", [0, 1, 5])
def test_fock_state_is_pure_and_exact(n):
    state = states.make_fock(n)
    assert state.is_pure
    assert state.cutoff == n
    assert state.tail_mass == 0
    assert state.mean() == n
    assert state.variance() == 0


@pytest.mark.parametrize("nbar", [0.5, 1, 4, 9, 25])
def test_coherent_state_statistics(nbar):
    state = states.make_coherent(np.sqrt(nbar))
    assert state.tail_mass <= states.DEFAULT_TOLERANCE
    assert state.mean() == pytest.approx(nbar, abs=1e-8)
    assert state.variance() == pytest.approx(nbar, abs=1e-6)
    np.testing.assert_allclose(np.abs(state.amplitudes) ** 2, state.probabilities, atol=1e-15)


def test_coherent_cutoff_is_smallest_admissible():
    state = states.make_coherent(3, tol=1e-6)
    assert state.tail_mass < 1e-6
    assert state.tail_mass + state.probabilities[-1] >= 1e-6 * (1 - 1e-9)


def test_coherent_phase_is_carried_by_amplitudes():
    state = states.make_coherent(2j)
    np.testing.assert_allclose(np.angle(state.amplitudes[1]), np.pi / 2)
    np.testing.assert_allclose(state.amplitudes[2].real, -abs(state.amplitudes[2]), rtol=1e-12)


def test_vacuum_coherent_state():
    state = states.make_coherent(0)
    assert state.cutoff == 0
    assert state.probabilities.tolist() == [1.0]


def test_coherent_state_rejects_non_numbers():
    with pytest.raises(TypeError):
        states.make_coherent("3")


@pytest.mark.parametrize("nbar", [0.1, 1, 9])
def test_thermal_state_statistics(nbar):
    state = states.make_thermal(nbar)
    assert not state.is_pure
    assert state.tail_mass <= states.DEFAULT_TOLERANCE
    assert state.mean() == pytest.approx(nbar, abs=1e-6)
    ratios = state.probabilities[1:] / state.probabilities[:-1]
    np.testing.assert_allclose(ratios, nbar / (1 + nbar))
    assert state.variance() == pytest.approx(nbar**2 + nbar, rel=1e-6)
    assert state.probabilities[0] == pytest.approx(1 / (1 + nbar))


def test_cutoff_ceiling_raises():
    with pytest.raises(CutoffError):
        states.make_coherent(30, max_cutoff=100)
    with pytest.raises(CutoffError):
        states.make_thermal(100, max_cutoff=50)


@pytest.mark.parametrize("tol", [0, 1, 2.5])
@pytest.mark.parametrize("make_state", [states.make_coherent, states.make_thermal])
def test_truncated_states_reject_invalid_tolerance(make_state, tol):
    with pytest.raises(ValueError):
        make_state(2, tol=tol)


def test_custom_pure_state():
    state = states.make_custom_pure([1, 0, 1], normalise=True)
    np.testing.assert_allclose(state.probabilities, [0.5, 0, 0.5])
    assert state.is_pure
    assert state.tail_mass == 0


def test_custom_states_reject_invalid_norms():
    with pytest.raises(ValueError):
        states.make_custom_pure([1, 1])
    with pytest.raises(CutoffError):
        states.make_custom_pure([0.5, 0.5])
    with pytest.raises(ValueError):
        states.make_custom_mixed([0.5, -0.1, 0.6])
    with pytest.raises(ValueError):
        states.make_custom_mixed([])


def test_custom_mixed_state():
    state = states.make_custom_mixed([1, 0, 3], normalise=True)
    np.testing.assert_allclose(state.probabilities, [0.25, 0, 0.75])
    assert state.mean() == pytest.approx(1.5)


def test_probabilities_are_read_only():
    state = states.make_coherent(1)
    with pytest.raises(ValueError):
        state.probabilities[0] = 1


def test_bipartite_input_truncation_bound():
    mode1 = states.make_custom_mixed([0.5, 0.5 - 1e-11])
    mode2 = states.make_thermal(2)
    bipartite_input = states.BipartiteInput(mode1, mode2)
    expected = 1 - (1 - mode1.tail_mass) * (1 - mode2.tail_mass)
    assert bipartite_input.truncation_bound == pytest.approx(expected)
    assert not bipartite_input.is_pure
    assert states.BipartiteInput(states.make_fock(1), states.make_coherent(1)).is_pure


def test_bipartite_input_requires_photon_states():
    with pytest.raises(TypeError):
        states.BipartiteInput(states.make_fock(1), 1)


@pytest.mark.parametrize(
    "config, kind, mean",
    [
        ({"kind": "fock", "n": 3}, "fock", 3),
        ({"kind": "coherent", "nbar": 4}, "coherent", 4),
        ({"kind": "coherent", "beta": [0, 2]}, "coherent", 4),
        ({"kind": "thermal", "nbar": 2, "tol": 1e-12}, "thermal", 2),
        ({"kind": "custom-pure", "amplitudes": [[0, 1], 0]}, "custom-pure", 0),
        ({"kind": "custom-mixed", "probabilities": [0, 2], "normalise": True}, "custom-mixed", 1),
    ],
)
def test_make_state(config, kind, mean):
    state = states.make_state(config)
    assert state.kind == kind
    assert state.mean() == pytest.approx(mean, abs=1e-6)


def test_make_state_uses_tolerance_from_config():
    assert states.make_state({"kind": "thermal", "nbar": 2, "tol": 1e-12}).tail_mass <= 1e-12


@pytest.mark.parametrize(
    "config",
    [
        {"kind": "squeezed"},
        {"n": 1},
        {"kind": "fock", "nbar": 1},
        {"kind": "coherent"},
        {"kind": "coherent", "beta": [1, 2, 3]},
    ],
)
def test_make_state_rejects_invalid_configurations(config):
    with pytest.raises(ValueError):
        states.make_state(config)


def test_describe_is_json_friendly():
    description = states.make_coherent(1j).describe()
    assert description["kind"] == "coherent"
    assert description["beta"] == [0.0, 1.0]
    assert description["cutoff"] == states.make_coherent(1j).cutoff
