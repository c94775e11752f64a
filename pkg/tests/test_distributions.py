import numpy as np
import pytest

from ehom import distributions
from ehom.distributions import DetectorModel, JointDistribution
from ehom.fock import ScatteringMatrix
from ehom.states import BipartiteInput, make_coherent, make_custom_mixed, make_custom_pure, make_fock, make_thermal


def fs_cs_joint(beta):
    return distributions.joint_distribution(BipartiteInput(make_fock(1), make_coherent(beta)))


def test_two_single_photons_bunch():
    joint = distributions.joint_distribution(BipartiteInput(make_fock(1), make_fock(1)))
    assert joint.shape == (3, 3)
    assert joint.probabilities[1, 1] == 0
    assert joint.probabilities[2, 0] == pytest.approx(0.5)
    assert joint.probabilities[0, 2] == pytest.approx(0.5)
    assert joint.total() == pytest.approx(1)
    assert joint.mean() == pytest.approx((1, 1))


def test_unbalanced_beamsplitter_coincidences():
    S = ScatteringMatrix.from_transmission(0.6)
    joint = distributions.joint_distribution(BipartiteInput(make_fock(1), make_fock(1)), S)
    assert joint.probabilities[1, 1] == pytest.approx((0.36 - 0.64) ** 2)
    assert joint.provenance["beamsplitter"]["t"] == 0.6


@pytest.mark.parametrize("beta", [1, 2, 3, 2j])
def test_fock_coherent_matches_closed_form(beta):
    joint = fs_cs_joint(beta)
    N1, N2 = np.indices(joint.shape)
    expected = distributions.analytic_fs_cs(N1, N2, beta)
    np.testing.assert_allclose(joint.probabilities, expected, atol=1e-12)
    assert joint.total() + joint.truncation_bound == pytest.approx(1, abs=1e-12)


def test_analytic_fs_cs_edge_cases():
    assert distributions.analytic_fs_cs(1, 0, 0) == pytest.approx(0.5)
    assert distributions.analytic_fs_cs(2, 0, 0) == 0
    assert distributions.analytic_fs_cs(3, 3, 2) == 0
    with pytest.raises(TypeError):
        distributions.analytic_fs_cs(1.5, 0, 1)
    with pytest.raises(ValueError):
        distributions.analytic_fs_cs(-1, 0, 1)


@pytest.mark.parametrize("make_mode2", [lambda: make_coherent(3), lambda: make_thermal(9)])
@pytest.mark.parametrize("n, present", [(0, False), (1, True), (2, False), (3, True)])
def test_cnl_scan(make_mode2, n, present):
    joint = distributions.joint_distribution(BipartiteInput(make_fock(n), make_mode2()))
    report = distributions.cnl_scan(joint)
    assert report.present is present
    assert report.verdict == ("CNL present" if present else "CNL absent")
    if present:
        assert report.max_diagonal <= report.threshold
    else:
        assert report.max_diagonal > 1e-6


@pytest.mark.parametrize("n", range(17))
def test_odd_total_fock_inputs_never_coincide(n):
    for m in range(17 - n):
        if (n + m) % 2 == 0:
            continue
        joint = distributions.joint_distribution(BipartiteInput(make_fock(n), make_fock(m)))
        np.testing.assert_array_equal(np.diagonal(joint.probabilities), 0)
        assert joint.total() == pytest.approx(1)


@pytest.mark.parametrize(
    "mode1",
    [
        make_fock(1),
        make_fock(3),
        make_custom_mixed([0, 0.5, 0, 0.5]),
        make_custom_pure([0, 1, 0, 1j], normalise=True),
    ],
    ids=["fock1", "fock3", "odd-mixture", "odd-superposition"],
)
@pytest.mark.parametrize(
    "make_mode2",
    [lambda m=m: make_fock(m) for m in range(10)]
    + [lambda nbar=nbar: make_coherent(np.sqrt(nbar)) for nbar in [0.5, 1, 4, 9]]
    + [lambda nbar=nbar: make_thermal(nbar) for nbar in [0.5, 1, 4, 9]]
    + [lambda: make_custom_pure([0, 1, 0, 1j], normalise=True)]
    + [lambda: make_custom_pure([1, 1, 1], normalise=True)],
)
def test_odd_mode1_inputs_give_a_nodal_line_for_every_mode2_state(mode1, make_mode2):
    joint = distributions.joint_distribution(BipartiteInput(mode1, make_mode2()))
    report = distributions.cnl_scan(joint)
    assert report.present
    assert report.max_diagonal <= joint.truncation_bound + 1e-12


def test_cnl_report_to_frame():
    report = distributions.cnl_scan(fs_cs_joint(1))
    frame = report.to_frame()
    assert list(frame.columns) == ["m", "p"]
    assert frame["m"].tolist() == list(range(len(report.diagonal)))


def test_mixed_mode1_sums_incoherently():
    odd_mixture = make_custom_mixed([0, 0.5, 0, 0.5])
    joint = distributions.joint_distribution(BipartiteInput(odd_mixture, make_coherent(2)))
    assert distributions.cnl_scan(joint).present

    fock1 = distributions.joint_distribution(BipartiteInput(make_fock(1), make_coherent(2)))
    fock3 = distributions.joint_distribution(BipartiteInput(make_fock(3), make_coherent(2)))
    mixed = 0.5 * np.pad(fock1.probabilities, (0, 2)) + 0.5 * fock3.probabilities
    np.testing.assert_allclose(joint.probabilities, mixed, atol=1e-14)


def test_coherent_inputs_add_coherently():
    # |beta, beta> leaves the beamsplitter as |0, sqrt(2) beta>
    joint = distributions.joint_distribution(BipartiteInput(make_coherent(1), make_coherent(1)))
    assert joint.marginals()[0][0] == pytest.approx(1, abs=1e-9)
    assert joint.mean()[1] == pytest.approx(2, abs=1e-8)


def test_joint_distribution_requires_bipartite_input():
    with pytest.raises(TypeError):
        distributions.joint_distribution((make_fock(1), make_fock(1)))


def test_joint_distribution_validation():
    with pytest.raises(ValueError):
        JointDistribution(np.zeros(3))
    with pytest.raises(ValueError):
        JointDistribution([[0.5, -0.1], [0.6, 0]])
    with pytest.raises(ValueError):
        JointDistribution([[0.5, 0.6], [0, 0]])
    with pytest.raises(ValueError):
        JointDistribution([[0.5, 0], [0, 0]])
    assert JointDistribution([[0.5, 0], [0, 0]], truncation_bound=0.5).total() == 0.5


def test_crop_tracks_discarded_mass():
    joint = fs_cs_joint(3)
    cropped = joint.crop(10)
    assert cropped.shape == (11, 11)
    assert cropped.discarded_mass == pytest.approx(joint.total() - cropped.total())
    assert cropped.total() + cropped.discarded_mass + cropped.truncation_bound == pytest.approx(1)


def test_to_frame_is_sorted_and_tidy():
    frame = fs_cs_joint(1).to_frame()
    assert list(frame.columns) == ["ma", "mb", "p"]
    assert frame.equals(frame.sort_values(["ma", "mb"]))
    pivoted = frame.pivot(index="ma", columns="mb", values="p").to_numpy()
    np.testing.assert_array_equal(pivoted, fs_cs_joint(1).probabilities)


def test_to_xarray():
    joint = fs_cs_joint(1)
    data_array = joint.to_xarray()
    assert data_array.dims == ("m_a", "m_b")
    assert data_array.attrs["truncation_bound"] == joint.truncation_bound
    assert float(data_array.sel(m_a=2, m_b=0)) == joint.probabilities[2, 0]


def test_dict_conversion():
    joint = fs_cs_joint(2)
    assert JointDistribution.from_dict(joint.to_dict()) == joint
    with pytest.raises(ValueError):
        JointDistribution.from_dict({"kind": "table"})


def test_detector_model_validation():
    assert DetectorModel.symmetric(0.5) == DetectorModel(0.5, 0.5)
    with pytest.raises(ValueError):
        DetectorModel(1.2, 0.5)


def test_perfect_and_blind_detectors():
    joint = fs_cs_joint(2)
    assert distributions.apply_efficiency(joint, DetectorModel()).probabilities.tolist() == (
        joint.probabilities.tolist()
    )
    blind = distributions.apply_efficiency(joint, DetectorModel(0, 0))
    assert blind.probabilities[0, 0] == pytest.approx(joint.total())
    assert blind.total() == pytest.approx(blind.probabilities[0, 0])


@pytest.mark.parametrize("eta1, eta2", [(0.3, 0.3), (0.9, 0.5), (0.5, 1)])
def test_efficiency_preserves_total_and_scales_mean(eta1, eta2):
    joint = fs_cs_joint(2)
    registered = distributions.apply_efficiency(joint, DetectorModel(eta1, eta2))
    assert registered.total() == pytest.approx(joint.total())
    mean_a, mean_b = joint.mean()
    assert registered.mean() == pytest.approx((eta1 * mean_a, eta2 * mean_b))
    assert registered.provenance["detector"] == {"eta1": eta1, "eta2": eta2}


def test_efficiency_fills_the_nodal_line():
    registered = distributions.apply_efficiency(fs_cs_joint(3), DetectorModel.symmetric(0.8))
    assert not distributions.cnl_scan(registered).present


@pytest.mark.parametrize("eta", [0.25, 0.5, 0.9])
@pytest.mark.parametrize("beta", [1, 2])
def test_efficiency_diagonal_matches_thinned_distribution(eta, beta):
    registered = distributions.apply_efficiency(fs_cs_joint(beta), DetectorModel.symmetric(eta))
    for n in range(5):
        expected = registered.probabilities[n, n]
        assert distributions.fs_cs_efficiency_diagonal(n, eta, beta) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("eta", [0.9, 0.5])
def test_monte_carlo_efficiency_agrees_with_thinning(eta):
    n_samples = 10**6
    joint = fs_cs_joint(3)
    detector = DetectorModel.symmetric(eta)
    exact = distributions.apply_efficiency(joint, detector).probabilities / joint.total()
    estimate, standard_error = distributions.monte_carlo_efficiency(joint, detector, n_samples=n_samples, seed=3)

    assert estimate.shape == joint.shape
    assert estimate.sum() == pytest.approx(1)
    np.testing.assert_allclose(standard_error, np.sqrt(exact * (1 - exact) / n_samples))

    # Cells with enough expected counts for the normal approximation are checked one by one
    frequent = exact * n_samples >= 10
    assert frequent.sum() > 20
    np.testing.assert_array_less(np.abs(estimate - exact)[frequent], 4 * standard_error[frequent])

    rare_mass = exact[~frequent].sum()
    rare_error = np.sqrt(rare_mass * (1 - rare_mass) / n_samples)
    assert abs(estimate[~frequent].sum() - rare_mass) <= 4 * rare_error


def test_monte_carlo_error_does_not_vanish_for_unsampled_cells():
    joint = fs_cs_joint(3)
    detector = DetectorModel.symmetric(0.9)
    estimate, standard_error = distributions.monte_carlo_efficiency(joint, detector, n_samples=1000, seed=1)
    exact = distributions.apply_efficiency(joint, detector).probabilities
    unsampled = (estimate == 0) & (exact > 1e-300)
    assert unsampled.any()
    assert np.all(standard_error[unsampled] > 0)


def test_monte_carlo_efficiency_is_reproducible():
    joint = fs_cs_joint(1).crop(8)
    detector = DetectorModel.symmetric(0.5)
    first, _ = distributions.monte_carlo_efficiency(joint, detector, n_samples=1000, seed=1)
    second, _ = distributions.monte_carlo_efficiency(joint, detector, n_samples=1000, seed=1)
    np.testing.assert_array_equal(first, second)


def test_row_caches_are_bounded():
    for row in [distributions._amplitude_row, distributions._probability_row]:
        assert row.cache_info().maxsize == distributions.ROW_CACHE_SIZE
    distributions.joint_distribution(BipartiteInput(make_fock(2), make_thermal(4)))
    assert distributions._probability_row.cache_info().currsize <= distributions.ROW_CACHE_SIZE
