import matplotlib
import matplotlib.pyplot as plt
import numpy as np
import pytest

from ehom import data, spacetime, visualisation
from ehom.distributions import joint_distribution
from ehom.states import BipartiteInput, make_coherent, make_fock


@pytest.fixture
def joint():
    return joint_distribution(BipartiteInput(make_fock(1), make_coherent(2)))


@pytest.mark.parametrize("as_type", ["joint", "array", "xarray", "frame"])
def test_joint_distribution_heatmap_accepts_all_layouts(joint, as_type):
    converted = {
        "joint": joint,
        "array": joint.probabilities,
        "xarray": joint.to_xarray(),
        "frame": joint.to_frame(),
    }[as_type]
    ax = visualisation.joint_distribution_heatmap(converted)
    assert isinstance(ax, matplotlib.axes.Axes)
    assert ax.get_xlabel() == "$m_b$"
    assert ax.get_ylabel() == "$m_a$"
    np.testing.assert_array_equal(ax.images[0].get_array(), joint.probabilities)


def test_joint_distribution_heatmap_crops(joint):
    fig, ax = plt.subplots()
    out = visualisation.joint_distribution_heatmap(joint, ax=ax, max_photons=5, colorbar=False)
    assert out is ax
    assert ax.images[0].get_array().shape == (6, 6)
    assert len(fig.axes) == 1


def test_joint_distribution_heatmap_rejects_stacked_panels():
    panels = data.simulate_figure1_panels(nbar=1, photon_numbers=(0, 1), output_cutoff=5)
    with pytest.raises(ValueError):
        visualisation.joint_distribution_heatmap(panels)


def test_diagonal_plot(joint):
    other = joint_distribution(BipartiteInput(make_fock(2), make_coherent(2)))
    ax = visualisation.diagonal_plot({"n = 1": joint, "n = 2": other})
    assert isinstance(ax, matplotlib.axes.Axes)
    assert len(ax.lines) == 2
    np.testing.assert_array_equal(ax.lines[0].get_ydata(), joint.diagonal())
    assert [text.get_text() for text in ax.get_legend().get_texts()] == ["n = 1", "n = 2"]


def test_diagonal_plot_single_distribution(joint):
    ax = visualisation.diagonal_plot(joint)
    assert len(ax.lines) == 1
    assert ax.get_legend() is None
    assert ax.get_xlabel() == "$N$"


def test_sweep_plot():
    table = spacetime.sweep(spacetime.hom_total_vs_tau, {"tau": [-1.0, 0.0, 1.0], "delta_tau": [0.0, 1.0]})
    ax = visualisation.sweep_plot(table, "tau", hue="delta_tau", show_error=True)
    assert len(ax.lines) == 2
    assert len(ax.collections) == 2
    assert ax.get_xlabel() == "tau"
    assert ax.get_ylabel() == "probability"


def test_sweep_plot_rejects_unknown_columns():
    table = spacetime.sweep(spacetime.hom_total_vs_tau, {"tau": [0.0, 1.0]})
    with pytest.raises(ValueError):
        visualisation.sweep_plot(table, "delta_omega")
    with pytest.raises(ValueError):
        visualisation.sweep_plot(table, "tau", hue="broadening")


def test_figure1_heatmaps():
    panels = data.simulate_figure1_panels(nbar=1, photon_numbers=(0, 1, 2), output_cutoff=8)
    fig, axes = visualisation.figure1_heatmaps(panels, vmax=0.5)
    assert isinstance(fig, matplotlib.figure.Figure)
    assert axes.shape == (2, 3)
    assert axes[0, 1].get_title() == "$n = 1$, coherent\nCNL present"
    assert axes[1, 2].get_title() == "$n = 2$, thermal\nCNL absent"
    assert axes[0, 0].images[0].get_clim() == (0, 0.5)
