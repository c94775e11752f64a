# -*- coding: utf-8 -*-

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import xarray as xr

from .distributions import JointDistribution

__all__ = ["joint_distribution_heatmap", "diagonal_plot", "sweep_plot", "figure1_heatmaps"]


def _as_matrix(joint):
    if isinstance(joint, JointDistribution):
        return joint.probabilities
    if isinstance(joint, xr.DataArray):
        if joint.ndim != 2:
            raise ValueError(f"Can only plot two dimensional data arrays, got dims {joint.dims}")
        return joint.values
    if isinstance(joint, pd.DataFrame):
        # Tidy table as written by ehom.data.write_csv
        return joint.pivot(index="ma", columns="mb", values="p").fillna(0).values
    return np.asarray(joint)


def joint_distribution_heatmap(joint, ax=None, cmap="viridis", vmax=None, colorbar=True, max_photons=None):
    """Heatmap of a joint output distribution :math:`P(m_a, m_b)`.

    A central nodal line shows up as a dark diagonal.

    Parameters
    ----------
    joint : JointDistribution, xarray.DataArray, pandas.DataFrame or np.ndarray
        The distribution. A DataFrame must be in the tidy ``ma, mb, p`` layout of
        :func:`ehom.data.write_csv`.
    ax : Matplotlib axes (optional)
        Axes to plot the heatmap within.
    cmap : str
        Colormap.
    vmax : float (optional)
        Upper limit of the colormap, the largest probability is used if not given.
    colorbar : bool
        If ``True``, a colorbar is added next to the axes.
    max_photons : int (optional)
        Only show ``m_a, m_b <= max_photons``.

    Returns
    -------
    ax : Matplotlib axes

    Examples
    --------
    .. plot::
        :context: close-figs
        :include-source:

        >>> import matplotlib.pyplot as plt
        >>> from ehom.distributions import joint_distribution
        >>> from ehom.states import BipartiteInput, make_coherent, make_fock
        >>> from ehom.visualisation import joint_distribution_heatmap
        >>> joint = joint_distribution(BipartiteInput(make_fock(1), make_coherent(3)))
        >>> ax = joint_distribution_heatmap(joint, max_photons=20)
        >>> plt.show()
    """
    probabilities = _as_matrix(joint)
    if max_photons is not None:
        probabilities = probabilities[: max_photons + 1, : max_photons + 1]

    if ax is None:
        ax = plt.gca()

    image = ax.imshow(probabilities, origin="lower", cmap=cmap, vmin=0, vmax=vmax)
    ax.set_xlabel("$m_b$")
    ax.set_ylabel("$m_a$")
    if colorbar:
        ax.figure.colorbar(image, ax=ax, label="$P(m_a, m_b)$")
    return ax


def diagonal_plot(dists, ax=None):
    """Plot the coincidence probabilities :math:`P(N, N)` of one or more joint distributions.

    Parameters
    ----------
    dists : JointDistribution or dict[Any, JointDistribution]
        Distributions to compare, a dictionary maps legend labels to distributions.
    ax : Matplotlib axes (optional)

    Returns
    -------
    ax : Matplotlib axes
    """
    if not isinstance(dists, dict):
        dists = {"": dists}

    if ax is None:
        ax = plt.gca()

    for label, joint in dists.items():
        diagonal = np.diagonal(_as_matrix(joint))
        ax.plot(np.arange(len(diagonal)), diagonal, "o-", label=str(label))

    ax.set_xlabel("$N$")
    ax.set_ylabel("$P(N, N)$")
    if any(str(label) for label in dists):
        ax.legend()
    return ax


def sweep_plot(frame, x, ax=None, y="probability", hue=None, show_error=False):
    """Line plot of a sweep table.

    Parameters
    ----------
    frame : pandas.DataFrame
        Table returned by :func:`ehom.spacetime.sweep` (or read back from CSV).
    x : str
        Column along the x-axis.
    ax : Matplotlib axes (optional)
    y : str
        Column along the y-axis.
    hue : str (optional)
        Column that splits the table into one line per value.
    show_error : bool
        If ``True``, shade :math:`\\pm` the ``estimated_error`` column around each line.

    Returns
    -------
    ax : Matplotlib axes
    """
    for column in (x, y, hue):
        if column is not None and column not in frame.columns:
            raise ValueError(f"{column!r} is not a column of the sweep table, the columns are {list(frame.columns)}")

    if ax is None:
        ax = plt.gca()

    groups = frame.groupby(hue, sort=False) if hue is not None else [(None, frame)]
    for value, group in groups:
        group = group.sort_values(x)
        label = None if hue is None else f"{hue} = {value}"
        (line,) = ax.plot(group[x], group[y], "-", label=label)
        if show_error:
            error = group["estimated_error"]
            ax.fill_between(group[x], group[y] - error, group[y] + error, color=line.get_color(), alpha=0.3)

    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if hue is not None:
        ax.legend()
    return ax


def figure1_heatmaps(panels, vmax=None, cmap="viridis"):
    """Grid of heatmaps with one row per mode-2 state and one column per mode-1 photon number.

    Parameters
    ----------
    panels : xarray.DataArray
        Data array returned by :func:`ehom.data.simulate_figure1_panels`.
    vmax : float (optional)
        Shared upper limit of the colormaps, each panel uses its own maximum if not given.
    cmap : str

    Returns
    -------
    fig : matplotlib.figure.Figure
    axes : ndarray(dtype=matplotlib.axes.Axes)
    """
    states = panels.coords["Mode-2 state"].values
    photon_numbers = panels.coords["n"].values
    fig, axes = plt.subplots(
        len(states),
        len(photon_numbers),
        figsize=(3 * len(photon_numbers), 3 * len(states)),
        sharex=True,
        sharey=True,
        squeeze=False,
    )
    for i, state in enumerate(states):
        for j, n in enumerate(photon_numbers):
            panel = panels.sel({"Mode-2 state": state, "n": n})
            ax = axes[i, j]
            joint_distribution_heatmap(panel.values, ax=ax, cmap=cmap, vmax=vmax, colorbar=False)
            title = f"$n = {n}$, {state}"
            if "cnl_present" in panel.coords:
                title += "\nCNL present" if bool(panel.coords["cnl_present"]) else "\nCNL absent"
            ax.set_title(title)
            if i < len(states) - 1:
                ax.set_xlabel("")
            if j > 0:
                ax.set_ylabel("")
    return fig, axes
