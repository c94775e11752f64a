# -*- coding: utf-8 -*-

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
import xarray as xr

from ._module_utils import _check_nonnegative, _check_photon_number, is_iterable
from .distributions import JointDistribution, cnl_scan, joint_distribution
from .states import DEFAULT_TOLERANCE, BipartiteInput, make_coherent, make_fock, make_thermal

__all__ = ["simulate_figure1_panels", "write_csv", "write_json", "read_json"]

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"
MODE2_STATES = ("coherent", "thermal")


def _mode2_state(kind, nbar, tol):
    if kind == "coherent":
        return make_coherent(np.sqrt(nbar), tol=tol)
    return make_thermal(nbar, tol=tol)


def _pad(probabilities, size):
    padded = np.zeros((size, size))
    rows, columns = min(size, probabilities.shape[0]), min(size, probabilities.shape[1])
    padded[:rows, :columns] = probabilities[:rows, :columns]
    return padded


def simulate_figure1_panels(nbar=9, photon_numbers=(0, 1, 2, 3), tol=DEFAULT_TOLERANCE, output_cutoff=30):
    """Joint output distributions for Fock states interfering with a coherent or a thermal state.

    Every panel is :math:`P(m_a, m_b | n)` for the input :math:`|n\\rangle` in mode 1 and a coherent
    state or a thermal state of mean photon number ``nbar`` in mode 2, at the balanced
    beamsplitter. The central-nodal-line verdict is computed from the full distribution before
    the panel is cropped to ``output_cutoff``. Odd ``n`` give a line of zeros along the diagonal
    for both mode-2 states, even ``n`` do not.

    Parameters
    ----------
    nbar : float
        Mean photon number of the mode-2 state.
    photon_numbers : iterable of int
        Photon numbers ``n`` of the mode-1 Fock state.
    tol : float
        Truncation tolerance of the mode-2 state.
    output_cutoff : int
        Largest output photon number that is kept in each panel.

    Returns
    -------
    xarray.DataArray
        Data array with dims ``"Mode-2 state"``, ``"n"``, ``"m_a"`` and ``"m_b"``. The boolean
        coordinate ``cnl_present`` (along ``"Mode-2 state"`` and ``"n"``) holds the verdicts and
        the ``truncation_bound`` attribute the largest truncation bound of the panels.
    """
    nbar = _check_nonnegative("nbar", nbar)
    output_cutoff = _check_photon_number("output_cutoff", output_cutoff)
    if not is_iterable(photon_numbers):
        photon_numbers = [photon_numbers]
    photon_numbers = [_check_photon_number("n", n) for n in photon_numbers]

    size = output_cutoff + 1
    panels = np.zeros((len(MODE2_STATES), len(photon_numbers), size, size))
    cnl_present = np.zeros((len(MODE2_STATES), len(photon_numbers)), dtype=bool)
    truncation_bound = 0.0
    for i, kind in enumerate(MODE2_STATES):
        mode2 = _mode2_state(kind, nbar, tol)
        for j, n in enumerate(photon_numbers):
            joint = joint_distribution(BipartiteInput(make_fock(n), mode2))
            report = cnl_scan(joint)
            logger.info("n=%s with %s state: %s", n, kind, report.verdict)
            cnl_present[i, j] = report.present
            truncation_bound = max(truncation_bound, joint.truncation_bound)
            panels[i, j] = _pad(joint.probabilities, size)

    return xr.DataArray(
        panels,
        dims=("Mode-2 state", "n", "m_a", "m_b"),
        coords={
            "Mode-2 state": list(MODE2_STATES),
            "n": photon_numbers,
            "m_a": np.arange(size),
            "m_b": np.arange(size),
            "cnl_present": (("Mode-2 state", "n"), cnl_present),
        },
        attrs={"nbar": nbar, "tol": tol, "truncation_bound": truncation_bound},
        name="P",
    )


def _as_frame(result):
    if isinstance(result, JointDistribution):
        return result.to_frame()
    if isinstance(result, pd.DataFrame):
        return result
    raise TypeError(f"Cannot write a {type(result).__name__} as CSV, expected JointDistribution or DataFrame")


def write_csv(result, path):
    """Write a joint distribution or a result table as CSV.

    Joint distributions are written in the tidy ``ma, mb, p`` layout. Floats are written with 17
    significant digits, so the same result always gives the same file.
    """
    path = Path(path)
    _as_frame(result).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info("Wrote %s", path)
    return path


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serialisable")


def _to_payload(result, metadata):
    if isinstance(result, JointDistribution):
        payload = result.to_dict()
    elif isinstance(result, pd.DataFrame):
        payload = {
            "kind": "table",
            "columns": list(result.columns),
            "records": result.to_dict(orient="records"),
        }
    elif isinstance(result, dict):
        payload = dict(result)
    else:
        raise TypeError(f"Cannot write a {type(result).__name__} as JSON")

    if metadata is not None:
        payload["metadata"] = metadata
    return payload


def write_json(result, path, metadata=None):
    """Write a joint distribution, a result table or a mapping as indented JSON with sorted keys.

    Parameters
    ----------
    result : JointDistribution, pd.DataFrame or dict
    path : str or pathlib.Path
    metadata : dict (optional)
        Stored under the ``"metadata"`` key.
    """
    path = Path(path)
    payload = _to_payload(result, metadata)
    with path.open("w") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=_json_default)
        f.write("\n")
    logger.info("Wrote %s", path)
    return path


def read_json(path):
    """Read a file written by :func:`write_json`.

    Returns
    -------
    JointDistribution, pd.DataFrame or dict
        The type that was written. Metadata stored with a table is placed in ``DataFrame.attrs``.
    """
    with Path(path).open() as f:
        payload = json.load(f)

    kind = payload.get("kind")
    if kind == "joint_distribution":
        return JointDistribution.from_dict(payload)
    if kind == "table":
        frame = pd.DataFrame(payload["records"], columns=payload["columns"])
        frame.attrs.update(payload.get("metadata", {}))
        return frame
    return payload
