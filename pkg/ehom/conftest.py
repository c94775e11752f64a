# -*- coding: utf-8 -*-

import matplotlib.pyplot as plt
import numpy as np
import pytest


def pytest_configure(config):
    import matplotlib

    matplotlib.use("pdf")


def _print_legacy():
    if np.lib.NumpyVersion(np.__version__) >= "2.0.0":
        return "1.25"
    return False


@pytest.fixture(autouse=True)
def doctest_setup(doctest_namespace):
    doctest_namespace["np"] = np
    # Scalars print as plain floats in docstring examples
    with np.printoptions(precision=8, legacy=_print_legacy()):
        yield
    plt.close("all")
