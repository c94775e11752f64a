# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass, field
from numbers import Complex

import numpy as np
import scipy.stats as stats
from scipy.special import gammaln

from ._module_utils import CutoffError, _check_nonnegative, _check_photon_number, _check_tolerance

__all__ = [
    "PhotonState",
    "BipartiteInput",
    "make_fock",
    "make_coherent",
    "make_thermal",
    "make_custom_pure",
    "make_custom_mixed",
    "make_state",
]

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_CUTOFF = 4096
_NORMALISATION_TOLERANCE = 1e-12
_KINDS = ("fock", "coherent", "thermal", "custom-pure", "custom-mixed")


def _read_only(x):
    x = np.array(x)
    x.setflags(write=False)
    return x


@dataclass(frozen=True, eq=False)
class PhotonState:
    """Single-mode photon-number state truncated at ``cutoff`` photons.

    Pure states store their number-basis amplitudes, mixed states only the diagonal of their
    density matrix. ``probabilities`` is always available. The probability of finding more
    than ``cutoff`` photons is stored in ``tail_mass``.

    Use the ``make_*`` functions to construct states.
    """

    kind: str
    probabilities: np.ndarray
    tail_mass: float
    amplitudes: np.ndarray = None
    parameters: dict = field(default_factory=dict)
    tol: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"Unknown state kind {self.kind!r}, must be one of {_KINDS}")
        if self.amplitudes is not None:
            object.__setattr__(self, "amplitudes", _read_only(np.asarray(self.amplitudes, dtype=complex)))
        object.__setattr__(self, "probabilities", _read_only(np.asarray(self.probabilities, dtype=float)))
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

        if np.any(self.probabilities < 0):
            raise ValueError("Photon-number probabilities must be non-negative")
        if self.tail_mass > self.tol:
            raise CutoffError(f"The tail mass {self.tail_mass:.3g} exceeds the tolerance {self.tol:.3g}")
        total = self.probabilities.sum() + self.tail_mass
        if abs(total - 1) > _NORMALISATION_TOLERANCE:
            raise ValueError(f"Probabilities and tail mass must sum to one, they sum to {total!r}")

    @property
    def cutoff(self):
        return len(self.probabilities) - 1

    @property
    def is_pure(self):
        return self.amplitudes is not None

    def mean(self):
        """Mean photon number of the stored (truncated) distribution."""
        return float(np.arange(self.cutoff + 1) @ self.probabilities)

    def variance(self):
        photon_numbers = np.arange(self.cutoff + 1)
        return float((photon_numbers - self.mean()) ** 2 @ self.probabilities)

    def describe(self):
        """JSON serialisable description used as provenance metadata."""
        parameters = {}
        for key, value in self.parameters.items():
            if isinstance(value, complex):
                value = [value.real, value.imag]
            parameters[key] = value
        return {"kind": self.kind, "cutoff": self.cutoff, "tail_mass": self.tail_mass, **parameters}


@dataclass(frozen=True, eq=False)
class BipartiteInput:
    """Product input state :math:`\\rho_1 \\otimes \\rho_2` of the two beamsplitter ports."""

    mode1: PhotonState
    mode2: PhotonState

    def __post_init__(self):
        for name in ("mode1", "mode2"):
            if not isinstance(getattr(self, name), PhotonState):
                raise TypeError(f"{name} must be a PhotonState, not {type(getattr(self, name)).__name__}")

    @property
    def is_pure(self):
        return self.mode1.is_pure and self.mode2.is_pure

    @property
    def truncation_bound(self):
        """Probability mass of the product state that lies outside the stored cutoffs."""
        tail1, tail2 = self.mode1.tail_mass, self.mode2.tail_mass
        return tail1 + tail2 - tail1 * tail2

    def describe(self):
        return {"mode1": self.mode1.describe(), "mode2": self.mode2.describe()}


def make_fock(n):
    """Fock state :math:`|n\\rangle`.

    Examples
    --------
    >>> make_fock(3).probabilities.tolist()
    [0.0, 0.0, 0.0, 1.0]
    """
    n = _check_photon_number("n", n)
    amplitudes = np.zeros(n + 1, dtype=complex)
    amplitudes[n] = 1
    return PhotonState(
        kind="fock", probabilities=np.abs(amplitudes) ** 2, tail_mass=0.0, amplitudes=amplitudes, parameters={"n": n}
    )


def _smallest_cutoff(survival, tol, max_cutoff, initial_guess):
    """Smallest ``M`` such that ``survival(M) < tol``."""
    cutoff = max(int(initial_guess), 0)
    while cutoff > 0 and survival(cutoff - 1) < tol:
        cutoff -= 1
    while survival(cutoff) >= tol:
        cutoff += 1
        if cutoff > max_cutoff:
            break
    if cutoff > max_cutoff:
        raise CutoffError(f"A tail mass below {tol:.3g} requires a cutoff above the ceiling {max_cutoff}")
    return cutoff


def make_coherent(beta, tol=DEFAULT_TOLERANCE, max_cutoff=DEFAULT_MAX_CUTOFF):
    """Coherent state :math:`|\\beta\\rangle` truncated where the Poisson tail falls below ``tol``.

    .. math::

        |\\beta\\rangle = e^{-|\\beta|^2/2} \\sum_{m=0}^\\infty \\frac{\\beta^m}{\\sqrt{m!}} |m\\rangle

    Parameters
    ----------
    beta : complex
        Coherent amplitude, the mean photon number is :math:`\\bar{n} = |\\beta|^2`.
    tol : float
        Largest allowed probability above the cutoff.
    max_cutoff : int
        Hard ceiling on the cutoff. A :class:`CutoffError` is raised if it would be exceeded.

    Returns
    -------
    PhotonState

    Examples
    --------
    >>> make_coherent(0).cutoff
    0
    """
    if not isinstance(beta, Complex):
        raise TypeError(f"beta must be a number, not {type(beta).__name__}")
    beta = complex(beta)
    tol = _check_tolerance("tol", tol)
    nbar = abs(beta) ** 2

    if nbar == 0:
        amplitudes = np.ones(1, dtype=complex)
        return PhotonState(
            kind="coherent",
            probabilities=np.ones(1),
            tail_mass=0.0,
            amplitudes=amplitudes,
            parameters={"beta": beta, "nbar": 0.0},
            tol=tol,
        )

    poisson = stats.poisson(nbar)
    cutoff = _smallest_cutoff(poisson.sf, tol, max_cutoff, poisson.isf(tol))
    logger.debug("Coherent state with mean %s truncated at %s photons", nbar, cutoff)

    photon_numbers = np.arange(cutoff + 1)
    log_magnitudes = -nbar / 2 + photon_numbers * np.log(abs(beta)) - gammaln(photon_numbers + 1) / 2
    amplitudes = np.exp(log_magnitudes) * np.exp(1j * np.angle(beta) * photon_numbers)
    return PhotonState(
        kind="coherent",
        probabilities=poisson.pmf(photon_numbers),
        tail_mass=poisson.sf(cutoff),
        amplitudes=amplitudes,
        parameters={"beta": beta, "nbar": nbar},
        tol=tol,
    )


def make_thermal(nbar, tol=DEFAULT_TOLERANCE, max_cutoff=DEFAULT_MAX_CUTOFF):
    """Thermal state with the geometric photon-number distribution.

    .. math::

        P(k) = \\frac{\\bar{n}^k}{(1 + \\bar{n})^{k+1}}

    Parameters
    ----------
    nbar : float
        Mean photon number.
    tol : float
        Largest allowed probability above the cutoff.
    max_cutoff : int
        Hard ceiling on the cutoff.

    Returns
    -------
    PhotonState

    Examples
    --------
    >>> float(make_thermal(1).probabilities[0])
    0.5
    """
    nbar = _check_nonnegative("nbar", nbar)
    tol = _check_tolerance("tol", tol)
    if nbar == 0:
        return PhotonState(kind="thermal", probabilities=np.ones(1), tail_mass=0.0, parameters={"nbar": 0.0}, tol=tol)

    # Geometric distribution on {0, 1, 2, ...}
    geometric = stats.geom(1 / (1 + nbar), loc=-1)
    cutoff = _smallest_cutoff(geometric.sf, tol, max_cutoff, geometric.isf(tol))
    logger.debug("Thermal state with mean %s truncated at %s photons", nbar, cutoff)

    photon_numbers = np.arange(cutoff + 1)
    return PhotonState(
        kind="thermal",
        probabilities=geometric.pmf(photon_numbers),
        tail_mass=geometric.sf(cutoff),
        parameters={"nbar": nbar},
        tol=tol,
    )


def _user_tail_mass(total):
    if total > 1 + _NORMALISATION_TOLERANCE:
        raise ValueError(f"The supplied state has norm {total!r} > 1")
    return max(1 - total, 0.0)


def make_custom_pure(amplitudes, tol=DEFAULT_TOLERANCE, normalise=False):
    """Pure state from user-supplied number-basis amplitudes.

    Parameters
    ----------
    amplitudes : array-like of complex
        Amplitude :math:`c_k` of :math:`|k\\rangle` for ``k = 0, ..., len(amplitudes) - 1``.
    tol : float
        Largest allowed missing probability :math:`1 - \\sum_k |c_k|^2`.
    normalise : bool
        If ``True``, rescale the amplitudes to unit norm.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex)
    if amplitudes.ndim != 1 or len(amplitudes) == 0:
        raise ValueError("The amplitudes must be a non-empty one-dimensional array")
    tol = _check_tolerance("tol", tol)

    probabilities = np.abs(amplitudes) ** 2
    if normalise:
        norm = np.sqrt(probabilities.sum())
        if norm == 0:
            raise ValueError("Cannot normalise the zero vector")
        amplitudes = amplitudes / norm
        probabilities = np.abs(amplitudes) ** 2

    return PhotonState(
        kind="custom-pure",
        probabilities=probabilities,
        tail_mass=_user_tail_mass(probabilities.sum()),
        amplitudes=amplitudes,
        tol=tol,
    )


def make_custom_mixed(probabilities, tol=DEFAULT_TOLERANCE, normalise=False):
    """Diagonal mixed state from user-supplied photon-number probabilities.

    Examples
    --------
    A mixture supported on odd photon numbers

    >>> state = make_custom_mixed([0, 0.5, 0, 0.5])
    >>> state.mean()
    2.0
    """
    probabilities = np.asarray(probabilities, dtype=float)
    if probabilities.ndim != 1 or len(probabilities) == 0:
        raise ValueError("The probabilities must be a non-empty one-dimensional array")
    if np.any(probabilities < 0):
        raise ValueError("The probabilities must be non-negative")
    tol = _check_tolerance("tol", tol)

    if normalise:
        probabilities = probabilities / probabilities.sum()

    return PhotonState(
        kind="custom-mixed", probabilities=probabilities, tail_mass=_user_tail_mass(probabilities.sum()), tol=tol
    )


def _parse_beta(config):
    if "beta" in config:
        beta = config["beta"]
        if isinstance(beta, (list, tuple)):
            if len(beta) != 2:
                raise ValueError("beta given as a list must be [real, imaginary]")
            beta = complex(*beta)
        return beta
    if "nbar" in config:
        return np.sqrt(_check_nonnegative("nbar", config["nbar"]))
    raise ValueError("A coherent state needs either 'beta' or 'nbar'")


def make_state(config, tol=DEFAULT_TOLERANCE, max_cutoff=DEFAULT_MAX_CUTOFF):
    """Build a :class:`PhotonState` from a configuration mapping.

    Parameters
    ----------
    config : Mapping
        Must contain ``"kind"`` and the parameters of that kind:

        * ``fock``: ``n``
        * ``coherent``: ``beta`` (number or ``[real, imaginary]``) or ``nbar``
        * ``thermal``: ``nbar``
        * ``custom-pure``: ``amplitudes``
        * ``custom-mixed``: ``probabilities``

        A ``tol`` entry overrides the ``tol`` argument.

    Examples
    --------
    >>> make_state({"kind": "fock", "n": 2}).cutoff
    2
    """
    config = dict(config)
    kind = config.pop("kind", None)
    tol = config.pop("tol", tol)
    allowed = {
        "fock": {"n"},
        "coherent": {"beta", "nbar"},
        "thermal": {"nbar"},
        "custom-pure": {"amplitudes", "normalise"},
        "custom-mixed": {"probabilities", "normalise"},
    }
    if kind not in allowed:
        raise ValueError(f"Unknown state kind {kind!r}, must be one of {tuple(allowed)}")
    unknown = set(config) - allowed[kind]
    if unknown:
        raise ValueError(f"Unknown parameters {sorted(unknown)} for a {kind} state")

    if kind == "fock":
        return make_fock(config.get("n", 0))
    elif kind == "coherent":
        return make_coherent(_parse_beta(config), tol=tol, max_cutoff=max_cutoff)
    elif kind == "thermal":
        return make_thermal(config.get("nbar", 0.0), tol=tol, max_cutoff=max_cutoff)
    elif kind == "custom-pure":
        amplitudes = [complex(*a) if isinstance(a, (list, tuple)) else a for a in config["amplitudes"]]
        return make_custom_pure(amplitudes, tol=tol, normalise=config.get("normalise", False))
    else:
        return make_custom_mixed(config["probabilities"], tol=tol, normalise=config.get("normalise", False))
