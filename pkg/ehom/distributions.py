# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pandas as pd
import scipy.stats as stats
import xarray as xr
from scipy.special import gammaln

from ._module_utils import _check_photon_number, _check_probability, _check_tolerance
from .fock import ExactAmplitude, ScatteringMatrix, bs_amplitude
from .states import DEFAULT_TOLERANCE, BipartiteInput, make_coherent

__all__ = [
    "JointDistribution",
    "DetectorModel",
    "CNLReport",
    "joint_distribution",
    "analytic_fs_cs",
    "apply_efficiency",
    "cnl_scan",
    "fs_cs_efficiency_diagonal",
    "monte_carlo_efficiency",
]

logger = logging.getLogger(__name__)

CNL_THRESHOLD_OFFSET = 1e-12
_MISSING_MASS_TOLERANCE = 1e-9
_EXCESS_MASS_TOLERANCE = 1e-12
ROW_CACHE_SIZE = 2**12


def _describe_beamsplitter(S):
    return {"t": S.t, "r": S.r, "exact": S.exact}


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint output photon-number distribution :math:`P(m_a, m_b)`.

    Parameters
    ----------
    probabilities : np.ndarray
        Matrix with element ``[m_a, m_b]`` equal to the probability of detecting ``m_a`` photons in
        output mode 1 and ``m_b`` photons in output mode 2.
    truncation_bound : float
        Upper bound on the probability mass lost by truncating the input states.
    provenance : dict
        JSON serialisable description of the inputs, beamsplitter and detectors.
    discarded_mass : float
        Probability mass removed by cropping the matrix (see :meth:`crop`).
    """

    probabilities: np.ndarray
    truncation_bound: float = 0.0
    provenance: dict = field(default_factory=dict)
    discarded_mass: float = 0.0

    def __post_init__(self):
        probabilities = np.array(self.probabilities, dtype=float)
        if probabilities.ndim != 2:
            raise ValueError(f"The probabilities must be a matrix, not an array of shape {probabilities.shape}")
        if np.any(probabilities < 0):
            raise ValueError("The probabilities must be non-negative")
        probabilities.setflags(write=False)
        object.__setattr__(self, "probabilities", probabilities)
        object.__setattr__(self, "truncation_bound", float(self.truncation_bound))
        object.__setattr__(self, "discarded_mass", float(self.discarded_mass))

        total = probabilities.sum()
        if total > 1 + _EXCESS_MASS_TOLERANCE:
            raise ValueError(f"The probabilities sum to {total!r} > 1")
        if total + self.truncation_bound + self.discarded_mass < 1 - _MISSING_MASS_TOLERANCE:
            raise ValueError(
                f"The probabilities sum to {total!r}, which is not accounted for by the truncation bound"
                f" {self.truncation_bound!r} and discarded mass {self.discarded_mass!r}"
            )

    @property
    def shape(self):
        return self.probabilities.shape

    def total(self):
        return float(self.probabilities.sum())

    def diagonal(self):
        """Coincidence probabilities :math:`P(N, N)`."""
        return np.diagonal(self.probabilities).copy()

    def marginals(self):
        """Photon-number distributions of output mode 1 and output mode 2."""
        return self.probabilities.sum(axis=1), self.probabilities.sum(axis=0)

    def mean(self):
        """Mean photon number in output mode 1 and output mode 2."""
        marginal_a, marginal_b = self.marginals()
        return float(np.arange(len(marginal_a)) @ marginal_a), float(np.arange(len(marginal_b)) @ marginal_b)

    def crop(self, cutoff):
        """Keep ``m_a, m_b <= cutoff``, the removed probability is added to ``discarded_mass``."""
        cutoff = _check_photon_number("cutoff", cutoff)
        cropped = self.probabilities[: cutoff + 1, : cutoff + 1]
        discarded = max(self.total() - float(cropped.sum()), 0.0)
        return JointDistribution(
            cropped,
            truncation_bound=self.truncation_bound,
            provenance=dict(self.provenance),
            discarded_mass=self.discarded_mass + discarded,
        )

    def to_frame(self):
        """Tidy DataFrame with columns ``ma``, ``mb`` and ``p``, sorted by ``ma`` and then ``mb``."""
        m_a, m_b = np.indices(self.shape)
        return pd.DataFrame({"ma": m_a.ravel(), "mb": m_b.ravel(), "p": self.probabilities.ravel()})

    def to_xarray(self):
        """Labelled DataArray with dims ``m_a`` and ``m_b`` and the metadata as attributes."""
        return xr.DataArray(
            self.probabilities,
            dims=("m_a", "m_b"),
            coords={"m_a": np.arange(self.shape[0]), "m_b": np.arange(self.shape[1])},
            attrs={"truncation_bound": self.truncation_bound, "discarded_mass": self.discarded_mass},
            name="P",
        )

    def to_dict(self):
        return {
            "kind": "joint_distribution",
            "probabilities": self.probabilities.tolist(),
            "truncation_bound": self.truncation_bound,
            "discarded_mass": self.discarded_mass,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, payload):
        if payload.get("kind", "joint_distribution") != "joint_distribution":
            raise ValueError(f"Cannot read a {payload['kind']!r} payload as a joint distribution")
        return cls(
            np.array(payload["probabilities"], dtype=float),
            truncation_bound=payload.get("truncation_bound", 0.0),
            provenance=payload.get("provenance", {}),
            discarded_mass=payload.get("discarded_mass", 0.0),
        )

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return (
            np.array_equal(self.probabilities, other.probabilities)
            and self.truncation_bound == other.truncation_bound
            and self.discarded_mass == other.discarded_mass
            and self.provenance == other.provenance
        )

    __hash__ = None


@dataclass(frozen=True)
class DetectorModel:
    """Photon-number resolving detectors with independent per-photon efficiencies."""

    eta1: float = 1.0
    eta2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "eta1", _check_probability("eta1", self.eta1))
        object.__setattr__(self, "eta2", _check_probability("eta2", self.eta2))

    @classmethod
    def symmetric(cls, eta):
        return cls(eta, eta)


@dataclass(frozen=True, eq=False)
class CNLReport:
    """Result of scanning the diagonal :math:`P(N, N)` for a central nodal line."""

    diagonal: np.ndarray
    max_diagonal: float
    threshold: float
    present: bool

    @property
    def verdict(self):
        return "CNL present" if self.present else "CNL absent"

    def to_frame(self):
        return pd.DataFrame({"m": np.arange(len(self.diagonal)), "p": self.diagonal})


@lru_cache(maxsize=ROW_CACHE_SIZE)
def _amplitude_row(n, m, S):
    """Amplitudes :math:`\\langle N_a, n+m-N_a|U|n, m\\rangle` for ``N_a = 0, ..., n+m`` as floats."""
    return np.array([float(bs_amplitude(n, m, n_a, n + m - n_a, S)) for n_a in range(n + m + 1)])


@lru_cache(maxsize=ROW_CACHE_SIZE)
def _probability_row(n, m, S):
    """Squared amplitudes of :func:`_amplitude_row`, computed from the exact magnitudes when available."""
    row = []
    for n_a in range(n + m + 1):
        amplitude = bs_amplitude(n, m, n_a, n + m - n_a, S)
        if isinstance(amplitude, ExactAmplitude):
            row.append(float(amplitude.abs2()))
        else:
            row.append(amplitude * amplitude)
    return np.array(row)


def joint_distribution(bipartite_input, S=None):
    """Joint output photon-number distribution of a product input.

    Pure inputs are summed coherently,

    .. math::

        P(N_a, N_b) = \\Big|\\sum_{n+m = N_a+N_b} c^{(1)}_n c^{(2)}_m
        \\langle N_a, N_b|U|n, m\\rangle\\Big|^2,

    while the number-basis components are summed incoherently if any of the two input states is
    mixed. A number state in either port leaves a single term in each coherent sum, so the exact
    squared amplitudes are used directly in that case.

    Parameters
    ----------
    bipartite_input : BipartiteInput
        Product input state.
    S : ScatteringMatrix (optional)
        Beamsplitter, the balanced beamsplitter is used if not given.

    Returns
    -------
    JointDistribution
        Matrix of shape ``(cutoff1 + cutoff2 + 1, cutoff1 + cutoff2 + 1)``.

    Examples
    --------
    >>> from ehom.states import BipartiteInput, make_fock
    >>> P = joint_distribution(BipartiteInput(make_fock(1), make_fock(1))).probabilities
    >>> float(P[1, 1]), float(P[2, 0]), float(P[0, 2])
    (0.0, 0.5, 0.5)
    """
    if not isinstance(bipartite_input, BipartiteInput):
        raise TypeError(f"The input must be a BipartiteInput, not {type(bipartite_input).__name__}")
    S = ScatteringMatrix.balanced() if S is None else S
    mode1, mode2 = bipartite_input.mode1, bipartite_input.mode2
    size = mode1.cutoff + mode2.cutoff + 1
    support1 = np.flatnonzero(mode1.probabilities)
    support2 = np.flatnonzero(mode2.probabilities)
    logger.debug("Building a %sx%s joint distribution from %s input pairs", size, size, len(support1) * len(support2))

    # With a single number state in either port every output (N_a, N_b) fixes (n, m), so there is
    # nothing to add coherently
    coherent_sum = bipartite_input.is_pure and len(support1) > 1 and len(support2) > 1
    if coherent_sum:
        amplitudes = np.zeros((size, size), dtype=complex)
        for n in support1:
            for m in support2:
                n_a = np.arange(n + m + 1)
                weight = mode1.amplitudes[n] * mode2.amplitudes[m]
                amplitudes[n_a, n + m - n_a] += weight * _amplitude_row(int(n), int(m), S)
        probabilities = np.abs(amplitudes) ** 2
    else:
        probabilities = np.zeros((size, size))
        for n in support1:
            for m in support2:
                n_a = np.arange(n + m + 1)
                weight = mode1.probabilities[n] * mode2.probabilities[m]
                probabilities[n_a, n + m - n_a] += weight * _probability_row(int(n), int(m), S)

    return JointDistribution(
        probabilities,
        truncation_bound=bipartite_input.truncation_bound,
        provenance={**bipartite_input.describe(), "beamsplitter": _describe_beamsplitter(S)},
    )


def analytic_fs_cs(N1, N2, beta):
    """Closed-form joint distribution for a single photon and a coherent state at a balanced beamsplitter.

    The output of :math:`|1, \\beta\\rangle` is
    :math:`\\tfrac{1}{\\sqrt{2}}(b_1^\\dagger + b_2^\\dagger)|-\\beta/\\sqrt{2}, \\beta/\\sqrt{2}\\rangle`, so

    .. math::

        P(N_1, N_2) = \\frac{e^{-|\\beta|^2} |\\beta|^{2(N_1+N_2-1)}}{N_1!\\, N_2!\\, 2^{N_1+N_2}} (N_1 - N_2)^2,

    which vanishes on the whole diagonal :math:`N_1 = N_2`.

    Parameters
    ----------
    N1, N2 : int or array-like of int
        Detected photon numbers, broadcast against each other.
    beta : complex
        Coherent amplitude of the mode-2 input.

    Returns
    -------
    float or np.ndarray

    Examples
    --------
    >>> analytic_fs_cs(5, 5, 3)
    0.0
    """
    N1 = np.asarray(N1)
    N2 = np.asarray(N2)
    for name, value in (("N1", N1), ("N2", N2)):
        if not np.issubdtype(value.dtype, np.integer):
            raise TypeError(f"{name} must contain integer photon numbers")
        if np.any(value < 0):
            raise ValueError(f"{name} must be non-negative")
    N1, N2 = np.broadcast_arrays(N1, N2)

    nbar = abs(beta) ** 2
    total = N1 + N2
    exponent = np.maximum(total - 1, 0)
    log_weight = -nbar - gammaln(N1 + 1) - gammaln(N2 + 1) - total * np.log(2)
    if nbar > 0:
        weight = np.exp(log_weight + exponent * np.log(nbar))
    else:
        weight = np.exp(log_weight) * (exponent == 0)

    probability = weight * (N1 - N2).astype(float) ** 2
    if probability.ndim == 0:
        return float(probability)
    return probability


def _thinning_matrix(size, eta):
    """Matrix with element ``[n, N]`` equal to :math:`\\binom{N}{n}\\eta^n(1-\\eta)^{N-n}`."""
    if eta == 1:
        return np.eye(size)
    if eta == 0:
        thinning = np.zeros((size, size))
        thinning[0] = 1
        return thinning
    photon_numbers = np.arange(size)
    return stats.binom.pmf(photon_numbers[:, np.newaxis], photon_numbers[np.newaxis, :], eta)


def apply_efficiency(joint, detector):
    """Bernoulli detector model applied independently to the two output modes.

    .. math::

        P_\\eta(n_1, n_2) = \\sum_{N_1 \\geq n_1} \\sum_{N_2 \\geq n_2}
        \\binom{N_1}{n_1}\\eta_1^{n_1}(1-\\eta_1)^{N_1-n_1}
        \\binom{N_2}{n_2}\\eta_2^{n_2}(1-\\eta_2)^{N_2-n_2} P(N_1, N_2)

    Parameters
    ----------
    joint : JointDistribution
    detector : DetectorModel

    Returns
    -------
    JointDistribution
        Registered-count distribution with the same shape and truncation bound.
    """
    thinning1 = _thinning_matrix(joint.shape[0], detector.eta1)
    thinning2 = _thinning_matrix(joint.shape[1], detector.eta2)
    registered = thinning1 @ joint.probabilities @ thinning2.T
    return JointDistribution(
        np.clip(registered, 0, None),
        truncation_bound=joint.truncation_bound,
        provenance={**joint.provenance, "detector": {"eta1": detector.eta1, "eta2": detector.eta2}},
        discarded_mass=joint.discarded_mass,
    )


def cnl_scan(joint, threshold_offset=CNL_THRESHOLD_OFFSET):
    """Check whether the diagonal :math:`P(N, N)` is a central nodal line of zeros.

    An entry counts as zero if it does not exceed ``joint.truncation_bound + threshold_offset``,
    so that truncation artefacts are not mistaken for coincidences.

    Returns
    -------
    CNLReport

    Examples
    --------
    >>> from ehom.states import BipartiteInput, make_fock, make_coherent
    >>> cnl_scan(joint_distribution(BipartiteInput(make_fock(1), make_coherent(3)))).verdict
    'CNL present'
    >>> cnl_scan(joint_distribution(BipartiteInput(make_fock(2), make_coherent(3)))).verdict
    'CNL absent'
    """
    diagonal = joint.diagonal()
    threshold = joint.truncation_bound + threshold_offset
    present = bool(np.all(diagonal <= threshold))
    logger.debug("Largest diagonal entry %s, threshold %s", diagonal.max(), threshold)
    return CNLReport(diagonal=diagonal, max_diagonal=float(diagonal.max()), threshold=threshold, present=present)


def fs_cs_efficiency_diagonal(n, eta, beta, tol=DEFAULT_TOLERANCE):
    """Registered coincidences :math:`P_\\eta(n, n)` for :math:`|1, \\beta\\rangle` and equal efficiencies.

    Uses the symmetry and the vanishing diagonal of :func:`analytic_fs_cs`,

    .. math::

        P_\\eta(n, n) = 2 \\sum_{N_2 \\geq n} \\sum_{N_1 > N_2} \\binom{N_1}{n}\\binom{N_2}{n}
        \\eta^{2n}(1-\\eta)^{N_1+N_2-2n} P(N_1, N_2).

    The sums stop at the total photon number of the coherent state truncated at ``tol``.
    """
    n = _check_photon_number("n", n)
    eta = _check_probability("eta", eta)
    tol = _check_tolerance("tol", tol)

    max_total = make_coherent(beta, tol=tol).cutoff + 1
    photon_numbers = np.arange(max_total + 1)
    thinning = _thinning_matrix(max_total + 1, eta)[n]
    N1, N2 = np.meshgrid(photon_numbers, photon_numbers, indexing="ij")
    mask = (N1 > N2) & (N2 >= n) & (N1 + N2 <= max_total)
    terms = thinning[N1] * thinning[N2] * analytic_fs_cs(N1, N2, beta)
    return 2 * float(np.sum(terms[mask]))


def monte_carlo_efficiency(joint, detector, n_samples=10**6, seed=None):
    """Estimate :func:`apply_efficiency` by binomial thinning of sampled photon-number pairs.

    Parameters
    ----------
    joint : JointDistribution
    detector : DetectorModel
    n_samples : int
        Number of sampled ``(N1, N2)`` pairs.
    seed : {None, int, array_like[ints], np.random.SeedSequence, np.random.BitGenerator, np.random.Generator}
        Seed for numpy random number generator

    Returns
    -------
    estimate : np.ndarray
        Relative frequency of each registered ``(n1, n2)``.
    standard_error : np.ndarray
        Binomial standard error :math:`\\sqrt{p(1-p)/N}` of each relative frequency, with :math:`p` the
        exact registered probability from :func:`apply_efficiency` (renormalised like the sampler). Cells
        that receive no samples still get the error of their exact probability.
    """
    rng = np.random.default_rng(seed)
    probabilities = joint.probabilities.ravel()
    samples = rng.choice(probabilities.size, size=n_samples, p=probabilities / probabilities.sum())
    N1, N2 = np.unravel_index(samples, joint.shape)

    n1 = rng.binomial(N1, detector.eta1)
    n2 = rng.binomial(N2, detector.eta2)
    counts = np.zeros(joint.shape)
    np.add.at(counts, (n1, n2), 1)

    estimate = counts / n_samples
    exact = apply_efficiency(joint, detector).probabilities / probabilities.sum()
    standard_error = np.sqrt(exact * (1 - exact) / n_samples)
    return estimate, standard_error
