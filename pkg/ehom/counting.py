# -*- coding: utf-8 -*-

"""Photon-counting probabilities for a single photon interfering with a coherent state.

Detector 1 registers :math:`N_1` photons around :math:`t_0` and detector 2 registers :math:`N_2`
photons around :math:`t_0 + \\tau`. With the detected field operators

.. math::

    \\hat{A}_1 = \\frac{\\zeta_1(t_0)a_1 - \\zeta_2(t_0)a_2}{\\sqrt{2}}, \\qquad
    \\hat{A}_2 = \\frac{\\zeta_1(t_0+\\tau)a_1 + \\zeta_2(t_0+\\tau)a_2}{\\sqrt{2}},

the counting probability is the normally ordered expectation

.. math::

    P_\\eta(N_1, N_2) = \\left\\langle : \\frac{(\\eta \\hat{I}_1)^{N_1}}{N_1!} e^{-\\eta\\hat{I}_1}
    \\frac{(\\eta \\hat{I}_2)^{N_2}}{N_2!} e^{-\\eta\\hat{I}_2} : \\right\\rangle,
    \\qquad \\hat{I}_i = \\hat{A}_i^\\dagger \\hat{A}_i.

For the input :math:`|1\\rangle \\otimes |\\beta\\rangle` with :math:`|\\beta|^2 = \\bar{n}_2`, expanding the
exponentials gives a double series over :math:`k` and :math:`\\ell`. It splits into a DC part, from
two coherent-state photons, and an interference part, which carries the single photon. Both parts
are summed with a certified truncation bound. The Poisson moments of the series also give a closed
form, which serves as an independent second evaluation. :func:`operator_oracle` evaluates the same
expectation by brute force on a truncated Fock space.
"""

import dataclasses
import logging
import math
import warnings
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.stats as stats

from ._module_utils import (
    ConvergenceError,
    TruncationError,
    _check_nonnegative,
    _check_photon_number,
    _check_positive,
    _check_probability,
    validate_photon_numbers,
)
from .distributions import _thinning_matrix
from .fock import _ladder_operators
from .spacetime import CwMode, GaussianMode
from .states import BipartiteInput, PhotonState

__all__ = [
    "CountingParams",
    "CountingResult",
    "ModeSamples",
    "sample_modes",
    "single_mode_counting",
    "registered_distribution",
    "fs_cs_dc_term",
    "interference_bracket",
    "hom_amplitude",
    "fs_cs_counting_joint",
    "fs_cs_counting_matrix",
    "diagonal_tau0",
    "operator_oracle",
]

logger = logging.getLogger(__name__)

SERIES_REL_TOL = 1e-14
SERIES_MAX_TERMS = 150
ORACLE_TRUNCATION_TOLERANCE = 1e-10

ModeSamples = namedtuple("ModeSamples", ["z1a", "z1b", "z2a", "z2b"])
ModeSamples.__doc__ = """Mode functions sampled at the detection times.

``z1a`` and ``z2a`` are :math:`\\zeta_1(t_0)` and :math:`\\zeta_2(t_0)`, ``z1b`` and ``z2b`` are
:math:`\\zeta_1(t_0+\\tau)` and :math:`\\zeta_2(t_0+\\tau)`.
"""


def sample_modes(mode1, mode2, t0=0.0, tau=0.0):
    """Sample two mode functions at ``t0`` and ``t0 + tau``."""
    return ModeSamples(
        z1a=complex(mode1(t0)), z1b=complex(mode1(t0 + tau)), z2a=complex(mode2(t0)), z2b=complex(mode2(t0 + tau))
    )


@dataclass(frozen=True)
class CountingParams:
    """Parameters of a counting experiment with :math:`|1\\rangle \\otimes |\\beta\\rangle` at the input.

    Parameters
    ----------
    eta : float
        Detector efficiency, shared by both detectors.
    N1, N2 : int
        Registered counts at the two detectors.
    nbar : float
        Mean photon number :math:`\\bar{n}_2 = |\\beta|^2` of the coherent state.
    mode1 : callable
        Mode function of the single photon.
    mode2 : callable
        Mode function of the coherent state.
    t0, tau : float
        First detection time and detection-time difference.
    rel_tol : float
        Series summation stops when the certified tail is below ``rel_tol`` times the summed
        absolute values of the terms.
    max_terms : int
        Largest shell :math:`k + \\ell` that is summed before giving up.
    """

    eta: float
    N1: int
    N2: int
    nbar: float
    mode1: object = GaussianMode()
    mode2: object = CwMode()
    t0: float = 0.0
    tau: float = 0.0
    rel_tol: float = SERIES_REL_TOL
    max_terms: int = SERIES_MAX_TERMS

    def __post_init__(self):
        _check_probability("eta", self.eta)
        _check_photon_number("N1", self.N1)
        _check_photon_number("N2", self.N2)
        _check_nonnegative("nbar", self.nbar)
        _check_positive("rel_tol", self.rel_tol)
        _check_photon_number("max_terms", self.max_terms)

    def samples(self):
        return sample_modes(self.mode1, self.mode2, self.t0, self.tau)


@dataclass(frozen=True)
class CountingResult:
    """Counting probability with its two parts and the evaluation diagnostics.

    ``series_error_bound`` bounds the truncated tail plus the floating point rounding of the
    summation. ``closed_form_total`` is ``None`` where the closed form is undefined.
    """

    p1_term: float
    p2_term: float
    total: float
    series_error_bound: float
    closed_form_total: float = None
    terms_used: int = 0

    def to_dict(self):
        return dataclasses.asdict(self)


def _as_number_distribution(P_N):
    if isinstance(P_N, PhotonState):
        return np.asarray(P_N.probabilities)
    P_N = np.asarray(P_N, dtype=float)
    if P_N.ndim != 1:
        raise ValueError(f"The photon-number distribution must be one dimensional, got shape {P_N.shape}")
    if np.any(P_N < 0):
        raise ValueError("Photon-number probabilities must be non-negative")
    return P_N


def registered_distribution(P_N, eta):
    """Distribution of registered counts for a detector of efficiency ``eta``.

    .. math::

        P_\\eta(n) = \\sum_{N \\geq n} P_N \\binom{N}{n} \\eta^n (1 - \\eta)^{N - n}

    Parameters
    ----------
    P_N : np.ndarray or PhotonState
        Photon-number distribution.
    eta : float
        Detector efficiency.

    Returns
    -------
    np.ndarray
        :math:`P_\\eta(n)` for ``n`` from zero to the length of ``P_N`` minus one. Its mean is
        :math:`\\eta \\bar{N}`.

    Examples
    --------
    >>> np.allclose(registered_distribution([0, 0, 1], 0.5), [0.25, 0.5, 0.25])
    True
    """
    eta = _check_probability("eta", eta)
    P_N = _as_number_distribution(P_N)
    return _thinning_matrix(len(P_N), eta) @ P_N


def single_mode_counting(P_N, eta, n):
    """Probability of registering ``n`` counts, a single entry of :func:`registered_distribution`."""
    eta = _check_probability("eta", eta)
    n = _check_photon_number("n", n)
    P_N = _as_number_distribution(P_N)
    photon_numbers = np.arange(len(P_N))
    return float(np.sum(P_N * stats.binom.pmf(n, photon_numbers, eta)))


def _poisson(p, n):
    # Explicit form so that p = 0 gives the Kronecker delta
    return p**n * math.exp(-p) / math.factorial(n)


@validate_photon_numbers("N1", "N2")
def fs_cs_dc_term(N1, N2, eta, nbar, flux=1.0, flux_delayed=None):
    """DC part of the counting probability, from two photons of the coherent state.

    .. math::

        P^{(1)}_\\eta(N_1, N_2) = \\frac{p_a^{N_1} e^{-p_a}}{N_1!} \\frac{p_b^{N_2} e^{-p_b}}{N_2!},
        \\qquad p_a = \\frac{1}{2}\\eta\\bar{n}_2 P_2(t_0), \\quad p_b = \\frac{1}{2}\\eta\\bar{n}_2 P_2(t_0+\\tau)

    Parameters
    ----------
    N1, N2 : int
        Registered counts.
    eta : float
        Detector efficiency.
    nbar : float
        Mean photon number of the coherent state.
    flux : float
        Intensity :math:`P_2(t_0)` of the coherent-state mode, the flux :math:`F` of a CW mode.
    flux_delayed : float
        Intensity :math:`P_2(t_0+\\tau)`, defaults to ``flux``.

    Examples
    --------
    >>> fs_cs_dc_term(0, 0, eta=1, nbar=2) == math.exp(-2)
    True
    """
    eta = _check_probability("eta", eta)
    nbar = _check_nonnegative("nbar", nbar)
    if flux_delayed is None:
        flux_delayed = flux
    p_a = 0.5 * eta * nbar * _check_nonnegative("flux", flux)
    p_b = 0.5 * eta * nbar * _check_nonnegative("flux_delayed", flux_delayed)
    return _poisson(p_a, N1) * _poisson(p_b, N2)


def hom_amplitude(samples):
    """Two-photon amplitude :math:`\\zeta_1(t_0+\\tau)\\zeta_2(t_0) - \\zeta_1(t_0)\\zeta_2(t_0+\\tau)`."""
    return samples.z1b * samples.z2a - samples.z1a * samples.z2b


def interference_bracket(N1, N2, k, l, samples):
    """Squared interference bracket of the :math:`(k, \\ell)` term of the counting series.

    .. math::

        |(N_2+\\ell)\\,\\zeta_1(t_0+\\tau)\\zeta_2(t_0) - (N_1+k)\\,\\zeta_1(t_0)\\zeta_2(t_0+\\tau)|^2

    For :math:`N_1 = N_2 = N` the inner amplitude equals :math:`N\\mathcal{A} +
    \\ell\\zeta_1(t_0+\\tau)\\zeta_2(t_0) - k\\zeta_1(t_0)\\zeta_2(t_0+\\tau)`, with :math:`\\mathcal{A}`
    given by :func:`hom_amplitude`.
    """
    delayed_first = samples.z1b * samples.z2a
    prompt_first = samples.z1a * samples.z2b
    return abs((N2 + l) * delayed_first - (N1 + k) * prompt_first) ** 2


def _series_amplitudes(params, samples):
    g = math.sqrt(0.5 * params.eta * params.nbar)
    return -g * samples.z2a, g * samples.z2b


def _shell_bound(s, c1, c2, P, N, inverse_factorial):
    photons = N + s
    interference = 0.0 if photons == 0 else c2 * photons**2 * P ** (photons - 1)
    return (c1 * P**s + interference) * 2**s * inverse_factorial


def _shell_ratio(s, P, N):
    """Bound on the ratio of consecutive shell bounds from shell ``s`` onwards."""
    photons = max(N + s, 1)
    return 2 * P / (s + 1) * ((photons + 1) / photons) ** 2


def _sum_series(params, samples):
    N1, N2, eta = params.N1, params.N2, params.eta
    N = N1 + N2
    u, w = _series_amplitudes(params, samples)
    p_a, p_b = abs(u) ** 2, abs(w) ** 2
    P = max(p_a, p_b)
    normalisation = 1 / (math.factorial(N1) * math.factorial(N2))
    c1 = p_a**N1 * p_b**N2 * normalisation
    c2 = 0.5 * eta * max(abs(samples.z1a), abs(samples.z1b)) ** 2 * normalisation

    inverse_factorials = [1.0]
    alternating_a = [1.0]
    alternating_b = [1.0]
    for i in range(1, params.max_terms + 2):
        inverse_factorials.append(inverse_factorials[-1] / i)
        alternating_a.append(-alternating_a[-1] * p_a / i)
        alternating_b.append(-alternating_b[-1] * p_b / i)

    p1_term = p2_term = absolute_sum = 0.0
    terms_used = 0
    tail = math.inf
    for s in range(params.max_terms + 1):
        for k in range(s + 1):
            l = s - k
            a, b = N1 + k, N2 + l
            dc = c1 * alternating_a[k] * alternating_b[l]

            V = 0j
            if a:
                V += a * samples.z1a * u ** (a - 1) * w**b
            if b:
                V += b * samples.z1b * u**a * w ** (b - 1)
            sign = -1 if (k + l) % 2 else 1
            weight = 0.5 * eta * normalisation * inverse_factorials[k] * inverse_factorials[l]
            interference = sign * weight * abs(V) ** 2

            p1_term += dc
            p2_term += interference
            absolute_sum += abs(dc) + abs(interference)
            terms_used += 1

        ratio = _shell_ratio(s + 1, P, N)
        if ratio < 1:
            next_shell = _shell_bound(s + 1, c1, c2, P, N, inverse_factorials[s + 1])
            tail = next_shell / (1 - ratio)
            if tail <= params.rel_tol * absolute_sum:
                break
    else:
        raise ConvergenceError(
            f"The counting series did not converge within {params.max_terms} shells, tail bound {tail:.3g}",
            p1_term + p2_term,
            tail,
        )

    rounding = np.finfo(float).eps * terms_used * absolute_sum
    logger.debug("Counting series for (%s, %s) used %s terms, tail bound %s", N1, N2, terms_used, tail)
    return p1_term, p2_term, tail + rounding, terms_used


def _closed_form(params, samples):
    """Poisson-moment form of the summed series, ``None`` where a factor :math:`p^{-1}` appears."""
    N1, N2, eta, nbar = params.N1, params.N2, params.eta, params.nbar
    u, w = _series_amplitudes(params, samples)
    p_a, p_b = abs(u) ** 2, abs(w) ** 2
    if (N1 == 0 and p_a == 0) or (N2 == 0 and p_b == 0):
        return None

    Y = samples.z1a * samples.z2b
    X = samples.z1b * samples.z2a
    first_moment_a, first_moment_b = N1 - p_a, N2 - p_b
    bracket = (
        (first_moment_a**2 - p_a) * abs(Y) ** 2
        + (first_moment_b**2 - p_b) * abs(X) ** 2
        - 2 * first_moment_a * first_moment_b * (Y * X.conjugate()).real
    )
    prefactor = 0.25 * eta**2 * nbar * p_a ** (N1 - 1) * p_b ** (N2 - 1) / (math.factorial(N1) * math.factorial(N2))
    interference = prefactor * math.exp(-p_a - p_b) * bracket
    return _poisson(p_a, N1) * _poisson(p_b, N2) + interference


def fs_cs_counting_joint(params):
    """Probability of registering ``N1`` and ``N2`` counts for :math:`|1\\rangle \\otimes |\\beta\\rangle`.

    The double series over :math:`k` and :math:`\\ell` is summed shell by shell (:math:`s = k + \\ell`).
    Each shell is bounded by :math:`(C_1 P^s + C_2 (N+s)^2 P^{N+s-1}) 2^s / s!` with
    :math:`P = \\max(p_a, p_b)` and :math:`N = N_1 + N_2`, so the remaining tail is bounded by a
    geometric series. The series is also evaluated in closed form with the Poisson moments
    :math:`\\sum_k (-p)^k/k! = e^{-p}`, :math:`\\sum_k k(-p)^k/k! = -pe^{-p}` and
    :math:`\\sum_k k^2(-p)^k/k! = p(p-1)e^{-p}`, which gives

    .. math::

        P_\\eta(N_1, N_2) = \\frac{p_a^{N_1}e^{-p_a}}{N_1!}\\frac{p_b^{N_2}e^{-p_b}}{N_2!}
        + \\frac{\\eta^2\\bar{n}_2}{4}\\frac{p_a^{N_1-1}p_b^{N_2-1}}{N_1!N_2!}e^{-p_a-p_b}
        \\left[((N_1-p_a)^2-p_a)|Y|^2
        + ((N_2-p_b)^2-p_b)|X|^2 - 2(N_1-p_a)(N_2-p_b)\\operatorname{Re}(Y\\bar{X})\\right]

    with :math:`Y = \\zeta_1(t_0)\\zeta_2(t_0+\\tau)` and :math:`X = \\zeta_1(t_0+\\tau)\\zeta_2(t_0)`.
    A warning is issued if the two evaluations disagree by more than the series bound.

    Parameters
    ----------
    params : CountingParams

    Returns
    -------
    CountingResult

    Raises
    ------
    ConvergenceError
        If the series has not converged after ``params.max_terms`` shells.

    Examples
    --------
    >>> params = CountingParams(eta=1, N1=1, N2=1, nbar=1, mode1=CwMode(), mode2=CwMode())
    >>> result = fs_cs_counting_joint(params)
    >>> abs(result.total) < 1e-15
    True
    """
    samples = params.samples()
    p1_term, p2_term, bound, terms_used = _sum_series(params, samples)
    total = p1_term + p2_term
    closed = _closed_form(params, samples)

    if closed is not None:
        slack = bound + 1e-12 * max(abs(closed), abs(total))
        if abs(closed - total) > slack:
            warnings.warn(
                f"Series ({total!r}) and closed form ({closed!r}) of P({params.N1}, {params.N2}) differ by more "
                f"than the series bound {bound:.3g}",
                RuntimeWarning,
            )

    return CountingResult(
        p1_term=p1_term,
        p2_term=p2_term,
        total=total,
        series_error_bound=bound,
        closed_form_total=closed,
        terms_used=terms_used,
    )


def fs_cs_counting_matrix(params, n_max):
    """Counting probabilities for every pair ``0 <= N1, N2 <= n_max``.

    ``params.N1`` and ``params.N2`` are ignored.

    Returns
    -------
    pd.DataFrame
        Tidy table with columns ``ma``, ``mb``, ``p`` and ``err`` (the series error bound), with
        ``ma`` varying slowest.
    """
    n_max = _check_photon_number("n_max", n_max)
    rows = []
    for N1 in range(n_max + 1):
        for N2 in range(n_max + 1):
            result = fs_cs_counting_joint(dataclasses.replace(params, N1=N1, N2=N2))
            rows.append({"ma": N1, "mb": N2, "p": result.total, "err": result.series_error_bound})
    return pd.DataFrame(rows, columns=["ma", "mb", "p", "err"])


def diagonal_tau0(N, eta, nbar, mode1, mode2, t0=0.0):
    """Coincidence probability :math:`P_\\eta(N, N)` at zero detection-time difference.

    .. math::

        P_\\eta(N, N)|_{\\tau=0} = \\frac{\\eta^2 \\bar{n}_2}{4N^2}
        \\left(\\frac{p^{N-1}}{(N-1)!}\\right)^2 e^{-2p} P_2^2(t_0) \\bar{n}_2 \\left[1 - \\eta P_1(t_0)\\right],
        \\qquad p = \\frac{1}{2}\\eta\\bar{n}_2 P_2(t_0)

    The diagonal is a line of zeros for an ideal detector (:math:`\\eta = 1`) and a single photon
    with :math:`P_1(t_0) = 1`. Imperfect detection fills it in linearly in :math:`\\eta P_1(t_0)`.

    Examples
    --------
    >>> diagonal_tau0(3, eta=1, nbar=4, mode1=CwMode(), mode2=CwMode())
    0.0
    """
    N = _check_photon_number("N", N)
    if N < 1:
        raise ValueError("The diagonal closed form needs N >= 1")
    eta = _check_probability("eta", eta)
    nbar = _check_nonnegative("nbar", nbar)

    P1 = float(np.abs(mode1(t0)) ** 2)
    P2 = float(np.abs(mode2(t0)) ** 2)
    p = 0.5 * eta * nbar * P2
    poisson_like = p ** (N - 1) / math.factorial(N - 1)
    return eta**2 * nbar / (4 * N**2) * poisson_like**2 * math.exp(-2 * p) * P2**2 * nbar * (1 - eta * P1)


def _ensemble(state, cutoff):
    """Pure components ``(weight, vector)`` of a truncated single-mode state."""
    if state.is_pure:
        vector = np.zeros(cutoff + 1, dtype=complex)
        vector[: state.cutoff + 1] = state.amplitudes
        return [(1.0, vector)]

    components = []
    for n, probability in enumerate(state.probabilities):
        if probability > 0:
            vector = np.zeros(cutoff + 1, dtype=complex)
            vector[n] = 1
            components.append((probability, vector))
    return components


def operator_oracle(input_state, mode_samples, eta, N1, N2, t0=0.0, tau=0.0):
    """Brute-force counting probability from the normally ordered expansion on a truncated Fock space.

    .. math::

        P_\\eta(N_1, N_2) = \\sum_{j_1 \\geq N_1} \\sum_{j_2 \\geq N_2}
        \\frac{\\eta^{N_1+N_2}(-\\eta)^{j_1-N_1+j_2-N_2}}{N_1!N_2!(j_1-N_1)!(j_2-N_2)!}
        \\|\\hat{A}_1^{j_1}\\hat{A}_2^{j_2}|\\psi\\rangle\\|^2

    summed over the pure components of the input. The detected operators only lower photon
    numbers, so the sum terminates and the only truncation error is the tail mass of the input.

    Parameters
    ----------
    input_state : BipartiteInput
    mode_samples : tuple
        Either the two mode functions ``(mode1, mode2)``, evaluated at ``t0`` and ``t0 + tau``, or
        a :class:`ModeSamples` tuple of already sampled values. ``ModeSamples(sqrt(2), 0, 0, 0)``
        reduces the oracle to single-mode counting of mode 1.
    eta : float
    N1, N2 : int
    t0, tau : float

    Raises
    ------
    TruncationError
        If the input misses more than :math:`10^{-10}` of probability mass.
    """
    if not isinstance(input_state, BipartiteInput):
        raise TypeError(f"input_state must be a BipartiteInput, not {type(input_state).__name__}")
    eta = _check_probability("eta", eta)
    N1 = _check_photon_number("N1", N1)
    N2 = _check_photon_number("N2", N2)
    if input_state.truncation_bound > ORACLE_TRUNCATION_TOLERANCE:
        raise TruncationError(
            f"The input misses {input_state.truncation_bound:.3g} of probability mass, more than "
            f"{ORACLE_TRUNCATION_TOLERANCE:.3g}"
        )

    if len(mode_samples) == 2:
        samples = sample_modes(*mode_samples, t0=t0, tau=tau)
    elif len(mode_samples) == 4:
        samples = ModeSamples(*(complex(z) for z in mode_samples))
    else:
        raise ValueError("mode_samples must hold two mode functions or four sampled values")

    cutoff = max(input_state.mode1.cutoff, input_state.mode2.cutoff)
    a1, a2 = _ladder_operators(cutoff)
    A1 = (samples.z1a * a1 - samples.z2a * a2) / math.sqrt(2)
    A2 = (samples.z1b * a1 + samples.z2b * a2) / math.sqrt(2)
    max_photons = input_state.mode1.cutoff + input_state.mode2.cutoff
    logger.debug("Operator oracle on %s two-mode states", A1.shape[0])

    probability = 0.0
    for weight1, vector1 in _ensemble(input_state.mode1, cutoff):
        for weight2, vector2 in _ensemble(input_state.mode2, cutoff):
            psi = np.kron(vector1, vector2)
            for j2 in range(max_photons + 1):
                phi = psi
                for j1 in range(max_photons + 1 - j2):
                    if j1 >= N1 and j2 >= N2:
                        excess1, excess2 = j1 - N1, j2 - N2
                        coefficient = (
                            eta ** (N1 + N2)
                            * (-eta) ** (excess1 + excess2)
                            / (
                                math.factorial(N1)
                                * math.factorial(N2)
                                * math.factorial(excess1)
                                * math.factorial(excess2)
                            )
                        )
                        probability += weight1 * weight2 * coefficient * np.vdot(phi, phi).real
                    phi = A1 @ phi
                psi = A2 @ psi
    return probability
