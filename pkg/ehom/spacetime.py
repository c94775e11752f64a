# -*- coding: utf-8 -*-

"""Space-time interference probabilities at a balanced beamsplitter.

Two parameterisations of the Gaussian wave packet are used. The two-photon HOM functions use
unit-width packets, :math:`\\zeta(t) = (2/\\pi)^{1/4} e^{-(t - t_c)^2 - i\\omega t}`, so times are
measured in units of the packet width. The Fock-state/coherent-state (FS/CS) functions carry the
coherence time :math:`\\tau_c` explicitly, :math:`\\zeta_1(t) = (2/\\pi\\tau_c^2)^{1/4}
e^{-i\\omega_1 t - t^2/\\tau_c^2}`. Both are :class:`GaussianMode` instances, with ``width=1`` and
``width=tau_c`` respectively.

Every total probability is available in closed form and by adaptive quadrature of its defining
integrand (``method="quadrature"``). The quadrature truncates the Gaussian tails at ten widths and
targets an absolute error of :math:`10^{-10}`.
"""

import dataclasses
import itertools
import logging
from collections import namedtuple
from dataclasses import dataclass
from inspect import signature

import numpy as np
import pandas as pd
import scipy.integrate as integrate

from ._module_utils import ConvergenceError, _check_nonnegative, _check_positive

__all__ = [
    "GaussianMode",
    "CwMode",
    "PulsedReferenceMode",
    "TimingParams",
    "QuadratureResult",
    "FsCsDensity",
    "legero_modes",
    "hom_joint_density",
    "hom_product_density",
    "hom_total_vs_tau",
    "hom_total_broadened",
    "fs_cs_joint_density",
    "fs_cs_interference_closed_form",
    "fs_cs_total_vs_tau",
    "sweep",
]

logger = logging.getLogger(__name__)

QUADRATURE_EPSABS = 1e-10
QUADRATURE_EPSREL = 1e-10
QUADRATURE_LIMIT = 200
TAIL_WIDTHS = 10

QuadratureResult = namedtuple("QuadratureResult", ["value", "error"])
FsCsDensity = namedtuple("FsCsDensity", ["dc_term", "interference_term", "total"])


@dataclass(frozen=True)
class GaussianMode:
    """Normalised Gaussian wave packet.

    .. math::

        \\zeta(t) = \\left(\\frac{2}{\\pi w^2}\\right)^{1/4} e^{-(t - t_d)^2/w^2 - i \\omega t + i\\phi}

    Parameters
    ----------
    frequency : float
        Centre frequency :math:`\\omega`.
    delay : float
        Centre :math:`t_d` of the packet (a signed offset, :math:`\\pm\\delta\\tau/2` for a delayed pair).
    width : float
        Width :math:`w`, one in the unit-width convention and :math:`\\tau_c` otherwise.
    phase : float
        Global phase :math:`\\phi`, never observable in a detection probability.
    """

    frequency: float = 0.0
    delay: float = 0.0
    width: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        _check_positive("width", self.width)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        normalisation = (2 / (np.pi * self.width**2)) ** 0.25
        return normalisation * np.exp(-(((t - self.delay) / self.width) ** 2) - 1j * (self.frequency * t - self.phase))

    def intensity(self, t):
        return np.abs(self(t)) ** 2

    @property
    def support(self):
        """Interval outside of which the packet is analytically negligible."""
        return self.delay - TAIL_WIDTHS * self.width, self.delay + TAIL_WIDTHS * self.width

    def norm_squared(self):
        """:math:`\\int |\\zeta(t)|^2 dt` by quadrature, one for a valid mode."""
        return _integrate(self.intensity, *self.support).value


@dataclass(frozen=True)
class CwMode:
    """Continuous-wave mode :math:`\\zeta(t) = \\sqrt{F} e^{-i\\omega t} e^{i\\theta}` with flux :math:`F`."""

    flux: float = 1.0
    frequency: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        _check_nonnegative("flux", self.flux)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(self.flux) * np.exp(-1j * (self.frequency * t - self.phase))

    def intensity(self, t):
        return np.full(np.shape(t), float(self.flux))


@dataclass(frozen=True)
class PulsedReferenceMode:
    """Finite laser pulse that becomes a :class:`CwMode` of the same flux as ``width`` grows.

    .. math::

        \\zeta(t) = \\sqrt{F} e^{-t^2/w^2} e^{-i\\omega t} e^{i\\theta}
    """

    flux: float = 1.0
    width: float = 1e3
    frequency: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        _check_nonnegative("flux", self.flux)
        _check_positive("width", self.width)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(self.flux) * np.exp(-((t / self.width) ** 2) - 1j * (self.frequency * t - self.phase))

    def intensity(self, t):
        return np.abs(self(t)) ** 2


@dataclass(frozen=True)
class TimingParams:
    """Detection and wave-packet timing of a space-time interference experiment.

    ``t0`` is the first detection time and ``tau`` the detection-time difference. ``delta_tau`` is
    the delay between the packets, ``delta_omega`` their frequency difference and ``broadening`` the
    width :math:`\\delta\\omega` of an inhomogeneous frequency distribution.
    """

    t0: float = 0.0
    tau: float = 0.0
    delta_tau: float = 0.0
    delta_omega: float = 0.0
    broadening: float = 0.0

    def __post_init__(self):
        _check_nonnegative("broadening", self.broadening)


def legero_modes(delta_tau=0.0, delta_omega=0.0, omega=0.0):
    """Unit-width packets delayed by ``delta_tau`` and detuned by ``delta_omega``.

    .. math::

        \\zeta_{1,2}(t) = (2/\\pi)^{1/4} e^{-(t \\mp \\delta\\tau/2)^2 - i(\\omega \\mp \\Delta\\omega/2)t}
    """
    mode1 = GaussianMode(frequency=omega - delta_omega / 2, delay=delta_tau / 2, width=1.0)
    mode2 = GaussianMode(frequency=omega + delta_omega / 2, delay=-delta_tau / 2, width=1.0)
    return mode1, mode2


def _integrate(func, lower, upper, **kwargs):
    options = {"epsabs": QUADRATURE_EPSABS, "epsrel": QUADRATURE_EPSREL, "limit": QUADRATURE_LIMIT}
    options.update(kwargs)
    result = integrate.quad(func, lower, upper, full_output=1, **options)
    value, error = result[0], result[1]
    # quad appends a message to the output when it does not converge
    if len(result) > 3:
        raise ConvergenceError(f"Quadrature over [{lower}, {upper}] did not converge: {result[3]}", value, error)
    logger.debug("Quadrature over [%s, %s] gave %s with error estimate %s", lower, upper, value, error)
    return QuadratureResult(value, error)


def _elementwise(func, *args):
    """Apply a scalar ``func`` returning ``(value, error)`` to broadcast arguments."""
    arrays = np.broadcast_arrays(*(np.asarray(arg, dtype=float) for arg in args))
    values = np.empty(arrays[0].shape)
    errors = np.empty(arrays[0].shape)
    for index in np.ndindex(values.shape):
        values[index], errors[index] = func(*(float(array[index]) for array in arrays))
    if values.ndim == 0:
        return float(values), float(errors)
    return values, errors


def _t0_window(tau, centres, width):
    """Detection times ``t0`` for which ``t0`` or ``t0 + tau`` lies within ten widths of a packet."""
    return min(centres) - max(tau, 0) - TAIL_WIDTHS * width, max(centres) - min(tau, 0) + TAIL_WIDTHS * width


def _check_method(method):
    if method not in {"closed", "quadrature"}:
        raise ValueError(f"method must be 'closed' or 'quadrature', not {method!r}")


def _finish(value, error, return_error):
    if return_error:
        return value, error
    return value


def hom_joint_density(t0, tau, mode1, mode2):
    """Joint detection density of a single photon in each input mode.

    .. math::

        P^{(HOM)}_{1_1, 1_2}(t_0, \\tau) =
        \\frac{1}{4}|\\zeta_1(t_0+\\tau)\\zeta_2(t_0) - \\zeta_2(t_0+\\tau)\\zeta_1(t_0)|^2

    The density vanishes at :math:`\\tau = 0` for any pair of mode functions.

    Examples
    --------
    >>> mode1, mode2 = legero_modes(delta_tau=0.5, delta_omega=2)
    >>> float(hom_joint_density(0.3, 0, mode1, mode2))
    0.0
    """
    t0 = np.asarray(t0, dtype=float)
    amplitude = mode1(t0 + tau) * mode2(t0) - mode2(t0 + tau) * mode1(t0)
    return 0.25 * np.abs(amplitude) ** 2


def hom_product_density(t0, tau, mode1, mode2):
    """Joint detection density without two-photon interference (distinguishable or phase-averaged photons).

    .. math::

        \\frac{1}{4}\\left(P_1(t_0+\\tau)P_2(t_0) + P_2(t_0+\\tau)P_1(t_0)\\right)
    """
    t0 = np.asarray(t0, dtype=float)
    return 0.25 * (
        mode1.intensity(t0 + tau) * mode2.intensity(t0) + mode2.intensity(t0 + tau) * mode1.intensity(t0)
    )


def _hom_total_closed(tau, delta_tau, delta_omega):
    # cosh(2 tau delta_tau) exp(-tau^2 - delta_tau^2) written without overflow
    symmetric = 0.5 * (np.exp(-((tau - delta_tau) ** 2)) + np.exp(-((tau + delta_tau) ** 2)))
    return (symmetric - np.cos(delta_omega * tau) * np.exp(-(tau**2 + delta_tau**2))) / (2 * np.sqrt(np.pi))


def _hom_total_quadrature(tau, delta_tau, delta_omega):
    mode1, mode2 = legero_modes(delta_tau, delta_omega)
    lower, upper = _t0_window(tau, (mode1.delay, mode2.delay), 1.0)
    return _integrate(lambda t0: hom_joint_density(t0, tau, mode1, mode2), lower, upper)


def hom_total_vs_tau(tau, delta_tau=0.0, delta_omega=0.0, method="closed", return_error=False):
    """Coincidence density as a function of the detection-time difference, integrated over ``t0``.

    .. math::

        P(\\tau) = \\frac{\\cosh(2\\tau\\,\\delta\\tau) - \\cos(\\Delta\\omega\\,\\tau)}{2\\sqrt{\\pi}}
        e^{-(\\tau^2 + \\delta\\tau^2)}

    Parameters
    ----------
    tau : float or array-like
        Detection-time difference in units of the packet width.
    delta_tau : float or array-like
        Delay between the packets.
    delta_omega : float or array-like
        Frequency difference between the packets.
    method : {"closed", "quadrature"}
        Evaluate the closed form or integrate :func:`hom_joint_density` over ``t0``.
    return_error : bool
        If ``True``, also return the error estimate (zero for the closed form).

    Returns
    -------
    float or np.ndarray
        The density, and its error estimate if ``return_error=True``.

    Raises
    ------
    ConvergenceError
        If the quadrature does not converge. The exception carries the achieved error estimate.

    Examples
    --------
    >>> float(hom_total_vs_tau(0.0, delta_tau=1.0, delta_omega=3.0))
    0.0
    """
    _check_method(method)
    if method == "closed":
        value = _hom_total_closed(np.asarray(tau, dtype=float), delta_tau, delta_omega)
        return _finish(value, np.zeros_like(value), return_error)

    value, error = _elementwise(_hom_total_quadrature, tau, delta_tau, delta_omega)
    return _finish(value, error, return_error)


def _broadening_weight(delta_omega, broadening):
    return np.exp(-((delta_omega / broadening) ** 2)) / (broadening * np.sqrt(np.pi))


def _hom_total_broadened_quadrature(delta_tau, broadening):
    inner_errors = [0.0]

    def averaged_cosine(tau):
        # Average of cos(delta_omega * tau) over the Gaussian frequency distribution
        if broadening == 0 or tau == 0:
            return 1.0
        result = _integrate(
            lambda delta_omega: 2 * _broadening_weight(delta_omega, broadening),
            0,
            TAIL_WIDTHS * broadening,
            weight="cos",
            wvar=tau,
        )
        inner_errors.append(result.error)
        return result.value

    def integrand(tau):
        symmetric = 0.5 * (np.exp(-((tau - delta_tau) ** 2)) + np.exp(-((tau + delta_tau) ** 2)))
        return (symmetric - averaged_cosine(tau) * np.exp(-(tau**2 + delta_tau**2))) / (2 * np.sqrt(np.pi))

    lower, upper = -abs(delta_tau) - TAIL_WIDTHS, abs(delta_tau) + TAIL_WIDTHS
    value, error = _integrate(integrand, lower, upper)
    return value, error + (upper - lower) * max(inner_errors)


def hom_total_broadened(delta_tau, broadening, method="closed", return_error=False):
    """Total coincidence probability with inhomogeneously broadened frequency difference.

    The frequency difference follows :math:`f(\\Delta\\omega) = e^{-(\\Delta\\omega/\\delta\\omega)^2} /
    (\\delta\\omega\\sqrt{\\pi})` and the result is integrated over all detection-time differences,

    .. math::

        P = \\int d\\tau \\int d\\Delta\\omega\\, f(\\Delta\\omega) P(\\tau, \\delta\\tau, \\Delta\\omega)
          = \\frac{1}{2} - \\frac{e^{-\\delta\\tau^2}}{\\sqrt{4 + \\delta\\omega^2}}.

    Parameters
    ----------
    delta_tau : float or array-like
        Delay between the packets.
    broadening : float or array-like
        Width :math:`\\delta\\omega \\geq 0` of the frequency distribution, zero for identical frequencies.
    method : {"closed", "quadrature"}
        Evaluate the closed form or the double integral.
    return_error : bool
        If ``True``, also return the error estimate.

    Examples
    --------
    >>> float(hom_total_broadened(0.0, 0.0))
    0.0
    """
    _check_method(method)
    if np.any(np.asarray(broadening) < 0):
        raise ValueError("The broadening must be non-negative")

    if method == "closed":
        value = 0.5 - np.exp(-np.asarray(delta_tau, dtype=float) ** 2) / np.sqrt(4 + np.asarray(broadening) ** 2)
        return _finish(value, np.zeros_like(value), return_error)

    value, error = _elementwise(_hom_total_broadened_quadrature, delta_tau, broadening)
    return _finish(value, error, return_error)


def fs_cs_joint_density(t0, tau, mode1, mode2, nbar):
    """Joint detection density for a single photon in mode 1 and a coherent state in mode 2.

    .. math::

        \\frac{1}{4}\\left(P_2(t_0)P_2(t_0+\\tau)\\bar{n}_2^2 +
        |\\zeta_1(t_0+\\tau)\\zeta_2(t_0) - \\zeta_2(t_0+\\tau)\\zeta_1(t_0)|^2 \\bar{n}_2\\right)

    The first (DC) term comes from two photons of the coherent state, it equals
    :math:`F^2\\bar{n}_2^2/4` for a :class:`CwMode`. The second term is the HOM interference of the
    single photon with one coherent-state photon.

    Parameters
    ----------
    t0, tau : float or array-like
        First detection time and detection-time difference.
    mode1 : GaussianMode
        Single-photon wave packet.
    mode2 : CwMode or PulsedReferenceMode
        Coherent-state mode.
    nbar : float
        Mean photon number :math:`\\bar{n}_2` of the coherent state.

    Returns
    -------
    FsCsDensity
        Named tuple with ``dc_term``, ``interference_term`` and ``total``.
    """
    nbar = _check_nonnegative("nbar", nbar)
    t0 = np.asarray(t0, dtype=float)
    dc_term = 0.25 * mode2.intensity(t0) * mode2.intensity(t0 + tau) * nbar**2
    interference_term = nbar * hom_joint_density(t0, tau, mode1, mode2)
    return FsCsDensity(dc_term, interference_term, dc_term + interference_term)


def fs_cs_interference_closed_form(t0, tau, mode1, mode2, nbar):
    """Interference term of :func:`fs_cs_joint_density` in explicit form.

    With :math:`s = t_0 - t_d`, :math:`\\tau_c` the width of ``mode1`` and
    :math:`\\Delta\\omega = \\omega_1 - \\omega_2`,

    .. math::

        \\frac{F\\bar{n}_2}{2}\\sqrt{\\frac{2}{\\pi\\tau_c^2}}\\, e^{-\\tau^2/2\\tau_c^2}
        e^{-2(s+\\tau/2)^2/\\tau_c^2}\\left[\\cosh\\left(\\frac{\\tau(2s+\\tau)}{\\tau_c^2}\\right)
        - \\cos(\\Delta\\omega\\,\\tau)\\right]

    Only defined for a :class:`GaussianMode` in mode 1 and a :class:`CwMode` in mode 2.
    """
    if not isinstance(mode1, GaussianMode) or not isinstance(mode2, CwMode):
        raise TypeError("The explicit form needs a GaussianMode in mode 1 and a CwMode in mode 2")
    nbar = _check_nonnegative("nbar", nbar)

    tau_c = mode1.width
    s = np.asarray(t0, dtype=float) - mode1.delay
    delta_omega = mode1.frequency - mode2.frequency
    prefactor = 0.5 * mode2.flux * nbar * np.sqrt(2 / (np.pi * tau_c**2))
    envelope = np.exp(-(tau**2) / (2 * tau_c**2)) * np.exp(-2 * (s + tau / 2) ** 2 / tau_c**2)
    return prefactor * envelope * (np.cosh(tau * (2 * s + tau) / tau_c**2) - np.cos(delta_omega * tau))


def _fs_cs_interference_quadrature(tau, mode1, mode2, nbar):
    lower, upper = _t0_window(tau, (mode1.delay,), mode1.width)
    return _integrate(lambda t0: fs_cs_joint_density(t0, tau, mode1, mode2, nbar).interference_term, lower, upper)


def fs_cs_total_vs_tau(tau, mode1, mode2, nbar, method="closed", return_error=False):
    """FS/CS coincidence probability as a function of the detection-time difference.

    .. math::

        \\frac{1}{4}F\\bar{n}_2^2 + \\frac{1}{2}F\\bar{n}_2
        \\left(1 - e^{-\\tau^2/2\\tau_c^2}\\cos(\\Delta\\omega\\,\\tau)\\right)

    The DC density :math:`F^2\\bar{n}_2^2/4` is constant in :math:`t_0` for a continuous-wave reference,
    and it enters the total accumulated over the mean photon spacing :math:`1/F`. The interference part
    is the integral of :func:`fs_cs_joint_density` over ``t0``, which is what ``method="quadrature"``
    evaluates. It vanishes at :math:`\\tau = 0` regardless of :math:`\\Delta\\omega` and tends to
    :math:`F\\bar{n}_2/2` for :math:`\\tau \\gg \\tau_c`.

    Parameters
    ----------
    tau : float or array-like
        Detection-time difference.
    mode1 : GaussianMode
        Single-photon wave packet of width :math:`\\tau_c`.
    mode2 : CwMode or PulsedReferenceMode
        Coherent-state mode, only ``method="quadrature"`` accepts a pulsed reference.
    nbar : float
        Mean photon number :math:`\\bar{n}_2`.
    method : {"closed", "quadrature"}
    return_error : bool
        If ``True``, also return the error estimate.
    """
    _check_method(method)
    nbar = _check_nonnegative("nbar", nbar)
    dc_part = 0.25 * mode2.flux * nbar**2

    if method == "closed":
        if not isinstance(mode2, CwMode):
            raise TypeError("The closed form needs a CwMode in mode 2, use method='quadrature' for pulses")
        tau = np.asarray(tau, dtype=float)
        delta_omega = mode1.frequency - mode2.frequency
        visibility = np.exp(-(tau**2) / (2 * mode1.width**2)) * np.cos(delta_omega * tau)
        value = dc_part + 0.5 * mode2.flux * nbar * (1 - visibility)
        return _finish(value, np.zeros_like(value), return_error)

    value, error = _elementwise(lambda t: _fs_cs_interference_quadrature(t, mode1, mode2, nbar), tau)
    return _finish(dc_part + value, error, return_error)


def _timing_arguments(func, timing):
    """The fields of ``timing`` that ``func`` takes as keyword arguments."""
    accepted = signature(func).parameters
    return {field.name: getattr(timing, field.name) for field in dataclasses.fields(timing) if field.name in accepted}


def sweep(func, grid, timing=None, **fixed):
    """Evaluate a closed form on a parameter grid and check every point by quadrature.

    Parameters
    ----------
    func : callable
        One of :func:`hom_total_vs_tau`, :func:`hom_total_broadened` or :func:`fs_cs_total_vs_tau`.
    grid : dict
        Maps parameter names to the values to sweep. All combinations are evaluated, the first
        parameter varies slowest.
    timing : TimingParams (optional)
        Timing of the experiment. Fields that ``func`` accepts and that are not swept are kept
        fixed at these values. Every grid point is validated as a :class:`TimingParams`.
    **fixed
        Other parameters that are kept fixed. Timing fields given here override ``timing``.

    Returns
    -------
    pd.DataFrame
        One row per grid point with the parameter values, the closed-form ``probability``, the
        ``estimated_error`` (largest of the quadrature error estimate and the distance between the
        closed form and the quadrature) and a ``status`` column that is ``"ok"`` or describes a
        failed quadrature.

    Examples
    --------
    >>> table = sweep(hom_total_vs_tau, {"tau": [-1.0, 0.0, 1.0]}, timing=TimingParams(delta_tau=1.0))
    >>> list(table.columns)
    ['tau', 'probability', 'estimated_error', 'status']
    """
    timing_fields = {field.name for field in dataclasses.fields(TimingParams)}
    timing = TimingParams() if timing is None else timing
    timing = dataclasses.replace(timing, **{name: fixed.pop(name) for name in list(fixed) if name in timing_fields})

    names = list(grid)
    rows = []
    for values in itertools.product(*(np.atleast_1d(grid[name]) for name in names)):
        parameters = dict(zip(names, (float(value) for value in values)))
        point = dataclasses.replace(timing, **{name: parameters[name] for name in names if name in timing_fields})
        arguments = {**_timing_arguments(func, point), **fixed, **parameters}

        probability = float(func(**arguments, method="closed"))
        try:
            quadrature, error = func(**arguments, method="quadrature", return_error=True)
        except ConvergenceError as e:
            logger.warning("Quadrature failed at %s: %s", parameters, e)
            rows.append({**parameters, "probability": probability, "estimated_error": e.error, "status": str(e)})
            continue
        estimated_error = max(float(error), abs(float(quadrature) - probability))
        rows.append({**parameters, "probability": probability, "estimated_error": estimated_error, "status": "ok"})

    return pd.DataFrame(rows, columns=[*names, "probability", "estimated_error", "status"])
