# -*- coding: utf-8 -*-

"""Scattering amplitudes for Fock states at a lossless two-port beamsplitter.

The beamsplitter is described by the real scattering matrix

.. math::

    S = \\begin{bmatrix} t & -r \\\\ r & t \\end{bmatrix},

where :math:`S_{ij}` is the amplitude for a photon entering port :math:`j` to leave through
port :math:`i`. An input mode-1 photon therefore becomes :math:`t b_1^\\dagger + r b_2^\\dagger`
and an input mode-2 photon becomes :math:`-r b_1^\\dagger + t b_2^\\dagger`.

At the balanced beamsplitter every amplitude is computed exactly (see :class:`ExactAmplitude`),
so destructive interference can be decided without floating point tolerances.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational, Real

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sparse

from ._module_utils import _check_photon_number, validate_photon_numbers

__all__ = [
    "ExactAmplitude",
    "ScatteringMatrix",
    "ScatteringDiagram",
    "MirrorPairReport",
    "bs_amplitude",
    "enumerate_diagrams",
    "output_state",
    "mirror_pair_check",
    "bs_unitary_oracle",
]

logger = logging.getLogger(__name__)

_UNITARITY_TOLERANCE = 1e-12
_BALANCED_AMPLITUDE = 1 / math.sqrt(2)
AMPLITUDE_CACHE_SIZE = 2**16


def _rational_sqrt(x):
    """Exact square root of a non-negative rational, or ``None`` if it is irrational."""
    x = Fraction(x)
    if x < 0:
        return None
    numerator_root = math.isqrt(x.numerator)
    denominator_root = math.isqrt(x.denominator)
    if numerator_root**2 == x.numerator and denominator_root**2 == x.denominator:
        return Fraction(numerator_root, denominator_root)
    return None


def _log_abs(x):
    return math.log(abs(x.numerator)) - math.log(x.denominator)


@dataclass(frozen=True, eq=False)
class ExactAmplitude:
    """Exact real number of the form :math:`q \\, 2^{-h/2} \\sqrt{\\rho}`.

    ``q`` is an arbitrary-precision rational, ``h`` a non-negative integer and the radicand
    :math:`\\rho` a positive rational (one unless square-root factorial normalisations are
    involved). Two amplitudes can be added exactly whenever the ratio of their radical parts
    is rational, which is always the case for the diagrams that make up a single scattering
    amplitude.

    Examples
    --------
    >>> half = ExactAmplitude(1, 1) * ExactAmplitude(1, 1)
    >>> half == ExactAmplitude(Fraction(1, 2))
    True
    >>> (ExactAmplitude(1, 2) - ExactAmplitude(1, 2)).is_zero()
    True
    """

    q: Fraction = Fraction(0)
    h: int = 0
    radicand: Fraction = Fraction(1)

    def __post_init__(self):
        q = Fraction(self.q)
        h = _check_photon_number("h", self.h)
        radicand = Fraction(self.radicand)
        if radicand <= 0:
            raise ValueError(f"The radicand must be positive, got {radicand}")

        root = _rational_sqrt(radicand)
        if root is not None and radicand != 1:
            q, radicand = q * root, Fraction(1)

        object.__setattr__(self, "q", q)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "radicand", radicand)

    def is_zero(self):
        return self.q == 0

    def sign(self):
        return (self.q > 0) - (self.q < 0)

    def abs2(self):
        """Squared magnitude as an exact rational."""
        return self.q * self.q * self.radicand / 2**self.h

    def as_fraction(self):
        """Return the value as a :class:`fractions.Fraction` if it is rational, otherwise ``None``."""
        root = _rational_sqrt(self.radicand / 2**self.h)
        if root is None:
            return None
        return self.q * root

    def __float__(self):
        if self.is_zero():
            return 0.0
        try:
            value = float(self.q) * 2.0 ** (-self.h / 2) * math.sqrt(float(self.radicand))
        except OverflowError:
            value = math.inf

        if value == 0.0 or math.isinf(value):
            log_value = _log_abs(self.q) - 0.5 * self.h * math.log(2) + 0.5 * _log_abs(self.radicand)
            value = self.sign() * math.exp(log_value)
        return value

    def __bool__(self):
        return not self.is_zero()

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExactAmplitude):
            return other
        if isinstance(other, Rational):
            return ExactAmplitude(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other

        if other.h == self.h and other.radicand == self.radicand:
            return ExactAmplitude(self.q + other.q, self.h, self.radicand)

        # other = scale * (radical part of self)
        scale = _rational_sqrt(other.radicand / self.radicand * Fraction(2) ** (self.h - other.h))
        if scale is None:
            raise ArithmeticError(f"Cannot add {self!r} and {other!r} exactly, their radical parts are incommensurate")
        return ExactAmplitude(self.q + other.q * scale, self.h, self.radicand)

    __radd__ = __add__

    def __neg__(self):
        return ExactAmplitude(-self.q, self.h, self.radicand)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactAmplitude(self.q * other.q, self.h + other.h, self.radicand * other.radicand)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        exponent = _check_photon_number("exponent", exponent)
        return ExactAmplitude(self.q**exponent, self.h * exponent, self.radicand**exponent)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.sign() == other.sign() and self.abs2() == other.abs2()

    def __hash__(self):
        return hash((self.sign(), self.abs2()))

    def __repr__(self):
        radicand = "" if self.radicand == 1 else f", radicand={self.radicand}"
        return f"ExactAmplitude(q={self.q}, h={self.h}{radicand})"

    def __str__(self):
        value = self.as_fraction()
        if value is not None:
            return str(value)
        out = str(self.q)
        if self.h:
            out += f"*2^(-{self.h}/2)"
        if self.radicand != 1:
            out += f"*sqrt({self.radicand})"
        return out


@dataclass(frozen=True)
class ScatteringMatrix:
    """Real lossless beamsplitter, :math:`S_{11}=S_{22}=t`, :math:`S_{21}=r` and :math:`S_{12}=-r`.

    Use :meth:`balanced` for the 50:50 beamsplitter, which is the only one evaluated in exact
    arithmetic. Any other real ``t`` and ``r`` with :math:`t^2+r^2=1` is evaluated in floating point.

    Examples
    --------
    >>> S = ScatteringMatrix.balanced()
    >>> S.exact
    True
    >>> S.element(1, 2)
    ExactAmplitude(q=-1, h=1)
    """

    t: float
    r: float
    exact: bool = False

    def __post_init__(self):
        for name in ("t", "r"):
            if not isinstance(getattr(self, name), Real):
                raise TypeError(f"{name} must be a real number, not {type(getattr(self, name)).__name__}")

        residual = abs(self.t**2 + self.r**2 - 1)
        if residual > _UNITARITY_TOLERANCE:
            raise ValueError(f"t² + r² must equal one (within {_UNITARITY_TOLERANCE}), got t={self.t}, r={self.r}")
        if self.exact and not (self.t == self.r == _BALANCED_AMPLITUDE):
            raise ValueError("Only the balanced beamsplitter can be represented exactly")

    @classmethod
    def balanced(cls):
        return cls(_BALANCED_AMPLITUDE, _BALANCED_AMPLITUDE, exact=True)

    @classmethod
    def from_transmission(cls, t):
        """Beamsplitter with transmission amplitude ``t`` and non-negative reflection amplitude."""
        if not 0 <= t <= 1:
            raise ValueError(f"The transmission amplitude must be in [0, 1], got {t}")
        if t == _BALANCED_AMPLITUDE:
            return cls.balanced()
        return cls(float(t), math.sqrt(1 - t * t))

    def element(self, i, j):
        """Matrix element :math:`S_{ij}` (one-based indices, like the usual notation)."""
        if (i, j) not in {(1, 1), (1, 2), (2, 1), (2, 2)}:
            raise ValueError(f"Invalid matrix element S{i}{j}")
        sign = -1 if (i, j) == (1, 2) else 1
        if self.exact:
            return ExactAmplitude(sign, 1)
        value = self.t if i == j else self.r
        return sign * value

    @property
    def matrix(self):
        return np.array([[self.t, -self.r], [self.r, self.t]])

    def unitarity_residual(self):
        """Largest deviation of :math:`S S^T` from the identity."""
        S = self.matrix
        return float(np.max(np.abs(S @ S.T - np.eye(2))))


def _balanced_or(S):
    if S is None:
        return ScatteringMatrix.balanced()
    if not isinstance(S, ScatteringMatrix):
        raise TypeError(f"S must be a ScatteringMatrix, not {type(S).__name__}")
    return S


def _admissible_k(n, m, n_a):
    return range(max(0, n_a - m), min(n, n_a) + 1)


def _normalisation(n, m, n_a, n_b):
    return Fraction(math.factorial(n_a) * math.factorial(n_b), math.factorial(n) * math.factorial(m))


@dataclass(frozen=True)
class ScatteringDiagram:
    """One term of a Fock scattering amplitude.

    ``k`` of the ``n`` mode-1 photons are transmitted into output mode 1, the remaining
    ``n - k`` are reflected into output mode 2. Of the ``m`` mode-2 photons, ``n_a - k`` are
    reflected into output mode 1 and the rest are transmitted. The amplitude is

    .. math::

        A_k = C_k \\sqrt{\\frac{N_a!\\,N_b!}{n!\\,m!}}\\,
              S_{11}^{k}\\, S_{21}^{n-k}\\, S_{12}^{N_a-k}\\, S_{22}^{m-N_a+k},

    with :math:`C_k = \\binom{n}{k}\\binom{m}{N_a-k}`.
    """

    k: int
    n: int
    m: int
    n_a: int
    n_b: int
    combinatorial_factor: Fraction
    normalisation: Fraction

    def __post_init__(self):
        if self.n_a + self.n_b != self.n + self.m:
            raise ValueError("A scattering diagram must conserve the photon number")
        if min(self.exponents.values()) < 0:
            raise ValueError(f"Diagram k={self.k} is not admissible for {self.n, self.m} -> {self.n_a, self.n_b}")

    @property
    def exponents(self):
        """Exponent of each matrix element, keyed by ``"S11"``, ``"S21"``, ``"S12"`` and ``"S22"``."""
        return {
            "S11": self.k,
            "S21": self.n - self.k,
            "S12": self.n_a - self.k,
            "S22": self.m - self.n_a + self.k,
        }

    def amplitude(self, S=None):
        """Evaluate the diagram, exactly for the balanced beamsplitter and in floating point otherwise."""
        S = _balanced_or(S)
        if S.exact:
            value = ExactAmplitude(self.combinatorial_factor, 0, self.normalisation)
            for name, exponent in self.exponents.items():
                value = value * S.element(int(name[1]), int(name[2])) ** exponent
            return value

        value = float(self.combinatorial_factor) * math.sqrt(self.normalisation)
        for name, exponent in self.exponents.items():
            value *= S.element(int(name[1]), int(name[2])) ** exponent
        return value


@validate_photon_numbers("n", "m", "n_a", "n_b")
def enumerate_diagrams(n, m, n_a, n_b):
    """List the scattering diagrams for :math:`|n, m\\rangle \\to |N_a, N_b\\rangle` in ascending ``k``.

    Parameters
    ----------
    n, m : int
        Input photon numbers in mode 1 and mode 2.
    n_a, n_b : int
        Output photon numbers in mode 1 and mode 2. Must satisfy ``n_a + n_b == n + m``.

    Returns
    -------
    list[ScatteringDiagram]

    Examples
    --------
    >>> [diagram.k for diagram in enumerate_diagrams(1, 1, 1, 1)]
    [0, 1]
    >>> [diagram.k for diagram in enumerate_diagrams(1, 0, 1, 0)]
    [1]
    """
    if n_a + n_b != n + m:
        raise ValueError(f"Output photon number {n_a + n_b} differs from the input photon number {n + m}")

    normalisation = _normalisation(n, m, n_a, n_b)
    return [
        ScatteringDiagram(
            k=k,
            n=n,
            m=m,
            n_a=n_a,
            n_b=n_b,
            combinatorial_factor=Fraction(math.comb(n, k) * math.comb(m, n_a - k)),
            normalisation=normalisation,
        )
        for k in _admissible_k(n, m, n_a)
    ]


@lru_cache(maxsize=AMPLITUDE_CACHE_SIZE)
def _bs_amplitude(n, m, n_a, n_b, S):
    if n_a + n_b != n + m:
        return ExactAmplitude(0) if S.exact else 0.0

    if S.exact:
        # Every diagram carries 2^(-(n+m)/2) and the sign (-1)^(n_a - k) of the reflected mode-2 photons
        q = sum((-1) ** (n_a - k) * math.comb(n, k) * math.comb(m, n_a - k) for k in _admissible_k(n, m, n_a))
        return ExactAmplitude(q, n + m, _normalisation(n, m, n_a, n_b))

    terms = (
        (-1) ** (n_a - k)
        * math.comb(n, k)
        * math.comb(m, n_a - k)
        * S.t ** (m - n_a + 2 * k)
        * S.r ** (n + n_a - 2 * k)
        for k in _admissible_k(n, m, n_a)
    )
    log_normalisation = math.lgamma(n_a + 1) + math.lgamma(n_b + 1) - math.lgamma(n + 1) - math.lgamma(m + 1)
    return math.fsum(terms) * math.exp(0.5 * log_normalisation)


@validate_photon_numbers("n", "m", "n_a", "n_b")
def bs_amplitude(n, m, n_a, n_b, S=None):
    """Scattering amplitude :math:`\\langle N_a, N_b | U | n, m \\rangle`.

    The amplitude is the sum of the scattering diagrams listed by :func:`enumerate_diagrams`.

    Parameters
    ----------
    n, m : int
        Input photon numbers in mode 1 and mode 2.
    n_a, n_b : int
        Output photon numbers in mode 1 and mode 2.
    S : ScatteringMatrix (optional)
        Beamsplitter, the balanced beamsplitter is used if not given.

    Returns
    -------
    ExactAmplitude or float
        Exact amplitude for the balanced beamsplitter, a float otherwise. The amplitude is
        zero whenever ``n_a + n_b != n + m``.

    Examples
    --------
    The Hong-Ou-Mandel effect: two photons never leave through different ports

    >>> bs_amplitude(1, 1, 1, 1).is_zero()
    True

    The same holds for any odd-odd input on the coincident output

    >>> bs_amplitude(3, 5, 4, 4).is_zero()
    True
    >>> bs_amplitude(2, 2, 2, 2).is_zero()
    False
    """
    return _bs_amplitude(n, m, n_a, n_b, _balanced_or(S))


@validate_photon_numbers("n", "m")
def output_state(n, m, S=None):
    """Amplitudes for all output states of the Fock input :math:`|n, m\\rangle`.

    Returns
    -------
    dict
        Maps ``(n_a, n_b)`` to :func:`bs_amplitude` for every ``n_a + n_b == n + m``.
    """
    S = _balanced_or(S)
    total = n + m
    return {(n_a, total - n_a): bs_amplitude(n, m, n_a, total - n_a, S) for n_a in range(total + 1)}


@dataclass(frozen=True)
class MirrorPairReport:
    """Mirror-image diagram pairs on the coincident output :math:`|N, N\\rangle`, :math:`N=(n+m)/2`.

    ``pairs`` holds ``(k, n - k, A_k + A_{n-k})`` tuples for ``k < n - k`` and ``unpaired_middle``
    the amplitude of the ``k = n/2`` diagram when ``n`` is even.
    """

    n: int
    m: int
    pairs: tuple
    pair_amplitudes: tuple
    unpaired_middle: object = None

    @property
    def cancels(self):
        """Whether every pair sums to zero and there is no unpaired diagram."""
        return self.unpaired_middle is None and all(_is_zero(pair_sum) for _, _, pair_sum in self.pairs)

    def verdicts(self):
        """Describe every pair as ``"cancel"``, ``"constructive"`` or ``"destructive"``."""
        verdicts = []
        for (k, k_mirror, pair_sum), (amplitude, mirror_amplitude) in zip(self.pairs, self.pair_amplitudes):
            if _is_zero(pair_sum):
                verdicts.append((k, k_mirror, "cancel"))
            elif np.sign(float(amplitude)) == np.sign(float(mirror_amplitude)):
                verdicts.append((k, k_mirror, "constructive"))
            else:
                verdicts.append((k, k_mirror, "destructive"))
        return verdicts


def _is_zero(value):
    if isinstance(value, ExactAmplitude):
        return value.is_zero()
    return value == 0


@validate_photon_numbers("n", "m")
def mirror_pair_check(n, m, S=None):
    """Pair the diagrams ``k`` and ``n - k`` of the coincident output and sum each pair.

    For odd ``n`` and ``m`` at the balanced beamsplitter every pair cancels exactly, for even
    ``n`` and ``m`` the pairs add constructively and the middle diagram ``k = n/2`` survives.

    Parameters
    ----------
    n, m : int
        Input photon numbers with ``n <= m`` and ``n + m`` even.
    S : ScatteringMatrix (optional)
        Beamsplitter, the balanced beamsplitter is used if not given.

    Returns
    -------
    MirrorPairReport

    Examples
    --------
    >>> report = mirror_pair_check(3, 5)
    >>> [(k, k_mirror) for k, k_mirror, _ in report.pairs]
    [(0, 3), (1, 2)]
    >>> report.cancels
    True
    >>> mirror_pair_check(2, 2).unpaired_middle is None
    False
    """
    if (n + m) % 2:
        raise ValueError(f"The input |{n}, {m}> has an odd photon number, so there is no coincident output state")
    if n > m:
        raise ValueError(f"The mode-1 photon number must not exceed the mode-2 photon number, got n={n} > m={m}")
    S = _balanced_or(S)

    coincident = (n + m) // 2
    amplitudes = {diagram.k: diagram.amplitude(S) for diagram in enumerate_diagrams(n, m, coincident, coincident)}

    pairs = []
    pair_amplitudes = []
    for k in range(0, (n + 1) // 2):
        pairs.append((k, n - k, amplitudes[k] + amplitudes[n - k]))
        pair_amplitudes.append((amplitudes[k], amplitudes[n - k]))

    unpaired_middle = amplitudes[n // 2] if n % 2 == 0 else None
    return MirrorPairReport(
        n=n, m=m, pairs=tuple(pairs), pair_amplitudes=tuple(pair_amplitudes), unpaired_middle=unpaired_middle
    )


@lru_cache(maxsize=32)
def _ladder_operators(cutoff):
    """Sparse annihilation operators of two modes truncated at ``cutoff`` photons each."""
    annihilation = sparse.diags(
        np.sqrt(np.arange(1, cutoff + 1)), offsets=1, shape=(cutoff + 1, cutoff + 1), format="csr"
    )
    identity = sparse.identity(cutoff + 1, format="csr")
    return sparse.kron(annihilation, identity, format="csr"), sparse.kron(identity, annihilation, format="csr")


@validate_photon_numbers("n", "m")
def bs_unitary_oracle(n, m, S=None):
    """Brute-force amplitudes for :math:`|n, m\\rangle` from the matrix exponential of the generator.

    The beamsplitter unitary is :math:`U = \\exp[\\theta (a_2^\\dagger a_1 - a_1^\\dagger a_2)]` with
    :math:`\\theta = \\operatorname{atan2}(r, t)`, exponentiated densely on the two-mode Fock space
    truncated at ``n + m`` photons per mode. The generator conserves the total photon number, so the
    truncation is exact for this input.

    Returns
    -------
    np.ndarray
        Matrix with element ``[n_a, n_b]`` equal to :math:`\\langle N_a, N_b | U | n, m\\rangle`.
    """
    S = _balanced_or(S)
    cutoff = n + m
    a1, a2 = _ladder_operators(cutoff)
    theta = math.atan2(S.r, S.t)
    generator = theta * (a2.T @ a1 - a1.T @ a2)

    logger.debug("Exponentiating beamsplitter generator of dimension %s", generator.shape[0])
    unitary = sla.expm(generator.toarray())
    column = unitary[:, n * (cutoff + 1) + m]
    return column.reshape(cutoff + 1, cutoff + 1)
