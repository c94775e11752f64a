# -*- coding: utf-8 -*-

from functools import wraps
from inspect import signature
from numbers import Integral, Real

import numpy as np


class ConvergenceError(ArithmeticError):
    """Raised when a quadrature or a series does not reach its target accuracy.

    Parameters
    ----------
    message : str
        Description of the failure.
    value : float
        Best estimate available when the evaluation stopped.
    error : float
        Achieved error estimate (or bound) for ``value``.
    """

    def __init__(self, message, value=np.nan, error=np.inf):
        super().__init__(message)
        self.value = value
        self.error = error


class TruncationError(ValueError):
    """Raised when a truncated Fock space misses more probability mass than allowed."""


class CutoffError(ValueError):
    """Raised when a photon-number state cannot be truncated within its tolerance."""


def is_iterable(x):
    """Check if variable is iterable

    Arguments
    ---------
    x
        Variable to check if is iterable

    Returns
    -------
    bool
        Whether ``x`` is iterable or not.
    """
    try:
        iter(x)
    except TypeError:
        return False
    else:
        return True


def _check_photon_number(name, value):
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise TypeError(f"{name} must be an integer photon number, not {type(value).__name__}")
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")
    return int(value)


def _check_probability(name, value):
    if not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number, not {type(value).__name__}")
    if not 0 <= value <= 1:
        raise ValueError(f"{name} must be in the interval [0, 1], got {value}")
    return float(value)


def _check_positive(name, value):
    if not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number, not {type(value).__name__}")
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return float(value)


def _check_tolerance(name, value):
    if not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number, not {type(value).__name__}")
    if not 0 < value < 1:
        raise ValueError(f"{name} must be in the open interval (0, 1), got {value}")
    return float(value)


def _check_nonnegative(name, value):
    if not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number, not {type(value).__name__}")
    if not value >= 0:
        raise ValueError(f"{name} must be non-negative, got {value}")
    return float(value)


def _check_is_argument(func, arg_name):
    sig = signature(func)
    if arg_name in sig.parameters:
        return
    raise ValueError(f"{arg_name} is not an argument of {func}")


def validate_photon_numbers(*arg_names):
    """Decorator that checks that the named arguments are non-negative integers.

    The check runs before the wrapped function is called, so functions further
    down (for example memoised kernels) can assume valid input.
    """

    def decorator(func):
        for arg_name in arg_names:
            _check_is_argument(func, arg_name)
        func_signature = signature(func)

        @wraps(func)
        def func2(*args, **kwargs):
            bound_arguments = func_signature.bind(*args, **kwargs)
            bound_arguments.apply_defaults()
            for arg_name in arg_names:
                value = bound_arguments.arguments[arg_name]
                bound_arguments.arguments[arg_name] = _check_photon_number(arg_name, value)

            return func(*bound_arguments.args, **bound_arguments.kwargs)

        return func2

    return decorator
