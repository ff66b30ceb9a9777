"""Imaginary error function and Dawson's integral.

erfi(x) = (2/sqrt(pi)) * integral_0^x exp(t^2) dt overflows doubles near
x = 26.6, so anything that only needs e^{-x^2} erfi(x) should use
``dawson`` directly: D(x) = e^{-x^2} integral_0^x e^{t^2} dt.
"""

import math

import numpy as np
from scipy import special as _sp

ERFI_MAX_ARG = 26.0


def dawson(x):
    """Dawson's integral D(x); odd, total on the reals."""
    v = _sp.dawsn(np.asarray(x, dtype=float))
    return float(v) if np.ndim(v) == 0 else v


def erfi(x):
    """erfi(x) = 2/sqrt(pi) * e^{x^2} * D(x).

    Raises OverflowError for |x| > 26, where the result leaves double range.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > ERFI_MAX_ARG):
        raise OverflowError(f"erfi argument beyond +/-{ERFI_MAX_ARG}: result overflows double")
    v = (2.0 / math.sqrt(math.pi)) * np.exp(x * x) * _sp.dawsn(x)
    return float(v) if np.ndim(v) == 0 else v
