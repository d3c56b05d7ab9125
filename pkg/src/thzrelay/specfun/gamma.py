"""Complex log-gamma and the upper incomplete gamma function."""

import numpy as np
from scipy import special as sp


class PoleError(ValueError):
    """Raised when a gamma function is evaluated at one of its poles."""


def _is_nonpositive_integer(z):
    z = np.asarray(z)
    re = np.real(z)
    return (np.imag(z) == 0) & (re <= 0) & (re == np.round(re))


def log_gamma(z):
    """Principal branch of log Γ(z) for complex (or real) `z`.

    Accepts scalars or arrays. Raises :class:`PoleError` if any entry is a
    non-positive integer.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(_is_nonpositive_integer(z)):
        raise PoleError(f"log_gamma has a pole at {z[_is_nonpositive_integer(z)].ravel()[0].real:g}")
    out = sp.loggamma(z)
    return out[()] if out.ndim == 0 else out


def _gamma_cf(s, x, max_iter=500, eps=1e-16):
    # Modified Lentz evaluation of the continued fraction for Γ(s, x); any s, x >= ~1.
    tiny = 1e-300
    b = x + 1.0 - s
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for i in range(1, max_iter + 1):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < eps
        if done.all():
            break
    return np.exp(-x + s * np.log(x)) * h


def _gamma_recurrence(s, x):
    # Γ(s, x) for s <= 0 and small x: start in (0, 1] (or at E1 for integer s)
    # and step down with Γ(a, x) = (Γ(a+1, x) - x^a e^{-x}) / a.
    if s == np.round(s):
        val = sp.exp1(x)
        a = 0.0
    else:
        n = int(np.floor(-s)) + 1
        a = s + n
        val = sp.gammaincc(a, x) * sp.gamma(a)
    ex = np.exp(-x)
    while a > s + 0.5:
        a -= 1.0
        val = (val - x**a * ex) / a
    return val


def upper_incomplete_gamma(s, x):
    """Upper incomplete gamma function Γ(s, x) = ∫_x^∞ t^(s-1) e^(-t) dt.

    `s` is a real scalar of any sign; `x` may be an array with x >= 0.
    For s <= 0 the value at x = 0 is infinite and a ``ValueError`` is raised.
    """
    s = float(s)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("upper_incomplete_gamma requires x >= 0")
    if s > 0:
        out = sp.gammaincc(s, x) * sp.gamma(s)
        return out[()] if out.ndim == 0 else out
    if np.any(x == 0):
        raise ValueError(f"Γ(s, 0) diverges for s = {s} <= 0")
    flat = np.atleast_1d(x).ravel()
    out = np.empty_like(flat)
    big = flat >= 1.0
    if big.any():
        out[big] = _gamma_cf(s, flat[big])
    if (~big).any():
        out[~big] = _gamma_recurrence(s, flat[~big])
    out = out.reshape(x.shape)
    return out[()] if out.ndim == 0 else out
