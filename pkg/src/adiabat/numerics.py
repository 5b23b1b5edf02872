"""Shared root-bracketing helpers."""

from __future__ import annotations

from typing import Callable

from scipy.optimize import brentq


def brent_root(f: Callable[[float], float], lo: float, hi: float) -> float:
    """Brent's method on a sign-change interval, driven to machine precision."""
    return float(brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200))


def expand_bracket(
    f: Callable[[float], float],
    guess: float,
    lo: float,
    hi: float,
    first_step: float | None = None,
) -> tuple[float, float] | None:
    """Search geometrically outward from ``guess`` for a sign change of ``f``.

    Expansion is clipped to [lo, hi]; returns None when the whole interval is
    single-signed at the probed points.
    """
    guess = min(max(guess, lo), hi)
    step = first_step if first_step is not None else (hi - lo) / 64.0
    a = b = guess
    fa = fb = f(guess)
    if fa == 0.0:
        return (guess, guess)
    while a > lo or b < hi:
        if a > lo:
            a = max(a - step, lo)
            fa_new = f(a)
            if fa_new == 0.0 or (fa_new < 0.0) != (fb < 0.0):
                return (a, b)
            fa = fa_new
        if b < hi:
            b = min(b + step, hi)
            fb_new = f(b)
            if fb_new == 0.0 or (fa < 0.0) != (fb_new < 0.0):
                return (a, b)
            fb = fb_new
        step *= 1.8
    if (fa < 0.0) != (fb < 0.0):
        return (a, b)
    return None
