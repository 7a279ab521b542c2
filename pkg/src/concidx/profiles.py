"""Named counting-function profiles for measure generation.

All profiles vanish at r = 1 and are nondecreasing, so the generated
measures satisfy the n(1) = 0 normalization by construction.
"""

from __future__ import annotations

import math


def make_profile(kind: str, scale: float = 1.0, power: float = 1.0):
    """Return (callable, canonical text) for a named profile.

    * ``zero``: identically 0 (empty measure);
    * ``exp``: scale * (e^r - e), the infinite-order workhorse;
    * ``exp_power``: scale * (e^(r^power) - e), steeper growth classes.
    """
    if kind == "zero":
        return (lambda r: 0.0), "zero"
    if kind == "exp":
        fn = lambda r, a=float(scale): a * (math.exp(r) - math.e)
        return fn, f"exp scale={scale!r}"
    if kind == "exp_power":
        q = float(power)
        if q < 1.0:
            raise ValueError("exp_power needs power >= 1")
        fn = lambda r, a=float(scale), q=q: a * (math.exp(r**q) - math.e)
        return fn, f"exp_power scale={scale!r} power={power!r}"
    raise ValueError(f"unknown profile kind: {kind!r}")
