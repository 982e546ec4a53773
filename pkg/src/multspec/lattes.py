"""Degree-4 maps induced by doubling on varying elliptic curves.

Doubling the x-coordinate on y**2 = 4x**3 - g2*x - g3 induces a degree-4
rational map on the projective line.  Varying (g2, g3) across curves with
distinct j-invariants moves the curve's complex structure while leaving
every cycle multiplier unchanged, so the family is the canonical
isospectral-but-nonconjugate witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularCurve
from .forms import HomForm2
from .maps import RationalMap, make_map

DISC_TOL = 1e-6
J_SEPARATION = 1e-3


@dataclass(frozen=True)
class WeierstrassParams:
    g2: complex
    g3: complex


def discriminant(p: WeierstrassParams) -> complex:
    return p.g2**3 - 27.0 * p.g3**2


def _require_smooth(p: WeierstrassParams):
    disc = discriminant(p)
    if abs(disc) <= DISC_TOL:
        raise SingularCurve(f"|discriminant| = {abs(disc):.3e} <= {DISC_TOL:g}")
    return disc


def j_invariant(p: WeierstrassParams) -> complex:
    """1728 * g2**3 / (g2**3 - 27*g3**2); separates non-isomorphic curves."""
    disc = _require_smooth(p)
    return 1728.0 * p.g2**3 / disc


def lattes_mult2(p: WeierstrassParams) -> RationalMap:
    """The degree-4 map x -> x(2P) on the curve y**2 = 4x**3 - g2*x - g3.

    Tangent-line doubling of the x-coordinate gives
    (x**4 + (g2/2)x**2 + 2*g3*x + g2**2/16) / (4x**3 - g2*x - g3).
    """
    _require_smooth(p)
    g2, g3 = complex(p.g2), complex(p.g3)
    num = HomForm2.from_coeffs([g2 * g2 / 16.0, 2.0 * g3, g2 / 2.0, 0.0, 1.0])
    den = HomForm2.from_coeffs([-g3, -g2, 0.0, 4.0, 0.0])
    return make_map(num, den)


def family_sample(k: int, seed: int):
    """k smooth parameter points with pairwise well-separated j-invariants."""
    if k < 2:
        raise ValueError("need k >= 2")
    rng = np.random.default_rng(seed)
    chosen = []
    js = []
    while len(chosen) < k:
        g2 = complex(rng.normal(), rng.normal())
        g3 = complex(rng.normal(), rng.normal())
        cand = WeierstrassParams(g2, g3)
        if abs(discriminant(cand)) <= DISC_TOL:
            continue
        j = j_invariant(cand)
        if any(abs(j - other) <= J_SEPARATION for other in js):
            continue
        chosen.append(cand)
        js.append(j)
    return chosen
