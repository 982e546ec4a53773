"""Multiplier spectra of periodic cycles and their symmetric-function coordinates.

The n-th spectrum layer is the multiset of d(f^n) over the points of formal
exact period n, sized exactly nu(d, n).  Elementary symmetric polynomials
turn a layer into permutation-invariant coordinates; applying the same
construction to reciprocal multipliers gives the conjugacy fingerprint that
is defined away from maps with a superattracting cycle in the window.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .dynatomic import dynatomic_form, nu_count
from .errors import (
    CycleBroken,
    NoConvergence,
    NotDivisible,
    NotPeriodic,
    OrbitMatchFailed,
    ShapeMismatch,
    Superattracting,
)
from .forms import DOUBLE, EXTENDED, prec_context
from .maps import ProjPoint, RationalMap, apply_map, map_to_precision, multiplier_along_cycle

# Failures that an extended-precision rerun of a layer can plausibly cure.
_RETRYABLE = (OrbitMatchFailed, NoConvergence, CycleBroken, NotDivisible)

# |multiplier| at or below this counts as superattracting (membership in the
# excluded locus); configurable because the locus is numerically fuzzy.
SUPER_TOL = 1e-9

# Tolerance on |lambda**r - 1| when testing for a primitive r-th root of unity.
UNITY_TOL = 1e-8

# Largest root-of-unity order scanned for the second formal period.
UNITY_ORDER_MAX = 24

# Projective tolerance when matching a root's image to another root.
ORBIT_TOL = 1e-6

# Double-precision layers whose root radii exceed this are recomputed at
# extended precision; multipliers from less certain roots cannot honor the
# 1e-8 invariance budget.
RADIUS_ESCALATE = 1e-10

# Largest image-to-next-root mismatch a double-precision layer may show.
# Forward error of the dynatomic division displaces roots without touching
# their certified radii, but it cannot hide from the orbit geometry.
STEP_TRUST = 1e-9


class _LowConfidenceRoots(NoConvergence):
    """Internal: root data too uncertain for trustworthy multipliers."""


@dataclass(frozen=True)
class CycleRecord:
    """One periodic cycle: ordered points, multiplier, and its formal periods."""

    points: tuple
    multiplier: complex
    multiplicity: int
    formal_periods: frozenset

    @property
    def minimal_period(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class SpectrumLayer:
    n: int
    multipliers: tuple


@dataclass(frozen=True)
class SigmaVector:
    values: tuple


@dataclass(frozen=True)
class TauVector:
    n: int
    m: int
    segments: tuple  # one SigmaVector per period in [n, m]

    def entries(self):
        for seg in self.segments:
            yield from seg.values


def _sort_key(z):
    return (round(float(z.real), 14), round(float(z.imag), 14))


def elementary_symmetric(values):
    """(sigma_1, ..., sigma_N) by incremental expansion of prod(T + v)."""
    vals = list(values)
    one = mpmath.mpc(1) if vals and isinstance(vals[0], mpmath.mpc) else 1 + 0j
    e = [one]
    for v in vals:
        e.append(e[-1] * 0)
        for i in range(len(e) - 1, 0, -1):
            e[i] = e[i] + v * e[i - 1]
    return tuple(e[1:])


def sigma_coords(layer: SpectrumLayer) -> SigmaVector:
    """Elementary-symmetric coordinates of a spectrum layer."""
    return SigmaVector(elementary_symmetric(layer.multipliers))


def _unity_order(lam, tol, max_order):
    """Smallest r <= max_order with lambda**r close to 1, else None."""
    if abs(abs(lam) - 1.0) > tol:
        return None
    power = lam * 0 + 1
    for r in range(1, max_order + 1):
        power = power * lam
        if abs(power - 1.0) <= tol:
            return r
    return None


def _formal_periods(lam, m, tol, max_order):
    periods = {m}
    r = _unity_order(lam, tol, max_order)
    if r is not None and r > 1:
        periods.add(m * r)
    return frozenset(periods)


def formal_exact_periods(
    f: RationalMap,
    x: ProjPoint,
    m: int,
    tol: float = UNITY_TOL,
    orbit_tol: float = ORBIT_TOL,
    max_order: int = UNITY_ORDER_MAX,
):
    """Formal exact periods of a point of minimal period m.

    Always contains m; additionally m*r when the period-m multiplier is a
    primitive r-th root of unity within tol (unique smallest r scanned up
    to max_order).
    """
    orbit = [x]
    for _ in range(m - 1):
        orbit.append(apply_map(f, orbit[-1]))
    closing = apply_map(f, orbit[-1])
    if not closing.proj_eq(x, orbit_tol):
        raise NotPeriodic(f"point does not return after {m} steps")
    lam = multiplier_along_cycle(f, orbit, tol=orbit_tol)
    return _formal_periods(lam, m, tol, max_order)


def assemble_cycles(
    f: RationalMap,
    n: int,
    seed: int = 0,
    orbit_tol: float = ORBIT_TOL,
    unity_tol: float = UNITY_TOL,
    precision: str = DOUBLE,
):
    """Cycles of the formal-period-n points, from the dynatomic roots.

    Roots are grouped into f-orbits by projective nearest-image matching;
    every cycle carries the multiplier at its minimal period and the shared
    dynatomic multiplicity of its points.  A double-precision failure of
    matching or root finding reruns the whole layer at extended precision
    (badly conditioned charts crowd roots together).
    """
    try:
        return _assemble_attempt(f, n, seed, orbit_tol, unity_tol, precision)
    except _RETRYABLE:
        if precision == EXTENDED:
            raise
        return _assemble_attempt(f, n, seed, orbit_tol, unity_tol, EXTENDED)


def _assemble_attempt(f, n, seed, orbit_tol, unity_tol, precision):
    from .roots import projective_roots

    f = map_to_precision(f, precision)
    with prec_context(precision):
        dyn = dynatomic_form(f, n, precision=precision)
        clusters = projective_roots(dyn.form, seed=seed, precision=precision)
        if precision == DOUBLE and any(cl.radius > RADIUS_ESCALATE for cl in clusters):
            worst = max(cl.radius for cl in clusters)
            raise _LowConfidenceRoots(f"root radius {worst:.2e} above trust threshold")
        centers = [cl.center for cl in clusters]
        succ = []
        worst_step = 0.0
        for i, cl in enumerate(clusters):
            img = apply_map(f, cl.center)
            dists = [img.proj_dist(c) for c in centers]
            j = min(range(len(centers)), key=dists.__getitem__)
            if dists[j] > orbit_tol:
                raise OrbitMatchFailed(
                    f"period-{n} root image off by {dists[j]:.3e} (> {orbit_tol:g})"
                )
            worst_step = max(worst_step, float(dists[j]))
            succ.append(j)
        if precision == DOUBLE and worst_step > STEP_TRUST:
            raise _LowConfidenceRoots(
                f"orbit step mismatch {worst_step:.2e} above trust threshold"
            )
        records = []
        seen = [False] * len(clusters)
        for i in range(len(clusters)):
            if seen[i]:
                continue
            orbit = [i]
            seen[i] = True
            j = succ[i]
            while j != i:
                if seen[j]:
                    raise OrbitMatchFailed("orbit chains collided; roots too close")
                orbit.append(j)
                seen[j] = True
                j = succ[j]
            m = len(orbit)
            if n % m != 0:
                raise OrbitMatchFailed(f"orbit length {m} does not divide period {n}")
            mults = {clusters[k].multiplicity for k in orbit}
            if len(mults) != 1:
                raise OrbitMatchFailed("multiplicity varies along one orbit")
            lam = multiplier_along_cycle(f, [centers[k] for k in orbit], tol=orbit_tol)
            records.append(
                CycleRecord(
                    points=tuple(centers[k] for k in orbit),
                    multiplier=lam,
                    multiplicity=mults.pop(),
                    formal_periods=_formal_periods(lam, m, unity_tol, UNITY_ORDER_MAX),
                )
            )
    return records


def spectrum_layer(
    f: RationalMap, n: int, seed: int = 0, precision: str = DOUBLE, **kw
) -> SpectrumLayer:
    """The multiset of d(f^n) over formal-period-n points, size nu(d, n).

    A cycle of minimal period m contributes m * multiplicity copies of
    multiplier**(n/m); the power identity avoids differentiating f^n.
    """
    try:
        return _layer_attempt(f, n, seed, precision, **kw)
    except _RETRYABLE:
        if precision == EXTENDED:
            raise
        return _layer_attempt(f, n, seed, EXTENDED, **kw)


def _layer_attempt(f, n, seed, precision, orbit_tol=ORBIT_TOL, unity_tol=UNITY_TOL):
    records = _assemble_attempt(f, n, seed, orbit_tol, unity_tol, precision)
    lams = []
    for rec in records:
        m = rec.minimal_period
        lam_n = rec.multiplier ** (n // m)
        lams.extend([lam_n] * (m * rec.multiplicity))
    expected = nu_count(f.degree, n)
    if len(lams) != expected:
        raise OrbitMatchFailed(f"layer size {len(lams)} != nu = {expected}")
    lams.sort(key=_sort_key)
    return SpectrumLayer(n, tuple(lams))


# Relative error carried by a double-precision multiplier (root radius gate
# upstream keeps it near this level).
_INPUT_REL = 1e-13

# Budget for one sigma entry's absolute error relative to its magnitude.
_SIGMA_BUDGET = 1e-9


def _sigma_uncertain(values, sig) -> bool:
    """True when symmetric-function cancellation would eat the 1e-8 budget.

    The expansion over |values| bounds the sum of term magnitudes, so
    mags * input-error estimates the absolute error of each coordinate.
    """
    mags = elementary_symmetric([abs(v) for v in values])
    for mag, s in zip(mags, sig):
        if float(abs(mag)) * _INPUT_REL > _SIGMA_BUDGET * (1.0 + float(abs(s))):
            return True
    return False


def _trusted_sigma(f, n, reciprocal, precision, super_tol=SUPER_TOL, **kw) -> SigmaVector:
    layer = spectrum_layer(f, n, precision=precision, **kw)
    vals = list(layer.multipliers)
    if reciprocal:
        if any(abs(lam) <= super_tol for lam in vals):
            raise Superattracting(n)
        vals = sorted((1 / lam for lam in vals), key=_sort_key)
    sig = elementary_symmetric(vals)
    layer_extended = vals and isinstance(vals[0], mpmath.mpc)
    if precision == DOUBLE and not layer_extended and _sigma_uncertain(vals, sig):
        return _trusted_sigma(f, n, reciprocal, EXTENDED, super_tol=super_tol, **kw)
    return SigmaVector(sig)


def rho_vector(f: RationalMap, n: int, m: int, precision: str = DOUBLE, **kw):
    """Sigma coordinates of the layers n..m (the plain-spectrum fingerprint)."""
    if n > m:
        raise ValueError("need n <= m")
    return [
        _trusted_sigma(f, j, reciprocal=False, precision=precision, **kw)
        for j in range(n, m + 1)
    ]


def superattracting_in_range(
    f: RationalMap, n: int, m: int, tol: float = SUPER_TOL, **kw
) -> bool:
    """True when some layer in [n, m] contains a multiplier of magnitude <= tol."""
    for j in range(n, m + 1):
        layer = spectrum_layer(f, j, **kw)
        if any(abs(lam) <= tol for lam in layer.multipliers):
            return True
    return False


def delta_layer(
    f: RationalMap, n: int, super_tol: float = SUPER_TOL, precision: str = DOUBLE, **kw
) -> SigmaVector:
    """Sigma coordinates of the reciprocal multipliers at period n.

    Raises Superattracting when the layer contains a multiplier within
    super_tol of zero: the map sits in the excluded locus and the
    reciprocal spectrum is undefined there.
    """
    return _trusted_sigma(f, n, reciprocal=True, precision=precision, super_tol=super_tol, **kw)


def tau_vector(
    f: RationalMap, n: int, m: int, super_tol: float = SUPER_TOL, **kw
) -> TauVector:
    """Concatenated reciprocal-spectrum blocks for periods n..m."""
    if n > m:
        raise ValueError("need n <= m")
    segments = tuple(delta_layer(f, j, super_tol=super_tol, **kw) for j in range(n, m + 1))
    return TauVector(n, m, segments)


def entry_distance(a, b) -> float:
    return float(abs(a - b) / (1 + abs(a) + abs(b)))


def block_distance(blocks_a, blocks_b) -> float:
    """Max normalized entrywise distance across two equal-shape block lists."""
    if len(blocks_a) != len(blocks_b):
        raise ShapeMismatch("different number of sigma blocks")
    worst = 0.0
    for sa, sb in zip(blocks_a, blocks_b):
        if len(sa.values) != len(sb.values):
            raise ShapeMismatch("sigma blocks of different lengths")
        for x, y in zip(sa.values, sb.values):
            worst = max(worst, entry_distance(x, y))
    return worst


def spectra_distance(a: TauVector, b: TauVector) -> float:
    """Max over entries of |a_i - b_i| / (1 + |a_i| + |b_i|)."""
    if (a.n, a.m) != (b.n, b.m):
        raise ShapeMismatch(f"windows differ: {(a.n, a.m)} vs {(b.n, b.m)}")
    return block_distance(a.segments, b.segments)
