"""Projective root finding for homogeneous forms.

Simultaneous Aberth-Ehrlich iteration from a perturbed circle, per-root
Newton polishing in each root's dominant chart, a-posteriori error radii
with an explicit evaluation-noise floor, and greedy merging of nearby
approximants into multiplicity-carrying clusters.  Multiplicities always
sum to the degree of the input, so downstream multiset counts stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import NoConvergence
from .forms import (
    DOUBLE,
    EXTENDED,
    EXTENDED_BITS,
    HomForm2,
    Poly,
    TRIM_TOL,
    TRIM_TOL_EXTENDED,
    horner,
    horner_with_derivative,
    is_extended_array,
)
from .maps import ProjPoint

GOLDEN_ANGLE = 2.0 * math.pi * (1.0 - 2.0 / (1.0 + math.sqrt(5.0)))

MAX_SWEEPS_DOUBLE = 200
MAX_SWEEPS_EXTENDED = 500
MERGE_FACTOR = 10.0

# Radii above this play no role in merging decisions (they mean "unknown").
_RADIUS_CAP = 0.1


@dataclass(frozen=True)
class RootCluster:
    """A multiplicity-weighted root with an a-posteriori error estimate.

    ``radius`` is measured in the affine chart the cluster was polished in
    (z = X/Y inside the unit circle, w = Y/X outside) and includes the
    Horner evaluation-noise floor; ``residual`` is |p(center)| for the
    max-normalized polynomial in that chart.
    """

    center: ProjPoint
    multiplicity: int
    radius: float
    residual: float


def _initial_points(n: int, scale: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    angles = GOLDEN_ANGLE * np.arange(n)
    pts = scale * np.exp(1j * angles)
    jitter = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return pts + 1e-3 * scale * jitter


def _root_scale(c: np.ndarray) -> float:
    """Fujiwara-style bound on root magnitudes of an ascending vector."""
    n = len(c) - 1
    lead = abs(c[-1])
    best = 0.0
    for k in range(1, n + 1):
        mag = float(abs(c[n - k]))
        if mag:
            best = max(best, (mag / lead) ** (1.0 / k))
    return 2.0 * best if best > 0 else 1.0


def _aberth_double(c: np.ndarray, seed: int):
    """(roots, converged) for an ascending complex128 vector, degree >= 2."""
    n = len(c) - 1
    z = _initial_points(n, _root_scale(c), seed)
    amag = np.abs(c)
    eps = np.finfo(np.float64).eps
    frozen = np.zeros(n, dtype=bool)
    for _ in range(MAX_SWEEPS_DOUBLE):
        val, der = horner_with_derivative(c, z)
        floor = 4.0 * eps * horner(amag, np.abs(z))
        frozen |= np.abs(val) <= floor
        if frozen.all():
            return z, True
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(der != 0, val / np.where(der != 0, der, 1.0), 0.1)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = (1.0 / diff).sum(axis=1)
            denom = 1.0 - newton * s
            step = np.where(
                np.abs(denom) > 1e-30, newton / np.where(denom != 0, denom, 1.0), newton
            )
        step = np.where(frozen | ~np.isfinite(step), 0.0, step)
        z = z - step
        frozen |= np.abs(step) <= 1e-15 * (1.0 + np.abs(z))
        if frozen.all():
            return z, True
    return z, False


def _aberth_extended(c, seed: int, warm=None):
    """Aberth sweeps in mpmath arithmetic, warm-started from a double attempt."""
    n = len(c) - 1
    coeffs = [v if isinstance(v, mpmath.mpc) else mpmath.mpc(complex(v)) for v in c]
    amag = [abs(v) for v in coeffs]
    if warm is not None:
        z = [mpmath.mpc(complex(w)) for w in warm]
    else:
        start = _initial_points(n, _root_scale(np.asarray([complex(v) for v in c])), seed)
        z = [mpmath.mpc(w) for w in start]
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 2)
    frozen = [False] * n
    for _ in range(MAX_SWEEPS_EXTENDED):
        progressed = False
        for i in range(n):
            if frozen[i]:
                continue
            val, der, floor = _eval_with_floor(coeffs, amag, z[i], eps)
            if abs(val) <= floor:
                frozen[i] = True
                continue
            progressed = True
            newton = val / der if der != 0 else mpmath.mpc("0.1")
            s = mpmath.mpc(0)
            for j in range(n):
                if j != i:
                    s += 1 / (z[i] - z[j])
            denom = 1 - newton * s
            step = newton / denom if abs(denom) > 1e-30 else newton
            z[i] = z[i] - step
            if abs(step) <= eps * (1 + abs(z[i])):
                frozen[i] = True
        if not progressed or all(frozen):
            return z, True
    return z, all(frozen)


def _eval_with_floor(coeffs, amag, t, eps):
    """(p(t), p'(t), evaluation noise floor) at one point."""
    der = coeffs[-1] * 0
    val = coeffs[-1]
    scale = amag[-1]
    at = abs(t)
    for k in range(len(coeffs) - 2, -1, -1):
        der = der * t + val
        val = val * t + coeffs[k]
        scale = scale * at + amag[k]
    return val, der, 4 * eps * scale


def _newton_scalar(coeffs, z, steps=3):
    for _ in range(steps):
        der = coeffs[-1] * 0
        val = coeffs[-1]
        for ck in coeffs[-2::-1]:
            der = der * z + val
            val = val * z + ck
        if abs(der) == 0:
            break
        step = val / der
        z2 = z - step
        if abs(horner(coeffs, z2)) <= abs(val):
            z = z2
        else:
            break
    return z


def _derivative_coeffs(coeffs, order):
    dc = list(coeffs)
    for _ in range(order):
        dc = [k * dc[k] for k in range(1, len(dc))]
    return dc


def _refine_multiple(coeffs, center, k):
    """Newton on the (k-1)-th derivative: quadratic at a k-fold root."""
    return _newton_scalar(_derivative_coeffs(coeffs, k - 1), center, steps=6)


def _merge_groups(points, rho, merge_factor):
    """Union-find on projective distances <= merge_factor * radius."""
    n = len(points)
    xs = np.asarray([complex(p.x) for p in points])
    ys = np.asarray([complex(p.y) for p in points])
    capped = np.minimum(np.asarray(rho), _RADIUS_CAP)
    dist = np.abs(xs[:, None] * ys[None, :] - xs[None, :] * ys[:, None])
    thresh = merge_factor * np.maximum(capped[:, None], capped[None, :])
    ii, jj = np.nonzero(dist <= thresh)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in zip(ii, jj):
        if i < j:
            parent[find(int(i))] = find(int(j))
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def roots_univariate(
    p, seed: int = 0, merge_factor: float = MERGE_FACTOR, precision: str = DOUBLE
):
    """Clusters for the affine roots of a polynomial of degree >= 1.

    Zero blocks at the origin split off as one multiplicity cluster; the
    rest goes through Aberth iteration, with an extended-precision retry
    when the 53-bit pass stalls.  Every approximant is then polished and
    certified in its dominant chart, so roots far outside the unit circle
    do not inherit the z-chart's amplified evaluation noise.  Fixed seed
    means bitwise-identical output.
    """
    raw = p.coeffs if isinstance(p, Poly) else np.asarray(p)
    if len(raw) < 2:
        raise ValueError("need degree >= 1")
    extended = precision == EXTENDED or is_extended_array(np.asarray(raw))
    if extended:
        with mpmath.workprec(EXTENDED_BITS):
            coeffs = [v if isinstance(v, mpmath.mpc) else mpmath.mpc(complex(v)) for v in raw]
            m = max(abs(v) for v in coeffs)
            coeffs = [v / m for v in coeffs]
            return _cluster_pipeline(coeffs, seed, merge_factor, extended=True)
    work = np.asarray([complex(v) for v in raw], dtype=np.complex128)
    work = work / np.abs(work).max()
    return _cluster_pipeline(list(work), seed, merge_factor, extended=False)


def _cluster_pipeline(coeffs, seed, merge_factor, extended):
    one = mpmath.mpc(1) if extended else 1 + 0j
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 2) if extended else np.finfo(np.float64).eps
    strip_tol = TRIM_TOL_EXTENDED if extended else TRIM_TOL

    clusters = []
    k0 = 0
    while k0 < len(coeffs) - 1 and abs(coeffs[k0]) <= strip_tol:
        k0 += 1
    if k0:
        mag = float(max(abs(v) for v in coeffs[:k0]))
        radius = mag ** (1.0 / k0) if mag > 0 else 0.0
        clusters.append(RootCluster(ProjPoint(one * 0, one), k0, radius, mag))
        coeffs = list(coeffs[k0:])

    n = len(coeffs) - 1
    if n == 0:
        return clusters

    if n == 1:
        approx = [-coeffs[0] / coeffs[1]]
    elif extended:
        warm, _ = _aberth_double(np.asarray([complex(v) for v in coeffs]), seed)
        approx, ok = _aberth_extended(coeffs, seed, warm=warm)
        if not ok:
            raise NoConvergence(f"Aberth stalled at degree {n} (extended)")
    else:
        z, ok = _aberth_double(np.asarray(coeffs), seed)
        if not ok:
            zs, ok = _aberth_extended(coeffs, seed, warm=z)
            if not ok:
                raise NoConvergence(f"Aberth stalled at degree {n}")
            z = [complex(v) for v in zs]
        approx = list(z)

    rev = list(coeffs[::-1])
    amag = [abs(v) for v in coeffs]
    amag_rev = amag[::-1]

    # Polish each approximant in its dominant chart, where |t| <= 1 keeps the
    # evaluation-noise floor at the eps level, and certify a radius there.
    tvals, in_w, rho, points = [], [], [], []
    for z in approx:
        if abs(z) <= 1.0:
            t, poly, mags, w_chart = z, coeffs, amag, False
        else:
            t, poly, mags, w_chart = 1 / z, rev, amag_rev, True
        t = _newton_scalar(poly, t, steps=3)
        val, der, floor = _eval_with_floor(poly, mags, t, eps)
        r = float(n * (abs(val) + floor) / abs(der)) if abs(der) != 0 else 1.0
        tvals.append(t)
        in_w.append(w_chart)
        rho.append(r if math.isfinite(r) else 1.0)
        points.append(ProjPoint(one, t) if w_chart else ProjPoint(t, one))

    for group in _merge_groups(points, rho, merge_factor):
        mult = len(group)
        use_w = sum(1 for i in group if in_w[i]) * 2 > mult
        poly, mags = (rev, amag_rev) if use_w else (coeffs, amag)
        members = [tvals[i] if in_w[i] == use_w else 1 / tvals[i] for i in group]
        center = sum(members) / mult
        if mult > 1:
            center = _refine_multiple(poly, center, mult)
        val, der, floor = _eval_with_floor(poly, mags, center, eps)
        if mult == 1 and abs(der) != 0:
            base = float(n * (abs(val) + floor) / abs(der))
        else:
            base = max(rho[i] for i in group)
        spread = max((abs(m - center) for m in members), default=0.0) if mult > 1 else 0.0
        radius = float(spread) + min(base if math.isfinite(base) else 1.0, _RADIUS_CAP)
        residual = float(abs(val))
        point = ProjPoint(one, center) if use_w else ProjPoint(center, one)
        clusters.append(RootCluster(point, mult, radius, residual))

    clusters.sort(
        key=lambda cl: (
            round(float(cl.center.x.real), 12),
            round(float(cl.center.x.imag), 12),
            round(float(cl.center.y.real), 12),
            round(float(cl.center.y.imag), 12),
        )
    )
    return _cap_radii(clusters)


def _cap_radii(clusters):
    """Shrink radii so distinct clusters stay disjoint (separation / 3)."""
    if len(clusters) < 2:
        return clusters
    out = []
    for i, cl in enumerate(clusters):
        sep = min(
            cl.center.proj_dist(other.center)
            for j, other in enumerate(clusters)
            if j != i
        )
        out.append(
            RootCluster(cl.center, cl.multiplicity, min(cl.radius, sep / 3.0), cl.residual)
        )
    return out


def projective_roots(F: HomForm2, seed: int = 0, precision: str = DOUBLE):
    """All projective roots of a nonzero form, multiplicity-complete.

    Affine clusters come from the Y = 1 restriction; the degree deficit of
    that restriction is the multiplicity of the root at infinity.
    """
    if F.degree < 1:
        raise ValueError("need a form of degree >= 1")
    extended = precision == EXTENDED or is_extended_array(F.coeffs)
    trim = TRIM_TOL_EXTENDED if extended else TRIM_TOL
    G = F.normalized()
    affine = G.dehomogenize(trim_tol=trim)
    if affine.is_zero:
        raise ValueError("zero form has no well-defined roots")
    deficit = G.degree - int(affine.degree)
    clusters = []
    if deficit:
        top = [abs(complex(v)) for v in G.coeffs[-deficit:]]
        mag = float(max(top))
        radius = mag ** (1.0 / deficit) if mag > 0 else 0.0
        clusters.append(RootCluster(ProjPoint.infinity(), deficit, radius, mag))
    if affine.degree >= 1:
        clusters.extend(roots_univariate(affine, seed=seed, precision=precision))
    return clusters
