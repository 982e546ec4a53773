"""Rational maps on the projective line.

Maps are pairs of equal-degree homogeneous forms with nonvanishing
resultant, normalized so the largest coefficient across both forms has
magnitude one.  Iteration, Moebius conjugation and cycle multipliers all
work in homogeneous coordinates so the point at infinity needs no special
cases.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import CycleBroken, Degenerate, DegreeCap, IndeterminatePoint, Overflow
from .forms import (
    DOUBLE,
    EXTENDED,
    HomForm2,
    abs_max,
    coerce_coeffs,
    eval_compensated,
    form_substitute_linear,
    hom_resultant,
    is_extended_array,
    prec_context,
)

# |Res| below this (after joint normalization) marks a degenerate map.
RES_TOL = 1e-12

# Projective equality tolerance, matched to root-finder certified radii.
PROJ_TOL = 1e-9

# Guard on d**n coefficient-vector sizes for iterates.
DEGREE_CAP = 4096


@dataclass(frozen=True)
class ProjPoint:
    """Point of the projective line, scaled so max(|x|, |y|) = 1."""

    x: complex
    y: complex

    def __post_init__(self):
        m = max(abs(self.x), abs(self.y))
        if m == 0:
            raise ValueError("(0 : 0) is not a projective point")
        if m != 1.0:
            object.__setattr__(self, "x", self.x / m)
            object.__setattr__(self, "y", self.y / m)

    @classmethod
    def from_affine(cls, z) -> "ProjPoint":
        return cls(z, z * 0 + 1)

    @classmethod
    def infinity(cls) -> "ProjPoint":
        return cls(1.0 + 0j, 0j)

    def proj_dist(self, other: "ProjPoint") -> float:
        return float(abs(self.x * other.y - other.x * self.y))

    def proj_eq(self, other: "ProjPoint", tol: float = PROJ_TOL) -> bool:
        return self.proj_dist(other) <= tol

    @property
    def is_infinite(self) -> bool:
        return abs(self.y) <= 1e-14

    def affine(self):
        """x / y; only meaningful away from infinity."""
        return self.x / self.y


@dataclass(frozen=True)
class Moebius:
    """Invertible 2x2 matrix acting on the projective line."""

    a: complex
    b: complex
    c: complex
    d: complex

    DET_TOL = 1e-9

    def __post_init__(self):
        m = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if m == 0 or abs(self.det()) / (m * m) <= self.DET_TOL:
            raise ValueError("Moebius matrix is numerically singular")

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(1.0 + 0j, 0j, 0j, 1.0 + 0j)

    def det(self):
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Moebius":
        return Moebius(self.d, -self.b, -self.c, self.a)

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)


@dataclass(frozen=True)
class RationalMap:
    """Degree-d endomorphism of the projective line, as numerator/denominator forms."""

    numerator: HomForm2
    denominator: HomForm2

    @property
    def degree(self) -> int:
        return self.numerator.degree

    def dehomogenized(self):
        """(P(z,1), Q(z,1), P(1,w), Q(1,w)) as Poly objects, untrimmed."""
        from .forms import Poly

        return (
            Poly(self.numerator.coeffs),
            Poly(self.denominator.coeffs),
            Poly(self.numerator.coeffs[::-1].copy()),
            Poly(self.denominator.coeffs[::-1].copy()),
        )


def _joint_normalize(p: HomForm2, q: HomForm2):
    m = max(abs_max(p.coeffs), abs_max(q.coeffs))
    if m == 0.0:
        raise Degenerate("zero forms")
    return HomForm2(p.coeffs / m), HomForm2(q.coeffs / m)


def make_map(P: HomForm2, Q: HomForm2, res_tol: float = RES_TOL) -> RationalMap:
    """Validated, normalized rational map from a pair of degree-d forms."""
    if P.degree != Q.degree:
        raise Degenerate("numerator and denominator degrees differ")
    d = P.degree
    if d < 2:
        raise Degenerate(f"degree {d} < 2")
    P, Q = _joint_normalize(P, Q)
    res = hom_resultant(P, Q)
    if abs(res) <= res_tol:
        raise Degenerate(f"|resultant| = {float(abs(res)):.3e} <= {res_tol:g}")
    return RationalMap(P, Q)


def map_to_precision(f: RationalMap, precision: str) -> RationalMap:
    """The same map with coefficients coerced to the requested backend."""
    already = is_extended_array(f.numerator.coeffs)
    if (precision == EXTENDED) == already:
        return f
    return RationalMap(
        HomForm2(coerce_coeffs(f.numerator.coeffs, precision)),
        HomForm2(coerce_coeffs(f.denominator.coeffs, precision)),
    )


def iterate_forms(f: RationalMap, n: int):
    """Homogeneous forms (F_n, G_n) of degree d**n with f^n = F_n / G_n.

    Builds up by substituting the previous pair into (P, Q), renormalizing
    jointly after every step so coefficients never overflow.
    """
    d = f.degree
    if n < 1:
        raise ValueError("n must be >= 1")
    if d**n > DEGREE_CAP:
        raise DegreeCap(f"d**n = {d**n} exceeds cap {DEGREE_CAP}")
    F, G = f.numerator, f.denominator
    for _ in range(n - 1):
        F, G = _compose_step(f, F, G)
    return F, G


def _compose_step(f: RationalMap, F: HomForm2, G: HomForm2):
    """(P(F, G), Q(F, G)) jointly renormalized."""
    d = f.degree
    ext = is_extended_array(F.coeffs)
    fpow = [np.array([mpmath.mpc(1)] if ext else [1.0 + 0j], dtype=F.coeffs.dtype)]
    gpow = [fpow[0].copy()]
    for _ in range(d):
        fpow.append(np.convolve(fpow[-1], F.coeffs))
        gpow.append(np.convolve(gpow[-1], G.coeffs))
    size = d * F.degree + 1
    newF = np.zeros(size, dtype=F.coeffs.dtype)
    newG = np.zeros(size, dtype=F.coeffs.dtype)
    if ext:
        newF[:] = mpmath.mpc(0)
        newG[:] = mpmath.mpc(0)
    for i in range(d + 1):
        term = np.convolve(fpow[i], gpow[d - i])
        pc = f.numerator.coeffs[i]
        qc = f.denominator.coeffs[i]
        if abs(pc) != 0.0:
            newF = newF + pc * term
        if abs(qc) != 0.0:
            newG = newG + qc * term
    A, B = _joint_normalize(HomForm2(newF), HomForm2(newG))
    if not ext and not (np.isfinite(A.coeffs).all() and np.isfinite(B.coeffs).all()):
        raise Overflow("iterate coefficients overflowed")
    return A, B


def apply_map(f: RationalMap, p: ProjPoint) -> ProjPoint:
    """Image of a point, evaluated in the dominant-coordinate chart."""
    px, qx = f.numerator.eval_ratio(f.denominator, p.x, p.y)
    if max(abs(px), abs(qx)) < 1e-14:
        raise IndeterminatePoint("both coordinates vanished; map is near-degenerate there")
    return ProjPoint(px, qx)


def conjugate_map(f: RationalMap, phi: Moebius) -> RationalMap:
    """phi o f o phi^{-1} as a validated degree-d map.

    If cancellation kills the resultant check at double precision the
    substitution is repeated at extended precision before giving up.
    """
    try:
        return _conjugate_once(f, phi)
    except Degenerate:
        f_ext = map_to_precision(f, EXTENDED)
        with prec_context(EXTENDED):
            g = _conjugate_once(f_ext, phi)
        return make_map(
            HomForm2(np.asarray([complex(v) for v in g.numerator.coeffs])),
            HomForm2(np.asarray([complex(v) for v in g.denominator.coeffs])),
        )


def _conjugate_once(f: RationalMap, phi: Moebius) -> RationalMap:
    inv = phi.inverse()
    Pi = form_substitute_linear(f.numerator, inv.a, inv.b, inv.c, inv.d)
    Qi = form_substitute_linear(f.denominator, inv.a, inv.b, inv.c, inv.d)
    newP = HomForm2(phi.a * Pi.coeffs + phi.b * Qi.coeffs)
    newQ = HomForm2(phi.c * Pi.coeffs + phi.d * Qi.coeffs)
    return make_map(newP, newQ)


def _chart_derivative(f: RationalMap, src: ProjPoint, dst: ProjPoint):
    """Local derivative of f at src, in the dominant charts of src and image.

    Charts are z = x/y where |y| >= |x| and w = y/x otherwise; the chain of
    these local derivatives around a cycle is the chart-independent
    multiplier.
    """
    pz, qz, pw, qw = f.dehomogenized()
    src_w = abs(src.x) > abs(src.y)
    dst_w = abs(dst.x) > abs(dst.y)
    t = src.y / src.x if src_w else src.x / src.y
    num, den = (pw, qw) if src_w else (pz, qz)
    if dst_w:
        num, den = den, num
    n = eval_compensated(num, t)
    dn = eval_compensated(num.derivative(), t)
    de = eval_compensated(den, t)
    dd = eval_compensated(den.derivative(), t)
    if abs(de) == 0.0:
        raise CycleBroken("image left the chosen target chart")
    return (dn * de - n * dd) / (de * de)


def multiplier_along_cycle(f: RationalMap, cycle, tol: float = 1e-6):
    """Derivative of f^m along an m-cycle, via the chartwise chain rule."""
    m = len(cycle)
    if m == 0:
        raise ValueError("empty cycle")
    ext = is_extended_array(f.numerator.coeffs)
    acc = mpmath.mpc(1) if ext else 1.0 + 0j
    for k, p in enumerate(cycle):
        nxt = cycle[(k + 1) % m]
        img = apply_map(f, p)
        if not img.proj_eq(nxt, tol):
            raise CycleBroken(
                f"point {k}: image misses its successor by {img.proj_dist(nxt):.3e}"
            )
        acc = acc * _chart_derivative(f, p, nxt)
    return acc
