"""Period and dynatomic forms of a rational map.

The degree-(d**n + 1) period form Y*F_n - X*G_n vanishes exactly at the
points fixed by the n-th iterate.  Its Moebius-inversion quotient over the
divisors of n is the dynatomic form, whose projective roots are the points
of formal exact period n counted with multiplicity; its degree is the
counting function nu(d, n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotDivisible
from .forms import (
    DOUBLE,
    EXTENDED,
    HomForm2,
    form_exact_divide,
    form_multiply,
    prec_context,
)
from .maps import RationalMap, iterate_forms, map_to_precision

DIVISION_TOL = 1e-8


@dataclass(frozen=True)
class PeriodForm:
    form: HomForm2
    n: int


@dataclass(frozen=True)
class DynatomicForm:
    form: HomForm2
    n: int
    nominal_degree: int


def moebius_mu(n: int) -> int:
    """Moebius function: (-1)**k on squarefree n with k prime factors, else 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    mu = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            mu = -mu
        p += 1
    if n > 1:
        mu = -mu
    return mu


def _divisors(n: int):
    return [k for k in range(1, n + 1) if n % k == 0]


def nu_count(d: int, n: int) -> int:
    """Number of points of formal exact period n, with multiplicity.

    Moebius inversion of the fixed-point counts d**k + 1 over divisors of n.
    """
    if d < 2 or n < 1:
        raise ValueError("need d >= 2 and n >= 1")
    return sum(moebius_mu(n // k) * (d**k + 1) for k in _divisors(n))


def period_form(f: RationalMap, n: int) -> PeriodForm:
    """Y*F_n - X*G_n, the degree d**n + 1 form vanishing where f^n fixes."""
    F, G = iterate_forms(f, n)
    yf = np.concatenate([F.coeffs, F.coeffs[:1] * 0])  # times Y
    xg = np.concatenate([G.coeffs[:1] * 0, G.coeffs])  # times X
    return PeriodForm(HomForm2(yf - xg).normalized(), n)


def dynatomic_form(
    f: RationalMap, n: int, tol: float = DIVISION_TOL, precision: str = DOUBLE
) -> DynatomicForm:
    """Moebius-inversion quotient of period forms for exact period n.

    All mu = +1 factors are multiplied, all mu = -1 factors are multiplied,
    and one global division produces the dynatomic form, preserving root
    multiplicities.  A NotDivisible at double precision triggers one retry
    of the whole pipeline at >= 113 bits.
    """
    try:
        return _dynatomic_attempt(f, n, tol, precision)
    except NotDivisible:
        if precision == EXTENDED:
            raise
        result = _dynatomic_attempt(map_to_precision(f, EXTENDED), n, tol, EXTENDED)
        back = HomForm2(np.asarray([complex(v) for v in result.form.coeffs]))
        return DynatomicForm(back.normalized(), n, result.nominal_degree)


def _dynatomic_attempt(f, n, tol, precision):
    with prec_context(precision):
        numer = None
        denoms = []
        for k in _divisors(n):
            mu = moebius_mu(n // k)
            if mu == 0:
                continue
            pf = period_form(f, k).form
            if mu == 1:
                numer = pf if numer is None else form_multiply(numer, pf).normalized()
            else:
                denoms.append(pf)
        # Divide by each inverted factor separately: every step is exactly
        # divisible, and a product denominator of degree ~d**n would span a
        # wider coefficient range than doubles can represent.
        quot = numer
        for pf in sorted(denoms, key=lambda g: g.degree, reverse=True):
            quot = form_exact_divide(quot, pf, tol).normalized()
    return DynatomicForm(quot.normalized(), n, nu_count(f.degree, n))
