"""Dense complex polynomials and homogeneous bivariate forms.

Coefficients are stored ascending by power; a degree-D form keeps D+1
entries where entry i multiplies X**i * Y**(D-i).  Two numeric backends
share the code paths: numpy complex128 arrays for ordinary work, and
object arrays of mpmath complex numbers when a computation runs at
extended precision (>= 113 bits).  Everything here is immutable and pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import NotDivisible, Overflow

DOUBLE = "double"
EXTENDED = "extended"
EXTENDED_BITS = 113

NEG_INF = float("-inf")

# Relative magnitude below which a stored coefficient counts as a zero when
# trimming degree (noise floor left behind by double-precision arithmetic).
TRIM_TOL = 1e-12

# The same floor for values produced by extended-precision arithmetic.
TRIM_TOL_EXTENDED = 1e-26

# A long-division attempt is only made when the divisor's end coefficient
# carries at least this fraction of its largest coefficient.
_LEAD_FRACTION = 1e-3


def prec_context(precision):
    """mpmath working-precision context for the given tier (no-op at double)."""
    if precision == EXTENDED:
        return mpmath.workprec(EXTENDED_BITS)
    return mpmath.workprec(mpmath.mp.prec)


def is_extended_array(arr) -> bool:
    return getattr(arr, "dtype", None) == np.dtype(object)


def coerce_coeffs(values, precision=DOUBLE) -> np.ndarray:
    """Coefficient vector in the requested backend (complex128 or mpc objects)."""
    if precision == EXTENDED:
        with mpmath.workprec(EXTENDED_BITS):
            out = np.empty(len(values), dtype=object)
            for i, v in enumerate(values):
                if isinstance(v, mpmath.mpc):
                    out[i] = v
                else:
                    c = complex(v)
                    out[i] = mpmath.mpc(c.real, c.imag)
        return out
    return np.asarray([complex(v) for v in values], dtype=np.complex128)


def coeffs_to_double(arr) -> np.ndarray:
    if is_extended_array(arr):
        return np.asarray([complex(v) for v in arr], dtype=np.complex128)
    return np.asarray(arr, dtype=np.complex128)


def abs_max(arr) -> float:
    """Infinity norm of a coefficient vector, as a plain float."""
    if len(arr) == 0:
        return 0.0
    if is_extended_array(arr):
        return float(max(abs(v) for v in arr))
    return float(np.abs(arr).max())


def _check_finite(arr):
    if is_extended_array(arr):
        for v in arr:
            if not (mpmath.isfinite(v.real) and mpmath.isfinite(v.imag)):
                raise Overflow("non-finite coefficient")
    elif len(arr) and not np.isfinite(arr).all():
        raise Overflow("non-finite coefficient")


def _trim_trailing(arr, tol=0.0):
    """Drop trailing coefficients of magnitude <= tol * max|coeff|."""
    if len(arr) == 0:
        return arr
    cut = tol * abs_max(arr)
    last = len(arr) - 1
    while last >= 0 and abs(arr[last]) <= cut:
        last -= 1
    return arr[: last + 1]


def horner(coeffs, z):
    """Evaluate an ascending coefficient vector at z (scalar or numpy array)."""
    if len(coeffs) == 0:
        return 0.0 * z
    acc = coeffs[-1] * (z * 0 + 1)
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


def horner_with_derivative(coeffs, z):
    """(p(z), p'(z)) in one pass; z may be a numpy array."""
    val = coeffs[-1] * (z * 0 + 1)
    der = z * 0
    for c in coeffs[-2::-1]:
        der = der * z + val
        val = val * z + c
    return val, der


# ---------------------------------------------------------------------------
# error-free transformations for compensated evaluation (binary64 only)

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _cplx_two_prod(x, y):
    """fl(x*y) and a complex correction so x*y = p + e up to second order."""
    a, b, c, d = x.real, x.imag, y.real, y.imag
    p1, e1 = _two_prod(a, c)
    p2, e2 = _two_prod(b, d)
    p3, e3 = _two_prod(a, d)
    p4, e4 = _two_prod(b, c)
    rr, e5 = _two_sum(p1, -p2)
    ri, e6 = _two_sum(p3, p4)
    return complex(rr, ri), complex(e1 - e2 + e5, e3 + e4 + e6)


def _cplx_two_sum(x, y):
    sr, er = _two_sum(x.real, y.real)
    si, ei = _two_sum(x.imag, y.imag)
    return complex(sr, si), complex(er, ei)


def eval_compensated(p, z):
    """Horner evaluation with compensated summation.

    At double precision the rounding errors of every product and sum are
    captured with error-free transformations and folded back in, which
    keeps the relative error near one unit roundoff even for badly
    cancelling coefficient sequences.  Object-backed (extended) inputs just
    use plain Horner at the ambient mpmath precision.
    """
    coeffs = p.coeffs if isinstance(p, Poly) else p
    if len(coeffs) == 0:
        return 0j
    if is_extended_array(np.asarray(coeffs)):
        return horner(coeffs, z)
    zc = complex(z)
    acc = complex(coeffs[-1])
    comp = 0j
    for c in coeffs[-2::-1]:
        prod, ep = _cplx_two_prod(acc, zc)
        acc, es = _cplx_two_sum(prod, complex(c))
        comp = comp * zc + (ep + es)
    return acc + comp


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial, coefficients ascending by power.

    The zero polynomial is the empty coefficient vector and reports degree
    -inf so that degree arithmetic never sees an undefined value.
    """

    coeffs: np.ndarray

    @classmethod
    def from_coeffs(cls, values, precision=DOUBLE, trim_tol=0.0):
        arr = coerce_coeffs(values, precision)
        _check_finite(arr)
        return cls(_trim_trailing(arr, trim_tol))

    @property
    def degree(self):
        return len(self.coeffs) - 1 if len(self.coeffs) else NEG_INF

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __call__(self, z):
        return horner(self.coeffs, z)

    def derivative(self) -> "Poly":
        if len(self.coeffs) <= 1:
            return Poly(self.coeffs[:0])
        n = len(self.coeffs)
        if is_extended_array(self.coeffs):
            out = np.array([k * self.coeffs[k] for k in range(1, n)], dtype=object)
        else:
            out = self.coeffs[1:] * np.arange(1, n)
        return Poly(out)


def sylvester_matrix(p: Poly, q: Poly):
    """Sylvester matrix of p and q (rows of p coefficients first)."""
    m, n = int(p.degree), int(q.degree)
    size = m + n
    ext = is_extended_array(p.coeffs) or is_extended_array(q.coeffs)
    pc = p.coeffs[::-1]  # descending
    qc = q.coeffs[::-1]
    if ext:
        mat = np.zeros((size, size), dtype=object)
        mat[:, :] = mpmath.mpc(0)
    else:
        mat = np.zeros((size, size), dtype=np.complex128)
    for i in range(n):
        mat[i, i : i + m + 1] = pc
    for i in range(m):
        mat[n + i, i : i + n + 1] = qc
    return mat


def _det(mat) -> complex:
    if mat.dtype == object:
        return mpmath.det(mpmath.matrix(mat.tolist()))
    if mat.shape[0] == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(mat))


def resultant(p: Poly, q: Poly):
    """Sylvester-matrix resultant of two nonzero polynomials.

    Evaluated as a determinant with partial pivoting; the convention is
    Res(p, q) = lc(p)**deg(q) * prod q(alpha) over the roots alpha of p.
    """
    if p.is_zero or q.is_zero:
        raise ValueError("resultant of the zero polynomial")
    m, n = int(p.degree), int(q.degree)
    if m == 0:
        return p.coeffs[0] ** n
    if n == 0:
        return q.coeffs[0] ** m
    det = _det(sylvester_matrix(p, q))
    if not is_extended_array(p.coeffs) and not np.isfinite(complex(det)):
        raise Overflow("resultant overflow")
    return det


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomForm2:
    """Homogeneous bivariate form of degree len(coeffs) - 1.

    Entry i is the coefficient of X**i * Y**(D-i).  Forms are the carrier
    for iterated numerators/denominators and for the period and dynatomic
    constructions downstream.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        _check_finite(self.coeffs)

    @classmethod
    def from_coeffs(cls, values, precision=DOUBLE):
        return cls(coerce_coeffs(values, precision))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(_trim_trailing(self.coeffs)) == 0

    def normalized(self) -> "HomForm2":
        m = abs_max(self.coeffs)
        if m == 0.0:
            return self
        return HomForm2(self.coeffs / m)

    def reversed_xy(self) -> "HomForm2":
        """The form with X and Y swapped."""
        return HomForm2(self.coeffs[::-1].copy())

    def dehomogenize(self, trim_tol=TRIM_TOL) -> Poly:
        """Restriction to Y = 1.  The degree deficit counts roots at infinity."""
        return Poly(_trim_trailing(self.coeffs, trim_tol))

    def eval(self, x, y):
        """Value at (x, y), computed in the better-conditioned chart."""
        if abs(x) <= abs(y):
            t = x / y
            return horner(self.coeffs, t) * y ** self.degree
        t = y / x
        return horner(self.coeffs[::-1], t) * x ** self.degree

    def eval_ratio(self, other: "HomForm2", x, y):
        """(self(x,y) : other(x,y)) as an unnormalized pair, chart-stably.

        The common power of the dominant coordinate cancels, so the pair
        never overflows for normalized inputs.
        """
        if abs(x) <= abs(y):
            t = x / y
            return horner(self.coeffs, t), horner(other.coeffs, t)
        t = y / x
        return horner(self.coeffs[::-1], t), horner(other.coeffs[::-1], t)


def form_multiply(a: HomForm2, b: HomForm2) -> HomForm2:
    """Product form; coefficients are the convolution of the inputs."""
    if a.is_zero or b.is_zero:
        raise ValueError("form_multiply requires nonzero forms")
    return HomForm2(np.convolve(a.coeffs, b.coeffs))


def form_substitute_linear(form: HomForm2, a, b, c, d) -> HomForm2:
    """form(a*X + b*Y, c*X + d*Y) as a form of the same degree."""
    deg = form.degree
    ext = is_extended_array(form.coeffs)
    one = mpmath.mpc(1) if ext else (1 + 0j)
    u = np.array([b * one, a * one], dtype=object if ext else np.complex128)
    v = np.array([d * one, c * one], dtype=object if ext else np.complex128)
    upow = [np.array([one], dtype=u.dtype)]
    vpow = [np.array([one], dtype=v.dtype)]
    for _ in range(deg):
        upow.append(np.convolve(upow[-1], u))
        vpow.append(np.convolve(vpow[-1], v))
    acc = np.zeros(deg + 1, dtype=u.dtype)
    if ext:
        acc[:] = mpmath.mpc(0)
    for i in range(deg + 1):
        ci = form.coeffs[i]
        if abs(ci) == 0.0:
            continue
        term = np.convolve(upow[i], vpow[deg - i])
        acc = acc + ci * np.pad(term, (0, deg + 1 - len(term)))
    return HomForm2(acc)


# ---------------------------------------------------------------------------
# exact form division


def _long_division(num, den):
    """Classical descending long division; None once coefficients explode.

    Error growth per step is governed by the divisor's root moduli, so the
    caller must always validate the residual.
    """
    n, m = len(num) - 1, len(den) - 1
    q = np.zeros(n - m + 1, dtype=num.dtype)
    if num.dtype == object:
        q[:] = mpmath.mpc(0)
    rem = num.copy()
    lead = den[m]
    limit = 1e30 * abs_max(num) / max(float(abs(lead)), 1e-300)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n - m, -1, -1):
            coef = rem[k + m] / lead
            q[k] = coef
            mag = abs(coef)
            if mag != mag or mag > limit:  # NaN or hopeless growth
                return None
            if mag != 0.0:
                rem[k : k + m + 1] = rem[k : k + m + 1] - coef * den
    return q


def _deflate_affine(coeffs, root, prefer_down):
    """Divide by (X - root*Y); direction chosen for stable error growth."""
    n = len(coeffs) - 1
    if prefer_down:
        # q[n-1] = c[n]; q[i-1] = c[i] + root*q[i]
        if coeffs.dtype == object:
            q = np.empty(n, dtype=object)
            acc = coeffs[n]
            q[n - 1] = acc
            for i in range(n - 1, 0, -1):
                acc = coeffs[i] + root * acc
                q[i - 1] = acc
            return q
        from scipy.signal import lfilter

        desc = lfilter([1.0 + 0j], [1.0 + 0j, -complex(root)], coeffs[:0:-1])
        return desc[::-1].astype(np.complex128)
    # q[0] = -c[0]/root; q[i] = (q[i-1] - c[i]) / root
    if coeffs.dtype == object:
        q = np.empty(n, dtype=object)
        acc = -coeffs[0] / root
        q[0] = acc
        for i in range(1, n):
            acc = (acc - coeffs[i]) / root
            q[i] = acc
        return q
    from scipy.signal import lfilter

    r = complex(root)
    return lfilter([-1.0 / r], [1.0 + 0j, -1.0 / r], coeffs[:-1]).astype(np.complex128)


def _divide_by_projective_roots(num, den, precision):
    """Deflate num by every projective root of den, stable direction per root.

    Long division propagates error like (max root modulus)**steps, which is
    hopeless for long quotients.  Deflating one root at a time, downward for
    roots inside the unit circle and upward for roots outside, keeps the
    growth bounded; roots at 0 and infinity become plain index shifts.
    """
    from .roots import projective_roots  # deferred: roots builds on this module

    clusters = projective_roots(HomForm2(den), precision=precision)
    work = num.copy()
    for cl in clusters:
        x, y = cl.center.x, cl.center.y
        for _ in range(cl.multiplicity):
            if abs(y) <= 1e-14:  # root at infinity: factor Y
                work = work[:-1].copy()
            elif abs(x) <= 1e-14:  # root at zero: factor X
                work = work[1:].copy()
            else:
                root = x / y
                work = _deflate_affine(work, root, prefer_down=abs(root) <= 1.0)
    # den = A * X**a * Y**binf * prod(X - r Y) with binf the multiplicity at
    # infinity, so A sits at X-power (degree - binf).
    mult_inf = sum(cl.multiplicity for cl in clusters if abs(cl.center.y) <= 1e-14)
    lead = den[len(den) - 1 - mult_inf]
    return work / lead


def _division_residual(num, den, q) -> float:
    resid = num - np.convolve(q, den)
    return abs_max(resid) / abs_max(num)


def _attempt_divisions(num, den, tol, precision, extra_resid=0.0):
    """Best stable division at one precision tier; None when all residuals fail.

    Long division in either orientation can pass a loose residual check
    while hiding large forward error (growth like max-root-modulus to the
    quotient length), so every viable strategy is scored by residual and
    only an eps-level result short-circuits the root-deflation route.
    """
    floor = 1e-14 if precision == DOUBLE else 1e-28
    dmax = abs_max(den)
    best = None
    best_resid = np.inf
    attempts = []
    if abs(den[-1]) >= _LEAD_FRACTION * dmax:
        attempts.append("forward")
    if abs(den[0]) >= _LEAD_FRACTION * dmax:
        attempts.append("reversed")
    for mode in attempts:
        if mode == "forward":
            q = _long_division(num, den)
        else:
            q = _long_division(num[::-1].copy(), den[::-1].copy())
            q = None if q is None else q[::-1].copy()
        if q is None:
            continue
        resid = _division_residual(num, den, q)
        if resid < best_resid:
            best, best_resid = q, resid
    if best_resid > floor:
        try:
            q = _divide_by_projective_roots(num, den, precision)
            resid = _division_residual(num, den, q)
            if resid < best_resid:
                best, best_resid = q, resid
        except Exception:
            pass
    return best if max(best_resid, extra_resid) <= tol else None


def form_exact_divide(num: HomForm2, den: HomForm2, tol: float = 1e-8) -> HomForm2:
    """Quotient num/den for a numerically exact division.

    The residual contract is max|num - q*den| <= tol * max|num|.  Only the
    denominator is trimmed (its noise-level top coefficients become a root
    at infinity that must strip the same count of numerator entries); the
    numerator keeps its full dynamic range, which deflation tolerates.  A
    failed double-precision attempt is retried once at >= 113 bits before
    raising NotDivisible.
    """
    extended = is_extended_array(num.coeffs) or is_extended_array(den.coeffs)
    trim = TRIM_TOL_EXTENDED if extended else TRIM_TOL
    dc = _trim_trailing(den.coeffs, trim)
    if len(dc) == 0:
        raise ValueError("division by the zero form")
    if num.degree < den.degree:
        raise NotDivisible("numerator degree below denominator degree")
    deficit = len(den.coeffs) - len(dc)
    nc = num.coeffs[: len(num.coeffs) - deficit] if deficit else num.coeffs
    stripped = 0.0
    if deficit:
        stripped = float(max(abs(v) for v in num.coeffs[len(num.coeffs) - deficit :]))
    num_norm = abs_max(num.coeffs)
    precision = EXTENDED if extended else DOUBLE
    with prec_context(precision):
        q = _attempt_divisions(nc, dc, tol, precision, extra_resid=stripped / num_norm)
    if q is None and not extended:
        with prec_context(EXTENDED):
            q = _attempt_divisions(
                coerce_coeffs(nc, EXTENDED),
                coerce_coeffs(dc, EXTENDED),
                tol,
                EXTENDED,
                extra_resid=stripped / num_norm,
            )
        if q is not None:
            q = coeffs_to_double(q)
    if q is None:
        raise NotDivisible(
            f"residual above {tol:g} for degrees {num.degree}/{den.degree}"
        )
    target = num.degree - den.degree
    if len(q) - 1 != target:
        raise NotDivisible("quotient degree bookkeeping failed")
    _check_finite(q)
    return HomForm2(q)


def hom_resultant(a: HomForm2, b: HomForm2):
    """Resultant of two equal-degree forms, zero iff they share a projective root.

    Built on the full padded coefficient vectors so common roots at
    infinity are detected as well.
    """
    if a.degree != b.degree:
        raise ValueError("hom_resultant expects equal degrees")
    d = a.degree
    ext = is_extended_array(a.coeffs) or is_extended_array(b.coeffs)
    size = 2 * d
    if ext:
        mat = np.zeros((size, size), dtype=object)
        mat[:, :] = mpmath.mpc(0)
    else:
        mat = np.zeros((size, size), dtype=np.complex128)
    ac = a.coeffs[::-1]
    bc = b.coeffs[::-1]
    for i in range(d):
        mat[i, i : i + d + 1] = ac
        mat[d + i, i : i + d + 1] = bc
    return _det(mat)
