"""Hypergeometric functions on the real parameter ranges the channel formulas use.

Hot paths (positive-term series) run in the compiled kernels; everything
else is scalar Python. Where a float series would lose more than a few
digits to cancellation, the sum is redone in exact rational arithmetic.
"""
import math
from fractions import Fraction

import numpy as np

from ._backend import kernels

_CANCELLATION_LIMIT = 1e4
_MAX_TERMS = 100_000


class NumericFailure(ArithmeticError):
    """A series or quadrature did not reach its target accuracy.

    ``value`` is the best estimate available when the routine gave up and
    ``bound`` an estimate of its error (NaN when unknown).
    """

    def __init__(self, message, value=math.nan, bound=math.nan):
        super().__init__(message)
        self.value = value
        self.bound = bound


def _is_nonpositive_integer(v):
    return v <= 0 and float(v).is_integer()


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1)."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    out = 1.0
    for k in range(int(n)):
        out *= a + k
    return out


def _exact_series(ratio, z, transient):
    """Sum 1 + sum_k prod ratio(j) z^k exactly; ``ratio`` returns Fractions."""
    z = Fraction(z)
    s = t = Fraction(1)
    eps = Fraction(1, 10**20)
    for k in range(_MAX_TERMS):
        t = t * ratio(k) * z
        if t == 0:
            return float(s)
        s += t
        if k > transient and abs(t) < eps * abs(s):
            return float(s)
    raise NumericFailure("exact series did not converge", value=float(s))


def _float_series_1f1(a, b, z):
    s = t = 1.0
    abs_sum = 1.0
    transient = abs(a) + abs(b) + abs(z)
    for k in range(_MAX_TERMS):
        t *= (a + k) * z / ((b + k) * (k + 1.0))
        if t == 0.0:
            return s, abs_sum
        s += t
        abs_sum += abs(t)
        if k > transient and abs(t) < 1e-17 * abs(s):
            return s, abs_sum
    raise NumericFailure("1F1 series did not converge", value=s, bound=abs(t))


def _general_1f1(a, b, z):
    s, abs_sum = _float_series_1f1(a, b, z)
    if abs_sum <= _CANCELLATION_LIMIT * abs(s):
        return s
    fa, fb = Fraction(a), Fraction(b)
    return _exact_series(
        lambda k: (fa + k) / ((fb + k) * (k + 1)), z, abs(a) + abs(b) + abs(z)
    )


def log_kummer_1f1(a: float, b: float, z):
    """Logarithm of 1F1(a; b; z) for a > 0, b > 0 and z >= 0, elementwise.

    Every series term is positive on this domain, so the log form stays
    finite long after 1F1 itself overflows.
    """
    if not (a > 0 and b > 0):
        raise ValueError("log_kummer_1f1 needs a > 0 and b > 0")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("log_kummer_1f1 needs z >= 0")
    out = kernels.log_hyp1f1(float(a), float(b), z)
    if np.any(np.isnan(out)):
        raise NumericFailure("1F1 series exceeded its term budget")
    return out if out.ndim else float(out)


def kummer_1f1(a: float, b: float, z: float) -> float:
    """Confluent hypergeometric function 1F1(a; b; z) for real arguments."""
    if _is_nonpositive_integer(b):
        raise ValueError("b must not be a nonpositive integer")
    if z == 0 or a == 0:
        return 1.0
    if a > 0 and b > 0 and z > 0:
        return math.exp(log_kummer_1f1(a, b, z))
    if z < 0 and b - a >= 0 and b > 0:
        # Kummer's transformation turns this into a positive-term series
        if b == a:
            return math.exp(z)
        return math.exp(z + log_kummer_1f1(b - a, b, -z))
    return _general_1f1(a, b, z)


def _polynomial_2f1(n, b, c, z):
    # a = -n, so the series stops after n + 1 terms
    s = np.ones_like(z)
    t = np.ones_like(z)
    for k in range(n):
        t = t * ((-n + k) * (b + k) / ((c + k) * (k + 1.0))) * z
        s = s + t
    return s


def gauss_2f1(a: float, b: float, c: float, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1, elementwise.

    Nonpositive z goes through the Pfaff transformation to z / (z - 1) in
    [0, 1), choosing the variant whose series has nonnegative terms when
    one exists.
    """
    if _is_nonpositive_integer(c):
        raise ValueError("c must not be a nonpositive integer")
    z = np.asarray(z, dtype=float)
    if np.any(z >= 1):
        raise ValueError("gauss_2f1 is restricted to z < 1")
    for p, q in ((a, b), (b, a)):
        if _is_nonpositive_integer(p):
            out = _polynomial_2f1(int(-p), q, c, z)
            return out if out.ndim else float(out)
    out = np.empty(z.shape)
    neg = z < 0
    if np.any(~neg):
        out[~neg] = kernels.hyp2f1_series(float(a), float(b), float(c), z[~neg])
    if np.any(neg):
        zn = z[neg]
        w = zn / (zn - 1.0)
        first = (a, c - b)
        second = (c - a, b)
        if min(second) >= 0 and min(first) < 0:
            out[neg] = (1.0 - zn) ** (-b) * kernels.hyp2f1_series(
                float(c - a), float(b), float(c), w
            )
        else:
            out[neg] = (1.0 - zn) ** (-a) * kernels.hyp2f1_series(
                float(a), float(c - b), float(c), w
            )
    if np.any(np.isnan(out)):
        raise NumericFailure("2F1 series exceeded its term budget")
    return out if out.ndim else float(out)


def log_gauss_2f1(a: float, b: float, c: float, z):
    """log 2F1(a, b; c; z) for a, b, c > 0 and 0 <= z < 1, elementwise.

    The series terms are all positive, so the sum is carried with a running
    scale and stays finite after 2F1 itself overflows.
    """
    if not (a > 0 and b > 0 and c > 0):
        raise ValueError("log_gauss_2f1 needs a, b, c > 0")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z >= 1):
        raise ValueError("log_gauss_2f1 needs 0 <= z < 1")
    out = kernels.log_hyp2f1_positive(float(a), float(b), float(c), z)
    if np.any(np.isnan(out)):
        raise NumericFailure("2F1 series exceeded its term budget")
    return out if out.ndim else float(out)


def _phi2_series(b1, b2, c, x, y, rel_tol, max_diagonals):
    """Sum the defining double series anti-diagonal by anti-diagonal."""
    # A[i] = (b1)_i x^i / i!, B[j] = (b2)_j y^j / j!, kept as growing arrays
    A = [1.0]
    B = [1.0]
    total = 0.0
    abs_total = 0.0
    cn = 1.0
    quiet = 0
    for n in range(max_diagonals):
        if n > 0:
            A.append(A[-1] * (b1 + n - 1) * x / n)
            B.append(B[-1] * (b2 + n - 1) * y / n)
            cn *= c + n - 1
        diag = np.array(A[: n + 1]) * np.array(B[n::-1]) / cn
        d = math.fsum(diag)
        total += d
        abs_total += float(np.abs(diag).sum())
        if not math.isfinite(total):
            raise NumericFailure("Phi2 series overflowed")
        small = abs(d) <= rel_tol * abs(total) and np.abs(diag).sum() <= rel_tol * abs_total
        quiet = quiet + 1 if small and n > abs(b1) + abs(b2) + abs(x) + abs(y) else 0
        if quiet >= 2:
            return total, abs_total
    raise NumericFailure("Phi2 series exceeded its diagonal budget", value=total)


def phi2_bivariate(
    b1: float,
    b2: float,
    c: float,
    x: float,
    y: float,
    *,
    rel_tol: float = 1e-16,
    max_diagonals: int = 4000,
) -> float:
    """Bivariate confluent hypergeometric function Phi2(b1, b2; c; x, y).

    Summed as a truncated double series, stopping once two consecutive
    anti-diagonals each add less than ``rel_tol`` of the running sum. When
    the arguments allow it, the identity

        Phi2(b1, b2; c; x, y) = e^x Phi2(c - b1 - b2, b2; c; -x, y - x)

    (or its mirror in y) is applied first so that every term is
    nonnegative. This is a validation path, not a fast evaluator.
    """
    if _is_nonpositive_integer(c):
        raise ValueError("c must not be a nonpositive integer")
    # one vanishing argument leaves a single confluent series
    if y == 0:
        return float(kummer_1f1(b1, c, x))
    if x == 0:
        return float(kummer_1f1(b2, c, y))
    rest = c - b1 - b2
    if x <= 0 and y - x >= 0 and rest >= 0 and b2 >= 0:
        s, _ = _phi2_series(rest, b2, c, -x, y - x, rel_tol, max_diagonals)
        return math.exp(x) * s
    if y <= 0 and x - y >= 0 and rest >= 0 and b1 >= 0:
        s, _ = _phi2_series(b1, rest, c, x - y, -y, rel_tol, max_diagonals)
        return math.exp(y) * s
    s, abs_sum = _phi2_series(b1, b2, c, x, y, rel_tol, max_diagonals)
    if abs_sum > 1e8 * abs(s):
        raise NumericFailure("Phi2 series lost too many digits to cancellation", value=s)
    return s
