"""Scalar finite-difference calculus.

Forward differences, falling factorial powers (including negative order),
Newton coefficients via the binomial transform

    F_k = sum_{l=0}^{k} (-1)^(k-l) C(k,l) f(l),

and evaluation of partial sums

    f(x) ~ sum_{k} F_k / k! * x^(k),        x^(k) = x(x-1)...(x-k+1).

The r-th partial sum is the degree-r interpolation polynomial through the
integer samples f(0), ..., f(r), so it reproduces f exactly at 0..r.

All floating computation runs at a configurable binary precision (default
256 bits) through mpmath.  The binomial transform is an alternating sum, so
each coefficient carries an estimate of the bits lost to cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from mpmath import mp, mpf

from .errors import DomainError, PoleError, PrecisionError

DEFAULT_PRECISION = 256

# Coefficients whose reliable bits drop below this are considered garbage.
MIN_RELIABLE_BITS = 16


@dataclass(frozen=True)
class ScalarFunction:
    """A function known pointwise at integers >= ``domain_floor``.

    ``evaluator`` maps a real/complex argument to a real/complex value; the
    only requirement is that it is defined at every integer at or above the
    floor.  Evaluation outside the domain must raise, never return NaN.
    """

    evaluator: Callable
    domain_floor: int = 0
    name: str = ""

    def __call__(self, x):
        return self.evaluator(x)

    def require_defined_at(self, n: int):
        if n < self.domain_floor:
            raise DomainError(
                f"function {self.name or self.evaluator!r} undefined at {n} "
                f"(domain floor {self.domain_floor})"
            )


@dataclass(frozen=True)
class NewtonSeries:
    """Ordered coefficients of an expansion in falling factorial powers.

    ``coefficients[i]`` belongs to order ``k = k_min + i``.  For k >= 0 the
    stored value is F_k and the 1/k! weight is applied at evaluation time;
    for k < 0 (generalized series) the stored value is the literal
    multiplier of x^(k), since factorials of negative integers do not exist.
    """

    coefficients: tuple
    k_min: int = 0
    precision_bits: int = DEFAULT_PRECISION
    cancellation_loss_bits: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if self.cancellation_loss_bits is None:
            object.__setattr__(
                self, "cancellation_loss_bits", (0.0,) * len(self.coefficients)
            )
        else:
            object.__setattr__(
                self, "cancellation_loss_bits", tuple(self.cancellation_loss_bits)
            )
        if len(self.cancellation_loss_bits) != len(self.coefficients):
            raise ValueError("one cancellation estimate per coefficient required")

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.coefficients) - 1

    def coefficient(self, k: int):
        if not self.k_min <= k <= self.k_max:
            raise IndexError(f"order {k} outside [{self.k_min}, {self.k_max}]")
        return self.coefficients[k - self.k_min]

    def reliable_bits(self, k: int) -> float:
        return self.precision_bits - self.cancellation_loss_bits[k - self.k_min]

    def unreliable_orders(self) -> list:
        return [
            self.k_min + i
            for i, loss in enumerate(self.cancellation_loss_bits)
            if self.precision_bits - loss < MIN_RELIABLE_BITS
        ]


def sample_at_integer(f: ScalarFunction, n: int):
    """Evaluate f at an integer; NaN results are hard domain errors."""
    f.require_defined_at(n)
    value = mp.convert(f(n))
    if mp.isnan(value):
        raise DomainError(
            f"function {f.name or f.evaluator!r} returned NaN at {n}"
        )
    return value


def forward_difference(f: ScalarFunction, n: int, k: int,
                       precision_bits: int = DEFAULT_PRECISION):
    """k-th order forward difference sum_{l=0}^{k} (-1)^(k-l) C(k,l) f(n+l)."""
    if k < 0:
        raise ValueError("difference order must be non-negative")
    with mp.workprec(precision_bits):
        total = mp.zero
        for l in range(k + 1):
            term = math.comb(k, l) * sample_at_integer(f, n + l)
            total = total - term if (k - l) % 2 else total + term
        return total


def newton_coefficients(f: ScalarFunction, max_order: int,
                        precision_bits: int = DEFAULT_PRECISION) -> NewtonSeries:
    """Binomial transform of f(0..max_order), with cancellation tracking.

    Raises PrecisionError when a coefficient retains fewer than 16 reliable
    bits; raise the working precision to push the usable order further.
    """
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    with mp.workprec(precision_bits):
        samples = [sample_at_integer(f, l) for l in range(max_order + 1)]
        coeffs = []
        losses = []
        for k in range(max_order + 1):
            total = mp.zero
            peak = mp.zero
            for l in range(k + 1):
                term = math.comb(k, l) * samples[l]
                peak = max(peak, abs(term))
                total = total - term if (k - l) % 2 else total + term
            coeffs.append(total)
            # An exactly zero sum is genuine cancellation (identical samples
            # subtracting), not noise; only a nonzero residue measures loss.
            if total == 0 or peak == 0:
                losses.append(0.0)
            else:
                losses.append(max(0.0, float(mp.log(peak / abs(total), 2))))
        bad = [k for k, loss in enumerate(losses)
               if precision_bits - loss < MIN_RELIABLE_BITS]
        if bad:
            raise PrecisionError(
                f"coefficients {bad} keep fewer than {MIN_RELIABLE_BITS} reliable "
                f"bits at precision {precision_bits}; increase precision_bits"
            )
        return NewtonSeries(coeffs, 0, precision_bits, losses)


def falling_factorial(n, k: int):
    """Falling factorial power n^(k).

    For k >= 0: n(n-1)...(n-k+1), empty product = 1.  For k < 0 the defining
    identity n^(-k) (n+k)^(k) = 1 gives 1/((n+1)(n+2)...(n-k)); evaluation at
    one of the poles n = -1, ..., k raises PoleError.

    The arithmetic is generic: integers stay integers, Fractions stay exact,
    mpf/mpc stay at their precision.
    """
    if k >= 0:
        result = 1
        for j in range(k):
            result = result * (n - j)
        return result
    denom = 1
    for j in range(1, -k + 1):
        factor = n + j
        if factor == 0:
            raise PoleError(f"falling factorial pole at n={n}, k={k}")
        denom = denom * factor
    if isinstance(denom, int):
        return Fraction(1, denom)
    return 1 / denom


def newton_partial_sum(series: NewtonSeries, r: int, x):
    """Partial sum of the series through order r at argument x.

    Regular orders contribute F_k/k! * x^(k); generalized (k < 0) orders
    contribute their stored coefficient times x^(k) verbatim.
    """
    if not series.k_min <= r <= series.k_max:
        raise ValueError(f"order {r} outside [{series.k_min}, {series.k_max}]")
    total = 0
    for k in range(series.k_min, r + 1):
        c = series.coefficient(k)
        if k < 0:
            total = total + c * falling_factorial(x, k)
        else:
            total = total + c * falling_factorial(x, k) / math.factorial(k)
    return total


def negative_power_fractions(rr: int, max_order: int) -> list:
    """Exact coefficients F_k of the regular Newton series of n^(-rr).

    The term weight is F_k/k! = (1/rr!) (-1)^k / ((1 + k/rr) k!), i.e.
    F_k = (-1)^k rr / (rr! (rr + k)).
    """
    if rr < 1:
        raise ValueError("rr must be a positive integer")
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    rfac = math.factorial(rr)
    return [
        Fraction((-1) ** k * rr, rfac * (rr + k))
        for k in range(max_order + 1)
    ]


def negative_power_series(rr: int, max_order: int,
                          precision_bits: int = DEFAULT_PRECISION) -> NewtonSeries:
    """Regular (k_min = 0) Newton series of the negative factorial power n^(-rr).

    Partial sums through order >= n reproduce 1/((n+1)...(n+rr)) exactly at
    integers n = 0..max_order, by the interpolation property.
    """
    fractions = negative_power_fractions(rr, max_order)
    with mp.workprec(precision_bits):
        coeffs = [mpf(c.numerator) / c.denominator for c in fractions]
    return NewtonSeries(coeffs, 0, precision_bits)
