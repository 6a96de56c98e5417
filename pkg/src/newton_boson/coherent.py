"""Coherent states, displacement, thermal density operator and Husimi values.

A coherent state is resolved on the truncated basis as

    v_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!),        n = 0..D,

with the missing tail mass reported as a deficit.  Expectation values of a
function given by its forward-difference coefficients reduce to the scalar
power series sum_k F_k/k! (|alpha|^2)^k; displacing an operator substitutes
a -> a + alpha, a^dag -> a^dag + conj(alpha) term by term without breaking
normal ordering.

The thermal oscillator (H = omega(n + n0), inverse temperature beta) has the
displaced density operator with term weights -(q - 1)^{k+1}/k!, q = e^{-beta
omega}; its vacuum expectation value over pi is the Husimi distribution

    Q(alpha) = (1/pi)(1 - q) exp((q - 1)|alpha|^2).

The zero-point offset n0 enters only the unnormalized Boltzmann weight and
cancels against the partition function.
"""

from __future__ import annotations

import math
import warnings
from collections import namedtuple
from dataclasses import dataclass

from mpmath import mp

from .errors import CutoffError, NonConvergenceError, TailError
from .findiff import DEFAULT_PRECISION, NewtonSeries
from .fock import (
    FockOperator,
    FockSpace,
    GUARD_BITS,
    identity_operator,
    ladder_operators,
    normal_ordered_operator,
    operator_exp,
)

DEFAULT_MAX_DEFICIT = 1e-6

SeriesValue = namedtuple("SeriesValue", ["value", "last_term"])


def recommended_cutoff(alpha) -> int:
    """Smallest cutoff for which the truncation deficit stays below ~1e-12."""
    a2 = abs(complex(alpha)) ** 2
    return math.ceil(max(4 * a2, a2 + 10 * math.sqrt(a2 + 1)))


def _estimated_deficit(a2: float, cutoff: int) -> float:
    """Leading Poisson tail term beyond the cutoff (crude upper scale)."""
    if a2 == 0:
        return 0.0
    if a2 >= cutoff + 2:
        return 1.0
    log_term = -a2 + (cutoff + 1) * math.log(a2) - math.lgamma(cutoff + 2)
    geometric = 1.0 / (1.0 - a2 / (cutoff + 2))
    return math.exp(min(log_term, 0.0)) * geometric


@dataclass(frozen=True)
class CoherentParams:
    alpha: complex
    space: FockSpace

    def __post_init__(self):
        a2 = abs(complex(self.alpha)) ** 2
        if (self.space.cutoff < recommended_cutoff(self.alpha)
                and _estimated_deficit(a2, self.space.cutoff) > 1e-12):
            warnings.warn(
                f"cutoff {self.space.cutoff} is below the recommended "
                f"{recommended_cutoff(self.alpha)} for |alpha|^2 = {a2:.3g}; "
                f"expect a visible tail",
                stacklevel=2,
            )


@dataclass(frozen=True)
class ThermalParams:
    """Inverse temperature, mode frequency and zero-point offset.

    Fields take anything mpmath can convert: floats, decimal strings (which
    avoid double rounding at high precision) or mpf values.
    """

    beta: float
    omega: float
    n0: float = 0.0

    def __post_init__(self):
        if not float(self.beta) > 0:
            raise ValueError("beta must be positive")
        if not float(self.omega) > 0:
            raise ValueError("omega must be positive")


@dataclass(frozen=True)
class CoherentState:
    amplitudes: tuple
    deficit: object  # 1 - ||v||^2, the truncated tail mass


def coherent_vector(p: CoherentParams,
                    precision_bits: int = DEFAULT_PRECISION,
                    max_deficit: float = DEFAULT_MAX_DEFICIT) -> CoherentState:
    """Closed-form coherent amplitudes on the truncated basis."""
    with mp.workprec(precision_bits + GUARD_BITS):
        alpha = mp.convert(p.alpha)
        gauss = mp.exp(-abs(alpha) ** 2 / 2)
        amps = []
        power = mp.mpf(1)
        for n in range(p.space.dimension):
            if n > 0:
                power *= alpha / mp.sqrt(mp.mpf(n))
            amps.append(gauss * power)
        norm2 = mp.fsum(abs(v) ** 2 for v in amps)
        deficit = 1 - norm2
        if deficit > max_deficit:
            raise TailError(
                f"truncation deficit {mp.nstr(deficit, 6)} exceeds "
                f"{max_deficit}; raise the cutoff"
            )
    return CoherentState(tuple(amps), deficit)


def displacement_operator(p: CoherentParams,
                          precision_bits: int = DEFAULT_PRECISION) -> FockOperator:
    """exp(alpha a^dag - conj(alpha) a) on the truncated space."""
    annihilation, creation, _ = ladder_operators(p.space, precision_bits)
    with mp.workprec(precision_bits + GUARD_BITS):
        alpha = mp.convert(p.alpha)
        generator = creation.scaled(alpha) - annihilation.scaled(mp.conj(alpha))
    return operator_exp(generator)


def coherent_expectation(series: NewtonSeries, alpha,
                         tolerance: float = 1e-8) -> SeriesValue:
    """<alpha| f(n) |alpha> = sum_k F_k/k! (|alpha|^2)^k through k_max.

    The magnitude of the final addend is reported as a convergence proxy;
    when it exceeds ``tolerance`` times the accumulated sum the series shows
    no sign of having settled and a NonConvergenceError is raised.  Pass
    ``tolerance=None`` to skip the check.
    """
    if series.k_min != 0:
        raise ValueError("expectation values need a regular series")
    with mp.workprec(series.precision_bits + GUARD_BITS):
        weight = abs(mp.convert(alpha)) ** 2
        total = mp.zero
        last = mp.zero
        for k in range(series.k_max + 1):
            last = (mp.convert(series.coefficient(k)) / math.factorial(k)
                    * weight ** k)
            total += last
        last_mag = abs(last)
        if tolerance is not None and last_mag > tolerance * max(
                abs(total), mp.mpf(2) ** -series.precision_bits):
            raise NonConvergenceError(
                f"last series term {mp.nstr(last_mag, 6)} has not decayed "
                f"below {tolerance} of the sum; extend the series order"
            )
    return SeriesValue(total, last_mag)


def displaced_operator(series: NewtonSeries, p: CoherentParams, r: int,
                       precision_bits: int = DEFAULT_PRECISION) -> FockOperator:
    """sum_{k<=r} F_k/k! (a^dag + conj(alpha))^k (a + alpha)^k.

    Equals the conjugation D^dag(alpha) [normal-ordered operator] D(alpha)
    on states with n <= D - 2r.
    """
    if series.k_min != 0:
        raise ValueError("displacement needs a regular series")
    if not 0 <= r <= series.k_max:
        raise ValueError(f"order {r} outside [0, {series.k_max}]")
    if 2 * r > p.space.cutoff:
        raise CutoffError(
            f"order {r} needs headroom 2r <= cutoff {p.space.cutoff}"
        )
    annihilation, creation, _ = ladder_operators(p.space, precision_bits)
    ident = identity_operator(p.space, precision_bits)
    with mp.workprec(precision_bits + GUARD_BITS):
        alpha = mp.convert(p.alpha)
        shifted = annihilation + ident.scaled(alpha)
        shifted_dag = creation + ident.scaled(mp.conj(alpha))
        total = ident.scaled(mp.convert(series.coefficient(0)))
        power = ident
        for k in range(1, r + 1):
            power = shifted_dag * power * shifted
            weight = mp.convert(series.coefficient(k)) / math.factorial(k)
            total = total + power.scaled(weight)
    return total


def thermal_density_coefficients(t: ThermalParams, r: int,
                                 precision_bits: int = DEFAULT_PRECISION
                                 ) -> NewtonSeries:
    """Newton coefficients of the normalized thermal density operator.

    Term weight -(q-1)^{k+1}/k! with q = e^{-beta omega}; stored as
    F_k = -(q-1)^{k+1}.  Partial sums of order >= n give the exact geometric
    populations (1-q) q^n, independent of the zero-point offset n0.
    """
    if r < 0:
        raise ValueError("order must be non-negative")
    with mp.workprec(precision_bits + GUARD_BITS):
        q = mp.exp(-mp.convert(t.beta) * mp.convert(t.omega))
        coeffs = [-(q - 1) ** (k + 1) for k in range(r + 1)]
    return NewtonSeries(coeffs, 0, precision_bits)


def boltzmann_weight(t: ThermalParams, n: int,
                     precision_bits: int = DEFAULT_PRECISION):
    """Unnormalized weight e^{-beta omega (n + n0)}; the only place n0 appears."""
    with mp.workprec(precision_bits + GUARD_BITS):
        return mp.exp(-mp.convert(t.beta) * mp.convert(t.omega)
                      * (n + mp.convert(t.n0)))


def thermal_partition(t: ThermalParams,
                      precision_bits: int = DEFAULT_PRECISION):
    """Z = sum_n e^{-beta omega (n + n0)} = e^{-beta omega n0} / (1 - q)."""
    with mp.workprec(precision_bits + GUARD_BITS):
        q = mp.exp(-mp.convert(t.beta) * mp.convert(t.omega))
        return mp.exp(-mp.convert(t.beta) * mp.convert(t.omega)
                      * mp.convert(t.n0)) / (1 - q)


def husimi(alpha, t: ThermalParams,
           precision_bits: int = DEFAULT_PRECISION):
    """Closed-form Husimi value (1/pi)(1-q) exp((q-1)|alpha|^2)."""
    with mp.workprec(precision_bits + GUARD_BITS):
        q = mp.exp(-mp.convert(t.beta) * mp.convert(t.omega))
        a2 = abs(mp.convert(alpha)) ** 2
        return (1 - q) * mp.exp((q - 1) * a2) / mp.pi


def husimi_series(alpha, t: ThermalParams, r: int = 60,
                  precision_bits: int = DEFAULT_PRECISION):
    """Numeric cross-check: vacuum expectation of the displaced thermal series."""
    series = thermal_density_coefficients(t, r, precision_bits)
    value = coherent_expectation(series, alpha, tolerance=None).value
    with mp.workprec(precision_bits + GUARD_BITS):
        return value / mp.pi


def thermal_density_operator(t: ThermalParams, space: FockSpace,
                             precision_bits: int = DEFAULT_PRECISION
                             ) -> FockOperator:
    """The undisplaced thermal density matrix, exact through the cutoff."""
    series = thermal_density_coefficients(t, space.cutoff, precision_bits)
    return normal_ordered_operator(series, space, space.cutoff)
