"""Discrete counting statistics via factorial and raw moments.

A finitely supported probability distribution P(0..N) has raw moments
M_{r,k} = sum n^k P(n) and factorial moments M_{f,k} = sum n^(k) P(n); the
latter vanish identically for k beyond the support, which is what makes them
the natural description of discrete counting experiments.  Raw and factorial
moments are linear images of one another through Stirling numbers, cumulants
follow from the standard moment-cumulant recurrence, and the distribution
itself is recovered from factorial moments by

    P(n) = (1/n!) sum_k (-1)^k / k! M_{f,n+k}.

Distributions built from exact probabilities (Fractions) keep every quantity
exact; float or mpf inputs stay floating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp

from .errors import NonConvergenceError
from .findiff import DEFAULT_PRECISION, NewtonSeries, falling_factorial
from .fock import (
    FockSpace,
    consistency_tolerance,
    diagonal_from_values,
    normal_ordered_operator,
)

NORMALIZATION_TOLERANCE = 1e-12
DEFAULT_TAIL = 1e-16

MOMENT_KINDS = ("raw", "factorial")


@dataclass(frozen=True)
class DiscreteDistribution:
    """P(n) on n = 0..n_max, normalized within 1e-12."""

    probabilities: tuple
    truncated_mass: object = 0  # tail mass dropped by a truncating constructor

    def __post_init__(self):
        probs = tuple(self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        if not probs:
            raise ValueError("distribution needs at least one probability")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be non-negative")
        total = sum(probs)
        if abs(total - 1) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @property
    def n_max(self) -> int:
        return len(self.probabilities) - 1

    @classmethod
    def from_pmf(cls, values) -> "DiscreteDistribution":
        return cls(tuple(values))

    @classmethod
    def binomial(cls, n: int, p) -> "DiscreteDistribution":
        """Binomial(n, p); exact when p is a Fraction (or int 0/1)."""
        if n < 0:
            raise ValueError("n must be non-negative")
        q = 1 - p
        return cls(tuple(math.comb(n, k) * p ** k * q ** (n - k)
                         for k in range(n + 1)))

    @classmethod
    def poisson(cls, lam, tail: float = DEFAULT_TAIL) -> "DiscreteDistribution":
        """Poisson(lam) truncated once the remaining mass drops below ``tail``
        and renormalized; the dropped mass is recorded."""
        return cls._truncated_geometric_like(
            lambda kprev, n: kprev * mp.convert(lam) / n,
            start=lambda: mp.exp(-mp.convert(lam)), tail=tail)

    @classmethod
    def geometric(cls, q, tail: float = DEFAULT_TAIL) -> "DiscreteDistribution":
        """P(n) = (1-q) q^n truncated at tail mass < ``tail`` and renormalized."""
        if not 0 <= float(q) < 1:
            raise ValueError("geometric ratio must satisfy 0 <= q < 1")
        return cls._truncated_geometric_like(
            lambda kprev, n: kprev * mp.convert(q),
            start=lambda: 1 - mp.convert(q), tail=tail)

    @classmethod
    def _truncated_geometric_like(cls, step, start, tail):
        with mp.workprec(DEFAULT_PRECISION):
            probs = [start()]
            cumulative = probs[0]
            n = 0
            while 1 - cumulative >= tail:
                n += 1
                probs.append(step(probs[-1], n))
                cumulative += probs[-1]
                if n > 100000:
                    raise NonConvergenceError("truncation tail never reached")
            dropped = 1 - cumulative
            probs = [p / cumulative for p in probs]
        return cls(tuple(probs), truncated_mass=dropped)


@dataclass(frozen=True)
class MomentSet:
    """Moments M_0..M_K of one kind, with optional matching cumulants."""

    kind: str
    values: tuple
    cumulants: tuple = None

    def __post_init__(self):
        if self.kind not in MOMENT_KINDS:
            raise ValueError(f"kind must be one of {MOMENT_KINDS}")
        object.__setattr__(self, "values", tuple(self.values))
        if abs(self.values[0] - 1) > NORMALIZATION_TOLERANCE:
            raise ValueError("zeroth moment must be 1")
        if self.cumulants is not None:
            object.__setattr__(self, "cumulants", tuple(self.cumulants))

    @property
    def max_k(self) -> int:
        return len(self.values) - 1


def _moment_sum(d: DiscreteDistribution, weight) -> object:
    # accumulate from n_max down to 0 to limit rounding on floating inputs;
    # exact inputs (Fractions) pass through untouched
    with mp.workprec(DEFAULT_PRECISION):
        total = 0
        for n in range(d.n_max, -1, -1):
            total = total + weight(n) * d.probabilities[n]
        return total


def factorial_moments(d: DiscreteDistribution, max_k: int) -> MomentSet:
    """M_{f,k} = sum_n n^(k) P(n) for k = 0..max_k."""
    if max_k < 0:
        raise ValueError("max_k must be non-negative")
    values = [_moment_sum(d, lambda n, k=k: falling_factorial(n, k))
              for k in range(max_k + 1)]
    return MomentSet("factorial", values)


def raw_moments(d: DiscreteDistribution, max_k: int) -> MomentSet:
    """M_{r,k} = sum_n n^k P(n) for k = 0..max_k."""
    if max_k < 0:
        raise ValueError("max_k must be non-negative")
    values = [_moment_sum(d, lambda n, k=k: n ** k)
              for k in range(max_k + 1)]
    return MomentSet("raw", values)


def stirling_second(n: int, k: int) -> int:
    """Stirling numbers of the second kind by the standard recurrence."""
    return _stirling2_row(n)[k] if 0 <= k <= n else 0


def stirling_first_signed(n: int, k: int) -> int:
    """Signed Stirling numbers of the first kind."""
    return _stirling1_row(n)[k] if 0 <= k <= n else 0


def _stirling2_row(n: int) -> list:
    row = [1]
    for m in range(1, n + 1):
        new = [0] * (m + 1)
        for k in range(1, m + 1):
            new[k] = (row[k] if k < m else 0) * k + row[k - 1]
        row = new
    return row


def _stirling1_row(n: int) -> list:
    row = [1]
    for m in range(1, n + 1):
        new = [0] * (m + 1)
        for k in range(1, m + 1):
            new[k] = row[k - 1] - (m - 1) * (row[k] if k < m else 0)
        new[0] = -(m - 1) * row[0] if m > 1 else 0
        row = new
    return row


def convert_moments(m: MomentSet, target_kind: str) -> MomentSet:
    """Exact linear conversion between raw and factorial moments.

    n^k = sum_j S2(k,j) n^(j) turns factorial into raw moments; the signed
    first-kind numbers invert the map.  The round trip is the identity.
    """
    if target_kind not in MOMENT_KINDS:
        raise ValueError(f"kind must be one of {MOMENT_KINDS}")
    if m.kind == target_kind:
        return m
    K = m.max_k
    table = _stirling2_row if target_kind == "raw" else _stirling1_row
    values = []
    for k in range(K + 1):
        row = table(k)
        acc = 0
        for j in range(k + 1):
            if row[j]:
                acc = acc + row[j] * m.values[j]
        values.append(acc)
    return MomentSet(target_kind, values)


def cumulants_from_moments(m: MomentSet) -> list:
    """C_k from M_k by C_k = M_k - sum_j C(k-1,j-1) C_j M_{k-j}.

    The recurrence is the coefficient-level form of taking the logarithm of
    the generating function; it applies to raw and factorial kinds alike.
    C_0 is reported as 0 (log of the normalization).
    """
    cumulants = [0]
    for k in range(1, m.max_k + 1):
        acc = m.values[k]
        for j in range(1, k):
            acc = acc - math.comb(k - 1, j - 1) * cumulants[j] * m.values[k - j]
        cumulants.append(acc)
    return cumulants


def generating_function(d: DiscreteDistribution, z, kind: str):
    """M(z): sum_n e^{zn} P(n) for raw, sum_n (1+z)^n P(n) for factorial."""
    if kind not in MOMENT_KINDS:
        raise ValueError(f"kind must be one of {MOMENT_KINDS}")
    with mp.workprec(DEFAULT_PRECISION):
        z = mp.convert(z)
        if kind == "raw":
            return _moment_sum(d, lambda n: mp.exp(z * n))
        return _moment_sum(d, lambda n: (1 + z) ** n)


def reconstruct_probability(m: MomentSet, n: int, max_terms: int,
                            tolerance: float = 1e-8):
    """P(n) = (1/n!) sum_{k<=max_terms} (-1)^k/k! M_{f,n+k}.

    Needs factorial moments through n + max_terms.  The last addend is the
    convergence proxy; if it has not decayed below ``tolerance`` times the
    sum, the reconstruction is flagged.  Exact for finitely supported
    distributions once the moments vanish.
    """
    if m.kind != "factorial":
        raise ValueError("reconstruction works on factorial moments")
    if n < 0 or max_terms < 0:
        raise ValueError("n and max_terms must be non-negative")
    if n + max_terms > m.max_k:
        raise ValueError(
            f"need moments through {n + max_terms}, have {m.max_k}")
    total = 0
    last = 0
    for k in range(max_terms + 1):
        last = m.values[n + k] / math.factorial(k)
        if k % 2:
            last = -last
        total = total + last
    value = total / math.factorial(n)
    if tolerance is not None:
        scale = abs(total) if total != 0 else 1
        if abs(last) > tolerance * scale:
            raise NonConvergenceError(
                f"reconstruction terms have not decayed: last {last}"
            )
    return value


@dataclass(frozen=True)
class IdentityReport:
    passed: bool
    max_deviation: object
    tolerance: object


def operator_identity_check(z, space: FockSpace,
                            precision_bits: int = DEFAULT_PRECISION
                            ) -> IdentityReport:
    """Check (1+z)^n = :e^{zn}: entrywise on the truncated space.

    The left side is the diagonal oracle; the right side is the assembled
    normal-ordered series with coefficients G_k = z^k.
    """
    with mp.workprec(precision_bits + 64):
        zv = mp.convert(z)
        oracle = diagonal_from_values(
            [(1 + zv) ** n for n in range(space.dimension)],
            space, precision_bits)
        series = NewtonSeries([zv ** k for k in range(space.cutoff + 1)],
                              0, precision_bits)
        assembled = normal_ordered_operator(series, space, space.cutoff)
        deviation = mp.mpf(0)
        for n in range(space.dimension):
            deviation = max(deviation,
                            abs(assembled.entry(n, n) - oracle.entry(n, n)))
        deviation = max(deviation, assembled.max_offdiagonal())
        tol = consistency_tolerance(precision_bits)
    return IdentityReport(bool(deviation <= tol), deviation, tol)
