"""Truncated Fock-space linear algebra.

Ladder and number operators on the basis {|0>, ..., |D>}, diagonal operator
functions (the exact oracle every expansion is tested against), normal-ordered
Newton-series operators, k-fold commutators with the annihilator, and the
lowering generating function  G(t) = e^{t a} f(n) e^{-t a}.

Truncation semantics: the boundary state |D> breaks identities that the
infinite-space operators satisfy (e.g. [a, a^dag] = 1 fails on |D>).  Each
operator therefore carries ``valid_degree`` d: its action agrees with the
compressed infinite-space operator on states with n <= D - d.  The band range
and valid degree are propagated through sums, products and adjoints.

Entries are mpmath numbers computed with 64 guard bits above the requested
working precision, so that paired square roots (as in a^dag a) recombine to
exact integers when rounded back to the working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp

from .errors import CutoffError, DomainError, InternalConsistencyError
from .findiff import (
    DEFAULT_PRECISION,
    NewtonSeries,
    ScalarFunction,
    falling_factorial,
    newton_partial_sum,
    sample_at_integer,
)

GUARD_BITS = 64


@dataclass(frozen=True)
class FockSpace:
    """Number-state basis {|0>, ..., |cutoff>}."""

    cutoff: int

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")

    @property
    def dimension(self) -> int:
        return self.cutoff + 1


class FockOperator:
    """A (D+1)x(D+1) operator on a truncated Fock space.

    ``valid_degree``: entries are trustworthy on states with n <= D - d.
    ``band``: (lowest, highest) diagonal offset that may be populated, where
    positive offsets raise the boson number.
    """

    def __init__(self, space: FockSpace, matrix, valid_degree: int = 0,
                 band=(0, 0), precision_bits: int = DEFAULT_PRECISION):
        if matrix.rows != space.dimension or matrix.cols != space.dimension:
            raise ValueError("matrix dimensions do not match the space")
        self.space = space
        self.matrix = matrix
        self.valid_degree = min(max(valid_degree, 0), space.cutoff)
        self.band = band
        self.precision_bits = precision_bits

    # -- internal helpers -------------------------------------------------

    def _guard(self):
        return mp.workprec(self.precision_bits + GUARD_BITS)

    def _join(self, other):
        if self.space.cutoff != other.space.cutoff:
            raise ValueError("operators act on different spaces")
        return max(self.precision_bits, other.precision_bits)

    def _clip_band(self, lo, hi):
        d = self.space.cutoff
        return (max(lo, -d), min(hi, d))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        prec = self._join(other)
        with mp.workprec(prec + GUARD_BITS):
            mat = self.matrix + other.matrix
        return FockOperator(
            self.space, mat,
            max(self.valid_degree, other.valid_degree),
            self._clip_band(min(self.band[0], other.band[0]),
                            max(self.band[1], other.band[1])),
            prec,
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, scalar):
        with self._guard():
            mat = self.matrix * mp.convert(scalar)
        return FockOperator(self.space, mat, self.valid_degree, self.band,
                            self.precision_bits)

    def __mul__(self, other):
        if not isinstance(other, FockOperator):
            return self.scaled(other)
        prec = self._join(other)
        with mp.workprec(prec + GUARD_BITS):
            mat = self.matrix * other.matrix
        # self acts after other: other's output at n + hi_other must still be
        # trustworthy for self.
        degree = max(other.valid_degree,
                     self.valid_degree + other.band[1], 0)
        band = self._clip_band(self.band[0] + other.band[0],
                               self.band[1] + other.band[1])
        return FockOperator(self.space, mat, degree, band, prec)

    def __rmul__(self, scalar):
        return self.scaled(scalar)

    def dagger(self):
        dim = self.space.dimension
        with self._guard():
            mat = mp.matrix(dim, dim)
            for i in range(dim):
                for j in range(dim):
                    mat[i, j] = mp.conj(self.matrix[j, i])
        return FockOperator(
            self.space, mat,
            max(0, -self.band[0]),
            self._clip_band(-self.band[1], -self.band[0]),
            self.precision_bits,
        )

    def apply(self, vector):
        """Apply to a state vector (sequence of D+1 amplitudes)."""
        dim = self.space.dimension
        if len(vector) != dim:
            raise ValueError("vector length does not match the space")
        with self._guard():
            col = mp.matrix([mp.convert(v) for v in vector])
            out = self.matrix * col
        return [out[i] for i in range(dim)]

    # -- inspection ----------------------------------------------------------

    def entry(self, i: int, j: int):
        return self.matrix[i, j]

    def diagonal(self):
        return [self.matrix[n, n] for n in range(self.space.dimension)]

    def max_offdiagonal(self):
        dim = self.space.dimension
        peak = mp.mpf(0)
        for i in range(dim):
            for j in range(dim):
                if i != j:
                    peak = max(peak, abs(self.matrix[i, j]))
        return peak

    def max_abs(self):
        dim = self.space.dimension
        return max(abs(self.matrix[i, j])
                   for i in range(dim) for j in range(dim))

    def rounded(self):
        """Entries rounded to the operator's working precision."""
        dim = self.space.dimension
        with mp.workprec(self.precision_bits):
            out = mp.matrix(dim, dim)
            for i in range(dim):
                for j in range(dim):
                    out[i, j] = +self.matrix[i, j]
        return FockOperator(self.space, out, self.valid_degree, self.band,
                            self.precision_bits)


def max_abs_diff(lhs: FockOperator, rhs: FockOperator):
    if lhs.space.cutoff != rhs.space.cutoff:
        raise ValueError("operators act on different spaces")
    dim = lhs.space.dimension
    with mp.workprec(max(lhs.precision_bits, rhs.precision_bits) + GUARD_BITS):
        return max(abs(lhs.matrix[i, j] - rhs.matrix[i, j])
                   for i in range(dim) for j in range(dim))


def consistency_tolerance(precision_bits: int):
    """Per-entry relative tolerance for internal cross-checks."""
    return mp.mpf(2) ** (-(precision_bits - 32))


def zero_operator(space: FockSpace, precision_bits: int = DEFAULT_PRECISION):
    return FockOperator(space, mp.matrix(space.dimension, space.dimension),
                        0, (0, 0), precision_bits)


def identity_operator(space: FockSpace, precision_bits: int = DEFAULT_PRECISION):
    dim = space.dimension
    mat = mp.matrix(dim, dim)
    for n in range(dim):
        mat[n, n] = mp.mpf(1)
    return FockOperator(space, mat, 0, (0, 0), precision_bits)


def ladder_operators(space: FockSpace, precision_bits: int = DEFAULT_PRECISION):
    """Annihilation, creation and number operators on the truncated space.

    a|n> = sqrt(n)|n-1> populates the first superdiagonal, a^dag the first
    subdiagonal; the number operator is returned as the actual product
    a^dag * a, whose diagonal recombines to exact integers at the working
    precision.  The creation operator has valid_degree 1: a^dag|D> leaks out
    of the space and is lost.
    """
    dim = space.dimension
    with mp.workprec(precision_bits + GUARD_BITS):
        lower = mp.matrix(dim, dim)
        raise_ = mp.matrix(dim, dim)
        for n in range(1, dim):
            root = mp.sqrt(mp.mpf(n))
            lower[n - 1, n] = root
            raise_[n, n - 1] = root
    annihilation = FockOperator(space, lower, 0, (-1, -1), precision_bits)
    creation = FockOperator(space, raise_, 1, (1, 1), precision_bits)
    number = creation * annihilation
    return annihilation, creation, number


def diagonal_operator(f: ScalarFunction, space: FockSpace,
                      precision_bits: int = DEFAULT_PRECISION,
                      allow_complex: bool = False) -> FockOperator:
    """diag(f(0), ..., f(D)): the exact oracle for every expansion.

    With ``allow_complex`` off (the default), an evaluator that produces a
    complex value (e.g. the square root of a negative argument) is a hard
    domain error rather than silent complex leakage.
    """
    dim = space.dimension
    with mp.workprec(precision_bits + GUARD_BITS):
        mat = mp.matrix(dim, dim)
        for n in range(dim):
            value = sample_at_integer(f, n)
            if not allow_complex and mp.im(value) != 0:
                raise DomainError(
                    f"function {f.name or f.evaluator!r} is complex at n={n}; "
                    "pass allow_complex=True to accept complex entries"
                )
            mat[n, n] = value
    return FockOperator(space, mat, 0, (0, 0), precision_bits)


def diagonal_from_values(values, space: FockSpace,
                         precision_bits: int = DEFAULT_PRECISION) -> FockOperator:
    dim = space.dimension
    if len(values) != dim:
        raise ValueError("need one diagonal value per basis state")
    with mp.workprec(precision_bits + GUARD_BITS):
        mat = mp.matrix(dim, dim)
        for n, v in enumerate(values):
            mat[n, n] = mp.convert(v)
    return FockOperator(space, mat, 0, (0, 0), precision_bits)


def normal_ordered_operator(series: NewtonSeries, space: FockSpace,
                            r: int) -> FockOperator:
    """sum_{k<=r} (F_k/k!) (a^dag)^k a^k, assembled from ladder products.

    The result of the assembly must be diagonal with n-th entry equal to the
    Newton partial sum at n; any mismatch beyond the internal tolerance is a
    bug in the operator algebra, not a user error.
    """
    if series.k_min != 0:
        raise ValueError("normal-ordered assembly requires a regular series")
    if not 0 <= r <= series.k_max:
        raise ValueError(f"order {r} outside [0, {series.k_max}]")
    prec = series.precision_bits
    annihilation, creation, _ = ladder_operators(space, prec)
    accumulated = zero_operator(space, prec)
    power = identity_operator(space, prec)  # (a^dag)^k a^k
    with mp.workprec(prec + GUARD_BITS):
        for k in range(r + 1):
            if k > 0:
                power = creation * power * annihilation
            weight = mp.convert(series.coefficient(k)) / math.factorial(k)
            accumulated = accumulated + power.scaled(weight)
        predicted = [newton_partial_sum(series, r, n)
                     for n in range(space.dimension)]
        tol = consistency_tolerance(prec)
        off = accumulated.max_offdiagonal()
        scale = max(mp.mpf(1), accumulated.max_abs())
        if off > tol * scale:
            raise InternalConsistencyError(
                f"normal-ordered assembly is not diagonal: off-diagonal {off}"
            )
        for n, want in enumerate(predicted):
            got = accumulated.matrix[n, n]
            if abs(got - want) > tol * max(mp.mpf(1), abs(want)):
                raise InternalConsistencyError(
                    f"normal-ordered diagonal deviates at n={n}: {got} vs {want}"
                )
    result = FockOperator(space, accumulated.matrix, 0, (0, 0), prec)
    return result


def kfold_commutator(f: ScalarFunction, space: FockSpace, k: int,
                     precision_bits: int = DEFAULT_PRECISION) -> FockOperator:
    """[a, f(n)]_k by k nested matrix commutators.

    Equals diag(Delta^k f) a^k on states with n <= D - k, where the diagonal
    is built from forward differences of f.
    """
    if k < 1:
        raise ValueError("commutator order must be positive")
    if k > space.cutoff:
        raise CutoffError(
            f"commutator order {k} exceeds the cutoff {space.cutoff}"
        )
    annihilation, _, _ = ladder_operators(space, precision_bits)
    nested = diagonal_operator(f, space, precision_bits)
    for _ in range(k):
        nested = annihilation * nested - nested * annihilation
    return nested


def generating_function(f: ScalarFunction, space: FockSpace, t, order: int,
                        precision_bits: int = DEFAULT_PRECISION) -> FockOperator:
    """Partial sum sum_{k<=order} (t^k/k!) Delta^k f(n) a^k of G(t).

    Difference orders above ``order`` are dropped; the sum agrees with the
    conjugation e^{t a} f(n) e^{-t a} wherever those orders vanish, and in
    general on states carrying at most ``order`` bosons.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    if order > space.cutoff:
        raise CutoffError(f"order {order} exceeds the cutoff {space.cutoff}")
    dim = space.dimension
    with mp.workprec(precision_bits + GUARD_BITS):
        samples = [sample_at_integer(f, n) for n in range(dim)]
        t = mp.convert(t)
        mat = mp.matrix(dim, dim)
        for k in range(order + 1):
            # entry (n-k, n): (t^k/k!) Delta^k f(n-k) sqrt(n^(k)); the needed
            # differences only reference samples inside the cutoff.
            weight = t ** k / math.factorial(k)
            for n in range(k, dim):
                m = n - k
                diff = mp.zero
                for l in range(k + 1):
                    term = math.comb(k, l) * samples[m + l]
                    diff = diff - term if (k - l) % 2 else diff + term
                amp = mp.sqrt(mp.mpf(falling_factorial(n, k)))
                mat[m, n] += weight * diff * amp
    return FockOperator(space, mat, 0, (-order, 0), precision_bits)


def operator_exp(generator: FockOperator) -> FockOperator:
    """Matrix exponential by scaling and squaring with a Taylor core.

    Exactness on the truncated space is not tracked by band metadata; callers
    reason about truncation via tail bounds (nilpotent generators make the
    series terminate and the result exact).
    """
    space = generator.space
    dim = space.dimension
    prec = generator.precision_bits
    with mp.workprec(prec + GUARD_BITS):
        norm = max(mp.mpf(1e-30), generator.max_abs() * dim)
        squarings = max(0, int(mp.ceil(mp.log(norm, 2))) + 1)
        scaled = generator.matrix * (mp.mpf(2) ** -squarings)
        result = mp.matrix(dim, dim)
        term = mp.matrix(dim, dim)
        for n in range(dim):
            result[n, n] = mp.mpf(1)
            term[n, n] = mp.mpf(1)
        threshold = mp.mpf(2) ** (-(prec + GUARD_BITS // 2))
        k = 0
        while True:
            k += 1
            term = term * scaled * (mp.mpf(1) / k)
            result = result + term
            peak = max(abs(term[i, j]) for i in range(dim) for j in range(dim))
            if peak < threshold or k > 40 * dim:
                break
        for _ in range(squarings):
            result = result * result
    d = space.cutoff
    return FockOperator(space, result, d, (-d, d), prec)
