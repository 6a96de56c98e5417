"""Holstein-Primakoff spin representations on a truncated boson space.

The raising/lowering operators are dressed by the root factor

    h(n) = sqrt(1 - n/(2S)),

which admits three surrogates: the forward-difference (``newton``) truncation
of order r, which reproduces h at the integers 0..r; the Maclaurin
(``taylor``) truncation, a polynomial that never vanishes at n = 2S and hence
couples the physical and unphysical sectors; and the ``exact`` scheme, the
finite Newton sum of order 2S that reproduces every spin matrix element and
annihilates |2S>.

Spin length is stored as the integer 2S to avoid floating half-integers.  The
default cutoff 2S + 2 keeps one unphysical state to witness (de)coupling and
one boundary state that is excluded from residual reporting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .errors import InternalConsistencyError
from .findiff import (
    DEFAULT_PRECISION,
    NewtonSeries,
    ScalarFunction,
    newton_coefficients,
)
from .fock import (
    FockOperator,
    FockSpace,
    GUARD_BITS,
    consistency_tolerance,
    diagonal_from_values,
    ladder_operators,
    normal_ordered_operator,
)

SCHEMES = ("newton", "taylor", "exact")


@dataclass(frozen=True)
class SpinRep:
    """Spin length (as 2S), truncation order, scheme and carrier space."""

    two_s: int
    r: int
    scheme: str
    space: FockSpace = None

    def __post_init__(self):
        if self.two_s < 1:
            raise ValueError("two_s must be a positive integer")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.scheme == "exact":
            object.__setattr__(self, "r", self.two_s)
        if self.r < 0:
            raise ValueError("truncation order must be non-negative")
        if self.scheme == "newton" and self.r > self.two_s:
            raise ValueError("newton truncation order cannot exceed 2S")
        if self.space is None:
            object.__setattr__(self, "space", FockSpace(self.two_s + 2))
        if self.space.cutoff < self.two_s + 1:
            raise ValueError("cutoff must be at least 2S + 1 so the "
                             "unphysical sector is observable")


@dataclass(frozen=True)
class SpinOperators:
    s_plus: FockOperator
    s_minus: FockOperator
    s_z: FockOperator


def hp_root(two_s: int) -> ScalarFunction:
    """The root factor h(n) = sqrt(1 - n/(2S)), real on 0..2S."""
    return ScalarFunction(
        lambda n: mp.sqrt(1 - mp.mpf(n) / two_s),
        name=f"hp_root(2S={two_s})",
    )


def hp_newton_coefficients(two_s: int, r: int,
                           precision_bits: int = DEFAULT_PRECISION) -> NewtonSeries:
    """Forward differences H_k = sum_l (-1)^(k-l) C(k,l) sqrt(1 - l/(2S))."""
    if not 0 <= r <= two_s:
        raise ValueError("order must satisfy 0 <= r <= 2S")
    return newton_coefficients(hp_root(two_s), r, precision_bits)


def hp_taylor_coefficients(two_s: int, r: int) -> list:
    """Maclaurin coefficients of sqrt(1 - x/(2S)) through order r, exact.

    Generalized binomial series: coefficient j is C(1/2, j) (-1/(2S))^j.
    """
    if r < 0:
        raise ValueError("order must be non-negative")
    coeffs = []
    binom = Fraction(1)  # C(1/2, j)
    for j in range(r + 1):
        if j > 0:
            binom = binom * (Fraction(1, 2) - (j - 1)) / j
        coeffs.append(binom * Fraction(-1, two_s) ** j)
    return coeffs


def _taylor_surrogate_values(two_s: int, r: int, space: FockSpace) -> list:
    coeffs = hp_taylor_coefficients(two_s, r)
    values = []
    for n in range(space.dimension):
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * n + c
        values.append(acc)
    return values


def spin_operators(rep: SpinRep,
                   precision_bits: int = DEFAULT_PRECISION) -> SpinOperators:
    """S+ = sqrt(2S) h(n) a,  S- = sqrt(2S) a^dag h(n),  Sz = S - n."""
    space = rep.space
    annihilation, creation, _ = ladder_operators(space, precision_bits)
    if rep.scheme == "taylor":
        h_op = diagonal_from_values(
            _taylor_surrogate_values(rep.two_s, rep.r, space),
            space, precision_bits)
    else:
        series = hp_newton_coefficients(rep.two_s, rep.r, precision_bits)
        h_op = normal_ordered_operator(series, space, rep.r)
    with mp.workprec(precision_bits + GUARD_BITS):
        root = mp.sqrt(mp.mpf(rep.two_s))
        s = mp.mpf(rep.two_s) / 2
        s_z_values = [s - n for n in range(space.dimension)]
    s_plus = (h_op * annihilation).scaled(root)
    s_minus = (creation * h_op).scaled(root)
    s_z = diagonal_from_values(s_z_values, space, precision_bits)
    return SpinOperators(s_plus, s_minus, s_z)


def exact_spin_matrices(two_s: int, space: FockSpace = None,
                        precision_bits: int = DEFAULT_PRECISION) -> SpinOperators:
    """Angular-momentum ladder oracle in the boson dictionary m = S - n.

    The (2S+1)-dimensional spin matrices are embedded with zero rows and
    columns on the unphysical states n > 2S.
    """
    if two_s < 1:
        raise ValueError("two_s must be a positive integer")
    if space is None:
        space = FockSpace(two_s + 2)
    dim = space.dimension
    with mp.workprec(precision_bits + GUARD_BITS):
        s = mp.mpf(two_s) / 2
        casimir = s * (s + 1)
        plus = mp.matrix(dim, dim)
        minus = mp.matrix(dim, dim)
        zmat = mp.matrix(dim, dim)
        for n in range(min(two_s, space.cutoff) + 1):
            zmat[n, n] = s - n
        for n in range(1, min(two_s, space.cutoff) + 1):
            m = s - n
            amp = mp.sqrt(casimir - m * (m + 1))
            plus[n - 1, n] = amp
            minus[n, n - 1] = amp
    return SpinOperators(
        FockOperator(space, plus, 0, (-1, -1), precision_bits),
        FockOperator(space, minus, 1, (1, 1), precision_bits),
        FockOperator(space, zmat, 0, (0, 0), precision_bits),
    )


def commutator_residual(rep: SpinRep,
                        precision_bits: int = DEFAULT_PRECISION) -> list:
    """Diagonal of R = [S+, S-] - 2 Sz for n = 0 .. cutoff-2.

    The top two basis states, where ladder truncation corrupts the products,
    are excluded from the report.  A non-diagonal R signals a bug.
    """
    ops = spin_operators(rep, precision_bits)
    residual = (ops.s_plus * ops.s_minus - ops.s_minus * ops.s_plus
                - ops.s_z.scaled(2))
    tol = consistency_tolerance(precision_bits)
    scale = max(mp.mpf(1), residual.max_abs())
    off = residual.max_offdiagonal()
    if off > tol * scale:
        raise InternalConsistencyError(
            f"spin commutator residual is not diagonal: off-diagonal {off}"
        )
    return [residual.entry(n, n) for n in range(rep.space.cutoff - 1)]
