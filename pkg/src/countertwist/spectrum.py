"""Eigenvalue spectra of the countertwisting matrix, exact where possible.

The characteristic polynomial of the matrix splits into two chain factors,
each a polynomial in mu = lambda^2 after stripping lambda factors
(:mod:`countertwist.charpoly`).  This module turns those exact integer
polynomials into eigenvalues:

* mu-degree <= 4: closed-form radical roots (linear, quadratic, Cardano,
  Ferrari) carried as explicit expression trees alongside certified
  arbitrary-precision values;
* any mu-degree: a simultaneous Aberth-Ehrlich root finder with a certified
  residual bound, used both beyond the radical range and as an independent
  route for cross-checking.

Multiplicities are always structural — twin-chain doubling for half-integer
spins and stripped lambda powers — never inferred from numerical clustering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from mpmath import mp

from .charpoly import (
    IntPolynomial,
    SolvabilityCategory,
    SolvabilityClass,
    block_polynomials,
    classify_solvability,
    strip_lambda_power,
    to_mu_polynomial,
)
from .errors import (
    InternalConsistencyError,
    InvalidInputError,
    NumericFailureError,
    SpectralConsistencyError,
)
from .spin_algebra import DEFAULT_PRECISION, HalfInt, _require_precision, _require_spin

__all__ = [
    "RadicalExpr",
    "Rational",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Sqrt",
    "Cbrt",
    "Exactness",
    "Eigenvalue",
    "SpectrumReport",
    "roots_even_poly",
    "roots_numeric",
    "spectrum",
]

# Extra decimal digits used while evaluating expression trees; generous enough
# to absorb the cancellation inside nested Cardano/Ferrari forms.
_EVAL_GUARD = 30


# ---------------------------------------------------------- expression trees


class RadicalExpr:
    """Exact closed-form expression built from rationals and radicals.

    Evaluation is complex-capable: square and cube roots of negative numbers
    take the principal branch, which is what the cubic formula needs when all
    three roots are real (the imaginary parts then cancel).
    """

    def evaluate(self, precision: int = DEFAULT_PRECISION):
        """Value at ``precision`` digits; an ``mpc`` when genuinely complex."""
        _require_precision(precision)
        with mp.workdps(precision + _EVAL_GUARD):
            raw = self._eval()
        with mp.workdps(precision):
            if isinstance(raw, mp.mpc):
                if raw.imag == 0:
                    return +raw.real
                return mp.mpc(+raw.real, +raw.imag)
            return +raw

    def evaluate_real(self, precision: int = DEFAULT_PRECISION):
        """Real value at ``precision`` digits; residual imaginary parts from
        principal-branch arithmetic are certified negligible and dropped."""
        _require_precision(precision)
        with mp.workdps(precision + _EVAL_GUARD):
            raw = self._eval()
            if isinstance(raw, mp.mpc):
                scale = max(mp.mpf(1), abs(raw))
                if abs(raw.imag) > scale * mp.mpf(10) ** (-(precision + 5)):
                    raise InternalConsistencyError(
                        f"expression evaluates to the non-real value {raw}"
                    )
                raw = raw.real
        with mp.workdps(precision):
            return +raw

    def _eval(self):  # pragma: no cover - overridden by every node type
        raise NotImplementedError


@dataclass(frozen=True)
class Rational(RadicalExpr):
    """Exact rational leaf."""

    value: Fraction

    def _eval(self):
        return mp.mpf(self.value.numerator) / mp.mpf(self.value.denominator)

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Add(RadicalExpr):
    left: RadicalExpr
    right: RadicalExpr

    def _eval(self):
        return self.left._eval() + self.right._eval()

    def __str__(self) -> str:
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Sub(RadicalExpr):
    left: RadicalExpr
    right: RadicalExpr

    def _eval(self):
        return self.left._eval() - self.right._eval()

    def __str__(self) -> str:
        return f"({self.left} - {self.right})"


@dataclass(frozen=True)
class Mul(RadicalExpr):
    left: RadicalExpr
    right: RadicalExpr

    def _eval(self):
        return self.left._eval() * self.right._eval()

    def __str__(self) -> str:
        if self.left == Rational(Fraction(-1)):
            return f"-{self.right}"
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class Div(RadicalExpr):
    left: RadicalExpr
    right: RadicalExpr

    def _eval(self):
        denominator = self.right._eval()
        if denominator == 0:
            raise InternalConsistencyError("division by zero in an expression tree")
        return self.left._eval() / denominator

    def __str__(self) -> str:
        return f"({self.left} / {self.right})"


@dataclass(frozen=True)
class Sqrt(RadicalExpr):
    operand: RadicalExpr

    def _eval(self):
        value = self.operand._eval()
        if not isinstance(value, mp.mpc) and value < 0:
            value = mp.mpc(value)
        return mp.sqrt(value)

    def __str__(self) -> str:
        return f"sqrt({self.operand})"


@dataclass(frozen=True)
class Cbrt(RadicalExpr):
    operand: RadicalExpr

    def _eval(self):
        value = self.operand._eval()
        if isinstance(value, mp.mpc) or value < 0:
            return mp.power(mp.mpc(value), mp.mpf(1) / 3)
        return mp.cbrt(value)

    def __str__(self) -> str:
        return f"cbrt({self.operand})"


def _rat(x) -> Rational:
    return Rational(Fraction(x))


def _neg(expr: RadicalExpr) -> RadicalExpr:
    return Mul(_rat(-1), expr)


# --------------------------------------------------------------- domain types


class Exactness(Enum):
    EXACT_RATIONAL = "EXACT_RATIONAL"
    RADICAL = "RADICAL"
    NUMERIC = "NUMERIC"


@dataclass(frozen=True)
class Eigenvalue:
    """One eigenvalue of the countertwisting matrix, in units of chi.

    :param value: real scalar (``mp.mpf``) rounded to the requested precision.
    :param multiplicity: structural multiplicity (>= 1).
    :param exactness: how the value is known.
    :param radical_form: closed-form expression tree, present exactly when
        ``exactness`` is RADICAL; evaluating it at the same precision
        reproduces ``value`` to one unit in the last place.
    """

    value: object
    multiplicity: int
    exactness: Exactness
    radical_form: Optional[RadicalExpr] = None

    def __post_init__(self) -> None:
        if self.multiplicity < 1:
            raise InvalidInputError("multiplicity must be at least 1")
        if (self.exactness is Exactness.RADICAL) != (self.radical_form is not None):
            raise InvalidInputError(
                "radical_form must be present exactly for RADICAL eigenvalues"
            )


@dataclass(frozen=True)
class SpectrumReport:
    """Complete spectrum of one spin's countertwisting matrix (over chi).

    :param j: spin magnitude.
    :param eigenvalues: sorted ascending by value.
    :param degenerate: True iff some multiplicity exceeds one (for this matrix
        family: exactly the half-integer spins, whose twin chains coincide).
    :param solvability: closed-form reachability class of the spin.
    :param pairing_verified: the multiset of eigenvalues was checked to be
        invariant under lambda -> -lambda, multiplicities included.
    """

    j: HalfInt
    eigenvalues: tuple[Eigenvalue, ...]
    degenerate: bool
    solvability: SolvabilityClass
    pairing_verified: bool

    @property
    def dimension(self) -> int:
        return sum(e.multiplicity for e in self.eigenvalues)


# ------------------------------------------------------------ small helpers


def _mpf_from_fraction(fr: Fraction):
    return mp.mpf(fr.numerator) / mp.mpf(fr.denominator)


def _sqrt_fraction(fr: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if fr < 0:
        return None
    root_num = math.isqrt(fr.numerator)
    root_den = math.isqrt(fr.denominator)
    if root_num * root_num == fr.numerator and root_den * root_den == fr.denominator:
        return Fraction(root_num, root_den)
    return None


def _round_to(value, precision: int):
    with mp.workdps(precision):
        return +value


def _as_real(value, precision: int):
    """Collapse a numerically-real complex value, or report inconsistency.

    The tolerance 10^(5-p) matches the nonnegativity certificate: anything
    beyond it cannot be roundoff from a Hermitian-origin polynomial.
    """
    if not isinstance(value, mp.mpc):
        return value
    scale = max(mp.mpf(1), abs(value))
    if abs(value.imag) > scale * mp.mpf(10) ** (-(precision - 5)):
        raise SpectralConsistencyError(
            f"non-real root {value}; the polynomial does not come from a "
            "Hermitian matrix"
        )
    return value.real


# ------------------------------------------------- closed-form mu-root solvers
#
# Each solver takes ascending Fraction coefficients, assumes the caller has
# set a guarded working precision, and returns (numeric value, form) pairs
# where the form is either an exact Fraction or a RadicalExpr tree.  Values
# may be complex mid-flight; realness is certified by the caller.

_ClosedRoot = tuple[object, Union[Fraction, RadicalExpr]]


def _solve_linear(c0: Fraction, c1: Fraction) -> list[_ClosedRoot]:
    root = -c0 / c1
    return [(_mpf_from_fraction(root), root)]


def _solve_quadratic(c0: Fraction, c1: Fraction, c2: Fraction) -> list[_ClosedRoot]:
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        raise SpectralConsistencyError(
            f"quadratic discriminant {disc} is negative; the roots are not real"
        )
    exact = _sqrt_fraction(disc)
    if exact is not None:
        roots = sorted(((-c1 - exact) / (2 * c2), (-c1 + exact) / (2 * c2)))
        return [(_mpf_from_fraction(r), r) for r in roots]
    sqrt_num = mp.sqrt(_mpf_from_fraction(disc))
    base = _mpf_from_fraction(-c1)
    denom = _mpf_from_fraction(2 * c2)
    sqrt_tree = Sqrt(Rational(disc))
    minus = ((base - sqrt_num) / denom, Div(Sub(_rat(-c1), sqrt_tree), _rat(2 * c2)))
    plus = ((base + sqrt_num) / denom, Div(Add(_rat(-c1), sqrt_tree), _rat(2 * c2)))
    return [minus, plus]


def _solve_cubic(
    c0: Fraction, c1: Fraction, c2: Fraction, c3: Fraction
) -> list[_ClosedRoot]:
    """Cardano's formula; complex intermediates when all roots are real."""
    b = c2 / c3
    c = c1 / c3
    d = c0 / c3
    delta0 = b * b - 3 * c
    delta1 = 2 * b**3 - 9 * b * c + 27 * d
    if delta0 == 0 and delta1 == 0:
        root = -b / 3
        return [(_mpf_from_fraction(root), root)] * 3
    inner = delta1 * delta1 - 4 * delta0**3
    inner_tree = Sqrt(Rational(inner))
    if inner < 0:
        sqrt_inner = mp.sqrt(mp.mpc(_mpf_from_fraction(inner)))
    else:
        sqrt_inner = mp.sqrt(_mpf_from_fraction(inner))
    half = (_mpf_from_fraction(delta1) + sqrt_inner) / 2
    if half == 0:
        # Happens only for delta0 == 0, delta1 < 0; the other branch is safe.
        big_c_tree = Cbrt(Div(Sub(Rational(delta1), inner_tree), _rat(2)))
        half = (_mpf_from_fraction(delta1) - sqrt_inner) / 2
    else:
        big_c_tree = Cbrt(Div(Add(Rational(delta1), inner_tree), _rat(2)))
    if isinstance(half, mp.mpc) or half < 0:
        big_c = mp.power(mp.mpc(half), mp.mpf(1) / 3)
    else:
        big_c = mp.cbrt(half)

    sqrt3_half = mp.sqrt(mp.mpf(3)) / 2
    unit_trees = (
        None,
        Div(Add(_rat(-1), Sqrt(_rat(-3))), _rat(2)),
        Div(Sub(_rat(-1), Sqrt(_rat(-3))), _rat(2)),
    )
    unit_values = (
        mp.mpf(1),
        mp.mpc(mp.mpf(-1) / 2, sqrt3_half),
        mp.mpc(mp.mpf(-1) / 2, -sqrt3_half),
    )
    b_num = _mpf_from_fraction(b)
    delta0_num = _mpf_from_fraction(delta0)
    roots: list[_ClosedRoot] = []
    for unit_tree, unit_value in zip(unit_trees, unit_values):
        branch = unit_value * big_c
        branch_tree = big_c_tree if unit_tree is None else Mul(unit_tree, big_c_tree)
        value = -(b_num + branch + delta0_num / branch) / 3
        tree = Mul(
            _rat(Fraction(-1, 3)),
            Add(Rational(b), Add(branch_tree, Div(Rational(delta0), branch_tree))),
        )
        roots.append((value, tree))
    return roots


def _solve_quartic(
    c0: Fraction, c1: Fraction, c2: Fraction, c3: Fraction, c4: Fraction
) -> list[_ClosedRoot]:
    """Ferrari's method via the resolvent cubic of the depressed quartic."""
    b = c3 / c4
    c = c2 / c4
    d = c1 / c4
    e = c0 / c4
    shift = b / 4  # mu = y - shift with y the depressed variable
    p = c - 3 * b * b / 8
    q = d - b * c / 2 + b**3 / 8
    r = e - b * d / 4 + b * b * c / 16 - 3 * b**4 / 256
    shift_num = _mpf_from_fraction(shift)

    roots: list[_ClosedRoot] = []
    if q == 0:
        # Biquadratic: y^2 solves a plain quadratic.
        for z_value, z_form in _solve_quadratic(r, p, Fraction(1)):
            if isinstance(z_form, Fraction):
                exact = _sqrt_fraction(z_form)
                if exact is not None:
                    for sign in (-1, 1):
                        mu = sign * exact - shift
                        roots.append((_mpf_from_fraction(mu), mu))
                    continue
                y_tree: RadicalExpr = Sqrt(Rational(z_form))
            else:
                y_tree = Sqrt(z_form)
            if isinstance(z_value, mp.mpc) or z_value < 0:
                y_value = mp.sqrt(mp.mpc(z_value))
            else:
                y_value = mp.sqrt(z_value)
            roots.append((y_value - shift_num, Sub(y_tree, Rational(shift))))
            roots.append((-y_value - shift_num, Sub(_neg(y_tree), Rational(shift))))
        return roots

    # Resolvent cubic u^3 + 2p u^2 + (p^2 - 4r) u - q^2; its roots are the
    # squared pair-sums of the depressed roots, so for a real spectrum they
    # are nonnegative and their square roots combine into the quartic roots.
    resolvent = _solve_cubic(-q * q, p * p - 4 * r, 2 * p, Fraction(1))
    sqrt_items: list[tuple[object, RadicalExpr]] = []
    for u_value, u_form in resolvent:
        if isinstance(u_form, Fraction):
            exact = _sqrt_fraction(u_form)
            if exact is not None:
                sqrt_items.append((_mpf_from_fraction(exact), Rational(exact)))
                continue
            tree: RadicalExpr = Sqrt(Rational(u_form))
            base = u_value
        else:
            tree = Sqrt(u_form)
            base = u_value
        if isinstance(base, mp.mpc) or base < 0:
            value = mp.sqrt(mp.mpc(base))
        else:
            value = mp.sqrt(base)
        sqrt_items.append((value, tree))

    # Fix the overall sign so that s1*s2*s3 = -q.
    product = sqrt_items[0][0] * sqrt_items[1][0] * sqrt_items[2][0]
    target = _mpf_from_fraction(-q)
    if abs(product - target) > abs(product + target):
        flip_value, flip_tree = sqrt_items[2]
        sqrt_items[2] = (-flip_value, _neg(flip_tree))

    (s1, t1), (s2, t2), (s3, t3) = sqrt_items
    combos = (
        (s1 + s2 + s3, Add(Add(t1, t2), t3)),
        (s1 - s2 - s3, Sub(Sub(t1, t2), t3)),
        (-s1 + s2 - s3, Sub(Sub(t2, t1), t3)),
        (-s1 - s2 + s3, Sub(t3, Add(t1, t2))),
    )
    for y_value, y_tree in combos:
        mu_tree = Sub(Div(y_tree, _rat(2)), Rational(shift))
        roots.append((y_value / 2 - shift_num, mu_tree))
    return roots


def _deflate_integer_root(poly: IntPolynomial, root: int) -> IntPolynomial:
    """Exact synthetic division of an integer polynomial by (x - root)."""
    descending = list(reversed(poly.coefficients))
    quotient: list[int] = []
    acc = 0
    for coefficient in descending:
        acc = acc * root + coefficient
        quotient.append(acc)
    remainder = quotient.pop()
    if remainder != 0:
        raise InternalConsistencyError(
            f"{root} is not an exact root; deflation left remainder {remainder}"
        )
    return IntPolynomial.from_coefficients(reversed(quotient))


def _detect_integer_roots(poly: IntPolynomial, approximations) -> list[int]:
    """Integer roots confirmed by exact evaluation near numeric approximations."""
    found: list[int] = []
    for value in approximations:
        if isinstance(value, mp.mpc):
            value = value.real
        candidate = int(mp.nint(value))
        if candidate not in found and poly.evaluate(candidate) == 0:
            found.append(candidate)
    return found


def _closed_mu_roots(mu_poly: IntPolynomial, precision: int) -> list[_ClosedRoot]:
    """All roots of an integer mu-polynomial of degree <= 4 in closed form."""
    degree = mu_poly.degree
    if degree == 0:
        return []
    coefficients = [Fraction(c) for c in mu_poly.coefficients]
    if degree == 1:
        return _solve_linear(*coefficients)
    if degree == 2:
        return _solve_quadratic(*coefficients)
    if degree > 4:
        raise InvalidInputError(
            f"mu-degree {degree} exceeds the closed-form limit of 4; "
            "use the numeric path"
        )
    solver = _solve_cubic if degree == 3 else _solve_quartic
    raw = solver(*coefficients)
    # A monic integer polynomial can only have integer rational roots; peel
    # those off exactly so they keep their exact form and the leftover factor
    # gets the simplest possible radicals.
    if abs(mu_poly.leading_coefficient) == 1:
        integer_roots = _detect_integer_roots(mu_poly, [value for value, _ in raw])
        if integer_roots:
            reduced = mu_poly
            peeled: list[_ClosedRoot] = []
            for root in integer_roots:
                reduced = _deflate_integer_root(reduced, root)
                peeled.append((mp.mpf(root), Fraction(root)))
            return peeled + _closed_mu_roots(reduced, precision)
    return raw


# ------------------------------------------------------- certified numerics


def _newton_polish(poly: IntPolynomial, start, precision: int):
    """Newton-polish a simple real root against the exact integer polynomial,
    working at ``precision`` + 10 guard digits."""
    derivative = poly.derivative()
    with mp.workdps(precision + 10):
        x = mp.mpf(start)
        threshold = mp.mpf(10) ** (-(precision + 5))
        for _ in range(8):
            slope = derivative.evaluate(x)
            if slope == 0:
                break
            step = poly.evaluate(x) / slope
            x -= step
            if abs(step) <= threshold * max(mp.mpf(1), abs(x)):
                break
        return x


def _aberth_iterate(mu_poly: IntPolynomial, digits: int):
    """One Aberth-Ehrlich run at ``digits`` working digits.

    Returns (roots, converged).  Starting points sit on a circle whose radius
    is the Fujiwara root bound (scale-aware, unlike the plain coefficient
    maximum), with an angular offset that breaks real-axis symmetry.
    """
    degree = mu_poly.degree
    coefficients = mu_poly.coefficients
    derivative = mu_poly.derivative()
    lead = abs(mp.mpf(coefficients[-1]))
    ratios = [
        mp.power(abs(mp.mpf(coefficients[degree - k])) / lead, mp.mpf(1) / k)
        for k in range(1, degree + 1)
        if coefficients[degree - k]
    ]
    radius = max(2 * max(ratios), mp.mpf(1)) if ratios else mp.mpf(1)
    roots = [
        radius * mp.exp(mp.mpc(0, 2 * mp.pi * k / degree + mp.mpf(2) / 5))
        for k in range(degree)
    ]
    jitter = mp.mpf(10) ** (-(digits // 2))
    tolerance = mp.mpf(10) ** (-(digits - 6))
    for _ in range(160 + 20 * degree):
        largest_step = mp.mpf(0)
        for i in range(degree):
            value = mu_poly.evaluate(roots[i])
            if value == 0:
                continue
            slope = derivative.evaluate(roots[i])
            if slope == 0:
                roots[i] += jitter * (1 + abs(roots[i])) * mp.mpc(1, 1)
                largest_step = mp.inf
                continue
            newton = value / slope
            repulsion = []
            for k in range(degree):
                if k == i:
                    continue
                gap = roots[i] - roots[k]
                if gap == 0:
                    gap = jitter * (1 + abs(roots[i]))
                repulsion.append(1 / gap)
            denominator = 1 - newton * mp.fsum(repulsion)
            step = newton if denominator == 0 else newton / denominator
            roots[i] -= step
            scaled = abs(step) / max(mp.mpf(1), abs(roots[i]))
            largest_step = max(largest_step, scaled)
        if largest_step < tolerance:
            return roots, True
    return roots, False


def _numeric_mu_roots(mu_poly: IntPolynomial, precision: int) -> list[_ClosedRoot]:
    """Certified numeric mu roots; retries at increasing precision until the
    residual bound |q(mu)| / |q'(mu)| < 10^(5-p) holds for every root."""
    degree = mu_poly.degree
    if degree == 0:
        return []
    target = mp.mpf(10) ** (-(precision - 5))
    derivative = mu_poly.derivative()
    best_residual = None
    for guard in (10, 30, 60, 120):
        digits = precision + guard
        with mp.workdps(digits):
            roots, converged = _aberth_iterate(mu_poly, digits)
            if not converged:
                continue
            polished = []
            for root in roots:
                real_root = _as_real(root, precision)
                polished.append(_newton_polish(mu_poly, real_root, digits))
            residuals = []
            for root in polished:
                slope = derivative.evaluate(root)
                if slope == 0:
                    residuals.append(mp.inf)
                else:
                    residuals.append(abs(mu_poly.evaluate(root) / slope))
            worst = max(residuals)
            if best_residual is None or worst < best_residual:
                best_residual = worst
            if worst < target:
                return [(root, None) for root in polished]
    detail = "no converged iteration" if best_residual is None else (
        f"best residual {mp.nstr(best_residual, 3)}"
    )
    raise NumericFailureError(
        f"root finding did not reach the certified residual bound "
        f"{mp.nstr(target, 3)} ({detail}); repeated roots or insufficient "
        "precision are the usual causes"
    )


# ------------------------------------------------------------ shared assembly


def _finalize_mu_roots(
    mu_poly: IntPolynomial, raw_roots, precision: int
) -> list[_ClosedRoot]:
    """Certify realness and nonnegativity, polish inexact values, and sort."""
    tolerance = mp.mpf(10) ** (-(precision - 5))
    finalized: list[_ClosedRoot] = []
    for value, form in raw_roots:
        if isinstance(form, Fraction):
            if form < 0:
                raise SpectralConsistencyError(
                    f"negative squared eigenvalue {form}; the polynomial does "
                    "not come from a Hermitian matrix"
                )
            finalized.append((_mpf_from_fraction(form), form))
            continue
        value = _as_real(value, precision)
        if form is not None:
            value = _newton_polish(mu_poly, value, mp.dps)
        if value < 0:
            if value < -tolerance:
                raise SpectralConsistencyError(
                    f"negative squared eigenvalue {value} beyond tolerance "
                    f"{mp.nstr(tolerance, 3)}; the polynomial does not come "
                    "from a Hermitian matrix"
                )
            value = mp.mpf(0)
        finalized.append((value, form))
    finalized.sort(key=lambda item: item[0])
    return finalized


def _poly_eigenvalues(
    p: IntPolynomial, precision: int, numeric_path: bool
) -> list[Eigenvalue]:
    """Eigenvalues of one lambda^k * (even polynomial) factor."""
    lam_power, reduced = strip_lambda_power(p)
    if reduced.degree and not reduced.is_even():
        raise InvalidInputError(
            "after stripping lambda factors the polynomial must be even in "
            "lambda; a chi-scaled countertwisting matrix always satisfies this"
        )
    mu_poly = to_mu_polynomial(reduced)
    working = precision + _EVAL_GUARD
    with mp.workdps(working):
        if numeric_path:
            raw = _numeric_mu_roots(mu_poly, precision)
        else:
            raw = _closed_mu_roots(mu_poly, precision)
        mu_roots = _finalize_mu_roots(mu_poly, raw, precision)

        eigenvalues: list[Eigenvalue] = []
        zero_multiplicity = lam_power
        rational_counts: dict[Fraction, int] = {}
        for value, form in mu_roots:
            if value == 0:
                zero_multiplicity += 2
                continue
            if isinstance(form, Fraction):
                rational_counts[form] = rational_counts.get(form, 0) + 1
                continue
            positive = _round_to(mp.sqrt(value), precision)
            if form is None:
                eigenvalues.append(Eigenvalue(-positive, 1, Exactness.NUMERIC))
                eigenvalues.append(Eigenvalue(positive, 1, Exactness.NUMERIC))
            else:
                plus_tree = Sqrt(form)
                eigenvalues.append(
                    Eigenvalue(-positive, 1, Exactness.RADICAL, _neg(plus_tree))
                )
                eigenvalues.append(
                    Eigenvalue(positive, 1, Exactness.RADICAL, plus_tree)
                )
        for mu_value, count in rational_counts.items():
            exact_root = _sqrt_fraction(mu_value)
            if exact_root is not None:
                positive = _round_to(_mpf_from_fraction(exact_root), precision)
                eigenvalues.append(
                    Eigenvalue(-positive, count, Exactness.EXACT_RATIONAL)
                )
                eigenvalues.append(
                    Eigenvalue(positive, count, Exactness.EXACT_RATIONAL)
                )
            else:
                positive = _round_to(mp.sqrt(_mpf_from_fraction(mu_value)), precision)
                plus_tree = Sqrt(Rational(mu_value))
                eigenvalues.append(
                    Eigenvalue(-positive, count, Exactness.RADICAL, _neg(plus_tree))
                )
                eigenvalues.append(
                    Eigenvalue(positive, count, Exactness.RADICAL, plus_tree)
                )
        if zero_multiplicity:
            eigenvalues.append(
                Eigenvalue(
                    _round_to(mp.mpf(0), precision),
                    zero_multiplicity,
                    Exactness.EXACT_RATIONAL,
                )
            )
    eigenvalues.sort(key=lambda e: e.value)
    return eigenvalues


# ------------------------------------------------------------ public surface


def roots_even_poly(
    q: IntPolynomial, precision: int = DEFAULT_PRECISION
) -> list[Eigenvalue]:
    """Closed-form eigenvalue pairs of an even integer polynomial.

    Substitutes mu = lambda^2, solves the mu-polynomial by radicals
    (linear/quadratic/Cardano/Ferrari, so mu-degree <= 4), and maps every
    root back to the pair lambda = +-sqrt(mu) with its expression tree.

    :param q: even polynomial in lambda with integer coefficients.
    :param precision: working precision in decimal digits (>= 15).
    :raises InvalidInputError: odd polynomial, zero polynomial, or mu-degree
        beyond the radical limit.
    :raises SpectralConsistencyError: a mu root is negative or non-real
        beyond tolerance 10^(5-p), impossible for a Hermitian origin.
    """
    _require_precision(precision)
    if not isinstance(q, IntPolynomial):
        raise InvalidInputError("roots_even_poly expects an IntPolynomial")
    if q.is_zero:
        raise InvalidInputError("the zero polynomial has no root set")
    if not q.is_even():
        raise InvalidInputError("polynomial must be even in lambda")
    return _poly_eigenvalues(q, precision, numeric_path=False)


def roots_numeric(
    p: IntPolynomial, precision: int = DEFAULT_PRECISION
) -> list[Eigenvalue]:
    """Certified numeric eigenvalues of a lambda^k * (even) integer polynomial.

    Strips lambda factors, reduces to the mu-polynomial, runs a simultaneous
    Aberth-Ehrlich iteration with Newton polishing on the exact coefficients,
    and certifies every root with the residual bound |q(mu)|/|q'(mu)| <
    10^(5-p) before mapping back to lambda = +-sqrt(mu).  Nonzero eigenvalues
    are tagged NUMERIC; the structurally exact zero keeps EXACT_RATIONAL.

    The residual quotient is the Newton step, a proximity certificate for the
    nearest root; for a root of multiplicity k it understates the distance by
    the factor k.  Chain factors of the countertwisting matrix always have
    simple mu roots, so there the bound is sharp.

    :param p: integer polynomial; 30+ digits recommended beyond dimension 22.
    :raises NumericFailureError: iteration did not reach the residual bound.
    """
    _require_precision(precision)
    if not isinstance(p, IntPolynomial):
        raise InvalidInputError("roots_numeric expects an IntPolynomial")
    if p.is_zero:
        raise InvalidInputError("the zero polynomial has no root set")
    return _poly_eigenvalues(p, precision, numeric_path=True)


def _pairing_holds(eigenvalues: list[Eigenvalue], precision: int) -> bool:
    """Check multiset invariance under lambda -> -lambda on a sorted list."""
    tolerance = mp.mpf(10) ** (-(precision - 5))
    count = len(eigenvalues)
    for i in range(count):
        a = eigenvalues[i]
        b = eigenvalues[count - 1 - i]
        if a.multiplicity != b.multiplicity:
            return False
        if abs(a.value + b.value) > tolerance * max(mp.mpf(1), abs(a.value)):
            return False
    return True


def spectrum(j, precision: int = DEFAULT_PRECISION) -> SpectrumReport:
    """Full spectrum of the countertwisting matrix (over chi) for spin j.

    Routes through the radical path when every chain factor has mu-degree
    <= 4 and through certified numerics otherwise; hypergeometric-class spins
    keep their classification but are evaluated numerically.  Multiplicities
    come from twin-chain doubling (half-integer j) and stripped lambda
    powers, never from clustering.

    :param j: spin magnitude >= 1/2 (HalfInt, string like "7/2", or number).
    :param precision: decimal digits for the eigenvalues (>= 15).
    """
    jj = _require_spin(j)
    _require_precision(precision)
    solvability = classify_solvability(jj)
    numeric_path = solvability.category in (
        SolvabilityCategory.HYPERGEOMETRIC,
        SolvabilityCategory.NUMERIC_ONLY,
    )
    poly_a, poly_b = block_polynomials(jj)
    if jj.is_integer:
        parts = [
            _poly_eigenvalues(poly, precision, numeric_path)
            for poly in (poly_a, poly_b)
        ]
        zero_multiplicity = 0
        eigenvalues: list[Eigenvalue] = []
        for part in parts:
            for eigen in part:
                if eigen.value == 0:
                    zero_multiplicity += eigen.multiplicity
                else:
                    eigenvalues.append(eigen)
        if zero_multiplicity:
            eigenvalues.append(
                Eigenvalue(
                    _round_to(mp.mpf(0), precision),
                    zero_multiplicity,
                    Exactness.EXACT_RATIONAL,
                )
            )
    else:
        if poly_a != poly_b:
            raise InternalConsistencyError(
                "the twin chains of a half-integer spin must carry identical "
                "polynomials"
            )
        eigenvalues = [
            replace(eigen, multiplicity=2 * eigen.multiplicity)
            for eigen in _poly_eigenvalues(poly_a, precision, numeric_path)
        ]
    eigenvalues.sort(key=lambda e: e.value)

    total = sum(e.multiplicity for e in eigenvalues)
    if total != jj.n_states:
        raise InternalConsistencyError(
            f"multiplicities sum to {total}, expected {jj.n_states}"
        )
    if jj.is_integer and not any(e.value == 0 for e in eigenvalues):
        raise InternalConsistencyError(
            "an odd-dimensional spectrum must contain the zero eigenvalue"
        )
    return SpectrumReport(
        j=jj,
        eigenvalues=tuple(eigenvalues),
        degenerate=not jj.is_integer,
        solvability=solvability,
        pairing_verified=_pairing_holds(eigenvalues, precision),
    )
