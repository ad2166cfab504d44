"""Exact characteristic polynomials, discriminants, and solvability classes."""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from countertwist import HalfInt, InvalidInputError, NotAvailableError
from countertwist.charpoly import (
    IntPolynomial,
    SolvabilityCategory,
    block_decompose,
    block_polynomials,
    char_poly_exact,
    classify_solvability,
    degeneracy_report,
    discriminant,
    strip_lambda_power,
    table1_reference,
    table1_spins,
    to_mu_polynomial,
)
from _oracles import numpy_h_ta


def eigenvalue_reconstructed_coefficients(twoj):
    """Ascending coefficients of det(H - lambda I) from numpy eigenvalues."""
    eigs = np.linalg.eigvalsh(numpy_h_ta(twoj))
    monic = np.poly(eigs)[::-1]  # ascending, leading 1
    sign = (-1) ** (twoj + 1)
    return sign * monic


def assert_coefficients_close(exact, floating, rel_tol):
    scale = max(abs(c) for c in exact)
    for c_exact, c_float in zip(exact, floating):
        if c_exact != 0:
            assert abs(c_float - c_exact) / abs(c_exact) < rel_tol
        else:
            assert abs(c_float) < rel_tol * scale


# ---------------------------------------------------------------- IntPolynomial


def test_polynomial_normalization_and_basics():
    p = IntPolynomial.from_coefficients([1, 2, 0, 0])
    assert p.coefficients == (1, 2)
    assert p.degree == 1
    q = IntPolynomial.from_coefficients([0, 0, 0])
    assert q.is_zero
    with pytest.raises(InvalidInputError):
        IntPolynomial(())
    with pytest.raises(InvalidInputError):
        IntPolynomial((1, 0))


def test_polynomial_arithmetic():
    p = IntPolynomial((-3, 0, 1))  # x^2 - 3
    q = IntPolynomial((-12, 0, 1))
    assert (p * q).coefficients == (36, 0, -15, 0, 1)
    assert p.shifted(2).coefficients == (0, 0, -3, 0, 1)
    assert p.derivative().coefficients == (0, 2)
    assert p.evaluate(2) == 1
    assert p.evaluate(Fraction(1, 2)) == Fraction(-11, 4)
    assert str(IntPolynomial((0, 1, 0, -1))) == "-x^3 + x"


def test_parity_and_mu_helpers():
    even = IntPolynomial((9, 0, -6, 0, 1))
    assert even.is_even()
    assert to_mu_polynomial(even).coefficients == (9, -6, 1)
    odd = IntPolynomial((0, 1, 0, -1))
    assert odd.is_odd()
    power, reduced = strip_lambda_power(odd)
    assert power == 1
    assert reduced.coefficients == (1, 0, -1)
    with pytest.raises(InvalidInputError):
        to_mu_polynomial(odd)


# ---------------------------------------------------------------- blocks


def test_block_decompose_j2():
    decomp = block_decompose(HalfInt(4))
    assert [m.twice_value for m in decomp.labels_a] == [4, 0, -4]
    assert [m.twice_value for m in decomp.labels_b] == [2, -2]
    assert decomp.block_a == (Fraction(6), Fraction(6))
    assert decomp.block_b == (Fraction(9),)


def test_block_decompose_j3_couplings():
    decomp = block_decompose(HalfInt(6))
    got = {decomp.block_a, decomp.block_b}
    expected = {
        (Fraction(15), Fraction(36), Fraction(15)),
        (Fraction(30), Fraction(30)),
    }
    assert got == expected


def test_block_decompose_j_half():
    decomp = block_decompose(HalfInt(1))
    assert len(decomp.labels_a) == len(decomp.labels_b) == 1
    assert decomp.block_a == decomp.block_b == ()


@pytest.mark.parametrize("twoj", [1, 2, 3, 4, 5, 8, 13, 22, 30])
def test_block_sizes(twoj):
    decomp = block_decompose(HalfInt(twoj))
    n = twoj + 1
    assert len(decomp.labels_a) == (n + 1) // 2
    assert len(decomp.labels_b) == n // 2
    labels = sorted(
        m.twice_value for m in decomp.labels_a + decomp.labels_b
    )
    assert labels == list(range(-twoj, twoj + 1, 2))


def test_block_couplings_match_matrix_entries():
    h = numpy_h_ta(9)
    decomp = block_decompose(HalfInt(9))
    for labels, ws in (
        (decomp.labels_a, decomp.block_a),
        (decomp.labels_b, decomp.block_b),
    ):
        for upper, w in zip(labels, ws):
            row = (9 - upper.twice_value) // 2
            entry = h[row, row + 2]
            assert abs(abs(entry) ** 2 - float(w)) < 1e-12


# ---------------------------------------------------------------- char poly


@pytest.mark.parametrize(
    "twoj, expected",
    [
        (1, (0, 0, 1)),  # lambda^2
        (2, (0, 1, 0, -1)),  # lambda (1 - lambda^2)
        (3, (9, 0, -6, 0, 1)),  # (lambda^2 - 3)^2
        (4, (0, -108, 0, 21, 0, -1)),  # -lambda (lambda^2 - 9)(lambda^2 - 12)
        (5, (0, 0, 784, 0, -56, 0, 1)),  # lambda^2 (lambda^2 - 28)^2
    ],
)
def test_char_poly_small_spins(twoj, expected):
    assert char_poly_exact(HalfInt(twoj)).coefficients == expected


@pytest.mark.parametrize("twoj", range(1, 23))
def test_char_poly_matches_eigenvalue_reconstruction(twoj):
    exact = char_poly_exact(HalfInt(twoj)).coefficients
    floating = eigenvalue_reconstructed_coefficients(twoj)
    assert len(floating) == len(exact)
    assert_coefficients_close(exact, floating, 1e-8)


@pytest.mark.parametrize("twoj", list(range(1, 31)) + [60])
def test_char_poly_parity_and_leading_sign(twoj):
    p = char_poly_exact(HalfInt(twoj))
    assert p.degree == twoj + 1
    assert p.leading_coefficient == (-1) ** (twoj + 1)
    if twoj % 2 == 0:
        assert p.is_odd()  # integer spin: lambda times an even polynomial
    else:
        assert p.is_even()


@pytest.mark.parametrize("twoj", list(range(1, 31)) + [60])
def test_char_poly_trace_identities(twoj):
    p = char_poly_exact(HalfInt(twoj))
    n = twoj + 2  # number of coefficients
    coeffs = p.coefficients
    assert coeffs[n - 2] == 0  # zero trace
    decomp = block_decompose(HalfInt(twoj))
    total_w = sum(decomp.block_a) + sum(decomp.block_b)
    assert total_w.denominator == 1
    expected = -int(total_w) * (-1) ** (twoj + 1)
    assert coeffs[n - 3] == expected  # encodes tr H^2 = 2 * sum of couplings


@pytest.mark.parametrize("twoj", [1, 3, 5, 9, 13, 17, 21])
def test_half_integer_block_doubling(twoj):
    pa, pb = block_polynomials(HalfInt(twoj))
    assert pa == pb
    assert char_poly_exact(HalfInt(twoj)) == pa * pb


def test_char_poly_runtime_under_one_second():
    import time

    start = time.perf_counter()
    for twoj in range(1, 23):
        char_poly_exact(HalfInt(twoj))
    elapsed = time.perf_counter() - start
    assert elapsed < 22.0  # < 1 s per row on average, with large margin


# ---------------------------------------------------------------- discriminant


def test_discriminant_cubic_example():
    assert discriminant(IntPolynomial((0, 1, 0, -1))) == 4


@pytest.mark.parametrize("twoj", [3, 5])
def test_discriminant_degenerate_rows(twoj):
    assert discriminant(char_poly_exact(HalfInt(twoj))) == 0


def test_discriminant_rejects_zero_polynomial():
    with pytest.raises(InvalidInputError):
        discriminant(IntPolynomial((0,)))


@pytest.mark.parametrize(
    "coeffs",
    [
        (2, -3, 1),
        (-4, 0, 1, 5),
        (1, 1, 1, 1, 1),
        (0, -36, 0, 15, 0, -1),
        (7, 0, 0, 0, 2, 3),
    ],
)
def test_discriminant_matches_sympy(coeffs):
    x = sympy.Symbol("x")
    expr = sum(c * x**k for k, c in enumerate(coeffs))
    expected = int(sympy.discriminant(sympy.Poly(expr, x)))
    assert discriminant(IntPolynomial.from_coefficients(coeffs)) == expected


@pytest.mark.parametrize("twoj", range(1, 17))
def test_char_poly_discriminant_matches_sympy(twoj):
    p = char_poly_exact(HalfInt(twoj))
    x = sympy.Symbol("x")
    expr = sum(c * x**k for k, c in enumerate(p.coefficients))
    expected = int(sympy.discriminant(sympy.Poly(expr, x)))
    assert discriminant(p) == expected


@pytest.mark.parametrize("twoj", range(1, 23))
def test_degeneracy_matches_spin_parity(twoj):
    report = degeneracy_report(HalfInt(twoj))
    assert report.degenerate == (twoj % 2 == 1)
    if twoj % 2 == 1:
        assert report.discriminant_block != 0  # simple within each chain


def test_degeneracy_report_examples():
    assert degeneracy_report(HalfInt(2)).degenerate is False
    assert degeneracy_report(HalfInt(21)).degenerate is True
    assert degeneracy_report(HalfInt(1)).degenerate is True


# ---------------------------------------------------------------- solvability


@pytest.mark.parametrize(
    "twoj, category, mu_degree",
    [
        (1, SolvabilityCategory.TRIVIAL_ZERO, 0),
        (2, SolvabilityCategory.RADICALS, 1),
        (4, SolvabilityCategory.RADICALS, 1),
        (9, SolvabilityCategory.RADICALS, 2),
        (16, SolvabilityCategory.RADICALS, 4),
        (17, SolvabilityCategory.RADICALS, 4),
        (18, SolvabilityCategory.HYPERGEOMETRIC, 5),
        (19, SolvabilityCategory.HYPERGEOMETRIC, 5),
        (20, SolvabilityCategory.HYPERGEOMETRIC, 5),
        (21, SolvabilityCategory.HYPERGEOMETRIC, 5),
        (22, SolvabilityCategory.NUMERIC_ONLY, 6),
    ],
)
def test_solvability_ladder(twoj, category, mu_degree):
    result = classify_solvability(HalfInt(twoj))
    assert result.category == category
    assert result.mu_degree == mu_degree


def test_solvability_radicals_span():
    for twoj in range(2, 18):
        assert (
            classify_solvability(HalfInt(twoj)).category
            == SolvabilityCategory.RADICALS
        )


# ---------------------------------------------------------------- reference table


def test_reference_clean_rows_match_computation():
    mismatched = []
    for j in table1_spins():
        row = table1_reference(j)
        if row.literal is None or row.literal != char_poly_exact(j):
            mismatched.append(j.twice_value)
    assert mismatched == [4, 16, 22]  # the known defective printed rows


def test_reference_row_7_half():
    row = table1_reference(HalfInt(7))
    factor = IntPolynomial((945, 0, -126, 0, 1))
    assert row.literal == factor * factor
    assert not row.questionable


def test_reference_row_5():
    row = table1_reference(HalfInt(10))
    expected = (
        IntPolynomial((0, 1))
        * IntPolynomial((-108, 0, 1))
        * IntPolynomial((-528, 0, 1))
        * IntPolynomial((-455625, 0, 65619, 0, -651, 0, 1))
    ).scaled(-1)
    assert row.literal == expected


def test_reference_questionable_rows():
    row8 = table1_reference(HalfInt(16))
    assert row8.questionable
    assert row8.literal is not None
    assert row8.literal.degree == 25  # impossible degree, kept literally
    assert row8.corrected == char_poly_exact(HalfInt(16))

    row11 = table1_reference(HalfInt(22))
    assert row11.questionable
    assert row11.literal is None  # ill-formed printed constant
    assert row11.corrected == char_poly_exact(HalfInt(22))


def test_reference_degeneracy_markers():
    for j in table1_spins():
        row = table1_reference(j)
        assert row.degenerate == (j.twice_value % 2 == 1)


def test_reference_out_of_range():
    with pytest.raises(NotAvailableError):
        table1_reference(HalfInt(24))
