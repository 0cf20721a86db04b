import math
from fractions import Fraction

import pytest

from splitburgers.errors import UnknownNameError
from splitburgers.schemes import (
    builtin_extrapolation,
    builtin_scheme,
    extrapolation_names,
    resolve_method,
    scheme_names,
    SplittingScheme,
    validate,
    validate_extrapolation,
)

ALL_SCHEMES = list(scheme_names())


@pytest.mark.parametrize("name", ALL_SCHEMES)
def test_builtin_schemes_validate_clean(name):
    assert validate(builtin_scheme(name)) == []


@pytest.mark.parametrize("name", ALL_SCHEMES)
def test_coefficient_sums(name):
    s = builtin_scheme(name)
    assert abs(math.fsum(s.a) - 1.0) < 1e-12
    total = complex(sum(complex(b) for b in s.b))
    assert abs(total - 1.0) < 1e-12


@pytest.mark.parametrize("name", ALL_SCHEMES)
def test_palindrome_and_positivity(name):
    s = builtin_scheme(name)
    assert tuple(reversed(s.a)) == s.a
    assert tuple(reversed(s.b)) == s.b
    assert min(s.a) > 0.0
    assert min(complex(b).real for b in s.b) >= 0.0


def test_strang_coefficients():
    s = builtin_scheme("Strang")
    assert s.pattern == "BAB"
    assert s.a == (1.0,)
    assert s.b == (0.5, 0.5)
    assert s.stages == 1
    assert s.real_coefficients_only


def test_ml62_coefficients_match_closed_forms():
    s = builtin_scheme("ML62")
    root5 = math.sqrt(5.0)
    assert s.a == ((5 - root5) / 10, 1 / root5, (5 - root5) / 10)
    assert s.b == (1 / 12, 5 / 12, 5 / 12, 1 / 12)
    assert s.effective_order == (6, 2)
    assert s.real_coefficients_only


def test_rc4_coefficients_exact_fractions():
    s = builtin_scheme("RC4")
    assert s.a == (0.25, 0.25, 0.25, 0.25)
    assert s.b[0] == complex(1 / 10, -1 / 30)
    assert s.b[1] == complex(4 / 15, 2 / 15)
    assert s.b[2] == complex(4 / 15, -1 / 5)
    assert not s.real_coefficients_only
    assert s.nominal_order == 4


def test_sm64_bookkeeping_and_sum_residual():
    s = builtin_scheme("SM64")
    assert s.stages == 6
    assert len(s.b) == 7
    assert s.a == (1 / 6,) * 6
    # summing the stored decimals directly must land on 1 within 1e-12
    residual = abs(sum(complex(b) for b in s.b) - 1.0)
    assert residual < 1e-12
    assert s.effective_order == (6, 4)


@pytest.mark.parametrize("name", ["Strang", "ML62"])
def test_real_schemes_have_exactly_zero_imag(name):
    s = builtin_scheme(name)
    assert max(abs(complex(b).imag) for b in s.b) == 0.0


@pytest.mark.parametrize("name", ["RC4", "O4", "SM4", "SM64"])
def test_complex_schemes_flagged(name):
    assert not builtin_scheme(name).real_coefficients_only


def test_unknown_scheme_lists_available():
    with pytest.raises(UnknownNameError, match="Strang"):
        builtin_scheme("nope")


def test_lookup_is_case_insensitive():
    assert builtin_scheme("sm64") is builtin_scheme("SM64")
    assert resolve_method("ext4") is builtin_extrapolation("EXT4")


def test_ext4_terms():
    r = builtin_extrapolation("EXT4")
    assert r.terms == ((Fraction(4, 3), 2), (Fraction(-1, 3), 1))
    assert r.order == 4
    assert r.stages == 3
    assert Fraction(4, 3) + Fraction(-1, 3) == 1


def test_ext6_terms_and_rational_cancellation():
    r = builtin_extrapolation("EXT6")
    assert r.terms == ((Fraction(81, 40), 3), (Fraction(-16, 15), 2), (Fraction(1, 24), 1))
    assert r.stages == 6
    # second- and fourth-order moments vanish exactly
    assert Fraction(81, 40) * Fraction(1, 9) - Fraction(16, 15) * Fraction(1, 4) + Fraction(1, 24) == 0
    assert Fraction(81, 40) * Fraction(1, 81) - Fraction(16, 15) * Fraction(1, 16) + Fraction(1, 24) == 0


@pytest.mark.parametrize("name", extrapolation_names())
def test_builtin_rules_validate_clean(name):
    assert validate_extrapolation(builtin_extrapolation(name)) == []


def test_unknown_rule_raises():
    with pytest.raises(UnknownNameError):
        builtin_extrapolation("EXT8")


def test_validate_reports_bad_sum_with_residual():
    bad = SplittingScheme("bad", "BAB", a=(0.6, 0.6), b=(0.4, 0.4, 0.4), nominal_order=2)
    report = validate(bad)
    assert any("sum(a)" in v and "0.2" in v for v in report)
    assert any("sum(b)" in v for v in report)


def test_validate_reports_broken_palindrome_and_signs():
    bad = SplittingScheme("bad", "BAB", a=(0.75, 0.25), b=(0.5, 0.6, -0.1),
                          nominal_order=2)
    report = validate(bad)
    assert any("palindrome" in v for v in report)
    assert any("negative" in v for v in report)


def test_validate_reports_length_mismatch():
    bad = SplittingScheme("bad", "BAB", a=(0.5, 0.5), b=(0.5, 0.5), nominal_order=2)
    assert any("len(b)" in v for v in validate(bad))


def test_transposed_strang_is_aba():
    t = builtin_scheme("Strang").transposed()
    assert t.pattern == "ABA"
    assert t.a == (0.5, 0.5)
    assert t.b == (1.0,)
    assert validate(t) == []


def test_transpose_refuses_complex_schemes():
    with pytest.raises(ValueError):
        builtin_scheme("RC4").transposed()
