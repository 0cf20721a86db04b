"""Registry of splitting coefficient sets and extrapolation rules.

Each splitting scheme is a palindromic composition of conservation-law
sub-flows (coefficients ``a``, always real and positive here) and diffusion
sub-flows (coefficients ``b``, real or complex with nonnegative real part).
Coefficients are stored verbatim at full published precision; they are
validated, never re-derived from order conditions.

Extrapolation rules combine runs of a second-order base method with
different substep counts so that the leading even-order error terms cancel
(classical Richardson weights).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import UnknownNameError

BAB = "BAB"
ABA = "ABA"

_CONSISTENCY_TOL = 1e-12


@dataclass(frozen=True)
class SplittingScheme:
    """A named palindromic splitting composition.

    For the BAB pattern the step reads (right factor applied first)

        B(b_1 h) A(a_1 h) B(b_2 h) ... A(a_m h) B(b_{m+1} h)

    with len(b) = len(a) + 1; the ABA pattern swaps the roles. The
    ``effective_order`` pair (p1, p2) describes perturbation-tailored
    schemes whose local error is O(eps h^{p1+1} + eps^2 h^{p2+1}) when the
    diffusion term carries the small parameter eps.
    """

    name: str
    pattern: str
    a: tuple[float, ...]
    b: tuple[complex, ...]
    nominal_order: int
    effective_order: tuple[int, int] | None = None

    @property
    def stages(self) -> int:
        """Number of conservation-flow applications per step (the work unit)."""
        return len(self.a)

    @property
    def real_coefficients_only(self) -> bool:
        return all(complex(bi).imag == 0.0 for bi in self.b)

    def transposed(self) -> "SplittingScheme":
        """Swap the roles of the two sub-flows (BAB <-> ABA).

        Only meaningful when the diffusion coefficients are real, since the
        conservation flow never takes complex steps.
        """
        if not self.real_coefficients_only:
            raise ValueError(f"{self.name}: cannot transpose a complex-coefficient scheme")
        pattern = ABA if self.pattern == BAB else BAB
        return SplittingScheme(
            name=f"{self.name}-{pattern}",
            pattern=pattern,
            a=tuple(float(bi.real) for bi in self.b),
            b=tuple(complex(ai) for ai in self.a),
            nominal_order=self.nominal_order,
            effective_order=self.effective_order,
        )


@dataclass(frozen=True)
class ExtrapolationRule:
    """Weighted combination of base-method runs with differing substep counts.

    ``terms`` is an ordered list of (weight, substeps). Weights are kept as
    exact rationals so the cancellation identities can be checked without
    rounding.
    """

    name: str
    terms: tuple[tuple[Fraction, int], ...]
    base_order: int = 2

    @property
    def order(self) -> int:
        return self.base_order + 2 * (len(self.terms) - 1)

    @property
    def stages(self) -> int:
        """Conservation-flow applications per step with a 1-stage base."""
        return sum(n for _, n in self.terms)

    @property
    def real_coefficients_only(self) -> bool:
        return True


_SQRT5 = math.sqrt(5.0)

_BUILTIN_SCHEMES = {
    "Strang": SplittingScheme(
        name="Strang",
        pattern=BAB,
        a=(1.0,),
        b=(0.5, 0.5),
        nominal_order=2,
    ),
    # McLachlan's 3-stage second-order method tuned for perturbed systems.
    "ML62": SplittingScheme(
        name="ML62",
        pattern=BAB,
        a=((5.0 - _SQRT5) / 10.0, 1.0 / _SQRT5, (5.0 - _SQRT5) / 10.0),
        b=(1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0),
        nominal_order=2,
        effective_order=(6, 2),
    ),
    # 4-stage fourth order with equal conservation steps and complex
    # diffusion steps of positive real part.
    "RC4": SplittingScheme(
        name="RC4",
        pattern=BAB,
        a=(0.25, 0.25, 0.25, 0.25),
        b=(
            complex(1.0 / 10.0, -1.0 / 30.0),
            complex(4.0 / 15.0, 2.0 / 15.0),
            complex(4.0 / 15.0, -1.0 / 5.0),
            complex(4.0 / 15.0, 2.0 / 15.0),
            complex(1.0 / 10.0, -1.0 / 30.0),
        ),
        nominal_order=4,
    ),
    # Optimized 4-stage fourth-order variant (minimized error constants).
    "O4": SplittingScheme(
        name="O4",
        pattern=BAB,
        a=(
            0.1859688195991091314,
            0.3140311804008908686,
            0.3140311804008908686,
            0.1859688195991091314,
        ),
        b=(
            complex(0.060078275263542, 0.060314841253379),
            complex(0.270211839133611, -0.152903932291162),
            complex(0.339419771205694, 0.185178182075567),
            complex(0.270211839133611, -0.152903932291162),
            complex(0.060078275263542, 0.060314841253379),
        ),
        nominal_order=4,
    ),
    # Optimized 4-stage fourth order built for perturbed systems.
    "SM4": SplittingScheme(
        name="SM4",
        pattern=BAB,
        a=(
            0.13505265889288437,
            0.36494734110711563,
            0.36494734110711563,
            0.13505265889288437,
        ),
        b=(
            complex(0.018329102861074364, -0.10677008344599524),
            complex(0.2784394345454581, 0.20041452008768607),
            complex(0.40646292518693505, -0.18728887328338165),
            complex(0.2784394345454581, 0.20041452008768607),
            complex(0.018329102861074364, -0.10677008344599524),
        ),
        nominal_order=4,
    ),
    # 6-stage fourth order of effective order (6,4) for perturbed systems;
    # six equal conservation steps, seven diffusion coefficients.
    "SM64": SplittingScheme(
        name="SM64",
        pattern=BAB,
        a=(1.0 / 6.0,) * 6,
        b=(
            complex(0.05753968253968254, -0.007886748775536424),
            complex(0.20476190476190473, 0.04732049265321855),
            complex(0.16309523809523818, -0.11830123163304637),
            complex(0.14920634920634912, 0.15773497551072851),
            complex(0.16309523809523818, -0.11830123163304637),
            complex(0.20476190476190473, 0.04732049265321855),
            complex(0.05753968253968254, -0.007886748775536424),
        ),
        nominal_order=4,
        effective_order=(6, 4),
    ),
}

_BUILTIN_RULES = {
    "EXT4": ExtrapolationRule(
        name="EXT4",
        terms=((Fraction(4, 3), 2), (Fraction(-1, 3), 1)),
    ),
    "EXT6": ExtrapolationRule(
        name="EXT6",
        terms=((Fraction(81, 40), 3), (Fraction(-16, 15), 2), (Fraction(1, 24), 1)),
    ),
}

_SCHEME_LOOKUP = {k.lower(): k for k in _BUILTIN_SCHEMES}
_RULE_LOOKUP = {k.lower(): k for k in _BUILTIN_RULES}


def scheme_names() -> tuple[str, ...]:
    return tuple(_BUILTIN_SCHEMES)


def extrapolation_names() -> tuple[str, ...]:
    return tuple(_BUILTIN_RULES)


def builtin_scheme(name: str) -> SplittingScheme:
    """Look up a built-in splitting scheme by name (case-insensitive)."""
    key = _SCHEME_LOOKUP.get(name.lower())
    if key is None:
        raise UnknownNameError(
            f"unknown scheme {name!r}; available: {', '.join(_BUILTIN_SCHEMES)}"
        )
    return _BUILTIN_SCHEMES[key]


def builtin_extrapolation(name: str) -> ExtrapolationRule:
    """Look up a built-in extrapolation rule by name (case-insensitive)."""
    key = _RULE_LOOKUP.get(name.lower())
    if key is None:
        raise UnknownNameError(
            f"unknown extrapolation rule {name!r}; available: {', '.join(_BUILTIN_RULES)}"
        )
    return _BUILTIN_RULES[key]


def resolve_method(name: str) -> SplittingScheme | ExtrapolationRule:
    """Resolve a CLI-facing method identifier to a scheme or a rule."""
    low = name.lower()
    if low in _SCHEME_LOOKUP:
        return _BUILTIN_SCHEMES[_SCHEME_LOOKUP[low]]
    if low in _RULE_LOOKUP:
        return _BUILTIN_RULES[_RULE_LOOKUP[low]]
    raise UnknownNameError(
        f"unknown method {name!r}; available: "
        f"{', '.join(list(_BUILTIN_SCHEMES) + list(_BUILTIN_RULES))}"
    )


def validate(scheme: SplittingScheme) -> list[str]:
    """Check a splitting scheme against its structural invariants.

    Returns a list of human-readable violations with measured residuals;
    empty on success.
    """
    report: list[str] = []
    a, b = scheme.a, scheme.b

    if scheme.pattern == BAB:
        if len(b) != len(a) + 1:
            report.append(f"BAB pattern requires len(b) = len(a) + 1, got {len(a)}/{len(b)}")
    elif scheme.pattern == ABA:
        if len(a) != len(b) + 1:
            report.append(f"ABA pattern requires len(a) = len(b) + 1, got {len(a)}/{len(b)}")
    else:
        report.append(f"unknown pattern {scheme.pattern!r}")

    res_a = abs(math.fsum(a) - 1.0)
    if res_a > _CONSISTENCY_TOL:
        report.append(f"sum(a) != 1, residual {res_a:.3g}")
    res_b = abs(complex(math.fsum(bi.real for bi in map(complex, b)),
                        math.fsum(bi.imag for bi in map(complex, b))) - 1.0)
    if res_b > _CONSISTENCY_TOL:
        report.append(f"sum(b) != 1, residual {res_b:.3g}")

    # palindromic symmetry must hold exactly as stored
    for i in range(len(a)):
        if a[i] != a[len(a) - 1 - i]:
            report.append(f"a[{i + 1}] breaks palindrome symmetry")
            break
    for i in range(len(b)):
        if b[i] != b[len(b) - 1 - i]:
            report.append(f"b[{i + 1}] breaks palindrome symmetry")
            break

    if a and min(a) <= 0.0:
        report.append(f"min(a) = {min(a):.3g} is not positive")
    min_re_b = min(complex(bi).real for bi in b) if b else 0.0
    if min_re_b < 0.0:
        report.append(f"min(Re b) = {min_re_b:.3g} is negative")

    return report


def validate_extrapolation(rule: ExtrapolationRule) -> list[str]:
    """Check an extrapolation rule's weight-sum and cancellation identities.

    All identities are verified in exact rational arithmetic: the weights
    must sum to one, and sum_j w_j * n_j^(-2i) must vanish for
    i = 1 .. len(terms)-1 so that the even error-expansion terms of the
    symmetric base method cancel.
    """
    report: list[str] = []
    total = sum((w for w, _ in rule.terms), start=Fraction(0))
    if total != 1:
        report.append(f"weights sum to {total}, expected 1")
    for i in range(1, len(rule.terms)):
        moment = sum((w / Fraction(n) ** (2 * i) for w, n in rule.terms), start=Fraction(0))
        if moment != 0:
            report.append(f"order-{2 * i} cancellation fails: residual {moment}")
    if any(n <= 0 for _, n in rule.terms):
        report.append("substep counts must be positive")
    return report
