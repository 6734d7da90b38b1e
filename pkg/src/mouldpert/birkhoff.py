"""Birkhoff decomposition of the regularized denominator mould.

For an alphabet of eigenvalue letters, the mould

    T^(n1..nr)(e) = 1 / prod_j (s_j + j e),   s_j = n1 + ... + nj,

replaces each possibly-vanishing denominator s_j by s_j + j e, which is
invertible in C((e)) even at resonances.  Factoring T uniquely as
U_minus x T = U_plus with U_minus carrying only poles and U_plus pole
free yields the exact scalar moulds

    R^w = -len(w) * residue(U_minus^w),
    S^w = constant term of U_plus^w,
    N^w = -residue(U_minus^w) = R^w / len(w),

which solve the normalization problem downstream: R/N weight nested
commutators of the perturbation's eigencomponents, S weights their
ordered products.

The recurrence is exact: U_minus values are finite polynomials in e^-1,
so residues never lose accuracy; U_plus values are guaranteed through
the accuracy requested (degree 0 suffices for the scalar moulds, and the
engine widens T requests by the polar depth of the U_minus factor in
each product term).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .laurent import Laurent
from .moulds import (
    Alphabet,
    Mould,
    Word,
    is_symmetral_up_to,
    mould_product,
    nabla,
)
from .scalars import GaussianRational, ONE, ZERO

__all__ = [
    "make_T",
    "BirkhoffEngine",
    "SuiteReport",
    "IdentityViolation",
    "MouldEquationReport",
    "verify_mould_equation",
    "verify_factorization",
    "verify_support",
    "verify_grading_identities",
    "verify_conjugation_symmetry",
]


def make_T(alphabet: Alphabet) -> Mould:
    """The Laurent-valued mould 1/prod_j(s_j + j e), evaluated lazily.

    Evaluation extends the memoized value of the length-(r-1) prefix by
    one factor.  A vanishing partial sum contributes the exact monomial
    (1/j) e^-1; a nonvanishing one is expanded geometrically far enough
    that the full product is guaranteed through the requested accuracy.
    The valuation of T^w is minus the number of vanishing partial sums.
    """
    holder = []

    def fn(word: Word, acc: int) -> Laurent:
        if len(word) == 0:
            return Laurent.one()
        mould = holder[0]
        r = len(word)
        s = alphabet.phi(word)
        if not s:
            prefix = mould.value(word[:-1], acc + 1)
            return prefix * Laurent.monomial(GaussianRational(1) / r, -1)
        prefix = mould.value(word[:-1], acc)
        depth = -prefix.min_degree_bound()
        if depth < 0:
            depth = 0
        factor = Laurent.from_pairs([(0, s), (1, GaussianRational(r))]).inverse(acc + depth)
        return prefix * factor

    mould = Mould(alphabet, fn, name="T")
    holder.append(mould)
    return mould


class BirkhoffEngine:
    """Per-alphabet factorization engine with memoized word values.

    Exposes T, U_minus, U_plus as Laurent-valued moulds and R, S, N as
    constant scalar moulds.  Caches are tied to the alphabet; a different
    alphabet (different eigenvalues or a rescaled hbar) needs a fresh
    engine.
    """

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.T = make_T(alphabet)
        self._pairs: dict = {}
        # debug hook for sensitivity checks: words whose R/S/N read back
        # deliberately wrong (offset by one)
        self._corrupted: set = set()
        self.u_minus = Mould(
            alphabet, lambda w, acc: self._pair(w, 0)[0], name="U_minus", memoize=False
        )
        self.u_plus = Mould(
            alphabet, lambda w, acc: self._pair(w, acc)[1], name="U_plus", memoize=False
        )
        self.R = Mould.constant_from(alphabet, self.coeff_R, name="R")
        self.S = Mould.constant_from(alphabet, self.coeff_S, name="S")
        self.N = Mould.constant_from(alphabet, self.coeff_N, name="N")

    def _pair(self, word: Word, acc: int) -> tuple:
        """(U_minus^word, U_plus^word), the latter guaranteed through acc."""
        cached = self._pairs.get(word)
        if cached is not None:
            up_acc = cached[1].acc_order
            if up_acc is None or up_acc >= acc:
                return cached
        if len(word) == 0:
            pair = (Laurent.one(), Laurent.one())
        else:
            total = Laurent.zero()
            for j in range(len(word)):
                u_minus_prefix = self._pair(word[:j], 0)[0]
                if u_minus_prefix.is_exact_zero:
                    continue
                depth = -u_minus_prefix.min_degree_bound()
                if depth < 0:
                    depth = 0
                t_suffix = self.T.value(word[j:], acc + depth)
                total = total + u_minus_prefix * t_suffix
            pair = (-total.polar_part(), total.regular_part())
        self._pairs[word] = pair
        return pair

    def decompose(self, word: Word, acc: int = 0) -> tuple:
        """The pair (U_minus^word, U_plus^word)."""
        return self._pair(word, acc)

    # -- scalar moulds ------------------------------------------------------

    def coeff_R(self, word: Word) -> GaussianRational:
        if len(word) == 0:
            return ZERO
        value = GaussianRational(-len(word)) * self._pair(word, 0)[0].residue()
        if word in self._corrupted:
            value = value + ONE
        return value

    def coeff_S(self, word: Word) -> GaussianRational:
        value = self._pair(word, 0)[1].constant_term()
        if word in self._corrupted:
            value = value + ONE
        return value

    def coeff_N(self, word: Word) -> GaussianRational:
        if len(word) == 0:
            return ZERO
        value = -self._pair(word, 0)[0].residue()
        if word in self._corrupted:
            value = value + ONE
        return value

    def corrupt_word(self, word: Word) -> None:
        """Poison the scalar readings for one word (sensitivity testing)."""
        self._corrupted.add(word)
        for mould in (self.R, self.S, self.N):
            if mould._memo is not None:
                mould._memo.pop(word, None)


# -- verification suites ------------------------------------------------------


@dataclass
class IdentityViolation:
    word: Word
    label: str
    lhs: str
    rhs: str


@dataclass
class SuiteReport:
    name: str
    words_checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, word: Word, label: str, lhs, rhs) -> None:
        self.violations.append(IdentityViolation(word, label, str(lhs), str(rhs)))


@dataclass
class MouldEquationReport:
    s_equation: SuiteReport
    r_equation: SuiteReport
    s_symmetral: "object"

    @property
    def ok(self) -> bool:
        return self.s_equation.ok and self.r_equation.ok and self.s_symmetral.ok


def verify_mould_equation(engine: BirkhoffEngine, max_length: int) -> MouldEquationReport:
    """Residuals of nabla_phi S = S x I - R x S and nabla_phi R = 0.

    Both identities must hold with exactly zero residual on every word of
    length <= max_length; S must additionally pass the symmetrality check.
    """
    alphabet = engine.alphabet
    ones = Mould.letters(alphabet)
    rhs_mould = mould_product(engine.S, ones)
    correction = mould_product(engine.R, engine.S)
    s_report = SuiteReport(name="mould equation for S")
    r_report = SuiteReport(name="resonance of R")
    for word in alphabet.words_up_to(max_length):
        phi = alphabet.phi(word)
        s_report.words_checked += 1
        lhs = phi * engine.S.scalar_value(word)
        rhs = rhs_mould.scalar_value(word) - correction.scalar_value(word)
        if lhs != rhs:
            s_report.record(word, "nabla_phi S - (S x I - R x S)", lhs - rhs, ZERO)
        r_report.words_checked += 1
        r_residual = phi * engine.R.scalar_value(word)
        if r_residual:
            r_report.record(word, "nabla_phi R", r_residual, ZERO)
    return MouldEquationReport(
        s_equation=s_report,
        r_equation=r_report,
        s_symmetral=is_symmetral_up_to(engine.S, max_length),
    )


def verify_factorization(engine: BirkhoffEngine, max_length: int, acc: int = 0) -> SuiteReport:
    """U_minus x T agrees with U_plus through degree acc, and the parts
    have the right shape: U_minus purely polar with valuation >= -len(w),
    U_plus pole free."""
    report = SuiteReport(name="Birkhoff factorization")
    product = mould_product(engine.u_minus, engine.T)
    for word in engine.alphabet.words_up_to(max_length):
        report.words_checked += 1
        u_minus, u_plus = engine.decompose(word, acc)
        if not product.value(word, acc).agrees_with(u_plus, acc):
            report.record(word, "U_minus x T = U_plus", product.value(word, acc).render(), u_plus.render())
        if len(word) > 0:
            if not u_minus.is_exact_zero and (
                u_minus.max_degree >= 0 or u_minus.min_degree < -len(word)
            ):
                report.record(word, "U_minus shape", u_minus.render(), "polar, valuation >= -r")
            if not u_plus.is_exact_zero and u_plus.min_degree is not None and u_plus.min_degree < 0:
                report.record(word, "U_plus shape", u_plus.render(), "pole free")
    return report


def verify_support(engine: BirkhoffEngine, max_length: int) -> SuiteReport:
    """Off resonance (letter sum nonzero) U_minus and R must vanish."""
    report = SuiteReport(name="support")
    for word in engine.alphabet.words_up_to(max_length, include_empty=False):
        if not engine.alphabet.phi(word):
            continue
        report.words_checked += 1
        u_minus = engine.decompose(word)[0]
        if not u_minus.is_exact_zero:
            report.record(word, "U_minus off resonance", u_minus.render(), "0")
        r_value = engine.coeff_R(word)
        if r_value:
            report.record(word, "R off resonance", r_value, ZERO)
    return report


def verify_grading_identities(engine: BirkhoffEngine, max_length: int, acc: int = 0) -> SuiteReport:
    """The three exact identities tying the grading operator to R:

    (i)   nabla_Phi U_minus = -R x U_minus          (exact polynomials)
    (ii)  nabla_Phi U_plus  = U_plus x I - R x U_plus   (through degree acc)
    (iii) R^w = -(e * len(w) * U_minus^w) evaluated at e = infinity.
    """
    alphabet = engine.alphabet
    report = SuiteReport(name="grading identities")
    ones = Mould.letters(alphabet)
    lhs_minus = nabla(engine.u_minus, "Phi")
    rhs_minus = mould_product(engine.R, engine.u_minus)
    lhs_plus = nabla(engine.u_plus, "Phi")
    rhs_plus_a = mould_product(engine.u_plus, ones)
    rhs_plus_b = mould_product(engine.R, engine.u_plus)
    for word in alphabet.words_up_to(max_length):
        report.words_checked += 1
        left = lhs_minus.value(word, acc)
        right = -rhs_minus.value(word, acc)
        if not (left.acc_order is None and right.acc_order is None and left == right):
            report.record(word, "(i) nabla_Phi U_minus = -R x U_minus", left.render(), right.render())
        left2 = lhs_plus.value(word, acc)
        right2 = rhs_plus_a.value(word, acc) - rhs_plus_b.value(word, acc)
        if not left2.agrees_with(right2, acc):
            report.record(word, "(ii) nabla_Phi U_plus = U_plus x I - R x U_plus", left2.render(), right2.render())
        if len(word) > 0:
            scaled = engine.decompose(word)[0].scale(GaussianRational(len(word))).shift(1)
            if scaled.max_degree is not None and scaled.max_degree > 0:
                report.record(word, "(iii) shape", scaled.render(), "degrees <= 0")
            at_infinity = scaled.constant_term()
            if -at_infinity != engine.coeff_R(word):
                report.record(word, "(iii) R from U_minus at infinity", -at_infinity, engine.coeff_R(word))
    return report


def verify_conjugation_symmetry(engine: BirkhoffEngine, max_length: int) -> SuiteReport:
    """For purely imaginary alphabets closed under negation, the scalar
    moulds on the letterwise-negated word are the complex conjugates."""
    alphabet = engine.alphabet
    if not alphabet.closed_under_negation:
        raise ValueError("conjugation symmetry needs an alphabet closed under negation")
    if not alphabet.purely_imaginary:
        raise ValueError("conjugation symmetry needs a purely imaginary alphabet")
    report = SuiteReport(name="conjugation symmetry")
    readers = (
        ("R", engine.coeff_R),
        ("S", engine.coeff_S),
        ("N", engine.coeff_N),
    )
    for word in alphabet.words_up_to(max_length):
        report.words_checked += 1
        negated = alphabet.negate_word(word)
        for label, reader in readers:
            direct = reader(negated)
            mirrored = reader(word).conjugate()
            if direct != mirrored:
                report.record(word, f"{label} conjugation symmetry", direct, mirrored)
    return report
