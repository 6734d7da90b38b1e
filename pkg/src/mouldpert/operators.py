"""Finite Hermitian matrix problems driven by the scalar moulds.

A perturbation problem is H0 + mu*V with H0 = diag(E0) exact-rational and
V an exact Hermitian matrix.  V splits into eigencomponents B_lam of the
rescaled commutator with H0; words of components weighted by the N mould
build the normal form, words weighted by the S mould build the unitary
conjugator, and the log-mould weights build its Hermitian generator.
Everything is exact except the final optional comparison against a
double-precision eigensolver.

Sign conventions: the entry in row k, column l of V belongs to the
component with letter lam = (E0(k) - E0(l)) / (i hbar), which is exactly
the eigenvalue of X -> [H0, X] / (i hbar) on that matrix unit.

Problems share no state (each carries its own decomposition and engine),
so distinct problems may be processed in parallel; within one problem,
exact arithmetic makes every accumulation order independent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .birkhoff import BirkhoffEngine
from .moulds import Alphabet, Word, mould_log
from .scalars import GaussianRational, ONE, ZERO, format_scalar, parse_scalar

__all__ = [
    "PerturbationProblem",
    "SpectralDecomposition",
    "MatrixSeries",
    "NormalizationOutput",
    "spectral_decompose",
    "nested_bracket",
    "build_normal_form",
    "build_conjugator",
    "verify_conjugacy",
    "hierarchy_oracle",
    "compare_with_oracle",
    "eigenvalue_series",
    "numeric_compare",
    "solve",
    "random_problem",
    "series_exp",
    "series_log",
]


# -- exact matrices (tuples of tuples of GaussianRational) --------------------


def zero_matrix(dim: int) -> tuple:
    row = (ZERO,) * dim
    return (row,) * dim


def identity_matrix(dim: int) -> tuple:
    return tuple(
        tuple(ONE if i == j else ZERO for j in range(dim)) for i in range(dim)
    )


def mat_add(a: tuple, b: tuple) -> tuple:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: tuple, b: tuple) -> tuple:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_neg(a: tuple) -> tuple:
    return tuple(tuple(-x for x in row) for row in a)


def mat_scale(c: GaussianRational, a: tuple) -> tuple:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: tuple, b: tuple) -> tuple:
    dim = len(a)
    cols = tuple(zip(*b))
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col) if x and y), ZERO) for col in cols)
        for row in a
    )


def mat_adjoint(a: tuple) -> tuple:
    return tuple(tuple(a[j][i].conjugate() for j in range(len(a))) for i in range(len(a)))


def mat_trace(a: tuple) -> GaussianRational:
    return sum((a[i][i] for i in range(len(a))), ZERO)


def mat_is_zero(a: tuple) -> bool:
    return all(not x for row in a for x in row)


def mat_commutator(a: tuple, b: tuple) -> tuple:
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def mat_magnitude(a: tuple) -> int:
    """Largest absolute numerator across entries; 0 for the zero matrix."""
    worst = 0
    for row in a:
        for x in row:
            worst = max(worst, abs(x.re.numerator), abs(x.im.numerator))
    return worst


def mat_to_json(a: tuple) -> list:
    return [[format_scalar(x) for x in row] for row in a]


def mat_from_json(rows: Sequence[Sequence[str]]) -> tuple:
    return tuple(tuple(parse_scalar(x) for x in row) for row in rows)


# -- truncated matrix power series --------------------------------------------


class MatrixSeries:
    """Matrix-valued polynomial in the perturbation parameter, truncated
    at a fixed order; arithmetic drops everything above it."""

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, coeffs: Sequence[tuple]):
        self.coeffs = tuple(coeffs)
        self.order = len(self.coeffs) - 1
        self.dim = len(self.coeffs[0])

    @classmethod
    def zeros(cls, dim: int, order: int) -> "MatrixSeries":
        return cls([zero_matrix(dim)] * (order + 1))

    @classmethod
    def identity(cls, dim: int, order: int) -> "MatrixSeries":
        return cls([identity_matrix(dim)] + [zero_matrix(dim)] * order)

    @classmethod
    def from_orders(cls, dim: int, order: int, terms: dict) -> "MatrixSeries":
        return cls([terms.get(k, zero_matrix(dim)) for k in range(order + 1)])

    def coefficient(self, k: int) -> tuple:
        return self.coeffs[k]

    def __add__(self, other: "MatrixSeries") -> "MatrixSeries":
        return MatrixSeries([mat_add(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "MatrixSeries") -> "MatrixSeries":
        return MatrixSeries([mat_sub(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "MatrixSeries":
        return MatrixSeries([mat_neg(a) for a in self.coeffs])

    def __mul__(self, other: "MatrixSeries") -> "MatrixSeries":
        out = []
        for k in range(self.order + 1):
            acc = zero_matrix(self.dim)
            for j in range(k + 1):
                a = self.coeffs[j]
                b = other.coeffs[k - j]
                if mat_is_zero(a) or mat_is_zero(b):
                    continue
                acc = mat_add(acc, mat_mul(a, b))
            out.append(acc)
        return MatrixSeries(out)

    def scale(self, c: GaussianRational) -> "MatrixSeries":
        return MatrixSeries([mat_scale(c, a) for a in self.coeffs])

    def adjoint(self) -> "MatrixSeries":
        return MatrixSeries([mat_adjoint(a) for a in self.coeffs])

    def is_zero(self) -> bool:
        return all(mat_is_zero(a) for a in self.coeffs)

    def trace_by_order(self) -> list:
        return [mat_trace(a) for a in self.coeffs]

    def evaluate(self, mu: Fraction) -> tuple:
        """Exact value at a rational parameter."""
        out = zero_matrix(self.dim)
        power = GaussianRational(1)
        scale = GaussianRational(mu)
        for a in self.coeffs:
            out = mat_add(out, mat_scale(power, a))
            power = power * scale
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    def to_json(self) -> list:
        return [mat_to_json(a) for a in self.coeffs]


def series_exp(a: MatrixSeries) -> MatrixSeries:
    """exp of a series with vanishing order-0 term (finite in truncation)."""
    if not mat_is_zero(a.coefficient(0)):
        raise ValueError("series_exp needs a vanishing order-0 coefficient")
    out = MatrixSeries.identity(a.dim, a.order)
    term = MatrixSeries.identity(a.dim, a.order)
    for j in range(1, a.order + 1):
        term = (term * a).scale(GaussianRational(Fraction(1, j)))
        if term.is_zero():
            break
        out = out + term
    return out


def series_log(a: MatrixSeries) -> MatrixSeries:
    """log of a series with identity order-0 term."""
    if a.coefficient(0) != identity_matrix(a.dim):
        raise ValueError("series_log needs an identity order-0 coefficient")
    rest = a - MatrixSeries.identity(a.dim, a.order)
    out = MatrixSeries.zeros(a.dim, a.order)
    power = MatrixSeries.identity(a.dim, a.order)
    for j in range(1, a.order + 1):
        power = power * rest
        if power.is_zero():
            break
        out = out + power.scale(GaussianRational(Fraction((-1) ** (j - 1), j)))
    return out


# -- problems ------------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationProblem:
    """H0 + mu*V with exact data; hbar rescales the commutator bracket."""

    e0: tuple
    v: tuple
    hbar: Fraction = Fraction(1)
    order: int = 4

    def __post_init__(self):
        object.__setattr__(self, "e0", tuple(Fraction(x) for x in self.e0))
        object.__setattr__(self, "hbar", Fraction(self.hbar))
        v = tuple(tuple(row) for row in self.v)
        object.__setattr__(self, "v", v)
        dim = len(self.e0)
        if dim == 0:
            raise ValueError("empty unperturbed spectrum")
        if len(v) != dim or any(len(row) != dim for row in v):
            raise ValueError("V must be square with the same dimension as E0")
        if self.hbar <= 0:
            raise ValueError("hbar must be a positive rational")
        if self.order < 0:
            raise ValueError("order must be nonnegative")
        for k in range(dim):
            for l in range(k, dim):
                if v[k][l] != v[l][k].conjugate():
                    raise ValueError(f"V is not Hermitian at ({k},{l})")

    @property
    def dim(self) -> int:
        return len(self.e0)

    @property
    def is_simple(self) -> bool:
        return len(set(self.e0)) == self.dim

    def h0_matrix(self) -> tuple:
        return tuple(
            tuple(GaussianRational(self.e0[i]) if i == j else ZERO for j in range(self.dim))
            for i in range(self.dim)
        )

    def h_series(self) -> MatrixSeries:
        """H0 + mu*V as a matrix series truncated at the problem order."""
        return MatrixSeries.from_orders(
            self.dim, self.order, {0: self.h0_matrix(), 1: self.v}
        )

    def resonant_part(self, a: tuple) -> tuple:
        return tuple(
            tuple(a[k][l] if self.e0[k] == self.e0[l] else ZERO for l in range(self.dim))
            for k in range(self.dim)
        )

    @classmethod
    def from_json_dict(cls, data: dict) -> "PerturbationProblem":
        def real_fraction(text) -> Fraction:
            value = parse_scalar(str(text))
            if not value.is_real:
                raise ValueError(f"expected a real rational, got {text!r}")
            return value.re

        e0 = [real_fraction(x) for x in data["E0"]]
        v = mat_from_json(data["V"])
        hbar = real_fraction(data.get("hbar", "1"))
        order = int(data.get("order", 4))
        return cls(e0=tuple(e0), v=v, hbar=hbar, order=order)

    def to_json_dict(self) -> dict:
        return {
            "E0": [format_scalar(GaussianRational(x)) for x in self.e0],
            "V": mat_to_json(self.v),
            "hbar": format_scalar(GaussianRational(self.hbar)),
            "order": self.order,
        }


def random_problem(
    dim: int,
    order: int,
    seed: int,
    hbar: Fraction = Fraction(1),
    density: float = 0.8,
    max_abs: int = 2,
    degenerate: bool = False,
) -> PerturbationProblem:
    """Seeded random Hermitian problem with small integer data."""
    rng = random.Random(seed)
    if degenerate and dim >= 2:
        e0 = rng.sample(range(-6, 7), dim - 1)
        e0.append(e0[0])
        rng.shuffle(e0)
    else:
        e0 = rng.sample(range(-6, 7), dim)
    rows = [[ZERO] * dim for _ in range(dim)]
    for k in range(dim):
        rows[k][k] = GaussianRational(rng.randint(-max_abs, max_abs))
        for l in range(k + 1, dim):
            if rng.random() < density:
                re = rng.randint(-max_abs, max_abs)
                im = rng.randint(-max_abs, max_abs)
                rows[k][l] = GaussianRational(re, im)
                rows[l][k] = rows[k][l].conjugate()
    return PerturbationProblem(
        e0=tuple(Fraction(x) for x in e0),
        v=tuple(tuple(r) for r in rows),
        hbar=hbar,
        order=order,
    )


# -- spectral decomposition -----------------------------------------------------


class SpectralDecomposition:
    """V split into eigencomponents of X -> [H0, X] / (i hbar).

    The alphabet collects the distinct letters lam = (E0(k) - E0(l))/(i hbar)
    over the support of V, closed under negation (automatic for Hermitian V).
    Component matrices satisfy [H0, B_lam]/(i hbar) = lam * B_lam exactly and
    sum to V; the adjoint of B_lam is B_(-lam).
    """

    def __init__(self, problem: PerturbationProblem):
        self.problem = problem
        dim = problem.dim
        inv_hbar = Fraction(1) / problem.hbar
        letter_of: dict = {}
        for k in range(dim):
            for l in range(dim):
                if problem.v[k][l]:
                    lam = GaussianRational(0, (problem.e0[k] - problem.e0[l]) * (-inv_hbar))
                    letter_of[(k, l)] = lam
        letters = set(letter_of.values())
        letters |= {-lam for lam in letters}
        ordered = sorted(letters, key=lambda z: (z.re, z.im))
        self.alphabet = Alphabet(ordered)
        components = [
            [[ZERO] * dim for _ in range(dim)] for _ in range(len(ordered))
        ]
        for (k, l), lam in letter_of.items():
            components[self.alphabet.index(lam)][k][l] = problem.v[k][l]
        self.components = tuple(tuple(tuple(row) for row in comp) for comp in components)
        # (row, col, entry, letter index) quadruples per component, and a
        # per-row adjacency view for chain walks
        self.entries = tuple(
            tuple(
                (k, l, comp[k][l])
                for k in range(dim)
                for l in range(dim)
                if comp[k][l]
            )
            for comp in self.components
        )
        adjacency = [[] for _ in range(dim)]
        for letter_index, comp in enumerate(self.components):
            for k in range(dim):
                for l in range(dim):
                    if comp[k][l]:
                        adjacency[k].append((l, letter_index, comp[k][l]))
        self.adjacency = tuple(tuple(row) for row in adjacency)
        self.inv_ihbar = GaussianRational(0, -inv_hbar)
        self._bracket_memo: dict = {}

    def component(self, letter_index: int) -> tuple:
        return self.components[letter_index]

    def component_for(self, letter) -> tuple:
        return self.components[self.alphabet.index(letter)]

    def sparse_left_bracket(self, letter_index: int, x: tuple) -> tuple:
        """[B_letter, x] / (i hbar) exploiting the sparsity of the component."""
        dim = self.problem.dim
        rows = [[ZERO] * dim for _ in range(dim)]
        for k, l, value in self.entries[letter_index]:
            scaled = self.inv_ihbar * value
            row_x = x[l]
            row_out = rows[k]
            for j in range(dim):
                if row_x[j]:
                    row_out[j] = row_out[j] + scaled * row_x[j]
            for i in range(dim):
                if x[i][k]:
                    rows[i][l] = rows[i][l] - x[i][k] * scaled
        return tuple(tuple(row) for row in rows)

    def nested_bracket(self, word: Word) -> tuple:
        """Right-nested rescaled commutator of the word's components.

        One 1/(i hbar) per bracket, so len(word) - 1 factors; a single
        letter gives the bare component.
        """
        if len(word) == 0:
            raise ValueError("nested bracket of the empty word")
        cached = self._bracket_memo.get(word)
        if cached is not None:
            return cached
        if len(word) == 1:
            out = self.components[word.idx[0]]
        else:
            out = self.sparse_left_bracket(word.idx[0], self.nested_bracket(word[1:]))
        self._bracket_memo[word] = out
        return out

    def reachable_sums(self, max_letters: int) -> list:
        """reach[m] = set of letter sums attainable with at most m letters."""
        values = self.alphabet.letters
        reach = [{ZERO}]
        for _ in range(max_letters):
            grown = set(reach[-1])
            for s in reach[-1]:
                for v in values:
                    grown.add(s + v)
            reach.append(grown)
        return reach


def spectral_decompose(problem: PerturbationProblem) -> SpectralDecomposition:
    return SpectralDecomposition(problem)


def nested_bracket(sd: SpectralDecomposition, word: Word) -> tuple:
    return sd.nested_bracket(word)


# -- mould expansions ------------------------------------------------------------


def _bracket_sum(
    sd: SpectralDecomposition,
    coeff_fn: Callable[[Word], GaussianRational],
    max_order: int,
    resonant_only: bool,
    collector: Optional[dict] = None,
) -> list:
    """Accumulate coeff(word) * nested_bracket(word) over words, by length.

    Words are walked right to left so each step costs one sparse bracket;
    branches die as soon as the bracket vanishes.  With resonant_only the
    walk additionally prunes prefixes that cannot be completed to a word
    with zero letter sum (coefficients of nonresonant words vanish by the
    support property, which the verification suite checks independently).
    """
    dim = sd.problem.dim
    totals = [zero_matrix(dim) for _ in range(max_order + 1)]
    letters = range(len(sd.alphabet))
    values = sd.alphabet.letters
    reach = sd.reachable_sums(max_order) if resonant_only else None

    def visit(word: tuple, sigma: GaussianRational, bracket: Optional[tuple], depth: int):
        if depth > 0 and ((not resonant_only) or not sigma):
            w = Word(word)
            c = coeff_fn(w)
            if c:
                totals[depth] = mat_add(totals[depth], mat_scale(c, bracket))
                if collector is not None:
                    collector[w] = c
        if depth == max_order:
            return
        for i in letters:
            if depth == 0:
                extended = sd.components[i]
            else:
                extended = sd.sparse_left_bracket(i, bracket)
            if mat_is_zero(extended):
                continue
            sigma2 = sigma + values[i]
            if resonant_only and -sigma2 not in reach[max_order - depth - 1]:
                continue
            visit((i,) + word, sigma2, extended, depth + 1)

    visit((), ZERO, None, 0)
    return totals


def build_normal_form(
    sd: SpectralDecomposition, engine: BirkhoffEngine
) -> tuple:
    """The normal-form series: order k sums N^w * nested_bracket(w) over
    words of length k.  Returns (MatrixSeries, word -> coefficient table)."""
    problem = sd.problem
    contributing: dict = {}
    totals = _bracket_sum(
        sd, engine.coeff_N, problem.order, resonant_only=True, collector=contributing
    )
    terms = {k: totals[k] for k in range(1, problem.order + 1)}
    table = {
        w: {"N": c, "S": engine.coeff_S(w)} for w, c in contributing.items()
    }
    return MatrixSeries.from_orders(problem.dim, problem.order, terms), table


def build_conjugator(
    sd: SpectralDecomposition,
    engine: BirkhoffEngine,
    with_generator: bool = True,
) -> tuple:
    """The unitary conjugator and (optionally) its Hermitian generator.

    Order k of C sums S^w (1/(i hbar))^k B_(w1) ... B_(wk) over words of
    length k, accumulated by walking index chains of V so only nonzero
    products are ever touched.  The generator expands the logarithm of S
    over nested brackets with weight 1/len(word); exp((1/(i hbar)) W) = C.
    """
    problem = sd.problem
    dim = problem.dim
    K = problem.order
    inv_pows = [ONE]
    for _ in range(K):
        inv_pows.append(inv_pows[-1] * sd.inv_ihbar)
    rows = [
        [[ONE if (k == 0 and i == j) else ZERO for j in range(dim)] for i in range(dim)]
        for k in range(K + 1)
    ]
    coeff_S = engine.coeff_S
    adjacency = sd.adjacency

    def walk(k0: int, at: int, depth: int, product: GaussianRational, word: tuple):
        if depth:
            s = coeff_S(Word(word))
            if s:
                cell = rows[depth][k0]
                cell[at] = cell[at] + s * inv_pows[depth] * product
        if depth == K:
            return
        for nxt, letter_index, entry in adjacency[at]:
            walk(k0, nxt, depth + 1, product * entry, word + (letter_index,))

    for k0 in range(dim):
        walk(k0, k0, 0, ONE, ())
    c_series = MatrixSeries([tuple(tuple(r) for r in rows[k]) for k in range(K + 1)])

    w_series = None
    if with_generator:
        log_s = mould_log(engine.S, name="log S")

        def weight(word: Word) -> GaussianRational:
            return log_s.scalar_value(word) / len(word)

        totals = _bracket_sum(sd, weight, K, resonant_only=False)
        w_series = MatrixSeries.from_orders(
            dim, K, {k: totals[k] for k in range(1, K + 1)}
        )
    return c_series, w_series


# -- verification ------------------------------------------------------------------


@dataclass
class ConjugacyReport:
    """Exact residuals of the normalization identities, per order in mu."""

    conjugacy_magnitude: list
    unitarity_magnitude: list
    commutation_ok: list
    hermitian_ok: list
    trace_ok: dict
    generator_matches: Optional[bool] = None
    generator_hermitian: Optional[bool] = None

    @property
    def conjugacy_ok(self) -> bool:
        return all(m == 0 for m in self.conjugacy_magnitude)

    @property
    def unitarity_ok(self) -> bool:
        return all(m == 0 for m in self.unitarity_magnitude)

    @property
    def ok(self) -> bool:
        return (
            self.conjugacy_ok
            and self.unitarity_ok
            and all(self.commutation_ok)
            and all(self.hermitian_ok)
            and all(self.trace_ok.values())
            and self.generator_matches is not False
            and self.generator_hermitian is not False
        )

    def to_json(self) -> dict:
        return {
            "conjugacy": self.conjugacy_ok,
            "conjugacy_residual_magnitude": self.conjugacy_magnitude,
            "unitarity": self.unitarity_ok,
            "unitarity_residual_magnitude": self.unitarity_magnitude,
            "commutation": all(self.commutation_ok),
            "hermitian": all(self.hermitian_ok),
            "trace_powers": {str(p): ok for p, ok in self.trace_ok.items()},
            "generator_matches": self.generator_matches,
            "generator_hermitian": self.generator_hermitian,
        }


def verify_conjugacy(problem: PerturbationProblem, out: "NormalizationOutput") -> ConjugacyReport:
    """C (H0 + mu V) C* - (H0 + N) must vanish identically through the
    truncation order, alongside unitarity, [H0, N_k] = 0, Hermiticity of
    N_k, and conservation of tr((H0 + mu V)^p)."""
    h = problem.h_series()
    h0 = problem.h0_matrix()
    c = out.c_series
    c_adj = c.adjoint()
    rhs = MatrixSeries([h0] + list(out.n_series.coeffs[1:]))
    residual = c * h * c_adj - rhs
    unitarity = c * c_adj - MatrixSeries.identity(problem.dim, problem.order)
    commutation = [
        mat_is_zero(mat_commutator(h0, out.n_series.coefficient(k)))
        for k in range(1, problem.order + 1)
    ]
    hermitian = [
        out.n_series.coefficient(k) == mat_adjoint(out.n_series.coefficient(k))
        for k in range(1, problem.order + 1)
    ]
    trace_ok = {}
    lhs_power = MatrixSeries.identity(problem.dim, problem.order)
    rhs_power = MatrixSeries.identity(problem.dim, problem.order)
    for p in range(1, problem.dim + 1):
        lhs_power = lhs_power * h
        rhs_power = rhs_power * rhs
        trace_ok[p] = lhs_power.trace_by_order() == rhs_power.trace_by_order()
    generator_matches = None
    generator_hermitian = None
    if out.w_series is not None:
        generator_hermitian = out.w_series == out.w_series.adjoint()
        generator_matches = series_exp(out.w_series.scale(out.decomposition.inv_ihbar)) == c
    return ConjugacyReport(
        conjugacy_magnitude=[mat_magnitude(a) for a in residual.coeffs],
        unitarity_magnitude=[mat_magnitude(a) for a in unitarity.coeffs],
        commutation_ok=commutation,
        hermitian_ok=hermitian,
        trace_ok=trace_ok,
        generator_matches=generator_matches,
        generator_hermitian=generator_hermitian,
    )


# -- the classical recursive construction (independent ground truth) -----------------


def hierarchy_oracle(problem: PerturbationProblem) -> tuple:
    """Order-by-order normalization by explicit generators.

    At order k the still-unnormalized coefficient A splits into its
    resonant part (the new N_k) and an off-resonant rest absorbed by
    W_k[n][m] = i hbar A[n][m] / (E0(n) - E0(m)); conjugating by
    exp((1/(i hbar)) mu^k W_k) clears order k and the loop moves on.
    The resonant part of each W_k is fixed to zero (free gauge).
    Returns ([N_1..N_K], [W_1..W_K]).
    """
    dim = problem.dim
    K = problem.order
    ihbar = GaussianRational(0, problem.hbar)
    x = problem.h_series()
    n_parts = []
    w_parts = []
    for k in range(1, K + 1):
        a = x.coefficient(k)
        n_k = problem.resonant_part(a)
        w_rows = []
        for n in range(dim):
            row = []
            for m in range(dim):
                if problem.e0[n] == problem.e0[m]:
                    row.append(ZERO)
                else:
                    gap = GaussianRational(problem.e0[n] - problem.e0[m])
                    row.append(ihbar * a[n][m] / gap)
            w_rows.append(tuple(row))
        w_k = tuple(w_rows)
        n_parts.append(n_k)
        w_parts.append(w_k)
        generator = MatrixSeries.from_orders(
            dim, K, {k: mat_scale(GaussianRational(0, -Fraction(1) / problem.hbar), w_k)}
        )
        e = series_exp(generator)
        x = e * x * e.adjoint()
    return n_parts, w_parts


@dataclass
class OracleReport:
    orders_equal: list
    first_mismatch: Optional[int] = None

    @property
    def ok(self) -> bool:
        return all(self.orders_equal)

    def to_json(self) -> dict:
        return {"match": self.ok, "orders_equal": self.orders_equal, "first_mismatch": self.first_mismatch}


def compare_with_oracle(problem: PerturbationProblem, n_series: MatrixSeries) -> OracleReport:
    n_parts, _ = hierarchy_oracle(problem)
    flags = []
    first = None
    for k in range(1, problem.order + 1):
        same = n_series.coefficient(k) == n_parts[k - 1]
        flags.append(same)
        if not same and first is None:
            first = k
    return OracleReport(orders_equal=flags, first_mismatch=first)


# -- eigenvalue series and the numeric cross-check ------------------------------------


@dataclass
class EigenvalueSeries:
    """Per-level corrections for simple spectra; degenerate spectra keep
    the per-order block matrices and defer to the numeric comparison."""

    problem: PerturbationProblem
    n_series: MatrixSeries
    kind: str
    table: Optional[dict] = None  # index -> [Fraction coefficients, orders 0..K]

    def partial_sum(self, index: int, mu: Fraction) -> Fraction:
        if self.table is None:
            raise ValueError("per-level series only exist for simple spectra")
        total = Fraction(0)
        power = Fraction(1)
        for c in self.table[index]:
            total += c * power
            power *= mu
        return total

    def normal_matrix_at(self, mu: Fraction) -> tuple:
        h0 = self.problem.h0_matrix()
        return mat_add(h0, self.n_series.evaluate(mu))

    def to_json(self):
        if self.table is not None:
            return {
                str(n): [format_scalar(GaussianRational(c)) for c in coeffs]
                for n, coeffs in sorted(self.table.items())
            }
        return {
            "degenerate_blocks": self.n_series.to_json(),
        }


def eigenvalue_series(problem: PerturbationProblem, n_series: MatrixSeries) -> EigenvalueSeries:
    if not problem.is_simple:
        return EigenvalueSeries(problem, n_series, kind="degenerate")
    table = {}
    for n in range(problem.dim):
        coeffs = [problem.e0[n]]
        for k in range(1, problem.order + 1):
            entry = n_series.coefficient(k)[n][n]
            if not entry.is_real:
                raise ValueError(f"eigenvalue correction at order {k} is not real")
            coeffs.append(entry.re)
        table[n] = coeffs
    return EigenvalueSeries(problem, n_series, kind="simple", table=table)


@dataclass
class NumericSample:
    mu: Fraction
    errors: list
    max_error: float
    ambiguous: bool

    def to_json(self) -> dict:
        return {
            "mu": format_scalar(GaussianRational(self.mu)),
            "errors": self.errors,
            "max_error": self.max_error,
            "ambiguous": self.ambiguous,
        }


@dataclass
class NumericReport:
    samples: list

    def to_json(self) -> list:
        return [s.to_json() for s in self.samples]


def _to_complex_matrix(a: tuple) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in a], dtype=complex)


def numeric_compare(
    problem: PerturbationProblem,
    eigen: EigenvalueSeries,
    mu_samples: Sequence[Fraction],
) -> NumericReport:
    """|double-precision eigenvalue - exact partial sum| per sample.

    Matching is by proximity; a match is flagged ambiguous when the two
    nearest numeric eigenvalues are closer than 1e-8 times the spectral
    range.  Expected decay between samples is mu^(K+1) (or the first
    nonvanishing neglected order).
    """
    samples = []
    h0 = problem.h0_matrix()
    for mu in mu_samples:
        h_mu = mat_add(h0, mat_scale(GaussianRational(mu), problem.v))
        try:
            numeric = np.linalg.eigvalsh(_to_complex_matrix(h_mu))
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"numeric diagonalization failed at mu = {mu}: {exc}") from exc
        spread = float(numeric[-1] - numeric[0]) or 1.0
        tol = 1e-8 * spread
        ambiguous = False
        errors = []
        if eigen.kind == "simple":
            for n in range(problem.dim):
                target = float(eigen.partial_sum(n, mu))
                gaps = np.abs(numeric - target)
                order = np.argsort(gaps)
                best = gaps[order[0]]
                if len(order) > 1 and gaps[order[1]] - best < tol:
                    ambiguous = True
                errors.append(float(best))
        else:
            reference = np.linalg.eigvalsh(
                _to_complex_matrix(eigen.normal_matrix_at(mu))
            )
            errors = [float(abs(a - b)) for a, b in zip(numeric, reference)]
        samples.append(
            NumericSample(
                mu=mu,
                errors=errors,
                max_error=max(errors) if errors else 0.0,
                ambiguous=ambiguous,
            )
        )
    return NumericReport(samples=samples)


# -- whole pipeline --------------------------------------------------------------------


@dataclass
class NormalizationOutput:
    problem: PerturbationProblem
    decomposition: SpectralDecomposition
    engine: BirkhoffEngine
    n_series: MatrixSeries
    c_series: MatrixSeries
    w_series: Optional[MatrixSeries]
    coefficient_table: dict
    conjugacy: Optional[ConjugacyReport] = None
    oracle: Optional[OracleReport] = None
    eigen: Optional[EigenvalueSeries] = None
    numeric: Optional[NumericReport] = None

    @property
    def ok(self) -> bool:
        if self.conjugacy is None or not self.conjugacy.ok:
            return False
        if self.oracle is not None and not self.oracle.ok:
            return False
        return True

    def to_json_dict(self) -> dict:
        alphabet = self.decomposition.alphabet
        words = sorted(self.coefficient_table, key=lambda w: w.sort_key())
        return {
            "problem": self.problem.to_json_dict(),
            "alphabet": [format_scalar(v) for v in alphabet.letters],
            "coefficients": [
                {
                    "word": alphabet.render_word(w),
                    "N": format_scalar(self.coefficient_table[w]["N"]),
                    "S": format_scalar(self.coefficient_table[w]["S"]),
                }
                for w in words
            ],
            "N_matrices": {
                str(k): mat_to_json(self.n_series.coefficient(k))
                for k in range(1, self.problem.order + 1)
            },
            "C_matrices": {
                str(k): mat_to_json(self.c_series.coefficient(k))
                for k in range(self.problem.order + 1)
            },
            "eigenvalue_series": self.eigen.to_json() if self.eigen else None,
            "verification": {
                **(self.conjugacy.to_json() if self.conjugacy else {}),
                "oracle_match": None if self.oracle is None else self.oracle.ok,
                "numeric": self.numeric.to_json() if self.numeric else None,
            },
        }


def solve(
    problem: PerturbationProblem,
    mu_samples: Sequence[Fraction] = (),
    compare_oracle: bool = True,
    with_generator: bool = True,
) -> NormalizationOutput:
    """Run the whole pipeline on one problem and verify it."""
    sd = spectral_decompose(problem)
    engine = BirkhoffEngine(sd.alphabet)
    n_series, table = build_normal_form(sd, engine)
    c_series, w_series = build_conjugator(sd, engine, with_generator=with_generator)
    out = NormalizationOutput(
        problem=problem,
        decomposition=sd,
        engine=engine,
        n_series=n_series,
        c_series=c_series,
        w_series=w_series,
        coefficient_table=table,
    )
    out.conjugacy = verify_conjugacy(problem, out)
    if compare_oracle and problem.is_simple:
        out.oracle = compare_with_oracle(problem, n_series)
    out.eigen = eigenvalue_series(problem, n_series)
    if mu_samples:
        out.numeric = numeric_compare(problem, out.eigen, mu_samples)
    return out
