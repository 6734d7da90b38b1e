"""Words over an eigenvalue alphabet and the mould algebra built on them.

A mould assigns a Laurent-series value to every finite word of alphabet
letters.  Values are produced lazily and memoized per word; repeated
evaluation returns the identical value, and a deeper accuracy request
recomputes and widens the cached entry.  Memo tables are plain dicts:
evaluation is meant to run in a single-threaded context (concurrent use
would need the caller to serialize evaluations).

Letters are referenced by index; the :class:`Alphabet` owns the mapping
between indices and exact scalar values, so word hashing stays on small
integer tuples.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Iterator, Optional

from .laurent import Laurent
from .scalars import GaussianRational, ONE, ZERO, format_scalar, parse_scalar

__all__ = [
    "Word",
    "EMPTY_WORD",
    "Alphabet",
    "shuffle",
    "Mould",
    "MouldError",
    "mould_product",
    "mould_inverse",
    "mould_antipode",
    "nabla",
    "mould_exp",
    "mould_log",
    "is_symmetral_up_to",
    "is_alternal_up_to",
    "ShuffleReport",
    "ShuffleViolation",
]


class MouldError(ValueError):
    """A mould operation's precondition was violated."""


class Word:
    """An immutable sequence of letter indices."""

    __slots__ = ("idx",)

    def __init__(self, idx: Iterable[int] = ()):
        self.idx = tuple(idx)

    def __len__(self) -> int:
        return len(self.idx)

    def __iter__(self):
        return iter(self.idx)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return Word(self.idx[key])
        return self.idx[key]

    def __add__(self, other: "Word") -> "Word":
        return Word(self.idx + other.idx)

    def reverse(self) -> "Word":
        return Word(self.idx[::-1])

    def splits(self) -> Iterator[tuple["Word", "Word"]]:
        """All factorizations self = a . b, including the trivial ones."""
        for j in range(len(self.idx) + 1):
            yield Word(self.idx[:j]), Word(self.idx[j:])

    def sort_key(self) -> tuple:
        return (len(self.idx), self.idx)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.idx == other.idx

    def __hash__(self) -> int:
        return hash(self.idx)

    def __repr__(self) -> str:
        return f"Word{self.idx!r}"


EMPTY_WORD = Word()


class Alphabet:
    """An ordered set of distinct eigenvalue letters.

    For alphabets produced by a Hermitian problem the letter set is closed
    under negation; arbitrary alphabets need not be.
    """

    def __init__(self, letters: Iterable):
        values = []
        for x in letters:
            if isinstance(x, str):
                x = parse_scalar(x)
            elif isinstance(x, (int, Fraction)):
                x = GaussianRational(x)
            values.append(x)
        self._letters = tuple(values)
        self._index = {}
        for i, v in enumerate(self._letters):
            if v in self._index:
                raise ValueError(f"duplicate letter {format_scalar(v)}")
            self._index[v] = i

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        """Comma-separated scalar literals, e.g. "i,-i,2i,0"."""
        items = [part for part in text.split(",") if part.strip()]
        if not items:
            raise ValueError("empty alphabet literal")
        return cls(items)

    def __len__(self) -> int:
        return len(self._letters)

    @property
    def letters(self) -> tuple:
        return self._letters

    def value(self, index: int) -> GaussianRational:
        return self._letters[index]

    def index(self, value) -> int:
        if isinstance(value, str):
            value = parse_scalar(value)
        return self._index[value]

    def phi(self, word: Word) -> GaussianRational:
        """Sum of the letter values of a word (zero on the empty word)."""
        total = ZERO
        for i in word.idx:
            total = total + self._letters[i]
        return total

    def partial_sums(self, word: Word) -> list:
        """Sums of the first j letters, j = 1..len(word)."""
        out = []
        total = ZERO
        for i in word.idx:
            total = total + self._letters[i]
            out.append(total)
        return out

    def word_of(self, *values) -> Word:
        """Build a word from letter values (scalar literals accepted)."""
        return Word(self.index(v) for v in values)

    def words_of_length(self, r: int) -> Iterator[Word]:
        for idx in itertools.product(range(len(self._letters)), repeat=r):
            yield Word(idx)

    def words_up_to(self, max_length: int, include_empty: bool = True) -> Iterator[Word]:
        """All words of length <= max_length, sorted by length then letter indices."""
        start = 0 if include_empty else 1
        for r in range(start, max_length + 1):
            yield from self.words_of_length(r)

    def negation_index(self, index: int) -> int:
        return self._index[-self._letters[index]]

    @property
    def closed_under_negation(self) -> bool:
        return all(-v in self._index for v in self._letters)

    @property
    def purely_imaginary(self) -> bool:
        return all(v.is_imaginary for v in self._letters)

    def negate_word(self, word: Word) -> Word:
        return Word(self.negation_index(i) for i in word.idx)

    def render_word(self, word: Word) -> str:
        if not len(word):
            return "∅"
        return "·".join(format_scalar(self._letters[i]) for i in word.idx)

    def parse_word(self, text: str) -> Word:
        """Inverse of render_word; also accepts comma separators."""
        text = text.strip()
        if text in ("", "∅"):
            return EMPTY_WORD
        sep = "·" if "·" in text else ","
        return self.word_of(*[part.strip() for part in text.split(sep)])

    def __repr__(self) -> str:
        return "Alphabet(" + ", ".join(format_scalar(v) for v in self._letters) + ")"


# -- shuffle product ------------------------------------------------------


@lru_cache(maxsize=None)
def _shuffle_pairs(a: tuple, b: tuple) -> tuple:
    if not a:
        return ((b, 1),)
    if not b:
        return ((a, 1),)
    counts: Counter = Counter()
    for w, m in _shuffle_pairs(a[1:], b):
        counts[(a[0],) + w] += m
    for w, m in _shuffle_pairs(a, b[1:]):
        counts[(b[0],) + w] += m
    return tuple(counts.items())


def shuffle(a: Word, b: Word) -> Counter:
    """All interleavings of a and b, with multiplicities.

    Follows the recursion (x a) sh (y b) = x (a sh y b) + y (x a sh b);
    the total multiplicity is binomial(len(a) + len(b), len(a)).
    """
    return Counter({Word(w): m for w, m in _shuffle_pairs(a.idx, b.idx)})


# -- moulds ----------------------------------------------------------------


class Mould:
    """A lazily evaluated family of Laurent values indexed by words.

    ``value(word, acc)`` guarantees all coefficients of degree <= acc.
    Constant-valued moulds hold e-free scalars; ``scalar_value`` reads
    them back as Gaussian rationals.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        evaluate: Callable[[Word, int], Laurent],
        constant: bool = False,
        name: str = "",
        memoize: bool = True,
    ):
        self.alphabet = alphabet
        self.constant = constant
        self.name = name
        self._evaluate = evaluate
        self._memo: Optional[dict] = {} if memoize else None

    def value(self, word: Word, acc: int = 0) -> Laurent:
        if self._memo is None:
            return self._evaluate(word, acc)
        cached = self._memo.get(word)
        if cached is not None and (cached.acc_order is None or cached.acc_order >= acc):
            return cached
        out = self._evaluate(word, acc)
        self._memo[word] = out
        return out

    def scalar_value(self, word: Word) -> GaussianRational:
        if not self.constant:
            raise MouldError(f"mould {self.name or '<anonymous>'} is not constant-valued")
        return self.value(word, 0).constant_term()

    def table_json(self, max_length: int, acc: int = 0) -> list:
        """Dump values on all words up to max_length, sorted by length then
        letter indices, as [{word, value}] with JSON-rendered series."""
        return [
            {
                "word": self.alphabet.render_word(word),
                "value": self.value(word, acc).to_json(),
            }
            for word in self.alphabet.words_up_to(max_length)
        ]

    # -- ready-made moulds ------------------------------------------------

    @classmethod
    def unit(cls, alphabet: Alphabet) -> "Mould":
        """The multiplicative unit: 1 on the empty word, 0 elsewhere."""
        def fn(word: Word, acc: int) -> Laurent:
            return Laurent.one() if len(word) == 0 else Laurent.zero()

        return cls(alphabet, fn, constant=True, name="unit")

    @classmethod
    def letters(cls, alphabet: Alphabet, weight: Optional[Callable] = None) -> "Mould":
        """Supported on single-letter words; value 1 (or a per-letter weight)."""
        def fn(word: Word, acc: int) -> Laurent:
            if len(word) != 1:
                return Laurent.zero()
            c = ONE if weight is None else weight(alphabet.value(word.idx[0]))
            return Laurent.from_scalar(c) if c else Laurent.zero()

        return cls(alphabet, fn, constant=True, name="letters")

    @classmethod
    def constant_from(cls, alphabet: Alphabet, scalar_fn: Callable[[Word], GaussianRational], name: str = "") -> "Mould":
        def fn(word: Word, acc: int) -> Laurent:
            c = scalar_fn(word)
            return Laurent.from_scalar(c) if c else Laurent.zero()

        return cls(alphabet, fn, constant=True, name=name)

    @classmethod
    def from_table(cls, alphabet: Alphabet, table: dict, name: str = "") -> "Mould":
        """Constant mould from an explicit word -> scalar table (0 off-table)."""
        def fn(word: Word, acc: int) -> Laurent:
            c = table.get(word, ZERO)
            return Laurent.from_scalar(c) if c else Laurent.zero()

        return cls(alphabet, fn, constant=True, name=name)

    def __repr__(self) -> str:
        kind = "constant mould" if self.constant else "mould"
        return f"<{kind} {self.name or '<anonymous>'} over {self.alphabet!r}>"


def _product_value(factors: list, acc: int) -> Laurent:
    """Product of mould values, guaranteed through degree acc.

    ``factors`` is a list of (mould, word) pairs.  Each factor is first
    evaluated at acc; factors are then re-requested deeper when the polar
    depth of the others would eat into the guaranteed window.
    """
    values = []
    for mould, word in factors:
        v = mould.value(word, acc)
        if v.is_exact_zero:
            return Laurent.zero()
        values.append(v)
    bounds = [v.min_degree_bound() for v in values]
    total = sum(bounds)
    for i, (mould, word) in enumerate(factors):
        need = acc - (total - bounds[i])
        if need > acc:
            values[i] = mould.value(word, need)
    out = values[0]
    for v in values[1:]:
        out = out * v
    return out


def mould_product(left: Mould, right: Mould, name: str = "") -> Mould:
    """Concatenation-dual convolution: (M x N)^w = sum over w = a.b of M^a N^b."""
    if left.alphabet is not right.alphabet:
        raise MouldError("mould product requires a shared alphabet")

    def fn(word: Word, acc: int) -> Laurent:
        total = Laurent.zero()
        for a, b in word.splits():
            total = total + _product_value([(left, a), (right, b)], acc)
        return total

    return Mould(
        left.alphabet,
        fn,
        constant=left.constant and right.constant,
        name=name or f"({left.name} x {right.name})",
    )


def mould_sum(left: Mould, right: Mould, sign: int = 1, name: str = "") -> Mould:
    def fn(word: Word, acc: int) -> Laurent:
        v = right.value(word, acc)
        return left.value(word, acc) + (v if sign > 0 else -v)

    return Mould(left.alphabet, fn, constant=left.constant and right.constant, name=name)


def mould_inverse(mould: Mould, name: str = "") -> Mould:
    """Multiplicative inverse by length recursion; requires M on the empty word to be 1."""
    if not mould.value(EMPTY_WORD, 0).agrees_with(Laurent.one(), 0):
        raise MouldError("mould is not invertible by length recursion: value on the empty word is not 1")

    inverse_holder = []

    def fn(word: Word, acc: int) -> Laurent:
        if len(word) == 0:
            return Laurent.one()
        inv = inverse_holder[0]
        total = Laurent.zero()
        for j in range(1, len(word) + 1):
            a, b = word[:j], word[j:]
            total = total + _product_value([(mould, a), (inv, b)], acc)
        return -total

    out = Mould(mould.alphabet, fn, constant=mould.constant, name=name or f"{mould.name}^-1")
    inverse_holder.append(out)
    return out


def mould_antipode(mould: Mould, name: str = "") -> Mould:
    """Signed reversal (-1)^r M^{reversed w}; inverts symmetral moulds."""
    def fn(word: Word, acc: int) -> Laurent:
        v = mould.value(word.reverse(), acc)
        return v if len(word) % 2 == 0 else -v

    return Mould(mould.alphabet, fn, constant=mould.constant, name=name or f"antipode({mould.name})")


def nabla(mould: Mould, mode: str = "phi", name: str = "") -> Mould:
    """Grading operators on moulds.

    mode "phi":    multiply M^w by the letter sum phi(w);
    mode "Phi":    multiply M^w by phi(w) + len(w) * e;
    mode "length": multiply M^w by len(w).
    """
    if mode not in ("phi", "Phi", "length"):
        raise MouldError(f"unknown nabla mode {mode!r}")
    alphabet = mould.alphabet

    def fn(word: Word, acc: int) -> Laurent:
        r = len(word)
        if mode == "length":
            return mould.value(word, acc).scale(GaussianRational(r))
        s = alphabet.phi(word)
        if mode == "phi":
            return mould.value(word, acc).scale(s)
        poly = Laurent.from_pairs([(0, s), (1, GaussianRational(r))])
        if poly.is_exact_zero:
            return Laurent.zero()
        return mould.value(word, acc) * poly

    return Mould(
        alphabet,
        fn,
        constant=mould.constant and mode != "Phi",
        name=name or f"nabla_{mode}({mould.name})",
    )


def _compositions(word: Word, parts: int) -> Iterator[tuple]:
    """Splittings of word into `parts` nonempty consecutive blocks."""
    r = len(word)
    for cuts in itertools.combinations(range(1, r), parts - 1):
        edges = (0,) + cuts + (r,)
        yield tuple(word[edges[i]:edges[i + 1]] for i in range(parts))


def mould_exp(mould: Mould, name: str = "") -> Mould:
    """Exponential for the mould product; requires value 0 on the empty word.

    Evaluation on a word of length r only involves powers up to r, so the
    series is finite per word.
    """
    if not mould.value(EMPTY_WORD, 0).is_exact_zero:
        raise MouldError("mould exponential requires value 0 on the empty word")

    def fn(word: Word, acc: int) -> Laurent:
        r = len(word)
        if r == 0:
            return Laurent.one()
        total = Laurent.zero()
        for k in range(1, r + 1):
            coeff = Fraction(1, factorial(k))
            for blocks in _compositions(word, k):
                v = _product_value([(mould, part) for part in blocks], acc)
                total = total + v.scale(coeff)
        return total

    return Mould(mould.alphabet, fn, constant=mould.constant, name=name or f"exp({mould.name})")


def mould_log(mould: Mould, name: str = "") -> Mould:
    """Logarithm for the mould product; requires value 1 on the empty word."""
    if not mould.value(EMPTY_WORD, 0).agrees_with(Laurent.one(), 0):
        raise MouldError("mould logarithm requires value 1 on the empty word")

    def fn(word: Word, acc: int) -> Laurent:
        r = len(word)
        if r == 0:
            return Laurent.zero()
        total = Laurent.zero()
        for k in range(1, r + 1):
            coeff = Fraction((-1) ** (k - 1), k)
            for blocks in _compositions(word, k):
                v = _product_value([(mould, part) for part in blocks], acc)
                total = total + v.scale(coeff)
        return total

    return Mould(mould.alphabet, fn, constant=mould.constant, name=name or f"log({mould.name})")


# -- shuffle-identity testers ------------------------------------------------


@dataclass
class ShuffleViolation:
    left: Word
    right: Word
    shuffle_sum: Laurent
    target: Laurent

    def describe(self, alphabet: Alphabet) -> str:
        return (
            f"({alphabet.render_word(self.left)}) sh ({alphabet.render_word(self.right)}): "
            f"sum = {self.shuffle_sum.render()}, expected {self.target.render()}"
        )


@dataclass
class ShuffleReport:
    property_name: str
    mould_name: str
    max_length: int
    pairs_checked: int = 0
    empty_word_ok: bool = True
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.empty_word_ok and not self.violations


def _shuffle_check(mould: Mould, max_length: int, character: bool, acc: int) -> ShuffleReport:
    alphabet = mould.alphabet
    report = ShuffleReport(
        property_name="symmetral" if character else "alternal",
        mould_name=mould.name,
        max_length=max_length,
    )
    empty_value = mould.value(EMPTY_WORD, acc)
    if character:
        report.empty_word_ok = empty_value.agrees_with(Laurent.one(), acc)
    else:
        report.empty_word_ok = empty_value.agrees_with(Laurent.zero(), acc)
    for la in range(1, max_length):
        for lb in range(la, max_length - la + 1):
            for a in alphabet.words_of_length(la):
                for b in alphabet.words_of_length(lb):
                    if la == lb and b.idx < a.idx:
                        continue
                    report.pairs_checked += 1
                    lhs = Laurent.zero()
                    for n, mult in shuffle(a, b).items():
                        lhs = lhs + mould.value(n, acc).scale(GaussianRational(mult))
                    if character:
                        rhs = _product_value([(mould, a), (mould, b)], acc)
                    else:
                        rhs = Laurent.zero()
                    if not lhs.agrees_with(rhs, acc):
                        report.violations.append(ShuffleViolation(a, b, lhs, rhs))
    return report


def is_symmetral_up_to(mould: Mould, max_length: int, acc: int = 0) -> ShuffleReport:
    """Check the character property M^(a sh b) = M^a M^b for all nonempty
    word pairs with total length <= max_length (plus M = 1 on the empty word)."""
    return _shuffle_check(mould, max_length, character=True, acc=acc)


def is_alternal_up_to(mould: Mould, max_length: int, acc: int = 0) -> ShuffleReport:
    """Check the infinitesimal-character property: the shuffle sum vanishes
    for all nonempty word pairs with total length <= max_length."""
    return _shuffle_check(mould, max_length, character=False, acc=acc)
