"""Free-group words over indexed generator symbols."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Mapping, Sequence, Tuple


class UnmappedSymbol(KeyError):
    """A substitution was asked to map a symbol it has no image for."""


@dataclass(frozen=True, order=True)
class Sym:
    """A generator symbol: a short name plus up to three integer indices."""

    name: str
    indices: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.name or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", self.name):
            raise ValueError(f"bad symbol name {self.name!r}")
        if len(self.indices) > 3:
            raise ValueError(f"too many indices on {self.name!r}: {self.indices}")

    def __str__(self) -> str:
        if not self.indices:
            return self.name
        return f"{self.name}[{','.join(str(i) for i in self.indices)}]"


Letter = Tuple[Sym, int]  # (symbol, +1 or -1)


def _reduce_letters(letters: Iterable[Letter]) -> Tuple[Letter, ...]:
    out: List[Letter] = []
    for sym, exp in letters:
        if exp not in (1, -1):
            raise ValueError(f"letter exponent must be +-1, got {exp}")
        if out and out[-1][0] == sym and out[-1][1] == -exp:
            out.pop()
        else:
            out.append((sym, exp))
    return tuple(out)


class Word:
    """An immutable sequence of letters; algebraic operators freely reduce."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Letter] = ()):
        object.__setattr__(self, "letters", tuple(letters))
        for sym, exp in self.letters:
            if not isinstance(sym, Sym) or exp not in (1, -1):
                raise ValueError(f"bad letter ({sym!r}, {exp!r})")

    def __setattr__(self, *a):
        raise AttributeError("Word is immutable")

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_syms(*syms: Sym) -> "Word":
        return Word((s, 1) for s in syms)

    # -- basics --------------------------------------------------------
    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        return f"Word({print_word(self)!r})"

    def is_identity(self) -> bool:
        return not free_reduce(self).letters

    # -- group operations (always return reduced words) ----------------
    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return Word(_reduce_letters(self.letters + other.letters))

    def __invert__(self) -> "Word":
        return Word((sym, -exp) for sym, exp in reversed(self.letters))

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word()
        base = self if n > 0 else ~self
        out = Word()
        k = abs(n)
        acc = free_reduce(base)
        while k:
            if k & 1:
                out = out * acc
            acc = acc * acc
            k >>= 1
        return out

    def conj(self, by: "Word") -> "Word":
        """by * self * by^-1."""
        return by * self * ~by

    def syms(self) -> set:
        return {sym for sym, _ in self.letters}


IDENTITY = Word()


def free_reduce(w: Word) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    return Word(_reduce_letters(w.letters))


def commutator(g: Word, h: Word) -> Word:
    """[g, h] = g h g^-1 h^-1."""
    return g * h * ~g * ~h


def left_normed(args: Sequence[Word]) -> Word:
    """[x1, x2, ..., xn] = [x1, [x2, [..., xn]]]."""
    if not args:
        raise ValueError("left_normed needs at least one word")
    out = args[-1]
    for x in reversed(args[:-1]):
        out = commutator(x, out)
    return out


def substitute(w: Word, images: Mapping[Sym, Word]) -> Word:
    """Apply the homomorphism determined by symbol images; reduces."""
    out: List[Letter] = []
    for sym, exp in w.letters:
        if sym not in images:
            raise UnmappedSymbol(f"no image for symbol {sym}")
        img = images[sym]
        out.extend(img.letters if exp == 1 else (~img).letters)
    return Word(_reduce_letters(out))


def colchete_rhs(x: Word, y: Word, n: int) -> Word:
    """Expansion of [x^(2^n), y] as a product of left-normed commutators.

    [x^(2^n), y] = [x, x, x^2, ..., x^(2^(n-1)), y]
                   * [x, x^2, ..., x^(2^(n-1)), y]^2
                   * ... * [x^(2^(n-1)), y]^2
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    powers = [x ** (2 ** i) for i in range(n)]
    factors = [left_normed([x] + powers + [y])]
    for j in range(n):
        factors.append(left_normed(powers[j:] + [y]) ** 2)
    out = Word()
    for f in factors:
        out = out * f
    return out


# -- text format -------------------------------------------------------
#   word     := term ('*' term)*          (empty input -> identity)
#   term     := symbol ('^' int)?
#   symbol   := name ('[' int (',' int)* ']')?

_TOKEN = re.compile(
    r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"(?:\[(?P<idx>\s*-?\d+(?:\s*,\s*-?\d+)*\s*)\])?"
    r"|(?P<op>[*^])"
    r"|(?P<int>-?\d+))"
)


class WordSyntaxError(ValueError):
    pass


def parse_word(text: str) -> Word:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise WordSyntaxError(f"bad word syntax at offset {pos}: {text[pos:pos+12]!r}")
        pos = m.end()
        if m.group("name"):
            idx = m.group("idx")
            indices = tuple(int(s) for s in idx.split(",")) if idx else ()
            tokens.append(Sym(m.group("name"), indices))
        elif m.group("op"):
            tokens.append(m.group("op"))
        else:
            tokens.append(int(m.group("int")))
    if text.strip() == "" or text.strip() == "1":
        return Word()

    letters: List[Letter] = []
    i = 0
    expect_term = True
    while i < len(tokens):
        tok = tokens[i]
        if expect_term:
            if not isinstance(tok, Sym):
                raise WordSyntaxError(f"expected a generator, got {tok!r}")
            exp = 1
            if i + 1 < len(tokens) and tokens[i + 1] == "^":
                if i + 2 >= len(tokens) or not isinstance(tokens[i + 2], int):
                    raise WordSyntaxError("'^' must be followed by an integer")
                exp = tokens[i + 2]
                i += 2
            sign = 1 if exp >= 0 else -1
            letters.extend((tok, sign) for _ in range(abs(exp)))
            expect_term = False
        else:
            if tok != "*":
                raise WordSyntaxError(f"expected '*', got {tok!r}")
            expect_term = True
        i += 1
    if expect_term:
        raise WordSyntaxError("trailing '*'")
    return Word(letters)


def print_word(w: Word) -> str:
    if not w.letters:
        return "1"
    runs: List[Tuple[Sym, int]] = []
    for sym, exp in w.letters:
        if runs and runs[-1][0] == sym and (runs[-1][1] > 0) == (exp > 0):
            runs[-1] = (sym, runs[-1][1] + exp)
        else:
            runs.append((sym, exp))
    parts = []
    for sym, exp in runs:
        parts.append(str(sym) if exp == 1 else f"{sym}^{exp}")
    return "*".join(parts)
