"""Finitely presented groups: a catalog of surface braid presentations,
abelianization via Smith normal form, relation checking, and the
derived-subgroup generator expansion for torus braid groups."""

from __future__ import annotations

from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .words import (
    IDENTITY,
    Sym,
    UnmappedSymbol,
    Word,
    free_reduce,
    print_word,
    substitute,
)

TRIVIAL = "Trivial"
NONTRIVIAL = "NonTrivial"
INDETERMINATE = "Indeterminate"


class BadParameters(ValueError):
    pass


class Presentation:
    """Generators plus relators (relations lhs=rhs stored as lhs*rhs^-1)."""

    __slots__ = ("label", "generators", "relators")

    def __init__(self, label: str, generators: Sequence[Sym], relators: Sequence[Word]):
        self.label = label
        self.generators = tuple(generators)
        if len(set(self.generators)) != len(self.generators):
            raise ValueError(f"duplicate generators in {label!r}")
        gen_set = set(self.generators)
        reduced = []
        for r in relators:
            r = free_reduce(r)
            stray = r.syms() - gen_set
            if stray:
                raise ValueError(f"relator uses undeclared symbols {stray} in {label!r}")
            reduced.append(r)
        self.relators = tuple(reduced)

    def __repr__(self) -> str:
        return (f"Presentation({self.label!r}, {len(self.generators)} generators, "
                f"{len(self.relators)} relators)")

    def dumps(self) -> str:
        lines = [f"group {self.label}"]
        lines.append("gens: " + " ".join(str(g) for g in self.generators))
        for r in self.relators:
            lines.append(f"rel: {print_word(r)}")
        return "\n".join(lines) + "\n"


class IntMatrix:
    """A dense matrix of arbitrary-precision integers."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[int]], cols: Optional[int] = None):
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        if self.rows:
            widths = {len(row) for row in self.entries}
            if len(widths) != 1:
                raise ValueError("ragged matrix")
            self.cols = widths.pop()
            if cols is not None and cols != self.cols:
                raise ValueError(f"expected {cols} columns, got {self.cols}")
        else:
            self.cols = 0 if cols is None else cols

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix([[int(i == j) for j in range(n)] for i in range(n)])

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch {self.cols} vs {other.rows}")
        return IntMatrix(
            [[sum(self.entries[i][k] * other.entries[k][j] for k in range(self.cols))
              for j in range(other.cols)]
             for i in range(self.rows)],
            cols=other.cols,
        )

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self) -> str:
        return f"IntMatrix({self.entries!r})"


class AbelianInvariants:
    """Invariant factors of a finitely generated abelian group."""

    __slots__ = ("free_rank", "torsion")

    def __init__(self, free_rank: int, torsion: Sequence[int]):
        self.free_rank = free_rank
        self.torsion = tuple(torsion)
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"torsion coefficients must be >= 2, got {d}")
        for d, e in zip(self.torsion, self.torsion[1:]):
            if e % d:
                raise ValueError(f"torsion chain broken: {d} does not divide {e}")

    def __eq__(self, other) -> bool:
        return (isinstance(other, AbelianInvariants)
                and self.free_rank == other.free_rank
                and self.torsion == other.torsion)

    def __hash__(self) -> int:
        return hash((self.free_rank, self.torsion))

    def __repr__(self) -> str:
        return f"AbelianInvariants(free_rank={self.free_rank}, torsion={list(self.torsion)})"


def smith_normal_form(m: IntMatrix) -> Tuple[List[int], IntMatrix, IntMatrix]:
    """Diagonalize over the integers: left * m * right is diagonal with
    d1 | d2 | ... | dr >= 0, and left/right unimodular."""
    a = [row[:] for row in m.entries]
    rows, cols = m.rows, m.cols
    left = IntMatrix.identity(rows)
    right = IntMatrix.identity(cols)

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        left.entries[i] = [x - q * y for x, y in zip(left.entries[i], left.entries[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in right.entries:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left.entries[i], left.entries[j] = left.entries[j], left.entries[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right.entries:
            row[i], row[j] = row[j], row[i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        left.entries[i] = [-x for x in left.entries[i]]

    t = 0
    while t < rows and t < cols:
        # move a nonzero pivot of minimal magnitude to (t, t)
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, q)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if not dirty:
                break
        if a[t][t] < 0:
            negate_row(t)
        # restore divisibility: fold any entry the pivot misses back in
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            a[t] = [x + y for x, y in zip(a[t], a[offender])]
            left.entries[t] = [x + y for x, y in zip(left.entries[t], left.entries[offender])]
            continue
        t += 1
    diag = [a[i][i] for i in range(min(rows, cols))]
    return diag, left, right


# -- presentation catalog ----------------------------------------------

def _a(i: int) -> Sym:
    return Sym("a", (i,))


def _b(i: int) -> Sym:
    return Sym("b", (i,))


def _s(i: int) -> Sym:
    return Sym("s", (i,))


def _w(*letters) -> Word:
    out: List[Tuple[Sym, int]] = []
    for item in letters:
        if isinstance(item, Sym):
            out.append((item, 1))
        elif isinstance(item, Word):
            out.extend(item.letters)
        else:
            sym, exp = item
            out.extend([(sym, 1 if exp > 0 else -1)] * abs(exp))
    return free_reduce(Word(out))


def _relator(lhs: Word, rhs: Word) -> Word:
    return free_reduce(lhs * ~rhs)


def _pure_surface(n: int, klein: bool) -> Presentation:
    if n < 1:
        raise BadParameters(f"need n >= 1, got {n}")

    def C(i: int, j: int) -> Word:
        if i == j:
            return IDENTITY
        if not 1 <= i < j <= n:
            raise BadParameters(f"no generator C[{i},{j}] for n={n}")
        return Word.from_syms(Sym("C", (i, j)))

    def A(i: int) -> Word:
        return Word.from_syms(_a(i))

    def B(i: int) -> Word:
        return Word.from_syms(_b(i))

    rels: List[Word] = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            # (1)  a_i a_j = a_j a_i
            rels.append(_relator(A(i) * A(j), A(j) * A(i)))
            # (2)  a_i^-1 b_j a_i = b_j a_j C_{i,j}^-1 C_{i+1,j} a_j^-1
            rels.append(_relator(~A(i) * B(j) * A(i),
                                 B(j) * A(j) * ~C(i, j) * C(i + 1, j) * ~A(j)))
            # (6)  b_j b_i = b_i b_j           (torus)
            #      b_j b_i = b_i b_j C_{i,j} C_{i+1,j}^-1   (Klein bottle)
            tail = C(i, j) * ~C(i + 1, j) if klein else IDENTITY
            rels.append(_relator(B(j) * B(i), B(i) * B(j) * tail))
            # (7)  b_i^-1 a_j b_i = a_j b_j (C_{i,j} C_{i+1,j}^-1)^(+-1) b_j^-1
            mid = C(i, j) * ~C(i + 1, j)
            if klein:
                mid = ~mid
            rels.append(_relator(~B(i) * A(j) * B(i), A(j) * B(j) * mid * ~B(j)))
    # (3) and (8): conjugation of C_{j,k} by a_i and b_i
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(j + 1, n + 1):
                if i < j or k < i:
                    rels.append(_relator(~A(i) * C(j, k) * A(i), C(j, k)))
                    rels.append(_relator(~B(i) * C(j, k) * B(i), C(j, k)))
                elif j <= i < k:
                    rels.append(_relator(
                        ~A(i) * C(j, k) * A(i),
                        A(k) * ~C(i + 1, k) * C(i, k) * ~A(k)
                        * C(j, k) * ~C(i, k) * C(i + 1, k)))
                    swap = C(i, k) * ~C(i + 1, k)
                    if klein:
                        swap = ~swap
                    rels.append(_relator(
                        ~B(i) * C(j, k) * B(i),
                        C(i + 1, k) * ~C(i, k) * C(j, k) * B(k) * swap * ~B(k)))
    # (4): conjugation of C_{j,k} by C_{i,l}
    for i in range(1, n + 1):
        for l in range(i + 1, n + 1):
            for j in range(1, n + 1):
                for k in range(j + 1, n + 1):
                    if (i < l < j < k) or (j <= i < l < k):
                        rels.append(_relator(~C(i, l) * C(j, k) * C(i, l), C(j, k)))
                    elif i < j <= l < k:
                        rels.append(_relator(
                            ~C(i, l) * C(j, k) * C(i, l),
                            C(i, k) * ~C(l + 1, k) * C(l, k) * ~C(i, k)
                            * C(j, k) * ~C(l, k) * C(l + 1, k)))
    # (5): the surface relation, one per strand
    for i in range(1, n + 1):
        prod = IDENTITY
        for j in range(i + 1, n + 1):
            if klein:
                prod = prod * C(i, j) * ~C(i + 1, j)
            else:
                prod = prod * ~C(i, j) * C(i + 1, j)
        if klein:
            rhs = B(i) * C(1, i) * ~A(i) * ~B(i) * ~A(i)
        else:
            rhs = A(i) * B(i) * C(1, i) * ~A(i) * ~B(i)
        rels.append(_relator(prod, rhs))

    gens = [_a(i) for i in range(1, n + 1)] + [_b(i) for i in range(1, n + 1)]
    gens += [Sym("C", (i, j)) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    label = f"P{n}K" if klein else f"P{n}T"
    rels = [r for r in rels if not r.is_identity()]
    return Presentation(label, gens, rels)


def _full_surface(n: int, klein: bool) -> Presentation:
    if n < 1:
        raise BadParameters(f"need n >= 1, got {n}")
    a, b = Sym("a"), Sym("b")
    A, B = Word.from_syms(a), Word.from_syms(b)
    S = [Word.from_syms(_s(i)) for i in range(1, n)]  # S[i-1] = sigma_i
    rels: List[Word] = []
    for i in range(n - 2):
        rels.append(_relator(S[i] * S[i + 1] * S[i], S[i + 1] * S[i] * S[i + 1]))
    for i in range(n - 1):
        for j in range(i + 2, n - 1):
            rels.append(_relator(S[j] * S[i], S[i] * S[j]))
    for j in range(1, n - 1):
        rels.append(_relator(A * S[j], S[j] * A))
        rels.append(_relator(B * S[j], S[j] * B))
    if n >= 2:
        rels.append(_relator(~B * S[0] * A, S[0] * A * S[0] * ~B * S[0]))
        rels.append(_relator(A * S[0] * A * S[0], S[0] * A * S[0] * A))
        if klein:
            rels.append(_relator(B * ~S[0] * B * S[0], ~S[0] * B * ~S[0] * B))
        else:
            rels.append(_relator(B * ~S[0] * B * ~S[0], ~S[0] * B * ~S[0] * B))
    chain = IDENTITY
    for i in range(n - 2):
        chain = chain * S[i]
    if n >= 2:
        chain = chain * S[n - 2] * S[n - 2]
    for i in reversed(range(n - 2)):
        chain = chain * S[i]
    if klein:
        rels.append(_relator(chain, B * ~A * ~B * ~A))
    else:
        rels.append(_relator(chain, B * A * ~B * ~A))
    gens = [a, b] + [_s(i) for i in range(1, n)]
    label = f"B{n}K" if klein else f"B{n}T"
    rels = [r for r in rels if not r.is_identity()]
    return Presentation(label, gens, rels)


def _nonorientable(n: int, g: int) -> Presentation:
    if g is None or g < 3:
        raise BadParameters(f"genus must be >= 3, got {g}")
    if n < 1:
        raise BadParameters(f"need n >= 1, got {n}")
    A = [Word.from_syms(_a(r)) for r in range(1, g + 1)]  # A[r-1] = a_r
    S = [Word.from_syms(_s(i)) for i in range(1, n)]
    rels: List[Word] = []
    for i in range(n - 2):
        rels.append(_relator(S[i] * S[i + 1] * S[i], S[i + 1] * S[i] * S[i + 1]))
    for i in range(n - 1):
        for j in range(i + 2, n - 1):
            rels.append(_relator(S[j] * S[i], S[i] * S[j]))
    for r in range(g):
        for i in range(1, n - 1):
            rels.append(_relator(A[r] * S[i], S[i] * A[r]))
    if n >= 2:
        for r in range(g):
            rels.append(_relator(~S[0] * A[r] * ~S[0] * A[r],
                                 A[r] * ~S[0] * A[r] * ~S[0]))
        for s in range(g):
            for r in range(s + 1, g):
                rels.append(_relator(~S[0] * A[s] * S[0] * A[r],
                                     A[r] * ~S[0] * A[s] * S[0]))
    lhs = IDENTITY
    for r in range(g):
        lhs = lhs * A[r] * A[r]
    chain = IDENTITY
    for i in range(n - 2):
        chain = chain * S[i]
    if n >= 2:
        chain = chain * S[n - 2] * S[n - 2]
    for i in reversed(range(n - 2)):
        chain = chain * S[i]
    rels.append(_relator(lhs, chain))
    gens = [_s(i) for i in range(1, n)] + [_a(r) for r in range(1, g + 1)]
    rels = [r for r in rels if not r.is_identity()]
    return Presentation(f"B{n}N{g}", gens, rels)


def _p2k_reduced() -> Presentation:
    a1, a2 = Word.from_syms(_a(1)), Word.from_syms(_a(2))
    b1, b2 = Word.from_syms(_b(1)), Word.from_syms(_b(2))
    rels = [
        _relator(~a1 * a2 * a1, a2),
        _relator(~a1 * b2 * a1, ~a2 * b2 * ~a2),
        _relator(~b1 * a2 * b1, a2 * b2 * ~a2 * ~b2 * ~a2),
        _relator(~b1 * b2 * b1, a2 * b2 * a2),
        _relator(~b2 * a2 * b2 * a2, b1 * ~a1 * ~b1 * ~a1),
    ]
    return Presentation("P2K_reduced", [_a(1), _a(2), _b(1), _b(2)], rels)


def _pi1k() -> Presentation:
    a1, b1 = Word.from_syms(_a(1)), Word.from_syms(_b(1))
    return Presentation("Pi1K", [_a(1), _b(1)], [_relator(a1 * b1, b1 * ~a1)])


def _torus_metabelian(n: int) -> Presentation:
    if n < 2:
        raise BadParameters(f"need n >= 2, got {n}")
    sg, a, b = Sym("s"), Sym("a"), Sym("b")
    S, A, B = Word.from_syms(sg), Word.from_syms(a), Word.from_syms(b)
    rels = [
        _relator(A * S, S * A),
        _relator(B * S, S * B),
        S ** (2 * n),
        _relator(B * A * ~B * ~A, ~S * ~S),
    ]
    return Presentation(f"TorusMetabelian{n}", [sg, a, b], rels)


_FAMILIES = {
    "PnT": lambda n, g: _pure_surface(n, klein=False),
    "PnK": lambda n, g: _pure_surface(n, klein=True),
    "BnT": lambda n, g: _full_surface(n, klein=False),
    "BnK": lambda n, g: _full_surface(n, klein=True),
    "BnNg": lambda n, g: _nonorientable(n, g),
    "P2K_reduced": lambda n, g: _p2k_reduced(),
    "Pi1K": lambda n, g: _pi1k(),
    "TorusMetabelian": lambda n, g: _torus_metabelian(n),
}


def catalog(family: str, n: int, g: Optional[int] = None) -> Presentation:
    if family not in _FAMILIES:
        raise BadParameters(f"unknown family {family!r}; choose from {sorted(_FAMILIES)}")
    if family == "P2K_reduced" and n != 2:
        raise BadParameters(f"P2K_reduced is only defined for n=2, got {n}")
    if family == "Pi1K" and n != 1:
        raise BadParameters(f"Pi1K is only defined for n=1, got {n}")
    if family != "BnNg" and g is not None:
        raise BadParameters(f"genus parameter is only meaningful for BnNg")
    return _FAMILIES[family](n, g)


# -- abelianization -----------------------------------------------------

def exponent_matrix(p: Presentation) -> IntMatrix:
    index = {g: k for k, g in enumerate(p.generators)}
    rows = []
    for r in p.relators:
        row = [0] * len(p.generators)
        for sym, exp in r.letters:
            row[index[sym]] += exp
        rows.append(row)
    return IntMatrix(rows, cols=len(p.generators))


def abelianization(p: Presentation) -> AbelianInvariants:
    m = exponent_matrix(p)
    diag, _, _ = smith_normal_form(m)
    nonzero = [d for d in diag if d]
    free_rank = m.cols - len(nonzero)
    torsion = sorted(d for d in nonzero if d > 1)
    return AbelianInvariants(free_rank, torsion)


# -- homomorphism checking ----------------------------------------------

def check_homomorphism(
    src: Presentation,
    images: Mapping[Sym, Word],
    equality_oracle: Callable[[Word], str],
) -> List[Tuple[Word, str]]:
    """Evaluate every relator of src under the candidate images and report
    the oracle's verdict (Trivial / NonTrivial / Indeterminate) on each."""
    report = []
    for r in src.relators:
        image = substitute(r, images)
        verdict = equality_oracle(image)
        if verdict not in (TRIVIAL, NONTRIVIAL, INDETERMINATE):
            raise ValueError(f"oracle returned unknown verdict {verdict!r}")
        report.append((r, verdict))
    return report


def all_trivial(report: Sequence[Tuple[Word, str]]) -> bool:
    return all(v == TRIVIAL for _, v in report)


def free_oracle(w: Word) -> str:
    return TRIVIAL if w.is_identity() else NONTRIVIAL


def pi1k_normal_form(w: Word) -> Tuple[int, int]:
    """Normal form (k, l) with w = b1^k a1^l in <a1,b1 : a1 b1 = b1 a1^-1>."""
    k = l = 0
    for sym, exp in reversed(w.letters):
        if sym == _a(1):
            l += exp
        elif sym == _b(1):
            # move b1^exp to the front of b1^k a1^l: a1 b1 = b1 a1^-1
            k += exp
            l = -l if exp % 2 else l
        else:
            raise UnmappedSymbol(f"no image for symbol {sym}")
    return k, l


def pi1k_oracle(w: Word) -> str:
    return TRIVIAL if pi1k_normal_form(w) == (0, 0) else NONTRIVIAL


class TorusMetabelianElement:
    """Element a^i b^j s^k of <s,a,b : [a,s]=[b,s]=s^(2n)=1, [b,a]=s^-2>,
    with k taken modulo 2n."""

    __slots__ = ("n", "i", "j", "k")

    def __init__(self, n: int, i: int = 0, j: int = 0, k: int = 0):
        self.n = n
        self.i = i
        self.j = j
        self.k = k % (2 * n)

    def __mul__(self, other: "TorusMetabelianElement") -> "TorusMetabelianElement":
        if self.n != other.n:
            raise ValueError("mixed moduli")
        # b^j a^i' = a^i' b^j s^(-2 j i')
        return TorusMetabelianElement(
            self.n, self.i + other.i, self.j + other.j,
            self.k + other.k - 2 * self.j * other.i)

    def inverse(self) -> "TorusMetabelianElement":
        # (a^i b^j s^k)^-1 = a^-i b^-j s^(-k - 2 i j)
        return TorusMetabelianElement(self.n, -self.i, -self.j, -self.k - 2 * self.i * self.j)

    def is_identity(self) -> bool:
        return self.i == 0 and self.j == 0 and self.k == 0

    def __eq__(self, other) -> bool:
        return (isinstance(other, TorusMetabelianElement) and self.n == other.n
                and (self.i, self.j, self.k) == (other.i, other.j, other.k))

    def __hash__(self) -> int:
        return hash((self.n, self.i, self.j, self.k))

    def __repr__(self) -> str:
        return f"TorusMetabelianElement(n={self.n}, a^{self.i} b^{self.j} s^{self.k})"


def torus_metabelian_evaluate(w: Word, n: int,
                              images: Optional[Mapping[Sym, TorusMetabelianElement]] = None
                              ) -> TorusMetabelianElement:
    if images is None:
        images = {
            Sym("a"): TorusMetabelianElement(n, i=1),
            Sym("b"): TorusMetabelianElement(n, j=1),
            Sym("s"): TorusMetabelianElement(n, k=1),
        }
    out = TorusMetabelianElement(n)
    for sym, exp in w.letters:
        if sym not in images:
            raise UnmappedSymbol(f"no image for symbol {sym}")
        g = images[sym]
        out = out * (g if exp == 1 else g.inverse())
    return out


def torus_metabelian_oracle(n: int,
                            images: Optional[Mapping[Sym, TorusMetabelianElement]] = None
                            ) -> Callable[[Word], str]:
    def oracle(w: Word) -> str:
        return TRIVIAL if torus_metabelian_evaluate(w, n, images).is_identity() else NONTRIVIAL
    return oracle


# -- derived subgroup of the torus braid group ---------------------------

_DERIVED_ARITY = {"b": 2, "d": 2, "a": 2, "th": 3, "rh": 3}


def expand_derived_generator(sym: Sym, n: int) -> Word:
    """Expand one of the coset generators b/d/a/th/rh of the commutator
    subgroup of the n-strand torus braid group into a word over a, b, s[i]."""
    if sym.name not in _DERIVED_ARITY:
        raise BadParameters(f"unknown derived generator {sym}")
    if len(sym.indices) != _DERIVED_ARITY[sym.name]:
        raise BadParameters(f"{sym.name} needs {_DERIVED_ARITY[sym.name]} indices, got {sym}")
    A, B = Word.from_syms(Sym("a")), Word.from_syms(Sym("b"))
    if sym.name in ("th", "rh"):
        i, k, m = sym.indices
        if not 1 <= i <= n - 1:
            raise BadParameters(f"strand index {i} out of range for n={n}")
    else:
        k, m = sym.indices
        i = None
    prefix = B ** k * A ** m
    if sym.name == "b":
        core, suffix = B, ~B * ~(B ** k)
    elif sym.name == "d":
        S1 = Word.from_syms(_s(1))
        core, suffix = S1 * B * ~S1, ~B * ~(B ** k)
    elif sym.name == "a":
        S1 = Word.from_syms(_s(1))
        core, suffix = S1 * A * ~S1 * ~A, ~(B ** k)
    elif sym.name == "th":
        Si, S1 = Word.from_syms(_s(i)), Word.from_syms(_s(1))
        core, suffix = Si * ~S1, ~(B ** k)
    else:  # rh
        Si, S1 = Word.from_syms(_s(i)), Word.from_syms(_s(1))
        core, suffix = S1 * Si, ~(B ** k)
    return free_reduce(prefix * core * ~(A ** m) * suffix)


def derived_relation_instances(n: int, k_range: Sequence[int],
                               m_range: Sequence[int]) -> List[Word]:
    """Instantiate the identities satisfied by the coset generators of the
    commutator subgroup of the n-strand torus braid group, expanded to words
    over a, b, s[i]."""
    if n < 3:
        raise BadParameters(f"need n >= 3, got {n}")

    def th(i, k, m):
        return expand_derived_generator(Sym("th", (i, k, m)), n)

    def rh(i, k, m):
        return expand_derived_generator(Sym("rh", (i, k, m)), n)

    def bb(k, m):
        return expand_derived_generator(Sym("b", (k, m)), n)

    def dd(k, m):
        return expand_derived_generator(Sym("d", (k, m)), n)

    def aa(k, m):
        return expand_derived_generator(Sym("a", (k, m)), n)

    out: List[Word] = []
    for k in k_range:
        for m in m_range:
            # (1) braid-type relations between adjacent th/rh pairs
            for i in range(1, n - 1):
                out.append(_relator(th(i, k, m) * rh(i + 1, k, m) * th(i, k, m),
                                    th(i + 1, k, m) * rh(i, k, m) * th(i + 1, k, m)))
                out.append(_relator(rh(i, k, m) * th(i + 1, k, m) * rh(i, k, m),
                                    rh(i + 1, k, m) * th(i, k, m) * rh(i + 1, k, m)))
            # (2) distant pairs interchange
            for i in range(1, n - 1):
                for j in range(i + 2, n):
                    out.append(_relator(th(i, k, m) * rh(j, k, m),
                                        th(j, k, m) * rh(i, k, m)))
                    out.append(_relator(rh(i, k, m) * th(j, k, m),
                                        rh(j, k, m) * th(i, k, m)))
            # (3) a in terms of th/rh shifts in m
            for j in range(2, n):
                out.append(_relator(aa(k, m), ~th(j, k, m) * th(j, k, m + 1)))
                out.append(_relator(aa(k, m), rh(j, k, m) * ~rh(j, k, m + 1)))
            # (4) b/d intertwine th/rh shifts in k
            for j in range(2, n):
                out.append(_relator(bb(k, m) * th(j, k + 1, m),
                                    th(j, k, m) * dd(k, m)))
                out.append(_relator(dd(k, m) * rh(j, k + 1, m),
                                    rh(j, k, m) * bb(k, m)))
            # (5)
            out.append(free_reduce(~bb(k - 1, m) * aa(k - 1, m) * bb(k - 1, m + 1)
                                   * ~rh(1, k, m + 1) * ~aa(k, m)))
            out.append(free_reduce(~dd(k - 1, m) * rh(1, k - 1, m) * ~rh(1, k - 1, m + 1)
                                   * dd(k - 1, m + 1) * ~rh(1, k, m)))
            # (6)
            out.append(_relator(aa(k, m + 1) * rh(1, k, m + 2),
                                aa(k, m) * rh(1, k, m + 1)))
            out.append(_relator(rh(1, k, m) * aa(k, m + 1),
                                aa(k, m) * rh(1, k, m + 1)))
            # (7)
            out.append(_relator(bb(k, m) * ~rh(1, k + 1, m) * dd(k + 1, m),
                                ~rh(1, k, m) * dd(k, m) * bb(k + 1, m)))
            out.append(_relator(bb(k, m) * ~rh(1, k + 1, m) * dd(k + 1, m),
                                dd(k, m) * bb(k + 1, m) * ~rh(1, k + 2, m)))
            # (8)/(9) the full-twist chain, alternating th (odd strand) and
            # rh (even strand) on the way up and the opposite on the way down
            asc1 = asc2 = desc1 = desc2 = IDENTITY
            for i in range(1, n):
                if i % 2:
                    asc1, asc2 = asc1 * th(i, k, m), asc2 * rh(i, k, m)
                else:
                    asc1, asc2 = asc1 * rh(i, k, m), asc2 * th(i, k, m)
            for i in range(n - 1, 0, -1):
                if i % 2:
                    desc1, desc2 = desc1 * rh(i, k, m), desc2 * th(i, k, m)
                else:
                    desc1, desc2 = desc1 * th(i, k, m), desc2 * rh(i, k, m)
            out.append(_relator(asc1 * desc1, bb(k, m) * ~bb(k, m + 1)))
            out.append(_relator(asc2 * desc2,
                                dd(k, m) * aa(k + 1, m) * ~dd(k, m + 1) * ~aa(k, m)))
    return out
