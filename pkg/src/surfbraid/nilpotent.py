"""Exact arithmetic in free nilpotent groups of bounded class, and
class-bounded nilpotent quotients of finitely presented groups.

Group elements are embedded in the ring of truncated power series over the
integers (each generator maps to 1 + X_i); for free groups this embedding
separates the lower central series exactly, so weight and coordinate
computations are exact.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .presentations import (
    AbelianInvariants,
    BadParameters,
    IntMatrix,
    Presentation,
    smith_normal_form,
)
from .words import Sym, Word

Monomial = Tuple[int, ...]
Series = Dict[Monomial, int]  # truncated: keys of length <= class bound


class ClassUnsupported(ValueError):
    pass


class _AboveBound:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "AboveBound"


ABOVE_BOUND = _AboveBound()


# -- truncated series ----------------------------------------------------

def series_one() -> Series:
    return {(): 1}


def series_mul(s1: Series, s2: Series, c: int) -> Series:
    out: Series = {}
    for m1, c1 in s1.items():
        for m2, c2 in s2.items():
            if len(m1) + len(m2) > c:
                continue
            key = m1 + m2
            v = out.get(key, 0) + c1 * c2
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return out


def generator_series(i: int, exp: int, c: int) -> Series:
    """Series of x_i (exp=1) or x_i^-1 (exp=-1), truncated at degree c."""
    if exp == 1:
        return {(): 1, (i,): 1}
    # (1 + X)^-1 = 1 - X + X^2 - ...
    return {(i,) * k: (-1) ** k for k in range(c + 1)}


def word_series(letters: Sequence[Tuple[int, int]], c: int) -> Series:
    out = series_one()
    for i, exp in letters:
        out = series_mul(out, generator_series(i, exp, c), c)
    return out


def series_inverse(s: Series, c: int) -> Series:
    """Inverse of a group-like series (constant term 1)."""
    if s.get((), 0) != 1:
        raise ValueError("can only invert series with constant term 1")
    # 1/(1+U) = 1 - U + U^2 - ... with U = s - 1 (no constant term)
    u = {m: v for m, v in s.items() if m}
    out = series_one()
    power = series_one()
    sign = 1
    for _ in range(c):
        power = series_mul(power, u, c)
        if not power:
            break
        sign = -sign
        for m, v in power.items():
            w = out.get(m, 0) + sign * v
            if w:
                out[m] = w
            elif m in out:
                del out[m]
    return out


def series_leading_weight(s: Series, c: int):
    """Smallest positive degree with a nonzero coefficient, or ABOVE_BOUND."""
    best = None
    for m, v in s.items():
        if m and v:
            if best is None or len(m) < best:
                best = len(m)
    return ABOVE_BOUND if best is None else best


def series_component(s: Series, k: int) -> Dict[Monomial, int]:
    return {m: v for m, v in s.items() if len(m) == k and v}


# -- Hall basis of basic commutators -------------------------------------

class HallElement:
    """A basic commutator: either a generator index or a bracket [u, v]
    of earlier basis elements."""

    __slots__ = ("index", "weight", "left", "right")

    def __init__(self, index: int, weight: int,
                 left: Optional[int] = None, right: Optional[int] = None):
        self.index = index      # position in the global basis order
        self.weight = weight
        self.left = left        # basis positions, None for generators
        self.right = right


@lru_cache(maxsize=None)
def hall_basis(rank: int, c: int) -> Tuple[HallElement, ...]:
    """Basic commutators of weight <= c, ordered by weight then creation.

    [u, v] is basic iff u > v (by position) and, when u = [x, y], y <= v.
    """
    if rank < 1 or c < 1:
        raise BadParameters(f"need rank >= 1 and c >= 1, got {rank}, {c}")
    basis: List[HallElement] = [HallElement(i, 1) for i in range(rank)]
    start_of_weight = {1: 0}
    for w in range(2, c + 1):
        start_of_weight[w] = len(basis)
        new: List[HallElement] = []
        for wu in range(1, w):
            wv = w - wu
            for u in range(len(basis)):
                if basis[u].weight != wu:
                    continue
                for v in range(len(basis)):
                    if basis[v].weight != wv:
                        continue
                    if u <= v:
                        continue
                    if basis[u].left is not None and basis[u].right > v:
                        continue
                    new.append((u, v))
        new.sort()
        for u, v in new:
            basis.append(HallElement(len(basis), w, u, v))
    return tuple(basis)


def witt_rank(rank: int, k: int) -> int:
    """Number of basic commutators of weight k on `rank` generators."""
    total = 0
    d = 1
    while d * d <= k:
        if k % d == 0:
            total += _moebius(d) * rank ** (k // d)
            if d != k // d:
                total += _moebius(k // d) * rank ** d
        d += 1
    return total // k


def _moebius(n: int) -> int:
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def _hall_lie_vectors(rank: int, c: int, k: int) -> Tuple[Tuple[Monomial, ...], Tuple[Tuple[int, ...], ...]]:
    """Degree-k Lie polynomials of the weight-k basic commutators, as rows
    over the degree-k monomials (ordered lexicographically)."""
    basis = hall_basis(rank, c)
    lie: List[Dict[Monomial, int]] = []
    for el in basis:
        if el.left is None:
            lie.append({(el.index,): 1})
        else:
            # realized as [smaller, larger]: bracket of right then left part
            a, b = lie[el.right], lie[el.left]
            out: Dict[Monomial, int] = {}
            for m1, c1 in a.items():
                for m2, c2 in b.items():
                    for key, coef in ((m1 + m2, c1 * c2), (m2 + m1, -c1 * c2)):
                        v = out.get(key, 0) + coef
                        if v:
                            out[key] = v
                        elif key in out:
                            del out[key]
            lie.append(out)
    monomials = sorted({m for el, poly in zip(basis, lie) if el.weight == k for m in poly})
    rows = []
    for el, poly in zip(basis, lie):
        if el.weight == k:
            rows.append(tuple(poly.get(m, 0) for m in monomials))
    return tuple(monomials), tuple(rows)


@lru_cache(maxsize=None)
def _hall_solver(rank: int, c: int, k: int):
    monomials, rows = _hall_lie_vectors(rank, c, k)
    m = IntMatrix([list(r) for r in rows], cols=len(monomials))
    diag, left, right = smith_normal_form(m)
    return monomials, m, diag, left, right


def _solve_weight(rank: int, c: int, k: int, component: Dict[Monomial, int]) -> List[int]:
    """Exponents x over the weight-k basic commutators with x . M = v, where
    M is the Hall-to-monomial matrix and v the given degree-k component."""
    monomials, m, diag, left, right = _hall_solver(rank, c, k)
    stray = set(component) - set(monomials)
    if stray:
        raise ValueError(f"component not in the Lie span (stray monomials {stray})")
    v = [component.get(mon, 0) for mon in monomials]
    # x . M = v  <=>  (x . left^-1) . (left M right) = v . right
    vr = [sum(v[i] * right.entries[i][j] for i in range(len(v))) for j in range(right.cols)]
    nrows = m.rows
    y = []
    for i in range(nrows):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if i < len(vr) and vr[i]:
                raise ValueError("component not in the Lie span")
            y.append(0)
        else:
            if vr[i] % d:
                raise ValueError("component not an integral Lie combination")
            y.append(vr[i] // d)
    for j in range(nrows, len(vr)):
        if vr[j]:
            raise ValueError("component not in the Lie span")
    x = [sum(y[i] * left.entries[i][j] for i in range(nrows)) for j in range(nrows)]
    return x


def hall_word(rank: int, c: int, position: int, gens: Sequence[Sym]) -> Word:
    """The group word realizing basis element `position` over the symbols."""
    basis = hall_basis(rank, c)
    el = basis[position]
    if el.left is None:
        return Word.from_syms(gens[el.index])
    first = hall_word(rank, c, el.right, gens)
    second = hall_word(rank, c, el.left, gens)
    return first * second * ~first * ~second


# -- NilElement ----------------------------------------------------------

class NilElement:
    """Coordinates of an element of the free nilpotent group of the given
    rank and class, over the basic-commutator basis."""

    __slots__ = ("rank", "class_bound", "coordinates")

    def __init__(self, rank: int, class_bound: int, coordinates: Mapping[int, int]):
        self.rank = rank
        self.class_bound = class_bound
        self.coordinates = {k: v for k, v in coordinates.items() if v}

    def is_identity(self) -> bool:
        return not self.coordinates

    def __eq__(self, other) -> bool:
        return (isinstance(other, NilElement) and self.rank == other.rank
                and self.class_bound == other.class_bound
                and self.coordinates == other.coordinates)

    def __hash__(self) -> int:
        return hash((self.rank, self.class_bound, tuple(sorted(self.coordinates.items()))))

    def __repr__(self) -> str:
        return (f"NilElement(rank={self.rank}, class_bound={self.class_bound}, "
                f"coordinates={self.coordinates})")


def _letters_to_indices(w: Word, gens: Sequence[Sym]) -> List[Tuple[int, int]]:
    index = {g: i for i, g in enumerate(gens)}
    out = []
    for sym, exp in w.letters:
        if sym not in index:
            raise BadParameters(f"symbol {sym} is not among the declared generators")
        out.append((index[sym], exp))
    return out


def _deflate(series: Series, rank: int, c: int) -> Dict[int, int]:
    """Peel the series weight by weight into basic-commutator exponents."""
    basis = hall_basis(rank, c)
    by_weight: Dict[int, List[int]] = {}
    for el in basis:
        by_weight.setdefault(el.weight, []).append(el.index)
    coords: Dict[int, int] = {}
    residual = series
    for k in range(1, c + 1):
        comp = series_component(residual, k)
        if not comp:
            continue
        x = _solve_weight(rank, c, k, comp)
        positions = by_weight[k]
        correction = series_one()
        for pos, e in zip(positions, x):
            if not e:
                continue
            coords[pos] = e
            el_series = _basis_series(rank, c, pos)
            factor = el_series if e > 0 else series_inverse(el_series, c)
            for _ in range(abs(e)):
                correction = series_mul(correction, factor, c)
        residual = series_mul(residual, series_inverse(correction, c), c)
        # division must clear the whole weight-k component
        if series_component(residual, k):
            raise AssertionError("weight component did not deflate")
    return coords


@lru_cache(maxsize=None)
def _basis_series(rank: int, c: int, position: int) -> Series:
    basis = hall_basis(rank, c)
    el = basis[position]
    if el.left is None:
        return generator_series(el.index, 1, c)
    a = _basis_series(rank, c, el.right)
    b = _basis_series(rank, c, el.left)
    out = series_mul(series_mul(a, b, c),
                     series_mul(series_inverse(a, c), series_inverse(b, c), c), c)
    return out


def nil_reduce(w: Word, rank: int, c: int, gens: Optional[Sequence[Sym]] = None) -> NilElement:
    """Canonical coordinates of w in the free nilpotent group of class c."""
    if c < 1:
        raise BadParameters(f"class bound must be >= 1, got {c}")
    if gens is None:
        gens = sorted(w.syms())
    if len(gens) > rank:
        raise BadParameters(f"{len(gens)} symbols exceed rank {rank}")
    series = word_series(_letters_to_indices(w, list(gens)), c)
    return NilElement(rank, c, _deflate(series, rank, c))


def lcs_weight(w: Word, rank: int, cmax: int, gens: Optional[Sequence[Sym]] = None):
    """Largest k <= cmax with w in the k-th lower central term of the free
    group, or ABOVE_BOUND when all coordinates vanish up to cmax."""
    if cmax < 1:
        raise BadParameters(f"cmax must be >= 1, got {cmax}")
    if gens is None:
        gens = sorted(w.syms())
    if len(gens) > rank:
        raise BadParameters(f"{len(gens)} symbols exceed rank {rank}")
    series = word_series(_letters_to_indices(w, list(gens)), cmax)
    return series_leading_weight(series, cmax)


# -- nilpotent quotients --------------------------------------------------

class NilQuotientReport:
    __slots__ = ("class_bound", "layers")

    def __init__(self, class_bound: int, layers: Sequence[AbelianInvariants]):
        if len(layers) != class_bound:
            raise ValueError("layer count must equal the class bound")
        self.class_bound = class_bound
        self.layers = tuple(layers)

    def to_json(self) -> dict:
        return {
            "class": self.class_bound,
            "layers": [
                {"free_rank": layer.free_rank, "torsion": list(layer.torsion)}
                for layer in self.layers
            ],
        }

    def __eq__(self, other) -> bool:
        return (isinstance(other, NilQuotientReport)
                and self.class_bound == other.class_bound
                and self.layers == other.layers)

    def __repr__(self) -> str:
        return f"NilQuotientReport(class={self.class_bound}, layers={list(self.layers)})"


class _GradedSifter:
    """Echelonized lattices, one per weight, spanned by the graded images of
    a normal subgroup of the free nilpotent group. Row reduction over the
    integers is mirrored on the series representatives."""

    def __init__(self, rank: int, c: int):
        self.rank = rank
        self.c = c
        # pivots[k]: list of (vector, series), echelonized by leading column
        self.pivots: Dict[int, List[Tuple[List[int], Series]]] = {k: [] for k in range(1, c + 1)}

    def _vector(self, series: Series, k: int) -> List[int]:
        comp = series_component(series, k)
        x = _solve_weight(self.rank, self.c, k, comp)
        return x

    def sift(self, series: Series) -> List[Tuple[int, Series]]:
        """Insert a subgroup element; returns (weight, series) for every
        pivot that was newly created or whose lattice row changed."""
        changed: List[Tuple[int, Series]] = []
        s = series
        while True:
            k = series_leading_weight(s, self.c)
            if k is ABOVE_BOUND:
                return changed
            v = self._vector(s, k)
            row = self.pivots[k]
            inserted = False
            while any(v):
                j = next(i for i, x in enumerate(v) if x)
                hit = None
                for idx, (pv, _) in enumerate(row):
                    if next(i for i, x in enumerate(pv) if x) == j:
                        hit = idx
                        break
                if hit is None:
                    if v[j] < 0:
                        s = series_inverse(s, self.c)
                        v = [-x for x in v]
                    row.append((v, s))
                    row.sort(key=lambda t: next(i for i, x in enumerate(t[0]) if x))
                    changed.append((k, s))
                    inserted = True
                    break
                pv, ps = row[hit]
                a, b = pv[j], v[j]  # a > 0 by the insertion convention
                if b % a == 0:
                    q = b // a
                    v = [y - q * x for x, y in zip(pv, v)]
                    s = series_mul(_series_pow(ps, -q, self.c), s, self.c)
                    continue
                g, sa, sb = _xgcd(a, b)
                # unimodular basis change of the pair (pivot, element):
                #   new pivot = p^sa * s^sb   (leading entry gcd > 0)
                #   residual  = p^(-b/g) * s^(a/g)   (leading entry 0)
                new_vec = [sa * x + sb * y for x, y in zip(pv, v)]
                res_vec = [(-b // g) * x + (a // g) * y for x, y in zip(pv, v)]
                new_ser = series_mul(_series_pow(ps, sa, self.c),
                                     _series_pow(s, sb, self.c), self.c)
                res_ser = series_mul(_series_pow(ps, -b // g, self.c),
                                     _series_pow(s, a // g, self.c), self.c)
                changed.append((k, new_ser))
                row[hit] = (new_vec, new_ser)
                v, s = res_vec, res_ser
            if inserted:
                return changed
            # fully reduced at weight k; the residual lives strictly deeper

    def lattice(self, k: int) -> List[List[int]]:
        return [pv for pv, _ in self.pivots[k]]


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, s, t) with g = gcd(a, b) > 0 and s*a + t*b = g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _series_pow(s: Series, n: int, c: int) -> Series:
    if n == 0:
        return series_one()
    base = s if n > 0 else series_inverse(s, c)
    out = series_one()
    k = abs(n)
    while k:
        if k & 1:
            out = series_mul(out, base, c)
        k >>= 1
        if k:
            base = series_mul(base, base, c)
    return out


def nilpotent_quotient(p: Presentation, c: int) -> NilQuotientReport:
    """Invariants of the graded layers of G modulo its (c+1)-st lower
    central term, for G given by the presentation."""
    if not 1 <= c <= 4:
        raise ClassUnsupported(f"class bound {c} unsupported (use 1..4)")
    gens = list(p.generators)
    rank = len(gens)
    gen_series = [word_series([(i, 1)], c) for i in range(rank)]
    gen_inv = [series_inverse(g, c) for g in gen_series]
    sifter = _GradedSifter(rank, c)

    queue: List[Series] = []
    for r in p.relators:
        queue.append(word_series(_letters_to_indices(r, gens), c))
    while queue:
        s = queue.pop()
        newly = sifter.sift(s)
        for k, ser in newly:
            # close under conjugation by the ambient generators
            for g, gi in zip(gen_series, gen_inv):
                conj = series_mul(series_mul(g, ser, c), gi, c)
                # enqueue the commutator [g, ser]-flavoured element g ser g^-1
                queue.append(conj)
            # close under products with the other basis elements
            for kk in range(1, c + 1):
                for _, other in sifter.pivots[kk]:
                    if other is ser:
                        continue
                    queue.append(series_mul(ser, other, c))

    layers = []
    for k in range(1, c + 1):
        wk = witt_rank(rank, k)
        rows = sifter.lattice(k)
        if not rows:
            layers.append(AbelianInvariants(wk, []))
            continue
        diag, _, _ = smith_normal_form(IntMatrix(rows, cols=wk))
        nonzero = [d for d in diag if d]
        layers.append(AbelianInvariants(wk - len(nonzero),
                                        sorted(d for d in nonzero if d > 1)))
    return NilQuotientReport(c, layers)


class NilpotentImage:
    """Normal closure of a set of words, seen inside the free nilpotent
    group of class c on the given generators, with a membership test at
    that resolution."""

    def __init__(self, gens: Sequence[Sym], c: int):
        if not 1 <= c <= 4:
            raise ClassUnsupported(f"class bound {c} unsupported (use 1..4)")
        self.gens = list(gens)
        self.c = c
        rank = len(self.gens)
        self._gen_series = [word_series([(i, 1)], c) for i in range(rank)]
        self._gen_inv = [series_inverse(g, c) for g in self._gen_series]
        self._sifter = _GradedSifter(rank, c)

    def _word_series(self, w: Word) -> Series:
        return word_series(_letters_to_indices(w, self.gens), self.c)

    def add_words(self, words: Sequence[Word]) -> None:
        c = self.c
        queue = [self._word_series(w) for w in words]
        while queue:
            s = queue.pop()
            newly = self._sifter.sift(s)
            for _, ser in newly:
                for g, gi in zip(self._gen_series, self._gen_inv):
                    queue.append(series_mul(series_mul(g, ser, c), gi, c))
                for kk in range(1, c + 1):
                    for _, other in self._sifter.pivots[kk]:
                        if other is ser:
                            continue
                        queue.append(series_mul(ser, other, c))

    def contains_word(self, w: Word) -> bool:
        return self._contains_series(self._word_series(w))

    def _contains_series(self, s: Series) -> bool:
        c = self.c
        while True:
            k = series_leading_weight(s, c)
            if k is ABOVE_BOUND:
                return True
            v = self._sifter._vector(s, k)
            row = self._sifter.pivots[k]
            while any(v):
                j = next(i for i, x in enumerate(v) if x)
                hit = None
                for pv, ps in row:
                    if next(i for i, x in enumerate(pv) if x) == j:
                        hit = (pv, ps)
                        break
                if hit is None:
                    return False
                pv, ps = hit
                if v[j] % pv[j] != 0:
                    return False
                q = v[j] // pv[j]
                v = [y - q * x for x, y in zip(pv, v)]
                s = series_mul(_series_pow(ps, -q, c), s, c)
