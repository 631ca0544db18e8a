"""Filtration subgroups of semidirect products of surface braid groups:
generator recursions for the induced series on the fiber, candidate
closed-form families, and comparison of normal-closure descriptions at
finite or nilpotent resolution."""

from __future__ import annotations

import itertools
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .finite import FiniteModel, SubgroupDescription, subgroup_image, two_quotient_tower
from .klein import ActionTable, fiber_basis, _top_d_expansion
from .nilpotent import NilpotentImage, hall_basis, hall_word
from .presentations import BadParameters, Presentation, catalog
from .words import Sym, Word, commutator, free_reduce, left_normed

EQUAL = "EqualInOracle"
A_IN_B = "AStrictlyInB"
B_IN_A = "BStrictlyInA"
INCOMPARABLE = "Incomparable"

LOWER_CENTRAL = "LowerCentral"
DERIVED = "Derived"
GAMMA_P = "GammaP"


class DepthUnsupported(ValueError):
    pass


class OracleMismatch(ValueError):
    pass


class FiltrationFamily:
    """One of the series a residual-separation question can be asked about:
    the lower central series, the derived series, or the mod-p lower central
    series gamma^p (only p = 2 is implemented)."""

    __slots__ = ("kind", "p")

    def __init__(self, kind: str, p: Optional[int] = None):
        if kind not in (LOWER_CENTRAL, DERIVED, GAMMA_P):
            raise BadParameters(f"unknown filtration kind {kind!r}")
        if kind == GAMMA_P:
            if p != 2:
                raise BadParameters(f"gamma^p is only implemented for p = 2, got {p}")
        elif p is not None:
            raise BadParameters(f"{kind} takes no prime parameter")
        self.kind = kind
        self.p = p

    def __repr__(self) -> str:
        if self.kind == GAMMA_P:
            return f"FiltrationFamily({self.kind}, p={self.p})"
        return f"FiltrationFamily({self.kind})"


# -- the generator recursion for Gamma_n(H x| G) = L_n x| Gamma_n(G) ------

def _apply_base_word(action: ActionTable, base_word: Word, w: Word) -> Word:
    """Conjugation s(u)^-1 w s(u) for a base word u, letter by letter."""
    out = w
    for sym, exp in base_word.letters:
        out = action.apply_phi(sym, out) if exp == 1 else action.apply_psi(sym, out)
    return out


def _fiber_words(action: ActionTable) -> List[Word]:
    row = next(iter(action.phi.values()))
    return [Word.from_syms(y) for y in row]


def _dedupe(words: Sequence[Word]) -> List[Word]:
    out: List[Word] = []
    seen = set()
    for w in words:
        w = free_reduce(w)
        if not w.letters or w in seen:
            continue
        seen.add(w)
        out.append(w)
    return out


def serie_generators(action: ActionTable,
                     base_lcs: Callable[[int], Sequence[Word]],
                     n: int,
                     ambient: Optional[Presentation] = None
                     ) -> Tuple[SubgroupDescription, SubgroupDescription,
                                SubgroupDescription]:
    """Generating sets (K_n, L_n, V_n) of the subgroups the n-th lower
    central term of a semidirect product H x| G induces on the free fiber H:

        K_n = << phi(g)(h) h^-1 : g generating Gamma_{n-1}(G), h in H >>
        L_1 = H,  L_n = << K_n, H_n, [H, L_{n-1}] >> with
        H_n = << phi(g)(w) w^-1 : g a generator of G, w a generator of L_{n-1} >>

    and V_n the variant of L_n that drops the K-part (H_n computed over
    V_{n-1} instead), so Gamma_n(H x| G) = L_n x| Gamma_n(G).

    `base_lcs(i)` must yield base words generating Gamma_i(G); the words are
    read through the action table, one base letter at a time."""
    if n < 1:
        raise BadParameters(f"need n >= 1, got {n}")
    fiber = _fiber_words(action)
    if ambient is None:
        ambient = Presentation("fiber", [w.letters[0][0] for w in fiber], [])
    base_gens = list(base_lcs(1))

    L: List[List[Word]] = [fiber]
    V: List[List[Word]] = [fiber]
    K_n: List[Word] = []
    for m in range(2, n + 1):
        K_m = [_apply_base_word(action, g, h) * ~h
               for g in base_lcs(m - 1) for h in fiber]
        H_m = [_apply_base_word(action, g, w) * ~w
               for g in base_gens for w in L[-1]]
        comm = [commutator(h, w) for h in fiber for w in L[-1]]
        L.append(_dedupe(K_m + H_m + comm))
        Ht_m = [_apply_base_word(action, g, w) * ~w
                for g in base_gens for w in V[-1]]
        commv = [commutator(h, w) for h in fiber for w in V[-1]]
        V.append(_dedupe(Ht_m + commv))
        if m == n:
            K_n = _dedupe(K_m)

    if n == 1:
        K_n = _dedupe(fiber)
    return (SubgroupDescription(ambient, K_n, label=f"K_{n}"),
            SubgroupDescription(ambient, L[-1], label=f"L_{n}"),
            SubgroupDescription(ambient, V[-1], label=f"V_{n}"))


def pi1k_base_lcs(i: int) -> List[Word]:
    """Base words generating Gamma_i of the one-strand group used as the
    base of the two-strand splitting: generated by a_1, b_1 with
    b_1^-1 a_1 b_1 = a_1^-1, so Gamma_i = < a_1^(2^(i-1)) > for i >= 2."""
    if i < 1:
        raise BadParameters(f"need i >= 1, got {i}")
    a1 = Word.from_syms(Sym("a", (1,)))
    if i == 1:
        return [a1, Word.from_syms(Sym("b", (1,)))]
    return [a1 ** (2 ** (i - 1))]


# -- closed-form candidate families ---------------------------------------

def _p2k_fiber() -> Tuple[Word, Word]:
    return (Word.from_syms(Sym("a", (2,))), Word.from_syms(Sym("b", (2,))))


def wn_tilde(n: int, fiber_rank: int = 2) -> SubgroupDescription:
    """The candidate closed form for the fiber part of Gamma_n of the
    two-strand group: a_2^(2^(n-1)) together with every basic commutator
    of weight i in the rank-two fiber raised to the 2^(n-i)-th power,
    2 <= i <= n."""
    if fiber_rank != 2:
        raise BadParameters(f"only the rank-two fiber is supported, got {fiber_rank}")
    if n < 1:
        raise BadParameters(f"need n >= 1, got {n}")
    a2, b2 = _p2k_fiber()
    gens = [a2 ** (2 ** (n - 1))]
    if n >= 2:
        basis = hall_basis(2, n)
        for pos, elem in enumerate(basis):
            if 2 <= elem.weight <= n:
                w = hall_word(2, n, pos, [a2.letters[0][0], b2.letters[0][0]])
                gens.append(w ** (2 ** (n - elem.weight)))
    ambient = Presentation("fiberP2K", [a2.letters[0][0], b2.letters[0][0]], [])
    return SubgroupDescription(ambient, _dedupe(gens), label=f"Wtilde_{n}")


def gamma_p2k_claimed(n: int) -> SubgroupDescription:
    """The claimed closed form of Gamma_n of the two-strand group as a
    split description: fiber part Wtilde_n, base part (a_1 a_2)^(2^(n-1))."""
    if n < 2:
        raise BadParameters(f"need n >= 2, got {n}")
    p = catalog("P2K_reduced", 2)
    a1 = Word.from_syms(Sym("a", (1,)))
    a2, _ = _p2k_fiber()
    fiber = list(wn_tilde(n).normal_generators)
    base = [(a1 * a2) ** (2 ** (n - 1))]
    return SubgroupDescription(p, fiber + base, label=f"Gamma_{n}(P2K)",
                               split=(fiber, base))


def gamma2_p2k_claimed(n: int) -> SubgroupDescription:
    """The claimed closed form of the n-th term of the mod-two lower
    central series of the two-strand group."""
    if n < 2:
        raise BadParameters(f"need n >= 2, got {n}")
    p = catalog("P2K_reduced", 2)
    a1 = Word.from_syms(Sym("a", (1,)))
    b1 = Word.from_syms(Sym("b", (1,)))
    a2, b2 = _p2k_fiber()
    e = 2 ** (n - 1)
    fiber = list(wn_tilde(n).normal_generators) + [b2 ** e]
    base = [(a1 * a2) ** e, (b2 * b1) ** e]
    return SubgroupDescription(p, fiber + base, label=f"gamma2_{n}(P2K)",
                               split=(fiber, base))


def elm_generators(l: int, m: int,
                   gens: Sequence[Word],
                   a_words: Optional[Sequence[Word]] = None,
                   ambient: Optional[Presentation] = None
                   ) -> SubgroupDescription:
    """The two-parameter family E_{l,m}: left-normed brackets
    [x_1, ..., x_i]^(2^(m-i-k)) with l <= i <= m, where k of the entries
    come from `a_words` (k = 0 when none are supplied) and the rest from
    `gens`, 0 <= k <= m - i."""
    if not 1 <= l <= m:
        raise BadParameters(f"need 1 <= l <= m, got l={l}, m={m}")
    plain = [(w, 0) for w in gens]
    special = [(w, 1) for w in (a_words or [])]
    out: List[Word] = []
    for i in range(l, m + 1):
        for combo in itertools.product(plain + special, repeat=i):
            k = sum(tag for _, tag in combo)
            if k > m - i:
                continue
            entries = [w for w, _ in combo]
            w = entries[0] if i == 1 else left_normed(entries)
            out.append(free_reduce(w) ** (2 ** (m - i - k)))
    if ambient is None:
        syms: List[Sym] = []
        for w in list(gens) + list(a_words or []):
            for s, _ in w.letters:
                if s not in syms:
                    syms.append(s)
        ambient = Presentation("fiber", syms, [])
    tag = f"E[{l},{m}]" if a_words else f"Etilde[{l},{m}]"
    return SubgroupDescription(ambient, _dedupe(out), label=tag)


def klein_series_families(n: int, m: int
                          ) -> Tuple[SubgroupDescription, SubgroupDescription,
                                     SubgroupDescription, SubgroupDescription]:
    """The four nested families inside the free fiber H of the (n+1)-strand
    splitting, at stage m:

      A_pow   the normal closure of the 2^(m-2)-th powers of the A-letters
      Y_m     Y_1 = H, Y_m = << those powers, [Y_i, Y_k] for i + k = m >>
      Z_m     Z_1 = H, Z_2 = Y_2, Z_m = << squares of Z_{m-1}, X_m >> where
              X_m collects brackets with exactly m - i entries among the
              A-letters
      Zt_m    the power-decorated variant: A-powers together with brackets
              [x_1..x_i]^(2^(m-i-k)) having k A-entries, 0 <= k <= m - i."""
    if n < 1:
        raise BadParameters(f"need n >= 1, got {n}")
    if m < 2:
        raise BadParameters(f"need m >= 2, got {m}")
    level = n + 1
    basis = fiber_basis(level)
    ambient = Presentation(f"fiberP{level}K", basis, [])
    h_words = [Word.from_syms(s) for s in basis]
    a_words = [Word.from_syms(Sym("D", (j, level))) for j in range(1, n)]
    a_words.append(free_reduce(_top_d_expansion(level)))

    a_pow = [w ** (2 ** (m - 2)) for w in a_words]

    y_stages: List[List[Word]] = [h_words]
    for mm in range(2, m + 1):
        gens = [w ** (2 ** (mm - 2)) for w in a_words]
        for i in range(1, mm // 2 + 1):
            k = mm - i
            gens += [commutator(u, v) for u in y_stages[i - 1]
                     for v in y_stages[k - 1]]
        y_stages.append(_dedupe(gens))

    def x_m(mm: int) -> List[Word]:
        plain = [(w, 0) for w in h_words]
        special = [(w, 1) for w in a_words]
        out: List[Word] = []
        for i in range(2, mm + 1):
            need = mm - i
            if need > i:
                continue
            for combo in itertools.product(plain + special, repeat=i):
                if sum(tag for _, tag in combo) != need:
                    continue
                out.append(left_normed([w for w, _ in combo]))
        return out

    z_stages: List[List[Word]] = [h_words, y_stages[1]]
    for mm in range(3, m + 1):
        gens = [free_reduce(w * w) for w in z_stages[-1]] + x_m(mm)
        z_stages.append(_dedupe(gens))

    zt: List[Word] = list(a_pow)
    plain = [(w, 0) for w in h_words]
    special = [(w, 1) for w in a_words]
    for i in range(2, m + 1):
        for combo in itertools.product(plain + special, repeat=i):
            k = sum(tag for _, tag in combo)
            if k > m - i:
                continue
            zt.append(left_normed([w for w, _ in combo]) ** (2 ** (m - i - k)))

    return (SubgroupDescription(ambient, _dedupe(a_pow), label=f"Apow_{m}"),
            SubgroupDescription(ambient, y_stages[min(m, len(y_stages)) - 1],
                                label=f"Y_{m}"),
            SubgroupDescription(ambient, z_stages[min(m, len(z_stages)) - 1],
                                label=f"Z_{m}"),
            SubgroupDescription(ambient, _dedupe(zt), label=f"Ztilde_{m}"))


def lower_central_description(p: Presentation, n: int) -> SubgroupDescription:
    """Word-level generators of the n-th lower central term, built by the
    commutator recursion alone: Gamma_1 is generated by the presentation's
    generators and Gamma_n by the brackets [w, g] over the generators of
    Gamma_{n-1}. Serves as the independent route the closed forms are
    compared against."""
    if n < 1:
        raise BadParameters(f"need n >= 1, got {n}")
    gen_words = [Word.from_syms(g) for g in p.generators]
    stage = gen_words
    for _ in range(n - 1):
        stage = _dedupe([commutator(w, g) for w in stage for g in gen_words])
    return SubgroupDescription(p, stage, label=f"Gamma_{n} (recursion)")


# -- comparison oracles ----------------------------------------------------

Oracle = Union[FiniteModel, int]


def _same_ambient(a: SubgroupDescription, b: SubgroupDescription) -> None:
    pa, pb = a.ambient, b.ambient
    if pa is pb:
        return
    if list(pa.generators) != list(pb.generators):
        raise OracleMismatch(
            f"descriptions live over different generator alphabets: "
            f"{pa.generators} vs {pb.generators}")


def _nilpotent_image(desc: SubgroupDescription, c: int) -> NilpotentImage:
    img = NilpotentImage(list(desc.ambient.generators), c)
    img.add_words(list(desc.ambient.relators) + list(desc.normal_generators))
    return img


def _contains(container, desc: SubgroupDescription) -> bool:
    return all(container.contains_word(w) for w in desc.normal_generators)


def compare_descriptions(a: SubgroupDescription, b: SubgroupDescription,
                         oracle: Oracle) -> str:
    """Compare the normal closures of two descriptions at the resolution of
    an oracle: either a finite permutation model of the shared ambient
    group, or an integer nilpotency class bound (the comparison then happens
    in the ambient group modulo the (c+1)-st lower central term)."""
    _same_ambient(a, b)
    if isinstance(oracle, FiniteModel):
        ia = subgroup_image(oracle, a)
        ib = subgroup_image(oracle, b)
        a_in_b = ia.points <= ib.points
        b_in_a = ib.points <= ia.points
    elif isinstance(oracle, int):
        ia = _nilpotent_image(a, oracle)
        ib = _nilpotent_image(b, oracle)
        a_in_b = _contains(ib, a)
        b_in_a = _contains(ia, b)
    else:
        raise OracleMismatch(f"unsupported oracle {oracle!r}")
    if a_in_b and b_in_a:
        return EQUAL
    if a_in_b:
        return A_IN_B
    if b_in_a:
        return B_IN_A
    return INCOMPARABLE


def lemaprinc_check(x: Word, y: Word, i: int, m: int,
                    gens: Sequence[Word],
                    oracle: Oracle,
                    a_words: Optional[Sequence[Word]] = None,
                    k: int = 0,
                    ambient: Optional[Presentation] = None) -> bool:
    """Check one instance of the power-shifting congruence
    [x^(2^e), y] = [x, y]^(2^e) modulo E_{i+1, m+1}, with e = m - i - k."""
    e = m - i - k
    if e < 0:
        raise BadParameters(f"need k <= m - i, got i={i}, m={m}, k={k}")
    lhs = commutator(x ** (2 ** e), y)
    rhs = commutator(x, y) ** (2 ** e)
    diff = free_reduce(lhs * ~rhs)
    target = elm_generators(i + 1, m + 1, gens, a_words=a_words, ambient=ambient)
    if isinstance(oracle, FiniteModel):
        return subgroup_image(oracle, target).contains_word(diff)
    if isinstance(oracle, int):
        return _nilpotent_image(target, oracle).contains_word(diff)
    raise OracleMismatch(f"unsupported oracle {oracle!r}")


# -- residual separation ---------------------------------------------------

def residual_separation(p: Presentation, elements: Sequence[Word],
                        family: FiltrationFamily, depth: int) -> List[Dict]:
    """For each element, search the first stage of the chosen filtration of
    the group presented by p whose quotient separates it from the identity.
    The verdicts are evidence at the explored depth, not residuality proofs:
    'NotSeparatedWithinDepth' only says the search was exhausted."""
    if depth < 1:
        raise DepthUnsupported(f"need depth >= 1, got {depth}")
    reports: List[Dict] = []
    if family.kind == GAMMA_P:
        tower = two_quotient_tower(p, depth)
        for w in elements:
            stage = None
            for idx in range(1, len(tower)):
                if tower[idx].apply_word(w, 0) != 0:
                    stage = idx + 1
                    break
            reports.append(_separation_report(w, stage, depth))
        return reports
    if family.kind == LOWER_CENTRAL:
        if depth > 5:
            raise DepthUnsupported(
                f"lower central separation is bounded by class 4 quotients "
                f"(depth <= 5), got {depth}")
        images = {}
        for w in elements:
            stage = None
            for n in range(2, depth + 1):
                c = n - 1
                if c not in images:
                    img = NilpotentImage(list(p.generators), c)
                    img.add_words(list(p.relators))
                    images[c] = img
                if not images[c].contains_word(w):
                    stage = n
                    break
            reports.append(_separation_report(w, stage, depth))
        return reports
    # derived series: only the abelianization quotient is computable
    if depth > 2:
        raise DepthUnsupported(
            f"derived-series separation is supported to depth 2 "
            f"(abelianization), got {depth}")
    img = NilpotentImage(list(p.generators), 1)
    img.add_words(list(p.relators))
    for w in elements:
        stage = None
        if depth >= 2 and not img.contains_word(w):
            stage = 2
        reports.append(_separation_report(w, stage, depth))
    return reports


def _separation_report(w: Word, stage: Optional[int], depth: int) -> Dict:
    if not free_reduce(w).letters:
        return {"element": str(w), "verdict": "Trivial", "stage": None}
    if stage is None:
        return {"element": str(w), "verdict": "NotSeparatedWithinDepth",
                "stage": None, "depth": depth}
    return {"element": str(w), "verdict": "Separated", "stage": stage}
