"""Symbolic rewriting engine for the pre-localization path-style algebra.

Elements are finite sums of canonical terms

    [descending steps] . coeff . [monomial at the bottom vertex] . [ascending steps]

where a descending step (u, v, m) stands for alpha_{u,v}^m beta_{u,v}, an
ascending step (u, v, m) for betabar_{u,v} alphabar_{u,v}^m, the monomial is
a pure power of alpha (positive exponent) or alphabar (negative) per lower
cover of the bottom vertex, and the coefficient is a Laurent polynomial in
the scalars t1, t2, ...

The rewriting orientation: pair idempotents stay in their beta-betabar
form, scalars migrate inward toward the bottom vertex (the scalar twist
sigma^p applies at every step crossed: the outward direction is not total,
since sigma^p misses t1..t_{n_p-1}), same-cover alphabar.beta and
betabar.alpha products vanish, and alpha^a alphabar^b expands through
e(p) - beta betabar, which strictly reduces the mixed overlap and so
terminates.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .poset import LabelledPoset, PosetError, lower_covers
from .ratfunc import Poly, poly_str, t_poly

# Step = (upper vertex, lower cover, exponent >= 0)


class AlgebraError(ValueError):
    pass


def sigma_j_index(k: int, j: int, ell: int) -> int:
    """The non-decreasing surjection {1..k} -> {1..k-1} attached to slot j,
    evaluated at ell (ell != j); slot k shares the map of slot k-1."""
    if k < 2:
        raise AlgebraError("scalar twist needs at least two covers")
    jj = min(j, k - 1)
    if ell < jj:
        return ell
    if ell in (jj, jj + 1):
        return jj
    return ell - 1


def sigma_p_poly(poly: Poly, np_: int) -> Poly:
    """Coefficient twist at a vertex with np_ covers: t_i -> t_{i+np_-1}."""
    if np_ <= 1:
        return poly
    mapping = {}
    for v in poly.variables():
        if v[0] == "t":
            mapping[v] = (("t", v[1] + np_ - 1), 1)
    return poly.subst_monomials(mapping)


def _involute_poly(poly: Poly) -> Poly:
    mapping = {v: (v, -1) for v in poly.variables() if v[0] == "t"}
    return poly.subst_monomials(mapping)


@dataclass(frozen=True)
class TermKey:
    left: tuple  # descending steps
    mid: str  # bottom vertex
    powers: tuple  # sorted (cover, nonzero exponent)
    right: tuple  # ascending steps, right[0] starts at mid

    def paths(self):
        g1 = (self.left[0][0],) + tuple(s[1] for s in self.left) if self.left else (self.mid,)
        g2 = tuple(s[0] for s in reversed(self.right)) + (self.mid,)
        return g1, g2


def _check_key(poset: LabelledPoset, key: TermKey):
    cur = None
    for u, v, m in key.left:
        if v not in lower_covers(poset, u) or m < 0:
            raise AlgebraError(f"bad descending step ({u},{v},{m})")
        if cur is not None and u != cur:
            raise AlgebraError("descending steps are not contiguous")
        cur = v
    if cur is not None and cur != key.mid:
        raise AlgebraError("descending path does not reach the bottom vertex")
    covs = set(lower_covers(poset, key.mid))
    for q, e in key.powers:
        if q not in covs or e == 0:
            raise AlgebraError(f"bad bottom monomial entry ({q},{e})")
    cur = key.mid
    for u, v, m in key.right:
        if v != cur or v not in lower_covers(poset, u) or m < 0:
            raise AlgebraError(f"bad ascending step ({u},{v},{m})")
        cur = u


class AlgElement:
    """Finite sum of canonical terms with Laurent-polynomial coefficients."""

    __slots__ = ("poset", "terms")

    def __init__(self, poset: LabelledPoset, terms=None, validate=False):
        self.poset = poset
        self.terms = {}
        for key, coeff in (terms or {}).items():
            coeff = coeff if isinstance(coeff, Poly) else Poly.const(coeff)
            if coeff.is_zero():
                continue
            if validate:
                _check_key(poset, key)
            self.terms[key] = self.terms.get(key, Poly()) + coeff
        self.terms = {k: c for k, c in self.terms.items() if not c.is_zero()}

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, AlgElement)
            and self.poset == other.poset
            and self.terms == other.terms
        )

    def __add__(self, other):
        self._check_mate(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Poly()) + c
        return AlgElement(self.poset, out)

    def __neg__(self):
        return AlgElement(self.poset, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = c if isinstance(c, Poly) else Poly.const(c)
        return AlgElement(self.poset, {k: cc * c for k, cc in self.terms.items()})

    def _check_mate(self, other):
        if not isinstance(other, AlgElement) or other.poset != self.poset:
            raise AlgebraError("operands live over different posets")

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return self.scale(other)
        self._check_mate(other)
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                for key, coeff in _mul_terms(self.poset, k1, c1, k2, c2):
                    prev = out.get(key)
                    out[key] = coeff if prev is None else prev + coeff
        return AlgElement(self.poset, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return self.scale(other)
        return NotImplemented

    def __repr__(self):
        return format_element(self)


# ---------------------------------------------------------------------------
# generators


def _unit_key(poset, p):
    poset.check(p)
    return TermKey((), p, (), ())


def generator(poset: LabelledPoset, kind: str, *args) -> AlgElement:
    """One of e, epq, eprime, alpha, alphabar, beta, betabar, t, scalar.

    The pair idempotent e(p,q) is stored in its beta.betabar form; the
    complement eprime(p) expands through the orthogonal decomposition of
    e(p).
    """
    P = poset
    if kind == "e":
        (p,) = args
        return AlgElement(P, {_unit_key(P, p): Poly.const(1)})
    if kind == "epq":
        p, q = args
        _require_cover(P, p, q)
        return AlgElement(P, {TermKey(((p, q, 0),), q, (), ((p, q, 0),)): Poly.const(1)})
    if kind == "eprime":
        (p,) = args
        out = generator(P, "e", p)
        for q in lower_covers(P, p):
            out = out - generator(P, "epq", p, q)
        return out
    if kind in ("alpha", "alphabar"):
        p, q = args
        _require_cover(P, p, q)
        e = 1 if kind == "alpha" else -1
        return AlgElement(P, {TermKey((), p, ((q, e),), ()): Poly.const(1)})
    if kind == "beta":
        p, q = args
        _require_cover(P, p, q)
        return AlgElement(P, {TermKey(((p, q, 0),), q, (), ()): Poly.const(1)})
    if kind == "betabar":
        p, q = args
        _require_cover(P, p, q)
        return AlgElement(P, {TermKey((), q, (), ((p, q, 0),)): Poly.const(1)})
    if kind == "t":
        (i,) = args
        return scalar_element(P, t_poly(i))
    if kind == "scalar":
        (c,) = args
        return scalar_element(P, c if isinstance(c, Poly) else Poly.const(c))
    raise AlgebraError(f"unknown generator kind {kind!r}")


def scalar_element(poset, coeff: Poly) -> AlgElement:
    return AlgElement(poset, {_unit_key(poset, p): coeff for p in poset.elements})


def one(poset) -> AlgElement:
    return scalar_element(poset, Poly.const(1))


def _require_cover(poset, p, q):
    if q not in lower_covers(poset, p):
        raise AlgebraError(f"{q!r} is not a lower cover of {p!r}")


# ---------------------------------------------------------------------------
# multiplication


def _cross_scalar(poset, upper, through_cover, powers):
    """Scalar picked up by a cover monomial crossing the step idempotent at
    ``upper`` along ``through_cover``: each alpha_{upper,q} contributes one
    positive t, each alphabar one negative t."""
    k = poset.n_covers(upper)
    j = poset.label_index(upper, through_cover)
    out = Poly.const(1)
    for q, e in powers:
        if q == through_cover:
            continue
        ell = poset.label_index(upper, q)
        out = out * t_poly(sigma_j_index(k, j, ell), e)
    return out


def _mul_terms(poset, k1: TermKey, c1: Poly, k2: TermKey, c2: Poly):
    top1 = k1.right[-1][0] if k1.right else k1.mid
    top2 = k2.left[0][0] if k2.left else k2.mid
    if top1 != top2:
        return []
    rise = list(k1.right)
    fall = list(k2.left)
    while rise and fall:
        (u1, d, m) = rise[-1]
        (u2, e, n) = fall[0]
        if d != e or m != n:
            return []
        rise.pop()
        fall.pop(0)

    if not rise and not fall:
        # both words exhausted: the bottoms meet (k1.mid == k2.mid)
        comb = {}
        for q, e in k1.powers:
            a, b = comb.get(q, (0, 0))
            comb[q] = (a + e, b) if e > 0 else (a, b - e)
        for q, e in k2.powers:
            a, b = comb.get(q, (0, 0))
            if e > 0:
                drop = min(b, e)
                comb[q] = (a + e - drop, b - drop)
            else:
                comb[q] = (a, b - e)
        return _expand_mixed(poset, list(k1.left), k1.mid, comb, c1 * c2, list(k2.right))

    if not rise:
        # the left factor is exhausted: its bottom monomial and coefficient
        # migrate down the remaining descending steps of the right factor
        (u, e, n) = fall.pop(0)
        net = dict(k1.powers).get(e, 0) + n
        if net < 0:
            return []
        scal = _cross_scalar(poset, u, e, k1.powers)
        S = sigma_p_poly(c1, poset.n_covers(u)) * scal
        new_left = list(k1.left) + [(u, e, net)]
        for (u2, v2, m2) in fall:
            S = sigma_p_poly(S, poset.n_covers(u2))
            new_left.append((u2, v2, m2))
        return [(TermKey(tuple(new_left), k2.mid, k2.powers, k2.right), S * c2)]

    # the right factor is exhausted: mirror case
    (u, d, m) = rise.pop()
    net = m - dict(k2.powers).get(d, 0)
    if net < 0:
        return []
    scal = _cross_scalar(poset, u, d, k2.powers)
    S = sigma_p_poly(c2, poset.n_covers(u)) * scal
    for (u2, v2, m2) in reversed(rise):
        S = sigma_p_poly(S, poset.n_covers(u2))
    new_right = tuple(rise) + ((u, d, net),) + k2.right
    return [(TermKey(k1.left, k1.mid, k1.powers, new_right), c1 * S)]


def _expand_mixed(poset, left, mid, comb, coeff, right):
    """Resolve mixed alpha^a alphabar^b factors at the bottom vertex.

    alpha^a alphabar^b = alpha^{a-1} alphabar^{b-1}
                         - (alpha^{a-1} beta) (betabar alphabar^{b-1}),
    and in the split-off term every other cover's power crosses the new
    step pair and becomes a scalar.  The mixed overlap strictly drops.
    """
    mixed = sorted(q for q, (a, b) in comb.items() if a > 0 and b > 0)
    if not mixed:
        powers = []
        for q in sorted(comb):
            a, b = comb[q]
            if a - b != 0:
                powers.append((q, a - b))
        return [(TermKey(tuple(left), mid, tuple(powers), tuple(right)), coeff)]
    q = mixed[0]
    a, b = comb[q]
    out = _expand_mixed(poset, left, mid, {**comb, q: (a - 1, b - 1)}, coeff, right)
    rest = [(q2, a2 - b2) for q2, (a2, b2) in comb.items() if q2 != q and a2 - b2 != 0]
    scal = _cross_scalar(poset, mid, q, rest)
    split_coeff = -(sigma_p_poly(coeff, poset.n_covers(mid)) * scal)
    key = TermKey(
        tuple(left) + ((mid, q, a - 1),), q, (), ((mid, q, b - 1),) + tuple(right)
    )
    out.append((key, split_coeff))
    return out


# ---------------------------------------------------------------------------
# involution, grading, ideals


def involute(x: AlgElement) -> AlgElement:
    """t_k -> t_k^{-1}, alpha <-> alphabar, beta <-> betabar, products reversed."""
    out = {}
    for key, coeff in x.terms.items():
        nk = TermKey(
            tuple(key.right),
            key.mid,
            tuple((q, -e) for q, e in key.powers),
            tuple(key.left),
        )
        out[nk] = out.get(nk, Poly()) + _involute_poly(coeff)
    return AlgElement(x.poset, out)


def grade(x: AlgElement) -> dict:
    """Partition of the terms by their pair of paths (both ending at the
    bottom vertex); the components sum back to x."""
    out = {}
    for key, coeff in x.terms.items():
        g1 = (key.left[0][0],) + tuple(s[1] for s in key.left) if key.left else (key.mid,)
        g2 = tuple(s[0] for s in reversed(key.right)) + (key.mid,)
        comp = out.setdefault((g1, g2), {})
        comp[key] = coeff
    return {pair: AlgElement(x.poset, terms) for pair, terms in out.items()}


def in_ideal(x: AlgElement, lower_set) -> bool:
    """True iff every graded component ends inside the lower set."""
    members = set(getattr(lower_set, "members", lower_set))
    return all(key.mid in members for key in x.terms)


def project_mod_ideal(x: AlgElement, lower_set) -> AlgElement:
    """Quotient by the ideal of a lower set: drop the components ending in
    it (equivalently, impose e(p,q) = beta_{p,q} = 0 for covers q inside)."""
    members = set(getattr(lower_set, "members", lower_set))
    return AlgElement(x.poset, {k: c for k, c in x.terms.items() if k.mid not in members})


# ---------------------------------------------------------------------------
# injectivity probe


def injectivity_probe(x: AlgElement):
    """Find (p, z1, z2) such that z1*x*z2 has the trivial path pair at p in
    its support.

    Follows the stripping recipe: take a path-extension-maximal support
    pair (lexicographically least, so a trivial pair wins when present),
    then peel its left path top-down with betabar.alphabar^M words (M the
    top exponent of the targeted terms) and its right path with the
    mirrored alpha^M.beta words.  The trivial-pair component of the corner
    at p is asserted nonzero; components whose paths stay inside other
    corners may survive when the support has incomparable maximal pairs.
    """
    if x.is_zero():
        raise AlgebraError("probe needs a nonzero element")
    P = x.poset
    pairs = set()
    for key in x.terms:
        g1 = (key.left[0][0],) + tuple(s[1] for s in key.left) if key.left else (key.mid,)
        g2 = tuple(s[0] for s in reversed(key.right)) + (key.mid,)
        pairs.add((g1, g2))

    def extends(shorter, longer):
        return len(longer) >= len(shorter) and longer[: len(shorter)] == shorter

    maximal = [
        (g1, g2)
        for g1, g2 in pairs
        if not any(
            (d1, d2) != (g1, g2) and extends(d1, g1) and extends(d2, g2)
            for d1, d2 in pairs
        )
    ]
    g1, g2 = min(maximal)
    p = g1[-1]

    z1 = one(P)
    cur = x
    for i in range(len(g1) - 1):
        u, v = g1[i], g1[i + 1]
        exps = [
            key.left[0][2]
            for key in cur.terms
            if key.paths() == (g1[i:], g2)
        ]
        if not exps:
            raise AlgebraError("targeted component vanished while stripping")
        big = max(exps)
        w = AlgElement(P, {TermKey((), v, (), ((u, v, big),)): Poly.const(1)})
        z1 = w * z1
        cur = w * cur
    g2_rest = g2
    z2 = one(P)
    for i in range(len(g2) - 1):
        u, v = g2[i], g2[i + 1]
        exps = [
            key.right[-1][2]
            for key in cur.terms
            if key.paths() == ((g1[-1],), g2_rest)
        ]
        if not exps:
            raise AlgebraError("targeted component vanished while stripping")
        big = max(exps)
        w = AlgElement(P, {TermKey(((u, v, big),), v, (), ()): Poly.const(1)})
        z2 = z2 * w
        cur = cur * w
        g2_rest = g2_rest[1:]
    corner = generator(P, "e", p) * cur * generator(P, "e", p)
    if not any(k.left == () and k.right == () and k.mid == p for k in corner.terms):
        raise AlgebraError("probe failed to isolate the trivial path pair")
    return p, z1, z2, cur


# ---------------------------------------------------------------------------
# linear syntax and JSON


_TOKEN = re.compile(
    r"\s*(?:(?P<gen>[aAbB]\[\s*\w+\s*,\s*\w+\s*\])|(?P<e>e\[\s*\w+\s*(?:,\s*\w+\s*)?\])"
    r"|(?P<t>t\d+)|(?P<num>-?\d+(?:/\d+)?)|(?P<op>[+*^()-]))"
)


def parse_element(poset: LabelledPoset, text: str) -> AlgElement:
    """Parse the linear syntax: a[p,q] A[p,q] b[p,q] B[p,q] e[p] e[p,q]
    tN (tN^-1), integers and rationals, with + - * ^ and parentheses."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise AlgebraError(f"cannot tokenize {text[pos:]!r}")
            break
        tokens.append(m.group().strip())
        pos = m.end()
    out = _parse_sum(poset, tokens, 0)
    expr, idx = out
    if idx != len(tokens):
        raise AlgebraError(f"trailing tokens {tokens[idx:]}")
    return expr


def _parse_sum(poset, toks, i):
    acc, i = _parse_product(poset, toks, i)
    while i < len(toks) and toks[i] in "+-":
        op = toks[i]
        term, i = _parse_product(poset, toks, i + 1)
        acc = acc + term if op == "+" else acc - term
    return acc, i


def _parse_product(poset, toks, i):
    acc, i = _parse_factor(poset, toks, i)
    while i < len(toks) and toks[i] == "*":
        nxt, i = _parse_factor(poset, toks, i + 1)
        acc = acc * nxt
    return acc, i


def _parse_factor(poset, toks, i):
    base, i = _parse_atom(poset, toks, i)
    while i < len(toks) and toks[i] == "^":
        if i + 1 >= len(toks):
            raise AlgebraError("dangling ^")
        n = int(toks[i + 1])
        i += 2
        if n < 0:
            base = _invert_scalar(base)
            n = -n
        acc = one(poset)
        for _ in range(n):
            acc = acc * base
        base = acc
    return base, i


def _invert_scalar(x: AlgElement) -> AlgElement:
    """Inverse of a scalar monomial element (negative powers are only legal
    on Laurent monomial scalars such as t3)."""
    coeffs = set()
    for key, c in x.terms.items():
        if key.left or key.right or key.powers:
            raise AlgebraError("negative powers are only defined for scalars")
        if len(c.terms) != 1:
            raise AlgebraError("cannot invert a multi-term scalar")
        coeffs.add(tuple(c.terms.items()))
    if len(coeffs) != 1 or len(x.terms) != len(x.poset.elements):
        raise AlgebraError("negative powers are only defined for global scalars")
    ((mono, c),) = next(iter(coeffs))
    inv = Poly({tuple((v, -e) for v, e in mono): Fraction(1) / c})
    return scalar_element(x.poset, inv)


def _parse_atom(poset, toks, i):
    if i >= len(toks):
        raise AlgebraError("unexpected end of input")
    tok = toks[i]
    if tok == "(":
        expr, j = _parse_sum(poset, toks, i + 1)
        if j >= len(toks) or toks[j] != ")":
            raise AlgebraError("unbalanced parenthesis")
        return expr, j + 1
    if tok == "-":
        expr, j = _parse_atom(poset, toks, i + 1)
        return -expr, j
    if re.fullmatch(r"t\d+", tok):
        return generator(poset, "t", int(tok[1:])), i + 1
    if re.fullmatch(r"-?\d+(/\d+)?", tok):
        return generator(poset, "scalar", Fraction(tok)), i + 1
    m = re.fullmatch(r"([aAbB])\[\s*(\w+)\s*,\s*(\w+)\s*\]", tok)
    if m:
        kind = {"a": "alpha", "A": "alphabar", "b": "beta", "B": "betabar"}[m.group(1)]
        return generator(poset, kind, m.group(2), m.group(3)), i + 1
    m = re.fullmatch(r"e\[\s*(\w+)\s*(?:,\s*(\w+)\s*)?\]", tok)
    if m:
        if m.group(2):
            return generator(poset, "epq", m.group(1), m.group(2)), i + 1
        return generator(poset, "e", m.group(1)), i + 1
    raise AlgebraError(f"unexpected token {tok!r}")


def format_element(x: AlgElement) -> str:
    if x.is_zero():
        return "0"
    parts = []
    for key in sorted(x.terms, key=lambda k: (k.mid, k.left, k.right, k.powers)):
        coeff = x.terms[key]
        factors = []
        for u, v, m in key.left:
            if m:
                factors.append(f"a[{u},{v}]^{m}" if m > 1 else f"a[{u},{v}]")
            factors.append(f"b[{u},{v}]")
        cs = poly_str(coeff)
        if cs != "1":
            factors.append(f"({cs})" if ("+" in cs or "- " in cs) else cs)
        for q, e in key.powers:
            sym = "a" if e > 0 else "A"
            ab = abs(e)
            factors.append(f"{sym}[{key.mid},{q}]" + (f"^{ab}" if ab > 1 else ""))
        for u, v, m in key.right:
            factors.append(f"B[{u},{v}]")
            if m:
                factors.append(f"A[{u},{v}]^{m}" if m > 1 else f"A[{u},{v}]")
        if not key.left and not key.right and not key.powers:
            # nothing else pins the corner of a pure scalar term
            factors.append(f"e[{key.mid}]")
        parts.append("*".join(factors))
    return " + ".join(parts)


def graded_json(x: AlgElement) -> dict:
    comps = []
    for (g1, g2), comp in sorted(grade(x).items()):
        comps.append(
            {
                "path_left": list(g1),
                "path_right": list(g2),
                "end": g1[-1],
                "component": format_element(comp),
            }
        )
    return {"poset": list(x.poset.elements), "components": comps}
