"""Exact right action on the recursively built representation space.

The space attached to a poset is built level by level: a minimal vertex
carries the scalar line, and a vertex p with lower covers q_1..q_k carries
one branch per cover, the branch along q_j being V(q_j) tensored with
polynomials in z_j over rational functions in the other z's of p.  A basis
leaf is addressed by a branch path (vertex, chosen slot) descending to a
minimal vertex, and a vector assigns each leaf a rational-function
coefficient that is polynomial in every chosen-slot variable along its
path.

Operators act on the right.  alphabar multiplies by the slot variable,
alpha divides (off its own branch) or drops-and-shifts (on it), the pair
idempotent extracts the constant part, and the step maps substitute the
top-level slot variables by scalars.  The substitution direction is the
one forced by the twist relations: the slot variable z_l goes to the
INVERSE of the matching t (the alpha relations pair a positive t on one
side with a division by z on the other).

Inverses of the admissible polynomials (zero valuation in every slot) are
realized as truncated geometric series, exact on a stated degree window.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .poset import LabelledPoset, lower_covers
from .ratfunc import Poly, RatFunc, t_poly
from .leavitt import AlgElement, AlgebraError, sigma_j_index


def zvar(vertex, slot):
    return ("z", vertex, slot)


class RepError(ValueError):
    pass


@dataclass(frozen=True)
class Space:
    """Leaf layout of the representation space of a poset."""

    poset: LabelledPoset
    levels: tuple  # Min-peeling of the poset
    leaves: dict  # vertex -> tuple of branch paths rooted there

    def all_leaves(self):
        return [path for v in self.poset.elements for path in self.leaves[v]]

    def check_path(self, path):
        if not path or path[0][0] not in self.leaves or path not in self.leaves[path[0][0]]:
            raise RepError(f"branch path {path} does not belong to this space")


def build_space(poset: LabelledPoset) -> Space:
    """Level decomposition and branch structure (one summand per cover)."""
    remaining = set(poset.elements)
    levels = []
    while remaining:
        level = tuple(sorted(p for p in remaining if not (poset.strict[p] & remaining)))
        levels.append(level)
        remaining -= set(level)
    leaves = {}
    for level in levels:
        for v in level:
            covers = lower_covers(poset, v)
            if not covers:
                leaves[v] = (((v, 0),),)
            else:
                leaves[v] = tuple(
                    ((v, j),) + tail
                    for j, q in enumerate(covers, start=1)
                    for tail in leaves[q]
                )
    return Space(poset, tuple(levels), leaves)


class RepVector:
    """Finite map from branch paths to rational-function coefficients."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: Space, coeffs=None):
        self.space = space
        self.coeffs = {}
        for path, c in (coeffs or {}).items():
            space.check_path(path)
            c = RatFunc.of(c)
            if not c.is_zero():
                self.coeffs[path] = c

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, RepVector) or self.space is not other.space:
            return NotImplemented
        if set(self.coeffs) != set(other.coeffs):
            return False
        return all(self.coeffs[p] == other.coeffs[p] for p in self.coeffs)

    def __add__(self, other):
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            s = out.get(p)
            out[p] = c if s is None else s + c
        return RepVector(self.space, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = RatFunc.of(c)
        return RepVector(self.space, {p: cc * c for p, cc in self.coeffs.items()})

    def __repr__(self):
        if not self.coeffs:
            return "RepVector(0)"
        bits = ", ".join(f"{path}: {c!r}" for path, c in sorted(self.coeffs.items()))
        return f"RepVector({bits})"


def leaf_vector(space, path, coeff=1) -> RepVector:
    return RepVector(space, {path: RatFunc.of(coeff)})


# ---------------------------------------------------------------------------
# generator actions


def _const_part(coeff: RatFunc, var) -> RatFunc:
    if coeff.den.degree_span(var) != (0, 0):
        raise RepError(f"denominator depends on the polynomial slot {var}")
    buckets = coeff.num.split_by(var)
    if buckets and min(buckets) < 0:
        raise RepError(f"negative power of the polynomial slot {var}")
    part = buckets.get(0)
    return RatFunc.const(0) if part is None else RatFunc(part, coeff.den)


def _drop_shift(coeff: RatFunc, var, times=1) -> RatFunc:
    if coeff.den.degree_span(var) != (0, 0):
        raise RepError(f"denominator depends on the polynomial slot {var}")
    out = Poly()
    for d, part in coeff.num.split_by(var).items():
        if d < 0:
            raise RepError(f"negative power of the polynomial slot {var}")
        if d >= times:
            out = out + part * Poly.var(var, d - times) if d > times else out + part
    return RatFunc(out, coeff.den)


def _step_subst(poset, p, j):
    """The substitution applied by the step map along slot j at p:
    z_l -> t_{sigma_j(l)}^{-1} for l != j, t_u -> t_{u+k-1}."""
    k = poset.n_covers(p)
    mapping = {}
    for ell in range(1, k + 1):
        if ell != j:
            mapping[zvar(p, ell)] = (("t", sigma_j_index(k, j, ell)), -1)
    return mapping, k

def _apply_step(coeff: RatFunc, poset, p, j):
    mapping, k = _step_subst(poset, p, j)
    tshift = {}
    for v in coeff.num.variables() | coeff.den.variables():
        if v[0] == "t":
            tshift[v] = (("t", v[1] + k - 1), 1)
    return coeff.subst_monomials({**mapping, **tshift})


def _apply_step_inverse(coeff: RatFunc, poset, p, j):
    k = poset.n_covers(p)
    jj = min(j, k - 1)

    def slot_of(i):
        if i < jj:
            return i
        if i == jj:
            return j + 1 if j < k else k - 1
        return i + 1

    mapping = {}
    for v in coeff.num.variables() | coeff.den.variables():
        if v[0] == "t":
            i = v[1]
            if i <= k - 1:
                mapping[v] = (zvar(p, slot_of(i)), -1)
            else:
                mapping[v] = (("t", i - k + 1), 1)
    return coeff.subst_monomials(mapping)


def act(space: Space, gen, vec: RepVector) -> RepVector:
    """Right action of one generator; gen is a tuple such as ("e", p),
    ("epq", p, q), ("alpha", p, q), ("alphabar", p, q), ("beta", p, q),
    ("betabar", p, q) or ("scalar", value)."""
    if vec.space is not space:
        raise RepError("vector belongs to a different space (context mismatch)")
    P = space.poset
    kind = gen[0]
    out = {}

    def put(path, c):
        if not c.is_zero():
            prev = out.get(path)
            out[path] = c if prev is None else prev + c

    if kind == "scalar":
        val = RatFunc.of(gen[1])
        for path, c in vec.coeffs.items():
            put(path, c * val)
        return RepVector(space, out)

    if kind == "e":
        p = gen[1]
        P.check(p)
        for path, c in vec.coeffs.items():
            if path[0][0] == p:
                put(path, c)
        return RepVector(space, out)

    p, q = gen[1], gen[2]
    if q not in lower_covers(P, p):
        raise RepError(f"{q!r} is not a lower cover of {p!r}")
    slot = P.label_index(p, q)

    for path, c in vec.coeffs.items():
        root, j0 = path[0]
        if kind == "epq":
            if root == p and j0 == slot:
                put(path, _const_part(c, zvar(p, slot)))
        elif kind == "alphabar":
            if root == p:
                put(path, c * RatFunc(Poly.var(zvar(p, slot))))
        elif kind == "alpha":
            if root == p:
                if j0 != slot:
                    put(path, c * RatFunc(Poly.const(1), Poly.var(zvar(p, slot))))
                else:
                    put(path, _drop_shift(c, zvar(p, slot)))
        elif kind == "beta":
            if root == p and j0 == slot:
                c0 = _const_part(c, zvar(p, slot))
                put(path[1:], _apply_step(c0, P, p, slot))
        elif kind == "betabar":
            if root == q:
                put(((p, slot),) + path, _apply_step_inverse(c, P, p, slot))
        else:
            raise RepError(f"unknown generator {gen!r}")
    return RepVector(space, out)


def act_word(space, word, vec):
    for gen in word:
        vec = act(space, gen, vec)
    return vec


def act_expr(space, expr, vec):
    """expr is a list of (scalar coefficient, word); the actions add up."""
    total = RepVector(space)
    for coeff, word in expr:
        total = total + act_word(space, word, vec).scale(coeff)
    return total


def act_element(space: Space, x: AlgElement, vec: RepVector) -> RepVector:
    """Fold the action over the canonical term structure."""
    if x.poset != space.poset:
        raise RepError("element and space live over different posets")
    total = RepVector(space)
    for key, coeff in x.terms.items():
        # every term lives in the corner at the start of its left path
        word = [("e", key.left[0][0] if key.left else key.mid)]
        for u, v, m in key.left:
            word += [("alpha", u, v)] * m
            word.append(("beta", u, v))
        word.append(("scalar", RatFunc(coeff)))
        for q, e in key.powers:
            word += [("alpha" if e > 0 else "alphabar", key.mid, q)] * abs(e)
        for u, v, m in key.right:
            word.append(("betabar", u, v))
            word += [("alphabar", u, v)] * m
        total = total + act_word(space, word, vec)
    return total


# ---------------------------------------------------------------------------
# admissible polynomials and truncated inverses


@dataclass(frozen=True)
class SigmaPoly:
    """Polynomial in the commuting per-cover variables at a vertex, with
    Laurent-t coefficients; admissible when no variable divides it."""

    vertex: str
    poly: Poly

    def cover_vars(self, poset):
        return [("x", q) for q in lower_covers(poset, self.vertex)]

    def valuation_at(self, var) -> int:
        if self.poly.is_zero():
            raise AlgebraError("zero polynomial has no valuation")
        spans = [dict(mono).get(var, 0) for mono in self.poly.terms]
        if min(spans) < 0:
            raise AlgebraError("negative cover exponent is not a polynomial")
        return min(spans)

    def valuation(self, poset) -> int:
        vs = [self.valuation_at(v) for v in self.cover_vars(poset)]
        return max(vs) if vs else 0

    def degree_at(self, var) -> int:
        return max((dict(mono).get(var, 0) for mono in self.poly.terms), default=0)

    def as_element(self, poset) -> AlgElement:
        from .leavitt import TermKey

        terms = {}
        for mono, c in self.poly.terms.items():
            powers = []
            coeff = {}
            for v, e in mono:
                if v[0] == "x":
                    powers.append((v[1], e))
                else:
                    coeff[((v, e),)] = 1
            key = TermKey((), self.vertex, tuple(sorted(powers)), ())
            base = Poly({tuple(kv for kvs in coeff for kv in kvs): Fraction(c)}) if coeff else Poly.const(c)
            terms[key] = terms.get(key, Poly()) + base
        return AlgElement(poset, terms)


def sigma_poly(poset, vertex, mapping) -> SigmaPoly:
    """Build an admissible polynomial from {monomial spec: coeff} where a
    monomial spec maps cover ids to exponents, e.g. {(): 1, ("a",): -1}."""
    terms = {}
    for covers, c in mapping.items():
        counts = {}
        for q in covers:
            counts[q] = counts.get(q, 0) + 1
        mono = tuple(sorted((("x", q), e) for q, e in counts.items()))
        terms[mono] = terms.get(mono, Fraction(0)) + Fraction(c)
    return SigmaPoly(vertex, Poly(terms))


def invert_sigma(space: Space, f: SigmaPoly, vec: RepVector, depth: int) -> RepVector:
    """Truncated inverse of an admissible polynomial, applied on the right.

    Acts as the corner inverse at the polynomial's vertex (leaves rooted
    elsewhere are annihilated); exact on coefficients whose slot degree is
    at most depth minus the polynomial's slot degree.
    """
    P = space.poset
    if f.poly.is_zero():
        raise AlgebraError("cannot invert zero")
    if f.valuation(P) != 0:
        raise AlgebraError("valuation gate: some cover variable divides the polynomial")
    p = f.vertex
    covers = lower_covers(P, p)
    out = {}
    if not covers:
        # minimal vertex: the polynomial is a Laurent scalar
        c = RatFunc(f.poly).inverse()
        for path, coeff in vec.coeffs.items():
            if path[0][0] == p:
                out[path] = coeff * c
        return RepVector(space, out)
    series_cache = {}
    for path, coeff in vec.coeffs.items():
        root, j = path[0]
        if root != p:
            continue
        if j not in series_cache:
            series_cache[j] = _inverse_series(P, f, j, depth)
        gs = series_cache[j]
        zeta = zvar(p, j)
        acc = RatFunc.const(0)
        for a, g in enumerate(gs):
            term = coeff * g if a == 0 else _drop_shift(coeff * g, zeta, times=a)
            acc = acc + term
        prev = out.get(path)
        out[path] = acc if prev is None else prev + acc
    return RepVector(space, out)


def _inverse_series(poset, f: SigmaPoly, j, depth):
    """Coefficients g_0..g_depth of the inverse power series along slot j."""
    p = f.vertex
    covers = lower_covers(poset, p)
    xj = ("x", covers[j - 1])
    buckets = f.poly.split_by(xj)
    fbar = {}
    for b, part in buckets.items():
        mapping = {}
        for q in covers:
            if ("x", q) in part.variables():
                mapping[("x", q)] = (zvar(p, poset.label_index(p, q)), -1)
        fbar[b] = RatFunc(part.subst_monomials(mapping))
    g0 = fbar[0].inverse()
    gs = [g0]
    maxdeg = max(fbar)
    for a in range(1, depth + 1):
        s = RatFunc.const(0)
        for b in range(1, min(a, maxdeg) + 1):
            if b in fbar:
                s = s + fbar[b] * gs[a - b]
        gs.append(-(g0 * s) if not s.is_zero() else RatFunc.const(0))
    return gs


def act_sigma(space, f: SigmaPoly, vec):
    """Forward action of an admissible polynomial (via its element form)."""
    return act_element(space, f.as_element(space.poset), vec)


# ---------------------------------------------------------------------------
# sample vectors and relation checking


def sample_vectors(space: Space, maxdeg: int = 3):
    """Deterministic probe family: each leaf with coefficient one, then
    each slot variable along its path raised to 1..maxdeg."""
    out = []
    for path in space.all_leaves():
        out.append(leaf_vector(space, path))
        for u, j in path:
            if j >= 1:
                for d in range(1, maxdeg + 1):
                    out.append(leaf_vector(space, path, Poly.var(zvar(u, j), d)))
    return out


def check_relation(space, lhs, rhs, samples=None, maxdeg: int = 3):
    """Apply both operator expressions (lists of (coeff, word)) to the
    sample family; None if they agree, else the first offending sample."""
    if samples is None:
        samples = sample_vectors(space, maxdeg)
    for v in samples:
        left = act_expr(space, lhs, v)
        right = act_expr(space, rhs, v)
        if left != right:
            return (v, left, right)
    return None


def relation_suite(poset: LabelledPoset):
    """All defining-relation instances of the poset, as named operator
    expression pairs ready for check_relation."""
    rels = []

    def w(*gens):
        return [(Fraction(1), list(gens))]

    def minus(expr1, expr2):
        return expr1 + [(-c, word) for c, word in expr2]

    for p in poset.elements:
        covers = lower_covers(poset, p)
        k = len(covers)
        for q in covers:
            a, ab = ("alpha", p, q), ("alphabar", p, q)
            b, bb = ("beta", p, q), ("betabar", p, q)
            e, epq = ("e", p), ("epq", p, q)
            eq = ("e", q)
            rels.append((f"A.3a[{p},{q}]", w(a, e), w(a)))
            rels.append((f"A.3b[{p},{q}]", minus(w(e, a), w(epq, a)), w(a)))
            for lam, slam in ((t_poly(1), 1), (t_poly(2), 2)):
                shifted = RatFunc(Poly.var(("t", slam + max(k - 1, 0))))
                rels.append(
                    (
                        f"A.8[{p},{q},t{slam}]",
                        w(("scalar", RatFunc(lam)), b),
                        w(b, ("scalar", shifted)),
                    )
                )
                rels.append(
                    (
                        f"A.16[{p},{q},t{slam}]",
                        w(bb, ("scalar", RatFunc(lam))),
                        w(("scalar", shifted), bb),
                    )
                )
            rels.append((f"A.10a[{p},{q}]", w(epq, b), w(b)))
            rels.append((f"A.10b[{p},{q}]", w(b), w(b, eq)))
            rels.append((f"A.13a[{p},{q}]", w(e, ab), w(ab)))
            rels.append((f"A.13b[{p},{q}]", w(ab), minus(w(ab, e), w(ab, epq))))
            rels.append((f"A.13c[{p},{q}]", w(ab, a), w(e)))
            rels.append((f"A.13d[{p},{q}]", w(a, ab), minus(w(e), w(epq))))
            rels.append((f"A.14a[{p},{q}]", w(eq, bb), w(bb)))
            rels.append((f"A.14b[{p},{q}]", w(bb), w(bb, epq)))
            rels.append((f"A.14c[{p},{q}]", w(bb, b), w(eq)))
            rels.append((f"A.14d[{p},{q}]", w(b, bb), w(epq)))
        for q, q2 in itertools.permutations(covers, 2):
            a, a2 = ("alpha", p, q), ("alpha", p, q2)
            ab, ab2 = ("alphabar", p, q), ("alphabar", p, q2)
            b, bb = ("beta", p, q), ("betabar", p, q)
            epq2 = ("epq", p, q2)
            j = poset.label_index(p, q)
            ell = poset.label_index(p, q2)
            tw = ("scalar", RatFunc(t_poly(sigma_j_index(k, j, ell))))
            twinv = ("scalar", RatFunc(t_poly(sigma_j_index(k, j, ell), -1)))
            rels.append((f"A.4[{p},{q},{q2}]", w(a, epq2), w(epq2, a)))
            rels.append((f"A.5[{p},{q},{q2}]", w(a, a2), w(a2, a)))
            rels.append((f"A.9[{p},{q2},{q}]", w(a2, b), w(b, tw)))
            rels.append((f"A.15a[{p},{q},{q2}]", w(epq2, ab), w(ab, epq2)))
            rels.append((f"A.15b[{p},{q},{q2}]", w(ab, ab2), w(ab2, ab)))
            rels.append((f"A.17[{p},{q},{q2}]", w(bb, a2), w(tw, bb)))
            rels.append((f"A.18[{p},{q},{q2}]", w(twinv, bb), w(bb, ab2)))
    return rels


def run_relation_suite(poset, maxdeg: int = 3):
    """Verdict list for every relation instance over the poset, with the
    offending sample vector when a relation fails."""
    space = build_space(poset)
    samples = sample_vectors(space, maxdeg)
    results = []
    for name, lhs, rhs in relation_suite(poset):
        bad = check_relation(space, lhs, rhs, samples)
        entry = {"relation": name, "ok": bad is None, "sample_degree": maxdeg}
        if bad is not None:
            v, left, right = bad
            entry["counterexample"] = {
                "vector": repr(v),
                "lhs": repr(left),
                "rhs": repr(right),
            }
        results.append(entry)
    return results


# ---------------------------------------------------------------------------
# the localized-idempotent identities at truncation


def _factor_bottom(f: SigmaPoly, poset, q):
    """Split f = f0 + x_q f1 + ... and factor f0 = w * f0' with w the
    monomial content of f0 in the other cover variables."""
    p = f.vertex
    xq = ("x", q)
    buckets = f.poly.split_by(xq)
    f0 = buckets.get(0, Poly())
    if f0.is_zero():
        raise AlgebraError("bottom coefficient vanishes (valuation gate)")
    others = [("x", q2) for q2 in lower_covers(poset, p) if q2 != q]
    w = {}
    for var in others:
        m = min(dict(mono).get(var, 0) for mono in f0.terms)
        if m > 0:
            w[var] = m
    if w:
        f0p = Poly({_strip(mono, w): c for mono, c in f0.terms.items()})
    else:
        f0p = f0
    rest = {b: part for b, part in buckets.items() if b > 0}
    return f0, w, SigmaPoly(p, f0p), rest


def _strip(mono, w):
    d = dict(mono)
    for var, m in w.items():
        d[var] = d.get(var, 0) - m
        if d[var] == 0:
            del d[var]
    return tuple(sorted(d.items()))


def check_corner_inverse_identity(space, f: SigmaPoly, q, depth, maxdeg=2):
    """e(p,q) f^{-1} = (f0')^{-1} wbar e(p,q) = e(p,q) (f0')^{-1} wbar,
    with truncated inverses; the residual must sit above the exact window.
    Returns None if every sample agrees on the window, else a triple."""
    P = space.poset
    p = f.vertex
    _, wmono, f0p, _ = _factor_bottom(f, P, q)
    samples = sample_vectors(space, maxdeg)
    epq = ("epq", p, q)
    wbar_word = [("alphabar", p, var[1]) for var, m in sorted(wmono.items()) for _ in range(m)]
    for v in samples:
        lhs = invert_sigma(space, f, act(space, epq, v), depth)
        mid = act_word(space, wbar_word + [epq], invert_sigma(space, f0p, v, depth))
        rhs = act_word(space, wbar_word, invert_sigma(space, f0p, act(space, epq, v), depth))
        for other in (mid, rhs):
            diff = lhs - other
            if not _above_window(space, f, diff, depth):
                return (v, lhs, other)
    return None


def _above_window(space, f: SigmaPoly, diff: RepVector, depth):
    """Every residual coefficient exceeds the guaranteed-exact slot degree."""
    P = space.poset
    p = f.vertex
    for path, c in diff.coeffs.items():
        root, j = path[0]
        if root != p:
            return False
        covers = lower_covers(P, p)
        cutoff = depth - f.degree_at(("x", covers[j - 1]))
        if min(c.num.split_by(zvar(p, j))) <= cutoff:
            return False
    return True


def check_alphabar_inverse_identity(space, f: SigmaPoly, q, depth, maxdeg=2):
    """alphabar_q f^{-1} = f^{-1} alphabar_q + f^{-1} (f0')^{-1} g wbar e(p,q)
    with g = -(f1 + x_q f2 + ...), at truncation."""
    P = space.poset
    p = f.vertex
    _, wmono, f0p, rest = _factor_bottom(f, P, q)
    xq = ("x", q)
    gpoly = Poly()
    for b, part in rest.items():
        gpoly = gpoly + part * Poly.var(xq, b - 1)
    g = SigmaPoly(p, -gpoly)
    epq = ("epq", p, q)
    ab = ("alphabar", p, q)
    wbar_word = [("alphabar", p, var[1]) for var, m in sorted(wmono.items()) for _ in range(m)]
    samples = sample_vectors(space, maxdeg)
    for v in samples:
        lhs = invert_sigma(space, f, act(space, ab, v), depth)
        t1 = act(space, ab, invert_sigma(space, f, v, depth))
        t2 = act_word(
            space,
            wbar_word + [epq],
            act_sigma(space, g, invert_sigma(space, f0p, invert_sigma(space, f, v, depth), depth)),
        )
        diff = lhs - (t1 + t2)
        if not _above_window(space, f, diff, depth):
            return (v, lhs, t1 + t2)
    return None
