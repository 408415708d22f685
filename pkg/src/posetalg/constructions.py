"""Categorical surgery on primitive monoids and the unfolding pipeline.

Three constructions operate directly on prime pairs: the amalgamated
pushout (gluing two monoids along isomorphic order-ideals), the crowned
pushout (identifying two disjoint isomorphic order-ideals inside one
monoid), and the pullback of two monoids over a common ideal quotient.
Each carries a bounded brute-force verifier of its universal property.

The unfolding pipeline takes a maximal element p of a poset, unfolds its
down-set into the tree of saturated descending paths (every upper interval
a chain), and then reconstructs the down-set monoid by a recorded sequence
of crowned pushouts; assembling the per-maximal reconstructions and gluing
shared lower parts recovers the monoid of the whole poset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .poset import (
    LabelledPoset,
    LowerSet,
    PosetError,
    compute_lower_covers,
    depth,
    down_set,
    height,
    lower_covers,
    make_poset,
    maximal_chains,
)
from .primon import (
    MonElem,
    MonoidError,
    OrderIdeal,
    PrimePair,
    PrimitiveMonoid,
    congruence_oracle,
    from_poset,
    monoid_iso,
    presentation_of,
    quotient,
)


def map_elem(dst: PrimitiveMonoid, pmap: dict, x: MonElem) -> MonElem:
    """Apply a prime map (prime -> prime or None) to a reduced element."""
    word = {}
    for p, n in x.coeffs:
        q = pmap[p]
        if q is not None:
            word[q] = word.get(q, 0) + n
    return dst.reduce(word)


def _check_ideal_iso(m_src, src_primes, m_dst, dst_primes, phi):
    if set(phi) != set(src_primes) or set(phi.values()) != set(dst_primes):
        raise MonoidError("ideal map is not a bijection between the prime sets")
    if len(set(phi.values())) != len(phi):
        raise MonoidError("ideal map is not injective")
    src_rel = {(a, b) for a, b in m_src.pair.rel if a in set(src_primes) and b in set(src_primes)}
    dst_rel = {(a, b) for a, b in m_dst.pair.rel if a in set(dst_primes) and b in set(dst_primes)}
    if {(phi[a], phi[b]) for a, b in src_rel} != dst_rel:
        raise MonoidError("ideal map does not preserve the relation")


# ---------------------------------------------------------------------------
# crowned pushout


@dataclass
class CrownedPushout:
    monoid: PrimitiveMonoid
    projection: dict  # prime map P -> Q
    ideal: OrderIdeal  # the surviving copy Z of I inside Q

    def project(self, x: MonElem) -> MonElem:
        return map_elem(self.monoid, self.projection, x)


def crowned_pushout(m: PrimitiveMonoid, ideal: OrderIdeal, ideal2: OrderIdeal, phi: dict) -> CrownedPushout:
    """Coequalizer identifying ideal with ideal2 through phi.

    The result lives on the primes of m minus ideal2's, with the inherited
    relation plus (x, y) whenever x is an ideal prime, y is outside both,
    and (phi[x], y) holds in m; freeness of surviving primes is untouched.
    """
    pi_set, pi2_set = ideal.prime_set, ideal2.prime_set
    if pi_set & pi2_set:
        raise MonoidError("crowned pushout needs disjoint ideals")
    _check_ideal_iso(m, pi_set, m, pi2_set, phi)
    survivors = tuple(p for p in m.primes if p not in pi2_set)
    outside = set(survivors) - pi_set
    rel = {(q, p) for q, p in m.pair.rel if q in set(survivors) and p in set(survivors)}
    rel |= {(x, y) for x in pi_set for y in outside if (phi[x], y) in m.pair.rel}
    q_mon = PrimitiveMonoid(PrimePair(survivors, frozenset(rel)))
    inv = {v: k for k, v in phi.items()}
    pmap = {p: inv.get(p, p) for p in m.primes}
    return CrownedPushout(q_mon, pmap, OrderIdeal(q_mon, frozenset(pi_set)))


def verify_coequalizer(m, ideal, ideal2, phi, pushout: CrownedPushout, bound: int):
    """Check the coequalizer property within a size bound.

    (a) the projection agrees on i and phi(i) for ideal elements <= bound;
    (b) the kernel of the projection equals the congruence generated by the
        pairs (x+i, x+phi(i)), computed by the bounded congruence oracle.
    Returns None if ok, else a counterexample pair.
    """
    pi = pushout.project
    for i in ideal.elements(bound):
        if pi(i) != pi(map_elem(m, {**{p: p for p in m.primes}, **phi}, i)):
            return (i, "projection does not equalize the ideal identification")
    gens, rels = presentation_of(m)
    rels += [({g: 1}, {phi[g]: 1}) for g in sorted(ideal.prime_set)]
    oracle = congruence_oracle(gens, rels, bound)
    for x, y in itertools.combinations(m.elements(bound), 2):
        same_fiber = pi(x) == pi(y)
        same_class = oracle.equal(x.as_dict(), y.as_dict())
        if same_fiber != same_class:
            return (x, y)
    return None


# ---------------------------------------------------------------------------
# amalgamated pushout


@dataclass
class AmalgamPushout:
    monoid: PrimitiveMonoid
    inj1: dict  # prime map M -> P
    inj2: dict  # prime map N -> P
    ideal: OrderIdeal  # common image of the glued ideals

    def i1(self, x):
        return map_elem(self.monoid, self.inj1, x)

    def i2(self, x):
        return map_elem(self.monoid, self.inj2, x)


def amalgam_pushout(m: PrimitiveMonoid, n: PrimitiveMonoid, ideal: OrderIdeal, phi: dict) -> AmalgamPushout:
    """Pushout of m and n along an order-ideal isomorphism phi.

    Realized as the crowned pushout of the product monoid along the two
    ideal copies; the injections tag primes with @1/@2.
    """
    if ideal.monoid is not m:
        raise MonoidError("ideal must belong to the first monoid")
    image = frozenset(phi.values())
    _check_ideal_iso(m, ideal.prime_set, n, image, phi)
    OrderIdeal(n, image)  # validates the image is an order-ideal of n

    primes = tuple(sorted([f"{p}@1" for p in m.primes] + [f"{p}@2" for p in n.primes]))
    rel = {(f"{a}@1", f"{b}@1") for a, b in m.pair.rel} | {(f"{a}@2", f"{b}@2") for a, b in n.pair.rel}
    prod = PrimitiveMonoid(PrimePair(primes, frozenset(rel)))
    left = OrderIdeal(prod, frozenset(f"{p}@1" for p in ideal.prime_set))
    right = OrderIdeal(prod, frozenset(f"{p}@2" for p in image))
    tagged_phi = {f"{p}@1": f"{phi[p]}@2" for p in ideal.prime_set}
    pushed = crowned_pushout(prod, left, right, tagged_phi)

    inj1 = {p: f"{p}@1" for p in m.primes}
    inv = {v: k for k, v in phi.items()}
    inj2 = {q: (f"{inv[q]}@1" if q in image else f"{q}@2") for q in n.primes}
    return AmalgamPushout(pushed.monoid, inj1, inj2, pushed.ideal)


# ---------------------------------------------------------------------------
# pullback


@dataclass
class PullbackPrimitive:
    monoid: PrimitiveMonoid
    m1: PrimitiveMonoid
    m2: PrimitiveMonoid
    proj1: dict  # prime map P -> M1 (None kills a prime)
    proj2: dict
    ideal: OrderIdeal  # N1 x N2 inside P
    quotient_iso: dict  # P(M1/N1) -> P(M2/N2)

    def p1(self, x):
        return map_elem(self.m1, self.proj1, x)

    def p2(self, x):
        return map_elem(self.m2, self.proj2, x)


def pullback_primitive(m1, n1: OrderIdeal, m2, n2: OrderIdeal, iso: dict | None = None) -> PullbackPrimitive:
    """Pullback of m1 -> S <- m2 where S is the common ideal quotient.

    Requires every ideal prime to sit below every non-ideal prime in its
    monoid (validated); the primes of the result are the disjoint union of
    the quotient's and the two ideals', with every ideal prime below every
    quotient prime.
    """
    for m, n in ((m1, n1), (m2, n2)):
        for p in n.prime_set:
            for q in set(m.primes) - n.prime_set:
                if (p, q) not in m.pair.rel:
                    raise MonoidError(
                        f"pullback hypothesis fails: ideal prime {p!r} not below {q!r}"
                    )
    s1, _ = quotient(m1, n1)
    s2, _ = quotient(m2, n2)
    if iso is None:
        iso = monoid_iso(s1, s2)
        if iso is None:
            raise MonoidError("the ideal quotients are not isomorphic")
    else:
        if {(iso[a], iso[b]) for a, b in s1.pair.rel} != set(s2.pair.rel) or set(
            iso
        ) != set(s1.primes):
            raise MonoidError("supplied quotient isomorphism is invalid")

    primes = (
        [f"{p}@s" for p in s1.primes]
        + [f"{p}@1" for p in sorted(n1.prime_set)]
        + [f"{p}@2" for p in sorted(n2.prime_set)]
    )
    rel = {(f"{a}@s", f"{b}@s") for a, b in s1.pair.rel}
    rel |= {(f"{a}@1", f"{b}@1") for a, b in m1.pair.rel if a in n1.prime_set and b in n1.prime_set}
    rel |= {(f"{a}@2", f"{b}@2") for a, b in m2.pair.rel if a in n2.prime_set and b in n2.prime_set}
    rel |= {
        (np, f"{s}@s")
        for np in [f"{p}@1" for p in n1.prime_set] + [f"{p}@2" for p in n2.prime_set]
        for s in s1.primes
    }
    pb = PrimitiveMonoid(PrimePair(tuple(sorted(primes)), frozenset(rel)))

    proj1 = {f"{p}@s": p for p in s1.primes}
    proj1 |= {f"{p}@1": p for p in n1.prime_set}
    proj1 |= {f"{p}@2": None for p in n2.prime_set}
    proj2 = {f"{p}@s": iso[p] for p in s1.primes}
    proj2 |= {f"{p}@2": p for p in n2.prime_set}
    proj2 |= {f"{p}@1": None for p in n1.prime_set}
    ideal = OrderIdeal(
        pb, frozenset([f"{p}@1" for p in n1.prime_set] + [f"{p}@2" for p in n2.prime_set])
    )
    return PullbackPrimitive(pb, m1, m2, proj1, proj2, ideal, iso)


def verify_pullback_universal(pb: PullbackPrimitive, m1, n1, m2, n2, bound: int):
    """Every compatible pair of elements has exactly one preimage (<= bound).

    Returns None if ok, else ((x1, x2), count).
    """
    s1, pr1 = quotient(m1, n1)
    s2, pr2 = quotient(m2, n2)
    iso = pb.quotient_iso
    p_elems = pb.monoid.elements(2 * bound)
    for x1 in m1.elements(bound):
        for x2 in m2.elements(bound):
            if map_elem(s2, iso, pr1(x1)) != pr2(x2):
                continue
            count = sum(1 for z in p_elems if pb.p1(z) == x1 and pb.p2(z) == x2)
            if count != 1:
                return ((x1, x2), count)
    return None


# ---------------------------------------------------------------------------
# the unfolding F(p)


@dataclass
class MappedPoset:
    """A poset together with an element map into a base poset."""

    poset: LabelledPoset
    psi: dict


@dataclass
class Unfolding:
    base: LabelledPoset
    top: str
    result: MappedPoset  # the unfolded tree with its surjection onto the down-set
    stages: list  # stages[i] = list of MappedPoset, one per partial poset


def _chain_signature(base, sig):
    """Label-index sequence of a descending path, for deterministic orders."""
    return tuple(base.label_index(sig[i], sig[i + 1]) for i in range(len(sig) - 1))


def _materialize(base, chains) -> MappedPoset:
    """Poset of all descending-path prefixes of the given maximal chains.

    Element ids reuse the base name, disambiguated with ~k over each fiber
    (k ordered by the label-index sequence of the path).
    """
    prefixes = set()
    for sig in chains:
        for i in range(1, len(sig) + 1):
            prefixes.add(sig[:i])
    by_base = {}
    for sig in sorted(prefixes, key=lambda s: (s[-1], _chain_signature(base, s))):
        by_base.setdefault(sig[-1], []).append(sig)
    names = {}
    for b, sigs in by_base.items():
        for k, sig in enumerate(sigs):
            names[sig] = b if len(sigs) == 1 else f"{b}~{k}"
    covers = []
    labels = {}
    for sig in prefixes:
        kids = sorted(
            (s for s in prefixes if len(s) == len(sig) + 1 and s[: len(sig)] == sig),
            key=lambda s: base.label_index(sig[-1], s[-1]),
        )
        for kid in kids:
            covers.append((names[kid], names[sig]))
        if kids:
            labels[names[sig]] = tuple(names[k] for k in kids)
    poset = make_poset([names[s] for s in prefixes], covers, labels)
    return MappedPoset(poset, {names[s]: s[-1] for s in prefixes})


def build_F(base: LabelledPoset, top: str) -> Unfolding:
    """Unfold the down-set of a maximal element into its path tree.

    Stage 0 holds one singleton poset per maximal chain; stage i merges the
    posets whose designated top chains (the common descending prefix, r-i+1
    elements) agree, taking the disjoint union of everything below.  The
    final stage is a single poset in which every upper interval is a chain.
    """
    base.check(top)
    if top not in base.maximal():
        raise PosetError(f"{top!r} is not maximal")
    r = height(base, top)
    chains = sorted(
        (tuple(reversed(c)) for c in maximal_chains(base, top)),
        key=lambda s: _chain_signature(base, s),
    )
    groups = [(sig,) for sig in chains]
    stages = [[_materialize(base, g) for g in groups]]
    for i in range(1, r + 1):
        klen = r - i + 1
        buckets = {}
        for idx, g in enumerate(sorted(groups)):
            prefix = g[0]
            for sig in g[1:]:
                k = 0
                while k < min(len(prefix), len(sig)) and prefix[k] == sig[k]:
                    k += 1
                prefix = prefix[:k]
            key = prefix[:klen] if len(prefix) >= klen else ("!", idx)
            buckets.setdefault(key, []).append(g)
        groups = [
            tuple(sorted(itertools.chain.from_iterable(gs)))
            for _, gs in sorted(buckets.items(), key=lambda kv: str(kv[0]))
        ]
        stages.append([_materialize(base, g) for g in groups])
    if len(groups) != 1:
        raise PosetError("unfolding did not converge to a single poset")
    return Unfolding(base, top, stages[-1][0], stages)


# ---------------------------------------------------------------------------
# reconstruction by crowned pushouts


def sub_poset(base: LabelledPoset, members) -> LabelledPoset:
    """Restriction of a poset to a lower subset (covers and labels persist)."""
    members = set(members)
    for p in members:
        if not base.strict[p] <= members:
            raise PosetError("sub_poset needs a lower subset")
    covers = [(q, p) for p in members for q in lower_covers(base, p)]
    labels = {p: base.labels[p] for p in members if p in base.labels}
    return make_poset(members, covers, labels)


def _merge_lower_parts(poset: LabelledPoset, psi: dict, z1, z2, phi: dict):
    """Poset-level crowned pushout: drop z2, wire z1 below z2's upper sets.

    Returns (new poset, new psi, element map).  Label order of an affected
    element keeps the old positions, with each dropped cover replaced by its
    phi-preimage.
    """
    z1, z2 = set(z1), set(z2)
    survivors = [e for e in poset.elements if e not in z2]
    inv = {v: k for k, v in phi.items()}
    mu = {e: inv.get(e, e) for e in poset.elements}
    pairs = {(q, p) for p in survivors for q in poset.strict[p] if q not in z2 and p not in z2}
    pairs |= {
        (x, y)
        for x in z1
        for y in survivors
        if y not in z1 and phi[x] in poset.strict[y]
    }
    strict = {e: frozenset(q for q, p in pairs if p == e) for e in survivors}
    labels = {}
    for p in survivors:
        covers = compute_lower_covers(strict, p)
        if not covers:
            continue
        old = poset.labels.get(p, ())

        def order_key(c, old=old):
            if c in old:
                return (old.index(c), c)
            if phi.get(c) in old:
                return (old.index(phi[c]), c)
            return (len(old), c)

        labels[p] = tuple(sorted(covers, key=order_key))
    new_poset = LabelledPoset(tuple(sorted(survivors)), strict, labels)
    new_psi = {e: psi[e] for e in survivors}
    return new_poset, new_psi, mu


@dataclass
class Reconstruction:
    """Stages M^0(p) .. M^r(p) of the crowned-pushout reconstruction."""

    base: LabelledPoset
    top: str
    unfolding: Unfolding
    stages: list  # MappedPoset per stage
    step_maps: list  # step_maps[i]: stage-i element -> stage-(i+1) element

    def monoids(self):
        return [from_poset(s.poset) for s in self.stages]

    def stage_map(self, j: int, i: int) -> dict:
        """The composite element map from stage i to stage j (i <= j)."""
        out = {e: e for e in self.stages[i].poset.elements}
        for k in range(i, j):
            out = {e: self.step_maps[k][v] for e, v in out.items()}
        return out


def _glue_overlap(poset, psi, covered: set, fresh: set):
    """One pairwise merge of the psi-overlap of two lower parts."""
    common = {psi[x] for x in covered} & {psi[x] for x in fresh}
    if not common:
        return poset, psi, {e: e for e in poset.elements}, covered | fresh
    z1 = {x for x in covered if psi[x] in common}
    z2 = {x for x in fresh if psi[x] in common}
    fresh_by_image = {}
    for x in sorted(z2):
        if psi[x] in fresh_by_image:
            raise PosetError("projection map is not injective on the fresh part")
        fresh_by_image[psi[x]] = x
    seen = {}
    for x in sorted(z1):
        if psi[x] in seen:
            raise PosetError("projection map is not injective on the covered part")
        seen[psi[x]] = x
    phi = {x: fresh_by_image[psi[x]] for x in z1}
    new_poset, new_psi, mu = _merge_lower_parts(poset, psi, z1, z2, phi)
    return new_poset, new_psi, mu, {mu[x] for x in covered | fresh}


def reconstruct_down(base: LabelledPoset, top: str) -> Reconstruction:
    """Rebuild the down-set monoid of a maximal element from its unfolding.

    Step i processes the elements of depth r-i-2: the overlaps of the
    images of their covers' down-sets are identified two at a time by
    crowned pushouts, in cover-label order.
    """
    unf = build_F(base, top)
    poset, psi = unf.result.poset, dict(unf.result.psi)
    r = height(base, top)
    stages = [MappedPoset(poset, dict(psi))]
    step_maps = []
    for i in range(max(r - 1, 0)):
        d = r - i - 2
        total_mu = {e: e for e in poset.elements}
        for q in sorted(e for e in poset.elements if depth(poset, e) == d):
            covers = lower_covers(poset, q)
            if len(covers) < 2:
                continue
            covered = set(down_set(poset, covers[0]).members)
            for v in covers[1:]:
                fresh = set(down_set(poset, v).members)
                poset, psi, mu, covered = _glue_overlap(poset, psi, covered, fresh)
                total_mu = {e: mu[x] for e, x in total_mu.items()}
        stages.append(MappedPoset(poset, dict(psi)))
        step_maps.append(total_mu)
    # the last stage must be isomorphic to the down-set through psi
    target = sub_poset(base, base.strict[top] | {top})
    final = stages[-1]
    if sorted(final.psi.values()) != sorted(target.elements) or len(
        final.poset.elements
    ) != len(target.elements):
        raise PosetError("reconstruction did not converge onto the down-set")
    for a, b in itertools.permutations(final.poset.elements, 2):
        if final.poset.lt(a, b) != target.lt(final.psi[a], final.psi[b]):
            raise PosetError("reconstruction projection is not an order isomorphism")
    if final.poset.elements != target.elements:
        stages.append(MappedPoset(target, {e: e for e in target.elements}))
        step_maps.append(dict(final.psi))
    return Reconstruction(base, top, unf, stages, step_maps)


# ---------------------------------------------------------------------------
# full assembly


@dataclass
class Assembly:
    base: LabelledPoset
    monoid: PrimitiveMonoid
    poset: LabelledPoset
    psi: dict  # assembled element -> base element (a bijection when sound)
    reconstructions: dict
    gluings: int


def assemble(base: LabelledPoset) -> Assembly:
    """Product of the reconstructed down-set monoids of the maximal
    elements, glued along shared lower parts by crowned pushouts."""
    maxima = sorted(base.maximal())
    recs = {}
    parts = []
    for m in maxima:
        rec = reconstruct_down(base, m)
        recs[m] = rec
        last = rec.stages[-1]
        tagged = _tag_poset(last.poset, f"@{m}")
        parts.append(MappedPoset(tagged, {f"{e}@{m}": last.psi[e] for e in last.poset.elements}))
    if not parts:
        empty = make_poset([])
        return Assembly(base, from_poset(empty), empty, {}, recs, 0)

    elements = [e for part in parts for e in part.poset.elements]
    covers = [
        (q, p)
        for part in parts
        for p in part.poset.elements
        for q in lower_covers(part.poset, p)
    ]
    labels = {}
    for part in parts:
        labels.update(part.poset.labels)
    poset = make_poset(elements, covers, labels)
    psi = {}
    for part in parts:
        psi.update(part.psi)

    gluings = 0
    covered = set(parts[0].poset.elements)
    for part in parts[1:]:
        fresh = {e for e in part.poset.elements}
        before = len(poset.elements)
        poset, psi, _, covered = _glue_overlap(poset, psi, covered, fresh)
        if len(poset.elements) != before:
            gluings += 1
    return Assembly(base, from_poset(poset), poset, psi, recs, gluings)


def _tag_poset(poset: LabelledPoset, suffix: str) -> LabelledPoset:
    covers = [(f"{q}{suffix}", f"{p}{suffix}") for p in poset.elements for q in lower_covers(poset, p)]
    labels = {
        f"{p}{suffix}": tuple(f"{q}{suffix}" for q in poset.labels[p]) for p in poset.labels
    }
    return make_poset([f"{e}{suffix}" for e in poset.elements], covers, labels)
