import itertools
import random
from fractions import Fraction

import pytest

from posetalg.poset import enumerate_posets, fig2_poset, lower_covers, make_poset
from posetalg.ratfunc import Poly, RatFunc, t_poly
from posetalg.leavitt import AlgebraError, generator, one, parse_element
from posetalg.toeplitz import (
    RepError,
    RepVector,
    act,
    act_element,
    act_expr,
    act_sigma,
    act_word,
    build_space,
    check_alphabar_inverse_identity,
    check_corner_inverse_identity,
    check_relation,
    invert_sigma,
    leaf_vector,
    relation_suite,
    run_relation_suite,
    sample_vectors,
    sigma_poly,
    zvar,
)

FIG2 = fig2_poset()
SPACE = build_space(FIG2)


def chain(n):
    ids = [f"c{i}" for i in range(n + 1)]
    return make_poset(ids, [(ids[i], ids[i + 1]) for i in range(n)])


def diamond():
    return make_poset(
        ["b", "q1", "q2", "p"], [("b", "q1"), ("b", "q2"), ("q1", "p"), ("q2", "p")]
    )


# -- space structure ---------------------------------------------------------


def test_build_space_fig2():
    assert SPACE.levels == (("a", "b"), ("p",))
    assert SPACE.leaves["a"] == ((("a", 0),),)
    assert SPACE.leaves["p"] == ((("p", 1), ("a", 0)), (("p", 2), ("b", 0)))


def test_build_space_singleton_and_chain():
    single = build_space(make_poset(["x"], []))
    assert single.leaves["x"] == ((("x", 0),),)
    c = build_space(chain(1))
    assert c.leaves["c1"] == ((("c1", 1), ("c0", 0)),)


def test_context_mismatch_rejected():
    other = build_space(chain(1))
    with pytest.raises(RepError):
        RepVector(SPACE, {(("c1", 1), ("c0", 0)): RatFunc.const(1)})
    v = leaf_vector(other, (("c1", 1), ("c0", 0)))
    with pytest.raises(Exception):
        act(SPACE, ("e", "p"), v)


# -- generator actions --------------------------------------------------------


def test_act_spec_examples():
    v = leaf_vector(SPACE, (("p", 1), ("a", 0)))
    assert act_word(SPACE, [("alphabar", "p", "a"), ("alpha", "p", "a")], v) == v
    assert act(SPACE, ("e", "p"), v) == v
    assert act(SPACE, ("e", "a"), v).is_zero()
    # z1-weighted leaf: alpha drops to the constant, beta projects and lands
    v2 = leaf_vector(SPACE, (("p", 1), ("a", 0)), Poly.var(zvar("p", 1)))
    stepped = act(SPACE, ("alpha", "p", "a"), v2)
    assert stepped == v
    landed = act(SPACE, ("beta", "p", "a"), stepped)
    assert landed == leaf_vector(SPACE, (("a", 0),))


def test_step_substitution_twists():
    # a vector with z2-dependence shows the forced inverse substitution
    v = leaf_vector(SPACE, (("p", 1), ("a", 0)), Poly.var(zvar("p", 2)))
    out = act(SPACE, ("beta", "p", "a"), v)
    # z2 -> t1^{-1}
    assert out == leaf_vector(SPACE, (("a", 0),), RatFunc(Poly.const(1), t_poly(1)))
    # and betabar undoes it
    back = act(SPACE, ("betabar", "p", "a"), out)
    assert back == v


def test_idempotents_orthogonal_and_sum_to_identity():
    for v in sample_vectors(SPACE, 2):
        total = RepVector(SPACE)
        for p in FIG2.elements:
            total = total + act(SPACE, ("e", p), v)
        assert total == v
    for p, q in itertools.permutations(FIG2.elements, 2):
        for v in sample_vectors(SPACE, 1):
            assert act_word(SPACE, [("e", p), ("e", q)], v).is_zero()


def test_e_nonzero_for_every_vertex():
    for poset in [FIG2, chain(2), diamond()]:
        space = build_space(poset)
        samples = sample_vectors(space, 1)
        for p in poset.elements:
            assert any(not act(space, ("e", p), v).is_zero() for v in samples)


# -- relation suite ------------------------------------------------------------


@pytest.mark.parametrize(
    "poset",
    [FIG2, chain(1), chain(2), chain(3), diamond()],
    ids=["fig2", "chain1", "chain2", "chain3", "diamond"],
)
def test_relation_suite(poset):
    results = run_relation_suite(poset, maxdeg=2)
    bad = [r for r in results if not r["ok"]]
    assert not bad


def test_baby_toeplitz_inequality():
    baby = make_poset(["q", "p"], [("q", "p")])
    space = build_space(baby)
    one_ = Fraction(1)
    ok = check_relation(
        space,
        [(one_, [("alphabar", "p", "q"), ("alpha", "p", "q")])],
        [(one_, [("e", "p")])],
    )
    assert ok is None
    bad = check_relation(
        space,
        [(one_, [("alpha", "p", "q"), ("alphabar", "p", "q")])],
        [(one_, [("e", "p")])],
    )
    assert bad is not None


def test_check_relation_reports_counterexample_vector():
    one_ = Fraction(1)
    bad = check_relation(
        SPACE,
        [(one_, [("alpha", "p", "a")])],
        [(one_, [("alpha", "p", "b")])],
    )
    assert bad is not None
    v, left, right = bad
    assert left != right


# -- element action -------------------------------------------------------------


def test_act_element_matches_word_action():
    rng = random.Random(23)
    gens = [("e", p) for p in FIG2.elements]
    for p in FIG2.elements:
        for q in lower_covers(FIG2, p):
            gens += [(k, p, q) for k in ("epq", "alpha", "alphabar", "beta", "betabar")]
    gens += [("t", 1), ("t", 2)]
    samples = sample_vectors(SPACE, 2)[:8]
    for _ in range(120):
        word = [rng.choice(gens) for _ in range(rng.randint(1, 3))]
        x = one(FIG2)
        for g_ in word:
            x = x * generator(FIG2, *g_)
        top = [
            ("scalar", RatFunc(t_poly(g_[1]))) if g_[0] == "t" else g_ for g_ in word
        ]
        for v in samples:
            assert act_word(SPACE, top, v) == act_element(SPACE, x, v)


def test_act_element_rejects_foreign_poset():
    other = chain(1)
    with pytest.raises(RepError):
        act_element(SPACE, one(other), leaf_vector(SPACE, (("a", 0),)))


def test_corner_consistency():
    # elements over a lower subset act identically via the subspace and kill
    # vectors supported outside it
    lower = {"a"}
    sub = make_poset(["a"], [])
    x = parse_element(FIG2, "t2 * e[a]")
    outside = leaf_vector(SPACE, (("p", 1), ("a", 0)))
    assert act_element(SPACE, x, outside).is_zero()
    inside = leaf_vector(SPACE, (("a", 0),))
    got = act_element(SPACE, x, inside)
    assert got == inside.scale(RatFunc(t_poly(2)))
    # full lower set {a, b}: the corner at A fixes V(A) setwise
    for v in sample_vectors(SPACE, 1):
        rooted_in_a = all(path[0][0] in {"a", "b"} for path in v.coeffs)
        corner = act_expr(
            SPACE,
            [(Fraction(1), [("e", "a")]), (Fraction(1), [("e", "b")])],
            v,
        )
        if rooted_in_a:
            assert corner == v


def test_faithfulness_probe_random_elements():
    rng = random.Random(29)
    gens = [("e", p) for p in FIG2.elements]
    for p in FIG2.elements:
        for q in lower_covers(FIG2, p):
            gens += [(k, p, q) for k in ("epq", "alpha", "alphabar", "beta", "betabar")]
    samples = sample_vectors(SPACE, 3)
    tried = 0
    for _ in range(100):
        x = one(FIG2)
        for g_ in (rng.choice(gens) for _ in range(rng.randint(1, 3))):
            x = x * generator(FIG2, *g_)
        if x.is_zero():
            continue
        tried += 1
        moved = any(not act_element(SPACE, x, v).is_zero() for v in samples)
        assert moved, x
    assert tried > 50


# -- truncated inverses -----------------------------------------------------------


def test_invert_sigma_identity_poly():
    f = sigma_poly(FIG2, "p", {(): 1})
    for v in sample_vectors(SPACE, 3):
        expected = act(SPACE, ("e", "p"), v)
        assert invert_sigma(SPACE, f, v, 2) == expected


def test_invert_sigma_geometric():
    f = sigma_poly(FIG2, "p", {(): 1, ("a",): -1})
    for d in range(6):
        v = leaf_vector(SPACE, (("p", 1), ("a", 0)), Poly.var(zvar("p", 1), d))
        inv = invert_sigma(SPACE, f, v, 6)
        assert act_sigma(SPACE, f, inv) == v  # window: deg <= 6 - 1


def test_invert_sigma_window_bound():
    # beyond the window the truncation is visible
    f = sigma_poly(FIG2, "p", {(): 1, ("a",): -1})
    v = leaf_vector(SPACE, (("p", 1), ("a", 0)), Poly.var(zvar("p", 1), 6))
    inv = invert_sigma(SPACE, f, v, 3)
    assert act_sigma(SPACE, f, inv) != v


def test_invert_sigma_valuation_gate():
    with pytest.raises(AlgebraError):
        invert_sigma(
            SPACE, sigma_poly(FIG2, "p", {("a",): 1}), leaf_vector(SPACE, (("a", 0),)), 4
        )
    # v(f)=0 with a mixed monomial is accepted
    f = sigma_poly(FIG2, "p", {(): 1, ("a", "b"): 1})
    assert f.valuation(FIG2) == 0
    v = leaf_vector(SPACE, (("p", 1), ("a", 0)), Poly.var(zvar("p", 1), 2))
    assert act_sigma(SPACE, f, invert_sigma(SPACE, f, v, 6)) == v


def test_invert_sigma_minimal_vertex_scalar():
    f = sigma_poly(FIG2, "a", {(): 2})
    v = leaf_vector(SPACE, (("a", 0),))
    assert invert_sigma(SPACE, f, v, 3) == v.scale(Fraction(1, 2))


def test_sample_inverses_round_trip():
    fs = [
        sigma_poly(FIG2, "p", {(): 1}),
        sigma_poly(FIG2, "p", {(): 2}),
        sigma_poly(FIG2, "p", {(): 1, ("a",): -1}),
        sigma_poly(FIG2, "p", {(): 1, ("b",): 1}),
        sigma_poly(FIG2, "p", {(): 1, ("a", "b"): 1}),
        sigma_poly(FIG2, "p", {(): 1, ("a",): Fraction(1, 2), ("b", "b"): 1}),
    ]
    for f in fs:
        degf = max(f.degree_at(("x", q)) for q in ("a", "b"))
        for d in range(0, 5 - degf):
            for branch, leafpath in ((1, (("p", 1), ("a", 0))), (2, (("p", 2), ("b", 0)))):
                v = leaf_vector(SPACE, leafpath, Poly.var(zvar("p", branch), d))
                inv = invert_sigma(SPACE, f, v, 6)
                assert act_sigma(SPACE, f, inv) == v


# -- localization identities at truncation ------------------------------------------


@pytest.mark.parametrize("q", ["a", "b"])
def test_corner_inverse_identity(q):
    fs = [
        sigma_poly(FIG2, "p", {(): 1, ("a",): -1}),
        sigma_poly(FIG2, "p", {(): 1, ("a",): 1, ("b", "b"): 2}),
        sigma_poly(FIG2, "p", {("b",): 1, (): 1}),
    ]
    for f in fs:
        assert check_corner_inverse_identity(SPACE, f, q, 6) is None


@pytest.mark.parametrize("q", ["a", "b"])
def test_alphabar_inverse_identity(q):
    fs = [
        sigma_poly(FIG2, "p", {(): 1, ("a",): -1}),
        sigma_poly(FIG2, "p", {(): 1, ("a",): 1, ("b",): 1}),
    ]
    for f in fs:
        assert check_alphabar_inverse_identity(SPACE, f, q, 6) is None


def test_relation_suite_covers_all_families():
    names = {r[0].split("[")[0] for r in relation_suite(FIG2)}
    assert {
        "A.3a", "A.3b", "A.4", "A.5", "A.8", "A.9", "A.10a", "A.10b",
        "A.13a", "A.13b", "A.13c", "A.13d", "A.14a", "A.14b", "A.14c",
        "A.14d", "A.15a", "A.15b", "A.16", "A.17", "A.18",
    } <= names
