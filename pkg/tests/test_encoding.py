"""Word encodings, substitutions, com-injectivity, automorphisms."""

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyzero.encoding import (
    Automorphism, WordSubst, com_injective_check, concat_map, encode_ring,
    encode_word, identity_automorphism, induced_subst, invert_substitution,
    letter_var_names, single_letter_nonvanishing,
)
from polyzero.errors import DomainError, NotComInjective
from polyzero.poly import RatFunc

AB = encode_ring(["a", "b"])


def v(name, e=1):
    return AB.var(name, e)


def words_up_to(letters, n):
    for k in range(n + 1):
        yield from itertools.product(letters, repeat=k)


def test_encode_empty_word():
    assert encode_word("", AB) == (AB.zero(), AB.one())


def test_encode_abbab():
    tilde, bar = encode_word("abbab", AB)
    want = (v("at") * v("ab") * v("bb", 3)
            + v("bt") * v("ab") * v("bb", 2)
            + v("bt") * v("ab") * v("bb")
            + v("at") * v("bb")
            + v("bt"))
    assert tilde == want
    assert bar == v("ab", 2) * v("bb", 3)


def test_concatenation_law_exhaustive():
    cm = concat_map(AB)
    for u in words_up_to("ab", 3):
        for w in words_up_to("ab", 2):
            eu, ew = encode_word(u, AB), encode_word(w, AB)
            direct = encode_word(u + w, AB)
            via_law = (eu[0] * ew[1] + ew[0], eu[1] * ew[1])
            assert direct == via_law
            # and through the reusable pair map
            mring = cm.ring
            got = tuple(p.substitute({
                "x1": eu[0].convert(mring), "x2": eu[1].convert(mring),
                "y1": ew[0].convert(mring), "y2": ew[1].convert(mring),
            }).convert(AB) for p in cm.outputs)
            assert got == direct


def test_concat_map_association():
    ring = encode_ring(["a", "b"])
    ea, eb = encode_word("a", ring), encode_word("b", ring)

    def cat(x, y):
        return (x[0] * y[1] + y[0], x[1] * y[1])

    assert cat(cat(ea, eb), ea) == cat(ea, cat(eb, ea))


def test_injectivity_up_to_six():
    seen = {}
    for w in words_up_to("ab", 6):
        enc = encode_word(w, AB)
        assert enc not in seen, f"collision {w} vs {seen[enc]}"
        seen[enc] = w
    assert len(seen) == 2**7 - 1


def test_letter_count_evaluation():
    # evaluating the additive part with one letter's tilde set to 1, all else
    # frozen, counts that letter's occurrences
    rng = random.Random(2)
    for _ in range(25):
        w = "".join(rng.choice("ab") for _ in range(rng.randint(0, 8)))
        tilde, _ = encode_word(w, AB)
        count = tilde.evaluate({"at": Fraction(1), "bt": Fraction(0),
                                "ab": Fraction(1), "bb": Fraction(1)})
        assert count == w.count("a")


def test_induced_subst_images():
    ws = WordSubst({"a": "ab", "b": "babb"})
    ps = induced_subst(ws, ["a", "b"], AB)
    assert ps.images["at"] == v("at") * v("bb") + v("bt")
    assert ps.images["ab"] == v("ab") * v("bb")
    want_bt = (v("bt") * v("ab") * v("bb", 2) + v("at") * v("bb", 2)
               + v("bt") * v("bb") + v("bt"))
    assert ps.images["bt"] == want_bt
    assert ps.images["bb"] == v("ab") * v("bb", 3)


def test_substitution_commutes_with_encoding():
    cases = [WordSubst({"a": "ab", "b": "babb"}),
             WordSubst({"a": "aa"}),
             WordSubst({"a": "", "b": "ba"})]
    for ws in cases:
        ps = induced_subst(ws, ["a", "b"], AB)
        for w in words_up_to("ab", 4):
            direct = encode_word(ws.apply_word(w), AB)
            through = ps.apply_pair(encode_word(w, AB))
            assert direct == through, (ws, w)


def test_com_injective_check_examples():
    rep = com_injective_check(WordSubst({"a": "ab", "b": "babb"}), ["a", "b"])
    assert rep.matrix == ((1, 1), (1, 3))
    assert rep.det == 2 and rep.injective
    rep2 = com_injective_check(WordSubst({"a": "bbc"}), ["a", "b", "c"])
    assert not rep2.injective and rep2.det == 0
    rep3 = com_injective_check(WordSubst({}), ["a", "b"])
    assert rep3.injective and rep3.det == 1
    # commutative collision witness for a non-injective substitution:
    # a -> ab and b -> ab have equal commutative images
    collide = com_injective_check(WordSubst({"a": "ab", "b": "ab"}), ["a", "b"])
    assert not collide.injective


def test_single_letter_nonvanishing():
    assert not single_letter_nonvanishing(WordSubst({"a": "bbc"}),
                                          ["a", "b", "c"], "a")
    assert single_letter_nonvanishing(WordSubst({"a": "bab"}),
                                      ["a", "b", "c"], "a")
    with pytest.raises(DomainError):
        single_letter_nonvanishing(WordSubst({"a": "b", "b": "a"}),
                                   ["a", "b"], "a")


def test_invert_doubling():
    ring = encode_ring(["a"])
    alpha = invert_substitution(WordSubst({"a": "aa"}), ["a"], ring)
    at = RatFunc.of(ring.var("at"), ring.one())
    ab_half = RatFunc.of(ring.var("ab", Fraction(1, 2)), ring.one())
    assert alpha.inverse["ab"] == ab_half
    assert alpha.inverse["at"] == at / (1 + ab_half)
    assert alpha.apply(at) == RatFunc.of(
        ring.var("at") * ring.var("ab") + ring.var("at"), ring.one())


def test_invert_two_letter_example():
    alpha = invert_substitution(WordSubst({"a": "ab", "b": "babb"}), ["a", "b"], AB)
    assert alpha.inverse["ab"] == RatFunc(
        AB.var("ab", Fraction(3, 2)), AB.var("bb", Fraction(1, 2)))
    assert alpha.inverse["bb"] == RatFunc(
        AB.var("bb", Fraction(1, 2)), AB.var("ab", Fraction(1, 2)))
    assert alpha.verify_roundtrip()


def test_invert_rejects_singular():
    with pytest.raises(NotComInjective):
        invert_substitution(WordSubst({"a": "ab", "b": "ab"}), ["a", "b"], AB)
    with pytest.raises(NotComInjective):
        invert_substitution(WordSubst({"a": ""}), ["a"])


def test_identity_automorphism():
    ident = identity_automorphism(AB)
    x = RatFunc.of(AB.var("at") + AB.var("bb"), AB.var("ab"))
    assert ident.apply(x) == x
    assert ident.apply_inverse(x) == x
    assert ident.is_identity()


small_words = st.lists(st.sampled_from("ab"), min_size=0, max_size=3).map(tuple)


@settings(max_examples=30, deadline=None)
@given(small_words, small_words)
def test_invert_roundtrip_random(img_a, img_b):
    ws = WordSubst({"a": img_a, "b": img_b})
    rep = com_injective_check(ws, ["a", "b"])
    if not rep.injective:
        with pytest.raises(NotComInjective):
            invert_substitution(ws, ["a", "b"], AB)
        return
    alpha = invert_substitution(ws, ["a", "b"], AB)
    assert alpha.verify_roundtrip()


@settings(max_examples=30, deadline=None)
@given(small_words, small_words, small_words)
def test_wordsubst_compose(u, w, x):
    s = WordSubst({"a": u, "b": w})
    t = WordSubst({"a": x})
    composed = t.after(s, ["a", "b"])
    word = ("a", "b", "a")
    assert composed.apply_word(word) == t.apply_word(s.apply_word(word))
