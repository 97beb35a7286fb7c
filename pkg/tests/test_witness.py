import dataclasses
from fractions import Fraction

import pytest

from corpus import naive_equal, one_vertex, segment, theta
from gbsfix.autos import Sign
from gbsfix.errors import NoSuitableStableLetter, PreconditionViolated
from gbsfix.graph import bs_graph, derive_presentation
from gbsfix.words import GroupWord, word_equal
from gbsfix.witness import (
    FamilyKind,
    build_commutator_witness,
    build_integral_witness,
    build_unbounded_family,
    geometric_l,
    integral_prefix,
    solve_twist_parameter,
    twist_conditions,
    verify_witness,
    witness_for,
)


def closed_form_l(delta: Fraction, k: int) -> Fraction:
    return Fraction(k) if delta == 1 else (delta**k - 1) / (delta - 1)


@pytest.mark.parametrize("delta", [Fraction(2), Fraction(3), Fraction(-3), Fraction(1), Fraction(3, 2), Fraction(9, 2)])
def test_geometric_l_closed_form(delta):
    for k in range(10):
        assert geometric_l(delta, k) == closed_form_l(delta, k)


def test_integrality_scan_oracle():
    d = Fraction(3, 2)
    for i in range(1, 12):
        assert geometric_l(d, i) == Fraction(3**i - 2**i, 2 ** (i - 1))
    # N l_i integral for i <= m + 1 exactly when N = 2^m
    for m in range(6):
        assert integral_prefix(d, 2**m, 50) == m + 2


@pytest.mark.parametrize("p, q, depth", [(2, 4, 12), (3, 9, 8), (2, 2, 10), (2, -4, 8), (3, 6, 6)])
def test_integral_witness_verifies(p, q, depth):
    r = build_integral_witness(bs_graph(p, q))
    assert r.kind is FamilyKind.INTEGRAL_MODULUS and r.delta.denominator == 1
    rep = verify_witness(r, depth)
    assert rep.passed, rep
    assert rep.sign is Sign.PLUS
    assert [e.symbolic_l for e in rep.entries] == [closed_form_l(r.delta, k) for k in range(depth + 1)]
    assert rep.distinct_checked == depth * (depth + 1) // 2


def test_integral_witness_bs24_values():
    r = build_integral_witness(bs_graph(2, 4))
    assert (r.letter, r.orientation, r.delta) == ("t", 1, 2)
    assert r.describe() == f"t -> t x^{r.p}"
    # x^p t = t x^(2p)
    assert word_equal(r.x(r.p) * r.letter_word(), r.letter_word() * r.x(2 * r.p))


def test_integral_witness_scaled_N():
    r = build_integral_witness(bs_graph(2, 4), N=3)
    assert r.exponent == 3 * r.p
    assert verify_witness(r, 6).passed


def test_integral_witness_on_tree_paths():
    # the stable letter need not be a loop at the root
    g = theta(2, 4, 3, 3)
    r = build_integral_witness(g)
    assert verify_witness(r, 6).passed


@pytest.mark.parametrize("p, q", [(2, -2), (2, 3), (3, 2), (4, 9)])
def test_no_suitable_stable_letter(p, q):
    with pytest.raises(NoSuitableStableLetter):
        build_integral_witness(bs_graph(p, q))


def test_integral_preconditions():
    with pytest.raises(PreconditionViolated):
        build_integral_witness(segment(2, 3))
    with pytest.raises(PreconditionViolated):
        build_integral_witness(bs_graph(2, 4), N=0)


def test_depth_zero_report():
    rep = verify_witness(build_integral_witness(bs_graph(2, 4)), 0)
    assert rep.passed and len(rep.entries) == 1 and rep.distinct_checked == 0
    assert rep.entries[0].l == 0


def test_orientation_minus_one():
    # Delta = 1/2 forward, 2 backward: only t^-1 qualifies
    r = build_integral_witness(bs_graph(4, 2))
    assert r.orientation == -1 and r.delta == 2
    assert r.describe().startswith("t^-1 -> t^-1 x^")
    assert verify_witness(r, 8).passed


# --- non-integral modulus ---------------------------------------------------


def test_unbounded_family_bs23():
    g = bs_graph(2, 3)
    for R in range(2, 9):
        r = build_unbounded_family(g, R=R)
        assert r.N == 2 ** (R - 2) and r.prefix == R and r.prime == 2
        rep = verify_witness(r, R)
        assert rep.passed, rep


def test_unbounded_family_prefix_note():
    r = build_unbounded_family(bs_graph(2, 3), R=5)
    assert (r.N, r.prefix) == (8, 5)
    rep = verify_witness(r, 5)
    assert rep.passed
    assert any("l_5" in n and "not an integer" in n for n in rep.notes)
    assert all(e.divisible for e in rep.plateau) and len(rep.plateau) == 4
    # past the prefix nothing is claimed
    rep = verify_witness(r, 8)
    assert rep.passed and all(e.identity is None for e in rep.entries[6:])


def test_prefix_monotone_in_prime_multiples():
    # prime denominators: one more factor of q' buys one more ray vertex
    for delta, q in [(Fraction(3, 2), 2), (Fraction(9, 2), 2), (Fraction(5, 3), 3), (Fraction(-7, 5), 5)]:
        for N in (1, q, q**2, q**3):
            assert integral_prefix(delta, q * N, 100) >= integral_prefix(delta, N, 100) + 1


@pytest.mark.parametrize("a, b", [(-7, 6), (-7, 4), (5, 12)])
def test_composite_denominator_steps_by_the_denominator(a, b):
    d = Fraction(a, b)
    q = min(p for p in (2, 3) if b % p == 0)
    # a single q' never clears the denominator of l_2 = 1 + d
    assert integral_prefix(d, q, 100) == 2
    for N in (1, b, b**2, b**3):
        assert integral_prefix(d, b * N, 100) >= integral_prefix(d, N, 100) + 1
    r = build_unbounded_family(one_vertex({"t": (b, a)}), R=5)
    assert r.prefix >= 5 and r.prime == q
    assert verify_witness(r, 5).passed


def test_bs29_uses_powers_of_two():
    g = bs_graph(2, 9)
    for R in (2, 4, 6):
        r = build_unbounded_family(g, R=R)
        assert r.delta == Fraction(9, 2)
        n = r.N
        while n % 2 == 0:
            n //= 2
        assert n == 1
        assert verify_witness(r, R).passed


def test_unbounded_preconditions():
    with pytest.raises(PreconditionViolated):
        build_unbounded_family(bs_graph(2, 4))
    with pytest.raises(PreconditionViolated):
        build_unbounded_family(one_vertex({"s": (2, 3), "t": (2, 5)}))
    with pytest.raises(PreconditionViolated):
        build_unbounded_family(bs_graph(2, 3), R=0)


# --- commutator ------------------------------------------------------------

TWO_LOOPS = {"s": (2, 4), "t": (2, 6)}


def test_commutator_parameters():
    g = one_vertex(TWO_LOOPS)
    pres = derive_presentation(g)
    assert solve_twist_parameter(g, pres, "s", "t") == (12, 2)
    conds = twist_conditions(pres, "x", "s", "t", 12)
    assert conds and all(conds.values()) and len(conds) == 4
    for p in range(1, 12):
        c = twist_conditions(pres, "x", "s", "t", p)
        assert c is None or not all(c.values())


def test_commutator_witness_verifies():
    r = build_commutator_witness(one_vertex(TWO_LOOPS))
    assert (r.letter, r.partner, r.p, r.gamma) == ("t", "s", 12, 2)
    rep = verify_witness(r, 6)
    assert rep.passed and rep.sign is Sign.PLUS
    assert [e.symbolic_l for e in rep.entries] == list(range(7))


def test_commutator_against_naive_reducer():
    # phi(t) = t x^12 fixes [t,s]^k up to x^(2k)
    c = [("t", 1), ("s", 1), ("t", -1), ("s", -1)]
    phi_c = [("t", 1), ("x", 12), ("s", 1), ("x", -12), ("t", -1), ("s", -1)]
    for k in range(1, 4):
        assert naive_equal(phi_c * k, c * k + [("x", 2 * k)], TWO_LOOPS)
        assert not naive_equal(phi_c * k, c * k + [("x", 2 * k + 1)], TWO_LOOPS)


def test_commutator_preconditions():
    g = one_vertex({"s": (2, 2), "t": (2, 6)})
    with pytest.raises(PreconditionViolated):
        solve_twist_parameter(g, derive_presentation(g), "s", "t")
    with pytest.raises(PreconditionViolated):
        build_commutator_witness(bs_graph(2, 4))


# --- dispatch --------------------------------------------------------------


def test_witness_for_matches_classification():
    assert witness_for(bs_graph(2, -2)) is None
    assert witness_for(bs_graph(2, 3), rank=4).kind is FamilyKind.NON_INTEGRAL_MODULUS
    assert witness_for(bs_graph(2, 4)).kind is FamilyKind.INTEGRAL_MODULUS
    assert witness_for(one_vertex(TWO_LOOPS)).kind is FamilyKind.COMMUTATOR
    assert witness_for(one_vertex({"s": (2, 2), "t": (3, 3)})).kind is FamilyKind.INTEGRAL_MODULUS


def test_failed_automorphism_is_reported():
    # twisting by the far-end vertex breaks the relator of f
    r = build_integral_witness(theta(2, 4, 3, 3))
    rep = verify_witness(dataclasses.replace(r, vertex="v", p=1), 3)
    assert not rep.automorphism_ok and not rep.passed
    assert "does not map to the identity" in rep.notes[0]
    # the wrong exponent at the right vertex is an automorphism with a broken ray
    rep = verify_witness(dataclasses.replace(r, p=1), 3)
    assert rep.automorphism_ok and not rep.passed
