"""Quadratic fields: discriminants, splitting, form class groups, units,
residue-ring counts, biquadratic bookkeeping."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tamagawa.errors import BudgetExceededError
from tamagawa.exactcore import factor_poly_mod_p, kronecker_symbol, primes_up_to
from tamagawa.quadfield import (
    BiquadField,
    QuadField,
    class_group,
    compose_forms,
    fundamental_unit,
    is_fundamental_discriminant,
    norm_one_unit,
    principal_form,
    reduce_form,
    reduced_forms,
    residue_ring_norm_count,
    splitting_type,
)

FUNDAMENTAL = [-3, -4, -7, -8, -11, -15, -19, -20, -23, -47, -84, 5, 8, 12, 13, 17, 21]


def test_fundamental_discriminants():
    for D in FUNDAMENTAL:
        assert is_fundamental_discriminant(D)
    for D in (0, 1, -1, -2, 3, 4, -9, -12, -16, 9, 25, -18):
        assert not is_fundamental_discriminant(D)


def test_quadfield_construction():
    k = QuadField.from_d(-1)
    assert k.D == -4 and k.is_imaginary
    assert QuadField.from_d(5).D == 5
    assert QuadField.from_d(-3).D == -3
    assert QuadField.from_d(2).D == 8
    with pytest.raises(ValueError):
        QuadField(4, 16)  # not squarefree
    assert QuadField.from_d(-5).ramified_primes() == (2, 5)
    assert QuadField.from_d(-3).ramified_primes() == (3,)


def test_norm_form():
    k = QuadField.from_d(-1)  # w = -2 + i, N(a + bw) = a^2 - 4ab + 5b^2
    assert k.norm(1, 0) == 1
    assert k.norm(2, 1) == 1  # 2 + w = i
    assert k.norm(0, 1) == 5
    k3 = QuadField.from_d(-3)
    assert k3.norm(1, 1) == 1  # a sixth root of unity


def test_splitting_type_matches_kronecker_and_factorization():
    for d in (-1, -2, -3, -5, -7, 2, 5, 13):
        k = QuadField.from_d(d)
        for p in primes_up_to(50):
            s = splitting_type(k, p)
            chi = kronecker_symbol(k.D, p)
            if chi == 1:
                assert (s.kind, s.e, s.f) == ("split", (1, 1), (1, 1))
            elif chi == -1:
                assert (s.kind, s.e, s.f) == ("inert", (1,), (2,))
            else:
                assert (s.kind, s.e, s.f) == ("ramified", (2,), (1,))
            assert sum(a * b for a, b in zip(s.e, s.f)) == 2  # efg = n
            # cross-route: factorization shape of the minimal polynomial
            if p % 2 == 1 and k.D % p != 0:
                _, factors = factor_poly_mod_p(k.minpoly_omega(), p)
                degs = sorted(len(f) - 1 for f, _ in factors)
                assert degs == ([1, 1] if chi == 1 else [2])


# ---------------------------------------------------------------------------
# class groups

KNOWN_H = {-3: 1, -4: 1, -7: 1, -8: 1, -11: 1, -15: 2, -19: 1, -20: 2,
           -23: 3, -47: 5, -84: 4}


def test_reduced_form_counts():
    for D, h in KNOWN_H.items():
        forms = reduced_forms(D)
        assert len(forms) == h, (D, forms)
        assert principal_form(D) in forms
        for (a, b, c) in forms:
            assert b * b - 4 * a * c == D
            assert -a < b <= a <= c
            if a == c or b == a:
                assert b >= 0


def test_class_group_structure():
    assert class_group(-4).invariants.factors == ()
    assert class_group(-23).invariants.factors == (3,)
    assert class_group(-20).invariants.factors == (2,)
    assert class_group(-84).invariants.factors == (2, 2)
    assert class_group(-47).invariants.factors == (5,)
    assert class_group(-84).invariants.order == 4


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([-23, -47, -84, -20]), st.data())
def test_composition_group_axioms(D, data):
    forms = reduced_forms(D)
    f = data.draw(st.sampled_from(forms))
    g = data.draw(st.sampled_from(forms))
    prod = compose_forms(f, g, D)
    assert prod in forms  # closure, already reduced
    assert compose_forms(g, f, D) == prod  # commutative
    assert compose_forms(f, principal_form(D), D) == f  # identity
    # inverse: (a, -b, c) reduced composes to the principal form
    a, b, c = f
    inv = reduce_form((a, -b, c), D)
    assert compose_forms(f, inv, D) == principal_form(D)


def test_reduce_form_examples():
    assert reduce_form((2, -1, 3), -23) == (2, -1, 3)  # already reduced
    assert reduce_form((3, 5, 4), -23) == (2, 1, 3)
    assert reduce_form((3, 7, 5), -11) == (1, 1, 3)
    with pytest.raises(ValueError):
        reduce_form((1, 5, 6), -23)  # discriminant mismatch


# ---------------------------------------------------------------------------
# units

KNOWN_UNITS = {5: (1, 1), 8: (2, 1), 12: (4, 1), 13: (3, 1), 17: (8, 2),
               21: (5, 1), 24: (10, 2), 28: (16, 3), 29: (5, 1), 44: (20, 3)}


def test_fundamental_unit_halves():
    for D, (hx, hy) in KNOWN_UNITS.items():
        u = fundamental_unit(D)
        assert (u.hx, u.hy) == (hx, hy), (D, u)
        assert u.norm in (1, -1)
        # the unit really is a unit: N = (hx^2 - D hy^2)/4
        assert (u.hx * u.hx - D * u.hy * u.hy) // 4 == u.norm
        assert u.regulator == pytest.approx(math.log((hx + hy * math.sqrt(D)) / 2))


def test_fundamental_unit_minimality_exhaustive():
    # no unit strictly between 1 and the claimed fundamental one
    for D in (5, 8, 12, 13, 17, 21):
        u = fundamental_unit(D)
        val = (u.hx + u.hy * math.sqrt(D)) / 2
        for hx in range(-60, 61):
            for hy in range(-60, 61):
                if (hx - hy * D) % 2:
                    continue
                if abs(hx * hx - D * hy * hy) != 4:
                    continue
                emb = (hx + hy * math.sqrt(D)) / 2
                assert not (1.0 + 1e-9 < emb < val - 1e-9), (D, hx, hy)


def test_norm_one_unit():
    for D in (5, 8, 12, 13, 17):
        u = norm_one_unit(D)
        assert u.norm == 1
        assert (u.hx + u.hy * math.sqrt(D)) / 2 > 1
    # D=5: fundamental unit has norm -1, so the norm-one generator is its square
    assert (norm_one_unit(5).hx, norm_one_unit(5).hy) == (3, 1)
    # D=12: fundamental unit already has norm 1
    assert (norm_one_unit(12).hx, norm_one_unit(12).hy) == (4, 1)


# ---------------------------------------------------------------------------
# residue-ring norm counts


def test_residue_ring_norm_count_frozen():
    k = QuadField.from_d(-1)
    assert residue_ring_norm_count(k, 3, 1, 1) == 4
    assert residue_ring_norm_count(k, 5, 1, 1) == 4
    assert residue_ring_norm_count(k, 5, 2, 1) == 20


def test_residue_ring_norm_count_brute():
    # direct double loop oracle at small moduli
    for d, p, k, t in ((-1, 3, 2, 1), (-3, 5, 1, 2), (5, 3, 2, 1), (-7, 3, 1, 1)):
        field = QuadField.from_d(d)
        q = p**k
        want = sum(
            1 for a in range(q) for b in range(q)
            if field.norm(a, b) % q == t % q and field.norm(a, b) % p != 0
        )
        assert residue_ring_norm_count(field, p, k, t) == want


def test_residue_count_unit_condition():
    # a norm divisible by p is never a unit target
    k = QuadField.from_d(-1)
    assert residue_ring_norm_count(k, 5, 2, 5) == 0
    with pytest.raises(BudgetExceededError):
        residue_ring_norm_count(k, 97, 4, 1, budget=10**6)


def test_residue_count_group_size():
    # totals over all unit targets = #(O/p^k)^x for split p
    k = QuadField.from_d(-1)
    p, lvl = 5, 1
    total = sum(residue_ring_norm_count(k, p, lvl, t) for t in range(1, p))
    assert total == (p - 1) ** 2  # split: (Z/5)^x x (Z/5)^x


# ---------------------------------------------------------------------------
# biquadratic fields


def test_biquad_construction():
    b = BiquadField.from_pair(13, 17)
    assert b.subfield_discs == (13, 17, 221)
    assert b.ramified_primes() == (13, 17)
    b2 = BiquadField.from_pair(2, 3)
    assert b2.subfield_discs == (8, 12, 24)
    assert b2.ramified_primes() == (2, 3)
    with pytest.raises(ValueError):
        BiquadField.from_pair(2, 2)
    with pytest.raises(ValueError):
        BiquadField.from_pair(4, 3)


def test_biquad_chi():
    b = BiquadField.from_pair(13, 17)
    # chi_i(p) multiplicativity across the three quadratic subfields (1-based)
    for p in (3, 5, 7, 11, 23, 29):
        assert b.chi(3, p) == b.chi(1, p) * b.chi(2, p)
