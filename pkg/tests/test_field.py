import random

import pytest

from qspreads.errors import BudgetExceededError
from qspreads.field import (ZERO, ScalarField, build_tower, find_modulus,
                            is_prime, prime_power)


def test_modulus_selection_is_deterministic_and_known():
    assert find_modulus(2, 4) == (1, 1, 0, 0, 1)  # x^4 + x + 1
    t1 = build_tower(2, 1, 2, 4)
    t2 = build_tower(2, 1, 2, 4)
    assert t1.descriptor() == t2.descriptor()


@pytest.mark.parametrize("p,e,k,n,N", [
    (2, 1, 2, 4, 5),
    (2, 1, 1, 1, 1),
    (3, 1, 2, 4, 10),
    (2, 2, 1, 2, 5),   # q = 4
])
def test_build_tower_spread_count(p, e, k, n, N):
    t = build_tower(p, e, k, n)
    assert t.N == N


def test_build_tower_rejects_bad_input():
    with pytest.raises(ValueError):
        build_tower(4, 1, 1, 2)  # p not prime
    with pytest.raises(ValueError):
        build_tower(2, 1, 3, 4)  # k does not divide n
    with pytest.raises(BudgetExceededError):
        build_tower(2, 1, 1, 30)  # 2^30 over the table cap


def test_explicit_modulus_is_validated():
    t = build_tower(2, 1, 2, 4, modulus=(1, 1, 0, 0, 1))
    assert t.N == 5
    with pytest.raises(ValueError):
        build_tower(2, 1, 2, 4, modulus=(1, 0, 0, 0, 1))  # (x+1)^4, reducible
    with pytest.raises(ValueError):
        build_tower(2, 1, 2, 4, modulus=(1, 1, 1, 1, 1))  # irreducible, order 5


def test_multiplication_and_inverses():
    t = build_tower(2, 1, 2, 4)
    for a in range(t.m):
        assert t.mul(a, t.inv(a)) == t.one
    # (omega^5)^3 = 1 by repeated multiplication: omega^5 generates F_4^*
    x = 5
    acc = t.one
    for _ in range(3):
        acc = t.mul(acc, x)
    assert acc == t.one
    assert t.element_order(5) == 3
    assert t.element_order(t.omega) == 15


def test_characteristic_two_addition():
    t = build_tower(2, 1, 2, 4)
    for a in list(range(t.m)) + [ZERO]:
        assert t.add(a, a) == ZERO


@pytest.mark.parametrize("p,e,k,n", [(2, 1, 2, 4), (3, 1, 2, 4), (2, 2, 1, 2)])
def test_zech_addition_matches_coefficient_addition(p, e, k, n):
    # oracle: add F_p coefficient vectors digit-wise, then look the code up
    t = build_tower(p, e, k, n)
    els = [ZERO] + list(range(t.m))

    def code_of(a):
        return 0 if a == ZERO else t.exp[a]

    def from_code(c):
        return ZERO if c == 0 else t.log[c]

    for a in els:
        for b in els:
            ca, cb = code_of(a), code_of(b)
            cc = 0
            mult = 1
            for _ in range(t.degree):
                cc += ((ca % p + cb % p) % p) * mult
                ca //= p
                cb //= p
                mult *= p
            assert t.add(a, b) == from_code(cc)


def test_field_axioms_sampled():
    t = build_tower(3, 1, 2, 4)
    rng = random.Random(5)
    els = [ZERO] + list(range(t.m))
    for _ in range(300):
        a, b, c = rng.choice(els), rng.choice(els), rng.choice(els)
        assert t.add(a, b) == t.add(b, a)
        assert t.mul(a, b) == t.mul(b, a)
        assert t.add(t.add(a, b), c) == t.add(a, t.add(b, c))
        assert t.mul(t.mul(a, b), c) == t.mul(a, t.mul(b, c))
        assert t.mul(a, t.add(b, c)) == t.add(t.mul(a, b), t.mul(a, c))
        assert t.sub(t.add(a, b), b) == a


def test_subfield_generator_orders():
    t = build_tower(3, 1, 2, 4)
    theta = (t.N) % t.m
    assert t.element_order(theta) == t.qk - 1
    g = t.q_gen_log
    assert t.element_order(g) == t.q - 1


def test_coords_basics():
    t = build_tower(2, 1, 2, 4)
    assert t.coords_over_q(ZERO) == (0, 0, 0, 0)
    for j in range(t.n):
        vec = t.coords_over_q(j)
        assert vec == tuple(1 if i == j else 0 for i in range(t.n))


@pytest.mark.parametrize("p,e,k,n", [(2, 1, 2, 4), (3, 1, 2, 4), (2, 2, 1, 2)])
def test_coords_roundtrip_random(p, e, k, n):
    t = build_tower(p, e, k, n)
    rng = random.Random(17)
    for _ in range(1000):
        x = rng.choice([ZERO] + list(range(t.m)))
        assert t.element_from_coords(t.coords_over_q(x)) == x


def test_subfield_basis():
    t1 = build_tower(2, 1, 1, 2)
    assert t1.subfield_basis_qk() == [t1.one]
    t = build_tower(2, 1, 2, 4)
    basis = t.subfield_basis_qk()
    assert basis == [0, 5]
    # the q^k subfield elements are exactly the F_q-combinations of the basis
    span = set()
    for c0 in range(t.q):
        for c1 in range(t.q):
            x = t.add(t.mul(t.scalar_to_element(c0), basis[0]),
                      t.mul(t.scalar_to_element(c1), basis[1]))
            span.add(x)
    subfield = {ZERO} | set(t.subfield_qk_nonzero())
    assert span == subfield


def test_subfield_basis_is_independent():
    from qspreads.linalg import rref
    t = build_tower(3, 1, 2, 4)
    rows = [t.coords_over_q(b) for b in t.subfield_basis_qk()]
    _, rank = rref(t.scalar_field, rows)
    assert rank == t.k


def test_every_nonzero_power_closes():
    t = build_tower(3, 1, 2, 4)
    for a in range(t.m):
        assert t.pow(a, t.m) == t.one


def test_scalar_field_tables_are_fields():
    for q in (2, 3, 4, 5, 9):
        f = ScalarField.for_prime_power(q)
        for a in range(q):
            assert f.add(a, 0) == a
            assert f.mul(a, f.one) == a
            assert f.add(a, f.neg(a)) == 0
            if a:
                assert f.mul(a, f.inv(a)) == f.one
            for b in range(q):
                assert f.add(a, b) == f.add(b, a)
                assert f.mul(a, b) == f.mul(b, a)
                for c in range(q):
                    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


def test_tower_scalar_field_consistent_with_coords():
    # multiplying a basis vector by a scalar must scale its coordinates
    t = build_tower(2, 2, 1, 2)  # F_16 over F_4
    f = t.scalar_field
    for s in range(1, t.q):
        for i in range(t.n):
            x = t.mul(t.scalar_to_element(s), i % t.m)
            vec = t.coords_over_q(x)
            want = tuple(s if j == i else 0 for j in range(t.n))
            assert vec == want


def test_prime_power_helper():
    assert prime_power(8) == (2, 3)
    assert prime_power(9) == (3, 2)
    with pytest.raises(ValueError):
        prime_power(6)
    assert is_prime(2) and is_prime(13) and not is_prime(1)
