import itertools
import random

import pytest

from defreg.errors import BudgetError, FieldError
from defreg.field import is_irreducible, is_prime, make_field, parse_field_descriptor, primes_in_range


def test_make_prime_field():
    F = make_field(7, 1)
    assert (F.p, F.k, F.q, F.modulus) == (7, 1, 7, None)
    assert F.descriptor() == "7"


def brute_force_irreducible(coeffs, p):
    # product over all factor degrees 1..deg-1 of all monic candidates
    deg = len(coeffs) - 1
    for d in range(1, deg):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail) + [1]
            # long division of coeffs by divisor over F_p
            rem = list(coeffs)
            while len(rem) - 1 >= d and any(rem):
                lead = rem[-1]
                shift = len(rem) - 1 - d
                for i, c in enumerate(divisor):
                    rem[shift + i] = (rem[shift + i] - lead * c) % p
                while rem and rem[-1] == 0:
                    rem.pop()
            if not rem:
                return False
    return True


def test_f8_modulus_is_least_irreducible_cubic():
    # derive independently: enumerate monic cubics over F_2 in ascending
    # integer encoding and take the first irreducible one
    expected = None
    for enc in range(8):
        coeffs = (enc & 1, (enc >> 1) & 1, (enc >> 2) & 1, 1)
        if brute_force_irreducible(coeffs, 2):
            expected = coeffs
            break
    assert expected == (1, 1, 0, 1)  # x^3 + x + 1
    F8 = make_field(2, 3)
    assert F8.modulus == expected
    assert F8.q == 8


def test_irreducibility_check_agrees_with_brute_force():
    for p, deg in ((2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)):
        for enc in range(p**deg):
            coeffs = []
            n = enc
            for _ in range(deg):
                coeffs.append(n % p)
                n //= p
            coeffs.append(1)
            assert is_irreducible(tuple(coeffs), p) == brute_force_irreducible(coeffs, p), coeffs


def test_nonprime_rejected():
    with pytest.raises(FieldError):
        make_field(4, 1)
    with pytest.raises(FieldError):
        make_field(1, 1)


def test_cardinality_budget():
    with pytest.raises(BudgetError):
        make_field(2, 3, max_cardinality=4)


def test_mul_and_inv_against_hand_oracle():
    F7 = make_field(7)
    assert F7.mul(3, 5) == 15 % 7 == 1
    # exhaust multiples of 3 mod 7 to find the inverse
    inv3 = next(a for a in range(1, 7) if (3 * a) % 7 == 1)
    assert inv3 == 5
    assert F7.inv(3) == 5
    with pytest.raises(FieldError):
        F7.inv(0)


@pytest.mark.parametrize("p,k", [(7, 1), (2, 3), (3, 2), (5, 2), (2, 4)])
def test_field_axioms_exhaustive_small(p, k):
    F = make_field(p, k)
    els = list(F.elements())
    assert len(set(els)) == F.q
    assert els[0] == 0 and els[1] == 1
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        assert F.mul(a, 1) == a
        assert F.add(a, 0) == a
        if a != 0:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow_(a, F.q - 1) == 1
    for a, b in itertools.product(els, els):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
    for a, b, c in itertools.product(els, els, els):
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


def test_field_axioms_random_above_64():
    F = make_field(11, 2)  # q = 121
    rng = random.Random(0)
    for _ in range(300):
        a, b, c = (rng.randrange(F.q) for _ in range(3))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(a, b) == F.mul(b, a)
        if a != 0:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow_(a, F.q - 1) == 1


def test_coeff_encoding_roundtrip():
    F9 = make_field(3, 2)
    for a in F9.elements():
        assert F9.from_coeffs(F9.coeffs(a)) == a
    assert F9.coeffs(0) == (0, 0)
    assert F9.coeffs(1) == (1, 0)


def test_primes_in_range_examples():
    assert primes_in_range(10, 20) == [11, 13, 17, 19]
    assert primes_in_range(10, 30, (1, 4)) == [13, 17, 29]
    assert primes_in_range(24, 28) == []


def test_is_prime_basics():
    assert [n for n in range(2, 40) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
    assert not is_prime(1) and not is_prime(0)
    assert is_prime(2**31 - 1)


def test_parse_field_descriptor():
    assert parse_field_descriptor("13").q == 13
    assert parse_field_descriptor("2^3").q == 8
    from defreg.errors import ConfigError
    with pytest.raises(ConfigError):
        parse_field_descriptor("abc")
