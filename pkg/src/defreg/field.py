"""Finite fields F_p and F_{p^k} with dense integer element encoding.

Elements are plain integers in [0, q).  For prime fields the integer is
the residue itself.  For extension fields the integer encodes the
coefficient vector of the residue polynomial in little-endian base p:
the element with coefficients (c_0, ..., c_{k-1}) has index
c_0 + c_1*p + ... + c_{k-1}*p^(k-1).  Index 0 is the zero element and
index 1 the multiplicative identity, so enumeration starts 0, 1, ...

The reduction modulus for k > 1 is chosen deterministically: the monic
irreducible polynomial of degree k whose non-leading coefficient vector
has the least integer encoding.  Multiplication in extension fields goes
through exp/log tables built from a fixed generator, so a single field
instance has O(q) table memory, never O(q^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .errors import BudgetError, ConfigError, FieldError

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for all n below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in_range(lo: int, hi: int, congruence: tuple[int, int] | None = None) -> list[int]:
    """Ascending primes p with lo <= p <= hi, optionally with p = r (mod m).

    `congruence` is a (residue, modulus) pair, e.g. (1, 4) for p = 1 mod 4.
    """
    if lo > hi:
        raise ConfigError(f"empty range: lo={lo} > hi={hi}")
    out = []
    for n in range(max(lo, 2), hi + 1):
        if congruence is not None and n % congruence[1] != congruence[0] % congruence[1]:
            continue
        if is_prime(n):
            out.append(n)
    return out


# -- polynomial helpers over F_p, little-endian coefficient lists -----------

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    # m monic
    a = a[:]
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1]
        if c:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - c * mi) % p
        a.pop()
    return _ptrim(a)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    while b:
        # make b monic before reducing
        inv = pow(b[-1], p - 2, p)
        bm = [(c * inv) % p for c in b]
        a, b = b, _pmod(a, bm, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [(c * inv) % p for c in a]
    return a


def _ppowmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _psub_x(a: list[int], p: int) -> list[int]:
    """a(x) - x, reduced mod p."""
    out = a + [0] * (2 - len(a))
    out = [c % p for c in out]
    out[1] = (out[1] - 1) % p
    return _ptrim(out)


def is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Irreducibility of a monic polynomial over F_p.

    Checks absence of roots, then the Frobenius/gcd criterion:
    x^(p^k) = x mod f, and gcd(x^(p^(k/r)) - x, f) = 1 for each prime r | k.
    """
    f = list(coeffs)
    k = len(f) - 1
    if k < 1 or f[-1] != 1:
        return False
    if k == 1:
        return True
    for a in range(p):
        acc = 0
        for c in reversed(f):
            acc = (acc * a + c) % p
        if acc == 0:
            return False
    x = [0, 1]
    if _psub_x(_ppowmod(x, p**k, f, p), p):
        return False
    for r in _prime_factors(k):
        g = _pgcd(f, _psub_x(_ppowmod(x, p ** (k // r), f, p), p), p)
        if len(g) != 1:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A finite field F_{p^k}; immutable and safe to share across workers."""

    p: int
    k: int
    modulus: tuple[int, ...] | None  # little-endian, monic, length k+1; None for k == 1
    q: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q", self.p**self.k)

    # -- encoding ------------------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        """Coefficient vector (c_0, ..., c_{k-1}) of element index a."""
        self._check_element(a)
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def from_coeffs(self, cs) -> int:
        if len(cs) > self.k:
            raise FieldError(f"coefficient vector longer than degree {self.k}")
        a = 0
        for c in reversed(list(cs)):
            a = a * self.p + c % self.p
        return a

    def element_of_int(self, n: int) -> int:
        """Image of the integer literal n under the ring map Z -> F."""
        return n % self.p

    def elements(self) -> range:
        return range(self.q)

    def _check_element(self, a: int) -> None:
        if not (0 <= a < self.q):
            raise FieldError(f"{a} is not an element index of {self.descriptor()}")

    # -- arithmetic ------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        p = self.p
        out, mult = 0, 1
        for _ in range(self.k):
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        p = self.p
        out, mult = 0, 1
        for _ in range(self.k):
            out += (-a % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        log, exp = self._log_exp
        return exp[(log[a] + log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError(f"inversion of zero in {self.descriptor()}")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        log, exp = self._log_exp
        return exp[(self.q - 1 - log[a]) % (self.q - 1)]

    def pow_(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def _mul_poly(self, a: int, b: int) -> int:
        pa = _ptrim(list(self.coeffs(a)))
        pb = _ptrim(list(self.coeffs(b)))
        return self.from_coeffs(_pmod(_pmul(pa, pb, self.p), list(self.modulus), self.p) + [0] * self.k)

    @cached_property
    def _log_exp(self) -> tuple[list[int], list[int]]:
        # exp/log tables from the least generator of the multiplicative group
        q = self.q
        factors = _prime_factors(q - 1)
        g = None
        for cand in range(1, q):
            if all(self._pow_poly(cand, (q - 1) // r) != 1 for r in factors):
                g = cand
                break
        assert g is not None, "multiplicative group of a finite field is cyclic"
        exp = [1] * (q - 1)
        for i in range(1, q - 1):
            exp[i] = self._mul_poly(exp[i - 1], g)
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        return log, exp

    def _pow_poly(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_poly(r, a)
            a = self._mul_poly(a, a)
            e >>= 1
        return r

    # -- descriptors -----------------------------------------------------

    def descriptor(self) -> str:
        return str(self.p) if self.k == 1 else f"{self.p}^{self.k}"

    def __str__(self) -> str:
        return f"F_{self.descriptor()}"


def make_field(p: int, k: int = 1, max_cardinality: int = 2**20) -> FieldSpec:
    """Construct F_{p^k} with the deterministic least irreducible modulus.

    "Least" orders monic degree-k polynomials by the integer encoding of
    their non-leading coefficients, so e.g. F_8 gets x^3 + x + 1.
    """
    if k < 1:
        raise FieldError(f"degree must be >= 1, got {k}")
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if p**k > max_cardinality:
        raise BudgetError(f"field F_{p}^{k} has cardinality {p**k} beyond the cap {max_cardinality}")
    if k == 1:
        return FieldSpec(p=p, k=k, modulus=None)
    for enc in range(p**k):
        coeffs = []
        n = enc
        for _ in range(k):
            coeffs.append(n % p)
            n //= p
        coeffs.append(1)
        if is_irreducible(tuple(coeffs), p):
            return FieldSpec(p=p, k=k, modulus=tuple(coeffs))
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")  # unreachable


def parse_field_descriptor(text: str, max_cardinality: int = 2**20) -> FieldSpec:
    """Parse "p" or "p^k" into a field, e.g. "13" or "2^3"."""
    text = text.strip()
    try:
        if "^" in text:
            ps, ks = text.split("^", 1)
            return make_field(int(ps), int(ks), max_cardinality)
        return make_field(int(text), 1, max_cardinality)
    except ValueError as e:
        raise ConfigError(f"bad field descriptor {text!r}: {e}") from None
