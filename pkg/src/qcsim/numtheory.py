"""Integer arithmetic for RSA and period finding.

Everything here works on Python integers, so there is no overflow and no
floating point. Continued fractions in particular are expanded from an exact
numerator/denominator pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError


def gcd(a: int, b: int) -> int:
    """Euclid's algorithm: ``(a, b) -> (b, a mod b)`` until ``b == 0``.

    >>> gcd(91, 65)
    13
    """
    if a < 1 or b < 1:
        raise DomainError("gcd needs positive integers")
    while b:
        a, b = b, a % b
    return a


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b)``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def mod_inverse(c: int, modulus: int) -> int:
    """``d`` in ``(0, modulus)`` with ``c*d ≡ 1``.

    >>> mod_inverse(11, 72)
    59
    """
    if modulus < 2:
        raise DomainError("modulus must be at least 2")
    g, s, _ = extended_gcd(c % modulus, modulus)
    if g != 1:
        raise DomainError(f"{c} has no inverse modulo {modulus}")
    return s % modulus


def mod_exp(a: int, x: int, n: int) -> int:
    """Square-and-multiply over the bits of ``x``.

    >>> mod_exp(4, 4, 91)
    74
    """
    if n < 2:
        raise DomainError("modulus must be at least 2")
    if x < 0:
        raise DomainError("exponent must be non-negative")
    result = 1
    base = a % n
    while x:
        if x & 1:
            result = result * base % n
        base = base * base % n
        x >>= 1
    return result


def classical_period(a: int, n: int) -> int:
    """Smallest ``r >= 1`` with ``a**r ≡ 1 (mod n)``, by brute force."""
    if n < 2 or gcd(a % n or n, n) != 1:
        raise DomainError(f"{a} is not coprime to {n}")
    value = a % n
    r = 1
    while value != 1:
        value = value * a % n
        r += 1
    return r


@dataclass(frozen=True)
class ContinuedFraction:
    coefficients: tuple
    convergents: tuple  # (numerator, denominator) pairs

    def value(self) -> Fraction:
        return Fraction(*self.convergents[-1])


def _evaluate(coeffs) -> tuple[int, int]:
    # Bottom-up: start from the last coefficient and fold upward.
    num, den = coeffs[-1], 1
    for c in reversed(coeffs[:-1]):
        num, den = c * num + den, num
    return num, den


def continued_fraction(num: int, den: int) -> ContinuedFraction:
    """Exact expansion of ``num/den`` with every convergent.

    >>> continued_fraction(5461, 16384).coefficients
    (0, 3, 5461)
    """
    if den < 1 or num < 0:
        raise DomainError("need den >= 1 and num >= 0")
    coeffs = []
    p, q = num, den
    while True:
        c, rem = divmod(p, q)
        coeffs.append(c)
        if rem == 0:
            break
        p, q = q, rem
    convs = tuple(_evaluate(coeffs[: i + 1]) for i in range(len(coeffs)))
    return ContinuedFraction(tuple(coeffs), convs)


def best_fraction_below(num: int, den: int, bound: int) -> tuple[int, int]:
    """Convergent of ``num/den`` with the largest denominator below ``bound``."""
    if bound < 2:
        raise DomainError("bound must be at least 2")
    best = (0, 1)
    for m, r in continued_fraction(num, den).convergents:
        if r < bound:
            best = (m, r)
        else:
            break
    return best


def is_prime(n: int) -> bool:
    """Deterministic trial division."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class RsaKey:
    p: int
    q: int
    c: int
    d: int

    @property
    def n(self) -> int:
        return self.p * self.q

    @property
    def phi(self) -> int:
        return (self.p - 1) * (self.q - 1)

    @classmethod
    def generate(cls, p: int, q: int, c: int) -> "RsaKey":
        if not (is_prime(p) and is_prime(q)):
            raise DomainError("p and q must be prime")
        if p == q:
            raise DomainError("p and q must differ")
        phi = (p - 1) * (q - 1)
        if c < 2 or extended_gcd(c, phi)[0] != 1:
            raise DomainError(f"public exponent {c} is not coprime to {phi}")
        return cls(p, q, c, mod_inverse(c, phi))

    def encode(self, message: int) -> int:
        return mod_exp(message, self.c, self.n)

    def decode(self, encoded: int) -> int:
        return mod_exp(encoded, self.d, self.n)


def rsa_demo(p: int, q: int, c: int, message: int) -> dict:
    """Round-trip ``message`` through the key built from ``(p, q, c)``.

    >>> rsa_demo(7, 13, 11, 51)
    {'d': 59, 'encoded': 25, 'decoded': 51}
    """
    key = RsaKey.generate(p, q, c)
    if not 0 <= message < key.n:
        raise DomainError(f"message must lie in [0, {key.n})")
    encoded = key.encode(message)
    return {"d": key.d, "encoded": encoded, "decoded": key.decode(encoded)}
