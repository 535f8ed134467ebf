"""Deterministic primality, modular arithmetic, and Goldbach pair search.

Everything here is exact integer arithmetic; nothing is probabilistic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OutOfRangeError, ZeroInverseError

# Strong-pseudoprime witnesses proven complete for every n < 3.3e24
# (Sorenson/Webster), which comfortably covers the 2^63 contract.
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

#: Upper limit for goldbach_pairs; keeps the scan tractable.
GOLDBACH_LIMIT = 10**9

# Below this, goldbach_pairs sieves the full interval instead of testing
# candidates one by one.
_SIEVE_CUTOFF = 1 << 22


def is_prime(n: int) -> bool:
    """Deterministic primality test, exact for all 0 <= n < 2**63."""
    if n < 2:
        return False
    for p in _WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Prime(int):
    """An integer validated prime at construction time."""

    def __new__(cls, value: int) -> "Prime":
        v = int(value)
        if not is_prime(v):
            raise ValueError(f"{value} is not prime")
        return super().__new__(cls, v)

    def __repr__(self) -> str:
        return f"Prime({int(self)})"


@dataclass(frozen=True)
class GoldbachPair:
    """Primes p <= q with p + q = m for an even m >= 4."""

    p: Prime
    q: Prime
    m: int

    def __post_init__(self):
        if self.p + self.q != self.m:
            raise ValueError(f"{self.p} + {self.q} != {self.m}")
        if self.p > self.q:
            raise ValueError("expected p <= q")
        if self.m % 2 or self.m < 4:
            raise ValueError(f"{self.m} is not an even integer >= 4")


def mod_inv(a: int, p: int) -> int:
    """Multiplicative inverse of a modulo the prime p.

    Raises ZeroInverseError when a is divisible by p.
    """
    a %= p
    if a == 0:
        raise ZeroInverseError(f"0 has no inverse modulo {p}")
    return pow(a, -1, p)


def mod_pow(a: int, e: int, p: int) -> int:
    """a**e mod p by square-and-multiply; a**0 == 1."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    return pow(a, e, p)


def _sieve(limit: int) -> bytearray:
    """Byte flags up to and including limit; flags[i] == 1 iff i prime."""
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit**0.5) + 1):
        if flags[i]:
            start = i * i
            flags[start :: i] = bytearray(len(range(start, limit + 1, i)))
    return flags


def goldbach_pairs(m: int) -> list[GoldbachPair]:
    """All prime pairs (p, q), p <= q, with p + q = m, ascending in p.

    m must be even and within [4, GOLDBACH_LIMIT].
    """
    if m % 2 != 0:
        raise OutOfRangeError(f"m must be even, got {m}")
    if not 4 <= m <= GOLDBACH_LIMIT:
        raise OutOfRangeError(f"m must lie in [4, {GOLDBACH_LIMIT}], got {m}")
    pairs = []
    if m <= _SIEVE_CUTOFF:
        flags = _sieve(m)
        for p in range(2, m // 2 + 1):
            if flags[p] and flags[m - p]:
                pairs.append(GoldbachPair(Prime(p), Prime(m - p), m))
    else:
        if is_prime(m - 2):
            pairs.append(GoldbachPair(Prime(2), Prime(m - 2), m))
        for p in range(3, m // 2 + 1, 2):
            if is_prime(p) and is_prime(m - p):
                pairs.append(GoldbachPair(Prime(p), Prime(m - p), m))
    return pairs


def next_prime(n: int) -> Prime:
    """Smallest prime strictly greater than n."""
    c = max(n + 1, 2)
    if c == 2:
        return Prime(2)
    c |= 1  # skip to the next odd candidate
    while not is_prime(c):
        c += 2
    return Prime(c)
