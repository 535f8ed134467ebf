"""Shared brute-force oracles kept deliberately independent of the
library's fast paths."""

import itertools
import math


def trial_division(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def naive_exp_sum(X, k) -> complex:
    """Plain python sum with unreduced phases (no mod before the angle)."""
    total = 0j
    for pt in X.points:
        t = sum(kv * nv for kv, nv in zip(k, pt.numerators))
        total += complex(
            math.cos(math.tau * t / pt.denominator),
            math.sin(math.tau * t / pt.denominator),
        )
    return total


def box_frequencies(halfwidth: int, d: int):
    return itertools.product(range(-halfwidth, halfwidth + 1), repeat=d)


def witness_classes(p: int, d: int):
    """For each vector b in [1, p-1]^d the set of scaled vectors
    (b_j c^j mod p) over c in Z_p^*; membership of a is exactly the
    witness-existence predicate."""
    classes = {}
    for b in itertools.product(range(1, p), repeat=d):
        cls = set()
        for c in range(1, p):
            cj = 1
            scaled = []
            for j in range(d):
                cj = cj * c % p
                scaled.append(b[j] * cj % p)
            cls.add(tuple(scaled))
        classes[b] = cls
    return classes
