"""Integer primality and factorization with an explicit effort cap.

Norm values coming out of the prime-enumeration pipeline must be turned
into rational primes.  Factorization is trial division followed by
Brent's cycle-finding variant of the rho method; when the configured
budget is exhausted the remaining cofactor is reported as such instead
of being guessed at.  Primality testing is deterministic Miller-Rabin
on the witness set valid below 3.3 * 10^24.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

DEFAULT_BUDGET = 2 ** 40


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    n += 1
    while not is_prime(n):
        n += 1
    return n


def primes_up_to(bound: int):
    """Ascending rational primes <= bound."""
    p = 2
    while p <= bound:
        yield p
        p = next_prime(p)


@dataclass
class IntFactors:
    """Factorization of |n| with the part the budget could not resolve."""

    sign: int
    factors: list = field(default_factory=list)  # (prime, exponent), ascending
    cofactor: int = 1                            # 1 when the factorization is complete

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    def value(self) -> int:
        v = self.sign * self.cofactor
        for p, e in self.factors:
            v *= p ** e
        return v

    def primes(self) -> list:
        return [p for p, _ in self.factors]


def _brent_rho(n: int, budget: int):
    """(factor, steps) for composite odd n; factor is None if the budget ran out."""
    if n % 2 == 0:
        return 2, 0
    seed = 1
    steps = 0
    while steps < budget:
        y, c, m = seed % n or 1, seed % n or 1, 128
        g, r, q = 1, 1, 1
        x = y
        ys = y
        while g == 1 and steps < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1 and steps < budget:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                    steps += 1
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1 and steps < budget:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
                steps += 1
        if 1 < g < n:
            return g, steps
        seed += 1
    return None, steps


def factor_integer(n: int, budget: int = DEFAULT_BUDGET) -> IntFactors:
    """Complete factorization of n != 0, honoring the effort budget.

    Trial division up to 10^6 first, then Brent rho on what is left;
    anything unresolved within `budget` arithmetic steps is returned in
    the cofactor field rather than reported as prime.
    """
    if n == 0:
        raise ValueError("cannot factor zero")
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = IntFactors(sign=sign)
    if n == 1:
        return out
    counts: dict = {}
    for p in (2, 3, 5):
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    d = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    w = 0
    while d * d <= n and d < 10 ** 6:
        while n % d == 0:
            counts[d] = counts.get(d, 0) + 1
            n //= d
        d += wheel[w]
        w = (w + 1) % 8
    stack = [n] if n > 1 else []
    spent = 0
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        g, used = _brent_rho(m, budget - spent)
        spent += used
        if g is None:
            out.cofactor *= m
            continue
        stack.append(g)
        stack.append(m // g)
    out.factors = sorted(counts.items())
    return out
