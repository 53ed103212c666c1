"""Element-level tools that never touch Smith normal form.

These back the brute-force oracles: a finite abelian group is recovered from
the multiset of its element orders, which determines it up to isomorphism.
"""

import itertools
import math
from collections import Counter


def prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n):
    return n >= 2 and prime_factors(n) == [n]


def valuation(n, p):
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def factors_from_orders(orders):
    """Invariant factors of a finite abelian group from the orders of all its elements.

    For each prime ``p`` the sizes ``|G[p^j]|`` give the number of cyclic
    ``p``-primary summands of order at least ``p^j``.

    >>> factors_from_orders([1, 2, 4, 4, 2, 2, 4, 4])  # Z/2 + Z/4
    [2, 4]
    """
    total = len(orders)
    counts = Counter(orders)
    primary = {}
    for p in prime_factors(total):
        sizes = [1]
        j = 1
        while sizes[-1] < p ** valuation(total, p):
            pj = p**j
            sizes.append(sum(c for o, c in counts.items() if pj % o == 0))
            j += 1
        at_least = [round(math.log(sizes[k] // sizes[k - 1], p)) for k in range(1, len(sizes))]
        exps = []
        for k, r in enumerate(at_least):
            nxt = at_least[k + 1] if k + 1 < len(at_least) else 0
            exps += [k + 1] * (r - nxt)
        primary[p] = sorted(exps, reverse=True)
    width = max((len(v) for v in primary.values()), default=0)
    factors = []
    for i in range(width):
        d = 1
        for p, exps in primary.items():
            if i < len(exps):
                d *= p ** exps[i]
        factors.append(d)
    return sorted(factors)


def cyclic_orders(factors):
    """Element orders of ``Z/d_1 + ... + Z/d_k``, by enumeration."""
    out = []
    for y in itertools.product(*(range(d) for d in factors)):
        o = 1
        for d, v in zip(factors, y):
            o = o * (d // math.gcd(d, v)) // math.gcd(o, d // math.gcd(d, v))
        out.append(o)
    return out
