import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermat_torsor.errors import ConsistencyError
from fermat_torsor.groups import FgAbelianGroup
from fermat_torsor.snf import (
    SmithDecomposition,
    as_int_matrix,
    integer_determinant,
    kernel_basis,
    kernel_mod,
    matmul,
    smith_normal_form,
    snf_reduce,
    solve,
)


def matrices(max_dim=5, bound=30):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(-bound, bound), min_size=c, max_size=c),
                min_size=r,
                max_size=r,
            )
        )
    )


def _det(rows):
    # Laplace expansion; independent of the elimination code.
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    return sum(
        (-1) ** j * rows[0][j] * _det([r[:j] + r[j + 1 :] for r in rows[1:]]) for j in range(n)
    )


def determinantal_divisors(A):
    """gcd of all k x k minors, k = 1..min(r, c)."""
    r, c = len(A), len(A[0])
    out = []
    for k in range(1, min(r, c) + 1):
        g = 0
        for rows in itertools.combinations(range(r), k):
            for cols in itertools.combinations(range(c), k):
                g = math.gcd(g, _det([[A[i][j] for j in cols] for i in rows]))
        out.append(g)
    return out


@settings(max_examples=500, deadline=None)
@given(matrices())
def test_snf_invariants_random(A):
    dec = smith_normal_form(A)
    dec.verify()
    d = dec.diagonal()
    # d_1 ... d_k equals the k-th determinantal divisor
    divisors = determinantal_divisors(A)
    prod = 1
    for k, dk in enumerate(divisors):
        prod *= d[k]
        assert prod == dk


def _random_unimodular(rng, n, steps=12):
    U = np.eye(n, dtype=object).astype(object)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        kind = rng.random()
        if n > 1 and kind < 0.6:
            U[i] += rng.randint(-3, 3) * U[j]
        elif n > 1 and kind < 0.8:
            U[[i, j]] = U[[j, i]]
        else:
            U[i] = -U[i]
    return U


def test_presentation_independence_200_pairs():
    rng = random.Random(2024)
    for _ in range(200):
        n, k = rng.randint(1, 5), rng.randint(0, 5)
        R = np.array([[rng.randint(-12, 12) for _ in range(k)] for _ in range(n)], dtype=object).reshape(n, k)
        U = _random_unimodular(rng, n)
        V = _random_unimodular(rng, k) if k else np.zeros((0, 0), dtype=object)
        R2 = matmul(matmul(U, R), V) if k else R
        assert abs(integer_determinant(U)) == 1
        G1, G2 = FgAbelianGroup(n, R), FgAbelianGroup(n, R2)
        assert G1.invariant_factors == G2.invariant_factors


def test_small_examples():
    assert smith_normal_form([[2, 0], [0, 3]]).diagonal() == [1, 6]
    assert smith_normal_form([[4, 0], [0, 6]]).invariant_factors() == [2, 12]
    assert smith_normal_form([[0, 0], [0, 0]]).invariant_factors() == [0, 0]
    assert smith_normal_form([[1, 2, 3]]).diagonal() == [1]


def test_verify_rejects_bad_decomposition():
    dec = smith_normal_form([[2, 4], [6, 8]])
    bad = SmithDecomposition(dec.U, dec.S * 2, dec.V, dec.source)
    with pytest.raises(ConsistencyError):
        bad.verify()


def test_big_entries_stay_exact():
    big = 10**30 + 7
    dec = smith_normal_form([[big, 0], [0, big * 3]])
    dec.verify()
    assert dec.diagonal() == [big, 3 * big]


@settings(max_examples=100, deadline=None)
@given(matrices(max_dim=5, bound=9))
def test_kernel_basis(A):
    A = as_int_matrix(A)
    K = kernel_basis(A)
    assert not matmul(A, K).any()
    # rank-nullity
    rank = sum(1 for d in smith_normal_form(A).diagonal() if d)
    assert K.shape[1] == A.shape[1] - rank


@settings(max_examples=100, deadline=None)
@given(matrices(max_dim=3, bound=11), st.sampled_from([2, 4, 6, 9, 12]))
def test_kernel_mod_counts(A, e):
    A = as_int_matrix(A)
    gens, orders = kernel_mod(A, e)
    assert not (matmul(A, gens) % e).any()
    c = A.shape[1]
    count = sum(
        1
        for x in itertools.product(range(e), repeat=c)
        if not (matmul(A, as_int_matrix([[v] for v in x])) % e).any()
    )
    assert math.prod(orders) == count


@settings(max_examples=100, deadline=None)
@given(matrices(max_dim=4, bound=9), st.data())
def test_solve_round_trip(A, data):
    A = as_int_matrix(A)
    x = as_int_matrix([[data.draw(st.integers(-5, 5))] for _ in range(A.shape[1])])
    b = matmul(A, x)[:, 0]
    sol = solve(A, b)
    assert sol is not None
    assert list(matmul(A, as_int_matrix([[v] for v in sol]))[:, 0]) == list(b)
    e = 7
    sol = solve(A, b % e, e)
    assert sol is not None
    assert list(matmul(A, as_int_matrix([[v] for v in sol]))[:, 0] % e) == list(b % e)


def test_solve_reports_no_solution():
    assert solve([[2, 0], [0, 2]], [1, 0]) is None
    assert solve([[2]], [1], 4) is None


def test_modular_reduction_matches_exact():
    rng = random.Random(5)
    for _ in range(50):
        e = rng.choice([6, 8, 30])
        A = [[rng.randint(0, e - 1) for _ in range(4)] for _ in range(5)]
        stacked = np.concatenate([as_int_matrix(A), np.eye(5, dtype=object) * e], axis=1)
        exact = [d for d in smith_normal_form(stacked).invariant_factors()]
        red = snf_reduce(as_int_matrix(A), modulus=e)
        mod = sorted(math.gcd(int(p), e) for p in red.diagonal)
        mod = [d for d in mod + [e] * (5 - len(mod)) if d != 1]
        assert sorted(exact) == sorted(mod)
