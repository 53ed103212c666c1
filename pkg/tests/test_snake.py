import json

import pytest

import oracles as O
from fermat_torsor.census import valuation
from fermat_torsor.errors import PreconditionError
from fermat_torsor.groups import Homomorphism, kernel
from fermat_torsor.snake import (
    LadderDiagram,
    fermat_brauer_ladder,
    ladder_from_json,
    ladder_to_json,
    snake,
    verify_ladder,
)


def _ladder(lad):
    A, B, C, A2, B2, C2 = lad["nodes"]
    return LadderDiagram(
        top_row=[O.hom(lad["f"], A, B), O.hom(lad["g"], B, C)],
        bottom_row=[O.hom(lad["f2"], A2, B2), O.hom(lad["g2"], B2, C2)],
        verticals=[O.hom(lad["a"], A, A2), O.hom(lad["b"], B, B2), O.hom(lad["c"], C, C2)],
    )


def _z2_z4_z2(vertical):
    f = O.hom([[2]], [2], [4])
    g = O.hom([[1]], [4], [2])
    verts = [O.hom([[vertical]], [n], [n]) for n in (2, 4, 2)]
    return LadderDiagram([f, g], [f, g], verts)


def test_identity_verticals_give_trivial_sequence():
    L = _z2_z4_z2(1)
    assert verify_ladder(L)
    seq = snake(L)
    assert all(G.is_trivial() for G in seq.groups)


def test_multiplication_by_two():
    seq = snake(_z2_z4_z2(2))
    assert [G.invariant_factors for G in seq.groups] == [[2]] * 6
    assert seq.is_exact()
    # exhaustive check on the 2, 4, 2 element groups
    lad = {"nodes": ([2], [4], [2], [2], [4], [2]), "f": [[2]], "g": [[1]], "f2": [[2]],
           "g2": [[1]], "a": [[0]], "b": [[2]], "c": [[0]]}
    assert O.chase(lad)["orders"] == [2] * 6


def test_sign_flipped_square_reported():
    f = O.hom([[3]], [3], [9])
    g = O.hom([[1]], [9], [3])
    flipped = O.hom([[-1]], [3], [3])
    L = LadderDiagram([f, g], [f, g], [O.hom([[1]], [3], [3]), O.hom([[1]], [9], [9]), flipped])
    rep = verify_ladder(L)
    assert not rep
    assert rep.kind == "square" and rep.index == 1
    assert rep.witness == [1]
    with pytest.raises(PreconditionError):
        snake(L)


def test_non_exact_row_reported():
    f = O.hom([[0]], [2], [4])
    g = O.hom([[1]], [4], [2])
    L = LadderDiagram([f, g], [f, g], [O.hom([[1]], [n], [n]) for n in (2, 4, 2)])
    rep = verify_ladder(L)
    assert not rep and rep.kind == "top-exactness"


def test_hypotheses_named():
    # top row not surjective on the right
    f = O.hom([[1]], [2], [2])
    g = O.hom([[0]], [2], [2])
    L = LadderDiagram([f, g], [f, g], [O.hom([[1]], [2], [2])] * 3)
    with pytest.raises(PreconditionError, match="surjective"):
        snake(L)
    # bottom row not injective on the left
    f2 = O.hom([[0]], [2], [2])
    g2 = O.hom([[1]], [2], [2])
    top_f, top_g = O.hom([[0]], [2], [2]), O.hom([[1]], [2], [2])
    L = LadderDiagram([top_f, top_g], [f2, g2], [O.hom([[0]], [2], [2]), O.hom([[1]], [2], [2]),
                                                 O.hom([[1]], [2], [2])])
    assert verify_ladder(L)
    with pytest.raises(PreconditionError, match="injective"):
        snake(L)
    with pytest.raises(PreconditionError, match="three columns"):
        snake(LadderDiagram([top_g], [g2], [O.hom([[1]], [2], [2])] * 2))


FIXTURES = [(3, 3, 2), (4, 2, 3), (6, 2, 2), (6, 3, 2), (3, 5, 1)]


@pytest.mark.parametrize("m,l,r", FIXTURES)
def test_fermat_fixture(m, l, r):
    L = fermat_brauer_ladder(m, l, r)
    assert verify_ladder(L)
    seq = snake(L)
    s = min(r, valuation(m, l))
    expected = [l**s] if s else []
    assert seq.term("ker_a").invariant_factors == expected
    assert seq.term("coker_a").is_trivial()
    assert seq.is_exact()


def test_fixture_aggregate_recovers_order_m():
    for m, primes in [(6, [2, 3]), (12, [2, 3]), (4, [2]), (9, [3])]:
        total = 1
        for l in primes:
            r = valuation(m, l) + 1
            total *= snake(fermat_brauer_ladder(m, l, r)).term("ker_a").order
        assert total == m


def test_fixture_same_level_variant():
    seq = snake(fermat_brauer_ladder(3, 3, 2, same_level=True))
    assert seq.term("ker_a").invariant_factors == [3]
    assert seq.term("coker_a").invariant_factors == [3]


def test_fixture_rejects_bad_input():
    with pytest.raises(PreconditionError):
        fermat_brauer_ladder(3, 4, 1)
    with pytest.raises(PreconditionError):
        fermat_brauer_ladder(3, 3, 0)


def test_witnesses_replay():
    L = fermat_brauer_ladder(4, 2, 3, same_level=True)
    seq = snake(L)
    f, g = L.top_row
    fp, _ = L.bottom_row
    b = L.verticals[1]
    for w in seq.witnesses:
        assert g.codomain.equal_elements(g(w["lift_in_B"]), w["in_C"])
        assert b.codomain.equal_elements(b(w["lift_in_B"]), w["down_in_Bprime"])
        assert fp.codomain.equal_elements(fp(w["pullback_in_Aprime"]), w["down_in_Bprime"])


def test_engine_matches_element_chase_on_random_ladders():
    nontrivial = 0
    for seed in range(200):
        lad = O.random_ladder(seed, max_order=64)
        L = _ladder(lad)
        assert verify_ladder(L)
        seq = snake(L)
        ref = O.chase(lad)
        assert all(ref["exact"])
        assert [G.order for G in seq.groups] == ref["orders"]
        assert kernel(seq.connecting)[0].order == ref["delta_kernel"]
        assert seq.is_exact()
        nontrivial += ref["delta_image"] > 1
    assert nontrivial > 0


def test_ladder_json_round_trip():
    L = fermat_brauer_ladder(6, 3, 2)
    data = json.loads(json.dumps(ladder_to_json(L)))
    L2 = ladder_from_json(data)
    assert L2.labels() == L.labels()
    a, b = snake(L), snake(L2)
    assert [G.invariant_factors for G in a.groups] == [G.invariant_factors for G in b.groups]


def test_ladder_json_inline_groups_and_errors():
    z2 = {"ambient_rank": 1, "relations": [[2]]}
    one = [[1]]
    data = {
        "top_row": [{"domain": z2, "codomain": z2, "matrix": [[0]]},
                    {"domain": z2, "codomain": z2, "matrix": one}],
        "bottom_row": [{"domain": z2, "codomain": z2, "matrix": one},
                       {"domain": z2, "codomain": z2, "matrix": [[0]]}],
        "verticals": [{"domain": z2, "codomain": z2, "matrix": [[0]]}] * 3,
    }
    L = ladder_from_json(data)
    assert isinstance(L.top_row[0], Homomorphism)
    with pytest.raises(PreconditionError):
        ladder_from_json({"nodes": {}, "top_row": [{"domain": "X", "codomain": "Y", "matrix": []}]})
    with pytest.raises(PreconditionError):
        ladder_from_json([1, 2])
