"""Ladder diagrams of finite abelian groups and the snake lemma.

A ladder has two rows of composable maps and one vertical map per column::

    T0 --top[0]--> T1 --top[1]--> T2
    |v0            |v1            |v2
    B0 --bot[0]--> B1 --bot[1]--> B2

For a three-column ladder with ``top[1]`` surjective and ``bot[0]``
injective, :func:`snake` produces the exact sequence

    ker v0 -> ker v1 -> ker v2 -> coker v0 -> coker v1 -> coker v2

whose connecting map is built by the explicit chase: lift along ``top[1]``,
push down ``v1``, pull back along ``bot[0]``.  Every chosen lift is kept as
a witness so the result can be replayed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .census import is_prime, valuation
from .errors import ConsistencyError, PreconditionError
from .groups import (
    FgAbelianGroup,
    Homomorphism,
    cokernel,
    factor_through,
    is_exact_at,
    kernel,
)
from .snf import identity, matmul


def _vec(x):
    return [int(v) for v in x]


@dataclass
class LadderDiagram:
    top_row: list
    bottom_row: list
    verticals: list
    top_labels: list | None = None
    bottom_labels: list | None = None

    @property
    def top_nodes(self):
        return [f.domain for f in self.top_row] + [self.top_row[-1].codomain]

    @property
    def bottom_nodes(self):
        return [f.domain for f in self.bottom_row] + [self.bottom_row[-1].codomain]

    def labels(self):
        k = len(self.verticals)
        top = self.top_labels or [f"T{i}" for i in range(k)]
        bottom = self.bottom_labels or [f"B{i}" for i in range(k)]
        return top, bottom


@dataclass
class LadderReport:
    valid: bool
    kind: str = ""
    index: int | None = None
    witness: list | None = None
    message: str = ""

    def __bool__(self):
        return self.valid

    def to_json(self):
        return {
            "valid": self.valid,
            "kind": self.kind,
            "index": self.index,
            "witness": self.witness,
            "message": self.message,
        }


def verify_ladder(L):
    """Check alignment, exactness of both rows at interior nodes, and commuting squares.

    Returns the first problem found, with a witness element where one exists.
    """
    if not L.top_row or len(L.top_row) != len(L.bottom_row):
        return LadderReport(False, "shape", message="rows must be non-empty and of equal length")
    if len(L.verticals) != len(L.top_row) + 1:
        return LadderReport(False, "shape", message="need one vertical map per column")
    for name, row in (("top", L.top_row), ("bottom", L.bottom_row)):
        for i in range(len(row) - 1):
            if row[i].codomain != row[i + 1].domain:
                return LadderReport(False, "alignment", i + 1, message=f"{name} row maps do not compose at node {i + 1}")
    tops, bottoms = L.top_nodes, L.bottom_nodes
    for i, v in enumerate(L.verticals):
        if v.domain != tops[i] or v.codomain != bottoms[i]:
            return LadderReport(False, "alignment", i, message=f"vertical {i} does not join the nodes of column {i}")
    for name, row in (("top", L.top_row), ("bottom", L.bottom_row)):
        for i in range(len(row) - 1):
            rep = is_exact_at(row[i], row[i + 1])
            if not rep:
                return LadderReport(
                    False, f"{name}-exactness", i + 1, rep.witness,
                    f"{name} row not exact at node {i + 1}: {rep.reason}",
                )
    for i in range(len(L.top_row)):
        right = L.verticals[i + 1].compose(L.top_row[i])
        left = L.bottom_row[i].compose(L.verticals[i])
        H = right.codomain
        for x in right.domain.generators():
            if not H.equal_elements(right(x), left(x)):
                return LadderReport(False, "square", i, _vec(x), f"square {i} does not commute")
    return LadderReport(True, message="rows exact, squares commute")


@dataclass
class SixTermSequence:
    """``ker_a -> ker_b -> ker_c -> coker_a -> coker_b -> coker_c`` with all structure maps."""

    groups: list
    maps: list
    inclusions: list
    projections: list
    witnesses: list = field(default_factory=list)
    exactness: list = field(default_factory=list)
    left_injective: bool | None = None
    right_surjective: bool | None = None

    NAMES = ("ker_a", "ker_b", "ker_c", "coker_a", "coker_b", "coker_c")

    @property
    def connecting(self):
        return self.maps[2]

    def is_exact(self):
        return all(self.exactness)

    def term(self, name):
        return self.groups[self.NAMES.index(name)]

    def to_json(self):
        return {
            "terms": [
                {"name": n, "factors": [str(d) for d in G.invariant_factors], "group": G.to_json()}
                for n, G in zip(self.NAMES, self.groups)
            ],
            "maps": [
                {
                    "from": self.NAMES[i],
                    "to": self.NAMES[i + 1],
                    "matrix": [[int(v) for v in row] for row in f.matrix],
                }
                for i, f in enumerate(self.maps)
            ],
            "connecting_witnesses": self.witnesses,
            "exact": [bool(r) for r in self.exactness],
            "left_injective": self.left_injective,
            "right_surjective": self.right_surjective,
        }


def snake(L):
    """Six-term exact sequence of a three-column ladder."""
    rep = verify_ladder(L)
    if not rep:
        raise PreconditionError(f"ladder is not valid: {rep.message}")
    if len(L.verticals) != 3:
        raise PreconditionError("snake lemma needs exactly three columns")
    f, g = L.top_row
    fp, gp = L.bottom_row
    a, b, c = L.verticals
    if not g.is_surjective():
        raise PreconditionError("hypothesis failed: top row is not surjective on the right")
    if not fp.is_injective():
        raise PreconditionError("hypothesis failed: bottom row is not injective on the left")

    ka, ia = kernel(a)
    kb, ib = kernel(b)
    kc, ic = kernel(c)
    ca, pa, sa = cokernel(a, with_section=True)
    cb, pb, sb = cokernel(b, with_section=True)
    cc, pc, _ = cokernel(c, with_section=True)

    k_ab = factor_through(f.compose(ia), ib)
    k_bc = factor_through(g.compose(ib), ic)

    witnesses = []
    cols = []
    for idx, z in enumerate(kc.generators()):
        zc = ic(z)
        y = g.preimage(zc)
        if y is None:
            raise ConsistencyError("surjective map has no preimage")
        w = b(y)
        x = fp.preimage(w)
        if x is None:
            raise ConsistencyError("chase left the image of the bottom-left map")
        value = pa(x)
        cols.append(value)
        witnesses.append(
            {
                "generator": idx,
                "in_C": _vec(zc),
                "lift_in_B": _vec(y),
                "down_in_Bprime": _vec(w),
                "pullback_in_Aprime": _vec(x),
                "value_in_coker_a": list(ca.canonical(value)),
            }
        )
    if cols:
        D = np.stack(cols, axis=1)
    else:
        D = np.zeros((ca.ambient_rank, 0), dtype=object)
    e = ca.exponent if ca.is_finite else None
    delta = Homomorphism(kc, ca, matmul(D, kc.to_canonical_matrix(), e))

    c_ab = Homomorphism(ca, cb, matmul(matmul(pb.matrix, fp.matrix), sa, cb.exponent or None))
    c_bc = Homomorphism(cb, cc, matmul(matmul(pc.matrix, gp.matrix), sb, cc.exponent or None))

    maps = [k_ab, k_bc, delta, c_ab, c_bc]
    exactness = [is_exact_at(maps[i], maps[i + 1]) for i in range(4)]
    seq = SixTermSequence(
        groups=[ka, kb, kc, ca, cb, cc],
        maps=maps,
        inclusions=[ia, ib, ic],
        projections=[pa, pb, pc],
        witnesses=witnesses,
        exactness=exactness,
        left_injective=f.is_injective() and k_ab.is_injective(),
        right_surjective=gp.is_surjective() and c_bc.is_surjective(),
    )
    if not seq.is_exact():
        raise ConsistencyError("snake sequence is not exact")
    return seq


# The comparison ladder for the Brauer pullback, truncated at Z/l^r.

_IOTA = [[0, -1, 1], [1, 0, -1]]


def fermat_brauer_ladder(m, l, r, same_level=False):
    """Finite-level truncation of the Brauer comparison ladder for degree ``m``.

    Both rows are ``0 -> ker -> (Z/l^k)^3 -> ...`` where the right map sends
    the i-th generator to f_{i+1} - f_{i-1}, written in the coordinates of
    f_0, f_1.  The top right node is ``(Z/l^r)^2``; the bottom right node has
    four coordinates, the first two receiving the Gysin image and the last two
    hit by nothing.

    Multiplication by ``m`` on the ``l^r``-torsion of a divisible group lands
    in its ``l^(r - s)``-torsion, ``s = min(r, v_l(m))``, so by default the
    bottom row lives at level ``l^(r - s)`` and the verticals are
    ``x -> (m / l^s) x``.  With ``same_level`` both rows use ``Z/l^r`` and the
    verticals are literal multiplication by ``m``.
    """
    if int(m) != m or m < 1:
        raise PreconditionError(f"degree must be a positive integer, got {m}")
    if not is_prime(int(l)):
        raise PreconditionError(f"l must be prime, got {l}")
    if int(r) != r or r < 1:
        raise PreconditionError(f"level exponent r must be >= 1, got {r}")
    m, l, r = int(m), int(l), int(r)
    s = min(r, valuation(m, l))
    top_mod = l**r
    if same_level:
        bottom_mod, unit = top_mod, m
    else:
        bottom_mod, unit = l ** (r - s), m // l**s

    B = FgAbelianGroup.homogeneous(top_mod, 3)
    C = FgAbelianGroup.homogeneous(top_mod, 2)
    g = Homomorphism(B, C, _IOTA)
    A, f = kernel(g)

    Bp = FgAbelianGroup.homogeneous(bottom_mod, 3)
    Cp = FgAbelianGroup.homogeneous(bottom_mod, 4)
    gp = Homomorphism(Bp, Cp, _IOTA + [[0, 0, 0], [0, 0, 0]])
    Ap, fp = kernel(gp)

    b = Homomorphism(B, Bp, identity(3) * unit)
    c = Homomorphism(C, Cp, [[unit, 0], [0, unit], [0, 0], [0, 0]])
    a = factor_through(b.compose(f), fp)
    return LadderDiagram(
        top_row=[f, g],
        bottom_row=[fp, gp],
        verticals=[a, b, c],
        top_labels=["Br(U)", "H1(L)^3", "H3(P2-P)"],
        bottom_labels=["Br(X_U)", "H1(D)^3", "H3(X-EuF)"],
    )


# JSON

def ladder_to_json(L):
    top, bottom = L.labels()
    nodes = {}
    for lab, G in zip(top, L.top_nodes):
        nodes[lab] = G.to_json()
    for lab, G in zip(bottom, L.bottom_nodes):
        nodes[lab] = G.to_json()

    def row(maps, labs_from, labs_to):
        return [
            {"domain": labs_from[i], "codomain": labs_to[i], "matrix": [[int(v) for v in r] for r in f.matrix]}
            for i, f in enumerate(maps)
        ]

    return {
        "nodes": nodes,
        "top_row": row(L.top_row, top[:-1], top[1:]),
        "bottom_row": row(L.bottom_row, bottom[:-1], bottom[1:]),
        "verticals": row(L.verticals, top, bottom),
    }


def ladder_from_json(data):
    """Parse the ladder format; ``domain``/``codomain`` are node labels or inline groups."""
    if not isinstance(data, dict):
        raise PreconditionError("malformed ladder JSON: top level must be an object")
    raw_nodes = data.get("nodes", {})
    if not isinstance(raw_nodes, dict):
        raise PreconditionError("malformed ladder JSON: 'nodes' must be an object")
    nodes = {k: FgAbelianGroup.from_json(v) for k, v in raw_nodes.items()}

    def resolve(ref):
        if isinstance(ref, str):
            if ref not in nodes:
                raise PreconditionError(f"malformed ladder JSON: unknown node {ref!r}")
            return nodes[ref], ref
        return FgAbelianGroup.from_json(ref), None

    def parse_row(key):
        entries = data.get(key)
        if not isinstance(entries, list):
            raise PreconditionError(f"malformed ladder JSON: {key!r} must be a list")
        maps, froms, tos = [], [], []
        for entry in entries:
            if not isinstance(entry, dict):
                raise PreconditionError(f"malformed ladder JSON: entries of {key!r} must be objects")
            G, gl = resolve(entry.get("domain"))
            H, hl = resolve(entry.get("codomain"))
            maps.append(Homomorphism.from_json(entry, domain=G, codomain=H))
            froms.append(gl)
            tos.append(hl)
        return maps, froms, tos

    top, tf, tt = parse_row("top_row")
    bottom, bf, bt = parse_row("bottom_row")
    verticals, _, _ = parse_row("verticals")
    top_labels = tf + tt[-1:] if top and all(tf + tt[-1:]) else None
    bottom_labels = bf + bt[-1:] if bottom and all(bf + bt[-1:]) else None
    return LadderDiagram(top, bottom, verticals, top_labels, bottom_labels)
