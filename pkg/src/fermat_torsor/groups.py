"""Finitely generated abelian groups given by presentations, and maps between them.

A group is ``Z^n / colspan(R)``: the *columns* of the relation matrix ``R``
are the relators.  On construction every group is brought to Smith form
once, which fixes a canonical coordinate system

    canonical(x) = P @ x, reduced modulo the invariant factors,

together with a section ``Q`` sending canonical coordinates back to ambient
vectors.  Every subgroup or quotient is returned together with its inclusion
or projection map, presented diagonally.

When every generator is killed by a relator of the form ``c * e_i`` the
group is finite with exponent dividing ``lcm(c_i)``, and all further work
on it is carried out modulo that number.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from .errors import IllDefinedMapError, PreconditionError
from .snf import (
    as_int_matrix,
    identity,
    kernel_basis,
    kernel_mod,
    matmul,
    snf_reduce,
    solve,
    zeros,
)


def _lcm(values):
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def _detect_exponent(R):
    """lcm of the multiples of unit vectors among the relators, if they cover every row."""
    n, k = R.shape
    if n == 0:
        return 1
    if k == 0:
        return None
    nz = R != 0
    single = np.nonzero(nz.sum(axis=0) == 1)[0]
    if single.size == 0:
        return None
    row_of = np.argmax(nz[:, single], axis=0)
    per_row = [0] * n
    for col, row in zip(single, row_of):
        per_row[row] = math.gcd(per_row[row], abs(int(R[row, col])))
    if any(v == 0 for v in per_row):
        return None
    return _lcm(per_row)


def _diagonal_factors(R):
    """Factors if ``R`` is already a normalized diagonal presentation, else ``None``."""
    n, k = R.shape
    if k > n:
        return None
    if k == 0:
        return [0] * n
    head = R[:k, :k]
    diag = [int(head[i, i]) for i in range(k)]
    if any(d < 2 for d in diag):
        return None
    for a, b in zip(diag, diag[1:]):
        if b % a:
            return None
    check = R.copy()
    for i in range(k):
        check[i, i] = 0
    if check.any():
        return None
    return diag + [0] * (n - k)


class FgAbelianGroup:
    """The group ``Z^ambient_rank / colspan(relations)``.

    Instances are immutable; equality compares presentations.
    """

    def __init__(self, ambient_rank, relations=None):
        n = int(ambient_rank)
        if n < 0:
            raise PreconditionError("ambient rank must be non-negative")
        if relations is None:
            R = zeros(n, 0)
        else:
            R = as_int_matrix(relations, rows=n)
        R.setflags(write=False)
        self.ambient_rank = n
        self.relations = R
        self._normalize()

    # construction helpers

    @classmethod
    def from_factors(cls, factors):
        """``Z/d_1 + ... + Z/d_k``; a factor 0 means a copy of Z."""
        factors = [int(d) for d in factors]
        if any(d < 0 for d in factors):
            raise PreconditionError("cyclic factors must be non-negative")
        factors = [d for d in factors if d != 1]
        torsion = [d for d in factors if d]
        n = len(factors)
        R = zeros(n, len(torsion))
        for i, d in enumerate(torsion):
            R[i, i] = d
        return cls(n, R)

    @classmethod
    def cyclic(cls, n):
        return cls.from_factors([n])

    @classmethod
    def free(cls, rank):
        return cls(rank)

    @classmethod
    def trivial(cls):
        return cls(0)

    @classmethod
    def homogeneous(cls, modulus, rank):
        """``(Z/modulus)^rank``."""
        return cls(rank, identity(rank) * int(modulus))

    def _normalize(self):
        R = self.relations
        n = self.ambient_rank
        fast = _diagonal_factors(R)
        if fast is not None:
            self._factors = tuple(fast)
            self._P = None
            self._Q = None
            self._finalize()
            return
        e = _detect_exponent(R)
        if e is not None:
            if e == 1:
                self._factors = ()
                self._P = zeros(0, n)
                self._Q = zeros(n, 0)
                self._finalize()
                return
            Rm = R % e
            nz = np.nonzero(Rm.any(axis=0))[0]
            red = snf_reduce(Rm[:, nz], e, track_u=True, track_uinv=True)
            raw = [math.gcd(p, e) for p in red.diagonal] + [e] * (n - red.rank)
        else:
            red = snf_reduce(R, track_u=True, track_uinv=True)
            raw = list(red.diagonal) + [0] * (n - red.rank)
        keep = [i for i, d in enumerate(raw) if d != 1]
        self._factors = tuple(raw[i] for i in keep)
        self._P = red.U[keep, :]
        self._Q = red.Uinv[:, keep]
        self._finalize()

    def _finalize(self):
        f = self._factors
        self.is_finite = all(d != 0 for d in f)
        self.exponent = _lcm(f) if self.is_finite else 0
        if self.is_finite and self._P is not None and self.exponent > 1:
            self._P = self._P % self.exponent
            self._Q = self._Q % self.exponent

    # basic invariants

    @property
    def invariant_factors(self):
        return list(self._factors)

    @property
    def moduli(self):
        """Invariant factors as a tuple, one per canonical coordinate."""
        return self._factors

    @property
    def canonical_rank(self):
        return len(self._factors)

    @property
    def order(self):
        """Group order, or ``None`` when the group is infinite."""
        if not self.is_finite:
            return None
        return math.prod(self._factors)

    @property
    def free_rank(self):
        return sum(1 for d in self._factors if d == 0)

    def is_trivial(self):
        return not self._factors

    def to_canonical_matrix(self):
        """``P``: ambient coordinates to canonical coordinates (before reduction)."""
        if self._P is None:
            return identity(self.ambient_rank)[: self.canonical_rank]
        return self._P

    def from_canonical_matrix(self):
        """``Q``: canonical coordinates to ambient representatives."""
        if self._Q is None:
            return identity(self.ambient_rank)[:, : self.canonical_rank]
        return self._Q

    def reduce_canonical(self, Y):
        """Reduce a canonical-coordinate matrix (one column per element) row-wise, in place."""
        for i, d in enumerate(self._factors):
            if d:
                Y[i] = Y[i] % d
        return Y

    def canonical_columns(self, X):
        """Canonical coordinates of each column of an ambient matrix ``X``."""
        X = as_int_matrix(X, rows=self.ambient_rank)
        if self._P is None:
            Y = X[: self.canonical_rank].copy()
        else:
            Y = matmul(self._P, X, self.exponent if self.is_finite else None)
        return self.reduce_canonical(Y)

    def canonical(self, x):
        """Normal form of an ambient vector as a tuple of integers."""
        x = np.array([int(v) for v in x], dtype=object).reshape(-1, 1)
        if x.shape[0] != self.ambient_rank:
            raise PreconditionError(
                f"element has length {x.shape[0]}, group has ambient rank {self.ambient_rank}"
            )
        return tuple(int(v) for v in self.canonical_columns(x)[:, 0])

    def element(self, y):
        """Ambient representative of the canonical coordinates ``y``."""
        y = np.array([int(v) for v in y], dtype=object).reshape(-1, 1)
        x = matmul(self.from_canonical_matrix(), y, self.exponent if self.is_finite else None)
        return x[:, 0]

    def is_zero(self, x):
        return not any(self.canonical(x))

    def equal_elements(self, x, y):
        return self.canonical(x) == self.canonical(y)

    def element_order(self, x):
        """Order of an element; 0 for elements of infinite order."""
        y = self.canonical(x)
        out = 1
        for d, v in zip(self._factors, y):
            if d == 0:
                if v:
                    return 0
                continue
            out = _lcm([out, d // math.gcd(d, v)])
        return out

    def elements(self):
        """Iterate canonical coordinate tuples of every element (finite groups only)."""
        if not self.is_finite:
            raise PreconditionError("cannot enumerate an infinite group")
        return itertools.product(*(range(d) for d in self._factors))

    def generators(self):
        """Ambient representatives of the canonical generators."""
        Q = self.from_canonical_matrix()
        return [Q[:, i] for i in range(self.canonical_rank)]

    # comparisons and display

    def __eq__(self, other):
        if not isinstance(other, FgAbelianGroup):
            return NotImplemented
        return self.ambient_rank == other.ambient_rank and np.array_equal(
            self.relations, other.relations
        )

    def __hash__(self):
        return hash((self.ambient_rank, tuple(map(tuple, self.relations.tolist()))))

    def is_isomorphic(self, other):
        return self._factors == other._factors

    def describe(self):
        if not self._factors:
            return "0"
        return " + ".join("Z" if d == 0 else f"Z/{d}" for d in self._factors)

    def __repr__(self):
        return f"FgAbelianGroup({self.describe()})"

    # serialization

    def to_json(self):
        return {
            "ambient_rank": self.ambient_rank,
            "relations": [[int(v) for v in col] for col in self.relations.T],
        }

    @classmethod
    def from_json(cls, data):
        try:
            n = int(data["ambient_rank"])
            cols = data["relations"]
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed group JSON: {exc}") from exc
        if not isinstance(cols, list) or any(
            not isinstance(c, list) or len(c) != n for c in cols
        ):
            raise PreconditionError("malformed group JSON: each relation must have ambient_rank entries")
        R = as_int_matrix(cols, rows=len(cols), cols=n).T.copy() if cols else zeros(n, 0)
        return cls(n, R)


def direct_sum(*groups):
    """External direct sum; ambient coordinates are concatenated."""
    n = sum(G.ambient_rank for G in groups)
    k = sum(G.relations.shape[1] for G in groups)
    R = zeros(n, k)
    r0 = c0 = 0
    for G in groups:
        a, b = G.relations.shape
        R[r0 : r0 + a, c0 : c0 + b] = G.relations
        r0 += a
        c0 += b
    return FgAbelianGroup(n, R)


class Homomorphism:
    """A map of presented groups given by the images of the ambient generators.

    ``matrix`` has shape ``(codomain.ambient_rank, domain.ambient_rank)``.
    Well-definedness (relators go to relators) is checked unless ``check`` is
    false.
    """

    def __init__(self, domain, codomain, matrix, check=True):
        M = as_int_matrix(matrix, rows=codomain.ambient_rank, cols=domain.ambient_rank)
        M.setflags(write=False)
        self.domain = domain
        self.codomain = codomain
        self.matrix = M
        if check:
            self.check_well_defined()

    def _cod_modulus(self):
        return self.codomain.exponent if self.codomain.is_finite else None

    def check_well_defined(self):
        R = self.domain.relations
        if R.shape[1] == 0:
            return True
        images = matmul(self.matrix, R, self._cod_modulus())
        Y = self.codomain.canonical_columns(images)
        bad = np.nonzero(Y.any(axis=0))[0]
        if bad.size:
            j = int(bad[0])
            relator = [int(v) for v in R[:, j]]
            raise IllDefinedMapError(
                f"relator {j} {relator} maps to a nonzero element of the codomain",
                relator_index=j,
                relator=relator,
            )
        return True

    @cached_property
    def canonical(self):
        """Matrix of the map in canonical coordinates of domain and codomain."""
        G, H = self.domain, self.codomain
        X = matmul(self.matrix, G.from_canonical_matrix(), self._cod_modulus())
        return H.canonical_columns(X)

    def __call__(self, x):
        x = np.array([int(v) for v in x], dtype=object).reshape(-1, 1)
        return matmul(self.matrix, x, self._cod_modulus())[:, 0]

    def compose(self, inner):
        """``self o inner``."""
        if inner.codomain != self.domain:
            raise PreconditionError("cannot compose: codomain and domain differ")
        M = matmul(self.matrix, inner.matrix, self._cod_modulus())
        return Homomorphism(inner.domain, self.codomain, M, check=False)

    def __matmul__(self, inner):
        return self.compose(inner)

    def _same_ends(self, other):
        if self.domain != other.domain or self.codomain != other.codomain:
            raise PreconditionError("maps have different domain or codomain")

    def __add__(self, other):
        self._same_ends(other)
        return Homomorphism(self.domain, self.codomain, self.matrix + other.matrix, check=False)

    def __sub__(self, other):
        self._same_ends(other)
        return Homomorphism(self.domain, self.codomain, self.matrix - other.matrix, check=False)

    def __neg__(self):
        return Homomorphism(self.domain, self.codomain, -self.matrix, check=False)

    def scaled(self, k):
        return Homomorphism(self.domain, self.codomain, self.matrix * int(k), check=False)

    def is_zero(self):
        return not self.canonical.any()

    def equals(self, other):
        self._same_ends(other)
        return (self - other).is_zero()

    def is_injective(self):
        return kernel(self)[0].is_trivial()

    def is_surjective(self):
        return cokernel(self)[0].is_trivial()

    def power(self, k):
        if self.domain != self.codomain:
            raise PreconditionError("only endomorphisms have powers")
        result = identity_map(self.domain)
        base = self
        while k:
            if k & 1:
                result = result.compose(base)
            base = base.compose(base)
            k >>= 1
        return result

    def preimage(self, y):
        """Some ambient ``x`` with ``self(x) == y`` in the codomain, or ``None``."""
        G, H = self.domain, self.codomain
        yc = np.array(H.canonical(y), dtype=object)
        A = _lift_system(self.canonical, H)
        e = _lcm([G.exponent, H.exponent]) if (G.is_finite and H.is_finite) else None
        sol = solve(A, yc, e)
        if sol is None:
            return None
        z = sol[: G.canonical_rank]
        return G.element(z)

    def __repr__(self):
        return f"Homomorphism({self.domain.describe()} -> {self.codomain.describe()})"

    def to_json(self):
        return {
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
            "matrix": [[int(v) for v in row] for row in self.matrix],
        }

    @classmethod
    def from_json(cls, data, domain=None, codomain=None):
        try:
            G = domain if domain is not None else FgAbelianGroup.from_json(data["domain"])
            H = codomain if codomain is not None else FgAbelianGroup.from_json(data["codomain"])
            rows = data["matrix"]
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed homomorphism JSON: {exc}") from exc
        try:
            M = as_int_matrix(rows, rows=H.ambient_rank, cols=G.ambient_rank)
        except (ValueError, TypeError) as exc:
            raise PreconditionError(f"malformed homomorphism JSON: {exc}") from exc
        return cls(G, H, M)


def identity_map(G):
    return Homomorphism(G, G, identity(G.ambient_rank), check=False)


def zero_map(G, H):
    return Homomorphism(G, H, zeros(H.ambient_rank, G.ambient_rank), check=False)


def stacked(*maps):
    """``x -> (f_1 x, ..., f_k x)`` into the direct sum of the codomains."""
    G = maps[0].domain
    for f in maps:
        if f.domain != G:
            raise PreconditionError("stacked maps need a common domain")
    H = direct_sum(*(f.codomain for f in maps))
    M = np.concatenate([f.matrix for f in maps], axis=0)
    return Homomorphism(G, H, M, check=False)


def _torsion_relations(H):
    """Diagonal relation columns of ``H`` in its canonical coordinates."""
    torsion = [i for i, d in enumerate(H.moduli) if d]
    D = zeros(H.canonical_rank, len(torsion))
    for j, i in enumerate(torsion):
        D[i, j] = H.moduli[i]
    return D


def _lift_system(F, H):
    """``[F | -diag(d')]``: solutions project onto the lifted kernel or preimages."""
    return np.concatenate([F, -_torsion_relations(H)], axis=1)


def _relation_lattice(F, H, c, modulus):
    """Columns spanning ``{y in Z^c : F y in colspan(diag(d'))}`` (plus ``modulus * Z^c``)."""
    A = _lift_system(F, H)
    if modulus is not None:
        gens, _ = kernel_mod(A, modulus)
        return gens[:c]
    return kernel_basis(A)[:c]


def _subgroup(G, gens_c):
    """Subgroup of ``G`` generated by columns given in canonical coordinates."""
    gens_c = as_int_matrix(gens_c, rows=G.canonical_rank)
    t = gens_c.shape[1]
    e = G.exponent if G.is_finite else None
    gens_c = G.reduce_canonical(gens_c.copy())
    N = _relation_lattice(gens_c, G, t, e)
    if e is not None:
        N = np.concatenate([N, identity(t) * e], axis=1)
    T = FgAbelianGroup(t, N)
    S = FgAbelianGroup.from_factors(T.invariant_factors)
    incl_c = matmul(gens_c, T.from_canonical_matrix(), e)
    incl = matmul(G.from_canonical_matrix(), incl_c, e)
    return S, Homomorphism(S, G, incl)


def kernel(f):
    """Kernel of ``f`` with its inclusion into the domain."""
    G, H = f.domain, f.codomain
    e = _lcm([G.exponent, H.exponent]) if (G.is_finite and H.is_finite) else None
    L = _relation_lattice(f.canonical, H, G.canonical_rank, e)
    return _subgroup(G, L)


def image(f):
    """Image of ``f`` as a subgroup of the codomain, with its inclusion."""
    return _subgroup(f.codomain, f.canonical)


def cokernel(f, with_section=False):
    """Cokernel of ``f`` with the projection from the codomain.

    With ``with_section`` also returns a matrix whose columns are codomain
    lifts of the cokernel generators.
    """
    H = f.codomain
    T = FgAbelianGroup(
        H.canonical_rank, np.concatenate([_torsion_relations(H), f.canonical], axis=1)
    )
    C = FgAbelianGroup.from_factors(T.invariant_factors)
    e = H.exponent if H.is_finite else None
    proj = matmul(T.to_canonical_matrix(), H.to_canonical_matrix(), e)
    if not with_section:
        return C, Homomorphism(H, C, proj)
    section = matmul(H.from_canonical_matrix(), T.from_canonical_matrix(), e)
    return C, Homomorphism(H, C, proj), section


def factor_through(f, incl):
    """The map ``h`` with ``incl o h == f``; requires ``im f`` inside ``im incl``."""
    K = incl.domain
    cols = []
    for x in f.domain.generators():
        z = incl.preimage(f(x))
        if z is None:
            raise PreconditionError("map does not factor through the subgroup")
        cols.append(z)
    if cols:
        Mc = np.stack(cols, axis=1)
    else:
        Mc = zeros(K.ambient_rank, 0)
    e = K.exponent if K.is_finite else None
    return Homomorphism(f.domain, K, matmul(Mc, f.domain.to_canonical_matrix(), e))


def subgroup_generated(G, elements):
    """Subgroup generated by ambient elements, with its inclusion."""
    if elements:
        X = np.stack([np.array([int(v) for v in x], dtype=object) for x in elements], axis=1)
    else:
        X = zeros(G.ambient_rank, 0)
    return _subgroup(G, G.canonical_columns(X))


@dataclass
class ExactnessReport:
    """Outcome of an exactness test; truthy when exact."""

    exact: bool
    witness: list | None = None
    reason: str = ""

    def __bool__(self):
        return self.exact


def is_exact_at(f, g):
    """Whether ``im f == ker g`` inside ``f.codomain == g.domain``.

    On failure ``witness`` is an ambient element of the middle group lying in
    exactly one of the two subgroups.
    """
    if f.codomain != g.domain:
        raise PreconditionError("is_exact_at: codomain of f differs from domain of g")
    B = f.codomain
    for x in f.domain.generators():
        y = f(x)
        if not g.codomain.is_zero(g(y)):
            return ExactnessReport(False, [int(v) for v in y], "image element not in kernel")
    _, incl = kernel(g)
    for z in incl.domain.generators():
        y = incl(z)
        if f.preimage(y) is None:
            return ExactnessReport(False, [int(v) for v in y], "kernel element not in image")
    return ExactnessReport(True)
