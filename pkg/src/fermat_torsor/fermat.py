"""First homology of the degree-m Fermat curve with Z/n coefficients.

Model.  The relative homology of the affine curve with respect to the
punctures is a free rank one module over (Z/n)[t0, t1]/(t0^m - 1, t1^m - 1);
an element sum a_ij t0^i t1^j is stored as the m x m matrix (a_ij), flattened
row-major (index ``i * m + j``).

* open subgroup: matrices whose rows and columns all sum to zero, i.e. the
  homology of the curve minus the points at infinity;
* boundary subgroup: zero-sum circulants a_0 I + a_1 J + ... + a_{m-1} J^{m-1};
* closed quotient: open / boundary, the homology of the projective curve.

``J`` is the cyclic shift with ``J[k, k+1] = 1`` (indices mod m), so that
``(J A)[i, j] = A[i+1, j]`` and ``(A J)[i, j] = A[i, j-1]``.  The two
commuting generators of the monodromy act by ``A -> J A`` and ``A -> A J``.

Open coordinates: the open subgroup is free over Z/n on the matrices
E_ij - E_{i,m-1} - E_{m-1,j} + E_{m-1,m-1} for i, j < m - 1, so an open
matrix is determined by its top-left (m-1) x (m-1) block.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .census import factors_from_orders
from .errors import BudgetExceededError, ConsistencyError, PreconditionError
from .groups import (
    FgAbelianGroup,
    Homomorphism,
    cokernel,
    identity_map,
    image,
    kernel,
    stacked,
)
from .snf import matmul

DEFAULT_BUDGET = 10**7


def shift_matrix(m):
    J = np.zeros((m, m), dtype=np.int64)
    for k in range(m):
        J[k, (k + 1) % m] = 1
    return J


def open_basis_matrix(m):
    """Columns are the flattened open basis matrices, indexed by (i, j) with i, j < m - 1."""
    k = m - 1
    B = np.zeros((m * m, k * k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            col = i * k + j
            B[i * m + j, col] += 1
            B[i * m + (m - 1), col] -= 1
            B[(m - 1) * m + j, col] -= 1
            B[(m - 1) * m + (m - 1), col] += 1
    return B


def open_coordinates(A):
    """Coordinates of an open matrix (or a stack of them) in the open basis."""
    A = np.asarray(A)
    m = A.shape[-1]
    return A[..., : m - 1, : m - 1].reshape(*A.shape[:-2], (m - 1) ** 2)


def circulant_generators(m):
    """``J^k - I`` for k = 1..m-1, as an array of shape (m - 1, m, m)."""
    J = shift_matrix(m)
    out = []
    P = np.eye(m, dtype=np.int64)
    for _ in range(1, m):
        P = P @ J
        out.append(P - np.eye(m, dtype=np.int64))
    return np.array(out, dtype=np.int64).reshape(m - 1, m, m)


def is_zero_sum_circulant(X, n):
    """Vectorized test over the trailing two axes: constant along diagonals, zero row sum."""
    X = np.asarray(X) % n
    rolled = np.roll(np.roll(X, -1, axis=-2), -1, axis=-1)
    circ = np.all(rolled == X, axis=(-2, -1))
    return circ & (X[..., 0, :].sum(axis=-1) % n == 0)


def has_zero_line_sums(X, n):
    X = np.asarray(X) % n
    return np.all(X.sum(axis=-1) % n == 0, axis=-1) & np.all(X.sum(axis=-2) % n == 0, axis=-1)


def _open_action_matrix(m, side, shift=None):
    """Matrix of ``A -> J A`` (side 'left') or ``A -> A J`` (side 'right') in open coordinates."""
    J = shift_matrix(m) if shift is None else shift
    k = m - 1
    basis = open_basis_matrix(m).T.reshape(k * k, m, m)
    moved = J @ basis if side == "left" else basis @ J
    return open_coordinates(moved).T


@dataclass(frozen=True)
class MonodromyPair:
    """The two commuting monodromy generators acting on the closed quotient."""

    sigma: Homomorphism
    tau: Homomorphism
    m: int

    def check(self):
        G = self.sigma.domain
        one = identity_map(G)
        if not self.sigma.power(self.m).equals(one):
            raise ConsistencyError("sigma^m is not the identity")
        if not self.tau.power(self.m).equals(one):
            raise ConsistencyError("tau^m is not the identity")
        if not self.sigma.compose(self.tau).equals(self.tau.compose(self.sigma)):
            raise ConsistencyError("sigma and tau do not commute")
        return True


class FermatHomologyModel:
    """H_1 of the degree-``m`` Fermat curve with ``Z/level`` coefficients, as presented groups.

    Use :func:`build_model` to construct.
    """

    def __init__(self, m, level):
        self.m = m
        self.level = n = level
        k = m - 1
        self.shift = shift_matrix(m)
        self.ambient = FgAbelianGroup.homogeneous(n, m * m)
        self.open_subgroup = FgAbelianGroup.homogeneous(n, k * k)
        self.open_inclusion = Homomorphism(self.open_subgroup, self.ambient, open_basis_matrix(m))
        circ = circulant_generators(m)
        gens = FgAbelianGroup.homogeneous(n, k)
        self.boundary_generators = gens
        to_ambient = Homomorphism(gens, self.ambient, circ.reshape(k, m * m).T)
        self.boundary_subgroup, self.boundary_inclusion = image(to_ambient)
        self.boundary_map = Homomorphism(gens, self.open_subgroup, open_coordinates(circ).T)
        self.closed_quotient, self.projection, self.section = cokernel(
            self.boundary_map, with_section=True
        )

    @property
    def genus(self):
        return (self.m - 1) * (self.m - 2) // 2

    def open_matrix(self, coords):
        """The m x m matrix of an element of the open subgroup."""
        x = self.open_inclusion(coords)
        return np.array([int(v) % self.level for v in x], dtype=np.int64).reshape(self.m, self.m)

    def descend(self, open_action):
        """Induced endomorphism of the closed quotient; checks the boundary is preserved."""
        n = self.level
        moved = matmul(open_action, self.boundary_map.matrix, n)
        if self.projection.compose(
            Homomorphism(self.boundary_generators, self.open_subgroup, moved, check=False)
        ).canonical.any():
            raise ConsistencyError("action does not preserve the boundary subgroup")
        M = matmul(matmul(self.projection.matrix, open_action, n), self.section, n)
        return Homomorphism(self.closed_quotient, self.closed_quotient, M)

    @cached_property
    def monodromy(self):
        return monodromy_generators(self)

    def to_json(self):
        inv = invariants_group(self)
        return {
            "m": self.m,
            "level": self.level,
            "open_order": str(self.open_subgroup.order),
            "boundary_order": str(self.boundary_subgroup.order),
            "quotient_factors": [str(d) for d in self.closed_quotient.invariant_factors],
            "invariants_factors": [str(d) for d in inv.invariant_factors],
        }


def build_model(m, level=None):
    """Build the matrix model for degree ``m`` (coefficients ``Z/level``, default ``Z/m``)."""
    if int(m) != m or m < 2:
        raise PreconditionError(f"degree must be an integer >= 2, got {m}")
    n = m if level is None else level
    if int(n) != n or n < 1:
        raise PreconditionError(f"coefficient level must be a positive integer, got {level}")
    return FermatHomologyModel(int(m), int(n))


def monodromy_generators(model, swap=False):
    """``sigma: A -> J A`` and ``tau: A -> A J`` on the closed quotient.

    ``swap=True`` exchanges the two roles.
    """
    left = model.descend(_open_action_matrix(model.m, "left"))
    right = model.descend(_open_action_matrix(model.m, "right"))
    if swap:
        left, right = right, left
    return MonodromyPair(sigma=left, tau=right, m=model.m)


def invariants_subgroup(model, pair=None):
    """Joint fixed points of the monodromy, with the inclusion into the closed quotient.

    Computed as the kernel of ``x -> ((sigma - 1) x, (tau - 1) x)``.
    """
    pair = model.monodromy if pair is None else pair
    one = identity_map(model.closed_quotient)
    return kernel(stacked(pair.sigma - one, pair.tau - one))


def invariants_group(model, pair=None):
    return invariants_subgroup(model, pair)[0]


def bruteforce_count(model):
    return model.level ** ((model.m - 1) * (model.m - 2))


def invariants_bruteforce(model, budget=DEFAULT_BUDGET):
    """Fixed subgroup by exhaustive scan of class representatives.

    Every class of open / boundary has exactly one open representative with
    zero first row (subtracting a zero-sum circulant clears row 0).  Each such
    matrix is tested directly: ``J A - A`` and ``A J - A`` must be zero-sum
    circulants.  The group structure is read off the element-order census.
    """
    m, n = model.m, model.level
    count = bruteforce_count(model)
    if count > budget:
        raise BudgetExceededError(count, budget)
    free = (m - 2) * (m - 1)
    J = shift_matrix(m)
    reps = _transversal(m, n)
    left = is_zero_sum_circulant(J @ reps - reps, n)
    right = is_zero_sum_circulant(reps @ J - reps, n)
    fixed = reps[left & right]
    orders = [_class_order(A, n) for A in fixed]
    if len(reps) != n**free:
        raise ConsistencyError("transversal has the wrong size")
    return FgAbelianGroup.from_factors(factors_from_orders(orders))


def _transversal(m, n):
    """All open matrices with first row zero, as an array (count, m, m)."""
    free = (m - 2) * (m - 1)
    if free == 0:
        return np.zeros((1, m, m), dtype=np.int64)
    grid = np.array(list(itertools.product(range(n), repeat=free)), dtype=np.int64)
    A = np.zeros((grid.shape[0], m, m), dtype=np.int64)
    A[:, 1 : m - 1, : m - 1] = grid.reshape(-1, m - 2, m - 1)
    A[:, :, m - 1] = (-A[:, :, : m - 1].sum(axis=2)) % n
    A[:, m - 1, :] = (-A[:, : m - 1, :].sum(axis=1)) % n
    return A % n


def _class_order(A, n):
    for k in range(1, n + 1):
        if is_zero_sum_circulant(k * A, n):
            return k
    raise ConsistencyError("class order exceeds the coefficient level")
