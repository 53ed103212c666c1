"""Cohomology of Z^2 with coefficients in a finite module with two commuting automorphisms.

The parameter torus (C*)^2 is a K(Z^2, 1), so its cohomology with a finite
local system is computed by the length-two complex

    M --d0--> M + M --d1--> M,
    d0(x)    = ((sigma - 1) x, (tau - 1) x),
    d1(x, y) = (tau - 1) x - (sigma - 1) y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, PreconditionError
from .groups import (
    FgAbelianGroup,
    Homomorphism,
    cokernel,
    factor_through,
    identity_map,
    kernel,
    stacked,
)


@dataclass(frozen=True)
class ModuleWithAction:
    module: FgAbelianGroup
    sigma: Homomorphism
    tau: Homomorphism

    def __post_init__(self):
        M = self.module
        if not M.is_finite:
            raise PreconditionError("module must be finite")
        for name, g in (("sigma", self.sigma), ("tau", self.tau)):
            if g.domain != M or g.codomain != M:
                raise PreconditionError(f"{name} is not an endomorphism of the module")
            if not g.is_injective():
                raise PreconditionError(f"{name} is not invertible")
        if not self.sigma.compose(self.tau).equals(self.tau.compose(self.sigma)):
            raise PreconditionError("sigma and tau do not commute")


@dataclass
class KoszulCohomology:
    h0: FgAbelianGroup
    h1: FgAbelianGroup
    h2: FgAbelianGroup
    d0: Homomorphism
    d1: Homomorphism

    def orders(self):
        return (self.h0.order, self.h1.order, self.h2.order)

    def to_json(self):
        return {
            "h0": [str(d) for d in self.h0.invariant_factors],
            "h1": [str(d) for d in self.h1.invariant_factors],
            "h2": [str(d) for d in self.h2.invariant_factors],
        }


def differentials(M):
    one = identity_map(M.module)
    s1 = M.sigma - one
    t1 = M.tau - one
    d0 = stacked(s1, t1)
    total = d0.codomain
    d1 = Homomorphism(total, M.module, np.concatenate([t1.matrix, -s1.matrix], axis=1))
    return d0, d1


def fixed_points(M):
    """H^0 with its inclusion into the module."""
    d0, _ = differentials(M)
    return kernel(d0)


def koszul_cohomology(M):
    """``(H^0, H^1, H^2)``; all higher groups vanish because the complex has length two."""
    d0, d1 = differentials(M)
    if not d1.compose(d0).is_zero():
        raise ConsistencyError("d1 o d0 is not zero")
    h0, _ = kernel(d0)
    z1, z1_incl = kernel(d1)
    # d0 lands in ker d1; rewrite it in the coordinates of ker d1.
    lift = factor_through(d0, z1_incl)
    h1, _ = cokernel(lift)
    h2, _ = cokernel(d1)
    return KoszulCohomology(h0=h0, h1=h1, h2=h2, d0=d0, d1=d1)


def euler_check(M, cohomology=None):
    """``|H^0| * |H^2| == |H^1|``."""
    H = koszul_cohomology(M) if cohomology is None else cohomology
    a, b, c = H.orders()
    return a * c == b


def trivial_action(G):
    one = identity_map(G)
    return ModuleWithAction(G, one, one)


def fermat_module(model):
    """The closed quotient of a Fermat model with its monodromy pair."""
    pair = model.monodromy
    return ModuleWithAction(model.closed_quotient, pair.sigma, pair.tau)


@dataclass
class LevelSweep:
    """Koszul cohomology orders of one Fermat module across coefficient levels."""

    m: int
    rows: list

    def monotone(self):
        """Per degree, whether orders never decrease along the sweep (reported, not asserted)."""
        out = {}
        for key in ("h0", "h1", "h2"):
            orders = [r[key].order for r in self.rows]
            out[key] = all(a <= b for a, b in zip(orders, orders[1:]))
        return out

    def to_json(self):
        return {
            "m": self.m,
            "levels": [
                {"m": self.m, "level": r["level"], **r["cohomology"].to_json()} for r in self.rows
            ],
            "monotone": self.monotone(),
        }


def level_sweep(m, levels):
    """Cohomology of the Fermat module with ``Z/n`` coefficients for each ``n`` in ``levels``."""
    from .fermat import build_model

    rows = []
    for n in levels:
        H = koszul_cohomology(fermat_module(build_model(m, n)))
        rows.append({"level": int(n), "h0": H.h0, "h1": H.h1, "h2": H.h2, "cohomology": H})
    return LevelSweep(int(m), rows)
