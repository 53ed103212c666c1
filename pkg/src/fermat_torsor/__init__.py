"""Exact finite computations behind the period of the Fermat family's Picard torsor."""

from .errors import (
    BudgetExceededError,
    ConsistencyError,
    FermatTorsorError,
    IllDefinedMapError,
    PreconditionError,
)
from .fermat import (
    FermatHomologyModel,
    MonodromyPair,
    build_model,
    invariants_bruteforce,
    invariants_group,
    monodromy_generators,
)
from .groups import (
    FgAbelianGroup,
    Homomorphism,
    cokernel,
    direct_sum,
    image,
    is_exact_at,
    kernel,
)
from .koszul import ModuleWithAction, euler_check, koszul_cohomology, level_sweep
from .period import PeriodCertificate, compute_period, period_table, verify_certificate
from .snake import LadderDiagram, SixTermSequence, fermat_brauer_ladder, snake, verify_ladder
from .snf import SmithDecomposition, smith_normal_form

__all__ = [
    "BudgetExceededError",
    "ConsistencyError",
    "FermatHomologyModel",
    "FermatTorsorError",
    "FgAbelianGroup",
    "Homomorphism",
    "IllDefinedMapError",
    "LadderDiagram",
    "ModuleWithAction",
    "MonodromyPair",
    "PeriodCertificate",
    "PreconditionError",
    "SixTermSequence",
    "SmithDecomposition",
    "build_model",
    "cokernel",
    "compute_period",
    "direct_sum",
    "euler_check",
    "fermat_brauer_ladder",
    "image",
    "invariants_bruteforce",
    "invariants_group",
    "is_exact_at",
    "kernel",
    "koszul_cohomology",
    "level_sweep",
    "monodromy_generators",
    "period_table",
    "smith_normal_form",
    "snake",
    "verify_certificate",
    "verify_ladder",
]
