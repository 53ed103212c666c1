"""Exception hierarchy shared by every engine.

The CLI maps each class onto a distinct exit status.
"""


class FermatTorsorError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class PreconditionError(FermatTorsorError, ValueError):
    """An input violates the documented precondition of an operation."""

    exit_code = 3


class IllDefinedMapError(PreconditionError):
    """A matrix does not send the domain relations into the codomain relations."""

    def __init__(self, message, relator_index=None, relator=None):
        super().__init__(message)
        self.relator_index = relator_index
        self.relator = relator


class BudgetExceededError(FermatTorsorError):
    """An exhaustive enumeration would visit more items than allowed."""

    exit_code = 4

    def __init__(self, required, budget):
        super().__init__(
            f"enumeration needs {required} items but the budget is {budget}"
        )
        self.required = required
        self.budget = budget


class ConsistencyError(FermatTorsorError, AssertionError):
    """An internal invariant failed. Always a bug."""

    exit_code = 5
