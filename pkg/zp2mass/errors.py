class ZpmError(Exception):
    pass


class InvalidModulusError(ZpmError):
    pass


class ShapeError(ZpmError):
    pass


class DomainError(ZpmError):
    pass


class PreconditionFailed(ZpmError):
    """A hypothesis of a lemma or theorem does not hold for the given input."""


class BudgetExceeded(ZpmError):
    def __init__(self, what: str, estimate: int, limit: int):
        super().__init__(f"{what}: estimated size {estimate} exceeds the configured limit {limit}")
        self.what = what
        self.estimate = estimate
        self.limit = limit


class InternalConsistencyError(ZpmError):
    """A proven identity failed to hold; this is a bug, never a user error."""
