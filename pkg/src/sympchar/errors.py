class BoundExceededError(RuntimeError):
    """An enumeration would exceed its configured size limit."""


class GenerationShortfallError(RuntimeError):
    """A generating set closes to fewer elements than the order formula predicts."""

    def __init__(self, label, achieved, claimed):
        self.label = label
        self.achieved = achieved
        self.claimed = claimed
        super().__init__(
            f"generators for {label} close to a group of order {achieved}, "
            f"expected {claimed} (index {claimed / achieved:g})"
        )


class DegenerateFormError(ValueError):
    pass


class NotExtendableError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class SingularVectorError(ValueError):
    pass
