"""Exception types shared across the package."""


class TepsroError(Exception):
    """Base class for all package-specific errors."""


class ProfileIncomplete(TepsroError):
    """A behavioral profile is missing a required infoset distribution."""

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"profile missing {len(self.missing)} infoset(s): "
                         f"{self.missing[:5]}{'...' if len(self.missing) > 5 else ''}")


class ShapeError(TepsroError):
    """A distribution does not line up with an infoset's action set."""


class MissingPartialSolution(TepsroError):
    """A partial equilibrium freezes an infoset whose continuation is undefined."""


class TooLarge(TepsroError):
    """Input exceeds a configured node cap for an exponential/exact routine."""


class InfeasibleConfig(TepsroError):
    """A game configuration admits no valid instance."""


class IllegalAction(TepsroError):
    """An action not legal in the current simulator state."""


class DegenerateDistribution(TepsroError):
    """Renormalization would remove all probability mass."""


class UnknownPolicy(TepsroError):
    """A policy label is not present in the registry."""


class InvalidBudget(TepsroError):
    """A rollout/sample budget that cannot be split as required."""


class NoCandidates(TepsroError):
    """Softmax selection called with an empty candidate list."""


class InsufficientBudget(TepsroError):
    """Fewer simulation samples than new strategy profiles to cover."""


class EncodingError(TepsroError):
    """An infostate does not fit the documented encoding layout."""


class TrainingDiverged(TepsroError):
    """Loss became non-finite during Q-network training."""

    def __init__(self, step):
        self.step = step
        super().__init__(f"non-finite loss at training step {step}")


class NoLegalAction(TepsroError):
    """Action selection called with every action masked out."""


class InsufficientData(TepsroError):
    """A statistical routine received an empty or too-small group."""
