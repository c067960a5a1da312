"""Exception hierarchy shared by all reskit modules."""


class ReskitError(Exception):
    """Base class for every error raised by reskit."""


class InvalidArgument(ReskitError, ValueError):
    pass


class GenerationFailure(ReskitError):
    """A point generator could not reach its target count."""


class SingularEvaluation(ReskitError, ValueError):
    """A trial function was evaluated on its singularity."""


class InvalidConfiguration(ReskitError, ValueError):
    pass


class OversamplingViolation(InvalidConfiguration):
    """Fewer sampled rows than the enforced multiple of the trial dimension."""


class NotFound(ReskitError, KeyError):
    pass


class UnsupportedCertificate(ReskitError):
    """No explicit well-posedness constant is available for this data map."""


class SolverFailure(ReskitError):
    pass


class RankZeroFailure(SolverFailure):
    pass


class LPFailure(SolverFailure):
    pass


class IllConditionedGram(SolverFailure):
    pass


class DegenerateTrialSpace(SolverFailure):
    pass
