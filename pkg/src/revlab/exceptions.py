"""Exception hierarchy shared by all revlab modules."""


class RevlabError(Exception):
    """Base class for errors raised by revlab."""


class DomainError(RevlabError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class SingularityError(RevlabError, ValueError):
    """Evaluation requested at (or too close to) a jump or log cusp."""


class AccuracyError(RevlabError, ValueError):
    """The requested evaluation cannot meet its accuracy guarantee."""


class ConvergenceError(RevlabError, RuntimeError):
    """An iterative solver failed to converge."""
