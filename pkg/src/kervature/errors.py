"""Exception hierarchy shared by all modules."""


class KervatureError(Exception):
    """Base class for every error raised by this package."""


class DomainError(KervatureError, ValueError):
    """A point lies outside the domain of a kernel, or has the wrong dimension."""


class BranchError(KervatureError, ValueError):
    """A real power was requested of a kernel that vanishes along the evaluation path."""


class TruncationError(KervatureError, ValueError):
    """A truncated series cannot certify the requested accuracy."""


class UnsupportedError(KervatureError, ValueError):
    """The requested operation is not available for this node type."""


class SpecError(KervatureError, ValueError):
    """Malformed kernel, sample or suite specification."""


class GramEvaluationError(KervatureError):
    """Kernel evaluation failed while assembling a Gram matrix."""

    def __init__(self, i, j, cause):
        self.pair = (i, j)
        self.cause = cause
        super().__init__(f"kernel evaluation failed at sample pair ({i}, {j}): {cause}")


class UndeterminedSignError(KervatureError, ValueError):
    """The sign of a series tail is not known, so no exact verdict exists."""


class DegenerateError(KervatureError, ValueError):
    """A degenerate configuration: flat curvature, vanishing derivative, singular metric."""


class IllConditionedError(KervatureError, ValueError):
    """A Gram matrix of a submodule basis is too ill-conditioned to solve reliably."""


class HypothesisFailed(KervatureError):
    """A precondition of the checked implication fails on the sample."""


class ShapeError(KervatureError, ValueError):
    """Two kernels or matrices that must have the same shape do not."""
