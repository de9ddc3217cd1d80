"""Exception types shared across the package."""


class StepgateError(Exception):
    """Base class for every error this package raises deliberately."""


# ---- project / store -------------------------------------------------------

class DuplicateStepName(StepgateError):
    pass


class EmptyCheckList(StepgateError):
    pass


class UnknownStep(StepgateError):
    pass


class GateViolation(StepgateError):
    """An earlier step in the order is not Passed."""


class StoreError(StepgateError):
    pass


class CorruptStore(StoreError):
    """Store layout or a record file is malformed; message names the file."""


class WatchedSourceMissing(StoreError):
    """A watched source path cannot be read when fingerprinting."""


# ---- metrics ---------------------------------------------------------------

class DuplicateMetric(StepgateError):
    pass


class UnknownMetric(StepgateError):
    pass


class NonFiniteMetric(StepgateError):
    """NaN or infinite metric value rejected at record time."""


class LengthMismatch(StepgateError):
    pass


class EmptyInput(StepgateError):
    pass


# ---- checks ----------------------------------------------------------------

class UnknownMetricInSpec(StepgateError):
    """A check references a metric absent from the project registry."""


# ---- recipe / backend ------------------------------------------------------

class MissingBaseline(StepgateError):
    pass


class EmptyDataset(StepgateError):
    pass


class ShapeMismatch(StepgateError):
    pass


class NonFiniteLoss(StepgateError):
    """Training loss became NaN or infinite; the run is aborted."""


class DuplicateLabel(StepgateError):
    pass
