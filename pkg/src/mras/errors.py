"""Exception hierarchy shared by every stage of the synthesis pipeline."""


class MraError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MraError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column if column is not None else 0}: {message}"
        super().__init__(message)


class ParseError(ValidationError):
    pass


class UnknownAgent(MraError):
    pass


class NotExecutable(MraError):
    pass


class NotExecutableAtStep(NotExecutable):
    def __init__(self, step, agent, action):
        self.step = step
        self.agent = agent
        self.action = action
        super().__init__(f"action {action} of agent {agent} is not available at step {step}")


class HorizonTooShort(MraError):
    pass


class DeadlineExceedsHorizon(MraError):
    pass


class NotUnitSoft(MraError):
    pass


class TooLarge(MraError):
    pass


class SolverSpawnFailure(MraError):
    pass


class MalformedOutput(MraError):
    pass


class ModelViolatesHardClauses(MraError):
    pass


class InconsistentModel(MraError):
    pass


class NonUniform(MraError):
    pass


class PruneBrokeWinning(MraError):
    pass
