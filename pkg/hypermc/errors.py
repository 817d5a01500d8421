"""Domain errors raised by the hypermc library code."""

from typing import Optional


class HyperMCError(Exception):
    """Root of every error raised by hypermc."""


class FormulaSyntaxError(HyperMCError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class EmptyContextError(FormulaSyntaxError):
    pass


class FragmentError(HyperMCError):
    pass


class NotSentenceError(HyperMCError):
    pass


class FreeVariableError(HyperMCError):
    pass


class NotWellNamedError(HyperMCError):
    pass


class UnknownAgentError(HyperMCError):
    pass


class KripkeFormatError(HyperMCError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class NotTotalError(KripkeFormatError):
    def __init__(self, state: str):
        self.state = state
        super().__init__(f"state {state!r} has no outgoing edge")


class DuplicateStateError(KripkeFormatError):
    def __init__(self, state: str):
        self.state = state
        super().__init__(f"state {state!r} declared twice")


class UnknownStateError(KripkeFormatError):
    def __init__(self, state: str):
        self.state = state
        super().__init__(f"unknown state {state!r}")


class HaaValidationError(HyperMCError):
    def __init__(self, requirement: str, detail: str = ""):
        self.requirement = requirement
        super().__init__(f"{requirement}: {detail}" if detail else requirement)


class ResourceLimitError(HyperMCError):
    def __init__(self, stage: str, limit: int):
        self.stage = stage
        self.limit = limit
        super().__init__(f"resource limit reached in {stage}: more than {limit} states")


class CrosscheckError(HyperMCError):
    pass
