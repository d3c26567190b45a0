"""Exception hierarchy shared by every stage of the toolchain."""


class GcslError(Exception):
    """Base class for all toolkit errors."""


class ParseError(GcslError):
    def __init__(self, message, line=None, column=None, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        where = f"{line}:{column}: " if line is not None else ""
        hint = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{hint}")


class ModelError(GcslError):
    """Semantic problem in a model document (unknown attribute, duplicate id...)."""


class OclError(GcslError):
    """Evaluation fault: unresolved name, type mismatch, division by zero."""


class TranslationError(GcslError):
    pass


class MonitorError(GcslError):
    pass


class TraceTooShort(MonitorError):
    def __init__(self, message, required=None, available=None):
        self.required = required
        self.available = available
        super().__init__(message)


class SimulationError(GcslError):
    pass


class SmcError(GcslError):
    def __init__(self, message, seed=None):
        self.seed = seed
        super().__init__(message if seed is None else f"{message} (run seed {seed})")
