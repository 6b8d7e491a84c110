"""Exception types shared across the engine."""


class CubeTutorError(Exception):
    """Base class for all engine errors."""


class BadLength(CubeTutorError):
    """Facelet string is not exactly 54 characters."""


class BadSymbol(CubeTutorError):
    """Facelet string contains a character outside WYGBRO."""


class BadColorCount(CubeTutorError):
    """Facelet string does not contain exactly nine of each color."""


class CenterConflict(CubeTutorError):
    """The six center stickers are not a permutation of the six colors."""


class IllegalState(CubeTutorError):
    """State fails the reachability (parity / orientation-sum) check."""


class NotOneMove(CubeTutorError):
    """No single move maps the previous state to the next one."""


class OpenAttempt(CubeTutorError):
    """Attempt is still open and cannot be graded."""


class PatternMismatch(CubeTutorError):
    """The (knowledge component, piece) pattern does not hold on the state."""


class BadLevel(CubeTutorError):
    """Hint level outside {1, 2, 3}."""


class NoActiveSkill(CubeTutorError):
    """Hint requested while no knowledge component is active."""


class UnsatisfiableContext(CubeTutorError):
    """No task can be generated for the requested component in this context."""


class SchemaError(CubeTutorError):
    """Protocol message failed validation."""


class EmptyLog(CubeTutorError):
    """Event log contains no events."""


class CorruptLog(CubeTutorError):
    """Event log is malformed; `seq` holds the first bad sequence number."""

    def __init__(self, seq, message="corrupt log"):
        super().__init__(f"{message} (seq {seq})")
        self.seq = seq
