"""Exception types shared across the engine."""


class TexterialError(Exception):
    """Base class for all engine errors."""


class BlankInput(TexterialError):
    pass


class UnknownBlock(TexterialError):
    pass


class Busy(TexterialError):
    """Target block or fern already has an in-flight model operation."""


class NoTarget(TexterialError):
    """Gesture geometry selected no words, lines or ferns."""


class NoCollision(TexterialError):
    """Dragged and target bounding boxes do not intersect."""


class DegenerateSplit(TexterialError):
    """Rip index would produce an empty piece."""


class MisalignedRange(TexterialError):
    """Marker range does not start and end on word boundaries."""


class EmptyCompletion(TexterialError):
    """Model response was blank after artifact stripping."""


class MissingSlot(TexterialError):
    pass


class UnknownTemplate(TexterialError):
    pass


class ProviderTimeout(TexterialError):
    pass


class ProviderError(TexterialError):
    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class ResponseValidationError(TexterialError):
    """Base for structured-output validation failures."""


class MalformedJson(ResponseValidationError):
    pass


class CardinalityViolation(ResponseValidationError):
    pass


class LengthViolation(ResponseValidationError):
    pass


class UnknownLeaf(TexterialError):
    pass


class UnknownFern(TexterialError):
    pass


class AlreadyPruned(TexterialError):
    pass


class InvalidState(TexterialError):
    """Leaf status does not admit the requested transition."""


class SameFern(TexterialError):
    pass


class TooFewLeaves(TexterialError):
    pass


class NothingToUndo(TexterialError):
    pass


class NothingToRedo(TexterialError):
    pass


class StaleOperation(TexterialError):
    """Completion arrived after an undo/redo invalidated its context."""


class CorruptFile(TexterialError):
    """Session file digest does not match its embedded state."""


class HashMismatch(TexterialError):
    def __init__(self, message: str, record_index: int):
        super().__init__(message)
        self.record_index = record_index


class TraceParseError(TexterialError):
    def __init__(self, message: str, line_number: int):
        super().__init__(message)
        self.line_number = line_number
