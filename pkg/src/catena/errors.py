"""Exception hierarchy. Every error names the offending file, id or value."""


class CatenaError(Exception):
    pass


class TimeMLParseError(CatenaError):
    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


class DanglingReferenceError(CatenaError):
    """A link or query names an id that does not resolve."""

    def __init__(self, ident: str, where: str = ""):
        super().__init__(f"unresolved id {ident!r}" + (f" in {where}" if where else ""))
        self.ident = ident


class InvariantError(CatenaError):
    pass


class AlignmentError(CatenaError):
    pass


class ValueFormatError(CatenaError):
    def __init__(self, raw: str, message: str | None = None):
        super().__init__(message or f"unrecognised TIMEX3 value {raw!r}")
        self.raw = raw


class NotAnchorableError(CatenaError):
    pass


class ConsistencyRequiredError(CatenaError):
    pass


class AnnotationMissingError(CatenaError):
    pass


class EmptyTrainingError(CatenaError):
    pass


class DegenerateTrainingError(CatenaError):
    pass


class ShapeError(CatenaError):
    pass


class ModelFormatError(CatenaError):
    pass


class FoldError(CatenaError):
    pass
