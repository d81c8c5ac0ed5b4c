"""Exception types.

Everything a caller can fix by changing its inputs derives from
:class:`ValidationError` (CLI exit code 2). Filesystem and decoding
problems are :class:`OSError` subclasses (exit code 1).
"""


class ValidationError(ValueError):
    pass


class ParseError(ValidationError):
    def __init__(self, path, line_no, reason):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {reason}")


class DuplicateIdError(ValidationError):
    def __init__(self, record_id):
        self.record_id = record_id
        super().__init__(f"duplicate id {record_id!r}")


class InsufficientFramesError(ValidationError):
    pass


class EmptyDocumentError(ValidationError):
    pass


class UndefinedSimilarityError(ValidationError):
    pass


class DegenerateMatrixError(ValidationError):
    pass


class EmptyVocabularyError(ValidationError):
    pass


class EmptyQueryError(ValidationError):
    pass


class FrameReadError(OSError):
    def __init__(self, path, reason):
        self.path = path
        super().__init__(f"cannot read frame {path}: {reason}")
