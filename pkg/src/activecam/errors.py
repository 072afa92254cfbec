class ValidationError(ValueError):
    """Invalid input to any activecam operation."""


class ParseError(ValidationError):
    """A malformed external file; carries the 1-based position of the fault."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
