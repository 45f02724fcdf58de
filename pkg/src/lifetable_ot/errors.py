"""Exception types. Each carries the process exit code the CLI reports for it."""


class LifeTableOTError(Exception):
    exit_code = 1
    category = "error"


class DomainError(LifeTableOTError, ValueError):
    """Input outside the mathematical domain of an operation."""

    exit_code = 4
    category = "domain"


class FormatError(LifeTableOTError, ValueError):
    """Malformed HMD text. ``line`` is 1-based when known."""

    exit_code = 3
    category = "format"

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class NotFoundError(LifeTableOTError, KeyError):
    exit_code = 5
    category = "not-found"

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class CompletenessError(LifeTableOTError, ValueError):
    """A requested table has missing values in required columns."""

    exit_code = 5
    category = "incomplete"

    def __init__(self, message, columns=()):
        self.columns = tuple(columns)
        super().__init__(message)


class CapacityError(LifeTableOTError, ValueError):
    exit_code = 6
    category = "capacity"


class SetupError(LifeTableOTError, RuntimeError):
    """A study cannot run with the data it was given."""

    exit_code = 7
    category = "setup"
