"""Exception types shared across the toolkit."""


class NCLPError(Exception):
    """Base class for toolkit errors."""


class StructuralError(NCLPError, ValueError):
    """Shapes, algebras or grid sizes do not fit together."""


class DomainError(NCLPError, ValueError):
    """An argument lies outside the domain of an operation (e.g. p < 1)."""


class PreconditionError(NCLPError, ValueError):
    """A mathematical precondition of an operation failed numerically."""


class InternalInconsistencyError(NCLPError, RuntimeError):
    """A dichotomy that must hold exactly failed, usually a tolerance problem."""


class SchemaError(NCLPError, ValueError):
    """Malformed JSON input. ``path`` names the offending location."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
