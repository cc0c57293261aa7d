from __future__ import annotations


class BoundsError(Exception):
    """Base for every error the library raises on purpose.

    `kind` is the machine-readable tag printed by the CLI, `exit_code` the
    process status it maps to.
    """

    kind = "BoundsError"
    exit_code = 1

    def __init__(self, message: str = "") -> None:
        super().__init__(message)
        self.message = message

    def to_payload(self) -> dict[str, str]:
        return {"error": self.kind, "message": self.message}


# --- input errors (exit 2) ---------------------------------------------------


class InputError(BoundsError):
    kind = "InputError"
    exit_code = 2


class MalformedInput(InputError):
    kind = "MalformedInput"


class BadModelFile(InputError):
    kind = "BadModelFile"


class BadGrid(InputError):
    kind = "BadGrid"


# --- validation errors (exit 3) ----------------------------------------------


class ValidationError(BoundsError):
    kind = "ValidationError"
    exit_code = 3


class NonFiniteFeature(ValidationError):
    kind = "NonFiniteFeature"


class EmptyClass(ValidationError):
    kind = "EmptyClass"


class DimensionMismatch(ValidationError):
    kind = "DimensionMismatch"


class LengthMismatch(ValidationError):
    kind = "LengthMismatch"


class DegenerateInput(ValidationError):
    kind = "DegenerateInput"


class PriorMismatch(ValidationError):
    kind = "PriorMismatch"


class WrongKind(ValidationError):
    kind = "WrongKind"


class RangeError(ValidationError):
    kind = "RangeError"


class BadConfig(ValidationError):
    kind = "BadConfig"


# --- internal errors (exit 4) ------------------------------------------------


class InternalError(BoundsError):
    kind = "InternalError"
    exit_code = 4


class InvariantBreach(InternalError):
    kind = "InvariantBreach"
