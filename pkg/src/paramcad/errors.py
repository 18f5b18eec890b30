"""Exception hierarchy shared across the package."""


class ParamCadError(Exception):
    """Base class for all domain errors."""


class UnknownDesign(ParamCadError):
    pass


class UnknownParameter(ParamCadError):
    pass


class KindMismatch(ParamCadError):
    pass


class NoHandle(ParamCadError):
    pass


class NonLengthParameter(ParamCadError):
    pass


class DesignSyntaxError(ParamCadError):
    """Parse failure with source position."""

    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class DuplicateParameter(DesignSyntaxError):
    pass


class UnknownReference(DesignSyntaxError):
    pass


class InvalidDefault(DesignSyntaxError):
    pass


class UnboundGeneratorSlot(DesignSyntaxError):
    pass


class OutOfRangeT(ParamCadError):
    pass


class InvalidConfiguration(ParamCadError):
    pass


class DegenerateProfile(ParamCadError):
    pass


class EmptyMesh(ParamCadError):
    pass


class DegenerateStroke(ParamCadError):
    pass


class InsufficientPoints(ParamCadError):
    pass


class UnknownTag(ParamCadError):
    pass


class EmptyProfileList(ParamCadError):
    pass


class InvalidProfile(ParamCadError):
    pass


class ScanParseError(ParamCadError):
    pass


class EmptyScan(ParamCadError):
    pass


class NonTriangulated(ParamCadError):
    pass


class NoSupportPlane(ParamCadError):
    pass


class LightInsideMesh(ParamCadError):
    pass


class EmptyScene(ParamCadError):
    pass


class UnknownClauseForDesignKind(ParamCadError):
    pass
