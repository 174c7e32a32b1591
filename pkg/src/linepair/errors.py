"""Exception hierarchy shared across the package."""


class LinePairError(Exception):
    """Base class for every error raised by this package."""


class AnnotationError(LinePairError):
    """Problem with one annotation record.

    ``index`` is the zero-based record (line) index in the source file, when known.
    """

    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"record {index}: {message}"
        super().__init__(message)


class MalformedRecord(AnnotationError):
    pass


class OutOfBounds(AnnotationError):
    pass


class DegenerateAircraft(AnnotationError):
    pass


class ShapeMismatch(LinePairError, ValueError):
    pass


class HeatmapFormatError(LinePairError):
    pass


class RegionTooSmall(LinePairError):
    pass


class DegenerateBox(LinePairError):
    pass


class DegeneratePolygon(LinePairError):
    pass


class DegeneratePentagon(DegeneratePolygon):
    pass


class HeadUnresolved(LinePairError):
    pass


class EmptyGroundTruth(LinePairError):
    pass


class ConfigError(LinePairError):
    pass
