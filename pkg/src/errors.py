"""
Typed errors for every pipeline stage.

Each stage has its own base class so callers can degrade per stage
(the simulation turns any perception failure into a BEEP line).
"""

from typing import Optional


class GuideSystemError(Exception):
    """Root of all errors raised by this package."""


class ConfigError(GuideSystemError):
    pass


# --- parsing -----------------------------------------------------------------

class ParseError(GuideSystemError):
    """An input file could not be parsed; `line` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.detail = message
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# --- media-io ----------------------------------------------------------------

class MediaError(GuideSystemError):
    pass


class BadMagic(MediaError):
    pass


class TruncatedData(MediaError):
    pass


class MaxvalUnsupported(MediaError):
    pass


class PixelAboveMaxval(MediaError):
    pass


class SizeMismatch(MediaError):
    pass


class MissingBoardHeader(ParseError):
    pass


class IncompleteView(ParseError):
    pass


class NonFiniteCoordinate(ParseError):
    pass


class UnknownLabel(ParseError):
    pass


class BadBBox(ParseError):
    pass


class BadConfidence(ParseError):
    pass


class DuplicateLabel(ParseError):
    pass


# --- calib -------------------------------------------------------------------

class CalibrationError(GuideSystemError):
    pass


class BehindCamera(CalibrationError):
    pass


class DegenerateConfiguration(CalibrationError):
    pass


class IllConditioned(CalibrationError):
    pass


class NonConvergence(CalibrationError):
    pass


class DivergedPose(CalibrationError):
    pass


class ViewMismatch(CalibrationError):
    pass


class DegenerateBaseline(CalibrationError):
    pass


class ReportFormatError(ParseError):
    pass


# --- stereo ------------------------------------------------------------------

class StereoError(GuideSystemError):
    pass


class NonPositiveDisparity(StereoError):
    pass


class NoValidDepth(StereoError):
    pass


# --- route -------------------------------------------------------------------

class RouteError(GuideSystemError):
    pass


class DanglingEdge(ParseError):
    pass


class BadCoordinate(ParseError):
    pass


class DuplicateNodeId(ParseError):
    pass


class DestinationNotFound(RouteError):
    pass


class AmbiguousDestination(RouteError):
    pass


class NoRoute(RouteError):
    pass


# --- guide -------------------------------------------------------------------

class GuideError(GuideSystemError):
    pass


class NegativeDistance(GuideError):
    pass


# --- wire --------------------------------------------------------------------

class WireError(GuideSystemError):
    pass


class PayloadTooLarge(WireError):
    pass


class WireBadMagic(WireError):
    pass


class UnknownVersion(WireError):
    pass


class UnknownKind(WireError):
    pass


class PayloadLengthMismatch(WireError):
    pass


class BindFailure(WireError):
    pass


class ConnectFailure(WireError):
    pass
