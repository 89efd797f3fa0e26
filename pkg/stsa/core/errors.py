"""
Exception hierarchy shared by every layer.

Each error carries a stable machine ``code``, a human ``detail`` and the
``status_code`` the HTTP layer answers with, so services can raise one
exception type regardless of whether they are driven by the CLI or the API.
"""


class StsaError(Exception):
    """Base class for all library errors."""

    code = "stsa_error"
    status_code = 400

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"code": self.code, "detail": self.detail}


class DimensionError(StsaError):
    """Shape mismatch, non-divisible dims or out-of-bounds index."""
    code = "dimension_error"


class ConfigurationError(StsaError):
    code = "configuration_error"


class NumericalError(StsaError):
    """Non-finite values or a diverged computation."""
    code = "numerical_error"
    status_code = 422


class PrecisionError(StsaError):
    code = "precision_error"


class MemoryGuardError(StsaError):
    code = "memory_guard"
    status_code = 413


class FlowError(StsaError):
    code = "flow_error"


class PartitionMismatchError(StsaError):
    code = "partition_mismatch"
    status_code = 409


class AlignmentMismatchError(StsaError):
    code = "alignment_mismatch"
    status_code = 409


class FormatError(StsaError):
    """A file could not be parsed; nothing was partially loaded."""
    code = "format_error"


class UnsupportedVersionError(FormatError):
    code = "unsupported_version"


class SceneError(StsaError):
    code = "scene_error"


class ReportError(StsaError):
    code = "report_error"
    status_code = 500
