"""Error types shared across the package.

Every error raised by library code carries the name of the module it
originates from, so the CLI can emit a single machine-parsable line of
the form ``error[<module>]: <message>`` and map it to an exit code.
"""

from __future__ import annotations


class MxspecError(Exception):
    """Base error; `module` identifies the originating subsystem."""

    module = "cli"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ParseError(MxspecError):
    """Malformed input file (.mpx, .cpl, partition CSV)."""

    module = "multiplex-core"


class GeneratorError(MxspecError):
    module = "generators"


class OperatorError(MxspecError):
    module = "operators"


class SpectralError(MxspecError):
    module = "spectral-engine"


class CutError(MxspecError):
    module = "cut-analysis"


class ExperimentError(MxspecError):
    module = "experiments"
