"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator faults."""


class DegenerateTransformError(SimulationError):
    """Homogeneous transform produced a zero projective component."""


class RejectedSampleError(SimulationError):
    """Input sample violates stream ordering (non-increasing timestamps)."""


class IntegrationFaultError(SimulationError):
    """Non-finite quantity entered the dynamics integrator; session must abort."""


class ConfigError(SimulationError):
    """Malformed or out-of-range session configuration.

    Carries the dotted key path (and source line when known) so the CLI can
    point at the offending entry.
    """

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        where = path or "<document>"
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"{where}: {message}")
