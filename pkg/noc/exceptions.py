class NocError(Exception):
    """
    Base class for every error raised by the noc app.
    """


class TopologyError(NocError, ValueError):
    """
    The requested network cannot be built (N not a power of two, B > N, ...).
    """


class WiringError(NocError, ValueError):
    pass


class PermutationError(NocError, ValueError):
    pass


class HeaderError(NocError, ValueError):
    pass


class ScheduleError(NocError, ValueError):
    pass


class ScenarioError(NocError, ValueError):
    pass


class DiagramFormatError(NocError, ValueError):
    pass


class NoConflictError(NocError):
    """
    A conflict scenario ran to completion without the challenger being rejected.
    """


class ExhaustiveLimitError(NocError, ValueError):
    """
    Exhaustive mode was requested for a network too large to enumerate.
    """
