"""Exception hierarchy for the search simulator"""


class SearchError(Exception):
    """Base class for all simulator errors"""


class ConfigError(SearchError):
    """Invalid experiment or module configuration"""


class DegenerateMeasurementError(SearchError):
    """Measurement requested for a target at the sensor position"""


class SimulationAbort(SearchError):
    """A run cannot continue"""


class SingularityError(SimulationAbort):
    """The vehicle left the regime where the tracking controller is defined"""
