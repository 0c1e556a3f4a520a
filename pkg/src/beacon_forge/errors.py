"""Exception hierarchy for the whole package.

Every error raised by library code derives from BeaconForgeError so callers
can catch one base class. Scenario configuration problems additionally share
the ScenarioError base, which the CLI maps to a dedicated exit code.
"""


class BeaconForgeError(Exception):
    """Base class for all library errors."""


class ScenarioError(BeaconForgeError):
    """A scenario violates a structural or domain invariant."""


class ScenarioFormatError(ScenarioError):
    """Scenario document is malformed (unknown keys, wrong types, bad values)."""


class AlphabetTooSmall(ScenarioError):
    """Alphabet has fewer than two letters."""


class HashNeedsPowerOfTwo(ScenarioError):
    """Hash combiner requires a power-of-two alphabet size."""


class EmptyBeaconSet(ScenarioError):
    """Scenario declares no beacons."""


class NonPositivePeriod(ScenarioError):
    """A beacon's emission period is zero or negative."""


class InvalidSpeed(BeaconForgeError):
    """Propagation speed outside (0, c]."""


class IndexOutOfRange(BeaconForgeError):
    """Stream index outside [0, scenario length)."""


class NoDishonestBeacons(BeaconForgeError):
    """Predictability-gap query on a scenario with no dishonest beacon."""


class StreamExhausted(BeaconForgeError):
    """A beacon was asked for more digits than the scenario length."""


class DigitOutOfRange(BeaconForgeError):
    """Digit value outside [0, alphabet size)."""


class MissingRecord(BeaconForgeError):
    """Ledger lacks the record required by a combiner."""


class AlphabetNotPowerOfTwo(BeaconForgeError):
    """Hash combination requested for a non power-of-two alphabet."""


class WidthTooLarge(BeaconForgeError):
    """Exhaustive attack search requested above the configured width cap."""


class MaskWiderThanOutput(BeaconForgeError):
    """Bit-forcing mask does not fit in the hash output width."""


class EmptyDistribution(BeaconForgeError):
    """Entropy requested for a distribution with empty support."""


class EnumerationTooLarge(BeaconForgeError):
    """Exact enumeration would exceed the configured state budget."""


class InvalidCounts(BeaconForgeError):
    """Beacon/sabotage counts outside their valid ranges."""
