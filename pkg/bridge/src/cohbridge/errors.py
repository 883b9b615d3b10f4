"""Error types raised by the bridge."""


class BridgeError(Exception):
    """Base class for all bridge failures."""


class InputError(BridgeError):
    """Raised when raw input is missing, malformed, or unusable."""


class ModelError(BridgeError):
    """Raised when a tagger or encoder backend cannot be loaded."""
