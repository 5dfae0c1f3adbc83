"""Exception types shared across the package."""


class PolycloneError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PolycloneError):
    pass


class MalformedConfig(ConfigError):
    """Language config file is not valid structured text or carries unknown keys."""


class MissingField(ConfigError):
    """A required config key is absent."""


class EmptyExtensionList(ConfigError):
    """Config declares no file extensions."""


class LexFailure(PolycloneError):
    """File cannot be lexed at all (bad encoding, binary content)."""


class AdapterUnavailable(PolycloneError):
    """No parser adapter is registered for the requested grammar."""


class EmptyAfterFiltering(PolycloneError):
    """No keyword/identifier/literal tokens survived the category filter."""


class CorruptBagFile(PolycloneError):
    """Bag file failed version or record validation on read."""


class BothEmpty(PolycloneError):
    """Similarity of two empty token sequences is undefined."""
