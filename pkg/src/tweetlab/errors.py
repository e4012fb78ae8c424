"""Exception types shared across the toolkit.

Everything user-facing derives from TweetLabError so the CLI can map
data problems to exit code 1 while argparse keeps exit code 2 for usage
errors.
"""


class TweetLabError(Exception):
    """Base class for all toolkit errors."""


class DataFormatError(TweetLabError):
    """A file or record does not match the documented on-disk format."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


class IntegrityError(TweetLabError):
    """Referential or uniqueness constraint violated (duplicate ids,
    dangling foreign keys, over-capped tweet counts)."""


class GenerationError(TweetLabError):
    """A building could not be generated after exhausting retries."""

    def __init__(self, building_id: str, message: str, attempts: int = 0):
        self.building_id = building_id
        self.attempts = attempts
        super().__init__(f"building {building_id!r}: {message}")


class BudgetExceededError(TweetLabError):
    """The configured request budget for a generation run was exhausted."""


class ConfigError(TweetLabError):
    """Invalid configuration (bad enum value, missing requirement)."""
