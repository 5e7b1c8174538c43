"""Shared exception types.

ConfigError covers anything wrong with a scenario, policy, or station
description (the CLI maps it to exit code 2); TraceFormatError covers
malformed trace files and carries the offending line number in its
message.
"""


class ConfigError(ValueError):
    pass


class TraceFormatError(ValueError):
    pass
