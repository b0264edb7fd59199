# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.


class ViewSyncError(Exception):
    """
    Base class for every error raised by the view synchronization toolkit.
    """


class ConfigError(ViewSyncError):
    """
    Raised when a scenario configuration violates one of its constraints.

    The message always names the violated constraint, so it can be shown to
    the user as-is. The command line maps this error to exit code 2.
    """


class InvariantViolation(ViewSyncError):
    """
    Raised when an internal invariant breaks during a run (non-monotone
    proposeView, a spoofed sender, an escalation without a held certificate).
    The command line maps this error to exit code 1.
    """


class EmitError(ViewSyncError):
    """
    Raised when a report or sweep table cannot be written.

    Attributes:
        path (str): The destination that failed.
    """
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = str(path)
