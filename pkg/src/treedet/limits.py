"""Resource caps and cooperative deadlines for the determinisation loops."""

import os
import time

from .errors import DeterminizationTimeout

DEFAULT_MAX_STATES = 20_000
DEFAULT_MAX_TRANSITIONS = 5_000_000
MAX_STATES_ENV = "TREEDET_MAX_STATES"


def default_max_states() -> int:
    value = os.environ.get(MAX_STATES_ENV)
    if value:
        return int(value)
    return DEFAULT_MAX_STATES


class Deadline:
    """Wall-clock budget checked at loop checkpoints.  ``None`` means unlimited."""

    __slots__ = ("expires",)

    def __init__(self, timeout=None):
        if timeout is not None and timeout <= 0:
            raise ValueError("timeout must be positive")
        self.expires = None if timeout is None else time.monotonic() + timeout

    def check(self):
        if self.expires is not None and time.monotonic() >= self.expires:
            raise DeterminizationTimeout("timed out")
