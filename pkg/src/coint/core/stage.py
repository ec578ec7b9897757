import threading
from datetime import datetime
from typing import Generic, Optional

from .types import V, StageChange


class Stage(Generic[V]):
    """A named slot holding one intermediate result of an analysis"""

    def __init__(self, name: str):
        self.name = name
        self._value: Optional[V] = None
        self._lock = threading.RLock()
        self._last_modified = datetime.now()

    def peek(self) -> Optional[V]:
        """Current value without triggering any recomputation."""
        with self._lock:
            return self._value

    def set(self, value: V) -> StageChange[V]:
        with self._lock:
            old_value = self._value
            self._value = value
            self._last_modified = datetime.now()
            change = StageChange(stage=self.name, old_value=old_value, new_value=value)
            self.handle_change(change)
            return change

    @property
    def last_modified(self) -> datetime:
        return self._last_modified

    def handle_change(self, change: StageChange[V]) -> None:
        """Override this in derived classes to propagate the change"""
        raise NotImplementedError
