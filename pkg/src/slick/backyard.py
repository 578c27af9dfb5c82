"""Second-layer table for bumped elements."""

from __future__ import annotations

from typing import Iterable, NamedTuple


class Element(NamedTuple):
    key: int
    value: object


class Backyard:
    """Plain associative map from keys to elements.

    Any object with the same five methods can stand in for it, e.g. another
    Slick table wrapped accordingly.
    """

    __slots__ = ("_entries",)

    def __init__(self, elements: Iterable[Element] = ()) -> None:
        self._entries: dict = {}
        for key, value in elements:
            self._entries.setdefault(key, value)

    def find(self, key) -> Element | None:
        try:
            return Element(key, self._entries[key])
        except KeyError:
            return None

    def insert(self, key, value) -> bool:
        """Store ``key -> value`` unless ``key`` is present. Returns whether it was added."""
        if key in self._entries:
            return False
        self._entries[key] = value
        return True

    def delete(self, key) -> bool:
        return self._entries.pop(key, _MISSING) is not _MISSING

    def drain(self) -> list[Element]:
        out = [Element(k, v) for k, v in self._entries.items()]
        self._entries.clear()
        return out

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key) -> bool:
        return key in self._entries

    def __iter__(self):
        return (Element(k, v) for k, v in self._entries.items())


_MISSING = object()
