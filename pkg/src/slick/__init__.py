"""Sliding block hashing (Slick)."""

from .backyard import Backyard, Element
from .config import SlickConfig
from .hashing import ExplicitHasher, Hasher
from .state import MetaData, TableState, validate_state
from .table import (
    CleanReport,
    DeleteOutcome,
    InsertOutcome,
    MetricsSnapshot,
    SlickTable,
)

__all__ = [
    "Backyard",
    "CleanReport",
    "DeleteOutcome",
    "Element",
    "ExplicitHasher",
    "Hasher",
    "InsertOutcome",
    "MetaData",
    "MetricsSnapshot",
    "SlickConfig",
    "SlickTable",
    "TableState",
    "validate_state",
]
