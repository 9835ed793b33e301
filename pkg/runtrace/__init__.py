"""
Nested, structured run logging: `RunNode` trees with inputs, results, errors and counters,
serialized to JSON and optionally persisted with `FileStorage`.
"""

from .node import RunNode, RunNodeState, current_run_node, with_trace
from .serialization import serialize_with_type
from .storage import FileStorage, StorageBase, current_storage
from .utils.text import shorten_str

__all__ = [
    "RunNode",
    "RunNodeState",
    "current_run_node",
    "current_storage",
    "with_trace",
    "FileStorage",
    "StorageBase",
    "serialize_with_type",
    "shorten_str",
]
