import abc
import contextvars
import gzip
import json
import logging
import os
import threading
from os import PathLike
from typing import Iterator, List, Optional

from .node import RunNode
from .serialization import Data
from .utils.text import validate_uid

_LOG = logging.getLogger(__name__)

_STORAGE_STACK = contextvars.ContextVar("_STORAGE_STACK", default=())


class StorageBase(abc.ABC):
    """
    Persistent store of root `RunNode`s.

    Using a storage as a context manager makes it the target of every root node opened inside.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._running_nodes: dict[str, RunNode] = {}
        self._token = None

    def register_node(self, node: RunNode):
        """Remember a running node until it is written."""
        with self._lock:
            self._running_nodes[node.uid] = node

    def _running_node(self, uid: str) -> Optional[RunNode]:
        with self._lock:
            return self._running_nodes.get(uid)

    @abc.abstractmethod
    def write_node(self, node: RunNode):
        raise NotImplementedError

    @abc.abstractmethod
    def read(self, uid: str) -> Data:
        """Serialized node with all its children."""
        raise NotImplementedError

    @abc.abstractmethod
    def read_root(self, uid: str) -> Data:
        """Serialized node without its children."""
        raise NotImplementedError

    @abc.abstractmethod
    def list(self) -> List[str]:
        """Uids of all stored and running root nodes."""
        raise NotImplementedError

    def read_node(self, uid: str) -> RunNode:
        return RunNode.deserialize(self.read(uid))

    def read_all_nodes(self) -> Iterator[RunNode]:
        for uid in self.list():
            yield self.read_node(uid)

    def __enter__(self):
        if self._token is not None:
            raise RuntimeError("Storage is already active")
        self._token = _STORAGE_STACK.set(_STORAGE_STACK.get() + (self,))
        return self

    def __exit__(self, _exc_type, _exc_val, _exc_tb):
        _STORAGE_STACK.reset(self._token)
        self._token = None


def current_storage() -> Optional[StorageBase]:
    """The innermost active storage, or `None`."""
    stack = _STORAGE_STACK.get()
    return stack[-1] if stack else None


class FileStorage(StorageBase):
    """
    Stores every root node as two gzipped JSON files in `directory`:
    `<uid>.full.gz` (whole tree) and `<uid>.root.gz` (node without children, for listing).
    """

    FULL_SUFFIX = ".full.gz"
    ROOT_SUFFIX = ".root.gz"

    def __init__(self, directory: PathLike | str):
        super().__init__()
        self.directory = os.path.abspath(directory)
        os.makedirs(self.directory, exist_ok=True)

    def _path(self, uid: str, suffix: str) -> str:
        if not validate_uid(uid):
            raise ValueError(f"Invalid uid {uid!r}")
        return os.path.join(self.directory, uid + suffix)

    def write_node(self, node: RunNode):
        full = json.dumps(node.to_dict()).encode()
        root = json.dumps(node.to_dict(with_children=False)).encode()
        # Full tree first: once the root file exists, the full file does too
        self._write_file(self._path(node.uid, self.FULL_SUFFIX), full)
        self._write_file(self._path(node.uid, self.ROOT_SUFFIX), root)
        with self._lock:
            self._running_nodes.pop(node.uid, None)
        _LOG.debug(f"Stored run {node.uid} in {self.directory}")

    @staticmethod
    def _write_file(path: str, data: bytes):
        tmp_path = path + "._tmp"
        try:
            with gzip.open(tmp_path, "wb") as f:
                f.write(data)
            os.replace(tmp_path, path)
        finally:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)

    @staticmethod
    def _read_file(path: str) -> Data:
        with gzip.open(path, "rb") as f:
            return json.loads(f.read())

    def read(self, uid: str) -> Data:
        node = self._running_node(uid)
        if node is not None:
            return node.to_dict()
        return self._read_file(self._path(uid, self.FULL_SUFFIX))

    def read_root(self, uid: str) -> Data:
        node = self._running_node(uid)
        if node is not None:
            return node.to_dict(with_children=False)
        return self._read_file(self._path(uid, self.ROOT_SUFFIX))

    def list(self) -> List[str]:
        with self._lock:
            running = list(self._running_nodes)
        stored = sorted(
            name[: -len(self.ROOT_SUFFIX)]
            for name in os.listdir(self.directory)
            if name.endswith(self.ROOT_SUFFIX)
        )
        return running + stored

    def __repr__(self):
        return f"<FileStorage directory={self.directory!r}>"
