import contextvars
import datetime
import functools
import inspect
import logging
from enum import Enum
from threading import Lock
from typing import Any, Callable, Dict, List, Mapping, Optional

from .serialization import Data, serialize_with_type
from .utils.text import generate_uid, shorten_str

RUNTRACE_FORMAT_VERSION = "1.0"

_LOG = logging.getLogger(__name__)

_RUN_STACK = contextvars.ContextVar("_RUN_STACK", default=())


class RunNodeState(Enum):
    NEW = "new"
    """Created, not entered yet."""
    OPEN = "open"
    """Currently running."""
    FINISHED = "finished"
    """Finished without an exception."""
    ERROR = "error"
    """Finished with an exception."""


class RunNode:
    """
    One step of a laboratory run (a sweep, a grid point, a simulation, a check) in a nested hierarchy.

    Used as a context manager; nodes opened inside become its children:

    ```python
    with RunNode("sweep", kind="sweep", inputs={"K": [3, 5]}) as sweep:
        with RunNode("point K=3 I=16", kind="point") as point:
            point.add_counters(ext_fetches=308)
            point.set_result(row)
    ```

    Exceptions leaving the block are recorded in `error` (with traceback frames) and propagated.
    Attributes are read-only from the outside; use the setters.
    """

    def __init__(
        self,
        name: str,
        kind: Optional[str] = None,
        inputs: Optional[Dict[str, Any]] = None,
        storage: Optional["StorageBase"] = None,
        result: Any = None,
    ):
        """
        - `name` - human readable description of the step.
        - `kind` - category of the step, e.g. `"sweep"`, `"simulation"`, `"check"`.
        - `inputs` - named inputs, serialized immediately.
        - `storage` - storage receiving the node when it closes; when omitted, a root node
          picks the innermost active storage (`with storage: ...`).
        - `result` - result of an already finished step (used by `add_event`).
        """
        if storage is None and current_run_node(False) is None:
            storage = current_storage()

        if inputs:
            if not all(isinstance(key, str) for key in inputs):
                raise TypeError("Input names must be strings")
            inputs = serialize_with_type(inputs)

        self.name = name
        self.kind = kind
        self.inputs = inputs or None
        self.result = serialize_with_type(result) if result is not None else None
        self.error = None
        self.counters: Dict[str, int | float] = {}
        self.state = RunNodeState.NEW if result is None else RunNodeState.FINISHED
        self.uid = generate_uid(name)
        self.children: List[RunNode] = []
        self.start_time = None
        self.end_time = None if result is None else datetime.datetime.now()
        self.storage = storage
        self._token = None
        self._depth = 0
        self._lock = Lock()

        if storage is not None:
            storage.register_node(self)

    @classmethod
    def deserialize(cls, data: Data, depth: int = 0) -> "RunNode":
        """Rebuild a (closed) `RunNode` tree from the output of `to_dict`."""
        if not isinstance(data, dict) or data.get("_type") != "RunNode":
            raise ValueError("Data do not describe a RunNode")
        self = cls.__new__(cls)
        self.uid = data["uid"]
        self.name = data["name"]
        self.state = RunNodeState(data.get("state", RunNodeState.FINISHED.value))
        self.kind = data.get("kind")
        self.inputs = data.get("inputs")
        self.result = data.get("result")
        self.error = data.get("error")
        self.counters = dict(data.get("counters", {}))
        self.start_time = _parse_time(data.get("start_time"))
        self.end_time = _parse_time(data.get("end_time"))
        self.children = [
            RunNode.deserialize(child, depth=depth + 1) for child in data.get("children", ())
        ]
        self.storage = None
        self._token = None
        self._depth = depth
        self._lock = Lock()
        return self

    def to_dict(self, with_children: bool = True, root: bool = True) -> Data:
        """
        JSON structure of the node.

        With `with_children=False` the children are replaced by their uids (`children_uids`).
        """
        with self._lock:
            result = {"_type": "RunNode", "name": self.name, "uid": self.uid}
            if root:
                result["version"] = RUNTRACE_FORMAT_VERSION
            if self.state != RunNodeState.FINISHED:
                result["state"] = self.state.value
            for name in ("kind", "inputs", "result", "error"):
                value = getattr(self, name)
                if value is not None:
                    result[name] = value
            if self.counters:
                result["counters"] = dict(self.counters)
            if self.children:
                if with_children:
                    result["children"] = [c.to_dict(root=False) for c in self.children]
                else:
                    result["children_uids"] = [c.uid for c in self.children]
            if self.start_time:
                result["start_time"] = self.start_time.isoformat()
            if self.end_time:
                result["end_time"] = self.end_time.isoformat()
            return result

    @property
    def _pad(self) -> str:
        return "  " * self._depth

    def __enter__(self) -> "RunNode":
        parents = _RUN_STACK.get()

        def _open(depth: int):
            with self._lock:
                if self._token is not None or self.state != RunNodeState.NEW:
                    raise RuntimeError(f"RunNode {self.name!r} was already entered")
                self.start_time = datetime.datetime.now()
                self._depth = depth
                self._token = _RUN_STACK.set(parents + (self,))
                self.state = RunNodeState.OPEN
                _LOG.debug(f"{self._pad}{self.kind or 'node'} {self.name} inputs={shorten_str(self.inputs)}")

        if parents:
            parent = parents[-1]
            # Parent lock first: to_dict() walks the tree top-down
            with parent._lock:
                _open(len(parents))
                parent.children.append(self)
        else:
            _open(0)
        return self

    def __exit__(self, _exc_type, exc_val, _exc_tb):
        with self._lock:
            if exc_val is not None:
                self.state = RunNodeState.ERROR
                self.error = serialize_with_type(exc_val)
                _LOG.debug(f"{self._pad}-> ERR {self.name}: {shorten_str(str(exc_val))}")
            elif self.state != RunNodeState.ERROR:
                self.state = RunNodeState.FINISHED
                _LOG.debug(f"{self._pad}-> OK  {self.name} counters={shorten_str(self.counters)}")
            self.end_time = datetime.datetime.now()
            _RUN_STACK.reset(self._token)
            self._token = None
        if self.storage is not None:
            self.storage.write_node(self)
        return False

    def add_event(self, name: str, kind: Optional[str] = None, data: Any = None) -> "RunNode":
        """Attach an already finished child node, e.g. a progress milestone or a check outcome."""
        event = RunNode.__new__(RunNode)
        event.__dict__.update(
            name=name,
            kind=kind,
            inputs=None,
            result=serialize_with_type(data),
            error=None,
            counters={},
            state=RunNodeState.FINISHED,
            uid=generate_uid(name),
            children=[],
            start_time=None,
            end_time=datetime.datetime.now(),
            storage=None,
            _token=None,
            _depth=0,
            _lock=Lock(),
        )
        with self._lock:
            event._depth = self._depth + 1
            self.children.append(event)
        return event

    def add_inputs(self, inputs: Mapping[str, Any]):
        with self._lock:
            if self.inputs is None:
                self.inputs = {}
            for name in inputs:
                if name in self.inputs:
                    raise KeyError(f"Input {name} already exists")
            for name, value in inputs.items():
                self.inputs[name] = serialize_with_type(value)

    def add_counters(self, counters: Optional[Mapping[str, int | float]] = None, **kwargs):
        """Record hardware or bookkeeping counters; values for existing names are replaced."""
        with self._lock:
            for source in (counters or {}, kwargs):
                for name, value in source.items():
                    self.counters[name] = serialize_with_type(value)

    def set_result(self, value: Any):
        with self._lock:
            self.result = serialize_with_type(value)

    def find_nodes(self, predicate: Callable[["RunNode"], bool]) -> List["RunNode"]:
        """All nodes of the subtree (this node included) satisfying `predicate`, in pre-order."""
        found = []

        def _walk(node: RunNode):
            with node._lock:
                if predicate(node):
                    found.append(node)
                children = list(node.children)
            for child in children:
                _walk(child)

        _walk(self)
        return found


def _parse_time(value: Optional[str]) -> Optional[datetime.datetime]:
    return None if value is None else datetime.datetime.fromisoformat(value)


def with_trace(fn: Callable = None, *, name: Optional[str] = None, kind: Optional[str] = None):
    """
    Decorator running every call of the function inside a new `RunNode`.

    Bound arguments become the node inputs and the return value its result.

    ```python
    @with_trace(kind="check")
    def check_inversion_points(limit): ...
    ```
    """
    if isinstance(fn, str):
        raise TypeError("use `with_trace(name=...)` to name the node")

    def decorate(func):
        signature = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            binding = signature.bind(*args, **kwargs)
            with RunNode(
                name=name or func.__name__, kind=kind or "call", inputs=dict(binding.arguments)
            ) as node:
                result = func(*args, **kwargs)
                node.set_result(result)
                return result

        return wrapper

    if fn is not None:
        if not callable(fn):
            raise TypeError("with_trace decorates callables")
        return decorate(fn)
    return decorate


def current_run_node(check: bool = True) -> Optional[RunNode]:
    """
    The innermost open `RunNode`.

    Raises `RuntimeError` when there is none and `check` is set, otherwise returns `None`.
    """
    stack = _RUN_STACK.get()
    if not stack:
        if check:
            raise RuntimeError("No open RunNode")
        return None
    return stack[-1]


from .storage import StorageBase, current_storage  # noqa: E402
