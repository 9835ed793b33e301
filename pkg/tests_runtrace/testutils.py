from runtrace.node import RUNTRACE_FORMAT_VERSION

# Keys of a serialized RunNode that differ between otherwise identical runs
VOLATILE_NODE_KEYS = ("start_time", "end_time")


def _strip_node(data: dict, root: bool):
    assert isinstance(data.pop("uid"), str)
    for key in VOLATILE_NODE_KEYS:
        if key in data:
            assert isinstance(data.pop(key), str)
    if root:
        assert data.pop("version") == RUNTRACE_FORMAT_VERSION


def _strip_traceback(data: dict, erase_error_details: bool):
    if erase_error_details:
        del data["frames"]
        return
    for frame in data.get("frames", ()):
        assert isinstance(frame.pop("lineno"), int)


def strip_tree(obj, erase_error_details=False, root=True):
    """
    Remove uids, timestamps, the format version and traceback line numbers from serialized
    run nodes, so that they can be compared with literal dicts.
    """
    if isinstance(obj, list):
        return [strip_tree(item, erase_error_details, root=False) for item in obj]
    if not isinstance(obj, dict):
        return obj
    kind = obj.get("_type")
    if kind == "RunNode":
        _strip_node(obj, root)
    elif kind == "$traceback":
        _strip_traceback(obj, erase_error_details)
    return {key: strip_tree(value, erase_error_details, root=False) for key, value in obj.items()}
