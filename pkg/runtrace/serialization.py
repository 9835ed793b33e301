import dataclasses
import decimal
import enum
import fractions
import traceback
from pathlib import PurePath
from typing import Any, Callable, Dict, List

import numpy as np

Data = Dict[str, "Data"] | List["Data"] | int | float | str | bool | None

PRIMITIVES = (int, str, float, bool)


def _serialize_ndarray(obj: np.ndarray) -> Data:
    return {"shape": list(obj.shape), "dtype": str(obj.dtype), "values": obj.tolist()}


def _serialize_fraction(obj: fractions.Fraction) -> Data:
    return {"numerator": obj.numerator, "denominator": obj.denominator, "value": float(obj)}


def _serialize_decimal(obj: decimal.Decimal) -> Data:
    return {"value": str(obj)}


CUSTOM_SERIALIZERS: dict[type, Callable[[Any], Data]] = {
    np.ndarray: _serialize_ndarray,
    fractions.Fraction: _serialize_fraction,
    decimal.Decimal: _serialize_decimal,
}


def _dataclass_fields(pairs) -> Data:
    return {key: serialize_with_type(value) for key, value in pairs}


def _serialize_exception(exc: BaseException) -> Data:
    result = {
        "_type": type(exc).__name__,
        "message": str(exc),
        "traceback": {
            "_type": "$traceback",
            "frames": [
                {
                    "name": frame.name,
                    "filename": frame.filename,
                    "lineno": frame.lineno,
                    "line": frame.line,
                }
                for frame in traceback.extract_tb(exc.__traceback__)
            ],
        },
    }
    if exc.__context__ is not None:
        result["context"] = _serialize_exception(exc.__context__)
    return result


def serialize_with_type(obj: Any) -> Data:
    """
    Convert `obj` into JSON-compatible data.

    Containers are converted recursively. Non-primitive values become dicts with a `_type` key
    naming their class. Lookup order: exceptions, registered serializers, `__trace_to_node__`,
    enums (by value), dataclasses (field by field), numpy scalars, paths. Anything else is
    recorded by type name and `id` only.
    """
    if obj is None:
        return None
    if isinstance(obj, enum.Enum):
        return serialize_with_type(obj.value)
    if isinstance(obj, PRIMITIVES):
        return obj
    if isinstance(obj, BaseException):
        return _serialize_exception(obj)
    if isinstance(obj, (list, tuple)):
        return [serialize_with_type(value) for value in obj]
    if isinstance(obj, dict):
        return {str(key): serialize_with_type(value) for key, value in obj.items()}
    serializer = CUSTOM_SERIALIZERS.get(type(obj))
    if serializer is not None:
        return _with_type_key(serializer(obj), obj)
    if hasattr(obj, "__trace_to_node__"):
        return _with_type_key(obj.__trace_to_node__(), obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _with_type_key(dataclasses.asdict(obj, dict_factory=_dataclass_fields), obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, PurePath):
        return str(obj)
    return {"_type": type(obj).__name__, "id": id(obj)}


def _with_type_key(serialized: Data, obj: Any) -> Data:
    if isinstance(serialized, dict) and "_type" not in serialized:
        serialized["_type"] = type(obj).__name__
    return serialized

