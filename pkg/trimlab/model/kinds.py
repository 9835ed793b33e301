from enum import Enum

from ..errors import ConfigurationError


class DataflowKind(str, Enum):
    """The three dataflows of the laboratory. Declaration order is the report order."""

    WS = "ws"
    RS = "rs"
    TRIM = "trim"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def order(self) -> int:
        return _ORDER[self]

    @classmethod
    def parse(cls, name: "str | DataflowKind") -> "DataflowKind":
        """Accepts `ws`/`rs`/`trim` in any case, or the labels `WS`/`RS`/`TrIM`."""
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ConfigurationError(
                f"Unknown dataflow {name!r}, expected one of: {', '.join(k.value for k in cls)}"
            ) from None

    def __str__(self):
        return self.label


_LABELS = {DataflowKind.WS: "WS", DataflowKind.RS: "RS", DataflowKind.TRIM: "TrIM"}
_ORDER = {kind: position for position, kind in enumerate(DataflowKind)}
