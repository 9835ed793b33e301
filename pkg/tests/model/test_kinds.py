import pytest

from trimlab.errors import ConfigurationError
from trimlab.model import DataflowKind


@pytest.mark.parametrize(
    "name,kind",
    [("ws", DataflowKind.WS), ("RS", DataflowKind.RS), ("TrIM", DataflowKind.TRIM), ("trim", DataflowKind.TRIM)],
)
def test_parse(name, kind):
    assert DataflowKind.parse(name) is kind
    assert DataflowKind.parse(kind) is kind


def test_parse_unknown():
    with pytest.raises(ConfigurationError, match="Unknown dataflow"):
        DataflowKind.parse("os")


def test_labels_and_order():
    assert [str(k) for k in DataflowKind] == ["WS", "RS", "TrIM"]
    assert sorted([DataflowKind.TRIM, DataflowKind.WS, DataflowKind.RS], key=lambda k: k.order) == list(
        DataflowKind
    )
