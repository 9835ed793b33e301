import random
import re
import string
from datetime import datetime

UID_CHARS = string.ascii_lowercase + string.digits
ESCAPE_NAME_RE = re.compile("[^0-9a-zA-Z]+")
UID_CHECK_RE = re.compile(r"^[a-z0-9A-Z\-_]+$")


def shorten_str(value, max_len: int = 40) -> str:
    """`repr` of the value, cut to `max_len` characters with a `[...]` marker."""
    if value is None:
        return "None"
    text = value if isinstance(value, str) else repr(value)
    if len(text) <= max_len:
        return text
    return text[: max_len - 5] + "[...]"


def generate_uid(name: str) -> str:
    """`<date>-<escaped name>-<random suffix>`; unique per run node and safe as a file name."""
    name = ESCAPE_NAME_RE.sub("_", name[:24]).strip("_") or "node"
    date = datetime.now().strftime("%Y-%m-%dT%H-%M-%S")
    suffix = "".join(random.choice(UID_CHARS) for _ in range(8))
    return f"{date}-{name}-{suffix}"


def validate_uid(uid: str) -> bool:
    return bool(UID_CHECK_RE.match(uid))
