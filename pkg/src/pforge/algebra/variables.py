"""Global variable registry.

Variables are identified by small integers handed out in registration order.
The order is append-only, so the monomial ordering among already registered
variables never changes during a process; canonical forms stay stable.
"""

import re
import threading

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
RESERVED = frozenset({"zeta"})

_lock = threading.Lock()
_names: list[str] = []
_index: dict[str, int] = {}


def is_valid_name(name: str) -> bool:
    return bool(_NAME_RE.match(name)) and name not in RESERVED


def var_index(name: str) -> int:
    """Index of `name`, registering it on first use."""
    idx = _index.get(name)
    if idx is not None:
        return idx
    if not is_valid_name(name):
        raise ValueError(f"invalid variable name {name!r}")
    with _lock:
        idx = _index.get(name)
        if idx is None:
            idx = len(_names)
            _names.append(name)
            _index[name] = idx
    return idx


def var_name(idx: int) -> str:
    return _names[idx]


def register(*names: str) -> list[int]:
    return [var_index(n) for n in names]


def registered() -> tuple[str, ...]:
    return tuple(_names)
