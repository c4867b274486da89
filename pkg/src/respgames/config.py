"""Size caps and their environment overrides."""

from __future__ import annotations

import os

DEFAULT_NODE_CAP = 100_000
DEFAULT_SUBSET_CAP = 16
DEFAULT_ORACLE_CAP = 1_000_000


def node_cap() -> int:
    """Maximum node count for constructed trees; RESPGAMES_NODE_CAP overrides."""
    raw = os.environ.get("RESPGAMES_NODE_CAP")
    if raw is None:
        return DEFAULT_NODE_CAP
    value = int(raw)
    if value <= 0:
        raise ValueError("RESPGAMES_NODE_CAP must be positive")
    return value
