"""Exception hierarchy.

Domain errors (bad inputs, cap violations, refused computations) derive
from RespgamesError and map to CLI exit code 1; anything else escaping a
command is an internal error (exit code 2).
"""

from __future__ import annotations


class RespgamesError(Exception):
    """Base class for all domain-level failures."""


class InputError(RespgamesError):
    """Malformed or semantically invalid input data."""


class GameValidationError(RespgamesError):
    """A game failed structural validation where a valid game is required."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        super().__init__(f"invalid game: {lines}")


class ImperfectRecallError(RespgamesError):
    """A solver step requires perfect recall and a witness pair refutes it."""

    def __init__(self, witnesses):
        self.witnesses = list(witnesses)
        w = self.witnesses[0]
        super().__init__(
            f"imperfect recall: player {w[0]}, info set {w[1]!r}, "
            f"witness nodes {w[2][0]!r}/{w[2][1]!r}"
        )


class CapExceededError(RespgamesError):
    """A configured size cap (nodes, subsets, oracle strategies) was exceeded."""
