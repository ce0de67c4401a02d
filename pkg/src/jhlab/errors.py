"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: bad input is exit 2,
a failed internal identity check is exit 1.
"""


class JhlabError(Exception):
    """Base class for all package errors."""


class InputError(JhlabError):
    """Malformed or out-of-contract input (bad file, bad level, bad rule)."""


class TruncationError(JhlabError):
    """A truncated branch is too shallow for the vector it is applied to."""


class OracleTooLargeError(InputError):
    """Brute-force enumeration was requested beyond its size bound."""


class ExactBoundExceededError(InputError):
    """Exact sign enumeration was requested beyond the dimension bound;
    use the heuristic lower bound instead."""


class SelfCheckError(JhlabError):
    """An exact internal identity that must hold by construction failed."""
