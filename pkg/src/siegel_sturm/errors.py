"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""

from __future__ import annotations


class SiegelSturmError(Exception):
    code = "Error"

    def to_json(self) -> dict:
        return {"code": self.code, "message": str(self)}


class InvalidInput(SiegelSturmError, ValueError):
    code = "InvalidInput"


class ShapeMismatch(SiegelSturmError, ValueError):
    code = "ShapeMismatch"


class RamifiedPrime(SiegelSturmError, ValueError):
    code = "RamifiedPrime"


class IncompleteData(SiegelSturmError):
    code = "IncompleteData"


class TruncationInsufficient(SiegelSturmError):
    code = "TruncationInsufficient"

    def __init__(self, needed: int, available: int):
        super().__init__(f"truncation {available} is below the required cutoff {needed}")
        self.needed = needed
        self.available = available

    def to_json(self) -> dict:
        return {**super().to_json(), "cutoff": self.needed, "truncation": self.available}


class NotPIntegral(SiegelSturmError):
    code = "NotPIntegral"

    def __init__(self, p: int, witness, value):
        super().__init__(f"coefficient {value} at {witness} is not {p}-integral")
        self.p = p
        self.witness = witness
        self.value = value

    def to_json(self) -> dict:
        return {**super().to_json(), "p": self.p, "witness": _plain(self.witness)}


class InputInconsistent(SiegelSturmError):
    """Stored data contradicts the bounded-denominator assumption."""

    code = "InputInconsistent"

    def __init__(self, q: int, witness):
        super().__init__(
            f"integral below the cutoff but the coefficient at {witness} has a "
            f"denominator divisible by {q}"
        )
        self.q = q
        self.witness = witness

    def to_json(self) -> dict:
        return {**super().to_json(), "q": self.q, "witness": _plain(self.witness)}


def _plain(obj):
    if isinstance(obj, tuple):
        return [_plain(x) for x in obj]
    return obj
