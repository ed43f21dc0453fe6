"""Three-valued decision results shared by all decision procedures.

A Decision is "yes" with a verifying witness, "no" with a certificate
naming the obstruction, or "unknown" carrying the bound or backend
that gave up.  Procedures never turn incomplete search into a bare
no: every no names its reason, every unknown names its taint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional


@dataclass(frozen=True)
class Decision:
    answer: str
    witness: Any = None
    certificate: Any = None
    taint: Optional[str] = None

    def __post_init__(self) -> None:
        if self.answer not in ("yes", "no", "unknown"):
            raise ValueError(f"not a decision answer: {self.answer!r}")

    @property
    def is_yes(self) -> bool:
        return self.answer == "yes"

    @property
    def is_no(self) -> bool:
        return self.answer == "no"

    @property
    def is_unknown(self) -> bool:
        return self.answer == "unknown"


def yes(witness: Any = None, certificate: Any = None) -> Decision:
    return Decision("yes", witness=witness, certificate=certificate)


def no(certificate: Any = None) -> Decision:
    return Decision("no", certificate=certificate)


def unknown(taint: str) -> Decision:
    return Decision("unknown", taint=taint)
