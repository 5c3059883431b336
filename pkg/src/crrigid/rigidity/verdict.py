from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Status(str, Enum):
    RIGID = "RIGID"
    NOT_RIGID = "NOT_RIGID"
    DEGENERATE = "DEGENERATE"


@dataclass(frozen=True)
class LinearSystem:
    """Shape and exact rank of one linear system solved for a verdict.

    ``matrix`` is kept so tests can cross-check the rank numerically.
    """

    rows: int
    cols: int
    rank: int
    matrix: object = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "rank": self.rank}


@dataclass(frozen=True)
class RigidityVerdict:
    """Outcome of a Bochner or Weyl rigidity decision.

    ``solution_space`` is a real basis of all solutions P.  ``gamma_kernel``
    is a real basis of the solutions that the definition treats as trivial:
    for Bochner rigidity the P with gamma(H, P) = 0, for Weyl rigidity the
    skew mixings of H plus pure-trace forms.
    """

    status: Status
    witness: object | None
    solution_space: tuple
    gamma_kernel: tuple
    systems: dict = field(default_factory=dict)

    @property
    def rigid(self) -> bool:
        return self.status is Status.RIGID

    def to_json(self, emit_witness: bool = True) -> dict:
        return {
            "status": self.status.value,
            "witness": self.witness.to_json() if (emit_witness and self.witness is not None) else None,
            "solution_dim": len(self.solution_space),
            "kernel_dim": len(self.gamma_kernel),
            "systems": {k: v.to_json() for k, v in self.systems.items()},
        }
