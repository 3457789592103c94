"""Reachability problem and result records shared by both engines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .dbm import Dbm, DbmError, canonicalize
from .maxplus import DimensionError, MaxPlusMatrix, as_scalar

MODES = ("forward", "backward")
STRATEGIES = ("sequential", "oneshot")


class ReachTimeout(RuntimeError):
    """A run passed its wall-clock deadline."""


@dataclass(frozen=True)
class ReachSpec:
    A: MaxPlusMatrix
    X: Dbm
    Y: Dbm
    N: int
    mode: str = "forward"
    strategy: str = "sequential"
    check_k0: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.N < 0:
            raise ValueError("horizon N must be non-negative")
        for name, D in (("X", self.X), ("Y", self.Y)):
            if D.n != self.A.n:
                raise DimensionError(f"{name} is over {D.n} variables but A is {self.A.n}x{self.A.n}")
        X, Y = canonicalize(self.X), canonicalize(self.Y)
        if X is None or Y is None:
            raise DbmError("initial and target sets must be non-empty")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)


def _json_number(v):
    v = as_scalar(v)
    return v if isinstance(v, int) else str(v)


@dataclass
class ReachResult:
    """Verdict of a bounded reachability run.

    ``step`` is the earliest ``k`` with a hit when ``reachable``; for a
    backward run that stopped because the backward set became empty it is
    the step at which that happened (and ``emptied`` is set).
    """

    reachable: bool
    step: Optional[int] = None
    witness: Optional[list] = None
    emptied: bool = False
    set_sizes: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "reachable": self.reachable,
            "step": self.step,
            "emptied": self.emptied,
        }
        if self.set_sizes:
            out["sets_sizes"] = list(self.set_sizes)
        if self.witness is not None:
            out["witness"] = [[_json_number(v) for v in x] for x in self.witness]
        if self.stats:
            out["stats"] = dict(self.stats)
        return out
