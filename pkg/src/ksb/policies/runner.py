"""Policy specifications and the single entry point for running them."""

from __future__ import annotations

from dataclasses import dataclass

from ..envs import STOCKOUT_VOID, RunRecord
from .baselines import run_explore_then_exploit, run_primal_dual, run_thompson
from .ls2slp import run_ls2slp
from .tweaked import run_tweaked_lp

KIND_LS2SLP = "LS2SLP"
KIND_TWEAKED = "TweakedLP"
KIND_BZ12 = "BZ12"
KIND_FSW18 = "FSW18"
KIND_PD = "PD"

_KINDS = (KIND_LS2SLP, KIND_TWEAKED, KIND_BZ12, KIND_FSW18, KIND_PD)


@dataclass(frozen=True)
class PolicySpec:
    """Declarative description of a policy and its hyperparameters.

    ``kind`` is one of LS2SLP, TweakedLP, BZ12, FSW18, PD; the alias
    ``LS2SLP_Update`` selects LS2SLP with ``update_inventory=True``.
    """

    kind: str
    s: int | None = None                  # switching budget (LS2SLP)
    gamma_mode: str = "fixed"             # "fixed" | "formula"
    gamma_value: float = 1.0
    update_inventory: bool = False
    theta: float = 1.0                    # exploration-length scale (BZ12)
    prior: tuple[float, float] = (1.0, 1.0)   # Beta prior (FSW18)
    eps: float | None = None              # dual step size (PD)
    stockout: str = STOCKOUT_VOID
    name: str | None = None

    def __post_init__(self):
        kind = self.kind
        if kind.endswith("_Update"):
            kind = kind[: -len("_Update")]
            object.__setattr__(self, "update_inventory", True)
        if kind not in _KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == KIND_LS2SLP:
            if self.s is None or self.s < 0:
                raise ValueError("LS2SLP needs a nonnegative switching budget s")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        suffix = "-Update" if self.update_inventory else ""
        if self.kind == KIND_LS2SLP:
            return f"LS({self.s}){suffix}"
        return f"{self.kind}{suffix}"

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.s is not None:
            out["s"] = self.s
        if self.gamma_mode != "fixed" or self.gamma_value != 1.0:
            out["gamma_mode"] = self.gamma_mode
            out["gamma_value"] = self.gamma_value
        if self.update_inventory:
            out["update_inventory"] = True
        if self.theta != 1.0:
            out["theta"] = self.theta
        if self.prior != (1.0, 1.0):
            out["prior"] = list(self.prior)
        if self.eps is not None:
            out["eps"] = self.eps
        if self.stockout != STOCKOUT_VOID:
            out["stockout"] = self.stockout
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "PolicySpec":
        doc = dict(doc)
        if "prior" in doc:
            doc["prior"] = tuple(doc["prior"])
        return cls(**doc)


_RUNNERS = {
    KIND_LS2SLP: run_ls2slp,
    KIND_TWEAKED: run_tweaked_lp,
    KIND_BZ12: run_explore_then_exploit,
    KIND_FSW18: run_thompson,
    KIND_PD: run_primal_dual,
}


def run_policy(spec: PolicySpec, inst, seed) -> RunRecord:
    """Run one full trajectory of ``spec`` on ``inst``.

    A pure function of (spec, instance, seed): identical inputs give
    bit-identical records.  Budgeted kinds never exceed their switch budget;
    an attempted violation degrades the schedule and raises the record's
    ``guard_tripped`` flag instead of crashing.
    """
    return _RUNNERS[spec.kind](spec, inst, seed)
