"""Check outcomes and their aggregation."""
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


class Verdict(Enum):
    PASS = "Pass"
    MARGINAL = "Marginal"
    FAIL = "Fail"


_SEVERITY = {Verdict.PASS: 0, Verdict.MARGINAL: 1, Verdict.FAIL: 2}


def classify(margin, scale, tol):
    if margin >= 0.0:
        return Verdict.PASS
    if margin >= -tol * scale:
        return Verdict.MARGINAL
    return Verdict.FAIL


def _relation(margin, backward, scale, tol):
    slack = -tol * scale
    le, ge = margin >= slack, backward >= slack
    if le and ge:
        return "Equal"
    if le:
        return "LessEqual"
    if ge:
        return "GreaterEqual"
    return "Incomparable"


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


@dataclass(frozen=True)
class CheckOutcome:
    """One evaluated claim ``lhs <= rhs``.

    ``margin`` is the signed slack of the claim (smallest eigenvalue of
    rhs - lhs for operator claims, rhs - lhs for scalar ones) and ``scale``
    the magnitude the tolerance is relative to.
    """

    check_id: str
    instance_seed: int
    verdict: Verdict
    margin: float
    scale: float
    tolerance: float
    relation: str = "LessEqual"
    details: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_margins(cls, check_id, margin, backward, scale, tol, seed=0, details=None):
        margin, backward, scale = float(margin), float(backward), float(scale)
        return cls(
            check_id=check_id,
            instance_seed=int(seed),
            verdict=classify(margin, scale, tol),
            margin=margin,
            scale=scale,
            tolerance=float(tol),
            relation=_relation(margin, backward, scale, tol),
            details=details or {},
        )

    @classmethod
    def from_loewner(cls, check_id, verdict, seed=0, details=None):
        """Build from a :class:`~opconvex.core.LoewnerVerdict` of ``lhs`` vs ``rhs``."""
        return cls.from_margins(
            check_id,
            verdict.forward_margin,
            verdict.backward_margin,
            verdict.scale,
            verdict.tolerance,
            seed=seed,
            details=details,
        )

    @classmethod
    def from_scalar(cls, check_id, lhs, rhs, tol, scale=None, seed=0, details=None):
        lhs, rhs = float(lhs), float(rhs)
        if scale is None:
            scale = max(abs(lhs), abs(rhs))
        return cls.from_margins(check_id, rhs - lhs, lhs - rhs, scale, tol, seed=seed, details=details)

    @property
    def normalized_margin(self):
        return self.margin / self.scale if self.scale > 0 else self.margin

    def reevaluate(self, tol):
        """Re-classify the stored margin at another tolerance."""
        return replace(self, verdict=classify(self.margin, self.scale, tol), tolerance=float(tol))

    def to_dict(self):
        return {
            "check_id": self.check_id,
            "instance_seed": self.instance_seed,
            "verdict": self.verdict.value,
            "relation": self.relation,
            "margin": self.margin,
            "scale": self.scale,
            "tolerance": self.tolerance,
            "details": _jsonable(self.details),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            check_id=data["check_id"],
            instance_seed=int(data["instance_seed"]),
            verdict=Verdict(data["verdict"]),
            margin=float(data["margin"]),
            scale=float(data["scale"]),
            tolerance=float(data["tolerance"]),
            relation=data.get("relation", "LessEqual"),
            details=data.get("details", {}),
        )


def worst_of(check_id, outcomes, seed=0):
    """Collapse several component outcomes into the least favourable one."""
    outcomes = list(outcomes)
    worst = max(outcomes, key=lambda o: (_SEVERITY[o.verdict], -o.normalized_margin))
    details = {o.check_id: {"verdict": o.verdict.value, "margin": o.margin, "scale": o.scale,
                            **_jsonable(o.details)} for o in outcomes}
    return replace(worst, check_id=check_id, instance_seed=int(seed), details=details)


@dataclass
class CheckSummary:
    """Running aggregate of outcomes for one check id."""

    check_id: str
    total: int = 0
    passed: int = 0
    marginal: int = 0
    failed: int = 0
    worst_margin: float = float("inf")
    worst_normalized_margin: float = float("inf")
    worst_seed: int = -1
    _worst_rank: tuple = field(default=(-1, 0.0), repr=False, compare=False)

    def add(self, outcome):
        self.total += 1
        if outcome.verdict is Verdict.PASS:
            self.passed += 1
        elif outcome.verdict is Verdict.MARGINAL:
            self.marginal += 1
        else:
            self.failed += 1
        rank = (_SEVERITY[outcome.verdict], -outcome.normalized_margin)
        if rank > self._worst_rank:
            self._worst_rank = rank
            self.worst_normalized_margin = outcome.normalized_margin
            self.worst_margin = outcome.margin
            self.worst_seed = outcome.instance_seed
        return self

    def to_dict(self):
        return {
            "check_id": self.check_id,
            "total": self.total,
            "passed": self.passed,
            "marginal": self.marginal,
            "failed": self.failed,
            "worst_margin": self.worst_margin if self.total else None,
            "worst_normalized_margin": self.worst_normalized_margin if self.total else None,
            "worst_seed": self.worst_seed if self.total else None,
        }

    @classmethod
    def from_dict(cls, data):
        out = cls(data["check_id"], int(data["total"]), int(data["passed"]),
                  int(data["marginal"]), int(data["failed"]))
        if out.total:
            out.worst_margin = float(data["worst_margin"])
            out.worst_normalized_margin = float(data["worst_normalized_margin"])
            out.worst_seed = int(data["worst_seed"])
            severity = 2 if out.failed else 1 if out.marginal else 0
            out._worst_rank = (severity, -out.worst_normalized_margin)
        return out
