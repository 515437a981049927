"""Rating, reputation aggregation, trust classes and replication factors."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, Iterable


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


DEFAULT_WINDOW = 50
TRUSTED_ABOVE = 0.7
UNTRUSTED_AT_OR_BELOW = 0.4
NEUTRAL_TAU = 0.5


class RatingCause(Enum):
    CORRECT_ON_TIME = "correct_on_time"
    CORRECT_LATE = "correct_late"
    WRONG_RESULT = "wrong_result"
    REJECTED_WU = "rejected_wu"
    DROPPED_WU = "dropped_wu"
    TIMED_OUT = "timed_out"


# Fixed value table; all ratings entering the system come from these causes.
CAUSE_VALUES = {
    RatingCause.CORRECT_ON_TIME: 1.0,
    RatingCause.CORRECT_LATE: 0.5,
    RatingCause.REJECTED_WU: -0.25,
    RatingCause.DROPPED_WU: -0.75,
    RatingCause.TIMED_OUT: -0.75,
    RatingCause.WRONG_RESULT: -1.0,
}


class TrustClass(Enum):
    TRUSTED = "trusted"
    UNDECIDED = "undecided"
    UNTRUSTED = "untrusted"


@dataclass(frozen=True)
class Rating:
    rater: str
    subject: str
    value: float
    tick: int
    cause: RatingCause

    def __post_init__(self) -> None:
        if not -1.0 <= self.value <= 1.0:
            raise ValidationError(f"rating value {self.value} outside [-1, 1]")

    @classmethod
    def from_cause(cls, rater: str, subject: str, cause: RatingCause, tick: int) -> "Rating":
        return cls(rater=rater, subject=subject, value=CAUSE_VALUES[cause], tick=tick, cause=cause)


def aggregate_reputation(values: Iterable[float]) -> float:
    """Map a window of ratings in [-1, 1] to a reputation in [0, 1].

    Affine-scaled arithmetic mean; an empty window is neutral (0.5).
    """
    vals = list(values)
    if not vals:
        return NEUTRAL_TAU
    for v in vals:
        if not -1.0 <= v <= 1.0:
            raise ValidationError(f"rating value {v} outside [-1, 1]")
    return (1.0 + sum(vals) / len(vals)) / 2.0


@dataclass
class ReputationProfile:
    """Sliding window of the most recent ratings about one subject."""

    subject: str
    window_size: int = DEFAULT_WINDOW
    window: Deque[Rating] = field(default_factory=deque)

    @property
    def tau(self) -> float:
        return aggregate_reputation(r.value for r in self.window)

    def record(self, rating: Rating) -> "ReputationProfile":
        if rating.subject != self.subject:
            raise ValidationError(
                f"rating subject {rating.subject!r} does not match profile {self.subject!r}"
            )
        self.window.append(rating)
        while len(self.window) > self.window_size:
            self.window.popleft()
        return self


def record_rating(profile: ReputationProfile, rating: Rating) -> ReputationProfile:
    return profile.record(rating)


def classify(tau: float) -> TrustClass:
    if not 0.0 <= tau <= 1.0:
        raise ValidationError(f"tau {tau} outside [0, 1]")
    if tau > TRUSTED_ABOVE:
        return TrustClass.TRUSTED
    if tau <= UNTRUSTED_AT_OR_BELOW:
        return TrustClass.UNTRUSTED
    return TrustClass.UNDECIDED


@dataclass(frozen=True)
class ReplicationLimits:
    lo: float = 1.5
    hi: float = 5.0

    def __post_init__(self) -> None:
        if not 1.0 <= self.lo <= self.hi:
            raise ValidationError(f"invalid replication limits ({self.lo}, {self.hi})")


def raw_replication_factor(tau: float, limits: ReplicationLimits = ReplicationLimits()) -> float:
    """Linear interpolation between the limits; high reputation means low factor."""
    if not 0.0 <= tau <= 1.0:
        raise ValidationError(f"tau {tau} outside [0, 1]")
    return limits.hi - tau * (limits.hi - limits.lo)


def roulette_round(x: float, rng) -> int:
    """Round x down or up at random so the expected value equals x.

    Consumes exactly one draw from rng.
    """
    if x < 0:
        raise ValidationError(f"cannot roulette-round negative value {x}")
    base = math.floor(x)
    frac = x - base
    return base + (1 if rng.random() < frac else 0)


def effective_f_min(tau: float, limits: ReplicationLimits, rng) -> int:
    """Number of OTHER agents that must co-compute a work unit."""
    return roulette_round(raw_replication_factor(tau, limits), rng)
