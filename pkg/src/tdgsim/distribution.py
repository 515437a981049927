"""Replica-group selection strategies over a pool of candidate agents.

All strategies are pure functions of an immutable pool snapshot plus an
rng stream owned by the caller; same pool + seed gives identical groups.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .trust import TrustClass


class SelectionFailed(Exception):
    """The pool cannot satisfy the strategy; the WU is deferred a round."""


class FallbackToDRDS(Exception):
    """DGDS precondition unmet (no trusted or no untrusted candidate)."""


@dataclass(frozen=True)
class Candidate:
    agent: str
    tau: float
    f_min: int  # pre-drawn via effective_f_min
    trust_class: TrustClass
    busy: bool = False


@dataclass(frozen=True)
class ReplicaGroup:
    wu: str
    members: Tuple[str, ...]
    initiator: str
    short: bool = False  # availability clamped the group below its target size


def _free(pool: Sequence[Candidate]) -> List[Candidate]:
    return [c for c in pool if not c.busy]


def drds_select(pool: Sequence[Candidate], rng, wu: str = "") -> ReplicaGroup:
    """Random initiator; its f_min picks that many other random agents.

    If fewer free agents exist than f_min requires, the group is clamped
    to what is available and flagged short.
    """
    free = _free(pool)
    if len(free) < 2:
        raise SelectionFailed(f"need at least 2 free candidates, have {len(free)}")
    initiator = free[rng.randrange(len(free))]
    others = [c for c in free if c.agent != initiator.agent]
    take = min(initiator.f_min, len(others))
    chosen = rng.sample(others, take)
    members = (initiator.agent,) + tuple(c.agent for c in chosen)
    return ReplicaGroup(wu=wu, members=members, initiator=initiator.agent,
                        short=take < initiator.f_min)


def dods_assign(pool: Sequence[Candidate], wus: Sequence[str],
                allow_short: bool = False) -> Tuple[List[ReplicaGroup], List[str]]:
    """Ordered strategy: sort by f_min, fill each group until the highest
    f_min inside it is satisfied (a fixed point, since joining agents can
    raise the maximum).

    Returns (groups, deferred_wus).
    """
    free = sorted(_free(pool), key=lambda c: (c.f_min, c.agent))
    if not free:
        raise SelectionFailed("empty pool")
    groups: List[ReplicaGroup] = []
    deferred: List[str] = []
    idx = 0
    for pos, wu in enumerate(wus):
        if idx >= len(free):
            deferred.extend(wus[pos:])
            break
        group = [free[idx]]
        idx += 1
        max_f = group[0].f_min
        while len(group) < 1 + max_f and idx < len(free):
            group.append(free[idx])
            idx += 1
            max_f = max(max_f, group[-1].f_min)
        if len(group) >= 1 + max_f:
            groups.append(ReplicaGroup(wu=wu, members=tuple(c.agent for c in group),
                                       initiator=group[0].agent))
        elif allow_short and len(group) >= 2:
            groups.append(ReplicaGroup(wu=wu, members=tuple(c.agent for c in group),
                                       initiator=group[0].agent, short=True))
        else:
            deferred.append(wu)
    return groups, deferred


def dgds_select(pool: Sequence[Candidate], rng, wu: str = "",
                same_amount_total: bool = True) -> ReplicaGroup:
    """Grouping strategy: pair untrusted picks with at least as many
    trusted ones, then top up with undecided agents until the group's
    highest f_min is satisfied.

    Untrusted members can never outnumber trusted ones, so they cannot
    form a majority in the group.
    """
    free = _free(pool)
    untrusted = [c for c in free if c.trust_class is TrustClass.UNTRUSTED]
    trusted = [c for c in free if c.trust_class is TrustClass.TRUSTED]
    undecided = [c for c in free if c.trust_class is TrustClass.UNDECIDED]
    if not untrusted or not trusted:
        raise FallbackToDRDS("pool lacks a trusted/untrusted partition")

    picked_u = [untrusted.pop(rng.randrange(len(untrusted)))]
    max_f = picked_u[0].f_min
    # Extra untrusted picks, capped so enough trusted agents remain to
    # match the total untrusted count.
    while True:
        k_target = (max_f - 1) // 2
        extra = len(picked_u) - 1
        if extra >= k_target or not untrusted:
            break
        if same_amount_total and len(picked_u) + 1 > len(trusted):
            break
        nxt = untrusted.pop(rng.randrange(len(untrusted)))
        picked_u.append(nxt)
        max_f = max(max_f, nxt.f_min)

    n_trusted = len(picked_u) if same_amount_total else max(len(picked_u) - 1, 1)
    n_trusted = min(n_trusted, len(trusted))
    if same_amount_total:
        while len(picked_u) > n_trusted:  # keep untrusted <= trusted
            picked_u.pop()
    picked_t = rng.sample(trusted, n_trusted)

    group = picked_u + picked_t
    max_f = max(c.f_min for c in group)
    while len(group) < 1 + max_f and undecided:
        nxt = undecided.pop(rng.randrange(len(undecided)))
        group.append(nxt)
        max_f = max(max_f, nxt.f_min)
    if len(group) < 2:
        raise SelectionFailed("dgds group smaller than 2")
    return ReplicaGroup(wu=wu, members=tuple(c.agent for c in group),
                        initiator=picked_u[0].agent,
                        short=len(group) < 1 + max_f)


def random_baseline_select(pool: Sequence[Candidate], replication: int, rng,
                           wu: str = "") -> ReplicaGroup:
    """Control condition: uniform group of a fixed size, no trust input."""
    free = _free(pool)
    if replication < 1:
        raise SelectionFailed(f"replication {replication} must be >= 1")
    if len(free) < replication:
        raise SelectionFailed(f"need {replication} free candidates, have {len(free)}")
    chosen = rng.sample(free, replication)
    return ReplicaGroup(wu=wu, members=tuple(c.agent for c in chosen),
                        initiator=chosen[0].agent)
