"""Explicit trust community state machine: formation, manager election,
operation (monitoring, invitation, eviction) and dissolution."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple


class StateError(RuntimeError):
    """Operation invoked in the wrong lifecycle phase."""


class DissolutionTriggered(Exception):
    """No member can take over; the community must dissolve."""


class Phase(Enum):
    PRE_ORGANISATION = "pre_organisation"
    FORMATION = "formation"
    OPERATION = "operation"
    DISSOLVED = "dissolved"


# Legal phase transitions (Formation may abort straight to Dissolved).
ALLOWED_TRANSITIONS = {
    (Phase.PRE_ORGANISATION, Phase.FORMATION),
    (Phase.FORMATION, Phase.OPERATION),
    (Phase.FORMATION, Phase.DISSOLVED),
    (Phase.OPERATION, Phase.DISSOLVED),
}


class EventKind(Enum):
    INVITED = "invited"
    JOINED = "joined"
    LEFT = "left"
    EVICTED = "evicted"
    TCM_ELECTED = "tcm_elected"
    TCM_FAILED = "tcm_failed"
    DISSOLVED = "dissolved"
    PHASE = "phase"


@dataclass(frozen=True)
class MembershipEvent:
    tick: int
    seq: int
    kind: EventKind
    agent: str
    detail: str = ""


@dataclass
class CommunityParams:
    min_size: int = 5
    max_size: int = 20
    join_threshold: float = 0.7
    evict_threshold: float = 0.5
    drop_delta: float = 0.2
    dissolve_fraction: float = 0.5
    election_delay: int = 1


# Actions emitted by operate_tick for the engine to apply.
@dataclass(frozen=True)
class Evict:
    agent: str


@dataclass(frozen=True)
class Invite:
    agent: str


@dataclass(frozen=True)
class AssignMonitor:
    agent: str
    targets: Tuple[str, ...]


@dataclass
class TrustCommunity:
    id: str
    founder: str
    phase: Phase = Phase.PRE_ORGANISATION
    members: Dict[str, int] = field(default_factory=dict)  # agent -> joined_tick
    join_tau: Dict[str, float] = field(default_factory=dict)  # tau at join time (audit)
    tcm: Optional[str] = None
    binary_holders: Set[str] = field(default_factory=set)
    peak_size: int = 0
    events: List[MembershipEvent] = field(default_factory=list)
    declined: Set[str] = field(default_factory=set)
    _seq: int = 0

    def log(self, tick: int, kind: EventKind, agent: str = "", detail: str = "") -> None:
        self.events.append(MembershipEvent(tick, self._seq, kind, agent, detail))
        self._seq += 1

    def _transition(self, to: Phase, tick: int) -> None:
        if (self.phase, to) not in ALLOWED_TRANSITIONS:
            raise StateError(f"illegal phase transition {self.phase.value} -> {to.value}")
        self.log(tick, EventKind.PHASE, detail=f"{self.phase.value}->{to.value}")
        self.phase = to

    def add_member(self, agent: str, tick: int, tau: float) -> None:
        self.members[agent] = tick
        self.join_tau[agent] = tau
        self.binary_holders.add(agent)  # every member stores the WU construction binary
        self.peak_size = max(self.peak_size, len(self.members))
        self.log(tick, EventKind.JOINED, agent)

    def remove_member(self, agent: str, tick: int, kind: EventKind) -> None:
        self.members.pop(agent, None)
        self.join_tau.pop(agent, None)
        self.binary_holders.discard(agent)
        self.log(tick, kind, agent)

    def form(self, tick: int, joiners: Sequence[str], taus: Mapping[str, float],
             founder_tau: float = 1.0) -> None:
        if self.phase is not Phase.PRE_ORGANISATION:
            raise StateError("can only form from pre-organisation")
        self._transition(Phase.FORMATION, tick)
        self.add_member(self.founder, tick, founder_tau)
        for a in sorted(joiners):
            self.add_member(a, tick, taus.get(a, 0.5))

    def dissolve(self, tick: int) -> None:
        self._transition(Phase.DISSOLVED, tick)
        self.tcm = None
        for a in sorted(self.members):
            self.remove_member(a, tick, EventKind.LEFT)
        self.log(tick, EventKind.DISSOLVED)


def evaluate_formation(founder: str, reputations: Mapping[str, float],
                       params: CommunityParams) -> Optional[List[str]]:
    """Invitation list for a new community, or None below quorum.

    All agents at or above the join threshold, best reputation first,
    capped at max_size; only worthwhile if at least min_size qualify.
    """
    eligible = [(tau, a) for a, tau in reputations.items()
                if a != founder and tau >= params.join_threshold]
    eligible.sort(key=lambda it: (-it[0], it[1]))
    invites = [a for _, a in eligible[:params.max_size]]
    if len(invites) < params.min_size:
        return None
    return invites


def join_decision(egoistic: bool, inside_share: float, outside_share: float) -> bool:
    """Join only when the expected per-WU credit share strictly improves."""
    if egoistic:
        return False
    return inside_share > outside_share


def elect_tcm(tc: TrustCommunity, availability: Mapping[str, bool], tick: int) -> str:
    """First election goes to the founder when available; afterwards the
    longest-serving available member wins, ties by agent id."""
    if tc.phase not in (Phase.FORMATION, Phase.OPERATION):
        raise StateError(f"cannot elect a manager in phase {tc.phase.value}")
    available = [a for a in tc.members if availability.get(a, False)]
    if not available:
        raise DissolutionTriggered(tc.id)
    if tc.phase is Phase.FORMATION and availability.get(tc.founder, False):
        winner = tc.founder
    else:
        winner = min(available, key=lambda a: (tc.members[a], a))
    tc.tcm = winner
    if tc.phase is Phase.FORMATION:
        tc._transition(Phase.OPERATION, tick)
    tc.log(tick, EventKind.TCM_ELECTED, winner)
    return winner


def handle_tcm_failure(tc: TrustCommunity, availability: Mapping[str, bool],
                       tick: int) -> str:
    """Replace an unavailable manager so WU distribution continues; the
    old founder gets buffered results back but leadership does not revert."""
    if tc.phase is not Phase.OPERATION:
        raise StateError("failover only applies to an operating community")
    tc.log(tick, EventKind.TCM_FAILED, tc.tcm or "")
    return elect_tcm(tc, availability, tick)


def assign_monitors(members: Sequence[str]) -> List[AssignMonitor]:
    """Partition monitoring duty round-robin; nobody monitors themselves."""
    ordered = sorted(members)
    n = len(ordered)
    if n < 2:
        return []
    return [AssignMonitor(agent=ordered[i], targets=(ordered[(i + 1) % n],))
            for i in range(n)]


def operate_tick(tc: TrustCommunity, reputations: Mapping[str, float],
                 outsiders: Mapping[str, float], params: CommunityParams,
                 tick: int) -> List[object]:
    """One operation-phase step: evict decayed members, invite strong
    outsiders while below max size, distribute the monitoring duty."""
    if tc.phase is not Phase.OPERATION:
        raise StateError(f"operate_tick in phase {tc.phase.value}")
    actions: List[object] = []
    for a in sorted(tc.members):
        if a == tc.tcm:
            continue
        tau = reputations.get(a, 0.5)
        if tau < params.evict_threshold or tc.join_tau.get(a, tau) - tau > params.drop_delta:
            actions.append(Evict(a))
    room = params.max_size - len(tc.members)
    if room > 0:
        eligible = [(tau, a) for a, tau in outsiders.items()
                    if tau >= params.join_threshold
                    and a not in tc.members and a not in tc.declined]
        eligible.sort(key=lambda it: (-it[0], it[1]))
        actions.extend(Invite(a) for _, a in eligible[:room])
    actions.extend(assign_monitors(list(tc.members)))
    return actions


def dissolve_check(tc: TrustCommunity, params: CommunityParams,
                   queue_exhausted: bool) -> bool:
    """True when the community no longer carries its weight: shrunk below
    quorum, below the dissolution fraction of its peak, or out of work."""
    if tc.phase is not Phase.OPERATION:
        raise StateError("dissolve_check outside operation")
    size = len(tc.members)
    return (queue_exhausted
            or size < params.min_size
            or size < params.dissolve_fraction * tc.peak_size)


def replay_events(events: Sequence[MembershipEvent]) -> dict:
    """Rebuild the observable community state from its event log."""
    phase = Phase.PRE_ORGANISATION
    members: Dict[str, int] = {}
    tcm: Optional[str] = None
    peak = 0
    for ev in events:
        if ev.kind is EventKind.PHASE:
            phase = Phase(ev.detail.split("->")[1])
        elif ev.kind is EventKind.JOINED:
            members[ev.agent] = ev.tick
            peak = max(peak, len(members))
        elif ev.kind in (EventKind.LEFT, EventKind.EVICTED):
            members.pop(ev.agent, None)
        elif ev.kind is EventKind.TCM_ELECTED:
            tcm = ev.agent
        elif ev.kind is EventKind.DISSOLVED:
            tcm = None
    return {"phase": phase, "members": members, "tcm": tcm, "peak_size": peak}
