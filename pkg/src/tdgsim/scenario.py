"""Scenario parsing, execution and report emission.

Scenario files are INI-style key/value sections.  Unknown keys, dangling
fault references and non-positive horizons are load errors; all errors in
a file are reported together, not just the first.
"""
from __future__ import annotations

import configparser
import json
from pathlib import Path
from typing import List, Optional, Tuple

from .config import (MODES, PROFILES, STRATEGIES, AgentGroup, Fault, Params,
                     ScenarioConfig)
from .engine import SimEvent, World
from .ledger import Ledger
from .metrics import MetricsReport, compute_metrics
from .trust import ReplicationLimits


class ConfigError(ValueError):
    def __init__(self, errors: List[str]) -> None:
        super().__init__("; ".join(errors))
        self.errors = errors


_SCENARIO_KEYS = {"name", "mode", "strategy", "seed", "horizon_ticks"}
_WORK_KEYS = {"wu_count", "complexity", "base_credit"}
_SERVER_KEYS = {"count", "timeout_ticks"}
_AGENT_KEYS = {"count", "profile", "speed", "churn", "accept_prob"}
_PARAM_KEYS = {"window", "min_size", "max_size", "join_threshold",
               "evict_threshold", "drop_delta", "dissolve_fraction",
               "election_delay", "formation", "allow_short_groups",
               "dgds_same_amount", "max_requeues", "random_replication"}
_LIMIT_KEYS = {"lo", "hi"}


def _bool(raw: str) -> bool:
    if raw.lower() in ("on", "true", "yes", "1"):
        return True
    if raw.lower() in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario file; raises ConfigError listing
    every problem found."""
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"scenario file not found: {path}"])
    ini = configparser.ConfigParser(delimiters=("=",), inline_comment_prefixes=("#", ";"))
    try:
        ini.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError([f"malformed scenario file: {exc}"])

    errors: List[str] = []
    cfg = ScenarioConfig()

    def get(section: str, key: str, cast, default, errlabel: Optional[str] = None):
        if not ini.has_option(section, key):
            return default
        raw = ini.get(section, key)
        try:
            return cast(raw)
        except (ValueError, TypeError):
            errors.append(f"[{section}] {errlabel or key}: cannot parse {raw!r}")
            return default

    def check_keys(section: str, allowed: set) -> None:
        for key in ini.options(section):
            if key not in allowed:
                errors.append(f"[{section}] unknown key {key!r}")

    for section in ini.sections():
        if section == "scenario":
            check_keys(section, _SCENARIO_KEYS)
            cfg.name = get(section, "name", str, cfg.name)
            cfg.mode = get(section, "mode", str, cfg.mode)
            cfg.strategy = get(section, "strategy", str, cfg.strategy)
            cfg.seed = get(section, "seed", int, cfg.seed)
            cfg.horizon_ticks = get(section, "horizon_ticks", int, cfg.horizon_ticks)
        elif section == "work":
            check_keys(section, _WORK_KEYS)
            cfg.wu_count = get(section, "wu_count", int, cfg.wu_count)
            cfg.complexity = get(section, "complexity", str, cfg.complexity)
            cfg.base_credit = get(section, "base_credit", int, cfg.base_credit)
        elif section == "servers":
            check_keys(section, _SERVER_KEYS)
            cfg.server_count = get(section, "count", int, cfg.server_count)
            cfg.timeout_ticks = get(section, "timeout_ticks", int, cfg.timeout_ticks)
        elif section.startswith("agents"):
            check_keys(section, _AGENT_KEYS)
            label = section.split(None, 1)[1].strip() if " " in section else "agents"
            group = AgentGroup(
                label=label,
                count=get(section, "count", int, 0),
                profile=get(section, "profile", str, "reliable"),
                speed=get(section, "speed", int, 1),
                accept_prob=get(section, "accept_prob", float, 1.0))
            churn_raw = get(section, "churn", str, "")
            if churn_raw:
                try:
                    up, down = (int(x) for x in churn_raw.split("/"))
                    group.churn = (up, down)
                except ValueError:
                    errors.append(f"[{section}] churn: expected UP/DOWN, got {churn_raw!r}")
            if group.profile not in PROFILES:
                errors.append(f"[{section}] unknown profile {group.profile!r}")
            if group.count < 1:
                errors.append(f"[{section}] count must be >= 1")
            if group.speed < 1:
                errors.append(f"[{section}] speed must be >= 1")
            cfg.agents.append(group)
        elif section == "faults":
            for key in ini.options(section):
                raw = ini.get(section, key)
                parts = raw.split()
                if len(parts) != 3 or parts[2] not in ("down", "up"):
                    errors.append(f"[faults] {key}: expected 'TICK ENTITY down|up', got {raw!r}")
                    continue
                try:
                    tick = int(parts[0])
                except ValueError:
                    errors.append(f"[faults] {key}: bad tick {parts[0]!r}")
                    continue
                cfg.faults.append(Fault(tick=tick, entity=parts[1],
                                        down=parts[2] == "down"))
        elif section == "params":
            check_keys(section, _PARAM_KEYS)
            p = cfg.params
            p.window = get(section, "window", int, p.window)
            p.min_size = get(section, "min_size", int, p.min_size)
            p.max_size = get(section, "max_size", int, p.max_size)
            p.join_threshold = get(section, "join_threshold", float, p.join_threshold)
            p.evict_threshold = get(section, "evict_threshold", float, p.evict_threshold)
            p.drop_delta = get(section, "drop_delta", float, p.drop_delta)
            p.dissolve_fraction = get(section, "dissolve_fraction", float, p.dissolve_fraction)
            p.election_delay = get(section, "election_delay", int, p.election_delay)
            p.formation = get(section, "formation", _bool, p.formation)
            p.allow_short_groups = get(section, "allow_short_groups", _bool,
                                       p.allow_short_groups)
            p.dgds_same_amount = get(section, "dgds_same_amount", str, p.dgds_same_amount)
            p.max_requeues = get(section, "max_requeues", int, p.max_requeues)
            p.random_replication = get(section, "random_replication", float,
                                       p.random_replication)
        elif section == "limits":
            check_keys(section, _LIMIT_KEYS)
            lo = get(section, "lo", float, cfg.limits.lo)
            hi = get(section, "hi", float, cfg.limits.hi)
            try:
                cfg.limits = ReplicationLimits(lo, hi)
            except ValueError as exc:
                errors.append(f"[limits] {exc}")
        else:
            errors.append(f"unknown section [{section}]")

    errors.extend(validate_config(cfg))
    if errors:
        raise ConfigError(errors)
    return cfg


def validate_config(cfg: ScenarioConfig) -> List[str]:
    errors: List[str] = []
    if cfg.mode not in MODES:
        errors.append(f"unknown mode {cfg.mode!r}")
    if cfg.strategy not in STRATEGIES:
        errors.append(f"unknown strategy {cfg.strategy!r}")
    if cfg.horizon_ticks <= 0:
        errors.append(f"horizon_ticks must be positive, got {cfg.horizon_ticks}")
    if cfg.server_count < 1:
        errors.append("servers count must be >= 1")
    if cfg.wu_count < 0:
        errors.append("wu_count must be >= 0")
    known = set(cfg.agent_ids()) | set(cfg.server_ids())
    seen = set()
    for g in cfg.agents:
        for aid in g.agent_ids():
            if aid in seen:
                errors.append(f"duplicate agent group label {g.label!r}")
                break
            seen.add(aid)
    for f in cfg.faults:
        if f.entity not in known:
            errors.append(f"fault at tick {f.tick} references unknown entity {f.entity!r}")
        if f.tick < 1:
            errors.append(f"fault tick {f.tick} must be >= 1")
    if cfg.params.dgds_same_amount not in ("total", "additional"):
        errors.append(f"dgds_same_amount must be total|additional, "
                      f"got {cfg.params.dgds_same_amount!r}")
    return errors


def render_config(cfg: ScenarioConfig) -> str:
    """Effective configuration echo, itself a parseable scenario file."""
    p = cfg.params
    lines = [
        "[scenario]",
        f"name = {cfg.name}",
        f"mode = {cfg.mode}",
        f"strategy = {cfg.strategy}",
        f"seed = {cfg.seed}",
        f"horizon_ticks = {cfg.horizon_ticks}",
        "",
        "[work]",
        f"wu_count = {cfg.wu_count}",
        f"complexity = {cfg.complexity}",
        f"base_credit = {cfg.base_credit}",
        "",
        "[servers]",
        f"count = {cfg.server_count}",
        f"timeout_ticks = {cfg.timeout_ticks}",
    ]
    for g in cfg.agents:
        lines += ["", f"[agents {g.label}]",
                  f"count = {g.count}", f"profile = {g.profile}",
                  f"speed = {g.speed}", f"accept_prob = {g.accept_prob}"]
        if g.churn:
            lines.append(f"churn = {g.churn[0]}/{g.churn[1]}")
    if cfg.faults:
        lines += ["", "[faults]"]
        for i, f in enumerate(cfg.faults):
            lines.append(f"f{i} = {f.tick} {f.entity} {'down' if f.down else 'up'}")
    lines += [
        "",
        "[params]",
        f"window = {p.window}",
        f"min_size = {p.min_size}",
        f"max_size = {p.max_size}",
        f"join_threshold = {p.join_threshold}",
        f"evict_threshold = {p.evict_threshold}",
        f"drop_delta = {p.drop_delta}",
        f"dissolve_fraction = {p.dissolve_fraction}",
        f"election_delay = {p.election_delay}",
        f"formation = {'on' if p.formation else 'off'}",
        f"allow_short_groups = {'on' if p.allow_short_groups else 'off'}",
        f"dgds_same_amount = {p.dgds_same_amount}",
        f"max_requeues = {p.max_requeues}",
        f"random_replication = {p.random_replication}",
        "",
        "[limits]",
        f"lo = {cfg.limits.lo}",
        f"hi = {cfg.limits.hi}",
        "",
    ]
    return "\n".join(lines)


def run(cfg: ScenarioConfig,
        out_dir=None) -> Tuple[World, MetricsReport, Ledger]:
    """Drive the engine for the full horizon, audit the ledger, compute
    metrics from the event log, and optionally write all artifacts."""
    errors = validate_config(cfg)
    if errors:
        raise ConfigError(errors)
    world = World(cfg)
    world.run()
    bad = world.ledger.verify_chain()
    if bad is not None:
        raise RuntimeError(f"internal consistency failure: ledger block {bad} invalid")
    report = compute_metrics(world.header(), world.events)
    if out_dir is not None:
        emit_report(world, report, out_dir)
    return world, report, world.ledger


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(world: World, report: MetricsReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "summary.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("metric,value\n")
        for metric, value in report.scalar_rows():
            fh.write(f"{metric},{_fmt(value)}\n")
    with open(out / "series.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("tick,issued,validated,active_agents,etc_size\n")
        s = report.series
        for i in range(len(s.get("tick", ()))):
            fh.write(f"{s['tick'][i]},{s['issued'][i]},{s['validated'][i]},"
                     f"{s['active_agents'][i]},{s['etc_size'][i]}\n")
    with open(out / "ledger.txt", "w", encoding="utf-8", newline="\n") as fh:
        for line in world.ledger.export_lines():
            fh.write(line + "\n")
    with open(out / "effective_config.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_config(world.config))
    write_event_log(out / "events.jsonl", world.header(), world.events)


def write_event_log(path, header: dict, events) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for ev in events:
            fh.write(json.dumps({"t": ev.tick, "k": ev.kind, "p": ev.payload},
                                sort_keys=True) + "\n")


def read_event_log(path) -> Tuple[dict, List[SimEvent]]:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        events = []
        for line in fh:
            raw = json.loads(line)
            events.append(SimEvent(raw["t"], raw["k"], raw["p"]))
    return header, events
