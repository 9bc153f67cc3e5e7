"""Reconfiguration actions, their transition semantics, and the
direct characterization of the reconfiguration relation.

``can_reconfigure`` decides in one pass whether a target configuration is
reachable from a source state, by constraining the differences between the
two configurations; ``derive_actions`` then materializes a witness action
sequence whose step-by-step application stays valid throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import (
    Config,
    ModelError,
    SwInst,
    SystemModel,
    quorum_size,
    rep_inst,
    resources_ok,
    valid_config,
)
from .failures import FailedSet, State
from .availability import avail_dev, avail_on, live
from . import model


class ActionRejected(Exception):
    """An action's precondition does not hold; names the violated clause."""

    def __init__(self, action, clause: str):
        super().__init__("%s rejected: %s" % (describe_action(action), clause))
        self.action = action
        self.clause = clause


class NoWitnessError(Exception):
    """No action sequence realizes the requested reconfiguration."""


@dataclass(frozen=True)
class Stop:
    si: SwInst


@dataclass(frozen=True)
class StopRep:
    sw: str


@dataclass(frozen=True)
class Start:
    si: SwInst


@dataclass(frozen=True)
class Move:
    si: SwInst
    target: str


@dataclass(frozen=True)
class ChangeReps:
    sw: str
    computers: tuple
    primary: Optional[str]


def describe_action(a) -> str:
    if isinstance(a, Stop):
        return "stop(%s@%s)" % (a.si.sw, a.si.computer)
    if isinstance(a, StopRep):
        return "stopRep(%s)" % a.sw
    if isinstance(a, Start):
        return "start(%s@%s)" % (a.si.sw, a.si.computer)
    if isinstance(a, Move):
        return "move(%s@%s -> %s)" % (a.si.sw, a.si.computer, a.target)
    if isinstance(a, ChangeReps):
        tail = (", primary=%s" % a.primary) if a.primary else ""
        return "changeReps(%s, {%s}%s)" % (a.sw, ",".join(a.computers), tail)
    raise ModelError("unknown action %r" % (a,))


def can_run(c: str, sw, cfg: Config, fs: FailedSet, sys: SystemModel,
            memo: dict = None, static_cache: dict = None) -> bool:
    """Computer ``c`` satisfies the requirements to run ``sw`` in ``cfg``.

    Liveness of ``c`` is deliberately not required: a failed computer may be
    added as a new replica member, which helps in states where the failure
    budget is exhausted and the next event can only be a recovery.

    ``static_cache`` may be shared across calls with the same failed set;
    it is consulted only for software without functionality requirements,
    whose runnability does not depend on the configuration.
    """
    if static_cache is not None and not sw.fn_req:
        key = (sw.id, c)
        hit = static_cache.get(key)
        if hit is None:
            comp = sys.computer(c)
            hit = (model.compatible(sw, comp)
                   and all(avail_dev(dt, comp, fs, sys)
                           for dt in sw.devices))
            static_cache[key] = hit
        return hit
    comp = sys.computer(c)
    if not model.compatible(sw, comp):
        return False
    if memo is None:
        memo = {}
    for fn in sw.fn_req:
        if not avail_on(fn, c, cfg, fs, sys, memo):
            return False
    return all(avail_dev(dt, comp, fs, sys) for dt in sw.devices)


def _stateless_start_ok(sw) -> bool:
    return sw.fast_starting and not sw.persis_state and sw.resumable


def _members_addable(sw) -> bool:
    return sw.fast_starting and (not sw.persis_state or sw.small_persis_state)


def can_reconfigure(cfg: Config, target: Config, fs: FailedSet,
                    sys: SystemModel, assume_target_valid: bool = False,
                    static_canrun: dict = None,
                    live_cache: dict = None) -> bool:
    """The reconfiguration relation.

    Expects ``cfg`` to be free of dead instances (callers apply
    ``remove_dead`` after a failure burst first).  Holds when the target is
    valid and every difference from ``cfg`` is producible by some action:

    * replicated instances are never created and never change protocol;
    * each new unreplicated instance is on a live computer that can run it
      in the target, and is either freshly startable (fast-starting,
      stateless, resumable) or accounted for by a move of a migratable
      instance of the same software (each live removed instance can donate
      at most one move);
    * each replica-set or primary change has a live reconfiguration quorum
      of the old members; members may be added only for fast-starting
      software with no or small persistent state; all members (active) or
      the live new primary (passive) can run the software in the target.
    """
    if not assume_target_valid and not valid_config(target, sys):
        return False
    if live_cache is None:
        live_cache = {}

    def is_live(h):
        v = live_cache.get(h)
        if v is None:
            v = live(h, fs, sys)
            live_cache[h] = v
        return v

    src_rsi = {r.sw: r for r in cfg.rsi}
    for r2 in target.rsi:
        r1 = src_rsi.get(r2.sw)
        if r1 is None or r1.protocol != r2.protocol:
            return False

    memo = {}
    src_si = set(cfg.si)
    tgt_si = set(target.si)
    # Move donors: live removed instances, each usable for one move.
    donors = {}
    for s in cfg.si:
        if s not in tgt_si and is_live(s.computer):
            donors[s.sw] = donors.get(s.sw, 0) + 1
    for si2 in target.si:
        if si2 in src_si:
            continue
        sw = sys.sw(si2.sw)
        if not is_live(si2.computer):
            return False
        if not _stateless_start_ok(sw):
            movable = (sw.migratable
                       and (not sw.persis_state or sw.small_persis_state)
                       and donors.get(si2.sw, 0) > 0)
            if not movable:
                return False
            donors[si2.sw] -= 1
        if not can_run(si2.computer, sw, target, fs, sys, memo,
                       static_canrun):
            return False

    for r2 in target.rsi:
        r1 = src_rsi[r2.sw]
        if r1.computers == r2.computers and r1.primary == r2.primary:
            continue
        proto = sys.protocol(r1.protocol)
        need = quorum_size(proto.reconfig_q, len(r1.computers))
        if sum(1 for m in r1.computers if is_live(m)) < need:
            return False
        sw = sys.sw(r2.sw)
        if not set(r2.computers) <= set(r1.computers):
            if not _members_addable(sw):
                return False
        if proto.active:
            if not all(can_run(m, sw, target, fs, sys, memo, static_canrun)
                       for m in r2.computers):
                return False
        else:
            if not is_live(r2.primary):
                return False
            if not can_run(r2.primary, sw, target, fs, sys, memo,
                           static_canrun):
                return False
    return True


def apply_action(state: State, action, sys: SystemModel) -> State:
    """Apply one action, enforcing its preconditions; the failed set is
    unchanged and the resulting configuration is checked valid."""
    cfg, fs = state.cfg, state.fs
    if isinstance(action, Stop):
        if action.si not in cfg.si:
            raise ActionRejected(action, "instance not present")
        cfg2 = Config.make([s for s in cfg.si if s != action.si], cfg.rsi)
    elif isinstance(action, StopRep):
        r = cfg.rsi_for(action.sw)
        if r is None:
            raise ActionRejected(action, "replicated instance not present")
        cfg2 = Config.make(cfg.si, [x for x in cfg.rsi if x.sw != action.sw])
    elif isinstance(action, Start):
        cfg2 = _apply_start(cfg, fs, action, sys)
    elif isinstance(action, Move):
        cfg2 = _apply_move(cfg, fs, action, sys)
    elif isinstance(action, ChangeReps):
        cfg2 = _apply_change_reps(cfg, fs, action, sys)
    else:
        raise ModelError("unknown action %r" % (action,))
    if not valid_config(cfg2, sys):
        raise ActionRejected(action, "resulting configuration invalid")
    return State(cfg2, fs)


def _apply_start(cfg, fs, action, sys):
    si = action.si
    if si in cfg.si:
        raise ActionRejected(action, "instance already present")
    sw = sys.sw(si.sw)
    if not live(si.computer, fs, sys):
        raise ActionRejected(action, "target computer not live")
    if not _stateless_start_ok(sw):
        raise ActionRejected(action, "software not startable "
                                     "(needs fast-starting, stateless, resumable)")
    if sw.single_instance and si.sw in cfg.instance_software():
        raise ActionRejected(action, "single-instance software already running")
    cfg2 = Config.make(cfg.si + (si,), cfg.rsi)
    if not resources_ok(cfg2, sys):
        raise ActionRejected(action, "insufficient resources")
    if not can_run(si.computer, sw, cfg2, fs, sys):
        raise ActionRejected(action, "requirements not met on target computer")
    return cfg2


def _apply_move(cfg, fs, action, sys):
    si, target = action.si, action.target
    if si not in cfg.si:
        raise ActionRejected(action, "instance not present")
    if target == si.computer:
        raise ActionRejected(action, "moving to the same computer")
    sw = sys.sw(si.sw)
    if not sw.migratable:
        raise ActionRejected(action, "software not migratable")
    if sw.persis_state and not sw.small_persis_state:
        raise ActionRejected(action, "persistent state too large to move")
    if not (live(si.computer, fs, sys) and live(target, fs, sys)):
        raise ActionRejected(action, "source and target must both be live")
    moved = SwInst(si.sw, target)
    cfg2 = Config.make([s for s in cfg.si if s != si] + [moved], cfg.rsi)
    if not resources_ok(cfg2, sys):
        raise ActionRejected(action, "insufficient resources")
    if not can_run(target, sw, cfg2, fs, sys):
        raise ActionRejected(action, "requirements not met on target computer")
    return cfg2


def _apply_change_reps(cfg, fs, action, sys):
    r = cfg.rsi_for(action.sw)
    if r is None:
        raise ActionRejected(action, "replicated instance not present")
    sw = sys.sw(action.sw)
    proto = sys.protocol(r.protocol)
    new = rep_inst(r.sw, r.protocol, action.computers,
                   None if proto.active else action.primary)
    cfg2 = Config.make(cfg.si, [x for x in cfg.rsi if x.sw != r.sw] + [new])
    if not resources_ok(cfg2, sys):
        raise ActionRejected(action, "insufficient resources")
    need = quorum_size(proto.reconfig_q, len(r.computers))
    if sum(1 for m in r.computers if live(m, fs, sys)) < need:
        raise ActionRejected(action, "no live reconfiguration quorum")
    if not set(new.computers) <= set(r.computers) and not _members_addable(sw):
        raise ActionRejected(action, "cannot add members "
                                     "(software slow-starting or large state)")
    if proto.active:
        for m in new.computers:
            if not can_run(m, sw, cfg2, fs, sys):
                raise ActionRejected(action, "member %s cannot run software" % m)
    else:
        if new.primary is None or new.primary not in new.computers:
            raise ActionRejected(action, "primary must be a member")
        if not live(new.primary, fs, sys):
            raise ActionRejected(action, "primary not live")
        if not can_run(new.primary, sw, cfg2, fs, sys):
            raise ActionRejected(action, "primary cannot run software")
    return cfg2


# -- witness derivation ---------------------------------------------------


def derive_actions(cfg: Config, target: Config, fs: FailedSet,
                   sys: SystemModel, relation_checked: bool = False) -> tuple:
    """An action sequence turning ``cfg`` into ``target`` under ``fs``.

    Emission prefers the phase order stop/stopRep, shrinking membership
    changes, moves, starts, growing membership changes, so capacity is freed
    before it is consumed.  When dependencies make the phase order
    infeasible (a membership change may need a provider that is itself being
    restarted), a bounded search over orderings finds a valid interleaving.

    Raises ``NoWitnessError`` when the relation does not hold, or when every
    ordering of the difference actions deadlocks (possible only with several
    interlocking replica-membership changes, e.g. two replica sets swapping
    hosts with no spare capacity anywhere).
    """
    if not relation_checked and not can_reconfigure(cfg, target, fs, sys):
        raise NoWitnessError("reconfiguration relation does not hold")
    pending = _diff_actions(cfg, target, fs, sys)
    state = State(cfg, fs)
    end, order = _apply_greedy(state, pending, sys)
    if end is None or end.cfg != target:
        order = _apply_search(state, pending, sys, target)
        if order is None:
            raise NoWitnessError("no valid ordering of the difference actions")
    return tuple(order)


def _diff_actions(cfg: Config, target: Config, fs: FailedSet,
                  sys: SystemModel) -> list:
    tgt_si = set(target.si)
    src_si = set(cfg.si)
    added = sorted(tgt_si - src_si)
    removed = sorted(src_si - tgt_si)

    actions = []
    moves = []
    starts = []
    removed_free = list(removed)
    for si in added:
        sw = sys.sw(si.sw)
        if _stateless_start_ok(sw):
            starts.append(Start(si))
            continue
        # Not freshly startable: realize as a move of a live removed
        # instance (moving needs both endpoints up).
        donor = next((r for r in removed_free
                      if r.sw == si.sw and live(r.computer, fs, sys)), None)
        if donor is None:
            starts.append(Start(si))  # will fail loudly during application
        else:
            removed_free.remove(donor)
            moves.append(Move(donor, si.computer))

    stops = [Stop(s) for s in removed_free]
    tgt_rsi = {r.sw: r for r in target.rsi}
    stop_reps = [StopRep(r.sw) for r in cfg.rsi if r.sw not in tgt_rsi]
    shrinks, grows = [], []
    for r in cfg.rsi:
        r2 = tgt_rsi.get(r.sw)
        if r2 is None or (r.computers == r2.computers and r.primary == r2.primary):
            continue
        act = ChangeReps(r.sw, r2.computers, r2.primary)
        if set(r2.computers) <= set(r.computers):
            shrinks.append(act)
        else:
            grows.append(act)

    actions.extend(stops)
    actions.extend(stop_reps)
    actions.extend(shrinks)
    actions.extend(moves)
    actions.extend(starts)
    actions.extend(grows)
    return actions


def _apply_greedy(state: State, pending: list, sys: SystemModel):
    """Apply pending actions, retrying blocked ones after each success."""
    order = []
    pending = list(pending)
    while pending:
        for i, act in enumerate(pending):
            try:
                state = apply_action(state, act, sys)
            except ActionRejected:
                continue
            order.append(act)
            del pending[i]
            break
        else:
            return None, order
    return state, order


def _apply_search(state: State, pending: list, sys: SystemModel,
                  target: Config):
    """Exhaustive search over orderings of the difference actions."""
    seen = set()

    def rec(st, remaining, order):
        if not remaining:
            return order if st.cfg == target else None
        key = (st.cfg.key(), frozenset(id(a) for a in remaining))
        if key in seen:
            return None
        seen.add(key)
        for i, act in enumerate(remaining):
            try:
                st2 = apply_action(st, act, sys)
            except ActionRejected:
                continue
            res = rec(st2, remaining[:i] + remaining[i + 1:], order + [act])
            if res is not None:
                return res
        return None

    return rec(state, list(pending), [])
