"""Resilience analysis, best-configuration search, and policy extraction.

A state is resilient when the critical functionalities are available and,
after every worst-case failure burst, some relevant configuration is
reachable by reconfiguration and is itself resilient.  Worst-case bursts
suffice: anything a system survives when failures arrive all at once it
also survives when they arrive in installments.

The search memoizes verdicts per (signature, failed set).  Recursion always
grows the failed set, so the memo is purely a cache and no cycle detection
is needed.  With full quotient reduction the successor scan visits one
deterministic state representative per equivalence class; verdicts carry
over to every class member because relocatable instances can be re-hosted
freely during reconfiguration.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .model import Config, ModelError, SystemModel, valid_config
from .failures import (
    EMPTY_FS,
    FailedSet,
    State,
    consistent,
    fs_key,
    next_failed_sets,
    remove_dead,
    worst_next_failed_sets,
)
from .availability import avail
from .reconfig import (
    NoWitnessError,
    apply_action,
    can_reconfigure,
    derive_actions,
)
from .enumeration import (
    ResilienceRequirement,
    generate_all_configs,
    generate_init_configs,
)
from .quotient import CanonicalSignature, partition_members, signature

QUOTIENT_MODES = ("off", "partial", "full")


class Quality(NamedTuple):
    """Configuration quality: more preferred instances, then lower cost."""

    qos: int
    cost: int

    def sort_key(self):
        return (-self.qos, self.cost)


def quality(cfg: Config, sys: SystemModel) -> Quality:
    qos = sum(1 for sid in cfg.instance_software() if sys.sw(sid).preferred)
    cost = len(cfg.si) + sum(len(r.computers) for r in cfg.rsi)
    return Quality(qos, cost)


class PolicyEntry(NamedTuple):
    target_sig: CanonicalSignature
    target_cfg: Config
    actions: tuple


@dataclass
class Policy:
    """Reconfiguration policy: per (state signature, failed set, burst), the
    action sequence restoring a resilient configuration."""

    roots: list = field(default_factory=list)  # (signature, root Config)
    entries: dict = field(default_factory=dict)

    def entry(self, sig, fs, burst) -> Optional[PolicyEntry]:
        return self.entries.get((sig, fs_key(fs), fs_key(burst)))

    def root_config(self, sig) -> Optional[Config]:
        for s, cfg in self.roots:
            if s == sig:
                return cfg
        return None


class _MemoEntry(NamedTuple):
    verdict: bool
    successors: tuple  # ((burst FailedSet, successor node), ...)


def _rsi_pairs(cfg: Config) -> frozenset:
    return frozenset((r.sw, r.protocol) for r in cfg.rsi)


_MISSING = object()


@dataclass
class SolveResult:
    resilient: list            # (signature, quality, state config), best first
    policy: Policy
    n_all: int
    n_init: int
    n_all_classes: int
    n_init_classes: int
    n_resilient_classes: int
    quotient: str
    mode: str
    generate_seconds: float
    analyze_seconds: float

    def counts(self) -> tuple:
        return (self.n_all, self.n_init, self.n_all_classes,
                self.n_init_classes, self.n_resilient_classes)


class Synthesizer:
    """Shared search context: universes, quotient, memo, policy data.

    ``quotient`` selects how much of the class reduction to use: "off" uses
    none, "partial" reduces only the initial candidates, "full" also reduces
    the successor scan.
    """

    def __init__(self, sys: SystemModel, req: ResilienceRequirement,
                 quotient: str = "full", use_worst_bursts: bool = True):
        if quotient not in QUOTIENT_MODES:
            raise ModelError("unknown quotient mode %r" % quotient)
        self.sys = sys
        self.req = req
        self.quotient = quotient
        self.use_worst_bursts = use_worst_bursts
        self._built = False
        self._memo = {}
        self._state_cfgs = {}
        self._bursts = {}
        self._candidate_lists = {}
        self._static_canrun = {}
        self._avail_cache = {}
        self._succ_cache = {}
        self._live_caches = {}
        self._rd_cache = {}
        self._witness_cache = {}
        self.generate_seconds = 0.0

    # -- universe ---------------------------------------------------------

    def build(self):
        if self._built:
            return
        t0 = time.perf_counter()
        self.all_cfgs = generate_all_configs(self.sys, self.req)
        self.init_cfgs = generate_init_configs(self.sys, self.req,
                                               self.all_cfgs)
        self.all_classes = partition_members(self.all_cfgs, self.sys)
        self.init_sigs = {signature(c, self.sys) for c in self.init_cfgs}

        def class_order_key(item):
            sig, members = item
            return quality(members[0], self.sys).sort_key() + (members[0].key(),)

        self._class_order = [sig for sig, _ in
                             sorted(self.all_classes.items(),
                                    key=class_order_key)]
        if self.quotient in ("off", "partial"):
            self._cfg_order = sorted(
                self.all_cfgs,
                key=lambda c: quality(c, self.sys).sort_key() + (c.key(),))
        self.generate_seconds = time.perf_counter() - t0
        self._built = True

    # -- state representatives ---------------------------------------------

    def _is_state_cfg(self, cfg: Config, fs: FailedSet) -> bool:
        return remove_dead(cfg, fs, self.sys) == cfg

    def state_config(self, node, fs: FailedSet) -> Optional[Config]:
        """The deterministic concrete configuration explored for ``node``.

        With full quotienting a node is a signature and its state
        configuration is the first class member that carries no dead
        instances under ``fs``; otherwise the node is the configuration
        itself.
        """
        if self.quotient != "full":
            return node if self._is_state_cfg(node, fs) else None
        key = (node, fs)
        if key in self._state_cfgs:
            return self._state_cfgs[key]
        found = None
        for member in self.all_classes[node]:
            if self._is_state_cfg(member, fs):
                found = member
                break
        self._state_cfgs[key] = found
        return found

    def _sig_of_node(self, node) -> CanonicalSignature:
        return node if self.quotient == "full" else signature(node, self.sys)

    def _candidates(self, fs: FailedSet) -> list:
        """Successor candidates for ``fs`` in descending quality order.

        Entries carry the candidate's (software, protocol) replica pairs so
        the scan can skip, without evaluating the relation, every candidate
        that would need a replicated instance the source does not have.
        The filtered list depends only on the failed set, so it is computed
        once per failed set and shared by every state exploring it.
        """
        hit = self._candidate_lists.get(fs)
        if hit is not None:
            return hit
        out = []
        if self.quotient == "full":
            for sig in self._class_order:
                cfg = self.state_config(sig, fs)
                if cfg is not None:
                    out.append((sig, cfg, _rsi_pairs(cfg),
                                self._pinned_si(cfg)))
        else:
            out = [(cfg, cfg, _rsi_pairs(cfg), self._pinned_si(cfg))
                   for cfg in self._cfg_order
                   if self._is_state_cfg(cfg, fs)]
        self._candidate_lists[fs] = out
        return out

    def _pinned_si(self, cfg: Config) -> frozenset:
        """Instances of software that reconfiguration can neither start
        fresh nor move; a target containing one is reachable only from
        sources that already run it in place."""
        pinned = []
        for si in cfg.si:
            sw = self.sys.sw(si.sw)
            startable = (sw.fast_starting and not sw.persis_state
                         and sw.resumable)
            movable = (sw.migratable
                       and (not sw.persis_state or sw.small_persis_state))
            if not startable and not movable:
                pinned.append(si)
        return frozenset(pinned)

    def _next_bursts(self, fs: FailedSet) -> list:
        hit = self._bursts.get(fs)
        if hit is None:
            if self.use_worst_bursts:
                hit = worst_next_failed_sets(self.req.fm, fs, self.sys)
            else:
                hit = next_failed_sets(self.req.fm, fs, self.sys)
            self._bursts[fs] = hit
        return hit

    # -- the resilience recursion -------------------------------------------

    def resilient_node(self, node, fs: FailedSet) -> bool:
        key = (node, fs)
        hit = self._memo.get(key)
        if hit is not None:
            return hit.verdict
        cfg = self.state_config(node, fs)
        if cfg is None or not avail(self.req.crit_fns, cfg, fs, self.sys):
            self._memo[key] = _MemoEntry(False, ())
            return False
        successors = []
        for fs2 in self._next_bursts(fs):
            succ = self._find_successor(cfg, fs, fs2, recursive=True)
            if succ is None:
                self._memo[key] = _MemoEntry(False, ())
                return False
            successors.append((fs2 - fs, succ))
        self._memo[key] = _MemoEntry(True, tuple(successors))
        return True

    def _find_successor(self, cfg: Config, fs: FailedSet, fs2: FailedSet,
                        recursive: bool):
        """Best-quality successor that is reachable and (one-)resilient.

        Candidates arrive quality-sorted, so the first hit is the best one.
        Per candidate, the source-independent resilience verdict (memoized
        and shared by every state that explores this failed set) is checked
        before the source-specific reconfiguration relation; dead-end states
        then cost almost nothing beyond the failed verdicts already paid
        for.  A relation hit must also admit a concrete witness sequence:
        with several interlocking membership changes the relation alone can
        accept a target no action ordering realizes, and emitted policies
        must replay."""
        src = self._remove_dead(cfg, fs2)
        key = (src, fs2, recursive)
        hit = self._succ_cache.get(key, _MISSING)
        if hit is not _MISSING:
            return hit
        src_pairs = _rsi_pairs(src)
        src_si = frozenset(src.si)
        static_canrun = self._static_canrun.setdefault(fs2, {})
        live_cache = self._live_caches.setdefault(fs2, {})
        found = None
        for node2, cfg2, pairs, pinned in self._candidates(fs2):
            if not (pairs <= src_pairs and pinned <= src_si):
                continue
            if recursive:
                if not self.resilient_node(node2, fs2):
                    continue
            else:
                if not self._avail_node(node2, cfg2, fs2):
                    continue
            if not can_reconfigure(src, cfg2, fs2, self.sys,
                                   assume_target_valid=True,
                                   static_canrun=static_canrun,
                                   live_cache=live_cache):
                continue
            if self._witness(src, cfg2, fs2) is not None:
                found = node2
                break
        self._succ_cache[key] = found
        return found

    def _witness(self, src: Config, tgt: Config, fs2: FailedSet):
        """Cached action sequence realizing a relation-accepted target."""
        key = (src, tgt, fs2)
        hit = self._witness_cache.get(key, _MISSING)
        if hit is not _MISSING:
            return hit
        try:
            actions = derive_actions(src, tgt, fs2, self.sys,
                                     relation_checked=True)
        except NoWitnessError:
            actions = None
        self._witness_cache[key] = actions
        return actions

    def _remove_dead(self, cfg: Config, fs: FailedSet) -> Config:
        key = (cfg, fs)
        hit = self._rd_cache.get(key)
        if hit is None:
            hit = remove_dead(cfg, fs, self.sys)
            self._rd_cache[key] = hit
        return hit

    def _avail_node(self, node, cfg, fs2: FailedSet) -> bool:
        key = (node, fs2)
        hit = self._avail_cache.get(key)
        if hit is None:
            hit = avail(self.req.crit_fns, cfg, fs2, self.sys)
            self._avail_cache[key] = hit
        return hit

    # -- public state predicates --------------------------------------------

    def check_state(self, cfg: Config, fs: FailedSet = EMPTY_FS) -> bool:
        """Resilience of an arbitrary valid state (not only universe members)."""
        self._check_state_pre(cfg, fs)
        self.build()
        if not avail(self.req.crit_fns, cfg, fs, self.sys):
            return False
        for fs2 in self._next_bursts(fs):
            if self._find_successor(cfg, fs, fs2, recursive=True) is None:
                return False
        return True

    def check_state_one(self, cfg: Config, fs: FailedSet = EMPTY_FS) -> bool:
        """One-resilience: successors need only restore availability."""
        self._check_state_pre(cfg, fs)
        self.build()
        if not avail(self.req.crit_fns, cfg, fs, self.sys):
            return False
        for fs2 in self._next_bursts(fs):
            if self._find_successor(cfg, fs, fs2, recursive=False) is None:
                return False
        return True

    def _check_state_pre(self, cfg: Config, fs: FailedSet):
        if not valid_config(cfg, self.sys):
            raise ModelError("state configuration is not valid")
        if remove_dead(cfg, fs, self.sys) != cfg:
            raise ModelError("state configuration carries dead instances")
        if not consistent(fs, self.req.fm, self.sys):
            raise ModelError("failed set inconsistent with failure model")

    # -- the top-level solve -------------------------------------------------

    def solve(self, mode: str = "best") -> SolveResult:
        if mode not in ("resilient", "best"):
            raise ModelError("unknown solve mode %r" % mode)
        self.build()
        t0 = time.perf_counter()

        if self.quotient == "off":
            roots = sorted(self.init_cfgs,
                           key=lambda c: quality(c, self.sys).sort_key()
                           + (c.key(),))
        elif self.quotient == "partial":
            # One representative configuration per initial class.
            roots = [self.all_classes[sig][0] for sig in self._class_order
                     if sig in self.init_sigs]
        else:
            roots = [sig for sig in self._class_order
                     if sig in self.init_sigs]

        accepted = []
        seen_sigs = set()
        accepted_sigs = []
        for node in roots:
            if self.resilient_node(node, EMPTY_FS):
                accepted.append(node)
                sig = self._sig_of_node(node)
                if sig not in seen_sigs:
                    seen_sigs.add(sig)
                    accepted_sigs.append(sig)

        policy = self.extract_policy(accepted)
        analyze = time.perf_counter() - t0

        resilient_list = []
        for node in accepted:
            sig = self._sig_of_node(node)
            cfg = self.state_config(node, EMPTY_FS)
            resilient_list.append((sig, quality(cfg, self.sys), cfg))

        return SolveResult(
            resilient=resilient_list,
            policy=policy,
            n_all=len(self.all_cfgs),
            n_init=len(self.init_cfgs),
            n_all_classes=len(self.all_classes),
            n_init_classes=len(self.init_sigs),
            n_resilient_classes=len(accepted_sigs),
            quotient=self.quotient,
            mode=mode,
            generate_seconds=self.generate_seconds,
            analyze_seconds=analyze,
        )

    # -- policy ---------------------------------------------------------------

    def extract_policy(self, accepted_roots) -> Policy:
        """Policy closure over everything reachable from the accepted roots.

        Every recorded state is a class state representative, and every
        entry's target is the state representative the verdicts were
        computed on, so replaying entries keeps landing on states that have
        entries of their own until the failed set is maximal.
        """
        policy = Policy()
        for node in accepted_roots:
            sig = self._sig_of_node(node)
            if policy.root_config(sig) is None:
                policy.roots.append((sig, self.state_config(node, EMPTY_FS)))
        stack = [(node, EMPTY_FS) for node in accepted_roots]
        done = set()
        while stack:
            node, fs = stack.pop()
            key = (node, fs)
            if key in done:
                continue
            done.add(key)
            entry = self._memo.get(key)
            if entry is None or not entry.verdict:
                raise ModelError("policy extraction from an unexplored state")
            cfg = self.state_config(node, fs)
            sig = self._sig_of_node(node)
            for burst, succ in entry.successors:
                fs2 = fs | burst
                tgt_cfg = self.state_config(succ, fs2)
                src = self._remove_dead(cfg, fs2)
                actions = self._witness(src, tgt_cfg, fs2)
                if actions is None:
                    raise ModelError("recorded successor has no witness")
                pkey = (sig, fs_key(fs), fs_key(burst))
                policy.entries.setdefault(
                    pkey, PolicyEntry(self._sig_of_node(succ), tgt_cfg,
                                      actions))
                stack.append((succ, fs2))
        return policy


# -- module-level operations ------------------------------------------------


def resilient(cfg: Config, fs: FailedSet, req: ResilienceRequirement,
              sys: SystemModel, synthesizer: Synthesizer = None,
              use_worst_bursts: bool = True) -> bool:
    """Recursive resilience of one state; see ``Synthesizer.check_state``."""
    syn = synthesizer or Synthesizer(sys, req,
                                     use_worst_bursts=use_worst_bursts)
    return syn.check_state(cfg, fs)


def one_resilient(cfg: Config, fs: FailedSet, req: ResilienceRequirement,
                  sys: SystemModel, synthesizer: Synthesizer = None) -> bool:
    """Non-recursive variant: one reconfiguration must restore availability."""
    syn = synthesizer or Synthesizer(sys, req)
    return syn.check_state_one(cfg, fs)


def solve_resilient(sys: SystemModel, req: ResilienceRequirement,
                    quotient: str = "full") -> SolveResult:
    return Synthesizer(sys, req, quotient).solve("resilient")


def solve_best_resilient(sys: SystemModel, req: ResilienceRequirement,
                         quotient: str = "full") -> SolveResult:
    return Synthesizer(sys, req, quotient).solve("best")


# -- policy replay ------------------------------------------------------------


class ReplayError(Exception):
    """A policy replay found a gap: no entry, a rejected action, or an
    availability hole."""


def replay_schedule(policy: Policy, root_sig, bursts, sys: SystemModel,
                    req: ResilienceRequirement) -> State:
    """Apply a burst schedule from a policy root, verifying the policy's
    promises at every step; returns the final state."""
    cfg = policy.root_config(root_sig)
    if cfg is None:
        raise ReplayError("unknown policy root")
    state = State(cfg, EMPTY_FS)
    if not avail(req.crit_fns, state.cfg, state.fs, sys):
        raise ReplayError("critical functionality unavailable at the root")
    sig = root_sig
    for burst in bursts:
        burst = frozenset(burst)
        fs2 = state.fs | burst
        entry = policy.entry(sig, state.fs, burst)
        if entry is None:
            raise ReplayError("no policy entry for burst %s at %s"
                              % (sorted(burst), sorted(state.fs)))
        st = State(remove_dead(state.cfg, fs2, sys), fs2)
        for act in entry.actions:
            st = apply_action(st, act, sys)  # ActionRejected propagates
        if st.cfg != entry.target_cfg:
            raise ReplayError("action sequence did not produce the "
                              "recorded target configuration")
        if not avail(req.crit_fns, st.cfg, st.fs, sys):
            raise ReplayError("critical functionality unavailable after "
                              "reconfiguration")
        state = st
        sig = entry.target_sig
    return state


def worst_burst_schedules(req: ResilienceRequirement, sys: SystemModel,
                          fs: FailedSet = EMPTY_FS, max_depth: int = None):
    """All schedules of worst-case bursts starting from ``fs``."""
    if max_depth is not None and max_depth <= 0:
        return
    for fs2 in worst_next_failed_sets(req.fm, fs, sys):
        burst = fs2 - fs
        yield [burst]
        deeper = worst_burst_schedules(
            req, sys, fs2, None if max_depth is None else max_depth - 1)
        for tail in deeper:
            yield [burst] + tail


def verify_policy(policy: Policy, sys: SystemModel,
                  req: ResilienceRequirement) -> int:
    """Replay every worst-case schedule from every root; returns the number
    of schedules verified.  Raises ReplayError on any gap."""
    n = 0
    for sig, _ in policy.roots:
        for schedule in worst_burst_schedules(req, sys):
            replay_schedule(policy, sig, schedule, sys, req)
            n += 1
    return n
