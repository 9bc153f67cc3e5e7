"""Liveness and functionality availability under a failed set.

A functionality is available on a computer when some instance providing it
can actually serve that computer: the provider's host(s) are live, a
progress quorum exists for replicated providers, remote use is allowed when
the consumer sits elsewhere, and the provider's own functionality and device
requirements are met recursively.  The recursion terminates because the
functionality dependency graph is validated acyclic at model construction.
"""

from __future__ import annotations

from .model import Config, Software, SystemModel, quorum_size
from .failures import FailedSet, Failure


def live(h: str, fs: FailedSet, sys: SystemModel) -> bool:
    """A hardware component is live when unfailed and powered.

    An empty power set means internal power.  A component with external
    power sources needs at least one of them live, so a shared power source
    can be a single point of failure.
    """
    if Failure(h, "crash") in fs:
        return False
    power = sys.power_of(h)
    if not power:
        return True
    return any(live(p, fs, sys) for p in power)


def avail_dev(device_type: str, c, fs: FailedSet, sys: SystemModel) -> bool:
    """Device availability on a computer: integrated or live stand-alone."""
    comp = sys.computer(c) if isinstance(c, str) else c
    if device_type in comp.devices:
        return True
    return any(live(d, fs, sys) for d in sys.device_pool.get(device_type, ()))


def _devs_ok(sw: Software, c: str, fs, sys) -> bool:
    return all(avail_dev(dt, c, fs, sys) for dt in sw.devices)


def avail_on(fn: str, c: str, cfg: Config, fs: FailedSet, sys: SystemModel,
             memo: dict = None) -> bool:
    """Whether functionality ``fn`` is available on computer ``c``."""
    if memo is None:
        memo = {}
    return _avail_on(fn, c, cfg, fs, sys, memo)


def _avail_on(fn, c, cfg, fs, sys, memo):
    if not live(c, fs, sys):
        return False
    key = (fn, c)
    hit = memo.get(key)
    if hit is not None:
        return hit

    def reqs_ok(sw, host):
        return (all(_avail_on(f2, host, cfg, fs, sys, memo) for f2 in sw.fn_req)
                and _devs_ok(sw, host, fs, sys))

    result = False
    for si in cfg.si:
        sw = sys.sw(si.sw)
        if sw.fn != fn:
            continue
        if not live(si.computer, fs, sys):
            continue
        if c != si.computer and not sw.remote_use:
            continue
        if reqs_ok(sw, si.computer):
            result = True
            break
    if not result:
        for rsi in cfg.rsi:
            sw = sys.sw(rsi.sw)
            if sw.fn != fn:
                continue
            proto = sys.protocol(rsi.protocol)
            need = quorum_size(proto.progress_q, len(rsi.computers))
            if proto.active:
                # A quorum must exist whose members are all live and all meet
                # the component's requirements; counting such members is
                # equivalent to (and much cheaper than) enumerating quorums.
                good = [m for m in rsi.computers
                        if live(m, fs, sys) and reqs_ok(sw, m)]
                if len(good) >= need and (sw.remote_use or c in good):
                    result = True
                    break
            else:
                if rsi.primary is None:
                    continue
                alive = [m for m in rsi.computers if live(m, fs, sys)]
                if len(alive) < need:
                    continue
                if not sw.remote_use and c not in alive:
                    continue
                # Only the primary executes, so only the primary needs the
                # required functionalities and devices.
                if reqs_ok(sw, rsi.primary):
                    result = True
                    break
    memo[key] = result
    return result


def avail(fns, cfg: Config, fs: FailedSet, sys: SystemModel) -> bool:
    """Every functionality in ``fns`` is available on some computer."""
    memo = {}
    for fn in sorted(fns):
        if not any(_avail_on(fn, c, cfg, fs, sys, memo)
                   for c in sys.computer_ids):
            return False
    return True
