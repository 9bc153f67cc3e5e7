"""Liveness and availability, cross-checked against a quorum-enumerating
brute-force evaluator."""

import itertools
import random

from resilcfg import (
    Computer,
    Config,
    Device,
    SystemModel,
    avail,
    avail_dev,
    avail_on,
    crash,
    live,
    quorum_size,
)
from resilcfg.oracle import all_valid_configs
from conftest import FS0, FS_C0, FS_C1, small_random_model, tiny_config


# -- independent reference evaluator -----------------------------------------


def brute_avail_on(fn, c, cfg, fs, sys):
    """Literal evaluator: enumerates every candidate quorum explicitly."""
    if not live(c, fs, sys):
        return False

    def reqs_ok(sw, host):
        return (all(brute_avail_on(f2, host, cfg, fs, sys)
                    for f2 in sw.fn_req)
                and all(avail_dev(dt, host, fs, sys) for dt in sw.devices))

    for si in cfg.si:
        sw = sys.sw(si.sw)
        if (sw.fn == fn and live(si.computer, fs, sys)
                and (c == si.computer or sw.remote_use)
                and reqs_ok(sw, si.computer)):
            return True
    for rsi in cfg.rsi:
        sw = sys.sw(rsi.sw)
        if sw.fn != fn:
            continue
        proto = sys.protocol(rsi.protocol)
        need = quorum_size(proto.progress_q, len(rsi.computers))
        for size in range(need, len(rsi.computers) + 1):
            for quorum in itertools.combinations(rsi.computers, size):
                if not all(live(m, fs, sys) for m in quorum):
                    continue
                if c not in quorum and not sw.remote_use:
                    continue
                if proto.active:
                    if all(reqs_ok(sw, m) for m in quorum):
                        return True
                else:
                    if rsi.primary is not None and reqs_ok(sw, rsi.primary):
                        return True
    return False


# -- liveness -----------------------------------------------------------------


def test_live_internal_power(tiny_sys):
    assert live("c0", FS0, tiny_sys)


def test_live_failed(tiny_sys):
    assert not live("c0", FS_C0, tiny_sys)


def test_live_power_chain():
    ups = Device(id="ups", device_type="power")
    comp = Computer(id="c0", os="osA", cpu_arch="x86", cores=2, ram=64,
                    power=frozenset({"ups"}))
    sys = SystemModel(hw=[comp, ups], sw=[], protocols=[], sync=True)
    assert live("c0", FS0, sys)
    # The sole power source is a single point of failure.
    assert not live("c0", frozenset({crash("ups")}), sys)


# -- device availability -------------------------------------------------------


def test_avail_dev_integrated():
    comp = Computer(id="c0", os="osA", cpu_arch="x86", cores=2, ram=64,
                    devices=frozenset({"gps"}))
    sys = SystemModel(hw=[comp], sw=[], protocols=[], sync=True)
    assert avail_dev("gps", "c0", frozenset({crash("c0")}), sys)


def test_avail_dev_standalone(tiny_sys):
    assert avail_dev("gps", "c0", FS0, tiny_sys)


def test_avail_dev_standalone_dead(tiny_sys):
    assert not avail_dev("gps", "c0", frozenset({crash("g0")}), tiny_sys)


# -- functionality availability -------------------------------------------------


def test_avail_on_unprovided(tiny_sys):
    assert not avail_on("plan", "c0", Config(), FS0, tiny_sys)


def test_avail_on_quorum_and_remote_dependency(tiny_sys):
    cfg = tiny_config()
    # plan is served on c1: both replicas live, primary c0 reaches LOC
    # remotely.
    assert avail_on("plan", "c1", cfg, FS0, tiny_sys)


def test_avail_on_progress_quorum_blocks(tiny_sys):
    cfg = tiny_config()
    # progress quorum "all" needs both replicas live.
    assert not avail_on("plan", "c1", cfg, FS_C0, tiny_sys)


def test_avail_vacuous(tiny_sys):
    assert avail(frozenset(), tiny_config(), FS0, tiny_sys)


def test_avail_tiny(tiny_sys):
    assert avail({"loc", "plan"}, tiny_config(), FS0, tiny_sys)


def test_avail_all_computers_dead(tiny_sys):
    assert not avail({"loc", "plan"}, tiny_config(), FS_C0 | FS_C1, tiny_sys)


def test_avail_on_implies_live(tiny_sys):
    cfg = tiny_config()
    for fs in (FS0, FS_C0, FS_C1):
        for c in ("c0", "c1"):
            for fn in ("loc", "plan"):
                if avail_on(fn, c, cfg, fs, tiny_sys):
                    assert live(c, fs, tiny_sys)


def test_remote_only_provider_is_host_independent(tiny_sys):
    # LOC is remote-usable, so its availability is the same on any live
    # computer.
    cfg = tiny_config()
    for fs in (FS0, FS_C0, FS_C1):
        vals = {c: avail_on("loc", c, cfg, fs, tiny_sys)
                for c in ("c0", "c1") if live(c, fs, tiny_sys)}
        assert len(set(vals.values())) <= 1


def test_avail_on_matches_brute_force_on_tiny(tiny_sys):
    fss = [FS0, FS_C0, FS_C1]
    for cfg in all_valid_configs(tiny_sys):
        for fs in fss:
            for c in ("c0", "c1"):
                for fn in ("loc", "plan"):
                    assert (avail_on(fn, c, cfg, fs, tiny_sys)
                            == brute_avail_on(fn, c, cfg, fs, tiny_sys)), \
                        (cfg, fs, c, fn)


def test_avail_on_matches_brute_force_on_random_models():
    rng = random.Random(2024)
    for _ in range(40):
        sys, req, cfgs = small_random_model(rng, max_computers=2)
        cfgs = list(cfgs)
        rng.shuffle(cfgs)
        failures = [crash(h) for h in list(sys.computers)
                    + list(sys.devices)]
        for cfg in cfgs[:6]:
            for _ in range(4):
                fs = frozenset(f for f in failures if rng.random() < 0.3)
                c = rng.choice(list(sys.computers))
                for fn in {s.fn for s in sys.software.values()}:
                    assert (avail_on(fn, c, cfg, fs, sys)
                            == brute_avail_on(fn, c, cfg, fs, sys))


def test_passive_quorum_does_not_require_live_primary():
    """Documented boundary: for passive replication the availability rule
    only consults the primary for the component's functionality and device
    requirements.  A requirement-free component with a live majority quorum
    is therefore available even while its primary is down (a reconfiguration
    would normally hand the primary over immediately)."""
    from resilcfg import (Computer, Config, RepProtocol, Software,
                          SystemModel, rep_inst)

    comps = [Computer(id="c%d" % i, os="osA", cpu_arch="x86", cores=2,
                      ram=64) for i in range(3)]
    sw = Software(id="s", fn="f", cores=1, fast_starting=True,
                  resumable=False)
    proto = RepProtocol(id="maj", sync=False, active=False,
                        progress_q="majority", reconfig_q="majority")
    sys = SystemModel(hw=comps, sw=[sw], protocols=[proto], sync=True)
    cfg = Config.make([], [rep_inst("s", "maj", ["c0", "c1", "c2"], "c0")])
    fs = frozenset({crash("c0")})
    assert avail_on("f", "c1", cfg, fs, sys)


def test_monotone_in_failures(tiny_sys):
    cfg = tiny_config()
    for fs_small, fs_big in [(FS0, FS_C0), (FS0, FS_C1),
                             (FS_C0, FS_C0 | FS_C1)]:
        for c in ("c0", "c1"):
            for fn in ("loc", "plan"):
                if avail_on(fn, c, cfg, fs_big, tiny_sys):
                    assert avail_on(fn, c, cfg, fs_small, tiny_sys)
