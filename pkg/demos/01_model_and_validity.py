"""Build a system model by hand and poke at configuration validity.

The model: two quad-core real-time computers, a stand-alone GPS, a stateless
locator that anyone may call over the network, and a planner that keeps
essential volatile state (so a fresh start after a crash is no replacement)
and therefore must be replicated to survive failures.
"""

from resilcfg import (
    Config,
    SwInst,
    quorum_size,
    rep_inst,
    resources_ok,
    run,
    valid_config,
)
from resilcfg.fixtures import tiny

sys, req = tiny()

print("computers:", ", ".join(sys.computers))
print("software :", ", ".join("%s (fn=%s)" % (s.id, s.fn)
                              for s in sys.software.values()))
print("protocols:", ", ".join("%s (progress=%s, reconfig=%s)"
                              % (p.id, p.progress_q, p.reconfig_q)
                              for p in sys.protocols.values()))
print()

# A sensible configuration: locator on c0, planner replicated on both.
cfg = Config.make(
    [SwInst("LOC", "c0")],
    [rep_inst("PLAN", "primary-backup", ["c0", "c1"], primary="c0")],
)
print("configuration:", cfg)
print("software running on c0:", sorted(run("c0", cfg, sys)))
print("software running on c1:", sorted(run("c1", cfg, sys)))
print("resources ok:", resources_ok(cfg, sys))
print("valid:", valid_config(cfg, sys))
print()

# Replicating the stateless locator is pointless and therefore invalid.
silly = Config.make([], [rep_inst("LOC", "primary-backup", ["c0", "c1"],
                                  primary="c0")])
print("replicated stateless locator is valid?", valid_config(silly, sys))

# Quorum arithmetic for the protocols involved.
for kind in ("majority", "all", "one"):
    print("quorum(%s) over 3 replicas = %d" % (kind, quorum_size(kind, 3)))
