"""
Axiom soundness, checked by enumeration
=======================================

Instantiate every axiom scheme of each logic over a pool of small formulas
and evaluate all instances on every model of the logic's frame class.
"""

import time

from pnmodal.experiments import run_experiment, soundness_at_bound
from pnmodal.logics import logic_spec
from pnmodal.model import class_names

for lid in ["W", "WC", "MW", "MWC", "A", "B", "C", "D"]:
    t0 = time.perf_counter()
    rep = soundness_at_bound(lid, max_worlds=2)
    fc = ",".join(class_names(logic_spec(lid).frame_class))
    print(f"{lid:4s} [{fc:12s}] {rep.instances:5d} instances x {rep.models_checked:5d} models "
          f"ok={rep.ok} ({time.perf_counter() - t0:.2f}s)")

# a sampled run over 3 and 4 worlds, same code path
rep = soundness_at_bound("WC", max_worlds=4, sampled=(1, 2000), min_worlds=3)
print("WC sampled:", rep.models_checked, "models, ok =", rep.ok)

# the named experiments return JSON-ready dicts
for name in ["duality", "box_dia_bridge", "bk_soundness"]:
    print(name, "->", run_experiment(name)["verdict"])
