"""
Forcing on a two-world chain
============================

Build a small model by hand, evaluate formulas world by world, and watch
how the neighborhood families decide the modal clauses.
"""

from pnmodal import Model, extensions, forces, parse, render, validate
from pnmodal.model import Cond, check_conditions

# w <= v; both worlds see the whole set as their only neighborhood; p holds at v
m = Model.build(
    worlds=["w", "v"],
    order=[("w", "v")],
    nbhd={"w": [["w", "v"]], "v": [["w", "v"]]},
    valuation={"p": ["v"]},
)
print("violations:", validate(m))
print({c.value: v is None for c, v in check_conditions(m, [Cond.C1, Cond.CBOX, Cond.CDIA]).items()})

# every subformula gets an extension, as a bitmask over the world order
f = parse("~ dia ~ p -> box p")
for g, mask in extensions(m, f).items():
    print(f"{render(g):22s} {m.names(mask)}")

# ~dia~p holds everywhere, box p nowhere: {v} is not a neighborhood of v
print("w forces it:", forces(m, "w", f))

# dropping the order shows the intuitionistic negation at work
flat = Model.build(["w", "v"], [], {"w": [], "v": []}, {"p": ["v"]})
print("~p on the chain:", m.names(extensions(m, parse("~p"))[parse("~p")]))
print("~p without the order:", flat.names(extensions(flat, parse("~p"))[parse("~p")]))
