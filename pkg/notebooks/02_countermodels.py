"""
Bounded countermodel search
===========================

Ask for the first countermodel in canonical order (fewest worlds first),
then compare frame classes that do and do not validate a scheme.
"""

import json

from pnmodal import SearchConfig, find_countermodel, parse, parse_class

wcax = parse("(W p & W q) -> W (p & q)")

# without closure under intersections the scheme fails, but only on 3 worlds
out = find_countermodel(wcax, SearchConfig(max_worlds=3, frame_class=parse_class("C1")))
print(out.outcome, "after", out.models_checked, "models; witness", out.witness)
print(json.dumps(out.model.to_json()))

# adding CAP closes the gap at this bound
out = find_countermodel(wcax, SearchConfig(max_worlds=2, frame_class=parse_class("C1,CAP")))
print(out.outcome, "after", out.models_checked, "models")

# beyond the exhaustive bound, sample: the report only depends on the seed
cfg = SearchConfig(max_worlds=6, min_worlds=4, frame_class=parse_class("C1,CAP"), sampled=(7, 5000), workers=2)
out = find_countermodel(wcax, cfg)
print("sampled:", out.outcome, out.models_checked)

# box p -> dia p: one world suffices when both {w} and the empty set are neighborhoods
out = find_countermodel(parse("box p -> dia p"), SearchConfig(max_worlds=1, frame_class=parse_class("CBOX,CDIA")))
print(out.model.to_json())
