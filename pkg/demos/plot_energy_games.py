"""
Energy games behind the consistency check
==========================================

A hyperarc becomes a Max node choosing among its heads; every event is a
Min node choosing which hyperarc to satisfy last.  Finite least energies
give a feasible schedule.
"""

#%%
from cstndc import Hyperarc, Hytn, check_hytn_consistency, hytn_to_mpg, solve_energy
from cstndc.mpg import alternation_cap, nodes_weight_cap

#%%
# ``b - a <= -1`` alone with ``a - b <= -1`` is a negative cycle.  Adding
# ``c`` as an alternative head of the second arc breaks it.
h = Hytn(
    ("a", "b", "c"),
    (Hyperarc.standard("a", "b", -1), Hyperarc("b", (("a", -1), ("c", 0)))),
)
g = hytn_to_mpg(h)
print(g.names)
e = solve_energy(g)
print(e.as_dict(), "lifts:", e.iterations)

#%%
# The default cap is a simple-path bound that is never looser than
# ``|V| * W``.
print("cap:", alternation_cap(g), "coarse bound:", nodes_weight_cap(g))

#%%
# The consistency check turns energies into a schedule.
r = check_hytn_consistency(h)
print(r.consistent, r.schedule)

#%%
# Without the rescue head, both events lose.
bad = Hytn(("a", "b"), (Hyperarc.standard("a", "b", -1), Hyperarc.standard("b", "a", -1)))
print(check_hytn_consistency(bad).losing)
