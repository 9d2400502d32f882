"""
Satisfiability as a consistency question
========================================

A 3-CNF formula maps to a network without constraint labels that is
dynamically consistent exactly when the formula is unsatisfiable.
"""

#%%
from cstndc import check_dc, gen_from_3cnf
from cstndc.generators import parse_dimacs, sat_brute_force

sat = parse_dimacs("p cnf 3 2\n1 2 -3 0\n-1 3 2 0\n")
unsat = parse_dimacs("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n")

#%%
for name, f in (("satisfiable", sat), ("unsatisfiable", unsat)):
    g = gen_from_3cnf(f)
    r = check_dc(g)
    print(f"{name}: {len(g.nodes)} nodes, SAT={sat_brute_force(f)}, verdict={r.verdict.value}")
