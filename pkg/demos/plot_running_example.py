"""
Checking a small network for dynamic consistency
=================================================

A five-event network with two observations is parsed, checked and its
strategy printed per scenario.
"""

#%%
# The network in the text format read by the command line tool.
from cstndc import check_dc, parse_cstn, verify_strategy
from cstndc.dc import construct_h_epsilon, dc_epsilon, expected_h_epsilon_counts

text = """
propositions p q
node A
node B
node C
node Op observes p
node Oq observes q
constraint A C 10
constraint C A -10
constraint A B 3 "p -q"
constraint B A 0
constraint A Op 5
constraint Op A 0
constraint A Oq 9
constraint Oq A 0
constraint B C 2 "q"
constraint Op C 10
constraint Oq C 1 "-p"
"""
g = parse_cstn(text)
print(len(g.nodes), "nodes,", len(g.constraints), "constraints")

#%%
# The reaction time used for plain DC and the size of the expanded network.
eps = dc_epsilon(g)
h = construct_h_epsilon(g, eps)
print("eps =", eps)
print("expanded nodes:", len(h.nodes), "hyperarcs:", len(h.hyperarcs))
print("predicted:", expected_h_epsilon_counts(g))

#%%
# Solve, then check the returned strategy independently.
report = check_dc(g)
print(report.verdict.value, report.stats)
for s, phi in report.strategy.items():
    print(str(s.label) or "(empty)", {v: str(t) for v, t in sorted(phi.items(), key=lambda kv: kv[1])})
print(verify_strategy(g, report.strategy).summary())
