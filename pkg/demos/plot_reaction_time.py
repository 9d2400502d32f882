"""
How fast must the controller react
==================================

For the Gamma family a strategy exists only when the controller reacts
within a bounded delay.  Bisection on a rational grid brackets the
largest admissible reaction time.
"""

#%%
from fractions import Fraction

from cstndc import check_edc, estimate_epsilon_hat, gen_gamma_n, gen_gamma_n_strategy, verify_strategy

g = gen_gamma_n(1)
print(len(g.nodes), "nodes,", len(g.constraints), "constraints")

#%%
# Probing a few reaction times.
for eps in (Fraction(1, 4), Fraction(1, 2), Fraction(501, 1000), Fraction(1)):
    print(eps, check_edc(g, eps).verdict.value)

#%%
# Bracket from the bisection.
b = estimate_epsilon_hat(g, resolution=64)
print("eps_hat in", [str(b.lo), str(b.hi)], "after", len(b.probes), "probes")

#%%
# The generator also emits a hand-built strategy that is dynamic at 1/2.
sigma = gen_gamma_n_strategy(1)
print(verify_strategy(g, sigma, eps=Fraction(1, 2)).summary())
