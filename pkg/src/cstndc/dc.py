"""Dynamic consistency of CSTNs by reduction to HyTN consistency.

The reduction expands the network into one STN copy per scenario and adds,
for every ordered pair of scenarios ``s1 != s2`` and every node ``u`` present
in both, a hyperarc saying that ``u`` is scheduled identically in ``s1`` and
``s2`` unless some observation distinguishing them happened at least
``eps`` earlier in ``s1``.
"""

from __future__ import annotations

import enum
import math
import re
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cstn import (
    DEFAULT_MAX_EXPANDED_NODES,
    check_expansion_size,
    difference_set,
    ensure_well_defined,
    enumerate_scenarios,
    expanded_id,
    label_con,
    restrict,
    restricted_nodes,
)
from .errors import InputError, VerificationError
from .hytn import Hyperarc, Hytn, check_hytn_consistency, scale_hytn, verify_hytn_schedule


_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")


def as_epsilon(value):
    """Coerce ``value`` (Fraction, int, or ``"N/D"`` string) to a positive Fraction."""
    if isinstance(value, float):
        raise InputError("epsilon must be given exactly, not as a float")
    if isinstance(value, str) and not _RATIONAL.fullmatch(value.strip()):
        raise InputError(f"epsilon {value!r} is not of the form N or N/D")
    try:
        eps = Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError(f"bad epsilon {value!r}") from None
    if eps <= 0:
        raise InputError(f"epsilon must be positive, got {eps}")
    return eps


def dc_epsilon(g):
    """1 / (|Sigma_P| * |V|), the reaction time at which epsilon-DC and DC coincide."""
    return Fraction(1, g.scenario_count * max(len(g.nodes), 1))


class Verdict(enum.Enum):
    DC = "DC"
    NOT_DC = "NotDC"
    EPS_DC = "EpsDC"
    NOT_EPS_DC = "NotEpsDC"

    @property
    def positive(self):
        return self in (Verdict.DC, Verdict.EPS_DC)


@dataclass
class DcReport:
    verdict: Verdict
    epsilon: Fraction
    strategy: Optional[dict] = None
    certificate: Optional[frozenset] = None
    stats: dict = field(default_factory=dict)

    @property
    def positive(self):
        return self.verdict.positive


def _scenario_tables(g):
    scenarios = enumerate_scenarios(g)
    present = [restricted_nodes(g, s) for s in scenarios]
    return scenarios, present


def construct_h_epsilon(g, eps, max_nodes=DEFAULT_MAX_EXPANDED_NODES):
    """Build the HyTN H_eps(g): expanded standard arcs plus one hyperarc per (s1, s2, u).

    Standard arcs keep their integer weights; the distinguishing-observation
    heads carry ``-eps`` as a Fraction.  Heads from the difference set are
    taken in the ``s1`` copy, and ``u`` itself is never among them.
    """
    eps = as_epsilon(eps)
    ensure_well_defined(g)
    check_expansion_size(g, max_nodes)
    scenarios, present = _scenario_tables(g)
    nodes = []
    arcs = []
    for i, s in enumerate(scenarios):
        nodes.extend(expanded_id(v, i) for v in present[i])
        arcs.extend(
            Hyperarc(expanded_id(u, i), ((expanded_id(v, i), w),))
            for u, v, w in restrict(g, s).arcs
        )
    order = {v: k for k, v in enumerate(g.node_ids)}
    neg = -eps
    for i1, s1 in enumerate(scenarios):
        here = set(present[i1])
        for i2, s2 in enumerate(scenarios):
            if i1 == i2:
                continue
            delta = sorted(difference_set(g, s1, s2), key=order.__getitem__)
            delta_heads = [(v, (expanded_id(v, i1), neg)) for v in delta]
            for u in present[i2]:
                if u not in here:
                    continue
                heads = [(expanded_id(u, i2), 0)]
                heads.extend(head for v, head in delta_heads if v != u)
                arcs.append(Hyperarc(expanded_id(u, i1), tuple(heads)))
    return Hytn(tuple(nodes), tuple(arcs))


def expected_h_epsilon_counts(g):
    """Closed-form node/hyperarc/size counts of H_eps(g) computed from the restrictions."""
    scenarios, present = _scenario_tables(g)
    nodes = sum(len(p) for p in present)
    standard = sum(len(restrict(g, s).arcs) for s in scenarios)
    std_size = sum(1 if u == v else 2 for s in scenarios for u, v, _ in restrict(g, s).arcs)
    cross = 0
    cross_size = 0
    for i1, s1 in enumerate(scenarios):
        for i2, s2 in enumerate(scenarios):
            if i1 == i2:
                continue
            delta = difference_set(g, s1, s2)
            for u in set(present[i1]) & set(present[i2]):
                cross += 1
                cross_size += 2 + len(delta - {u})
    return {
        "nodes": nodes,
        "hyperarcs": standard + cross,
        "standard_arcs": standard,
        "cross_hyperarcs": cross,
        "size": std_size + cross_size,
    }


def strategy_from_schedule(g, phi):
    """Read an execution strategy off a schedule of the expanded nodes."""
    scenarios, present = _scenario_tables(g)
    return {
        s: {v: Fraction(phi[expanded_id(v, i)]) for v in present[i]}
        for i, s in enumerate(scenarios)
    }


def schedule_from_strategy(g, sigma):
    _check_domains(g, sigma)
    phi = {}
    for i, s in enumerate(enumerate_scenarios(g)):
        for v, t in sigma[s].items():
            phi[expanded_id(v, i)] = Fraction(t)
    return phi


def check_edc(g, eps, max_nodes=DEFAULT_MAX_EXPANDED_NODES, cap=None):
    """Decide epsilon-dynamic consistency; positive reports carry a verified strategy."""
    eps = as_epsilon(eps)
    started = time.perf_counter()
    h = construct_h_epsilon(g, eps, max_nodes)
    scale = eps.denominator
    result = check_hytn_consistency(scale_hytn(h, scale), cap=cap)
    energy = result.energy
    stats = {
        "scenarios": g.scenario_count,
        "cstn_nodes": len(g.nodes),
        "cstn_constraints": len(g.constraints),
        "hytn_nodes": len(h.nodes),
        "hyperarcs": len(h.hyperarcs),
        "hytn_size": h.size,
        "scale": scale,
        **energy.stats,
        "iterations": energy.iterations,
    }
    if not result.consistent:
        stats["wall_time"] = time.perf_counter() - started
        return DcReport(Verdict.NOT_EPS_DC, eps, None, result.losing, stats)
    phi = {v: t / scale for v, t in result.schedule.items()}
    strategy = strategy_from_schedule(g, phi)
    check = verify_strategy(g, strategy, eps)
    if not (check.viable and check.eps_dynamic):
        raise VerificationError(f"solver strategy failed verification: {check.summary()}")
    stats["wall_time"] = time.perf_counter() - started
    return DcReport(Verdict.EPS_DC, eps, strategy, None, stats)


def check_dc(g, max_nodes=DEFAULT_MAX_EXPANDED_NODES, cap=None):
    """Decide dynamic consistency by checking epsilon-DC at 1 / (|Sigma_P| |V|)."""
    report = check_edc(g, dc_epsilon(g), max_nodes, cap)
    if not report.positive:
        report.verdict = Verdict.NOT_DC
        return report
    check = verify_strategy(g, report.strategy)
    if not check.dynamic:
        raise VerificationError(f"epsilon-dynamic strategy is not dynamic: {check.summary()}")
    report.verdict = Verdict.DC
    return report


@dataclass
class VerifyReport:
    viable: bool
    dynamic: bool
    eps_dynamic: Optional[bool] = None
    epsilon: Optional[Fraction] = None
    viability_failures: list = field(default_factory=list)
    dynamic_failures: list = field(default_factory=list)
    eps_failures: list = field(default_factory=list)

    @property
    def ok(self):
        return self.viable and self.dynamic and self.eps_dynamic is not False

    def summary(self):
        parts = [f"viable={self.viable}", f"dynamic={self.dynamic}"]
        if self.eps_dynamic is not None:
            parts.append(f"eps_dynamic={self.eps_dynamic} (eps={self.epsilon})")
        for name, items in (
            ("viability", self.viability_failures),
            ("dynamic", self.dynamic_failures),
            ("eps", self.eps_failures),
        ):
            if items:
                parts.append(f"first {name} failure: {items[0]}")
        return ", ".join(parts)


def _check_domains(g, sigma):
    scenarios = enumerate_scenarios(g)
    if set(sigma) != set(scenarios):
        raise InputError("strategy scenarios do not match the network's propositions")
    for s in scenarios:
        expected = set(restricted_nodes(g, s))
        if set(sigma[s]) != expected:
            raise InputError(
                f"schedule of scenario {str(s) or 'lambda'} covers {sorted(sigma[s])}, expected {sorted(expected)}"
            )


def verify_strategy(g, sigma, eps=None, limit=10):
    """Check viability, dynamicity and (when ``eps`` is given) epsilon-dynamicity exactly.

    Each failure list keeps at most ``limit`` counterexamples.
    """
    _check_domains(g, sigma)
    eps = as_epsilon(eps) if eps is not None else None
    scenarios = enumerate_scenarios(g)
    report = VerifyReport(True, True, None if eps is None else True, eps)
    for s in scenarios:
        phi = sigma[s]
        for u, v, w in restrict(g, s).arcs:
            if phi[v] > phi[u] + w:
                report.viable = False
                if len(report.viability_failures) < limit:
                    report.viability_failures.append((str(s), u, v, w, phi[u], phi[v]))
    for s1 in scenarios:
        a = sigma[s1]
        for s2 in scenarios:
            if s1 == s2:
                continue
            b = sigma[s2]
            delta = difference_set(g, s1, s2)
            for u in a:
                if u not in b:
                    continue
                tu = a[u]
                if all(tu <= a[v] for v in delta) and tu != b[u]:
                    report.dynamic = False
                    if len(report.dynamic_failures) < limit:
                        report.dynamic_failures.append((str(s1), str(s2), u, tu, b[u]))
                if eps is not None:
                    if not (tu >= b[u] or any(tu >= a[v] + eps for v in delta)):
                        report.eps_dynamic = False
                        if len(report.eps_failures) < limit:
                            report.eps_failures.append((str(s1), str(s2), u))
    return report


def scenario_history(g, s, sigma, v):
    """The label of observations made strictly before ``v`` in scenario ``s``."""
    from .cstn import Label, Literal

    phi = sigma[s]
    lits = [
        Literal(p, not s[p])
        for p, obs in g.observer.items()
        if obs in phi and phi[obs] < phi[v]
    ]
    return Label(tuple(lits))


def is_dynamic_by_history(g, sigma):
    """Dynamicity straight from the scenario-history definition (no pairwise difference-set shortcut)."""
    _check_domains(g, sigma)
    scenarios = enumerate_scenarios(g)
    for s1 in scenarios:
        for s2 in scenarios:
            for v in sigma[s1]:
                if v in sigma[s2] and label_con(scenario_history(g, s1, sigma, v), s2.label):
                    if sigma[s1][v] != sigma[s2][v]:
                        return False
    return True


def renormalize_fractions(phi, denom):
    """Replace fractional parts by ``(rank - 1) / denom`` keeping integral parts.

    ``rank`` is the position of a node's fractional part among the distinct
    fractional parts sorted increasingly.
    """
    frac = {v: Fraction(t) - math.floor(t) for v, t in phi.items()}
    distinct = sorted(set(frac.values()))
    if len(distinct) > denom:
        raise InputError(f"{len(distinct)} distinct fractional parts do not fit a 1/{denom} grid")
    pos = {r: k + 1 for k, r in enumerate(distinct)}
    return {v: math.floor(Fraction(t)) + Fraction(pos[frac[v]] - 1, denom) for v, t in phi.items()}


@dataclass
class RoundingContext:
    fractional: dict
    distinct: list
    positions: dict
    new_fractional: dict
    rounded: dict
    selected: list
    epsilon: Fraction


def rounding_context(g, eps_src, phi, max_nodes=DEFAULT_MAX_EXPANDED_NODES):
    """Round a feasible schedule of H_{eps_src}(g) onto the 1/(|Sigma_P||V|) grid.

    ``selected`` is the standard-arc network obtained by keeping, per
    hyperarc, the head minimising ``phi(h) - w(h)`` (weights re-expressed at
    the target epsilon).
    """
    eps_src = as_epsilon(eps_src)
    h_src = construct_h_epsilon(g, eps_src, max_nodes)
    if not verify_hytn_schedule(h_src, phi):
        raise InputError(f"schedule is not feasible for H_eps at eps={eps_src}")
    target = dc_epsilon(g)
    denom = target.denominator
    phi = {v: Fraction(phi[v]) for v in h_src.nodes}
    frac = {v: t - math.floor(t) for v, t in phi.items()}
    distinct = sorted(set(frac.values()))
    positions = {v: distinct.index(frac[v]) + 1 for v in phi}
    rounded = renormalize_fractions(phi, denom)
    new_frac = {v: rounded[v] - math.floor(rounded[v]) for v in rounded}
    selected = []
    for a in h_src.hyperarcs:
        v, w = min(a.heads, key=lambda head: phi[head[0]] - head[1])
        selected.append((a.tail, v, -target if w == -eps_src and not a.is_standard else w))
    return RoundingContext(frac, distinct, positions, new_frac, rounded, selected, target)


def round_schedule(g, eps_src, phi, max_nodes=DEFAULT_MAX_EXPANDED_NODES):
    ctx = rounding_context(g, eps_src, phi, max_nodes)
    h = construct_h_epsilon(g, ctx.epsilon, max_nodes)
    if not verify_hytn_schedule(h, ctx.rounded):
        raise VerificationError("rounded schedule is not feasible at the target epsilon")
    return ctx.rounded


@dataclass
class EpsilonBracket:
    """Bracket ``lo <= eps_hat <= hi`` (``hi is None`` means unbounded above 1)."""

    dc: bool
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    probes: list = field(default_factory=list)

    @property
    def empty(self):
        return not self.dc


def estimate_epsilon_hat(g, resolution=64, max_nodes=DEFAULT_MAX_EXPANDED_NODES):
    """Bisect on a grid of step 1/(resolution |Sigma_P| |V|) inside [1/(|Sigma_P||V|), 1].

    Keeps ``check_edc(lo)`` positive and ``check_edc(hi)`` negative and stops
    once ``hi - lo <= 1/resolution``.
    """
    if resolution < 1:
        raise InputError("resolution must be a positive integer")
    base = dc_epsilon(g)
    grid = resolution * base.denominator
    k_lo, k_hi = resolution, grid
    bracket = EpsilonBracket(True)

    def probe(k):
        eps = Fraction(k, grid)
        ok = check_edc(g, eps, max_nodes).positive
        bracket.probes.append((eps, ok))
        return ok

    if not probe(k_lo):
        bracket.dc = False
        return bracket
    if probe(k_hi):
        bracket.lo = Fraction(1)
        return bracket
    while k_hi - k_lo > base.denominator:
        mid = (k_lo + k_hi) // 2
        if probe(mid):
            k_lo = mid
        else:
            k_hi = mid
    bracket.lo = Fraction(k_lo, grid)
    bracket.hi = Fraction(k_hi, grid)
    return bracket
