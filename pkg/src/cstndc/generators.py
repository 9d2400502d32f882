"""Instance families: 3-SAT reduction networks, the Gamma^n family, random CSTNs."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .cstn import (
    LAMBDA,
    Cstn,
    CstnNode,
    Label,
    LabeledConstraint,
    Literal,
    enumerate_scenarios,
    label_con,
    scenario_eval,
)
from .errors import CapacityError, InputError

MAX_RANDOM_PROPS = 12


@dataclass(frozen=True)
class Cnf:
    """A 3-CNF formula over variables ``1..n_vars`` in DIMACS literal convention."""

    n_vars: int
    clauses: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.n_vars < 0:
            raise InputError("negative variable count")
        for c in self.clauses:
            if len(c) != 3:
                raise InputError(f"clause {c} does not have exactly 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise InputError(f"literal {lit} outside variables 1..{self.n_vars}")

    @classmethod
    def padded(cls, n_vars, clauses):
        """Accept 1- and 2-literal clauses, padding them by repeating literals."""
        out = []
        for c in clauses:
            c = tuple(c)
            if not 1 <= len(c) <= 3:
                raise InputError(f"clause {c} cannot be padded to 3 literals")
            out.append((c * 3)[:3])
        return cls(n_vars, tuple(out))

    def evaluate(self, assignment):
        """``assignment`` maps variable index to bool."""
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)


def variable_name(i):
    return f"x{i}"


def parse_dimacs(text):
    """Read a ``p cnf n m`` DIMACS file; short clauses are padded to 3 literals."""
    n_vars = None
    expected = None
    clauses = []
    current = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"line {lineno}: bad problem line {line!r}")
            n_vars, expected = int(parts[2]), int(parts[3])
            continue
        if n_vars is None:
            raise InputError(f"line {lineno}: clause before the 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise InputError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if n_vars is None:
        raise InputError("missing 'p cnf' header")
    if expected is not None and expected != len(clauses):
        raise InputError(f"header announces {expected} clauses, found {len(clauses)}")
    return Cnf.padded(n_vars, clauses)


def to_dimacs(f):
    lines = [f"p cnf {f.n_vars} {len(f.clauses)}"]
    lines.extend(" ".join(str(l) for l in c) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


def sat_witness(f, max_vars=20):
    """A satisfying assignment found by exhaustive enumeration, or None."""
    if f.n_vars > max_vars:
        raise CapacityError(f"{f.n_vars} variables exceed the brute-force bound {max_vars}")
    for values in itertools.product((False, True), repeat=f.n_vars):
        assignment = dict(enumerate(values, 1))
        if f.evaluate(assignment):
            return assignment
    return None


def sat_brute_force(f, max_vars=20):
    return sat_witness(f, max_vars) is not None


def gen_from_3cnf(f):
    """The network that is dynamically consistent iff ``f`` is unsatisfiable.

    Variables become self-observing nodes ``x1..xn`` that must happen
    together before every clause node; clause ``C_j`` must precede
    ``C_{j+1 mod m}`` by one time unit under each of its literals.
    """
    xs = [variable_name(i) for i in range(1, f.n_vars + 1)]
    cs = [f"C{j}" for j in range(len(f.clauses))]
    nodes = [CstnNode(x, LAMBDA, x) for x in xs] + [CstnNode(c) for c in cs]
    arcs = []
    for a in xs:
        for b in xs:
            arcs.append(LabeledConstraint(b, a, 0))
    for x in xs:
        for c in cs:
            arcs.append(LabeledConstraint(c, x, -1))
    m = len(cs)
    for j, clause in enumerate(f.clauses):
        for lit in clause:
            label = Label((Literal(variable_name(abs(lit)), lit < 0),))
            arcs.append(LabeledConstraint(cs[(j + 1) % m], cs[j], -1, label))
    return Cstn(tuple(xs), tuple(nodes), tuple(arcs))


def half(delta):
    return delta / 2


@dataclass(frozen=True)
class GammaNParams:
    n: int
    delta_rule: Callable = half

    def __post_init__(self):
        if self.n < 1:
            raise InputError("n must be at least 1")

    def sequences(self):
        """Exact ``(deltas, Deltas)`` with Delta_1 = 1 and Delta_i = min(delta_{i-1}, Delta_{i-1} - delta_{i-1})."""
        small, big = [], [Fraction(1)]
        for i in range(self.n):
            d = Fraction(self.delta_rule(big[i]))
            if not 0 < d < big[i]:
                raise InputError(f"delta_{i + 1} = {d} is not inside (0, {big[i]})")
            small.append(d)
            if i + 1 < self.n:
                big.append(min(d, big[i] - d))
        return small, big


def _xyz(i):
    return f"X{i}", f"Y{i}", f"Z{i}"


def gen_gamma_n(params):
    """The family whose critical reaction time is below 2^(1-n)."""
    if isinstance(params, int):
        params = GammaNParams(params)
    n = params.n
    ids = [v for i in range(1, n + 1) for v in _xyz(i)]
    nodes = [CstnNode(v, LAMBDA, v) for v in ids]
    arcs = []

    def pair(a, b, w, label):
        # b - a <= w and a - b <= -w under the same label
        lab = Label.of(*label.split()) if label else LAMBDA
        arcs.append(LabeledConstraint(a, b, w, lab))
        arcs.append(LabeledConstraint(b, a, -w, lab))

    arcs.extend(LabeledConstraint(v, "X1", 0) for v in ids)
    arcs.append(LabeledConstraint("X1", "Z1", 1, Label.of("X1", "Y1")))
    for i in range(1, n + 1):
        x, y, z = _xyz(i)
        pair(x, y, 2, f"-{x}")
        pair(y, z, 2, f"-{y}")
    for i in range(1, n):
        x, y, z = _xyz(i)
        x2, y2, z2 = _xyz(i + 1)
        pair(x, x2, 5, z)
        pair(y, x2, 5, f"-{z}")
        pair(y, z2, 5, f"{z} {x2} {y2}")
        pair(z, z2, 5, f"-{z} {x2} {y2}")
    # the final-layer arcs coincide with the last C_i family; keep set semantics
    unique = list(dict.fromkeys(arcs))
    return Cstn(tuple(ids), tuple(nodes), tuple(unique))


def gen_gamma_n_strategy(params):
    """The closed-form viable and dynamic strategy for Gamma^n."""
    if isinstance(params, int):
        params = GammaNParams(params)
    g = gen_gamma_n(params)
    small, _ = params.sequences()
    sigma = {}
    for s in enumerate_scenarios(g):
        one = lambda text: 1 if scenario_eval(s, Label.of(*text.split())) else 0  # noqa: E731
        t = {}
        t["X1"] = Fraction(0)
        t["Y1"] = small[0] * one("X1") + 2 * one("-X1")
        t["Z1"] = one("X1 Y1") + (2 + t["Y1"]) * (1 - one("X1 Y1"))
        for i in range(2, params.n + 1):
            x, y, z = _xyz(i)
            px, py, pz = _xyz(i - 1)
            t[x] = 5 + t[px] * one(pz) + t[py] * one(f"-{pz}")
            t[y] = t[x] + small[i - 1] * one(x) + 2 * one(f"-{x}")
            both = one(f"{x} {y}")
            t[z] = (5 + t[py] * one(pz) + t[pz] * one(f"-{pz}")) * both + (2 + t[y]) * (1 - both)
        sigma[s] = {v: Fraction(t[v]) for v in g.node_ids}
    return sigma


def gen_random_cstn(nodes, props, arc_density, weight_range, seed, max_props=MAX_RANDOM_PROPS):
    """A random well-defined CSTN, deterministic in ``seed``.

    The first ``props`` nodes observe ``p0, p1, ...``.  Observation labels
    only mention earlier propositions, every label contains the labels of
    the observations it mentions, and each labeled node gets a constraint
    placing those observations at least one unit earlier.  ``weight_range``
    is either ``k`` (weights in ``[-k, k]``) or a ``(lo, hi)`` pair.
    """
    if props > max_props:
        raise CapacityError(f"{props} propositions exceed the generator cap {max_props}")
    if nodes < props:
        raise InputError("need at least one node per proposition")
    lo, hi = (-weight_range, weight_range) if isinstance(weight_range, int) else weight_range
    if lo > hi:
        raise InputError(f"empty weight range {weight_range}")
    rng = random.Random(seed)
    pnames = [f"p{i}" for i in range(props)]
    ids = [f"v{i}" for i in range(nodes)]
    labels = {}

    def guarded(j):
        # a closed label: the label of O_pj plus a literal on pj
        return labels[ids[j]] & Label((Literal(pnames[j], rng.random() < 0.5),))

    for i in range(nodes):
        limit = min(i, props)
        if limit and rng.random() < 0.5:
            labels[ids[i]] = guarded(rng.randrange(limit))
        else:
            labels[ids[i]] = LAMBDA
    cnodes = [
        CstnNode(v, labels[v], pnames[i] if i < props else None) for i, v in enumerate(ids)
    ]
    arcs = []
    for a in ids:
        for b in ids:
            if a == b or rng.random() >= arc_density:
                continue
            label = labels[a] & labels[b]
            if not label.satisfiable:
                continue
            if props and rng.random() < 0.5:
                extra = guarded(rng.randrange(props))
                if label_con(label, extra):
                    label = label & extra
            w = rng.randint(lo, hi)
            arcs.append(LabeledConstraint(a, b, w, label))
    for v in ids:
        for p in sorted(labels[v].propositions):
            obs = ids[pnames.index(p)]
            arcs.append(LabeledConstraint(v, obs, -rng.randint(1, 2), labels[v]))
    return Cstn(tuple(pnames), tuple(cnodes), tuple(arcs))
