"""Conditional Simple Temporal Networks: labels, scenarios, restriction and expansion."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

from .errors import CapacityError, InputError, ValidationError

#: Default bound on |Sigma_P| * |V| for anything that expands a network.
DEFAULT_MAX_EXPANDED_NODES = 2**20

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.']*\Z")


def is_identifier(text):
    return bool(_IDENT.match(text))


@dataclass(frozen=True, order=True)
class Literal:
    proposition: str
    negated: bool = False

    def __str__(self):
        return ("-" if self.negated else "") + self.proposition

    def __invert__(self):
        return Literal(self.proposition, not self.negated)


@dataclass(frozen=True)
class Label:
    """A conjunction of literals; the empty label is lambda.

    Literals are kept sorted by proposition name (positive before negative)
    with exact duplicates removed, so two labels denoting the same
    conjunction compare and hash equal.  A label holding both ``p`` and
    ``-p`` can be built directly (the validator reports it under WD1) but
    :meth:`parse` refuses it.
    """

    literals: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(sorted(set(self.literals))))

    @classmethod
    def of(cls, *items):
        lits = []
        for item in items:
            if isinstance(item, Literal):
                lits.append(item)
            elif item.startswith("-"):
                lits.append(Literal(item[1:], True))
            else:
                lits.append(Literal(item))
        return cls(tuple(lits))

    @classmethod
    def parse(cls, text):
        """Parse ``"p -q"``; the empty string is lambda."""
        tokens = text.split()
        lits = []
        for tok in tokens:
            name = tok[1:] if tok.startswith("-") else tok
            if not is_identifier(name):
                raise InputError(f"bad literal {tok!r} in label {text!r}")
            lits.append(Literal(name, tok.startswith("-")))
        label = cls(tuple(lits))
        if not label.satisfiable:
            raise InputError(f"label {text!r} is unsatisfiable")
        return label

    @property
    def satisfiable(self):
        return all(
            a.proposition != b.proposition
            for a, b in zip(self.literals, self.literals[1:])
        )

    @property
    def propositions(self):
        return frozenset(lit.proposition for lit in self.literals)

    def is_empty(self):
        return not self.literals

    def __and__(self, other):
        return Label(self.literals + other.literals)

    def __iter__(self):
        return iter(self.literals)

    def __len__(self):
        return len(self.literals)

    def __str__(self):
        return " ".join(str(lit) for lit in self.literals)


LAMBDA = Label()


def label_con(l1, l2):
    """True iff ``l1 & l2`` has no complementary pair of literals."""
    polarity = {lit.proposition: lit.negated for lit in l1.literals}
    return all(polarity.get(lit.proposition, lit.negated) == lit.negated for lit in l2.literals)


def label_sub(l1, l2):
    """True iff ``l1`` implies ``l2``, i.e. every literal of ``l2`` is in ``l1``."""
    return set(l2.literals) <= set(l1.literals)


@dataclass(frozen=True)
class Scenario:
    """A total truth assignment, stored in proposition-list order."""

    items: tuple = ()

    @classmethod
    def from_dict(cls, propositions, values):
        if set(values) != set(propositions):
            raise InputError(
                f"scenario domain {sorted(values)} differs from propositions {sorted(propositions)}"
            )
        return cls(tuple((p, bool(values[p])) for p in propositions))

    @classmethod
    def from_label(cls, propositions, text):
        label = Label.parse(text) if isinstance(text, str) else text
        if label.propositions != set(propositions) or len(label) != len(propositions):
            raise InputError(f"{str(label)!r} does not describe a scenario over {list(propositions)}")
        return cls.from_dict(propositions, {lit.proposition: not lit.negated for lit in label})

    def __getitem__(self, proposition):
        for p, value in self.items:
            if p == proposition:
                return value
        raise InputError(f"unknown proposition {proposition!r}")

    def as_dict(self):
        return dict(self.items)

    @property
    def propositions(self):
        return tuple(p for p, _ in self.items)

    @property
    def label(self):
        """The label l_s that describes this scenario."""
        return Label(tuple(Literal(p, not value) for p, value in self.items))

    def flip(self, *props):
        return Scenario(tuple((p, (not v) if p in props else v) for p, v in self.items))

    def __str__(self):
        return str(self.label)


def scenario_eval(s, label):
    values = s.as_dict()
    for lit in label.literals:
        if lit.proposition not in values:
            raise InputError(f"proposition {lit.proposition!r} not assigned by scenario {s}")
        if values[lit.proposition] == lit.negated:
            return False
    return True


@dataclass(frozen=True)
class CstnNode:
    id: str
    label: Label = LAMBDA
    observes: Optional[str] = None


@dataclass(frozen=True)
class LabeledConstraint:
    """The labeled constraint ``v - u <= w`` guarded by ``label``."""

    u: str
    v: str
    w: int
    label: Label = LAMBDA

    def __str__(self):
        tag = f", {self.label}" if self.label.literals else ""
        return f"<{self.v} - {self.u} <= {self.w}{tag}>"


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    message: str

    def __str__(self):
        return f"{self.rule} {self.subject}: {self.message}"


@dataclass(frozen=True)
class Cstn:
    """A CSTN; structure is checked on construction, well-definedness by :func:`validate_wd`."""

    propositions: tuple
    nodes: tuple
    constraints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "propositions", tuple(self.propositions))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if len(set(self.propositions)) != len(self.propositions):
            raise InputError("duplicate proposition")
        props = set(self.propositions)
        seen = set()
        for node in self.nodes:
            if node.id in seen:
                raise InputError(f"duplicate node id {node.id!r}")
            seen.add(node.id)
            unknown = node.label.propositions - props
            if unknown:
                raise InputError(f"node {node.id!r} label uses unknown propositions {sorted(unknown)}")
            if node.observes is not None and node.observes not in props:
                raise InputError(f"node {node.id!r} observes unknown proposition {node.observes!r}")
        observed = [n.observes for n in self.nodes if n.observes is not None]
        if len(set(observed)) != len(observed):
            raise InputError("a proposition is observed by more than one node")
        missing = props - set(observed)
        if missing:
            raise InputError(f"propositions without an observation node: {sorted(missing)}")
        for c in self.constraints:
            for end in (c.u, c.v):
                if end not in seen:
                    raise InputError(f"constraint {c} references unknown node {end!r}")
            if isinstance(c.w, bool) or not isinstance(c.w, int):
                raise InputError(f"constraint {c} has a non-integer weight")
            unknown = c.label.propositions - props
            if unknown:
                raise InputError(f"constraint {c} label uses unknown propositions {sorted(unknown)}")

    @cached_property
    def node_map(self):
        return {n.id: n for n in self.nodes}

    @cached_property
    def observer(self):
        """The observation map O: proposition -> node id."""
        return {n.observes: n.id for n in self.nodes if n.observes is not None}

    @property
    def node_ids(self):
        return tuple(n.id for n in self.nodes)

    @property
    def max_weight(self):
        return max((abs(c.w) for c in self.constraints), default=0)

    def label_of(self, node_id):
        return self.node_map[node_id].label

    @property
    def scenario_count(self):
        return 2 ** len(self.propositions)


@dataclass(frozen=True)
class Stn:
    """Simple temporal network; an arc ``(u, v, w)`` means ``phi(v) <= phi(u) + w``."""

    nodes: tuple
    arcs: tuple = field(default=())

    def earliest_schedule(self):
        """Least non-negative feasible schedule, or None if a negative cycle exists.

        Plain Bellman-Ford from a virtual source; used as an oracle and for
        the zero-proposition case.
        """
        dist = {v: Fraction(0) for v in self.nodes}
        # shortest paths on reversed arcs give the least solution phi(u) >= phi(v) - w
        for _ in range(len(self.nodes) + 1):
            changed = False
            for u, v, w in self.arcs:
                if dist[v] - w > dist[u]:
                    dist[u] = dist[v] - w
                    changed = True
            if not changed:
                return dist
        return None

    def is_consistent(self):
        return self.earliest_schedule() is not None

    def is_feasible(self, phi):
        return all(phi[v] <= phi[u] + w for u, v, w in self.arcs)


def enumerate_scenarios(g_or_props):
    """All scenarios in lexicographic order over the proposition list, False before True."""
    props = g_or_props.propositions if isinstance(g_or_props, Cstn) else tuple(g_or_props)
    return [
        Scenario(tuple(zip(props, values)))
        for values in itertools.product((False, True), repeat=len(props))
    ]


def expanded_id(node_id, index):
    return f"{node_id}@{index}"


def split_expanded_id(name):
    node, _, index = name.rpartition("@")
    return node, int(index)


def check_expansion_size(g, max_nodes=DEFAULT_MAX_EXPANDED_NODES):
    size = g.scenario_count * len(g.nodes)
    if size > max_nodes:
        raise CapacityError(
            f"{g.scenario_count} scenarios x {len(g.nodes)} nodes = {size} exceeds the cap of {max_nodes}"
        )


def validate_wd(g):
    """Return the list of WD1/WD2/WD3 violations (empty iff the network is well defined)."""
    out = []
    labels = {n.id: n.label for n in g.nodes}
    for k, c in enumerate(g.constraints):
        subject = f"constraint #{k} {c}"
        if not c.label.satisfiable:
            out.append(Violation("WD1", subject, "label is unsatisfiable"))
            continue
        for end in (c.u, c.v):
            if not label_sub(c.label, labels[end]):
                out.append(
                    Violation("WD1", subject, f"label does not subsume L({end}) = {labels[end] or 'lambda'}")
                )
        for p in sorted(c.label.propositions):
            obs = g.observer[p]
            if not label_sub(c.label, labels[obs]):
                out.append(
                    Violation("WD3", subject, f"label does not subsume L({obs}) = {labels[obs] or 'lambda'}")
                )
    for node in g.nodes:
        if not node.label.satisfiable:
            out.append(Violation("WD1", f"node {node.id}", "label is unsatisfiable"))
            continue
        for p in sorted(node.label.propositions):
            obs = g.observer[p]
            subject = f"node {node.id}"
            if obs == node.id:
                out.append(Violation("WD2", subject, f"label mentions {p}, which the node itself observes"))
                continue
            if not label_sub(node.label, labels[obs]):
                out.append(
                    Violation("WD2", subject, f"label does not subsume L({obs}) = {labels[obs] or 'lambda'}")
                )
            if not any(_precedes(c, obs, node) for c in g.constraints):
                out.append(
                    Violation(
                        "WD2", subject,
                        f"no constraint <{obs} - {node.id} <= w, l> with w <= -1 and Sub({node.label}, l)",
                    )
                )
    return out


def _precedes(c, obs, node):
    return c.u == node.id and c.v == obs and c.w <= -1 and label_sub(node.label, c.label)


def wd_warnings(g):
    """WD2 precedence constraints that exist but do not carry exactly L(u)."""
    out = []
    for node in g.nodes:
        for p in sorted(node.label.propositions):
            obs = g.observer[p]
            found = [c for c in g.constraints if _precedes(c, obs, node)]
            if found and not any(c.label == node.label for c in found):
                out.append(
                    Violation("WD2", f"node {node.id}", f"precedence on {obs} carries a weaker label than L(u)")
                )
    return out


def ensure_well_defined(g):
    violations = validate_wd(g)
    if violations:
        raise ValidationError(violations)


def restricted_nodes(g, s):
    return tuple(n.id for n in g.nodes if scenario_eval(s, n.label))


def restrict(g, s):
    """The STN of nodes and constraints whose labels hold under ``s``."""
    arcs = {}
    for c in g.constraints:
        if scenario_eval(s, c.label):
            arcs.setdefault((c.u, c.v, c.w), None)
    return Stn(restricted_nodes(g, s), tuple(arcs))


def difference_set(g, s1, s2):
    """Observation nodes scheduled under ``s1`` whose proposition differs in ``s2``."""
    present = set(restricted_nodes(g, s1))
    return frozenset(
        obs for p, obs in g.observer.items() if obs in present and s1[p] != s2[p]
    )


def expansion(g, max_nodes=DEFAULT_MAX_EXPANDED_NODES):
    """Disjoint union of all scenario restrictions; node ``v`` of scenario ``i`` becomes ``v@i``."""
    check_expansion_size(g, max_nodes)
    nodes, arcs = [], []
    for i, s in enumerate(enumerate_scenarios(g)):
        part = restrict(g, s)
        nodes.extend(expanded_id(v, i) for v in part.nodes)
        arcs.extend((expanded_id(u, i), expanded_id(v, i), w) for u, v, w in part.arcs)
    return Stn(tuple(nodes), tuple(arcs))
