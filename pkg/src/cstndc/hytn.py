"""Hyper Temporal Networks and their consistency check through an energy game."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import CapacityError, InputError, WeightOverflowError

INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Hyperarc:
    """Disjunctive constraint ``phi(tail) >= min over heads v of phi(v) - w(v)``.

    ``heads`` is a tuple of ``(node, weight)`` pairs.  The tail may not be a
    head, except for a single-head loop, which is how a standard self-loop
    constraint ``v - v <= w`` is carried over from a CSTN.
    """

    tail: str
    heads: tuple

    def __post_init__(self):
        object.__setattr__(self, "heads", tuple((v, w) for v, w in self.heads))
        if not self.heads:
            raise InputError(f"hyperarc from {self.tail!r} has no heads")
        names = [v for v, _ in self.heads]
        if len(set(names)) != len(names):
            raise InputError(f"hyperarc from {self.tail!r} repeats a head")
        if self.tail in names and len(names) > 1:
            raise InputError(f"hyperarc tail {self.tail!r} is also one of its heads")

    @classmethod
    def standard(cls, u, v, w):
        return cls(u, ((v, w),))

    @property
    def head_map(self):
        return dict(self.heads)

    @property
    def is_standard(self):
        return len(self.heads) == 1

    @property
    def size(self):
        """|A| = |H_A u {t_A}|."""
        return len({self.tail, *(v for v, _ in self.heads)})

    def satisfied_by(self, phi):
        t = phi[self.tail]
        return any(phi[v] <= t + w for v, w in self.heads)


@dataclass(frozen=True)
class Hytn:
    nodes: tuple
    hyperarcs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "hyperarcs", tuple(self.hyperarcs))
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise InputError("duplicate HyTN node")
        for a in self.hyperarcs:
            if a.tail not in known or any(v not in known for v, _ in a.heads):
                raise InputError(f"hyperarc {a} references an undeclared node")

    @property
    def size(self):
        """The encoding size m_A, the sum of |A| over all hyperarcs."""
        return sum(a.size for a in self.hyperarcs)

    @property
    def max_weight(self):
        return max((abs(w) for a in self.hyperarcs for _, w in a.heads), default=0)

    @cached_property
    def is_integral(self):
        return all(_is_integer(w) for a in self.hyperarcs for _, w in a.heads)


def _is_integer(w):
    if isinstance(w, bool):
        return False
    if isinstance(w, int):
        return True
    return isinstance(w, Fraction) and w.denominator == 1


def scale_hytn(h, factor):
    """Multiply every weight by ``factor``; the result must be integral and fit in 64 bits."""
    arcs = []
    for a in h.hyperarcs:
        heads = []
        for v, w in a.heads:
            scaled = Fraction(w) * factor
            if scaled.denominator != 1:
                raise InputError(f"weight {w} times {factor} is not an integer")
            if abs(scaled.numerator) > INT64_MAX:
                raise WeightOverflowError(f"scaled weight {scaled} does not fit in 64 bits")
            heads.append((v, int(scaled)))
        arcs.append(Hyperarc(a.tail, tuple(heads)))
    return Hytn(h.nodes, tuple(arcs))


def verify_hytn_schedule(h, phi):
    """Exact check of every hyperarc under ``phi``."""
    missing = [v for v in h.nodes if v not in phi]
    if missing:
        raise InputError(f"schedule misses nodes {missing[:5]}")
    return all(a.satisfied_by(phi) for a in h.hyperarcs)


def violated_hyperarcs(h, phi):
    return [a for a in h.hyperarcs if not a.satisfied_by(phi)]


@dataclass(frozen=True)
class HytnResult:
    """Outcome of a HyTN consistency check.

    ``schedule`` is a feasible scheduling when ``consistent``; otherwise
    ``losing`` holds the HyTN nodes whose energy is infinite.
    """

    consistent: bool
    schedule: object = None
    losing: frozenset = frozenset()
    energy: object = None


def check_hytn_consistency(h, cap=None):
    """Decide consistency of an integer-weighted HyTN and return a feasible schedule."""
    # local import: mpg depends on Hyperarc/Hytn
    from .mpg import hytn_to_mpg, solve_energy

    if not h.is_integral:
        raise InputError("HyTN weights must be integers; scale them first")
    game = hytn_to_mpg(h)
    energy = solve_energy(game, cap=cap)
    losing = frozenset(v for v in h.nodes if energy.is_top(v))
    if losing:
        return HytnResult(False, None, losing, energy)
    schedule = {v: Fraction(energy[v]) for v in h.nodes}
    return HytnResult(True, schedule, frozenset(), energy)


def brute_force_hytn(h, max_selections=2**16):
    """Independent oracle: try every choice of one head per hyperarc.

    A HyTN is consistent iff some selection of standard arcs forms an STN
    without negative cycles.  Returns a feasible schedule or None.
    """
    total = math.prod(len(a.heads) for a in h.hyperarcs)
    if total > max_selections:
        raise CapacityError(f"{total} head selections exceed the oracle bound {max_selections}")
    for choice in itertools.product(*(a.heads for a in h.hyperarcs)):
        arcs = [(a.tail, v, w) for a, (v, w) in zip(h.hyperarcs, choice)]
        phi = _bellman_ford(h.nodes, arcs)
        if phi is not None:
            return phi
    return None


def _bellman_ford(nodes, arcs):
    phi = {v: Fraction(0) for v in nodes}
    for _ in range(len(nodes) + 1):
        changed = False
        for u, v, w in arcs:
            if phi[v] > phi[u] + w:
                phi[v] = phi[u] + w
                changed = True
        if not changed:
            return phi
    return None
