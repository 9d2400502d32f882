"""Two-player energy games built from HyTNs, solved by worklist lifting.

Game nodes belong to Min (the adversary picking which constraint to
challenge) or Max (the scheduler picking which disjunct to honour).  The
least energy function E satisfies

    E(u) = max over edges (u, v, w) of lift(E(v), w)   for Min nodes
    E(u) = min over edges (u, v, w) of lift(E(v), w)   for Max nodes

with ``lift(e, w) = max(0, e - w)``.  Max wins the mean-payoff >= 0
objective exactly where E is finite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CapacityError, InputError, WeightOverflowError
from .hytn import INT64_MAX

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

MIN, MAX = 0, 1
OWNER_NAMES = {MIN: "min", MAX: "max"}
#: Value of an infinite energy in the public mapping.
TOP = math.inf


@dataclass(frozen=True, eq=False)
class Mpg:
    """A game graph in flat array form.

    ``owners[i]`` is ``MIN`` or ``MAX``; edge ``k`` goes from ``src[k]`` to
    ``dst[k]`` with integer weight ``weight[k]``.
    """

    names: tuple
    owners: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    @classmethod
    def from_lists(cls, nodes, edges):
        """Build from ``[(id, owner), ...]`` and ``[(from, to, weight), ...]``."""
        names = tuple(n for n, _ in nodes)
        index = {n: i for i, n in enumerate(names)}
        if len(index) != len(names):
            raise InputError("duplicate game node")
        owners = np.array([o for _, o in nodes], dtype=np.int8)
        try:
            src = np.array([index[a] for a, _, _ in edges], dtype=np.int64)
            dst = np.array([index[b] for _, b, _ in edges], dtype=np.int64)
        except KeyError as exc:
            raise InputError(f"edge references unknown node {exc.args[0]!r}") from None
        for _, _, w in edges:
            if abs(w) > INT64_MAX:
                raise WeightOverflowError(f"edge weight {w} does not fit in 64 bits")
        weight = np.array([w for _, _, w in edges], dtype=np.int64)
        return cls(names, owners, src, dst, weight)

    def __post_init__(self):
        for arr in (self.owners, self.src, self.dst, self.weight):
            arr.setflags(write=False)

    @cached_property
    def index(self):
        return {n: i for i, n in enumerate(self.names)}

    @property
    def nodes(self):
        return [(n, int(o)) for n, o in zip(self.names, self.owners)]

    @property
    def edges(self):
        return [
            (self.names[a], self.names[b], int(w))
            for a, b, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist())
        ]

    @property
    def max_weight(self):
        return int(np.abs(self.weight).max()) if len(self.weight) else 0

    @cached_property
    def out_csr(self):
        return _csr(len(self.names), self.src, self.dst, self.weight)

    @cached_property
    def in_csr(self):
        ptr, src, _ = _csr(len(self.names), self.dst, self.src, self.weight)
        return ptr, src

    def out_degree(self):
        return np.bincount(self.src, minlength=len(self.names))


def _csr(n, keys, vals, weights):
    order = np.argsort(keys, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return ptr, np.ascontiguousarray(vals[order]), np.ascontiguousarray(weights[order])


def hytn_to_mpg(h):
    """One Min node per HyTN node, one Max node per hyperarc.

    Min moves ``u -> A`` (weight 0) for every hyperarc with tail ``u``; Max
    moves ``A -> v`` with weight ``w_A(v)``.  A HyTN node without hyperarcs
    gets a Max companion and a 0-weight two-cycle, so nobody is ever stuck.
    """
    if not h.is_integral:
        raise InputError("game construction needs integer weights")
    nodes = [(v, MIN) for v in h.nodes]
    edges = []
    has_out = set()
    for k, a in enumerate(h.hyperarcs):
        arc = f"#arc{k}"
        nodes.append((arc, MAX))
        edges.append((a.tail, arc, 0))
        has_out.add(a.tail)
        edges.extend((arc, v, int(w)) for v, w in a.heads)
    for v in h.nodes:
        if v not in has_out:
            sink = f"#sink:{v}"
            nodes.append((sink, MAX))
            edges.append((v, sink, 0))
            edges.append((sink, v, 0))
    return Mpg.from_lists(nodes, edges)


def _max_drops(g):
    per_node = np.zeros(len(g.names), dtype=np.int64)
    np.maximum.at(per_node, g.src, np.maximum(-g.weight, 0))
    return per_node


def drop_sum_cap(g):
    """Sum over nodes of the largest weight drop on an outgoing edge.

    Any finite least energy is the drop accumulated along a simple path
    (cycles are non-negative under a winning strategy), so it never exceeds
    this sum.  It is at most ``len(nodes) * max_weight``.
    """
    if not len(g.weight):
        return 0
    return sum(int(x) for x in _max_drops(g))


def alternation_cap(g):
    """A bound on finite energies that is tighter on bipartite games.

    When every edge joins a Min node to a Max node, a simple path pairs each
    node of one side with its successor, so the drop is at most the sum over
    that side of ``d(v) + max d(successor)`` plus one unpaired leading node.
    Falls back to :func:`drop_sum_cap` otherwise.
    """
    if not len(g.weight):
        return 0
    d = _max_drops(g)
    best = sum(int(x) for x in d)
    if np.any(g.owners[g.src] == g.owners[g.dst]):
        return best
    succ = np.zeros(len(g.names), dtype=np.int64)
    np.maximum.at(succ, g.src, d[g.dst])
    for side in (MIN, MAX):
        mine = g.owners == side
        lead = int(d[~mine].max()) if np.any(~mine) else 0
        bound = sum(int(x) for x in d[mine]) + sum(int(x) for x in succ[mine]) + lead
        best = min(best, bound)
    return best


def nodes_weight_cap(g):
    """The coarser bound |V_G| * W_max."""
    return len(g.names) * g.max_weight


@dataclass(frozen=True, eq=False)
class EnergyFunction:
    """Least energy per game node; infinite entries read as :data:`TOP`."""

    game: Mpg
    values: np.ndarray
    cap: int
    iterations: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def top(self):
        return self.cap + 1

    def is_top(self, name):
        return int(self.values[self.game.index[name]]) > self.cap

    def __getitem__(self, name):
        value = int(self.values[self.game.index[name]])
        return TOP if value > self.cap else value

    def as_dict(self):
        return {n: (TOP if int(v) > self.cap else int(v)) for n, v in zip(self.game.names, self.values)}

    def finite_mask(self):
        return self.values <= self.cap


def _lift_loop(is_max, out_ptr, out_dst, out_w, in_ptr, in_src, cap, energy):
    n = is_max.shape[0]
    top = cap + 1
    queue = np.empty(max(n, 1), np.int64)
    queued = np.ones(n, np.bool_)
    for i in range(n):
        queue[i] = i
    head = 0
    size = n
    lifts = 0
    while size > 0:
        v = queue[head]
        head += 1
        if head == n:
            head = 0
        size -= 1
        queued[v] = False
        cur = energy[v]
        if cur == top:
            continue
        if is_max[v]:
            best = top
            for k in range(out_ptr[v], out_ptr[v + 1]):
                e = energy[out_dst[k]]
                if e == top:
                    val = top
                else:
                    val = e - out_w[k]
                    if val < 0:
                        val = 0
                    elif val > cap:
                        val = top
                if val < best:
                    best = val
                    if best <= cur:
                        break
        else:
            best = 0
            for k in range(out_ptr[v], out_ptr[v + 1]):
                e = energy[out_dst[k]]
                if e == top:
                    best = top
                    break
                val = e - out_w[k]
                if val > best:
                    best = val
            if best > cap:
                best = top
        if best > cur:
            energy[v] = best
            lifts += 1
            for k in range(in_ptr[v], in_ptr[v + 1]):
                p = in_src[k]
                if not queued[p] and energy[p] != top:
                    tail = head + size
                    if tail >= n:
                        tail -= n
                    queue[tail] = p
                    size += 1
                    queued[p] = True
    return lifts


_lift_fast = numba.njit(cache=True, nogil=True)(_lift_loop) if numba is not None else _lift_loop


def solve_energy(g, cap=None, jit=True):
    """Least fixpoint of the lifting operator, computed with a FIFO worklist.

    ``cap`` defaults to :func:`alternation_cap`; values beyond it become TOP.
    ``EnergyFunction.iterations`` counts successful lifts, which is at most
    ``len(nodes) * (cap + 1)``.
    """
    if np.any(g.out_degree() == 0):
        raise InputError("every game node needs an outgoing edge")
    if cap is None:
        cap = alternation_cap(g)
    if cap + g.max_weight + 1 > INT64_MAX:
        raise WeightOverflowError(f"energy cap {cap} overflows 64-bit arithmetic")
    out_ptr, out_dst, out_w = g.out_csr
    in_ptr, in_src = g.in_csr
    is_max = np.ascontiguousarray(g.owners == MAX)
    energy = np.zeros(len(g.names), dtype=np.int64)
    loop = _lift_fast if jit else _lift_loop
    lifts = loop(is_max, out_ptr, out_dst, out_w, in_ptr, in_src, np.int64(cap), energy)
    energy.setflags(write=False)
    stats = {"game_nodes": len(g.names), "game_edges": len(g.src), "cap": int(cap)}
    return EnergyFunction(g, energy, int(cap), int(lifts), stats)


def lifting_violations(e):
    """Nodes where one more synchronous round of lifting would change E."""
    g = e.game
    top = e.top
    out_ptr, out_dst, out_w = g.out_csr
    values = e.values.tolist()
    bad = []
    for v in range(len(g.names)):
        lifted = []
        for k in range(out_ptr[v], out_ptr[v + 1]):
            x = values[out_dst[k]]
            y = top if x == top else max(0, x - int(out_w[k]))
            lifted.append(top if y > e.cap else y)
        new = max(lifted) if g.owners[v] == MIN else min(lifted)
        if new != values[v]:
            bad.append(g.names[v])
    return bad


def brute_force_mpg(g, max_strategies=2**16):
    """Independent oracle: enumerate Max's positional strategies.

    Under a fixed Max strategy the game becomes a graph in which Min picks
    every move; Max wins at ``n`` iff no negative cycle is reachable from
    ``n``.  Returns ``{node: max_wins}``.
    """
    n = len(g.names)
    succ = [[] for _ in range(n)]
    for a, b, w in zip(g.src.tolist(), g.dst.tolist(), g.weight.tolist()):
        succ[a].append((b, w))
    if any(not s for s in succ):
        raise InputError("every game node needs an outgoing edge")
    max_nodes = [v for v in range(n) if g.owners[v] == MAX]
    total = math.prod(len(succ[v]) for v in max_nodes)
    if total > max_strategies:
        raise CapacityError(f"{total} positional strategies exceed the oracle bound {max_strategies}")
    wins = [False] * n
    for choice in itertools.product(*(succ[v] for v in max_nodes)):
        fixed = dict(zip(max_nodes, choice))
        edges = []
        for v in range(n):
            if v in fixed:
                edges.append((v, *fixed[v]))
            else:
                edges.extend((v, b, w) for b, w in succ[v])
        for v, ok in enumerate(_no_negative_cycle_reachable(n, edges)):
            wins[v] = wins[v] or ok
        if all(wins):
            break
    return {g.names[v]: wins[v] for v in range(n)}


def _no_negative_cycle_reachable(n, edges):
    inf = math.inf
    dist = [[inf] * n for _ in range(n)]
    for a, b, w in edges:
        if w < dist[a][b]:
            dist[a][b] = w
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik == inf:
                continue
            di = dist[i]
            for j in range(n):
                if dik + dk[j] < di[j]:
                    di[j] = dik + dk[j]
    on_negative = [dist[k][k] < 0 for k in range(n)]
    return [
        not any(on_negative[k] and (k == i or dist[i][k] < inf) for k in range(n))
        for i in range(n)
    ]


def dump_mpg(g):
    """Plain-text edge list: a ``# node id owner`` header, then ``from owner to weight`` lines."""
    owner = {n: OWNER_NAMES[o] for n, o in g.nodes}
    lines = [f"# node {n} {owner[n]}" for n in g.names]
    lines.extend(f"{a} {owner[a]} {b} {w}" for a, b, w in g.edges)
    return "\n".join(lines) + "\n"


def parse_mpg_dump(text):
    """Inverse of :func:`dump_mpg`; owners of pure targets are read from their own lines."""
    owners = {}
    order = []
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "#":
            if parts[1:2] == ["node"] and len(parts) == 4:
                name, owner = parts[2], parts[3]
            else:
                continue
        else:
            if len(parts) != 4:
                raise InputError(f"line {lineno}: expected 'from owner to weight'")
            name, owner, target, w = parts
            edges.append((name, target, int(w)))
        if owner not in ("min", "max"):
            raise InputError(f"line {lineno}: unknown owner {owner!r}")
        if name not in owners:
            order.append(name)
        owners[name] = MIN if owner == "min" else MAX
    for _, b, _ in edges:
        if b not in owners:
            raise InputError(f"owner of {b!r} is unknown")
    return Mpg.from_lists([(n, owners[n]) for n in order], edges)
