"""Text formats: CSTN documents, strategy documents and DOT export.

A CSTN document is line oriented; ``#`` starts a comment and labels are
quoted literal lists (``"p -q"``, empty string or omitted for lambda)::

    propositions p q
    node A
    node Op observes p
    node B label "p -q"
    constraint A C 10          # C - A <= 10
    constraint A B 3 "p -q"    # B - A <= 3 when p and not q

Strategy documents are JSON: scenario label -> node -> ``"N/D"``.
"""

from __future__ import annotations

import json
import re
import shlex
from fractions import Fraction

from .cstn import (
    LAMBDA,
    Cstn,
    CstnNode,
    Label,
    LabeledConstraint,
    Scenario,
    enumerate_scenarios,
    ensure_well_defined,
    is_identifier,
    restricted_nodes,
)
from .errors import InputError, ParseError
from .hytn import Hytn


_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")


def _column(raw, token):
    idx = raw.find(token)
    return idx + 1 if idx >= 0 else 1


def _label(text, raw, lineno, source):
    try:
        return Label.parse(text)
    except InputError as exc:
        raise ParseError(str(exc), lineno, _column(raw, text), source) from None


def _ident(tok, raw, lineno, source, what):
    if not is_identifier(tok):
        raise ParseError(f"bad {what} {tok!r}", lineno, _column(raw, tok), source)
    return tok


def parse_cstn(text, source=None, validate=True):
    """Parse a CSTN document, then (by default) check WD1-WD3.

    Syntax problems raise :class:`ParseError` with line and column; broken
    well-definedness raises :class:`ValidationError` naming rule and entity.
    """
    props = None
    nodes = {}
    node_lines = {}
    constraints = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        try:
            toks = shlex.split(raw, comments=True)
        except ValueError as exc:
            raise ParseError(str(exc), lineno, 1, source) from None
        if not toks:
            continue
        head, args = toks[0], toks[1:]
        if head == "propositions":
            if props is not None:
                raise ParseError("propositions declared twice", lineno, 1, source)
            props = [_ident(t, raw, lineno, source, "proposition") for t in args]
            if len(set(props)) != len(props):
                raise ParseError("duplicate proposition", lineno, 1, source)
        elif head == "node":
            if not args:
                raise ParseError("node needs an id", lineno, 1, source)
            nid = _ident(args[0], raw, lineno, source, "node id")
            if nid in nodes:
                raise ParseError(
                    f"duplicate node id {nid!r} (first declared on line {node_lines[nid]})",
                    lineno, _column(raw, nid), source,
                )
            label, observes = LAMBDA, None
            rest = args[1:]
            if len(rest) % 2:
                raise ParseError("expected 'label <text>' / 'observes <prop>' pairs", lineno, 1, source)
            for key, value in zip(rest[::2], rest[1::2]):
                if key == "label":
                    label = _label(value, raw, lineno, source)
                elif key == "observes":
                    observes = _ident(value, raw, lineno, source, "proposition")
                else:
                    raise ParseError(f"unknown node attribute {key!r}", lineno, _column(raw, key), source)
            nodes[nid] = CstnNode(nid, label, observes)
            node_lines[nid] = lineno
        elif head == "constraint":
            if len(args) not in (3, 4):
                raise ParseError("expected: constraint <u> <v> <w> [label]", lineno, 1, source)
            u, v = args[0], args[1]
            for end in (u, v):
                if end not in nodes:
                    raise ParseError(f"undeclared node {end!r}", lineno, _column(raw, end), source)
            try:
                w = int(args[2])
            except ValueError:
                raise ParseError(f"weight {args[2]!r} is not an integer", lineno, _column(raw, args[2]), source) from None
            label = _label(args[3], raw, lineno, source) if len(args) == 4 else LAMBDA
            constraints.append(LabeledConstraint(u, v, w, label))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, 1, source)
    try:
        g = Cstn(tuple(props or ()), tuple(nodes.values()), tuple(constraints))
    except InputError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), None, None, source) from None
    if validate:
        ensure_well_defined(g)
    return g


def _quote(label):
    return f' "{label}"' if label.literals else ""


def serialize_cstn(g):
    lines = ["propositions " + " ".join(g.propositions) if g.propositions else "propositions"]
    for n in g.nodes:
        line = f"node {n.id}"
        if n.label.literals:
            line += f' label "{n.label}"'
        if n.observes is not None:
            line += f" observes {n.observes}"
        lines.append(line)
    for c in g.constraints:
        lines.append(f"constraint {c.u} {c.v} {c.w}{_quote(c.label)}")
    return "\n".join(lines) + "\n"


def format_rational(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text):
    if not isinstance(text, str) or not _RATIONAL.fullmatch(text.strip()):
        raise InputError(f"time {text!r} must be an 'N/D' string")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad rational {text!r}") from None


def strategy_to_dict(g, sigma):
    out = {}
    for s in enumerate_scenarios(g):
        sched = sigma[s]
        out[str(s)] = {v: format_rational(sched[v]) for v in g.node_ids if v in sched}
    return {"propositions": list(g.propositions), "scenarios": out}


def serialize_strategy(g, sigma):
    return json.dumps(strategy_to_dict(g, sigma), indent=2) + "\n"


def parse_strategy(text, g):
    """Read a strategy document and check it against ``g``'s scenarios and restrictions."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or "scenarios" not in doc:
        raise InputError("strategy document needs a 'scenarios' object")
    props = doc.get("propositions", list(g.propositions))
    if list(props) != list(g.propositions):
        raise InputError(f"strategy propositions {props} differ from the network's {list(g.propositions)}")
    sigma = {}
    for key, sched in doc["scenarios"].items():
        s = Scenario.from_label(g.propositions, key)
        if s in sigma:
            raise InputError(f"scenario {key!r} listed twice")
        if not isinstance(sched, dict):
            raise InputError(f"schedule for {key!r} must be an object")
        sigma[s] = {v: parse_rational(t) for v, t in sched.items()}
    for s in enumerate_scenarios(g):
        if s not in sigma:
            raise InputError(f"strategy misses scenario {str(s) or 'lambda'!r}")
        expected = set(restricted_nodes(g, s))
        if set(sigma[s]) != expected:
            raise InputError(f"scenario {str(s)!r}: nodes {sorted(sigma[s])}, expected {sorted(expected)}")
    return sigma


def _dot_id(name):
    return json.dumps(str(name))


def export_dot(obj):
    """Graphviz text for a CSTN or a HyTN; hyperarcs go through a junction point."""
    if isinstance(obj, Cstn):
        return _cstn_dot(obj)
    if isinstance(obj, Hytn):
        return _hytn_dot(obj)
    raise InputError(f"cannot export {type(obj).__name__} to DOT")


def _cstn_dot(g):
    lines = ["digraph cstn {"]
    for n in g.nodes:
        text = n.id
        if n.observes is not None:
            text += f"\\n{n.observes}?"
        if n.label.literals:
            text += f"\\n[{n.label}]"
        attrs = [f"label={json.dumps(text).replace(chr(92) * 2, chr(92))}"]
        if n.observes is not None:
            attrs.append("shape=doublecircle")
        lines.append(f"  {_dot_id(n.id)} [{', '.join(attrs)}];")
    for c in g.constraints:
        text = str(c.w) + (f", {c.label}" if c.label.literals else "")
        lines.append(f"  {_dot_id(c.u)} -> {_dot_id(c.v)} [label={json.dumps(text)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _hytn_dot(h):
    lines = ["digraph hytn {"]
    for v in h.nodes:
        lines.append(f"  {_dot_id(v)};")
    for k, a in enumerate(h.hyperarcs):
        j = _dot_id(f"#j{k}")
        lines.append(f"  {j} [shape=point];")
        lines.append(f"  {_dot_id(a.tail)} -> {j} [arrowhead=none];")
        for v, w in a.heads:
            lines.append(f"  {j} -> {_dot_id(v)} [label={json.dumps(str(w))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
