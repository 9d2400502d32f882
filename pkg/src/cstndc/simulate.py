"""Step through a dynamic strategy, asking for observation outcomes as they happen.

An event is executed once its time is the same in every scenario still
consistent with the outcomes seen so far.  For a dynamic strategy the
earliest pending event always qualifies, so the stepper never stalls.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .cstn import enumerate_scenarios, restrict
from .dc import verify_strategy
from .errors import InputError, VerificationError

_ANSWERS = {
    "y": True, "yes": True, "t": True, "true": True, "1": True, "+": True,
    "n": False, "no": False, "f": False, "false": False, "0": False, "-": False,
}


class SimulationAborted(Exception):
    """The user quit (``q`` or end of input) before the execution finished."""


@dataclass
class Execution:
    outcomes: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    scenarios: list = field(default_factory=list)

    @property
    def history(self):
        return " ".join(p if v else f"-{p}" for p, v in self.outcomes.items())


def _ask(prop, when, read, write):
    while True:
        write(f"t={when}: observe {prop}? [y/n, q to quit] ")
        try:
            raw = read()
        except EOFError:
            raise SimulationAborted from None
        answer = raw.strip().lower()
        if answer in ("q", "quit", "exit"):
            raise SimulationAborted
        if answer in _ANSWERS:
            return _ANSWERS[answer]
        write(f"  not understood: {raw.strip()!r}\n")


def forced_events(sigma, live, done, order):
    """Pending events with the same time in every live scenario, sorted by time."""
    found = {}
    for v in sorted(order, key=order.__getitem__):
        if v in done or not all(v in sigma[s] for s in live):
            continue
        times = {sigma[s][v] for s in live}
        if len(times) == 1:
            found[v] = times.pop()
    return dict(sorted(found.items(), key=lambda item: (item[1], order[item[0]])))


def run(g, sigma, read=input, write=sys.stdout.write):
    """Execute ``sigma`` on ``g`` interactively; returns the finished :class:`Execution`.

    ``read`` supplies one answer per call and ``write`` receives the text,
    so sessions can be scripted.
    """
    check = verify_strategy(g, sigma)
    if not (check.viable and check.dynamic):
        raise InputError(f"strategy is not viable and dynamic: {check.summary()}")
    live = list(enumerate_scenarios(g))
    run_ = Execution()
    order = {v: k for k, v in enumerate(g.node_ids)}
    while True:
        pending = [
            (sigma[s][v], order[v], v)
            for s in live
            for v in sigma[s]
            if v not in run_.schedule
        ]
        if not pending:
            break
        now = min(t for t, _, _ in pending)
        batch = sorted({(k, v) for t, k, v in pending if t == now})
        for _, v in batch:
            times = {sigma[s][v] for s in live if v in sigma[s]}
            if len(times) != 1:
                raise VerificationError(f"event {v} is not determined by the history at t={now}")
            run_.schedule[v] = now
            write(f"t={now}: execute {v}\n")
        for _, v in batch:
            prop = g.node_map[v].observes
            if prop is None:
                continue
            value = _ask(prop, now, read, write)
            run_.outcomes[prop] = value
            live = [s for s in live if s[prop] == value]
            ahead = forced_events(sigma, live, run_.schedule, order)
            if ahead:
                write("  forced: " + ", ".join(f"{v}={t}" for v, t in ahead.items()) + "\n")
    run_.scenarios = live
    for s in live:
        phi = sigma[s]
        if phi != run_.schedule or not restrict(g, s).is_feasible(phi):
            raise VerificationError(f"realized schedule does not match scenario {s}")
    write(f"scenario: {run_.history or 'lambda'}\n")
    write("schedule: " + ", ".join(f"{v}={t}" for v, t in run_.schedule.items()) + "\n")
    return run_
