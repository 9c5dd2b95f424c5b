"""Behavioral programs: synchronization statements, b-threads, arbitration.

A b-thread is a deterministic state machine given by two pure functions,
``view(state) -> SyncStatement | DONE`` and ``advance(state, event) ->
state``. At every synchronization point each live thread contributes one
statement (events it requests, events it waits for, events it blocks, an
integer priority, and a hot flag). An event may be selected when some
thread requests it and no thread blocks it; among those, only events whose
priority reaches the global maximum are selectable. When an event is
selected, every thread that requested it or waits for it advances.

Thread states must be hashable; a program configuration is the tuple of
thread states, so the whole state space is finite whenever every thread
has finitely many states.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from bppn.events import ALL, NONE, Alphabet, Event, EventSet, sort_events


class _Done:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DONE"


DONE = _Done()

RUNNING = "RUNNING"
DEADLOCK = "DEADLOCK"
TERMINATED = "TERMINATED"


@dataclass(frozen=True)
class SyncStatement:
    """One thread's contribution to a synchronization point.

    ``request`` is an ordered tuple of concrete events (order is kept for
    display and for round-trip fidelity; selection itself treats it as a
    set). ``wait_for`` and ``block`` are event sets. ``hot`` marks a
    statement whose thread must eventually advance for the run to be fair.
    """

    request: Tuple[Event, ...] = ()
    wait_for: EventSet = NONE
    block: EventSet = NONE
    priority: int = 0
    hot: bool = False

    def __post_init__(self):
        if not isinstance(self.request, tuple):
            object.__setattr__(self, "request", tuple(self.request))

    def moves_on(self, e: Event) -> bool:
        return e in self.request or self.wait_for.contains(e)


def sync(request=(), wait_for=NONE, block=NONE, priority=0, hot=False) -> SyncStatement:
    """Convenience constructor; accepts a single Event or a sequence for request."""
    if isinstance(request, Event):
        request = (request,)
    return SyncStatement(tuple(request), wait_for, block, priority, hot)


@dataclass(frozen=True)
class BThreadDef:
    """A b-thread as a pure state machine.

    ``view`` maps the thread state to its current statement (or DONE);
    ``advance`` maps (state, selected event) to the next state and is only
    consulted when the current statement requests or waits for the event.
    """

    name: str
    init: object
    view: Callable[[object], object]
    advance: Callable[[object, Event], object]

    def __repr__(self):
        return f"BThreadDef({self.name!r})"


class BProgram:
    """A finite collection of b-threads plus the program alphabet."""

    def __init__(self, threads: Sequence[BThreadDef], alphabet: Alphabet, name: str = ""):
        names = [t.name for t in threads]
        if len(set(names)) != len(names):
            raise ValueError("duplicate b-thread names")
        self.threads: Tuple[BThreadDef, ...] = tuple(threads)
        self.alphabet = alphabet
        self.name = name

    def initial(self) -> Tuple:
        return tuple(t.init for t in self.threads)

    def statements(self, config: Tuple) -> Tuple:
        """Per-thread statements at this configuration (SyncStatement or DONE)."""
        return tuple(t.view(s) for t, s in zip(self.threads, config))

    def enabled(self, config: Tuple) -> Tuple[Event, ...]:
        """Requested-and-not-blocked events, in canonical order."""
        stmts = [st for st in self.statements(config) if st is not DONE]
        requested = set()
        for st in stmts:
            requested.update(st.request)
        out = [e for e in requested if not any(st.block.contains(e) for st in stmts)]
        return sort_events(out)

    def selectable(self, config: Tuple) -> Tuple[Event, ...]:
        """Enabled events whose priority reaches the global maximum.

        An event's priority is the maximum priority over the statements
        that request it; only events at the overall maximum survive.
        """
        stmts = [st for st in self.statements(config) if st is not DONE]
        enabled = self.enabled(config)
        if not enabled:
            return ()
        prio: Dict[Event, int] = {}
        for st in stmts:
            for e in st.request:
                if e in prio:
                    prio[e] = max(prio[e], st.priority)
                else:
                    prio[e] = st.priority
        top = max(prio[e] for e in enabled)
        return tuple(e for e in enabled if prio[e] == top)

    def advance(self, config: Tuple, e: Event) -> Tuple:
        nxt: List = []
        for t, s in zip(self.threads, config):
            st = t.view(s)
            if st is not DONE and st.moves_on(e):
                nxt.append(t.advance(s, e))
            else:
                nxt.append(s)
        return tuple(nxt)

    def classify(self, config: Tuple) -> str:
        """RUNNING / DEADLOCK / TERMINATED.

        Deadlock means some live thread still requests an event but nothing
        is selectable; termination means no live thread requests anything.
        """
        if self.selectable(config):
            return RUNNING
        stmts = [st for st in self.statements(config) if st is not DONE]
        if any(st.request for st in stmts):
            return DEADLOCK
        return TERMINATED

    def hot_threads(self, config: Tuple) -> Tuple[str, ...]:
        out = []
        for t, s in zip(self.threads, config):
            st = t.view(s)
            if st is not DONE and st.hot:
                out.append(t.name)
        return tuple(out)

    def simulate(self, seed: Optional[int] = None, max_steps: int = 1000,
                 choose: Optional[Callable[[Tuple[Event, ...]], Event]] = None):
        """Run one execution; returns (trace, final classification).

        Selection among selectable events is uniform at random from
        ``seed`` unless a ``choose`` callback is given.
        """
        rng = random.Random(seed)
        config = self.initial()
        trace: List[Event] = []
        for _ in range(max_steps):
            options = self.selectable(config)
            if not options:
                return trace, self.classify(config)
            e = choose(options) if choose is not None else rng.choice(options)
            if e not in options:
                raise ValueError(f"chosen event {e} is not selectable")
            trace.append(e)
            config = self.advance(config, e)
        return trace, RUNNING


def loop_thread(name: str, statements: Sequence[SyncStatement]) -> BThreadDef:
    """A thread that cycles forever through a fixed list of statements,
    advancing one step whenever its current statement fires."""
    stmts = tuple(statements)
    if not stmts:
        raise ValueError("loop_thread needs at least one statement")

    def view(i):
        return stmts[i]

    def advance(i, e):
        return (i + 1) % len(stmts)

    return BThreadDef(name, 0, view, advance)


def seq_thread(name: str, statements: Sequence[SyncStatement]) -> BThreadDef:
    """A thread that runs through a fixed list of statements once, then is DONE."""
    stmts = tuple(statements)

    def view(i):
        if i >= len(stmts):
            return DONE
        return stmts[i]

    def advance(i, e):
        return i + 1

    return BThreadDef(name, 0, view, advance)
