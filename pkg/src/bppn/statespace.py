"""Finite labeled-transition-system construction and graph analyses.

``build_lts`` explores the reachable states of anything that implements
the small Stepper interface (b-programs and Petri nets both do) and
returns an immutable :class:`Lts`. On top of that sit the helper-edge
elimination that produces the reduced graph (PN*), deadlock listing,
hot-cycle (liveness-violation) search, and DOT/JSON export.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from bppn.bprogram import BProgram, DEADLOCK, RUNNING, TERMINATED
from bppn.events import Event
from bppn.petri import PetriNet


class GuardExceeded(RuntimeError):
    def __init__(self, guard: str, value: int, limit: int):
        super().__init__(f"guard {guard} exceeded: {value} > {limit}")
        self.guard = guard
        self.value = value
        self.limit = limit


class HelperCycle(ValueError):
    pass


class NotBpLts(ValueError):
    pass


@dataclass(frozen=True)
class StateMeta:
    deadlock: bool = False
    terminated: bool = False
    # None for non-BP sources (no hot data), a tuple of thread names for BP.
    hot_threads: Optional[Tuple[str, ...]] = None


class Lts:
    """An immutable labeled transition system.

    States are dense integer ids; ``initial`` is one of them. Edges are
    (src, event, dst) triples with no duplicates, stored in a canonical
    order (by src id, then event, then dst). ``alphabet`` is the event set
    of the originating model (which may strictly contain the edge labels);
    ``helper_events`` are the model's implementation-only events.
    """

    def __init__(self, n_states: int, initial: int,
                 edges: Iterable[Tuple[int, Event, int]],
                 meta: Sequence[StateMeta],
                 state_labels: Optional[Sequence[str]] = None,
                 alphabet: Iterable[Event] = (),
                 helper_events: Iterable[Event] = (),
                 name: str = ""):
        self.n_states = n_states
        self.initial = initial
        dedup = sorted(set(edges), key=lambda e: (e[0], e[1].sort_key(), e[2]))
        self.edges: Tuple[Tuple[int, Event, int], ...] = tuple(dedup)
        self.meta: Tuple[StateMeta, ...] = tuple(meta)
        if len(self.meta) != n_states:
            raise ValueError("meta length must equal state count")
        if state_labels is None:
            state_labels = [str(i) for i in range(n_states)]
        self.state_labels: Tuple[str, ...] = tuple(state_labels)
        self.alphabet: FrozenSet[Event] = frozenset(alphabet)
        self.helper_events: FrozenSet[Event] = frozenset(helper_events)
        self.name = name
        self._succ: Optional[List[List[Tuple[Event, int]]]] = None

    # -- basic queries ---------------------------------------------------

    def num_states(self) -> int:
        return self.n_states

    def num_transitions(self) -> int:
        return len(self.edges)

    def successors(self, s: int) -> List[Tuple[Event, int]]:
        if self._succ is None:
            succ: List[List[Tuple[Event, int]]] = [[] for _ in range(self.n_states)]
            for u, e, v in self.edges:
                succ[u].append((e, v))
            self._succ = succ
        return self._succ[s]

    def deadlock_states(self) -> Tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.meta) if m.deadlock)

    def is_bp_sourced(self) -> bool:
        return all(m.hot_threads is not None for m in self.meta)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Lts)
                and self.n_states == other.n_states
                and self.initial == other.initial
                and self.edges == other.edges
                and self.meta == other.meta
                and self.state_labels == other.state_labels
                and self.alphabet == other.alphabet
                and self.helper_events == other.helper_events)

    def __repr__(self) -> str:
        return (f"Lts({self.name or 'unnamed'}: {self.n_states} states, "
                f"{len(self.edges)} transitions)")

    # -- export ----------------------------------------------------------

    def to_dot(self) -> str:
        lines = ["digraph lts {", "  rankdir=LR;", '  __init [shape=point,label=""];']
        for i in range(self.n_states):
            shape = "doublecircle" if self.meta[i].deadlock else "circle"
            label = self.state_labels[i].replace('"', r"\"")
            lines.append(f'  q{i} [shape={shape},label="{label}"];')
        lines.append(f"  __init -> q{self.initial};")
        for u, e, v in self.edges:
            lines.append(f'  q{u} -> q{v} [label="{e.render()}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "states": [{"id": i, "label": self.state_labels[i]}
                       for i in range(self.n_states)],
            "initial": self.initial,
            "edges": [{"src": u, "event": e.render(), "dst": v}
                      for u, e, v in self.edges],
            "meta": [{"deadlock": m.deadlock,
                      "terminated": m.terminated,
                      "hot_threads": (sorted(m.hot_threads)
                                      if m.hot_threads is not None else None)}
                     for m in self.meta],
            "alphabet": sorted(e.render() for e in self.alphabet),
            "helper_events": sorted(e.render() for e in self.helper_events),
        }

    @staticmethod
    def from_json(doc: dict, name: str = "") -> "Lts":
        states = doc["states"]
        n = len(states)
        labels = [""] * n
        for entry in states:
            labels[entry["id"]] = entry["label"]
        edges = [(e["src"], Event.parse(e["event"]), e["dst"]) for e in doc["edges"]]
        meta = [StateMeta(m["deadlock"], m["terminated"],
                          tuple(m["hot_threads"]) if m["hot_threads"] is not None else None)
                for m in doc["meta"]]
        return Lts(n, doc["initial"], edges, meta, labels,
                   alphabet=[Event.parse(t) for t in doc.get("alphabet", [])],
                   helper_events=[Event.parse(t) for t in doc.get("helper_events", [])],
                   name=name)

    def stats_line(self, model: str, formalism: str, n, faults: bool) -> str:
        return (f"{model},{formalism},{n},{str(bool(faults)).lower()},"
                f"{self.num_states()},{self.num_transitions()}")


# -- steppers --------------------------------------------------------------


class BpStepper:
    """Explores a b-program: successors are the selectable events."""

    def __init__(self, program: BProgram):
        self.program = program

    def initial(self):
        return self.program.initial()

    def successors(self, config) -> List[Tuple[Event, object]]:
        prog = self.program
        return [(e, prog.advance(config, e)) for e in prog.selectable(config)]

    def classify(self, config) -> str:
        return self.program.classify(config)

    def hot_threads(self, config) -> Optional[Tuple[str, ...]]:
        return self.program.hot_threads(config)

    def describe(self, config) -> str:
        parts = []
        for t, s in zip(self.program.threads, config):
            parts.append(f"{t.name}:{s}")
        return "<" + " ".join(parts) + ">"

    def alphabet(self) -> FrozenSet[Event]:
        return frozenset(self.program.alphabet)

    def helper_events(self) -> FrozenSet[Event]:
        return frozenset()


class PnStepper:
    """Explores a Petri net's reachability graph; events are transition labels."""

    def __init__(self, net: PetriNet, max_tokens: int = 1000):
        self.net = net
        self.max_tokens = max_tokens
        self._events = {t: Event.parse(tr.label)
                        for t, tr in net.transitions.items()}

    def initial(self):
        m = self.net.initial_marking()
        self._check_tokens(m)
        return m

    def successors(self, m) -> List[Tuple[Event, object]]:
        out = []
        seen = set()
        for tid in self.net.enabled(m):
            nxt = self.net.fire(m, tid)
            self._check_tokens(nxt)
            key = (self._events[tid], nxt)
            if key in seen:
                continue
            seen.add(key)
            out.append(key)
        return out

    def _check_tokens(self, m) -> None:
        worst = max(m) if m else 0
        if worst > self.max_tokens:
            raise GuardExceeded("max_tokens", worst, self.max_tokens)

    def classify(self, m) -> str:
        return DEADLOCK if not self.net.enabled(m) else RUNNING

    def hot_threads(self, m):
        return None

    def describe(self, m) -> str:
        return self.net.format_marking(m)

    def alphabet(self) -> FrozenSet[Event]:
        return frozenset(Event.parse(l) for l in self.net.labels())

    def helper_events(self) -> FrozenSet[Event]:
        return frozenset(Event.parse(l) for l in self.net.helper_labels())


def build_lts(stepper, max_states: int = 10 ** 6, name: str = "",
              keep_states: bool = False) -> Lts:
    """Breadth-first reachability; states deduplicated by structural value.

    Deterministic: state ids are discovery order, successor expansion is
    in each stepper's canonical event order.
    """
    init = stepper.initial()
    index: Dict[object, int] = {init: 0}
    states: List[object] = [init]
    edges: List[Tuple[int, Event, int]] = []
    metas: List[Optional[StateMeta]] = [None]
    queue = deque([0])
    while queue:
        sid = queue.popleft()
        s = states[sid]
        succ = stepper.successors(s)
        for e, t in succ:
            tid = index.get(t)
            if tid is None:
                if len(states) >= max_states:
                    raise GuardExceeded("max_states", len(states) + 1, max_states)
                tid = len(states)
                index[t] = tid
                states.append(t)
                metas.append(None)
                queue.append(tid)
            edges.append((sid, e, tid))
        if succ:
            kind = RUNNING
        else:
            kind = stepper.classify(s)
        metas[sid] = StateMeta(deadlock=(kind == DEADLOCK),
                               terminated=(kind == TERMINATED),
                               hot_threads=stepper.hot_threads(s))
    lts = Lts(len(states), 0, edges, [m for m in metas],
              state_labels=[stepper.describe(s) for s in states],
              alphabet=stepper.alphabet(),
              helper_events=stepper.helper_events(),
              name=name)
    if keep_states:
        lts.state_objects = tuple(states)
    return lts


# -- helper-edge elimination ------------------------------------------------


def reduce_helper(lts: Lts, helpers: Optional[Iterable[Event]] = None) -> Lts:
    """Delete helper-labeled edges: every edge into a helper-edge source is
    rewired to the helper edge's target, chains of helper edges are followed
    all the way down (a source with several helper targets fans the incoming
    edge out to all of them), and states left unreachable are dropped.
    Helpers are treated as instantaneous bookkeeping, so any other outgoing
    edge of a helper-edge source is discarded along with the state itself.
    Duplicate edges created by the rewiring are collapsed.

    ``helpers`` defaults to the LTS's own helper_events. Raises
    :class:`HelperCycle` when a cycle of only helper edges exists.
    """
    helper_set = frozenset(helpers) if helpers is not None else lts.helper_events
    if not helper_set:
        return lts

    srcmap: Dict[int, List[int]] = {}
    for u, e, v in lts.edges:
        if e in helper_set:
            srcmap.setdefault(u, []).append(v)

    resolved = _resolve_helper_targets(srcmap)

    def resolve(v: int) -> Tuple[int, ...]:
        return resolved.get(v, (v,))

    new_initial_set = resolve(lts.initial)
    if len(new_initial_set) != 1:
        raise HelperCycle(
            "initial state eliminates to multiple states; cannot pick an initial")
    new_initial = new_initial_set[0]

    rewired: Set[Tuple[int, Event, int]] = set()
    for u, e, v in lts.edges:
        if e in helper_set or u in srcmap:
            continue
        for w in resolve(v):
            rewired.add((u, e, w))

    # prune to the fragment reachable from the new initial
    succ: Dict[int, List[Tuple[Event, int]]] = {}
    for u, e, v in rewired:
        succ.setdefault(u, []).append((e, v))
    keep: Set[int] = set()
    queue = deque([new_initial])
    keep.add(new_initial)
    while queue:
        u = queue.popleft()
        for e, v in succ.get(u, ()):
            if v not in keep:
                keep.add(v)
                queue.append(v)

    old_ids = sorted(keep)
    remap = {old: new for new, old in enumerate(old_ids)}
    edges = [(remap[u], e, remap[v]) for (u, e, v) in rewired
             if u in keep and v in keep]
    meta = [lts.meta[old] for old in old_ids]
    labels = [lts.state_labels[old] for old in old_ids]
    return Lts(len(old_ids), remap[new_initial], edges, meta, labels,
               alphabet=lts.alphabet - helper_set,
               helper_events=lts.helper_events - helper_set,
               name=(lts.name + "*") if lts.name else "reduced")


def _resolve_helper_targets(srcmap: Dict[int, List[int]]) -> Dict[int, Tuple[int, ...]]:
    """For every helper-edge source, the set of states its helper chains end at.

    Entry/exit DFS over the helper-edge graph; a state that is not a
    helper-edge source resolves to itself. Raises HelperCycle when helper
    edges form a cycle (the chase would never bottom out).
    """
    resolved: Dict[int, Tuple[int, ...]] = {}
    on_path: Set[int] = set()
    for root in srcmap:
        if root in resolved:
            continue
        stack: List[Tuple[int, bool]] = [(root, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                on_path.discard(node)
                vals: Set[int] = set()
                for t in srcmap[node]:
                    vals.update(resolved[t])
                resolved[node] = tuple(sorted(vals))
                continue
            if node in resolved:
                continue
            if node not in srcmap:
                resolved[node] = (node,)
                continue
            on_path.add(node)
            stack.append((node, True))
            for t in srcmap[node]:
                if t in on_path:
                    raise HelperCycle(
                        f"cycle of helper edges through state {t}")
                if t not in resolved:
                    stack.append((t, False))
    return resolved


# -- analyses ---------------------------------------------------------------


def find_deadlocks(lts: Lts) -> Tuple[int, ...]:
    return lts.deadlock_states()


@dataclass(frozen=True)
class HotCycleViolation:
    thread: str
    prefix: Tuple[int, ...]  # state ids from initial up to the cycle entry
    cycle: Tuple[int, ...]   # state ids; edge cycle[-1] -> cycle[0] closes it


def find_hot_cycles(lts: Lts) -> Tuple[HotCycleViolation, ...]:
    """Liveness violations: reachable cycles along which a thread stays hot.

    One representative lasso per (thread, strongly connected component of
    the thread's hot subgraph). A cycle counts whenever the thread is hot
    at every state on it, whether or not the thread moves along the way.
    """
    if not lts.is_bp_sourced():
        raise NotBpLts("hot-cycle analysis needs hot-thread metadata (BP-sourced LTS)")

    all_threads: Set[str] = set()
    for m in lts.meta:
        all_threads.update(m.hot_threads or ())

    out: List[HotCycleViolation] = []
    for thread in sorted(all_threads):
        hot = [i for i in range(lts.n_states)
               if thread in (lts.meta[i].hot_threads or ())]
        hotset = set(hot)
        sub: Dict[int, List[int]] = {
            u: sorted({v for e, v in lts.successors(u) if v in hotset})
            for u in hot}
        for comp in _sccs(hot, sub):
            compset = set(comp)
            nontrivial = len(comp) > 1 or comp[0] in sub.get(comp[0], ())
            if not nontrivial:
                continue
            entry, prefix = _shortest_path_to(lts, compset)
            cycle = _cycle_through(entry, sub, compset)
            out.append(HotCycleViolation(thread, tuple(prefix), tuple(cycle)))
    return tuple(sorted(out, key=lambda h: (h.thread, h.prefix, h.cycle)))


def _sccs(nodes: List[int], succ: Dict[int, List[int]]) -> List[List[int]]:
    """Iterative Tarjan over the given node set; components in deterministic order."""
    index: Dict[int, int] = {}
    low: Dict[int, int] = {}
    on_stack: Set[int] = set()
    stack: List[int] = []
    comps: List[List[int]] = []
    counter = [0]

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                elif w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                comps.append(sorted(comp))
    comps.sort()
    return comps


def _shortest_path_to(lts: Lts, targets: Set[int]) -> Tuple[int, List[int]]:
    """BFS from the initial state; returns (entry, path of state ids incl. entry)."""
    if lts.initial in targets:
        return lts.initial, [lts.initial]
    parent: Dict[int, int] = {lts.initial: -1}
    queue = deque([lts.initial])
    while queue:
        u = queue.popleft()
        for e, v in lts.successors(u):
            if v in parent:
                continue
            parent[v] = u
            if v in targets:
                path = [v]
                while parent[path[-1]] != -1:
                    path.append(parent[path[-1]])
                path.reverse()
                return v, path
            queue.append(v)
    raise ValueError("target set unreachable from initial")


def _cycle_through(entry: int, sub: Dict[int, List[int]], comp: Set[int]) -> List[int]:
    """Shortest cycle through entry inside the component subgraph."""
    if entry in sub.get(entry, ()):
        return [entry]
    parent: Dict[int, int] = {}
    queue = deque()
    for v in sub.get(entry, ()):
        if v in comp and v not in parent:
            parent[v] = entry
            queue.append(v)
    while queue:
        u = queue.popleft()
        if u == entry:
            break
        for v in sub.get(u, ()):
            if v not in comp:
                continue
            if v == entry:
                cycle = [entry]
                node = u
                tail = []
                while node != entry:
                    tail.append(node)
                    node = parent[node]
                cycle.extend(reversed(tail))
                return cycle
            if v not in parent:
                parent[v] = u
                queue.append(v)
    raise ValueError("no cycle through entry inside component")


def path_events(lts: Lts, path: Sequence[int]) -> List[Event]:
    """Events along a state-id path, taking the canonically least edge at each hop."""
    out = []
    for u, v in zip(path, path[1:]):
        options = sorted((e for e, w in lts.successors(u) if w == v),
                         key=Event.sort_key)
        if not options:
            raise ValueError(f"no edge {u}->{v}")
        out.append(options[0])
    return out


def lasso_events(lts: Lts, violation: HotCycleViolation) -> Tuple[List[Event], List[Event]]:
    """Render a hot-cycle lasso as (prefix events, cycle events)."""
    prefix = path_events(lts, violation.prefix)
    loop_path = list(violation.cycle) + [violation.cycle[0]]
    cycle = path_events(lts, loop_path)
    return prefix, cycle
