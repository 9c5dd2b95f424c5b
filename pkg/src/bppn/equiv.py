"""Trace-projection equivalence and bounded trace-set comparison.

Two finite LTSs are compared on the language of their *projected* traces:
events outside a shared alphabet (typically helper events) are deleted
from every trace. Both models here have every state accepting, so the
finite-trace languages are prefix-closed and language comparison reduces
to a walk over the synchronized product of the projected deterministic
automata. Strictness is evidenced by a shortest distinguishing word and,
when the one-sided behavior contains a cycle, by a lasso (prefix +
repeating cycle). Silent cycles (a cycle of only non-shared events) make
the infinite-trace picture murkier; they are reported as divergence
warnings instead of being ignored.

Bounded comparison counts projected traces of raw paths up to a length
bound; the bound applies before projection, so deleted events still cost
a step.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from bppn.events import Event, sort_events
from bppn.statespace import GuardExceeded, Lts

EQUAL = "EQUAL"
LEFT_STRICT_SUBSET = "LEFT_STRICT_SUBSET"
RIGHT_STRICT_SUBSET = "RIGHT_STRICT_SUBSET"
INCOMPARABLE = "INCOMPARABLE"


class MemoryGuard(GuardExceeded):
    """Raised when a bounded enumeration outgrows its configured cap."""


def project_trace(trace: Sequence[Event], shared: Iterable[Event]) -> Tuple[Event, ...]:
    """Delete from the trace every event outside the shared alphabet."""
    keep = frozenset(shared)
    return tuple(e for e in trace if e in keep)


def shared_alphabet(a: Lts, b: Lts) -> FrozenSet[Event]:
    """Default comparison alphabet: every non-helper event of either side."""
    return (a.alphabet - a.helper_events) | (b.alphabet - b.helper_events)


class Dfa:
    """Deterministic automaton over projected traces; every state accepts.

    States are numbered from 0 (initial); trans[q] maps an event to the
    successor state. deadlocky[q] is true when the subset behind q contains
    a deadlocked LTS state, and divergent is true when the source LTS has a
    reachable cycle of only silent (projected-away) events.
    """

    def __init__(self, trans, deadlocky, divergent, alphabet):
        self.initial = 0
        self.trans: List[Dict[Event, int]] = trans
        self.deadlocky: List[bool] = deadlocky
        self.divergent: bool = divergent
        self.alphabet: Tuple[Event, ...] = alphabet

    @property
    def n_states(self) -> int:
        return len(self.trans)

    def accepts(self, word: Sequence[Event]) -> bool:
        q = self.initial
        for e in word:
            q = self.trans[q].get(e)
            if q is None:
                return False
        return True

    def reject_position(self, word: Sequence[Event]) -> Optional[int]:
        """Index of the first event the automaton cannot take, or None."""
        q = self.initial
        for i, e in enumerate(word):
            q = self.trans[q].get(e)
            if q is None:
                return i
        return None


def _split_edges(lts: Lts, keep: FrozenSet[Event]):
    silent_succ: Dict[int, List[int]] = {}
    loud_succ: Dict[int, List[Tuple[Event, int]]] = {}
    for u, e, v in lts.edges:
        if e in keep:
            loud_succ.setdefault(u, []).append((e, v))
        else:
            silent_succ.setdefault(u, []).append(v)
    return silent_succ, loud_succ


def project_lts(lts: Lts, shared: Iterable[Event]) -> Dfa:
    keep = frozenset(shared)
    silent_succ, loud_succ = _split_edges(lts, keep)
    divergent = _has_cycle(silent_succ)

    def close(core: FrozenSet[int]) -> FrozenSet[int]:
        out = set(core)
        stack = list(core)
        while stack:
            s = stack.pop()
            for t in silent_succ.get(s, ()):
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return frozenset(out)

    initial = close(frozenset([lts.initial]))
    index: Dict[FrozenSet[int], int] = {initial: 0}
    subsets: List[FrozenSet[int]] = [initial]
    trans: List[Dict[Event, int]] = [{}]
    queue = deque([0])
    while queue:
        q = queue.popleft()
        nxt: Dict[Event, Set[int]] = {}
        for s in subsets[q]:
            for e, t in loud_succ.get(s, ()):
                nxt.setdefault(e, set()).add(t)
        for e in sort_events(nxt):
            closed = close(frozenset(nxt[e]))
            if closed not in index:
                index[closed] = len(subsets)
                subsets.append(closed)
                trans.append({})
                queue.append(index[closed])
            trans[q][e] = index[closed]
    deadlocky = [any(lts.meta[s].deadlock for s in sub) for sub in subsets]
    alphabet = tuple(sort_events(keep & lts.alphabet))
    return Dfa(trans, deadlocky, divergent, alphabet)


def _budgeted_dfa(lts: Lts, keep: FrozenSet[Event], max_len: int) -> Dfa:
    """Like project_lts, but a subset member also carries the cheapest raw
    path length that realizes the word at that member; members that cannot
    be reached within the budget are dropped, so a reachable DFA state
    means 'this projected word has a raw witness of length <= max_len'."""
    silent_succ, loud_succ = _split_edges(lts, keep)

    def close(core: Dict[int, int]) -> Tuple[Tuple[int, int], ...]:
        best = dict(core)
        queue = deque(best.items())
        while queue:
            s, w = queue.popleft()
            if best.get(s, max_len + 1) < w:
                continue
            for t in silent_succ.get(s, ()):
                if w + 1 <= max_len and best.get(t, max_len + 1) > w + 1:
                    best[t] = w + 1
                    queue.append((t, w + 1))
        return tuple(sorted(best.items()))

    initial = close({lts.initial: 0})
    index: Dict[Tuple, int] = {initial: 0}
    states: List[Tuple[Tuple[int, int], ...]] = [initial]
    trans: List[Dict[Event, int]] = [{}]
    queue = deque([0])
    while queue:
        q = queue.popleft()
        nxt: Dict[Event, Dict[int, int]] = {}
        for s, w in states[q]:
            if w + 1 > max_len:
                continue
            for e, t in loud_succ.get(s, ()):
                tgt = nxt.setdefault(e, {})
                if tgt.get(t, max_len + 1) > w + 1:
                    tgt[t] = w + 1
        for e in sort_events(nxt):
            closed = close(nxt[e])
            if not closed:
                continue
            if closed not in index:
                index[closed] = len(states)
                states.append(closed)
                trans.append({})
                queue.append(index[closed])
            trans[q][e] = index[closed]
    alphabet = tuple(sort_events(keep & lts.alphabet))
    return Dfa(trans, [False] * len(trans), False, alphabet)


def _has_cycle(succ: Dict[int, List[int]]) -> bool:
    color: Dict[int, int] = {}
    for root in succ:
        if color.get(root):
            continue
        stack = [(root, iter(succ.get(root, ())))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for t in it:
                if color.get(t) == 1:
                    return True
                if not color.get(t):
                    color[t] = 1
                    stack.append((t, iter(succ.get(t, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return False


@dataclass
class ComparisonResult:
    verdict: str
    # per direction ("left_only"/"right_only"): either {"trace": [...]} or
    # {"prefix": [...], "cycle": [...]} with rendered events
    witnesses: Dict[str, dict] = field(default_factory=dict)
    divergence_warnings: Set[str] = field(default_factory=set)

    def to_json(self) -> str:
        return json.dumps({
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "divergence_warnings": sorted(self.divergence_warnings),
        }, indent=2)


def _render(events: Sequence[Event]) -> List[str]:
    return [e.render() for e in events]


def compare(a: Lts, b: Lts, shared: Optional[Iterable[Event]] = None) -> ComparisonResult:
    if shared is None:
        shared = shared_alphabet(a, b)
    da = project_lts(a, shared)
    db = project_lts(b, shared)

    # synchronized product; None = dead sink on a side
    start = (da.initial, db.initial)
    access: Dict[Tuple, Tuple[Event, ...]] = {start: ()}
    queue = deque([start])
    alphabet = sort_events(set(da.alphabet) | set(db.alphabet))
    left_entry = None   # shortest word in L(a) \ L(b)
    right_entry = None  # shortest word in L(b) \ L(a)
    left_region: Set[int] = set()   # a-DFA states reachable while b is dead
    right_region: Set[int] = set()  # b-DFA states reachable while a is dead
    while queue:
        qa, qb = queue.popleft()
        word = access[(qa, qb)]
        if qa is not None and qb is None:
            left_region.add(qa)
            if left_entry is None:
                left_entry = word
        if qb is not None and qa is None:
            right_region.add(qb)
            if right_entry is None:
                right_entry = word
        for e in alphabet:
            na = da.trans[qa].get(e) if qa is not None else None
            nb = db.trans[qb].get(e) if qb is not None else None
            if na is None and nb is None:
                continue
            key = (na, nb)
            if key not in access:
                access[key] = word + (e,)
                queue.append(key)

    verdict = {(False, False): EQUAL,
               (True, False): RIGHT_STRICT_SUBSET,
               (False, True): LEFT_STRICT_SUBSET,
               (True, True): INCOMPARABLE}[
        (left_entry is not None, right_entry is not None)]

    result = ComparisonResult(verdict)
    if da.divergent:
        result.divergence_warnings.add("left")
    if db.divergent:
        result.divergence_warnings.add("right")
    if left_entry is not None:
        result.witnesses["left_only"] = _witness(da, left_entry, left_region)
    if right_entry is not None:
        result.witnesses["right_only"] = _witness(db, right_entry, right_region)
    _check_witnesses(result, da, db)
    return result


def _witness(alive: Dfa, entry: Tuple[Event, ...], region: Set[int]) -> dict:
    lasso = _region_lasso(alive, entry, region)
    if lasso is not None:
        prefix, cycle = lasso
        return {"prefix": _render(prefix), "cycle": _render(cycle)}
    return {"trace": _render(entry)}


def _region_lasso(dfa: Dfa, entry: Tuple[Event, ...],
                  region: Set[int]) -> Optional[Tuple[List[Event], List[Event]]]:
    """A prefix+cycle on the alive side whose cycle stays inside the
    states only this side reaches; None when that region is acyclic."""
    q = dfa.initial
    for e in entry:
        q = dfa.trans[q].get(e)
    path_to: Dict[int, Tuple[Event, ...]] = {q: ()}
    order = [q]
    queue = deque([q])
    while queue:
        u = queue.popleft()
        for e in sort_events(dfa.trans[u]):
            v = dfa.trans[u][e]
            if v in region and v not in path_to:
                path_to[v] = path_to[u] + (e,)
                order.append(v)
                queue.append(v)
    for c in order:
        cyc = _shortest_cycle(dfa, c, region)
        if cyc is not None:
            prefix = list(entry) + list(path_to[c])
            cycle = list(cyc)
            # rotate the cycle backwards over the prefix so the presented
            # prefix is as short as possible (purely cosmetic, same trace)
            while prefix and prefix[-1] == cycle[-1]:
                prefix.pop()
                cycle.insert(0, cycle.pop())
            return prefix, cycle
    return None


def _shortest_cycle(dfa: Dfa, start: int, region: Set[int]) -> Optional[Tuple[Event, ...]]:
    seen = {start: ()}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for e in sort_events(dfa.trans[u]):
            v = dfa.trans[u][e]
            if v == start:
                return seen[u] + (e,)
            if v in region and v not in seen:
                seen[v] = seen[u] + (e,)
                queue.append(v)
    return None


def _check_witnesses(result: ComparisonResult, da: Dfa, db: Dfa) -> None:
    """Replay every witness before returning it; a bad witness is a bug."""
    sides = {"left_only": (da, db), "right_only": (db, da)}
    for side, w in result.witnesses.items():
        alive, dead = sides[side]
        if "trace" in w:
            word = [Event.parse(x) for x in w["trace"]]
            assert alive.accepts(word), f"{side} witness not replayable"
            assert not dead.accepts(word), f"{side} witness not distinguishing"
        else:
            prefix = [Event.parse(x) for x in w["prefix"]]
            cycle = [Event.parse(x) for x in w["cycle"]]
            assert cycle, "empty lasso cycle"
            word = list(prefix)
            pumped_out = False
            for _ in range(dead.n_states + 2):
                word.extend(cycle)
                assert alive.accepts(word), f"{side} lasso not replayable"
                if not dead.accepts(word):
                    pumped_out = True
                    break
            assert pumped_out, f"{side} lasso never leaves the other language"


def bounded_traces(lts: Lts, shared: Iterable[Event], max_len: int,
                   cap: int = 2_000_000) -> Set[Tuple[Event, ...]]:
    """All projected traces of raw paths of length <= max_len."""
    dfa = _budgeted_dfa(lts, frozenset(shared), max_len)
    out: Set[Tuple[Event, ...]] = set()
    queue = deque([(dfa.initial, ())])
    while queue:
        q, word = queue.popleft()
        out.add(word)
        if len(out) > cap:
            raise MemoryGuard("bounded_traces", len(out), cap)
        for e in sort_events(dfa.trans[q]):
            queue.append((dfa.trans[q][e], word + (e,)))
    return out


def bounded_compare(a: Lts, b: Lts, shared: Optional[Iterable[Event]] = None,
                    max_len: int = 16) -> Tuple[int, int, int]:
    """Cardinalities (only-a, only-b, both) of the bounded projected trace
    sets, counted exactly on the product automaton without materializing
    the sets themselves."""
    if shared is None:
        shared = shared_alphabet(a, b)
    keep = frozenset(shared)
    da = _budgeted_dfa(a, keep, max_len)
    db = _budgeted_dfa(b, keep, max_len)
    alphabet = sort_events(set(da.alphabet) | set(db.alphabet))

    # layer-by-layer word counting on the product; determinism on both
    # sides means every projected word is counted exactly once
    start = (da.initial, db.initial)
    only_a = only_b = both = 0
    counts: Dict[Tuple, int] = {start: 1}
    for _ in range(max_len + 1):
        for (qa, qb), c in counts.items():
            if qa is not None and qb is not None:
                both += c
            elif qa is not None:
                only_a += c
            else:
                only_b += c
        nxt: Dict[Tuple, int] = {}
        for (qa, qb), c in counts.items():
            for e in alphabet:
                na = da.trans[qa].get(e) if qa is not None else None
                nb = db.trans[qb].get(e) if qb is not None else None
                if na is None and nb is None:
                    continue
                key = (na, nb)
                nxt[key] = nxt.get(key, 0) + c
            nxt.pop((None, None), None)
        if not nxt:
            break
        counts = nxt
    return only_a, only_b, both


def bounded_compare_csv(a: Lts, b: Lts, shared: Optional[Iterable[Event]] = None,
                        max_len: int = 16) -> str:
    only_a, only_b, both = bounded_compare(a, b, shared, max_len)
    return f"L,only_a,only_b,both\n{max_len},{only_a},{only_b},{both}\n"
