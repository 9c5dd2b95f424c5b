"""Translations between the two formalisms.

Forward direction (:func:`pn_to_bp`): every place of a Petri net becomes one
b-thread whose local state is the place's token count.  The thread never
requests anything; it waits for every event that touches the place (so its
counter stays in step with the net) and blocks exactly those events whose
consumption weight exceeds the current count (so under-supplied transitions
cannot fire).  A single auxiliary b-thread forever requests the whole
alphabet, which leaves the enabled-event set of the b-program equal to the
enabled-transition set of the net in the corresponding marking.

Reverse direction (:func:`lts_to_pn`): a finite labeled transition system
embeds into a one-token net -- one place per state, one transition per edge.
The reachability graph of the resulting net is isomorphic to the input.

:func:`verify_translation` is the machine oracle for the forward direction:
it walks the net and the generated b-program in lockstep and checks that the
identity map between markings and counter tuples is a bisimulation.
"""

from typing import Dict, Iterable, List, Optional, Tuple

from bppn.bprogram import BProgram, BThreadDef, SyncStatement
from bppn.events import NONE, Alphabet, Event, EventSet, explicit, sort_events
from bppn.petri import PetriNet, PetriNetError

__all__ = [
    "AmbiguousLabel",
    "TranslationMismatch",
    "pn_to_bp",
    "lts_to_pn",
    "bthread_dump",
    "verify_translation",
]


class AmbiguousLabel(PetriNetError):
    """Two transitions share a label but differ in their arc weights at some
    place.

    Events in a transition system carry only the label, so an event-level
    translation cannot tell such transitions apart; we refuse instead of
    guessing.  Transitions that share a label *and* agree on all weights are
    indistinguishable and simply merge.
    """


class TranslationMismatch(AssertionError):
    """The bisimulation oracle found a state where the net and the generated
    b-program disagree."""

    def __init__(self, reason: str, path: List[Event]):
        self.reason = reason
        self.path = list(path)
        trail = " ".join(str(e) for e in self.path) or "<initial state>"
        super().__init__("%s (after: %s)" % (reason, trail))


# ---------------------------------------------------------------------------
# Forward direction: net -> b-program
# ---------------------------------------------------------------------------


def _effects_by_place(net: PetriNet) -> Dict[str, Dict[Event, Tuple[int, int]]]:
    """Per-place map ``event -> (take, give)`` with uniqueness enforced.

    ``take`` is the consumption weight W-(p, t) and ``give`` the production
    weight W+(t, p) of the transitions labeled with the event.  Only events
    with a nonzero effect on the place are listed.  Raises
    :class:`AmbiguousLabel` when two same-labeled transitions disagree on
    their weights at any place (a transition that does not touch the place
    counts as weights (0, 0)).
    """
    by_event: Dict[Event, List[str]] = {}
    for tid in net.transition_order():
        ev = Event.parse(net.transitions[tid].label)
        by_event.setdefault(ev, []).append(tid)

    effects: Dict[str, Dict[Event, Tuple[int, int]]] = {
        pid: {} for pid in net.place_order()
    }
    for ev, tids in by_event.items():
        for pid in net.place_order():
            profiles = {
                (net.inputs[t].get(pid, 0), net.outputs[t].get(pid, 0))
                for t in tids
            }
            if len(profiles) > 1:
                raise AmbiguousLabel(
                    "transitions %s share label %s but have different arc "
                    "weights at place %s" % (sorted(tids), ev, pid)
                )
            take, give = profiles.pop()
            if take or give:
                effects[pid][ev] = (take, give)
    return effects


def _place_thread(pid: str, name: str, init: int,
                  effects: Dict[Event, Tuple[int, int]]) -> BThreadDef:
    adjacent = sort_events(effects)
    wait_for = explicit(adjacent) if adjacent else NONE
    # Distinct counts only yield distinct statements below the largest
    # consumption weight, so the statements can be precomputed.
    ceiling = max((take for take, _ in effects.values()), default=0)
    statements = []
    for k in range(ceiling + 1):
        blocked = [ev for ev in adjacent if effects[ev][0] > k]
        statements.append(SyncStatement(
            wait_for=wait_for,
            block=explicit(blocked) if blocked else NONE,
        ))

    def view(k: int) -> SyncStatement:
        return statements[min(k, ceiling)]

    def advance(k: int, ev: Event) -> int:
        take, give = effects[ev]
        return k - take + give

    return BThreadDef(name=name, init=init, view=view, advance=advance)


def pn_to_bp(net: PetriNet) -> BProgram:
    """Translate a Petri net into an equivalent behavioral program.

    One b-thread per place (state = token count, waits for adjacent events,
    blocks under-supplied ones) plus one auxiliary thread that forever
    requests every alphabet event at priority 0.  The reachability graph of
    the net and the transition system of the returned program are related by
    the bisimulation ``marking  <->  tuple of place-thread counters``; see
    :func:`verify_translation`.
    """
    problems = net.validate()
    if problems:
        raise PetriNetError("cannot translate an invalid net: %s"
                            % "; ".join(problems))

    effects = _effects_by_place(net)
    threads = [
        _place_thread(pid, "place %s" % net.places[pid].name,
                      net.places[pid].tokens, effects[pid])
        for pid in net.place_order()
    ]

    events = sort_events({Event.parse(lbl) for lbl in net.labels()})
    requester = SyncStatement(request=tuple(events))

    def view(state: object) -> SyncStatement:
        return requester

    def advance(state: object, ev: Event) -> object:
        return state

    threads.append(BThreadDef(name="requester", init=0,
                              view=view, advance=advance))
    name = "bp(%s)" % net.name if net.name else "bp"
    return BProgram(threads, Alphabet(events), name=name)


def bthread_dump(net: PetriNet) -> str:
    """Human-readable description of the b-threads :func:`pn_to_bp` builds.

    One block per place thread listing the statement for every materially
    different token count, followed by the auxiliary requester.
    """
    effects = _effects_by_place(net)
    lines: List[str] = []
    for pid in net.place_order():
        place = net.places[pid]
        eff = effects[pid]
        lines.append("b-thread 'place %s' (initial count %d)"
                     % (place.name, place.tokens))
        if not eff:
            lines.append("  at any count: inert (no adjacent transitions)")
            continue
        adjacent = sort_events(eff)
        ceiling = max(take for take, _ in eff.values())
        for k in range(ceiling + 1):
            blocked = [ev for ev in adjacent if eff[ev][0] > k]
            label = "at count %d" % k if k < ceiling else "at count >= %d" % k
            wait = ", ".join(str(e) for e in adjacent)
            if blocked:
                block = "block {%s}" % ", ".join(str(e) for e in blocked)
            else:
                block = "block nothing"
            lines.append("  %s: waitFor {%s}; %s" % (label, wait, block))
        for ev in adjacent:
            take, give = eff[ev]
            lines.append("    on %s: count %+d" % (ev, give - take))
    events = sort_events({Event.parse(lbl) for lbl in net.labels()})
    lines.append("b-thread 'requester'")
    lines.append("  forever: request {%s} at priority 0"
                 % ", ".join(str(e) for e in events))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Reverse direction: transition system -> one-token net
# ---------------------------------------------------------------------------


def lts_to_pn(lts) -> PetriNet:
    """Embed a finite LTS into a Petri net with a single circulating token.

    One place per state (the initial state holds the token), one transition
    per edge with weight-1 arcs.  The reachability graph of the result is
    isomorphic to the input system.
    """
    net = PetriNet(name="net(%s)" % lts.name if lts.name else "net")
    for sid in range(lts.n_states):
        net.add_place("s%d" % sid, tokens=1 if sid == lts.initial else 0)
    helpers = lts.helper_events
    for k, (src, ev, dst) in enumerate(lts.edges):
        tid = "e%d" % k
        net.add_transition(tid, label=str(ev), helper=ev in helpers)
        net.add_arc("s%d" % src, tid)
        net.add_arc(tid, "s%d" % dst)
    return net


# ---------------------------------------------------------------------------
# The bisimulation oracle
# ---------------------------------------------------------------------------


def verify_translation(net: PetriNet, max_states: int = 100_000) -> int:
    """Check that marking <-> counter-tuple is a bisimulation; return the
    number of joint states verified.

    Walks the net's reachability graph and the generated b-program in
    lockstep from the initial state.  In every joint state the place-thread
    counters must equal the marking, and both sides must offer exactly the
    same events, each leading to the same joint successor.  Raises
    :class:`TranslationMismatch` otherwise.  Exploration stops after
    ``max_states`` joint states, so unbounded nets are verified on the
    explored region.
    """
    from collections import deque

    from bppn.statespace import BpStepper, PnStepper

    program = pn_to_bp(net)
    n_places = len(net.place_order())
    pn = PnStepper(net, max_tokens=10 ** 9)
    bp = BpStepper(program)

    start = (pn.initial(), bp.initial())
    parent: Dict[Tuple[object, object], Optional[Tuple[object, Event]]] = {
        start: None,
    }

    def path_to(state: Tuple[object, object]) -> List[Event]:
        trail: List[Event] = []
        link = parent[state]
        while link is not None:
            prev, ev = link
            trail.append(ev)
            link = parent[prev]
        trail.reverse()
        return trail

    queue = deque([start])
    seen = 0
    while queue and seen < max_states:
        state = queue.popleft()
        marking, config = state
        seen += 1
        if tuple(config[:n_places]) != tuple(marking):
            raise TranslationMismatch(
                "counters %r diverged from marking %r"
                % (config[:n_places], marking), path_to(state))

        pn_next = {ev: dst for ev, dst in pn.successors(marking)}
        bp_next = {ev: dst for ev, dst in bp.successors(config)}
        if set(pn_next) != set(bp_next):
            raise TranslationMismatch(
                "enabled events differ: net %s vs b-program %s"
                % (sorted(map(str, pn_next)), sorted(map(str, bp_next))),
                path_to(state))
        for ev in pn_next:
            nxt = (pn_next[ev], bp_next[ev])
            if nxt not in parent:
                parent[nxt] = (state, ev)
                queue.append(nxt)
    return seen
