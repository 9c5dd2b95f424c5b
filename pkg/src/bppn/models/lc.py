"""Level-crossing benchmark: behavioral program and Petri-net models.

The scenario: trains on ``n`` tracks approach, enter, and leave a shared
crossing; a single pair of barriers is lowered and raised by a controller.
Requirements: sensor events per track occur in approach/enter/leave order;
barriers are lowered after an approach and raised as soon as possible; a
train may not enter while the barriers are up; barriers may not be raised
while a train is inside.

Two b-program variants:

- ``ORIGINAL``: one requirement per thread (R1 sensors, R2 barriers,
  R3 no-entry-while-up, R4 no-raise-while-inside), track-indexed threads
  duplicated per track.
- ``MODIFIED_R2``: the barrier controller is rewritten to also allow a
  redundant raise-and-immediately-lower after a train approaches while the
  barriers are down, and R4 is dropped; this matches the single-track
  Petri net's observable behavior.

Fault extension (``faults=True``): per-track unobserved-entering threads
request ``Entering(i,true)`` after an approach, and a premature-raise
thread requests ``Raise(true)`` after each lowering. Fault events carry a
boolean flag so the existing threads' waits/blocks (which name the
unflagged events) are unaffected. Requests, by contrast, track the state
of the world rather than how it changed, so a requesting statement is
released by either flag variant of its event: R1's entering request also
moves on the unobserved entering, R2's raise request also moves on the
premature raise, and the fault requests are withdrawn once the ordinary
event occurs.

Two Petri nets:

- ``SINGLE_1987``: the classic single-track net — railway cycle, barrier
  up/down cycle, and a command interlock (closing/opening requests as
  helper transitions) plus an entering-authorization place.
- ``MULTI_2016``: the multi-track extension — railway subsystem and
  announcement place per track, keep-down helper transitions that cancel a
  pending raise (or bypass the barriers entirely while a train is inside)
  when a new announcement arrives, capacity-one command/signal places, a
  pool of announcement-cycle tokens that the raise transition requires in
  full, and a drain for authorizations whose train never entered. Fault
  transitions move the trains and barriers but are gated on (and leave
  stale) the controller's authorization bookkeeping.
"""

from __future__ import annotations

from typing import List

from bppn.bprogram import BProgram, BThreadDef, loop_thread, sync
from bppn.events import NONE, Alphabet, Event, EventSet, explicit, union
from bppn.petri import PetriNet

ORIGINAL = "ORIGINAL"
MODIFIED_R2 = "MODIFIED_R2"
SINGLE_1987 = "SINGLE_1987"
MULTI_2016 = "MULTI_2016"

LOWER = Event("Lower")
RAISE = Event("Raise")
FAULT_RAISE = Event("Raise", (True,))


def approaching(i: int) -> Event:
    return Event("Approaching", (i,))


def entering(i: int, fault: bool = False) -> Event:
    return Event("Entering", (i, True) if fault else (i,))


def leaving(i: int) -> Event:
    return Event("Leaving", (i,))


ANY_APPROACHING = EventSet.pattern("Approaching", any_params=True)
ANY_LEAVING = EventSet.pattern("Leaving", any_params=True)


def lc_alphabet(n: int, faults: bool) -> Alphabet:
    events = [LOWER, RAISE]
    for i in range(1, n + 1):
        events += [approaching(i), entering(i), leaving(i)]
        if faults:
            events.append(entering(i, fault=True))
    if faults:
        events.append(FAULT_RAISE)
    return Alphabet(events)


# -- b-threads ---------------------------------------------------------------


# Fault variant convention: each fault event mirrors an ordinary event
# with a trailing boolean flag. A thread that *requests* an event is
# released by either version (the flag only records how the event came
# about), so requests carry the flag-twin in their wait set. Waits and
# blocks keep naming the exact event.


def _r1(i: int, faults: bool) -> BThreadDef:
    # Sensor order per track: approach, enter, leave, repeat. With faults,
    # an unobserved entering also counts as the train being inside.
    enter_stmt = sync(request=entering(i))
    if faults:
        enter_stmt = sync(request=entering(i),
                          wait_for=explicit([entering(i, fault=True)]))
    return loop_thread(f"R1_{i}", [
        sync(request=approaching(i)),
        enter_stmt,
        sync(request=leaving(i)),
    ])


def _r2(faults: bool = False) -> BThreadDef:
    raise_stmt = sync(request=RAISE)
    if faults:
        raise_stmt = sync(request=RAISE, wait_for=explicit([FAULT_RAISE]))
    return loop_thread("R2", [
        sync(wait_for=ANY_APPROACHING),
        sync(request=LOWER),
        raise_stmt,
    ])


def _r2_modified(n: int, faults: bool = False) -> BThreadDef:
    # After a leave, request the raise while also waiting for another
    # approach; if the approach wins, raise and immediately lower again
    # (blocking entries meanwhile) before returning to normal service.
    block_entering = union(*[explicit([entering(i)]) for i in range(1, n + 1)])
    raise_release = explicit([FAULT_RAISE]) if faults else NONE
    stmts = {
        "a": sync(wait_for=ANY_APPROACHING),
        "b": sync(request=LOWER),
        "c": sync(wait_for=ANY_LEAVING),
        "d": sync(request=RAISE, wait_for=union(ANY_APPROACHING, raise_release)),
        "e": sync(wait_for=ANY_APPROACHING),
        "f": sync(request=LOWER),
        "g": sync(request=RAISE, block=block_entering, wait_for=raise_release),
        "h": sync(request=LOWER),
    }
    fixed_next = {"a": "b", "b": "c", "c": "d", "e": "f", "f": "c",
                  "g": "h", "h": "c"}

    def view(s):
        return stmts[s]

    def advance(s, e):
        if s == "d":
            return "e" if e in (RAISE, FAULT_RAISE) else "g"
        return fixed_next[s]

    return BThreadDef("R2*", "a", view, advance)


def _r3(i: int) -> BThreadDef:
    return loop_thread(f"R3_{i}", [
        sync(wait_for=explicit([LOWER]), block=explicit([entering(i)])),
        sync(wait_for=explicit([RAISE])),
    ])


def _r4(i: int) -> BThreadDef:
    return loop_thread(f"R4_{i}", [
        sync(wait_for=explicit([approaching(i)])),
        sync(wait_for=explicit([leaving(i)]), block=explicit([RAISE])),
    ])


def _unobservable_entering(i: int) -> BThreadDef:
    # Released by the observed entering as well: once the train is seen
    # inside, the unobserved variant is off the table for this pass.
    return loop_thread(f"UnobservableEntering_{i}", [
        sync(wait_for=explicit([approaching(i)])),
        sync(request=entering(i, fault=True), wait_for=explicit([entering(i)])),
    ])


def _premature_raise() -> BThreadDef:
    # Likewise released by the commanded raise.
    return loop_thread("PrematureRaise", [
        sync(wait_for=explicit([LOWER])),
        sync(request=FAULT_RAISE, wait_for=explicit([RAISE])),
    ])


def lc_bp(n: int = 1, faults: bool = False, variant: str = ORIGINAL) -> BProgram:
    if n < 1:
        raise ValueError("n must be >= 1")
    if variant not in (ORIGINAL, MODIFIED_R2):
        raise ValueError(f"unknown variant: {variant}")
    threads: List[BThreadDef] = []
    for i in range(1, n + 1):
        threads.append(_r1(i, faults))
    threads.append(_r2_modified(n, faults) if variant == MODIFIED_R2
                   else _r2(faults))
    for i in range(1, n + 1):
        threads.append(_r3(i))
    if variant == ORIGINAL:
        for i in range(1, n + 1):
            threads.append(_r4(i))
    if faults:
        for i in range(1, n + 1):
            threads.append(_unobservable_entering(i))
        threads.append(_premature_raise())
    return BProgram(threads, lc_alphabet(n, faults),
                    name=f"lc_bp(n={n},faults={faults},{variant})")


# -- Petri nets ---------------------------------------------------------------


def _single_1987() -> PetriNet:
    net = PetriNet("lc_single")
    # railway cycle
    net.add_place("far", 1, "train far away")
    net.add_place("near", 0, "train approaching")
    net.add_place("inside", 0, "train inside crossing")
    # controller
    net.add_place("p1", 0, "approach announced")
    net.add_place("p2", 1, "interlock: may request closing")
    net.add_place("p3", 0, "interlock: may request opening")
    net.add_place("p4", 0, "lower command pending")
    net.add_place("p5", 0, "leave signalled")
    net.add_place("p6", 0, "raise command pending")
    # barriers
    net.add_place("p7", 1, "barriers up")
    net.add_place("p8", 0, "barriers down")
    net.add_place("p9", 0, "entering authorized")

    net.add_transition("app", "Approaching(1)")
    net.add_transition("cr", "ClosingRequest", helper=True)
    net.add_transition("low", "Lower")
    net.add_transition("ent", "Entering(1)")
    net.add_transition("lea", "Leaving(1)")
    net.add_transition("or", "OpeningRequest", helper=True)
    net.add_transition("rai", "Raise")

    for src, dst in [("far", "app"), ("app", "near"), ("app", "p1"),
                     ("p1", "cr"), ("p2", "cr"), ("cr", "p3"), ("cr", "p4"),
                     ("p4", "low"), ("p7", "low"), ("low", "p8"), ("low", "p9"),
                     ("near", "ent"), ("p9", "ent"), ("ent", "inside"),
                     ("inside", "lea"), ("lea", "far"), ("lea", "p5"),
                     ("p5", "or"), ("p3", "or"), ("or", "p2"), ("or", "p6"),
                     ("p6", "rai"), ("p8", "rai"), ("rai", "p7")]:
        net.add_arc(src, dst)
    return net


def _multi_2016(n: int, faults: bool) -> PetriNet:
    # Shared controller places use the same ids as the single-track net.
    # Command places (p4, p6), the authorization place (p9), the leave
    # signal (p5), and the per-track announcement places are all capacity-1:
    # each has a complement place (c-prefixed) consumed on mint and restored
    # on use, so a producer blocks rather than overflow the place.
    net = PetriNet("lc_multi")
    for i in range(1, n + 1):
        net.add_place(f"far{i}", 1, f"train far away (track {i})")
        net.add_place(f"near{i}", 0, f"train approaching (track {i})")
        net.add_place(f"inside{i}", 0, f"train inside crossing (track {i})")
        net.add_place(f"p1_{i}", 0, f"approach announced (track {i})")
        net.add_place(f"c1_{i}", 1, f"announcement capacity (track {i})")
    net.add_place("p2", 1, "interlock: may request closing")
    net.add_place("p3", 0, "interlock: may request opening")
    net.add_place("p4", 0, "lower command pending")
    net.add_place("c4", 1, "lower command capacity")
    net.add_place("p5", 0, "leave signalled")
    net.add_place("c5", 1, "leave signal capacity")
    net.add_place("p6", 0, "raise command pending")
    net.add_place("c6", 1, "raise command capacity")
    net.add_place("p7", 1, "barriers up")
    net.add_place("p8", 0, "barriers down")
    net.add_place("p9", 0, "entering authorized")
    net.add_place("c9", n, "authorization capacity (one per track)")
    net.add_place("w", n, "announcement cycle tokens")

    for i in range(1, n + 1):
        net.add_transition(f"app{i}", f"Approaching({i})")
        net.add_arc(f"far{i}", f"app{i}")
        net.add_arc("w", f"app{i}")
        net.add_arc(f"c1_{i}", f"app{i}")
        net.add_arc(f"app{i}", f"near{i}")
        net.add_arc(f"app{i}", f"p1_{i}")

        # Entry consumes the authorization; the barriers-down test keeps a
        # train out while the barriers are (or are being) raised.
        net.add_transition(f"ent{i}", f"Entering({i})")
        net.add_arc(f"near{i}", f"ent{i}")
        net.add_arc("p9", f"ent{i}")
        net.add_arc(f"ent{i}", "c9")
        net.add_arc("p8", f"ent{i}")
        net.add_arc(f"ent{i}", "p8")
        net.add_arc(f"ent{i}", f"inside{i}")

        net.add_transition(f"lea{i}", f"Leaving({i})")
        net.add_arc(f"inside{i}", f"lea{i}")
        net.add_arc("c5", f"lea{i}")
        net.add_arc(f"lea{i}", f"far{i}")
        net.add_arc(f"lea{i}", "p5")

        net.add_transition(f"cr{i}", "ClosingRequest", helper=True)
        net.add_arc(f"p1_{i}", f"cr{i}")
        net.add_arc(f"cr{i}", f"c1_{i}")
        net.add_arc("p2", f"cr{i}")
        net.add_arc(f"cr{i}", "p3")
        net.add_arc("c4", f"cr{i}")
        net.add_arc(f"cr{i}", "p4")
        net.add_arc(f"cr{i}", "w")

        # Normal opening: a leave signal plus an owed opening queues the
        # raise command and frees the leave-signal slot.
        net.add_transition(f"or{i}", "OpeningRequest", helper=True)
        net.add_arc("p5", f"or{i}")
        net.add_arc("p3", f"or{i}")
        net.add_arc(f"or{i}", "p2")
        net.add_arc("c6", f"or{i}")
        net.add_arc(f"or{i}", "p6")
        net.add_arc(f"or{i}", "c5")

        # Idle-controller opening: with no closing in progress the leave
        # signal is discarded (no raise is owed), freeing its slot.
        net.add_transition(f"or2{i}", "OpeningRequest", helper=True)
        net.add_arc("p5", f"or2{i}")
        net.add_arc("p2", f"or2{i}")
        net.add_arc(f"or2{i}", "p2")
        net.add_arc(f"or2{i}", "c5")

        # Keep-down: an announcement arriving while a raise is pending
        # cancels the raise and authorizes the new train directly, keeping
        # the barriers lowered.
        net.add_transition(f"kd{i}", "KeepDown", helper=True)
        net.add_arc(f"p1_{i}", f"kd{i}")
        net.add_arc(f"kd{i}", f"c1_{i}")
        net.add_arc("p2", f"kd{i}")
        net.add_arc("p6", f"kd{i}")
        net.add_arc(f"kd{i}", "c6")
        net.add_arc(f"kd{i}", "p3")
        net.add_arc("c9", f"kd{i}")
        net.add_arc(f"kd{i}", "p9")
        net.add_arc(f"kd{i}", "w")

        # Keep-down while a train is inside: the announcement is absorbed
        # and the new train authorized without any barrier movement.
        for j in range(1, n + 1):
            tid = f"kp{i}_{j}"
            net.add_transition(tid, "KeepDown", helper=True)
            net.add_arc(f"p1_{j}", tid)
            net.add_arc(tid, f"c1_{j}")
            net.add_arc(f"inside{i}", tid)
            net.add_arc(tid, f"inside{i}")
            net.add_arc("c9", tid)
            net.add_arc(tid, "p9")
            net.add_arc(tid, "w")

    net.add_transition("low", "Lower")
    net.add_arc("p4", "low")
    net.add_arc("low", "c4")
    net.add_arc("p7", "low")
    net.add_arc("low", "p8")
    net.add_arc("c9", "low")
    net.add_arc("low", "p9")

    # Raising waits for the full set of cycle tokens, i.e. no announcement
    # is still being processed.
    net.add_transition("rai", "Raise")
    net.add_arc("p6", "rai")
    net.add_arc("rai", "c6")
    net.add_arc("p8", "rai")
    net.add_arc("rai", "p7")
    net.add_arc("w", "rai", weight=n)
    net.add_arc("rai", "w", weight=n)

    # A stale authorization (its train never entered) is voided once the
    # barriers are up, freeing the slot for the next lowering.
    net.add_transition("drop", "OpeningRequest", helper=True)
    net.add_arc("p9", "drop")
    net.add_arc("drop", "c9")
    net.add_arc("p7", "drop")
    net.add_arc("drop", "p7")

    if faults:
        # The unobserved entering leaves the authorization in place (the
        # sensor never fired, so nothing was consumed); requiring it at all
        # means the fault cannot occur before the barriers are lowered.
        for i in range(1, n + 1):
            net.add_transition(f"fent{i}", f"Entering({i},true)", fault=True)
            net.add_arc(f"near{i}", f"fent{i}")
            net.add_arc("p9", f"fent{i}")
            net.add_arc(f"fent{i}", "p9")
            net.add_arc(f"fent{i}", f"inside{i}")
        # The premature raise voids the pending authorization so no train
        # can be waved through barriers that are actually up.
        net.add_transition("frai", "Raise(true)", fault=True)
        net.add_arc("p8", "frai")
        net.add_arc("p9", "frai")
        net.add_arc("frai", "c9")
        net.add_arc("frai", "p7")
    return net


def lc_pn(n: int = 1, faults: bool = False, variant: str = MULTI_2016) -> PetriNet:
    if n < 1:
        raise ValueError("n must be >= 1")
    if variant == SINGLE_1987:
        if n != 1 or faults:
            raise ValueError("SINGLE_1987 supports only n=1 without faults")
        return _single_1987()
    if variant == MULTI_2016:
        return _multi_2016(n, faults)
    raise ValueError(f"unknown variant: {variant}")
