"""Dining philosophers in both formalisms.

The behavioral model pairs one fork thread per fork (alternating between
"free: block puts" and "taken: block takes") with one philosopher thread per
seat (take both forks in either order, then put both back, forever).
Philosophers are numbered 1..n; fork i sits between philosopher i, who grabs
it as their right fork, and philosopher i+1 (cyclically), who grabs it as
their left fork.

Variants layer requirements or remedies on top of the base protocol:

- ``WITH_LIVENESS`` adds hot observer threads: a taken fork must eventually
  be put back, and a hungry philosopher must eventually eat.  The base
  protocol violates both (circular fork-grabbing), which shows up as hot
  cycles in the transition system.
- ``ARBITRATOR`` adds a central semaphore: a philosopher's takes stay
  blocked until the philosopher holds the semaphore, and the semaphore
  admits one holder at a time.  This removes the deadlock.
- ``PRIORITY_ORDER`` keeps the base threads but raises the selection
  priority of philosopher i's request statements to n - i, imposing a
  strict grab order that prevents the circular wait.

The Petri net mirrors the same protocol: per philosopher a small cycle of
private places (idle, holding one fork, eating, putting one back) whose take
transitions also consume the shared fork places, generalized to any n by
rotation.  Its initial marking enables exactly the two first-fork takes of
every philosopher, like the first request statement of every philosopher
thread.
"""

from typing import List

from bppn.bprogram import BProgram, BThreadDef, loop_thread, sync
from bppn.events import Alphabet, Event, EventSet, event, explicit
from bppn.petri import PetriNet

__all__ = [
    "BASE",
    "WITH_LIVENESS",
    "ARBITRATOR",
    "PRIORITY_ORDER",
    "dining_bp",
    "dining_pn",
]

BASE = "BASE"
WITH_LIVENESS = "WITH_LIVENESS"
ARBITRATOR = "ARBITRATOR"
PRIORITY_ORDER = "PRIORITY_ORDER"

_VARIANTS = (BASE, WITH_LIVENESS, ARBITRATOR, PRIORITY_ORDER)


def _take(i: int, side: str) -> Event:
    return event("Take", i, side)


def _put(i: int, side: str) -> Event:
    return event("Put", i, side)


def _fork_taken(i: int, n: int) -> List[Event]:
    """Events that grab fork i: philosopher i's right or philosopher
    (i mod n)+1's left."""
    return [_take(i, "R"), _take(i % n + 1, "L")]


def _fork_put(i: int, n: int) -> List[Event]:
    return [_put(i, "R"), _put(i % n + 1, "L")]


def _fork_thread(i: int, n: int) -> BThreadDef:
    return loop_thread("Fork %d behavior" % i, [
        sync(wait_for=explicit(_fork_taken(i, n)), block=explicit(_fork_put(i, n))),
        sync(wait_for=explicit(_fork_put(i, n)), block=explicit(_fork_taken(i, n))),
    ])


def _philosopher_thread(i: int, priority: int = 0) -> BThreadDef:
    takes = (_take(i, "R"), _take(i, "L"))
    puts = (_put(i, "R"), _put(i, "L"))
    return loop_thread("Philosopher %d behavior" % i, [
        sync(request=takes, priority=priority),
        sync(request=takes, priority=priority),
        sync(request=puts, priority=priority),
        sync(request=puts, priority=priority),
    ])


def _fork_release_observer(i: int, n: int) -> BThreadDef:
    """A taken fork will eventually be released."""
    return loop_thread("[](take %d -> <>put %d)" % (i, i), [
        sync(wait_for=explicit(_fork_taken(i, n))),
        sync(wait_for=explicit(_fork_put(i, n)), hot=True),
    ])


def _no_starvation_observer(i: int) -> BThreadDef:
    """A hungry philosopher will eventually eat."""
    takes = explicit([_take(i, "R"), _take(i, "L")])
    puts = explicit([_put(i, "R"), _put(i, "L")])
    return loop_thread("NoStarvation %d" % i, [
        sync(wait_for=takes, hot=True),
        sync(wait_for=takes, hot=True),
        sync(wait_for=puts),
        sync(wait_for=puts),
    ])


def _semaphore_thread() -> BThreadDef:
    any_take = EventSet.pattern("TakeSemaphore", any_params=True)
    any_release = EventSet.pattern("ReleaseSemaphore", any_params=True)
    return loop_thread("Semaphore", [
        sync(wait_for=any_take),
        sync(wait_for=any_release, block=any_take),
    ])


def _semaphore_client(i: int) -> BThreadDef:
    takes = explicit([_take(i, "R"), _take(i, "L")])
    puts = explicit([_put(i, "R"), _put(i, "L")])
    return loop_thread("Take semaphore %d" % i, [
        sync(request=event("TakeSemaphore", i), block=takes),
        sync(wait_for=puts),
        sync(wait_for=puts),
        sync(request=event("ReleaseSemaphore", i), block=takes),
    ])


def dining_bp(n: int, variant: str = BASE) -> BProgram:
    """Behavioral model for ``n`` philosophers in the given variant."""
    if n < 2:
        raise ValueError("need at least two philosophers")
    if variant not in _VARIANTS:
        raise ValueError("unknown variant %r (expected one of %s)"
                         % (variant, ", ".join(_VARIANTS)))

    threads: List[BThreadDef] = []
    events: List[Event] = []
    for i in range(1, n + 1):
        threads.append(_fork_thread(i, n))
        priority = n - i if variant == PRIORITY_ORDER else 0
        threads.append(_philosopher_thread(i, priority))
        events += [_take(i, "R"), _take(i, "L"), _put(i, "R"), _put(i, "L")]

    if variant == WITH_LIVENESS:
        for i in range(1, n + 1):
            threads.append(_fork_release_observer(i, n))
            threads.append(_no_starvation_observer(i))
    elif variant == ARBITRATOR:
        threads.append(_semaphore_thread())
        for i in range(1, n + 1):
            threads.append(_semaphore_client(i))
            events += [event("TakeSemaphore", i), event("ReleaseSemaphore", i)]

    return BProgram(threads, Alphabet(events),
                    name="dining-%d-%s" % (n, variant.lower()))


def dining_pn(n: int) -> PetriNet:
    """Petri net for ``n`` philosophers, rotation-generalized.

    Fork f{i} is shared by philosopher i (right) and philosopher i+1 (left).
    Each philosopher walks a private diamond: from idle, take either fork
    first, then the other, eat, and put them back in either order.
    Transition labels are the same events the behavioral model uses.
    """
    if n < 2:
        raise ValueError("need at least two philosophers")
    net = PetriNet(name="dining-%d" % n)
    for i in range(1, n + 1):
        net.add_place("fork%d" % i, tokens=1, name="fork %d" % i)
    for i in range(1, n + 1):
        right = "fork%d" % i
        left = "fork%d" % ((i - 2) % n + 1)
        idle, has_r, has_l = "idle%d" % i, "hasR%d" % i, "hasL%d" % i
        eat, only_r, only_l = "eat%d" % i, "onlyR%d" % i, "onlyL%d" % i
        net.add_place(idle, tokens=1, name="philosopher %d idle" % i)
        net.add_place(has_r, name="philosopher %d holds right" % i)
        net.add_place(has_l, name="philosopher %d holds left" % i)
        net.add_place(eat, name="philosopher %d eating" % i)
        net.add_place(only_r, name="philosopher %d put left back" % i)
        net.add_place(only_l, name="philosopher %d put right back" % i)

        def arcs(tid: str, label: Event, consume: List[str], produce: List[str]):
            net.add_transition(tid, label=str(label))
            for pid in consume:
                net.add_arc(pid, tid)
            for pid in produce:
                net.add_arc(tid, pid)

        arcs("takeR1_%d" % i, _take(i, "R"), [idle, right], [has_r])
        arcs("takeL1_%d" % i, _take(i, "L"), [idle, left], [has_l])
        arcs("takeL2_%d" % i, _take(i, "L"), [has_r, left], [eat])
        arcs("takeR2_%d" % i, _take(i, "R"), [has_l, right], [eat])
        arcs("putR1_%d" % i, _put(i, "R"), [eat], [only_l, right])
        arcs("putL1_%d" % i, _put(i, "L"), [eat], [only_r, left])
        arcs("putL2_%d" % i, _put(i, "L"), [only_l], [idle, left])
        arcs("putR2_%d" % i, _put(i, "R"), [only_r], [idle, right])
    return net
