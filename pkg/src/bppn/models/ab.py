"""Two-action scheduling demo.

Two producer threads each emit their own action three times; the order is
otherwise unconstrained, so the run set is every interleaving of AAA and BBB.
An optional third thread forbids two consecutive actions of the same kind by
alternating waitFor/block pairs, which collapses the run set to the single
strictly alternating trace (B first: A is blocked until a B has happened).
"""

from bppn.bprogram import BProgram, loop_thread, seq_thread, sync
from bppn.events import Alphabet, Event, explicit

__all__ = ["A", "B", "ab_demo"]

A = Event("A")
B = Event("B")


def ab_demo(with_interleave: bool = False) -> BProgram:
    """The two-thread demo program; ``with_interleave`` adds the alternation
    thread."""
    threads = [
        seq_thread("Do-A", [sync(request=A)] * 3),
        seq_thread("Do-B", [sync(request=B)] * 3),
    ]
    name = "ab"
    if with_interleave:
        threads.append(loop_thread("Interleave", [
            sync(wait_for=explicit([B]), block=explicit([A])),
            sync(wait_for=explicit([A]), block=explicit([B])),
        ]))
        name = "ab+interleave"
    return BProgram(threads, Alphabet([A, B]), name=name)
