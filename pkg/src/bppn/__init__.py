"""Behavioral programs, Petri nets, and trace-equivalence tooling.

The package is organized around a small number of orthogonal pieces:

- :mod:`bppn.events` -- immutable events, alphabets, and event-set algebra.
- :mod:`bppn.bprogram` -- behavioral programs (request/waitFor/block
  synchronization) as pure state machines, plus the event arbiter.
- :mod:`bppn.petri` -- place/transition nets with weighted arcs and a JSON
  interchange format.
- :mod:`bppn.statespace` -- explicit labeled-transition-system construction
  for both formalisms, helper-edge elimination, deadlock and hot-cycle
  analysis, DOT/JSON export.
- :mod:`bppn.translate` -- Petri net -> behavioral program translation and
  the LTS -> net embedding.
- :mod:`bppn.equiv` -- trace projection, language comparison with replayable
  witnesses, and bounded trace census.
- :mod:`bppn.models` -- the bundled case studies (level crossing, dining
  philosophers, tic-tac-toe, and a two-thread scheduling demo).
"""

from bppn.events import Event, Alphabet, EventSet
from bppn.bprogram import SyncStatement, BThreadDef, BProgram, DONE

__all__ = [
    "Event",
    "Alphabet",
    "EventSet",
    "SyncStatement",
    "BThreadDef",
    "BProgram",
    "DONE",
]

__version__ = "0.1.0"
