"""Tic-tac-toe in both formalisms.

The behavioral model is the full game: per-cell threads forbid double
marking, a turn thread alternates X and O (X first), a requester offers
every legal mark, and per-line detector threads watch for three-in-a-row,
request the win event (priority 100) and then silence the program.  A tie
thread counts nine marks, requests Tie at priority 90 — win beats tie when
the final mark completes a line — and then silences the program too.

The Petri-net variants cover what a net captures naturally and what it
takes to go further:

- ``TURNS_ONLY``: one place per cell plus a two-place turn loop; marks
  consume the cell token, so the net enforces single marking and strict
  alternation but simply halts when the board fills — no winner or tie is
  ever declared.
- ``XWIN_ROW0``: the same net plus an interlock that detects X taking the
  top row: every X move is gated by a circulating "game token" and the
  top-row X moves also feed a counter place; a sink transition consumes
  three counter tokens and the game token, declaring the win and stopping
  all further X moves.  Handling every line (and O wins, and ties) would
  repeat this mechanism per line, which is exactly the noise the
  behavioral model avoids.

Cells are indexed 0..8 row-major.  Lines are the three rows, three
columns, and both diagonals.
"""

from typing import List, Tuple

from bppn.bprogram import BProgram, BThreadDef, SyncStatement, loop_thread, sync
from bppn.events import ALL, Alphabet, Event, EventSet, event, explicit
from bppn.petri import PetriNet

__all__ = [
    "TURNS_ONLY",
    "XWIN_ROW0",
    "CELLS",
    "LINES",
    "X_WIN",
    "O_WIN",
    "TIE",
    "ttt_bp",
    "ttt_pn",
]

TURNS_ONLY = "TURNS_ONLY"
XWIN_ROW0 = "XWIN_ROW0"

CELLS = tuple(range(9))
LINES: Tuple[Tuple[str, Tuple[int, int, int]], ...] = (
    ("row 0", (0, 1, 2)),
    ("row 1", (3, 4, 5)),
    ("row 2", (6, 7, 8)),
    ("column 0", (0, 3, 6)),
    ("column 1", (1, 4, 7)),
    ("column 2", (2, 5, 8)),
    ("diagonal", (0, 4, 8)),
    ("anti-diagonal", (2, 4, 6)),
)

X_WIN = Event("XWin")
O_WIN = Event("OWin")
TIE = Event("Tie")

ANY_X = EventSet.pattern("X", any_params=True)
ANY_O = EventSet.pattern("O", any_params=True)


def _x(c: int) -> Event:
    return event("X", c)


def _o(c: int) -> Event:
    return event("O", c)


def _moves() -> List[Event]:
    return [_x(c) for c in CELLS] + [_o(c) for c in CELLS]


def _cell_thread(c: int) -> BThreadDef:
    """Wait for the cell's first mark, then block both marks forever."""
    marks = explicit([_o(c), _x(c)])
    watch = sync(wait_for=marks)
    seal = sync(block=marks)

    def view(state: int) -> SyncStatement:
        return watch if state == 0 else seal

    def advance(state: int, ev: Event) -> int:
        return 1

    return BThreadDef(name="Cell %d cannot be marked twice" % c,
                      init=0, view=view, advance=advance)


def _win_thread(player: str, line_name: str, cells: Tuple[int, int, int],
                win_event: Event) -> BThreadDef:
    """Count three marks of one player on one line, then declare the win
    and silence the program."""
    mk = _x if player == "X" else _o
    watch = sync(wait_for=explicit([mk(c) for c in cells]))
    declare = sync(request=win_event, priority=100)
    seal = sync(block=ALL)
    statements = [watch, watch, watch, declare, seal]

    def view(state: int) -> SyncStatement:
        return statements[state]

    def advance(state: int, ev: Event) -> int:
        return min(state + 1, 4)

    return BThreadDef(name="Detect %s win (%s)" % (player, line_name),
                      init=0, view=view, advance=advance)


def _tie_thread() -> BThreadDef:
    """After nine marks, request Tie (a win requested at the same moment
    outranks it), then silence the program."""
    watch = sync(wait_for=explicit(_moves()))
    declare = sync(request=TIE, priority=90)
    seal = sync(block=ALL)
    statements = [watch] * 9 + [declare, seal]

    def view(state: int) -> SyncStatement:
        return statements[state]

    def advance(state: int, ev: Event) -> int:
        return min(state + 1, 10)

    return BThreadDef(name="Detect a tie", init=0, view=view, advance=advance)


def ttt_bp() -> BProgram:
    """The complete behavioral tic-tac-toe program."""
    threads: List[BThreadDef] = [_cell_thread(c) for c in CELLS]
    threads.append(loop_thread("Enforce turns", [
        sync(wait_for=ANY_X, block=ANY_O),
        sync(wait_for=ANY_O, block=ANY_X),
    ]))
    threads.append(loop_thread("Play randomly", [sync(request=tuple(_moves()))]))
    for line_name, cells in LINES:
        threads.append(_win_thread("X", line_name, cells, X_WIN))
        threads.append(_win_thread("O", line_name, cells, O_WIN))
    threads.append(_tie_thread())
    alphabet = Alphabet(_moves() + [X_WIN, O_WIN, TIE])
    return BProgram(threads, alphabet, name="ttt")


def ttt_pn(variant: str = TURNS_ONLY) -> PetriNet:
    """The net with cell and turn places; ``XWIN_ROW0`` adds the top-row
    X-win interlock."""
    if variant not in (TURNS_ONLY, XWIN_ROW0):
        raise ValueError("unknown variant %r (expected %s or %s)"
                         % (variant, TURNS_ONLY, XWIN_ROW0))
    net = PetriNet(name="ttt-%s" % variant.lower())
    for c in CELLS:
        net.add_place("cell%d" % c, tokens=1, name="cell %d unmarked" % c)
    net.add_place("turnX", tokens=1, name="X to move")
    net.add_place("turnO", tokens=0, name="O to move")
    for c in CELLS:
        net.add_transition("x%d" % c, label=str(_x(c)))
        net.add_arc("cell%d" % c, "x%d" % c)
        net.add_arc("turnX", "x%d" % c)
        net.add_arc("x%d" % c, "turnO")
        net.add_transition("o%d" % c, label=str(_o(c)))
        net.add_arc("cell%d" % c, "o%d" % c)
        net.add_arc("turnO", "o%d" % c)
        net.add_arc("o%d" % c, "turnX")
    if variant == XWIN_ROW0:
        net.add_place("game", tokens=1, name="game token")
        net.add_place("row0x", tokens=0, name="row 0 X counter")
        for c in CELLS:
            net.add_arc("game", "x%d" % c)
            net.add_arc("x%d" % c, "game")
        for c in (0, 1, 2):
            net.add_arc("x%d" % c, "row0x")
        net.add_transition("xwin_row0", label=str(X_WIN))
        net.add_arc("row0x", "xwin_row0", weight=3)
        net.add_arc("game", "xwin_row0")
    return net
