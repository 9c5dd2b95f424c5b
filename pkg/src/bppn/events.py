"""Events, alphabets, and the event-set algebra.

Events are immutable values: a label plus positional scalar parameters
(ints, strings, booleans). Two events are the same iff label and parameters
are structurally equal. A canonical total order (label lexicographically,
then parameters) makes every operation in the package deterministic.

Event sets describe waitFor/block sides of a synchronization statement and
come in five shapes: the empty set, the universal set, an explicit finite
set, a label pattern with per-parameter exact/wildcard matchers, and a
finite union of the above.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

Param = Union[int, str, bool]


class _Any:
    """Wildcard marker for one pattern position."""

    _instance: Optional["_Any"] = None

    def __new__(cls) -> "_Any":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ANY"


ANY = _Any()

# Ordering rank per parameter type; bool is checked before int because bool
# is a subclass of int in Python.
_TYPE_RANK = {bool: 0, int: 1, str: 2}


def _param_rank(p: Param) -> int:
    if isinstance(p, bool):
        return 0
    if isinstance(p, int):
        return 1
    if isinstance(p, str):
        return 2
    raise TypeError(f"unsupported event parameter type: {type(p).__name__}")


def _param_key(p: Param):
    return (_param_rank(p), p)


def render_param(p: Param) -> str:
    if isinstance(p, bool):
        return "true" if p else "false"
    return str(p)


def parse_param(text: str) -> Param:
    text = text.strip()
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        return text


@dataclass(frozen=True, order=False)
class Event:
    """An immutable event: label plus positional scalar parameters."""

    label: str
    params: Tuple[Param, ...] = ()

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise ValueError("event label must be a non-empty string")
        for p in self.params:
            _param_rank(p)  # raises on unsupported types
        # normalize to a tuple in case a list sneaks in
        if not isinstance(self.params, tuple):
            object.__setattr__(self, "params", tuple(self.params))

    def sort_key(self):
        return (self.label, tuple(_param_key(p) for p in self.params))

    def __lt__(self, other: "Event") -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "Event") -> bool:
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: "Event") -> bool:
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: "Event") -> bool:
        return self.sort_key() >= other.sort_key()

    def render(self) -> str:
        if not self.params:
            return self.label
        return f"{self.label}({','.join(render_param(p) for p in self.params)})"

    def __str__(self) -> str:
        return self.render()

    @staticmethod
    def parse(text: str) -> "Event":
        """Parse the textual rendering back into an event.

        Accepts ``Label`` or ``Label(p1,p2,...)`` where each parameter is an
        int literal, ``true``/``false``, or a bare string.
        """
        text = text.strip()
        if not text:
            raise ValueError("empty event text")
        if "(" not in text:
            if ")" in text:
                raise ValueError(f"malformed event text: {text!r}")
            return Event(text)
        if not text.endswith(")"):
            raise ValueError(f"malformed event text: {text!r}")
        label, _, inner = text.partition("(")
        inner = inner[:-1]
        if not label:
            raise ValueError(f"malformed event text: {text!r}")
        if inner.strip() == "":
            return Event(label)
        params = tuple(parse_param(part) for part in inner.split(","))
        return Event(label, params)


def event(label: str, *params: Param) -> Event:
    """Shorthand constructor: ``event("Take", 1, "R")``."""
    return Event(label, tuple(params))


class Alphabet:
    """An immutable, canonically ordered set of events."""

    __slots__ = ("_events", "_set")

    def __init__(self, events: Iterable[Event]):
        self._events: Tuple[Event, ...] = tuple(sorted(set(events), key=Event.sort_key))
        self._set = frozenset(self._events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def __contains__(self, e: Event) -> bool:
        return e in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self._events == other._events

    def __hash__(self) -> int:
        return hash(self._events)

    def __repr__(self) -> str:
        return f"Alphabet({', '.join(str(e) for e in self._events)})"

    def labels(self) -> Tuple[str, ...]:
        seen = []
        for e in self._events:
            if e.label not in seen:
                seen.append(e.label)
        return tuple(seen)

    def union(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(list(self._events) + list(other._events))


class EventSet:
    """Base class for the event-set algebra.

    Concrete shapes: :data:`NONE`, :data:`ALL`, :class:`ExplicitSet`,
    :class:`LabelPattern`, :class:`UnionSet`. All are immutable and
    hashable. ``contains`` decides membership of a single event;
    ``enumerate_over`` lists the members within a finite alphabet in
    canonical order.
    """

    def contains(self, e: Event) -> bool:
        raise NotImplementedError

    def enumerate_over(self, alphabet: Alphabet) -> Tuple[Event, ...]:
        return tuple(e for e in alphabet if self.contains(e))

    def is_none(self) -> bool:
        return False

    def is_all(self) -> bool:
        return False

    def __or__(self, other: "EventSet") -> "EventSet":
        return union(self, other)

    # -- constructors -------------------------------------------------

    @staticmethod
    def none() -> "EventSet":
        return NONE

    @staticmethod
    def all_events() -> "EventSet":
        return ALL

    @staticmethod
    def of(*events: Event) -> "EventSet":
        return ExplicitSet(frozenset(events))

    @staticmethod
    def pattern(label: str, *matchers, any_params: bool = False) -> "EventSet":
        if any_params:
            if matchers:
                raise ValueError("any_params=True takes no positional matchers")
            return LabelPattern(label, None)
        return LabelPattern(label, tuple(matchers))


class _NoneSet(EventSet):
    def contains(self, e: Event) -> bool:
        return False

    def is_none(self) -> bool:
        return True

    def __repr__(self) -> str:
        return "NONE"

    def __eq__(self, other) -> bool:
        return isinstance(other, _NoneSet)

    def __hash__(self) -> int:
        return hash("_NoneSet")


class _AllSet(EventSet):
    def contains(self, e: Event) -> bool:
        return True

    def is_all(self) -> bool:
        return True

    def __repr__(self) -> str:
        return "ALL"

    def __eq__(self, other) -> bool:
        return isinstance(other, _AllSet)

    def __hash__(self) -> int:
        return hash("_AllSet")


NONE = _NoneSet()
ALL = _AllSet()


@dataclass(frozen=True)
class ExplicitSet(EventSet):
    events: frozenset

    def contains(self, e: Event) -> bool:
        return e in self.events

    def __repr__(self) -> str:
        inner = ", ".join(str(e) for e in sorted(self.events, key=Event.sort_key))
        return f"{{{inner}}}"


@dataclass(frozen=True)
class LabelPattern(EventSet):
    """Matches events by label; parameters by position.

    ``matchers is None`` matches any parameter list. Otherwise the arity
    must agree and each position is either :data:`ANY` or an exact value.
    """

    label: str
    matchers: Optional[Tuple] = None

    def contains(self, e: Event) -> bool:
        if e.label != self.label:
            return False
        if self.matchers is None:
            return True
        if len(e.params) != len(self.matchers):
            return False
        for m, p in zip(self.matchers, e.params):
            if m is ANY:
                continue
            if not (type(m) is type(p) and m == p):
                return False
        return True

    def __repr__(self) -> str:
        if self.matchers is None:
            return f"{self.label}(*)"
        inner = ",".join("*" if m is ANY else render_param(m) for m in self.matchers)
        return f"{self.label}({inner})"


@dataclass(frozen=True)
class UnionSet(EventSet):
    parts: Tuple[EventSet, ...]

    def contains(self, e: Event) -> bool:
        return any(p.contains(e) for p in self.parts)

    def __repr__(self) -> str:
        return " | ".join(repr(p) for p in self.parts)


def union(*parts: EventSet) -> EventSet:
    """Flattened union; drops NONE parts and collapses to ALL when present."""
    flat = []
    for p in parts:
        if p.is_all():
            return ALL
        if p.is_none():
            continue
        if isinstance(p, UnionSet):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return NONE
    if len(flat) == 1:
        return flat[0]
    return UnionSet(tuple(flat))


def explicit(events: Iterable[Event]) -> EventSet:
    evs = frozenset(events)
    if not evs:
        return NONE
    return ExplicitSet(evs)


def sort_events(events: Iterable[Event]) -> Tuple[Event, ...]:
    return tuple(sorted(events, key=Event.sort_key))
