"""Place/transition Petri nets: weighted arcs, markings, enabledness, firing.

A marking is a tuple of nonnegative token counts, one slot per place in
the net's place order (insertion order, which the JSON file format
preserves). Transitions carry an event label (its textual rendering, e.g.
``Entering(1,true)``); several transitions may share a label. ``helper``
marks implementation-only transitions excluded from behavioral
comparison; ``fault`` marks injected fault transitions.

The file format is a single JSON document::

    {"places":      [{"id": ..., "name": ..., "tokens": ...}, ...],
     "transitions": [{"id": ..., "label": ..., "helper": ..., "fault": ...}, ...],
     "arcs":        [{"from": ..., "to": ..., "weight": ...}, ...]}

Keys are exactly these; unknown keys are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from bppn.events import Event


class PetriNetError(ValueError):
    pass


@dataclass(frozen=True)
class Place:
    id: str
    name: str
    tokens: int


@dataclass(frozen=True)
class Transition:
    id: str
    label: str
    helper: bool = False
    fault: bool = False


class PetriNet:
    """A place/transition net with weighted arcs.

    Arcs connect place->transition (input) or transition->place (output)
    only. Self-loops are expressed as one arc in each direction.
    """

    def __init__(self, name: str = ""):
        self.name = name
        self.places: Dict[str, Place] = {}
        self.transitions: Dict[str, Transition] = {}
        self.inputs: Dict[str, Dict[str, int]] = {}   # tid -> {pid: weight}
        self.outputs: Dict[str, Dict[str, int]] = {}  # tid -> {pid: weight}
        self._order: List[str] = []                   # place ids, insertion order
        self._trans_order: List[str] = []

    # -- construction --------------------------------------------------

    def add_place(self, pid: str, tokens: int = 0, name: Optional[str] = None) -> None:
        if pid in self.places:
            raise PetriNetError(f"duplicate place id: {pid}")
        if pid in self.transitions:
            raise PetriNetError(f"id used by both a place and a transition: {pid}")
        if tokens < 0:
            raise PetriNetError(f"negative initial tokens on place {pid}")
        self.places[pid] = Place(pid, name if name is not None else pid, tokens)
        self._order.append(pid)

    def add_transition(self, tid: str, label: Optional[str] = None,
                       helper: bool = False, fault: bool = False) -> None:
        if tid in self.transitions:
            raise PetriNetError(f"duplicate transition id: {tid}")
        if tid in self.places:
            raise PetriNetError(f"id used by both a place and a transition: {tid}")
        self.transitions[tid] = Transition(tid, label if label is not None else tid,
                                           helper, fault)
        self.inputs[tid] = {}
        self.outputs[tid] = {}
        self._trans_order.append(tid)

    def add_arc(self, src: str, dst: str, weight: int = 1) -> None:
        if weight <= 0:
            raise PetriNetError(f"arc weight must be positive: {src}->{dst} ({weight})")
        if src in self.places and dst in self.transitions:
            d = self.inputs[dst]
            d[src] = d.get(src, 0) + weight
        elif src in self.transitions and dst in self.places:
            d = self.outputs[src]
            d[dst] = d.get(dst, 0) + weight
        elif src not in self.places and src not in self.transitions:
            raise PetriNetError(f"arc source does not exist: {src}")
        elif dst not in self.places and dst not in self.transitions:
            raise PetriNetError(f"arc target does not exist: {dst}")
        else:
            raise PetriNetError(
                f"arc must connect a place and a transition: {src}->{dst}")

    # -- markings ------------------------------------------------------

    def place_order(self) -> Tuple[str, ...]:
        return tuple(self._order)

    def transition_order(self) -> Tuple[str, ...]:
        return tuple(self._trans_order)

    def initial_marking(self) -> Tuple[int, ...]:
        return tuple(self.places[p].tokens for p in self._order)

    def marking_dict(self, m: Tuple[int, ...]) -> Dict[str, int]:
        return {p: k for p, k in zip(self._order, m) if k}

    def format_marking(self, m: Tuple[int, ...]) -> str:
        parts = []
        for p, k in zip(self._order, m):
            if k == 1:
                parts.append(p)
            elif k > 1:
                parts.append(f"{p}:{k}")
        return "{" + ",".join(parts) + "}"

    # -- semantics -----------------------------------------------------

    def is_enabled(self, m: Tuple[int, ...], tid: str) -> bool:
        idx = self._index()
        return all(m[idx[p]] >= w for p, w in self.inputs[tid].items())

    def fire(self, m: Tuple[int, ...], tid: str) -> Tuple[int, ...]:
        idx = self._index()
        ins = self.inputs[tid]
        outs = self.outputs[tid]
        for p, w in ins.items():
            if m[idx[p]] < w:
                raise PetriNetError(f"transition {tid} not enabled")
        nxt = list(m)
        for p, w in ins.items():
            nxt[idx[p]] -= w
        for p, w in outs.items():
            nxt[idx[p]] += w
        return tuple(nxt)

    def enabled(self, m: Tuple[int, ...]) -> List[str]:
        """Enabled transition ids, ordered by (event label, id)."""
        out = [t for t in self._trans_order if self.is_enabled(m, t)]
        out.sort(key=lambda t: (_label_key(self.transitions[t].label), t))
        return out

    def _index(self) -> Dict[str, int]:
        idx = getattr(self, "_idx_cache", None)
        if idx is None or len(idx) != len(self._order):
            idx = {p: i for i, p in enumerate(self._order)}
            self._idx_cache = idx
        return idx

    # -- inspection ----------------------------------------------------

    def labels(self) -> Tuple[str, ...]:
        seen = []
        for t in self._trans_order:
            lbl = self.transitions[t].label
            if lbl not in seen:
                seen.append(lbl)
        return tuple(seen)

    def helper_labels(self) -> frozenset:
        return frozenset(tr.label for tr in self.transitions.values() if tr.helper)

    def adjacent_transitions(self, pid: str) -> List[str]:
        out = []
        for t in self._trans_order:
            if pid in self.inputs[t] or pid in self.outputs[t]:
                out.append(t)
        return out

    def validate(self) -> List[str]:
        """Type-invariant diagnostics; empty list means the net is well-formed."""
        problems = []
        for pid, pl in self.places.items():
            if pl.tokens < 0:
                problems.append(f"place {pid} has negative tokens")
        for tid in self.transitions:
            for p in list(self.inputs[tid]) + list(self.outputs[tid]):
                if p not in self.places:
                    problems.append(f"arc endpoint {p} of transition {tid} is not a place")
            for p, w in self.inputs[tid].items():
                if w <= 0:
                    problems.append(f"arc {p}->{tid} has non-positive weight")
            for p, w in self.outputs[tid].items():
                if w <= 0:
                    problems.append(f"arc {tid}->{p} has non-positive weight")
        try:
            for t in self._trans_order:
                Event.parse(self.transitions[t].label)
        except ValueError as exc:
            problems.append(f"unparseable transition label: {exc}")
        return problems

    # -- JSON ------------------------------------------------------------

    def to_json(self) -> dict:
        places = [{"id": p.id, "name": p.name, "tokens": p.tokens}
                  for p in (self.places[i] for i in self._order)]
        transitions = [{"id": t.id, "label": t.label, "helper": t.helper,
                        "fault": t.fault}
                       for t in (self.transitions[i] for i in self._trans_order)]
        arcs = []
        for tid in self._trans_order:
            for p, w in self.inputs[tid].items():
                arcs.append({"from": p, "to": tid, "weight": w})
            for p, w in self.outputs[tid].items():
                arcs.append({"from": tid, "to": p, "weight": w})
        return {"places": places, "transitions": transitions, "arcs": arcs}

    @staticmethod
    def from_json(doc: dict, name: str = "") -> "PetriNet":
        if not isinstance(doc, dict):
            raise PetriNetError("PN document must be a JSON object")
        _check_keys("document", doc, {"places", "transitions", "arcs"})
        net = PetriNet(name)
        for entry in doc["places"]:
            _check_keys("place", entry, {"id", "name", "tokens"})
            net.add_place(str(entry["id"]), int(entry["tokens"]), str(entry["name"]))
        for entry in doc["transitions"]:
            _check_keys("transition", entry, {"id", "label", "helper", "fault"})
            net.add_transition(str(entry["id"]), str(entry["label"]),
                               bool(entry["helper"]), bool(entry["fault"]))
        for entry in doc["arcs"]:
            _check_keys("arc", entry, {"from", "to", "weight"})
            net.add_arc(str(entry["from"]), str(entry["to"]), int(entry["weight"]))
        return net

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    @staticmethod
    def load(path: str) -> "PetriNet":
        with open(path) as fh:
            doc = json.load(fh)
        net = PetriNet.from_json(doc)
        problems = net.validate()
        if problems:
            raise PetriNetError("; ".join(problems))
        return net


def _check_keys(what: str, entry: dict, allowed: set) -> None:
    if not isinstance(entry, dict):
        raise PetriNetError(f"{what} entry must be an object")
    unknown = set(entry) - allowed
    if unknown:
        raise PetriNetError(f"unknown {what} keys: {sorted(unknown)}")
    missing = allowed - set(entry)
    if missing:
        raise PetriNetError(f"missing {what} keys: {sorted(missing)}")


def _label_key(label: str):
    try:
        return Event.parse(label).sort_key()
    except ValueError:
        return (label, ())
