"""Command-line tool: stats, graphs, equivalence reports, trace listings,
seeded simulation, net-to-b-program translation, and deadlock/liveness
checks over the bundled models or Petri-net files.

Exit codes: 0 on success, 1 on analysis findings configured as failures
(``--fail-on-deadlock``) and on guard/translation errors, 2 on usage or
I/O errors.
"""

import argparse
import json
import os
import random
import sys
from collections import deque
from typing import List, Optional, Sequence, Tuple

from bppn.bprogram import BProgram, RUNNING
from bppn.equiv import bounded_compare, bounded_traces, compare, shared_alphabet
from bppn.events import Event, sort_events
from bppn.models import MODEL_NAMES, build_model, resolve_reference
from bppn.petri import PetriNet, PetriNetError
from bppn.statespace import (BpStepper, GuardExceeded, PnStepper, build_lts,
                             find_deadlocks, find_hot_cycles, path_events,
                             reduce_helper)
from bppn.translate import (AmbiguousLabel, TranslationMismatch, bthread_dump,
                            verify_translation)

__all__ = ["run_command", "main"]


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True,
                   help="model name: %s" % ", ".join(MODEL_NAMES))
    p.add_argument("--formalism", default="bp", choices=["bp", "pn"])
    p.add_argument("--variant", default="")
    p.add_argument("--tracks", "--n", dest="n", type=int, default=None,
                   help="track count (lc) / philosopher count (dining)")
    p.add_argument("--faults", action="store_true")


def _add_guard_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-states", type=int, default=10 ** 6)


def _build_from_args(args) -> Tuple[str, object]:
    model = build_model(args.model, args.formalism, args.variant,
                        args.n, args.faults)
    return args.formalism, model


def _stepper(kind: str, model):
    return BpStepper(model) if kind == "bp" else PnStepper(model)


def _lts_from_args(args, pnstar: bool = False):
    kind, model = _build_from_args(args)
    lts = build_lts(_stepper(kind, model), max_states=args.max_states)
    if pnstar:
        if kind != "pn":
            raise _Usage("--pnstar applies only to Petri-net models")
        lts = reduce_helper(lts)
    return kind, model, lts


def _load_side(ref: str, max_states: int):
    """A comparison side: a Petri-net file path or a model reference."""
    if os.path.exists(ref):
        net = PetriNet.load(ref)
        return "pn", net, build_lts(PnStepper(net), max_states=max_states)
    kind, model = resolve_reference(ref)
    return kind, model, build_lts(_stepper(kind, model), max_states=max_states)


def _parse_shared(spec: str, ltss) -> Optional[List[Event]]:
    if spec == "auto":
        return None
    return [Event.parse(tok.strip()) for tok in spec.split(",") if tok.strip()]


class _Usage(Exception):
    pass


# ---------------------------------------------------------------------------
# Witness replay: walk the concrete stepper along the claimed state path and
# confirm every edge before anything is printed.
# ---------------------------------------------------------------------------


def _shortest_path(lts, target: int) -> List[int]:
    parent = {lts.initial: None}
    queue = deque([lts.initial])
    while queue:
        s = queue.popleft()
        if s == target:
            path = [s]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for _, dst in lts.successors(s):
            if dst not in parent:
                parent[dst] = s
                queue.append(dst)
    raise ValueError("state %d unreachable" % target)


def _replay(kind: str, model, lts, states: Sequence[int],
            events: Sequence[Event]) -> bool:
    """Re-walk the path on a fresh stepper, mapping stepper states to LTS
    ids by exploration order, and confirm each claimed edge fires."""
    stepper = _stepper(kind, model)
    ids = {}
    frontier = deque([stepper.initial()])
    ids[stepper.initial()] = 0
    order = [stepper.initial()]
    # Rebuild the id assignment the construction used (breadth-first).
    while frontier and len(order) <= max(states):
        s = frontier.popleft()
        for _, nxt in stepper.successors(s):
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
                frontier.append(nxt)
    cur = order[states[0]] if states[0] < len(order) else None
    if cur is None or ids.get(cur) != states[0]:
        return False
    for ev, want in zip(events, states[1:]):
        step = [nxt for e, nxt in stepper.successors(cur)
                if e == ev and ids.get(nxt) == want]
        if not step:
            return False
        cur = step[0]
    return True


def _format_events(events: Sequence[Event]) -> str:
    return " ".join(str(e) for e in events) if events else "<empty>"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_stats(args) -> int:
    kind, model, lts = _lts_from_args(args, pnstar=args.pnstar)
    formalism = "pn*" if args.pnstar else kind
    n = args.n if args.n is not None else _default_n(args.model)
    print(lts.stats_line(args.model, formalism, n, args.faults))
    return 0


def _default_n(model: str):
    return {"lc": 1, "dining": 2}.get(model, "-")


def _cmd_graph(args) -> int:
    kind, model, lts = _lts_from_args(args, pnstar=args.pnstar)
    if args.format == "dot":
        text = lts.to_dot()
    else:
        text = json.dumps(lts.to_json(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_equiv(args) -> int:
    kind_l, model_l, lts_l = _load_side(args.left, args.max_states)
    kind_r, model_r, lts_r = _load_side(args.right, args.max_states)
    shared = _parse_shared(args.shared, (lts_l, lts_r))
    result = compare(lts_l, lts_r, shared)
    report = {
        "left": args.left,
        "right": args.right,
        "shared": sorted(str(e) for e in (shared if shared is not None
                                          else shared_alphabet(lts_l, lts_r))),
        "verdict": result.verdict,
        "witnesses": result.witnesses,
        "divergence_warnings": sorted(result.divergence_warnings),
    }
    if args.bounded is not None:
        only_l, only_r, both = bounded_compare(lts_l, lts_r, shared,
                                               max_len=args.bounded)
        report["bounded"] = {"max_len": args.bounded, "only_left": only_l,
                             "only_right": only_r, "both": both}
    print(json.dumps(report, indent=2))
    return 0


def _cmd_traces(args) -> int:
    kind, model, lts = _lts_from_args(args, pnstar=args.pnstar)
    if args.shared == "auto":
        shared = sort_events(set(lts.alphabet) - set(lts.helper_events))
    else:
        shared = _parse_shared(args.shared, (lts,))
    words = bounded_traces(lts, shared, args.max_len)
    print("%d projected traces up to length %d" % (len(words), args.max_len))
    shown = 0
    for word in sorted(words, key=lambda w: (len(w), [e.sort_key for e in w])):
        if shown >= args.limit:
            print("... (%d more)" % (len(words) - shown))
            break
        print(_format_events(word))
        shown += 1
    return 0


def _cmd_run(args) -> int:
    kind, model = _build_from_args(args)
    stepper = _stepper(kind, model)
    rng = random.Random(args.seed)
    state = stepper.initial()
    classification = RUNNING
    for step in range(args.steps):
        options = stepper.successors(state)
        if not options:
            classification = stepper.classify(state)
            break
        if args.interactive:
            for idx, (ev, _) in enumerate(options):
                print("  [%d] %s" % (idx, ev))
            try:
                raw = input("choose event [0-%d]: " % (len(options) - 1))
            except EOFError:
                print("(input closed)")
                return 0
            try:
                pick = int(raw)
                ev, nxt = options[pick]
            except (ValueError, IndexError):
                print("invalid choice %r" % raw, file=sys.stderr)
                return 2
        else:
            ev, nxt = rng.choice(options)
        print(ev)
        state = nxt
    else:
        classification = RUNNING
    if classification == RUNNING:
        print("-- step budget reached (%d); still running" % args.steps)
    else:
        print("-- %s" % classification)
    return 0


def _cmd_translate(args) -> int:
    net = PetriNet.load(args.pn)
    print(bthread_dump(net))
    if args.verify:
        joint = verify_translation(net, max_states=args.max_states)
        print("bisimulation verified: %d joint states" % joint)
    return 0


def _cmd_check(args) -> int:
    kind, model, lts = _lts_from_args(args)
    findings = 0

    deadlocks = find_deadlocks(lts)
    if deadlocks:
        findings += len(deadlocks)
        print("%d deadlock state(s)" % len(deadlocks))
        for sid in deadlocks[:args.max_reports]:
            path = _shortest_path(lts, sid)
            events = path_events(lts, path)
            ok = _replay(kind, model, lts, path, events)
            suffix = "" if ok else "  [replay FAILED]"
            print("  deadlock %s via: %s%s"
                  % (lts.state_labels[sid], _format_events(events), suffix))
        if len(deadlocks) > args.max_reports:
            print("  ... (%d more)" % (len(deadlocks) - args.max_reports))
    else:
        print("no deadlocks")

    if kind == "bp":
        violations = find_hot_cycles(lts)
        if violations:
            print("%d hot-cycle violation(s)" % len(violations))
            for v in violations[:args.max_reports]:
                lasso_states = list(v.prefix) + list(v.cycle) + [v.cycle[0]]
                events = path_events(lts, lasso_states)
                ok = _replay(kind, model, lts, lasso_states, events)
                cut = len(v.prefix)
                prefix_ev = events[:max(cut - 1, 0)]
                cycle_ev = events[max(cut - 1, 0):]
                suffix = "" if ok else "  [replay FAILED]"
                print("  thread %r stays hot: prefix %s, cycle (%s)^w%s"
                      % (v.thread, _format_events(prefix_ev),
                         _format_events(cycle_ev), suffix))
            if len(violations) > args.max_reports:
                print("  ... (%d more)" % (len(violations) - args.max_reports))
        else:
            print("no hot cycles")

    if args.fail_on_deadlock and deadlocks:
        return 1
    return 0


# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="bppn",
        description="state-space analysis for behavioral programs and Petri nets")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="one CSV line: model,formalism,n,faults,states,transitions")
    _add_model_args(p)
    _add_guard_args(p)
    p.add_argument("--pnstar", action="store_true",
                   help="contract helper events before counting")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("graph", help="export the transition system as DOT or JSON")
    _add_model_args(p)
    _add_guard_args(p)
    p.add_argument("--pnstar", action="store_true")
    p.add_argument("--format", default="dot", choices=["dot", "json"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("equiv", help="compare two models (JSON report)")
    p.add_argument("--left", required=True,
                   help="model reference name:formalism:variant:params, or a net file")
    p.add_argument("--right", required=True)
    p.add_argument("--shared", default="auto",
                   help="'auto' or a comma-separated event list")
    p.add_argument("--bounded", type=int, default=None, metavar="L",
                   help="also census traces up to length L")
    _add_guard_args(p)
    p.set_defaults(func=_cmd_equiv)

    p = sub.add_parser("traces", help="list bounded projected traces of one model")
    _add_model_args(p)
    _add_guard_args(p)
    p.add_argument("--pnstar", action="store_true")
    p.add_argument("--max-len", type=int, default=16)
    p.add_argument("--shared", default="auto")
    p.add_argument("--limit", type=int, default=200,
                   help="print at most this many traces")
    p.set_defaults(func=_cmd_traces)

    p = sub.add_parser("run", help="simulate one execution")
    _add_model_args(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--interactive", action="store_true",
                   help="prompt for each step instead of sampling")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("translate", help="net file -> generated b-threads")
    p.add_argument("--pn", required=True, metavar="FILE")
    p.add_argument("--verify", action="store_true",
                   help="lockstep-check the marking/counter bisimulation")
    _add_guard_args(p)
    p.set_defaults(func=_cmd_translate)

    p = sub.add_parser("check", help="deadlock and hot-cycle report")
    _add_model_args(p)
    _add_guard_args(p)
    p.add_argument("--fail-on-deadlock", action="store_true")
    p.add_argument("--max-reports", type=int, default=5)
    p.set_defaults(func=_cmd_check)
    return top


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """Parse and dispatch; returns the process exit code."""
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except _Usage as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except (FileNotFoundError, PermissionError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except ValueError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except AmbiguousLabel as e:
        print("AmbiguousLabel: %s" % e, file=sys.stderr)
        return 1
    except TranslationMismatch as e:
        print("TranslationMismatch: %s" % e, file=sys.stderr)
        return 1
    except GuardExceeded as e:
        print("GuardExceeded: %s" % e, file=sys.stderr)
        return 1
    except PetriNetError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
