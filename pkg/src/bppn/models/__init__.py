"""Built-in benchmark models: level crossing, dining philosophers,
tic-tac-toe, and the two-action interleaving demo.

Every model is reachable by name (for the command-line tool) through
:func:`build_model`, or through a compact colon reference parsed by
:func:`resolve_reference`::

    name:formalism:variant:params

Trailing segments may be omitted or left empty to take their defaults.
Examples: ``lc:bp:modified:1``, ``lc:pn:single:1``, ``lc:pn:multi:3f``
(trailing ``f`` = with faults), ``dining:bp:priority:3``, ``dining:pn::2``,
``ttt:pn:xwin``, ``ab:bp:interleave``.
"""

from typing import Optional, Tuple, Union

from bppn.bprogram import BProgram
from bppn.models import ab, dining, lc, ttt
from bppn.petri import PetriNet

__all__ = [
    "MODEL_NAMES",
    "build_model",
    "resolve_reference",
    "ab",
    "dining",
    "lc",
    "ttt",
]

MODEL_NAMES = ("lc", "dining", "ttt", "ab")

_LC_BP_VARIANTS = {
    "": lc.ORIGINAL,
    "original": lc.ORIGINAL,
    "modified": lc.MODIFIED_R2,
}
_LC_PN_VARIANTS = {
    "": lc.MULTI_2016,
    "multi": lc.MULTI_2016,
    "single": lc.SINGLE_1987,
}
_DINING_VARIANTS = {
    "": dining.BASE,
    "base": dining.BASE,
    "liveness": dining.WITH_LIVENESS,
    "with_liveness": dining.WITH_LIVENESS,
    "arbitrator": dining.ARBITRATOR,
    "priority": dining.PRIORITY_ORDER,
    "priority_order": dining.PRIORITY_ORDER,
}
_TTT_PN_VARIANTS = {
    "": ttt.TURNS_ONLY,
    "turns": ttt.TURNS_ONLY,
    "turns_only": ttt.TURNS_ONLY,
    "xwin": ttt.XWIN_ROW0,
    "xwin_row0": ttt.XWIN_ROW0,
}
_AB_VARIANTS = {
    "": False,
    "base": False,
    "interleave": True,
}


def _pick(table: dict, variant: str, what: str):
    key = (variant or "").lower()
    if key not in table:
        choices = ", ".join(sorted(k for k in table if k))
        raise ValueError("unknown %s variant %r (expected one of: %s)"
                         % (what, variant, choices))
    return table[key]


def build_model(name: str, formalism: str, variant: str = "",
                n: Optional[int] = None,
                faults: bool = False) -> Union[BProgram, PetriNet]:
    """Construct a benchmark model by name.

    ``formalism`` is ``bp`` or ``pn``; ``variant`` accepts the per-model
    spellings documented in the module docstring; ``n`` is the track count
    (lc) or philosopher count (dining).
    """
    name = name.lower()
    formalism = formalism.lower()
    if formalism not in ("bp", "pn"):
        raise ValueError("unknown formalism %r (expected bp or pn)" % formalism)
    if name == "lc":
        tracks = 1 if n is None else n
        if formalism == "bp":
            return lc.lc_bp(tracks, faults, _pick(_LC_BP_VARIANTS, variant, "lc bp"))
        return lc.lc_pn(tracks, faults, _pick(_LC_PN_VARIANTS, variant, "lc pn"))
    if name == "dining":
        seats = 2 if n is None else n
        if formalism == "bp":
            return dining.dining_bp(seats, _pick(_DINING_VARIANTS, variant, "dining"))
        if variant not in ("", "base"):
            raise ValueError("the dining net has no variant %r" % variant)
        return dining.dining_pn(seats)
    if name == "ttt":
        if formalism == "bp":
            if variant not in ("", "full"):
                raise ValueError("the ttt b-program has no variant %r" % variant)
            return ttt.ttt_bp()
        return ttt.ttt_pn(_pick(_TTT_PN_VARIANTS, variant, "ttt pn"))
    if name == "ab":
        if formalism != "bp":
            raise ValueError("the ab demo exists only as a b-program")
        return ab.ab_demo(_pick(_AB_VARIANTS, variant, "ab"))
    raise ValueError("unknown model %r (expected one of: %s)"
                     % (name, ", ".join(MODEL_NAMES)))


def resolve_reference(ref: str) -> Tuple[str, Union[BProgram, PetriNet]]:
    """Parse a ``name:formalism:variant:params`` reference and build it.

    Returns ``(formalism, model)``.  Missing or empty segments default as in
    :func:`build_model`.  The params segment is the integer size, with an
    optional trailing ``f`` enabling fault transitions (lc only).
    """
    parts = ref.split(":")
    if len(parts) > 4:
        raise ValueError("bad model reference %r (expected "
                         "name:formalism:variant:params)" % ref)
    parts += [""] * (4 - len(parts))
    name, formalism, variant, params = parts
    formalism = formalism or "bp"
    n = None
    faults = False
    if params:
        body = params.lower()
        if body.endswith("f"):
            faults = True
            body = body[:-1]
        try:
            n = int(body)
        except ValueError:
            raise ValueError("bad params segment %r in %r (expected an "
                             "integer, optionally followed by 'f')"
                             % (params, ref))
    return formalism.lower(), build_model(name, formalism, variant, n, faults)
