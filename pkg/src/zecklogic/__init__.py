"""Decision engine for first-order statements about integers in Zeckendorf
representation, bundled with an exact simulator of the Hurt-Sada array.

The package re-derives closed forms, automaton state counts, and the
induction-based correctness of a guessed array automaton from scratch:
integer sequences come from the exact simulator (`hurtsada`), base relations
and golden-ratio automata from `arith`, automaton synthesis from `learner`,
and the def/eval script language from `logic`.
"""

__version__ = "0.1.0"

from .dfa import Dfa
from .errors import (
    ContractError,
    GuessError,
    MalformedInputError,
    ScriptError,
    VerificationError,
    ZeckLogicError,
)

__all__ = [
    "Dfa",
    "ContractError",
    "GuessError",
    "MalformedInputError",
    "ScriptError",
    "VerificationError",
    "ZeckLogicError",
    "__version__",
]
