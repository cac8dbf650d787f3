"""Base relation automata and golden-ratio automata over Zeckendorf tracks.

The small relations (validity, equality, order, fixed constants) are written
down directly: on zero-padded canonical words, value comparison is exactly
lexicographic comparison, so three-state machines suffice.  Addition and
x = floor(n*phi) have no such direct table; they are synthesized by the
bounded Myhill-Nerode learner from exact integer oracles and then verified
against those oracles on an exhaustive range before being returned.  The
remaining golden-ratio automata (floor(n/phi), floor(n*phi^2)) are compiled
from phin through the logic engine via exact identities, never guessed.
"""

from __future__ import annotations

from math import isqrt

import numpy as np

from .dfa import Dfa, digit_matrix, run_batch, track_no11, validity
from .errors import VerificationError
from .golden import floor_phi
from .learner import GuessReport, MembershipOracle, PredicateOracle, guess
from .zeckendorf import encode

__all__ = [
    "valid",
    "eq",
    "neq",
    "lt",
    "le",
    "const",
    "adder",
    "phin",
    "AdditionOracle",
    "FloorPhiOracle",
]


def valid() -> Dfa:
    """One-track automaton of all zero-padded canonical words (no "11")."""
    return track_no11(1, 0)


def eq() -> Dfa:
    """Pairs of identical digit strings; value equality on padded canonicals."""
    trans = [[0, 1, 1, 0], [1, 1, 1, 1]]
    return Dfa(2, trans, [True, False]).minimize()


def neq() -> Dfa:
    """Pairs of distinct digit strings."""
    trans = [[0, 1, 1, 0], [1, 1, 1, 1]]
    return Dfa(2, trans, [False, True]).minimize()


def lt() -> Dfa:
    """First track strictly below the second (lexicographic on padded words)."""
    # state 0: equal so far; 1: strictly less; 2: strictly greater (dead)
    trans = [[0, 1, 2, 0], [1, 1, 1, 1], [2, 2, 2, 2]]
    return Dfa(2, trans, [False, True, False]).minimize()


def le() -> Dfa:
    trans = [[0, 1, 2, 0], [1, 1, 1, 1], [2, 2, 2, 2]]
    return Dfa(2, trans, [True, True, False]).minimize()


def const(c: int) -> Dfa:
    """One-track automaton accepting exactly the padded encoding of c."""
    word = encode(c)
    n = len(word)
    # states 0..n walk the digits (state 0 also loops on leading zeros);
    # state n+1 is the dead state.
    trans = np.full((n + 2, 2), n + 1, dtype=np.int32)
    trans[0, 0] = 0
    for i, ch in enumerate(word):
        trans[i, int(ch)] = i + 1
        if i > 0:
            trans[i, 1 - int(ch)] = n + 1
    finals = np.zeros(n + 2, dtype=bool)
    finals[n] = True
    return Dfa(1, trans, finals, 0).minimize()


class AdditionOracle(PredicateOracle):
    """Accepts valid triples with x + y = z."""

    def __init__(self):
        super().__init__(3, lambda x, y, z: x + y == z, name="add")


class FloorPhiOracle(MembershipOracle):
    """Accepts valid pairs (n, x) with x = floor(n * phi).

    Keeps a lazily grown table of floors, each entry computed with the
    exact integer square root; no floating point.
    """

    arity = 2
    name = "phin"

    def __init__(self):
        self._table = np.asarray([0], dtype=np.int64)

    def _grown(self, limit: int) -> np.ndarray:
        if limit >= len(self._table):
            hi = max(limit + 1, 2 * len(self._table))
            self._table = np.asarray(
                [(n + isqrt(5 * n * n)) // 2 for n in range(hi)], dtype=np.int64
            )
        return self._table

    def classify(self, values, invalid):
        n, x = values
        table = self._grown(int(n.max()) if n.size else 0)
        ans = (table[n] == x).astype(np.int8)
        ans[invalid] = 0
        return ans


def adder(prefix_bound: int = 24, depths=(3, 4, 5), check_range: int = 300):
    """Three-track automaton of x + y = z, guessed and then verified.

    The candidate must stabilize across the depth schedule and reproduce
    integer addition exhaustively for x, y below check_range (acceptance
    and rejection of nearby wrong sums); otherwise construction aborts.
    Returns (automaton, guess report).
    """
    report = guess(AdditionOracle(), prefix_bound, depths)
    if not report.stabilized:
        raise VerificationError(
            f"adder guess did not stabilize: counts {report.state_counts}"
        )
    cand = report.candidate
    _check_adder(cand, check_range)
    return cand, report


def _check_adder(cand: Dfa, check_range: int) -> None:
    vals = np.arange(check_range)
    xs, ys = np.meshgrid(vals, vals, indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    zs = xs + ys
    digits = digit_matrix(range(2 * check_range + 2))
    good = run_batch(cand, [digits[xs], digits[ys], digits[zs]])
    if not good.all():
        i = int(np.flatnonzero(~good)[0])
        raise VerificationError(f"adder rejects {xs[i]} + {ys[i]} = {zs[i]}")
    for off in (1, 2):
        bad = run_batch(cand, [digits[xs], digits[ys], digits[zs + off]])
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise VerificationError(
                f"adder accepts {xs[i]} + {ys[i]} = {zs[i] + off}"
            )


def phin(prefix_bound: int = 16, depths=(5, 6, 7), check_digits: int = 18):
    """Two-track automaton of x = floor(n * phi), guessed then verified.

    Verification replays the oracle exhaustively over every n whose
    encoding fits in check_digits digits, both the accepting pair and the
    two nearest rejecting pairs.  Returns (automaton, guess report).
    """
    report = guess(FloorPhiOracle(), prefix_bound, depths)
    if not report.stabilized:
        raise VerificationError(
            f"phin guess did not stabilize: counts {report.state_counts}"
        )
    cand = report.candidate
    limit = _fib_upper(check_digits)
    ns = np.arange(limit, dtype=np.int64)
    fl = np.asarray([floor_phi(int(n)) for n in range(limit)], dtype=np.int64)
    digits = digit_matrix(range(int(fl[-1]) + 3))
    good = run_batch(cand, [digits[ns], digits[fl]])
    if not good.all():
        i = int(np.flatnonzero(~good)[0])
        raise VerificationError(f"phin rejects ({i}, {fl[i]})")
    for off in (1, -1):
        wrong = fl + off
        keep = wrong >= 0
        bad = run_batch(cand, [digits[ns[keep]], digits[wrong[keep]]])
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise VerificationError(f"phin accepts a wrong floor near n={i}")
    return cand, report


def _fib_upper(n_digits: int) -> int:
    """Smallest value whose encoding needs more than n_digits digits."""
    a, b = 1, 2
    for _ in range(n_digits):
        a, b = b, a + b
    return a


def base_automata() -> dict[str, Dfa]:
    """The directly constructed relations, keyed by their reserved names."""
    return {"valid": valid(), "eq": eq(), "lt": lt()}
