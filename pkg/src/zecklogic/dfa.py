"""Complete DFAs over k-track binary tuple alphabets.

A symbol packs one bit per track into an int, track 0 being the most
significant bit, so the 2^k symbols sorted as integers give the fixed
symbol order used everywhere (serialization, canonical numbering, BFS).
Words are read most significant digit first; integer inputs are encoded in
Zeckendorf form and padded with leading zeros to a common length.

Automata built by this module keep two invariants:

- the transition map is total (a dead state is materialized when needed);
- leading-zero invariance: prepending the all-zeros symbol never changes
  acceptance.  Operations preserve it, and projection re-establishes it by
  closing the initial state set under all-zero input tuples before the
  subset construction.

Minimization renumbers states canonically (breadth first from the initial
state, symbols in increasing order), so automata with equal languages
serialize to identical bytes.  Validity of Zeckendorf digits is *not* baked
in: the logic layer conjoins the no-"11" check where quantifier semantics
require it, which keeps complement a true complement here.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernel
from .errors import ContractError, MalformedInputError
from .zeckendorf import decode, encode


class Dfa:
    """Immutable complete DFA over a 2^arity symbol alphabet."""

    __slots__ = ("arity", "initial", "trans", "finals")

    def __init__(self, arity: int, trans, finals, initial: int = 0):
        if arity < 0:
            raise ContractError("arity must be >= 0")
        trans = np.ascontiguousarray(trans, dtype=np.int32)
        finals = np.ascontiguousarray(finals, dtype=bool)
        n_states = trans.shape[0] if trans.ndim == 2 else 0
        if trans.ndim != 2 or trans.shape[1] != (1 << arity):
            raise ContractError(
                f"transition table must have shape (S, {1 << arity})"
            )
        if finals.shape != (n_states,):
            raise ContractError("finals must have one flag per state")
        if n_states == 0:
            raise ContractError("a DFA needs at least one state")
        if not (0 <= initial < n_states):
            raise ContractError("initial state out of range")
        if trans.size and (trans.min() < 0 or trans.max() >= n_states):
            raise ContractError("transition target out of range")
        trans.setflags(write=False)
        finals.setflags(write=False)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "initial", int(initial))
        object.__setattr__(self, "trans", trans)
        object.__setattr__(self, "finals", finals)

    def __setattr__(self, name, value):
        raise AttributeError("Dfa values are immutable")

    @property
    def n_states(self) -> int:
        return self.trans.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.trans.shape[1]

    def __repr__(self):
        return f"Dfa(arity={self.arity}, states={self.n_states})"

    # -- running -----------------------------------------------------------

    def run_word(self, word: Iterable[int]) -> int:
        """State reached from the initial state on a symbol sequence."""
        state = self.initial
        trans = self.trans
        for sym in word:
            state = int(trans[state, sym])
        return state

    def accepts_word(self, word: Iterable[int]) -> bool:
        return bool(self.finals[self.run_word(word)])

    def accepts(self, *values: int) -> bool:
        """Run the canonical zero-padded encodings of the given integers."""
        if len(values) != self.arity:
            raise ContractError(
                f"expected {self.arity} inputs, got {len(values)}"
            )
        return self.accepts_word(pack_values(values))

    def identical(self, other: "Dfa") -> bool:
        """Structural equality (used on canonical forms)."""
        return (
            self.arity == other.arity
            and self.initial == other.initial
            and np.array_equal(self.trans, other.trans)
            and np.array_equal(self.finals, other.finals)
        )

    # -- boolean algebra and track surgery ----------------------------------

    def complement(self) -> "Dfa":
        """Accepts a tuple word iff self rejects it."""
        return Dfa(self.arity, self.trans, ~self.finals, self.initial)

    def minimize(self) -> "Dfa":
        """Canonical minimal complete DFA for the same language."""
        reach = _reachable(self.trans, self.initial)
        trans = self.trans[reach]
        old_to_new = np.full(self.n_states, -1, dtype=np.int32)
        old_to_new[reach] = np.arange(len(reach), dtype=np.int32)
        trans = old_to_new[trans]
        finals = self.finals[reach]
        labels = kernel.refine(trans, finals.astype(np.uint8))
        n_blocks = int(labels.max()) + 1
        reps = np.zeros(n_blocks, dtype=np.int64)
        seen = np.zeros(n_blocks, dtype=bool)
        for s, lab in enumerate(labels):
            if not seen[lab]:
                seen[lab] = True
                reps[lab] = s
        qtrans = labels[trans[reps]].astype(np.int32)
        qfinals = finals[reps]
        qinit = int(labels[old_to_new[self.initial]])
        return _renumber(self.arity, qtrans, qfinals, qinit)

    def project(self, track: int) -> "Dfa":
        """Existential quantification: delete one track.

        Accepts a (k-1)-track word w iff some digit sequence on the deleted
        track (possibly longer than w, with w zero-padded in front) makes
        the full word accepted.
        """
        if self.arity < 1:
            raise ContractError("cannot project a 0-arity automaton")
        if not (0 <= track < self.arity):
            raise ContractError(f"track {track} out of range")
        k = self.arity
        bit = k - 1 - track
        psyms = np.arange(1 << (k - 1), dtype=np.int64)
        low = psyms & ((1 << bit) - 1)
        high = (psyms >> bit) << (bit + 1)
        syms0 = high | low
        syms1 = high | (1 << bit) | low
        choices = np.stack(
            [self.trans[:, syms0], self.trans[:, syms1]], axis=2
        ).astype(np.int32)
        init = _zero_closure(choices, self.initial)
        dtrans, dfinals = kernel.determinize(
            np.ascontiguousarray(choices),
            self.finals.astype(np.uint8),
            np.asarray(init, dtype=np.int32),
        )
        return Dfa(k - 1, dtrans, dfinals.astype(bool), 0).minimize()

    def add_track(self, position: int) -> "Dfa":
        """Inverse image under deleting the track at `position`."""
        if not (0 <= position <= self.arity):
            raise ContractError(f"cannot insert a track at {position}")
        k = self.arity + 1
        bit = k - 1 - position
        nsyms = np.arange(1 << k, dtype=np.int64)
        colmap = ((nsyms >> (bit + 1)) << bit) | (nsyms & ((1 << bit) - 1))
        return Dfa(k, self.trans[:, colmap], self.finals, self.initial).minimize()

    def permute_tracks(self, perm: Sequence[int]) -> "Dfa":
        """Move the value read on track t to track perm[t]."""
        if sorted(perm) != list(range(self.arity)):
            raise ContractError(f"{perm!r} is not a track permutation")
        k = self.arity
        nsyms = np.arange(1 << k, dtype=np.int64)
        colmap = np.zeros_like(nsyms)
        for t in range(k):
            bit_new = k - 1 - perm[t]
            bit_old = k - 1 - t
            colmap |= ((nsyms >> bit_new) & 1) << bit_old
        return Dfa(k, self.trans[:, colmap], self.finals, self.initial).minimize()

    def remap_tracks(self, assignment: Sequence[int], new_arity: int) -> "Dfa":
        """Reread track t of self from track assignment[t] of a wider word.

        Generalizes permutation: several of self's tracks may read the same
        source track (gluing), and the result has `new_arity` tracks.  Used
        by the compiler for variable alignment and repeated call arguments.
        """
        if len(assignment) != self.arity:
            raise ContractError("one source track per existing track required")
        if any(not 0 <= a < new_arity for a in assignment):
            raise ContractError("track assignment out of range")
        nsyms = np.arange(1 << new_arity, dtype=np.int64)
        colmap = np.zeros_like(nsyms)
        for t, src in enumerate(assignment):
            bit_new = new_arity - 1 - src
            bit_old = self.arity - 1 - t
            colmap |= ((nsyms >> bit_new) & 1) << bit_old
        return Dfa(
            new_arity, self.trans[:, colmap], self.finals, self.initial
        ).minimize()

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        """Bit-exact text form (see the package README for the grammar)."""
        lines = [
            f"arity {self.arity}",
            f"states {self.n_states}",
            f"initial {self.initial}",
            "finals " + " ".join(str(i) for i in np.flatnonzero(self.finals)),
        ]
        width = self.arity
        for s in range(self.n_states):
            for a in range(self.n_symbols):
                tup = format(a, f"0{width}b") if width else ""
                lines.append(f"{s} {tup} {int(self.trans[s, a])}")
        return "\n".join(line.rstrip() if width == 0 else line for line in lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Dfa":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        try:
            arity = int(_field(lines[0], "arity"))
            n_states = int(_field(lines[1], "states"))
            initial = int(_field(lines[2], "initial"))
            if not lines[3].startswith("finals"):
                raise MalformedInputError("missing finals line")
            finals = np.zeros(n_states, dtype=bool)
            for tok in lines[3].split()[1:]:
                finals[int(tok)] = True
            trans = np.full((n_states, 1 << arity), -1, dtype=np.int32)
            for ln in lines[4:]:
                parts = ln.split()
                if arity == 0:
                    src, tgt = int(parts[0]), int(parts[1])
                    sym = 0
                else:
                    src, sym, tgt = int(parts[0]), int(parts[1], 2), int(parts[2])
                trans[src, sym] = tgt
        except (IndexError, ValueError) as exc:
            raise MalformedInputError(f"bad automaton text: {exc}") from exc
        if (trans < 0).any():
            raise MalformedInputError("transition table is not total")
        return cls(arity, trans, finals, initial)

    def to_dot(self, name: str = "dfa") -> str:
        """GraphViz rendering; edges group all symbols between a state pair."""
        out = [f"digraph {name} {{", "  rankdir=LR;", '  init [shape=point, label=""];']
        for s in range(self.n_states):
            shape = "doublecircle" if self.finals[s] else "circle"
            out.append(f"  q{s} [shape={shape}, label=\"{s}\"];")
        out.append(f"  init -> q{self.initial};")
        width = self.arity
        for s in range(self.n_states):
            groups: dict[int, list[str]] = {}
            for a in range(self.n_symbols):
                tup = format(a, f"0{width}b") if width else "()"
                groups.setdefault(int(self.trans[s, a]), []).append(tup)
            for tgt in sorted(groups):
                label = ",".join(groups[tgt])
                out.append(f"  q{s} -> q{tgt} [label=\"{label}\"];")
        out.append("}")
        return "\n".join(out) + "\n"


def _field(line: str, key: str) -> str:
    parts = line.split()
    if len(parts) != 2 or parts[0] != key:
        raise MalformedInputError(f"expected '{key} <value>', got {line!r}")
    return parts[1]


def _reachable(trans: np.ndarray, initial: int) -> np.ndarray:
    """Reachable states in BFS discovery order (frontier-major, symbol asc)."""
    seen = np.zeros(trans.shape[0], dtype=bool)
    seen[initial] = True
    order = [initial]
    frontier = np.asarray([initial])
    while frontier.size:
        succ = trans[frontier].ravel()
        uniq, first = np.unique(succ, return_index=True)
        uniq = uniq[np.argsort(first)]
        new = uniq[~seen[uniq]]
        seen[new] = True
        order.extend(int(s) for s in new)
        frontier = new
    return np.asarray(order, dtype=np.int64)


def _renumber(arity: int, trans: np.ndarray, finals: np.ndarray, initial: int) -> Dfa:
    """Canonical BFS renumbering; assumes every state is reachable."""
    order = _reachable(trans, initial)
    perm = np.empty(trans.shape[0], dtype=np.int32)
    perm[order] = np.arange(len(order), dtype=np.int32)
    new_trans = perm[trans[order]]
    new_finals = finals[order]
    return Dfa(arity, new_trans, new_finals, 0)


def _zero_closure(choices: np.ndarray, initial: int) -> list[int]:
    """States reachable from `initial` by any number of all-zero inputs.

    The deleted track is free, so "all zero" means the projected symbol 0
    with either bit on the removed track.
    """
    seen = {int(initial)}
    stack = [int(initial)]
    while stack:
        s = stack.pop()
        for t in choices[s, 0, :]:
            t = int(t)
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return sorted(seen)


def product(
    a: Dfa,
    b: Dfa,
    op: Callable[[bool, bool], bool],
    align_a: Sequence[int] | None = None,
    align_b: Sequence[int] | None = None,
) -> Dfa:
    """Boolean combination of two automata with track alignment.

    `align_x[t]` names the output track read by operand track t; the map
    must be injective per operand and the two images together must cover
    the output tracks exactly.  With no alignment given, both operands are
    taken track-for-track and must agree on arity.
    """
    if align_a is None and align_b is None:
        if a.arity != b.arity:
            raise ContractError("arity mismatch and no alignment given")
        align_a = list(range(a.arity))
        align_b = list(range(b.arity))
    align_a = list(align_a if align_a is not None else range(a.arity))
    align_b = list(align_b if align_b is not None else range(b.arity))
    if len(align_a) != a.arity or len(align_b) != b.arity:
        raise ContractError("alignment length must match operand arity")
    if len(set(align_a)) != len(align_a) or len(set(align_b)) != len(align_b):
        raise ContractError("alignment must be injective per operand")
    targets = set(align_a) | set(align_b)
    k = len(targets)
    if targets != set(range(k)):
        raise ContractError("aligned tracks must cover 0..k-1 exactly")
    ta = a.remap_tracks(align_a, k) if align_a != list(range(k)) or a.arity != k else a
    tb = b.remap_tracks(align_b, k) if align_b != list(range(k)) or b.arity != k else b
    table = np.asarray(
        [op(False, False), op(False, True), op(True, False), op(True, True)],
        dtype=np.uint8,
    )
    trans, finals = kernel.product(
        ta.trans,
        ta.finals.astype(np.uint8),
        tb.trans,
        tb.finals.astype(np.uint8),
        ta.initial,
        tb.initial,
        table,
    )
    return Dfa(k, trans, finals.astype(bool), 0).minimize()


def equivalent(a: Dfa, b: Dfa) -> bool:
    """True iff both automata accept the same language."""
    if a.arity != b.arity:
        raise ContractError("cannot compare automata of different arity")
    return a.minimize().identical(b.minimize())


def leading_zero_invariant(a: Dfa) -> bool:
    """Exact check: acceptance is unchanged by a prepended all-zero symbol."""
    shifted = Dfa(a.arity, a.trans, a.finals, int(a.trans[a.initial, 0]))
    return equivalent(a, shifted)


def track_no11(arity: int, track: int) -> Dfa:
    """Accepts words whose given track never carries two adjacent 1 bits."""
    if not (0 <= track < arity):
        raise ContractError(f"track {track} out of range")
    bit = arity - 1 - track
    nsyms = 1 << arity
    trans = np.zeros((3, nsyms), dtype=np.int32)
    for a in range(nsyms):
        one = (a >> bit) & 1
        trans[0, a] = 1 if one else 0
        trans[1, a] = 2 if one else 0
        trans[2, a] = 2
    finals = np.array([True, True, False])
    return Dfa(arity, trans, finals, 0).minimize()


def validity(arity: int) -> Dfa:
    """Conjunction of track_no11 over all tracks."""
    if arity == 0:
        return Dfa(0, np.zeros((1, 1), dtype=np.int32), np.array([True]), 0)
    acc = track_no11(arity, 0)
    for t in range(1, arity):
        acc = product(acc, track_no11(arity, t), lambda x, y: x and y)
    return acc


def enumerate_accepted(a: Dfa, max_len: int) -> list[tuple[int, ...]]:
    """Accepted integer tuples whose padded encodings fit in max_len digits.

    Enumerates accepted valid words of length exactly max_len (leading-zero
    invariance makes that exhaustive for all shorter tuples) and returns the
    decoded tuples sorted lexicographically.
    """
    if a.arity == 0:
        return [()] if a.finals[a.initial] else []
    g = product(a, validity(a.arity), lambda x, y: x and y)
    viable = np.zeros((max_len + 1, g.n_states), dtype=bool)
    viable[0] = g.finals
    for j in range(1, max_len + 1):
        viable[j] = viable[j - 1][g.trans].any(axis=1)
    out: list[tuple[int, ...]] = []
    k = a.arity
    word: list[int] = []

    def walk(state: int, depth: int) -> None:
        if depth == 0:
            if g.finals[state]:
                out.append(_decode_word(word, k))
            return
        row = g.trans[state]
        for sym in range(g.n_symbols):
            if viable[depth - 1][row[sym]]:
                word.append(sym)
                walk(int(row[sym]), depth - 1)
                word.pop()

    walk(g.initial, max_len)
    return sorted(out)


def _decode_word(word: Sequence[int], arity: int) -> tuple[int, ...]:
    vals = []
    for t in range(arity):
        bit = arity - 1 - t
        vals.append(decode("".join(str((sym >> bit) & 1) for sym in word)))
    return tuple(vals)


def pack_values(values: Sequence[int]) -> list[int]:
    """Symbol word for a tuple of naturals (canonical, zero padded)."""
    for v in values:
        if v < 0:
            raise ContractError("inputs must be natural numbers")
    words = [encode(v) for v in values]
    width = max((len(w) for w in words), default=0)
    words = [w.zfill(width) for w in words]
    k = len(values)
    return [
        sum(int(words[t][i]) << (k - 1 - t) for t in range(k))
        for i in range(width)
    ]


def digit_matrix(values: Sequence[int], length: int | None = None) -> np.ndarray:
    """uint8 matrix of zero-padded canonical digits, one row per value."""
    words = [encode(int(v)) for v in values]
    width = max((len(w) for w in words), default=0)
    if length is not None:
        if length < width:
            raise ContractError(f"length {length} too short for {width} digits")
        width = length
    out = np.zeros((len(words), width), dtype=np.uint8)
    for i, w in enumerate(words):
        pad = width - len(w)
        for j, ch in enumerate(w):
            out[i, pad + j] = ch == "1"
    return out


def run_batch(a: Dfa, tracks: Sequence[np.ndarray]) -> np.ndarray:
    """Vectorized acceptance for many tuples at once.

    `tracks[t]` is an (N, L) uint8 digit matrix for track t; all tracks
    must share the same shape.
    """
    if len(tracks) != a.arity:
        raise ContractError(f"expected {a.arity} digit matrices")
    n, width = tracks[0].shape
    syms = np.zeros((n, width), dtype=np.int64)
    for t, mat in enumerate(tracks):
        if mat.shape != (n, width):
            raise ContractError("all digit matrices must share a shape")
        syms |= mat.astype(np.int64) << (a.arity - 1 - t)
    states = np.full(n, a.initial, dtype=np.int64)
    for j in range(width):
        states = a.trans[states, syms[:, j]]
    return a.finals[states]
