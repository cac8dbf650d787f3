"""Bounded Myhill-Nerode automaton synthesis from membership oracles.

Two tuple words are deemed equivalent when the oracle gives the same answer
on every extension of length at most k; the guessed automaton is built out
of those classes, transitions defined by representative extension.  Run for
increasing k: when the class count stops changing and the class automata
agree, the stabilized candidate is reported.

Answers are three-valued: accept, reject, or unknown (outside the oracle's
trust envelope).  With a total envelope, classes are matched by hashing full
signatures.  With a bounded envelope, unknown entries act as wildcards: a
candidate joins the first class whose representative signature conflicts
with it nowhere both are known, and the report counts how many of those
decisions touched a wildcard.

Oracles answer on decoded track values.  Appending a digit d to a word with
value v and shifted value s (same digits, weights one Fibonacci index up)
gives value s + d and shifted value s + v + 2d, so whole extension trees
are evaluated with vectorized integer arithmetic and exact values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dfa import Dfa
from .errors import ContractError, GuessError

ACCEPT = np.int8(1)
REJECT = np.int8(0)
UNKNOWN = np.int8(2)


class MembershipOracle:
    """Total membership predicate over tuple words, with a trust envelope.

    Subclasses implement `classify(values, invalid)`, mapping per-track
    value arrays (and a flag marking words with a "11" factor on some
    track) to int8 answers.  `trusted_everywhere` distinguishes oracles
    that never answer UNKNOWN.
    """

    arity: int
    name = "oracle"
    trusted_everywhere = True

    def classify(self, values: tuple[np.ndarray, ...], invalid: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class PredicateOracle(MembershipOracle):
    """Oracle from a vectorized predicate on decoded integer values.

    With reject_invalid (the automata convention for integer relations),
    words carrying a "11" factor on any track are rejected outright.
    """

    def __init__(self, arity, predicate, name="predicate", reject_invalid=True):
        self.arity = arity
        self.predicate = predicate
        self.name = name
        self.reject_invalid = reject_invalid

    def classify(self, values, invalid):
        ans = np.asarray(self.predicate(*values), dtype=bool).astype(np.int8)
        if self.reject_invalid:
            ans[invalid] = REJECT
        return ans


@dataclass(frozen=True)
class GuessReport:
    """Outcome of a guessing run across the configured depth schedule."""

    depths: tuple[int, ...]
    state_counts: tuple[int, ...]
    stabilized: bool
    candidate: Dfa
    envelope_limited: int
    prefix_bound: int
    oracle_name: str

    def summary_text(self) -> str:
        lines = [
            f"oracle {self.oracle_name}",
            f"prefix_bound {self.prefix_bound}",
            "depths " + " ".join(str(d) for d in self.depths),
            "class_counts " + " ".join(str(c) for c in self.state_counts),
            f"stabilized {'yes' if self.stabilized else 'no'}",
            f"envelope_limited {self.envelope_limited}",
            f"candidate_states {self.candidate.n_states}",
        ]
        return "\n".join(lines) + "\n"


class _TrackState:
    """Exact per-track decode state of one word: value, shifted value,
    last digit, and whether a "11" factor has occurred."""

    __slots__ = ("v", "s", "last", "bad")

    def __init__(self, arity):
        self.v = (0,) * arity
        self.s = (0,) * arity
        self.last = (0,) * arity
        self.bad = (False,) * arity

    def child(self, sym, arity):
        out = _TrackState.__new__(_TrackState)
        bits = tuple((sym >> (arity - 1 - t)) & 1 for t in range(arity))
        out.v = tuple(s + b for s, b in zip(self.s, bits))
        out.s = tuple(s + v + 2 * b for s, v, b in zip(self.s, self.v, bits))
        out.bad = tuple(bd or (lb and b) for bd, lb, b in zip(self.bad, self.last, bits))
        out.last = bits
        return out


class _Expander:
    """Vectorized evaluation of all extensions of a word up to a depth."""

    def __init__(self, oracle: MembershipOracle, depth: int):
        self.oracle = oracle
        self.depth = depth
        self.arity = oracle.arity
        n_syms = 1 << self.arity
        syms = np.arange(n_syms, dtype=np.int64)
        self.bits = [
            ((syms >> (self.arity - 1 - t)) & 1).astype(np.int64)
            for t in range(self.arity)
        ]
        self.n_syms = n_syms

    def signature(self, st: _TrackState) -> list[np.ndarray]:
        k = self.arity
        v = [np.asarray([st.v[t]], dtype=np.int64) for t in range(k)]
        s = [np.asarray([st.s[t]], dtype=np.int64) for t in range(k)]
        last = [np.asarray([st.last[t]], dtype=np.int64) for t in range(k)]
        bad = [np.asarray([st.bad[t]], dtype=bool) for t in range(k)]
        parts = [self._classify(v, bad)]
        a = self.n_syms
        for _ in range(self.depth):
            nv, ns, nlast, nbad = [], [], [], []
            for t in range(k):
                bit = np.tile(self.bits[t], v[t].shape[0])
                sv = np.repeat(s[t], a)
                vv = np.repeat(v[t], a)
                nv.append(sv + bit)
                ns.append(sv + vv + 2 * bit)
                nbad.append(np.repeat(bad[t], a) | ((np.repeat(last[t], a) & bit) > 0))
                nlast.append(bit)
            v, s, last, bad = nv, ns, nlast, nbad
            parts.append(self._classify(v, bad))
        return parts

    def _classify(self, values, bad):
        invalid = bad[0].copy()
        for t in range(1, self.arity):
            invalid |= bad[t]
        return self.oracle.classify(tuple(values), invalid)


def _conflicts(sig_a, sig_b) -> bool:
    for pa, pb in zip(sig_a, sig_b):
        if np.any((pa != pb) & (pa != UNKNOWN) & (pb != UNKNOWN)):
            return True
    return False


def _has_unknown(sig) -> bool:
    return any(bool(np.any(p == UNKNOWN)) for p in sig)


def _sig_bytes(sig) -> bytes:
    return b"".join(p.tobytes() for p in sig)


def _classes_at_depth(oracle: MembershipOracle, prefix_bound: int, depth: int):
    """One bounded-equivalence pass: (raw class automaton, limited count)."""
    arity = oracle.arity
    n_syms = 1 << arity
    exp = _Expander(oracle, depth)
    root = _TrackState(arity)
    root_sig = exp.signature(root)

    words: list[tuple[int, ...]] = [()]
    states: list[_TrackState] = [root]
    sigs: list[list[np.ndarray]] = [root_sig]
    by_hash: dict[bytes, int] | None = {_sig_bytes(root_sig): 0} if oracle.trusted_everywhere else None
    limited = 1 if _has_unknown(root_sig) else 0

    trans_rows: list[list[int]] = []
    head = 0
    while head < len(words):
        word = words[head]
        st = states[head]
        row = []
        for a in range(n_syms):
            cst = st.child(a, arity)
            csig = exp.signature(cst)
            if by_hash is not None:
                idx = by_hash.get(_sig_bytes(csig))
            else:
                idx = None
                for j, rsig in enumerate(sigs):
                    if not _conflicts(csig, rsig):
                        idx = j
                        break
            if idx is None:
                if len(word) + 1 > prefix_bound:
                    raise GuessError(
                        "prefix bound too small to classify "
                        f"{word + (a,)} at depth {depth}"
                    )
                idx = len(words)
                words.append(word + (a,))
                states.append(cst)
                sigs.append(csig)
                if by_hash is not None:
                    by_hash[_sig_bytes(csig)] = idx
                if _has_unknown(csig):
                    limited += 1
            row.append(idx)
        trans_rows.append(row)
        head += 1

    finals = np.asarray([sig[0][0] == ACCEPT for sig in sigs], dtype=bool)
    trans = np.asarray(trans_rows, dtype=np.int32)
    return Dfa(arity, trans, finals, 0), limited


def guess(oracle: MembershipOracle, prefix_bound: int, depths) -> GuessReport:
    """Run the bounded-equivalence construction over a depth schedule."""
    depths = tuple(depths)
    if not depths or list(depths) != sorted(set(depths)):
        raise ContractError("depths must be a nonempty increasing sequence")
    raws = []
    counts = []
    limited = 0
    for k in depths:
        raw, lim = _classes_at_depth(oracle, prefix_bound, k)
        raws.append(raw)
        counts.append(raw.n_states)
        limited = lim
    stabilized = (
        len(raws) >= 2
        and counts[-1] == counts[-2]
        and raws[-1].to_text() == raws[-2].to_text()
    )
    candidate = raws[-1].minimize()
    return GuessReport(
        depths=depths,
        state_counts=tuple(counts),
        stabilized=stabilized,
        candidate=candidate,
        envelope_limited=limited,
        prefix_bound=prefix_bound,
        oracle_name=oracle.name,
    )


def verify_function(store, name: str, input_tracks, output_tracks) -> bool:
    """Engine check that a stored automaton is a function of its inputs.

    Evaluates totality ("every input tuple has an output") and uniqueness
    ("two accepted outputs coincide") and returns their conjunction.
    """
    from . import logic  # runtime import; logic depends on this module's users

    _, names = store.get(name)
    ins = [names[i] for i in input_tracks]
    outs = [names[i] for i in output_tracks]
    if len(outs) != 1:
        raise ContractError("verify_function expects exactly one output track")
    out = outs[0]
    o1, o2 = out + "1", out + "2"
    while o1 in names or o2 in names:
        o1 += "x"
        o2 += "x"
    args = ",".join(names)
    args1 = ",".join(o1 if v == out else v for v in names)
    args2 = ",".join(o2 if v == out else v for v in names)
    allins = ",".join(ins)
    exist = f"?msd_fib A{allins} E{out} ${name}({args})"
    uniq = (
        f"?msd_fib A{allins},{o1},{o2} "
        f"(${name}({args1}) & ${name}({args2})) => {o1}={o2}"
    )
    return logic.eval_formula_src(exist, store) and logic.eval_formula_src(uniq, store)
