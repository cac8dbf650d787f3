"""Pure-Python/numpy fallback for the hot automaton kernels.

Same contracts as the compiled module `zecklogic._core`:

- refine(trans, finals): block label per state of the coarsest
  forward-stable partition refining the finals split (Moore refinement,
  vectorized one round at a time).
- product(ta, fa, tb, fb, ia, ib, op_table): reachable pairwise product;
  acceptance is op_table[fa*2 + fb].
- determinize(choices, finals, init): subset construction over an NFA whose
  transition relation lists, per state and symbol, a fixed number of
  alternative targets (axis 2 of `choices`).

State ids in all results are in BFS discovery order from the initial state,
which callers rely on for canonical numbering.
"""

from __future__ import annotations

import numpy as np


def refine(trans: np.ndarray, finals: np.ndarray) -> np.ndarray:
    """Labels of the Nerode-stable partition of a complete DFA."""
    n_states = trans.shape[0]
    labels = finals.astype(np.int64)
    n_blocks = len(np.unique(labels))
    while True:
        sig = np.empty((n_states, trans.shape[1] + 1), dtype=np.int64)
        sig[:, 0] = labels
        sig[:, 1:] = labels[trans]
        _, labels = np.unique(sig, axis=0, return_inverse=True)
        labels = labels.reshape(-1)
        new_blocks = int(labels.max()) + 1 if n_states else 0
        if new_blocks == n_blocks:
            return labels.astype(np.int64)
        n_blocks = new_blocks


def product(ta, fa, tb, fb, ia, ib, op_table):
    """Reachable product automaton; returns (trans, finals)."""
    nb = tb.shape[0]
    n_syms = ta.shape[1]
    code0 = int(ia) * nb + int(ib)
    ids = {code0: 0}
    order = [code0]
    rows = []
    head = 0
    while head < len(order):
        chunk = np.asarray(order[head:], dtype=np.int64)
        head = len(order)
        sa, sb = chunk // nb, chunk % nb
        succ = ta[sa].astype(np.int64) * nb + tb[sb]
        for row in succ:
            out = np.empty(n_syms, dtype=np.int64)
            for j in range(n_syms):
                code = int(row[j])
                idx = ids.get(code)
                if idx is None:
                    idx = len(order)
                    ids[code] = idx
                    order.append(code)
                out[j] = idx
            rows.append(out)
    codes = np.asarray(order, dtype=np.int64)
    trans = np.vstack(rows).astype(np.int32)
    fa_part = fa[codes // nb].astype(bool)
    fb_part = fb[codes % nb].astype(bool)
    finals = op_table[fa_part.astype(np.int64) * 2 + fb_part.astype(np.int64)]
    return trans, finals.astype(np.uint8)


def determinize(choices, finals, init):
    """Subset construction; returns (trans, finals) of the DFA."""
    n_syms = choices.shape[1]
    init_set = np.unique(np.asarray(init, dtype=np.int32))
    subsets = [init_set]
    ids = {init_set.tobytes(): 0}
    trans_rows = []
    final_flags = []
    head = 0
    while head < len(subsets):
        cur = subsets[head]
        head += 1
        final_flags.append(1 if finals[cur].any() else 0)
        row = np.empty(n_syms, dtype=np.int32)
        for a in range(n_syms):
            tgt = np.unique(choices[cur, a, :])
            key = tgt.tobytes()
            idx = ids.get(key)
            if idx is None:
                idx = len(subsets)
                ids[key] = idx
                subsets.append(tgt)
            row[a] = idx
        trans_rows.append(row)
    return np.vstack(trans_rows), np.asarray(final_flags, dtype=np.uint8)
