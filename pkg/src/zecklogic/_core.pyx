# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled automaton kernels.

Mirrors zecklogic._core_py: refine (Hopcroft), product (reachable pairs),
determinize (subset construction).  Result state ids follow BFS discovery
order from the initial configuration, matching the fallback bit for bit.
"""

import numpy as np

cimport cython
from libc.string cimport memset


def refine(trans_obj, finals_obj):
    """Hopcroft partition refinement on a complete DFA."""
    cdef const int[:, ::1] trans = np.ascontiguousarray(trans_obj, dtype=np.intc)
    cdef const unsigned char[::1] finals = np.ascontiguousarray(finals_obj, dtype=np.uint8)
    cdef Py_ssize_t S = trans.shape[0]
    cdef Py_ssize_t A = trans.shape[1]
    cdef Py_ssize_t s, a, i, j, t, y, z, m, cnt, src, tgt

    labels_arr = np.zeros(S, dtype=np.int64)
    cdef long long[::1] labels = labels_arr
    if S == 0:
        return labels_arr

    # Inverse transitions, CSR grouped by (symbol, target).
    inv_off_arr = np.zeros(S * A + 1, dtype=np.int64)
    cdef long long[::1] inv_off = inv_off_arr
    cdef int[::1] inv = np.empty(S * A, dtype=np.intc)
    for s in range(S):
        for a in range(A):
            inv_off[a * S + trans[s, a] + 1] += 1
    for i in range(1, S * A + 1):
        inv_off[i] += inv_off[i - 1]
    fill_arr = np.asarray(inv_off_arr[:-1]).copy()
    cdef long long[::1] fill = fill_arr
    for s in range(S):
        for a in range(A):
            t = a * S + trans[s, a]
            inv[fill[t]] = <int> s
            fill[t] += 1

    # Partition bookkeeping.
    cdef int[::1] blk = np.zeros(S, dtype=np.intc)
    cdef int[::1] elems = np.empty(S, dtype=np.intc)
    cdef int[::1] pos = np.empty(S, dtype=np.intc)
    cdef int[::1] first = np.zeros(S + 1, dtype=np.intc)
    cdef int[::1] size = np.zeros(S + 1, dtype=np.intc)
    cdef int[::1] touched_cnt = np.zeros(S + 1, dtype=np.intc)
    cdef unsigned char[::1] inw = np.zeros((S + 1) * A, dtype=np.uint8)
    cdef int[::1] buf = np.empty(S, dtype=np.intc)
    cdef int[::1] touched = np.empty(S + 1, dtype=np.intc)

    cdef Py_ssize_t n_final = 0
    for s in range(S):
        if finals[s]:
            n_final += 1
    cdef Py_ssize_t nblocks
    if n_final == 0 or n_final == S:
        nblocks = 1
        for s in range(S):
            blk[s] = 0
            elems[s] = <int> s
            pos[s] = <int> s
        first[0] = 0
        size[0] = <int> S
    else:
        nblocks = 2
        i = 0
        j = n_final
        for s in range(S):
            if finals[s]:
                blk[s] = 0
                elems[i] = <int> s
                pos[s] = <int> i
                i += 1
            else:
                blk[s] = 1
                elems[j] = <int> s
                pos[s] = <int> j
                j += 1
        first[0] = 0
        size[0] = <int> n_final
        first[1] = <int> n_final
        size[1] = <int> (S - n_final)

    work = []
    cdef Py_ssize_t small = 0
    if nblocks == 2 and size[1] < size[0]:
        small = 1
    for a in range(A):
        work.append(small * A + a)
        inw[small * A + a] = 1

    cdef Py_ssize_t wb, wa, code, n_touched, ny, nz
    while work:
        code = work.pop()
        wb = code // A
        wa = code - wb * A
        inw[code] = 0
        # Gather the a-preimage of block wb (no duplicates: trans is a map).
        cnt = 0
        for i in range(first[wb], first[wb] + size[wb]):
            tgt = elems[i]
            for j in range(inv_off[wa * S + tgt], inv_off[wa * S + tgt + 1]):
                buf[cnt] = inv[j]
                cnt += 1
        n_touched = 0
        for i in range(cnt):
            src = buf[i]
            y = blk[src]
            if touched_cnt[y] == 0:
                touched[n_touched] = <int> y
                n_touched += 1
            # Swap src into the marked prefix of its block.
            m = first[y] + touched_cnt[y]
            j = pos[src]
            if j != m:
                z = elems[m]
                elems[m] = <int> src
                elems[j] = z
                pos[src] = <int> m
                pos[z] = <int> j
            touched_cnt[y] += 1
        for i in range(n_touched):
            y = touched[i]
            cnt = touched_cnt[y]
            touched_cnt[y] = 0
            if cnt == size[y]:
                continue
            # Split: new block nz takes the marked prefix.
            nz = nblocks
            nblocks += 1
            first[nz] = first[y]
            size[nz] = <int> cnt
            first[y] = <int> (first[y] + cnt)
            size[y] = <int> (size[y] - cnt)
            for j in range(first[nz], first[nz] + cnt):
                blk[elems[j]] = <int> nz
            for a in range(A):
                if inw[y * A + a]:
                    work.append(nz * A + a)
                    inw[nz * A + a] = 1
                elif size[nz] <= size[y]:
                    work.append(nz * A + a)
                    inw[nz * A + a] = 1
                else:
                    work.append(y * A + a)
                    inw[y * A + a] = 1

    for s in range(S):
        labels[s] = blk[s]
    return labels_arr


def product(ta_obj, fa_obj, tb_obj, fb_obj, ia, ib, op_obj):
    """Reachable product automaton; returns (trans, finals)."""
    cdef const int[:, ::1] ta = np.ascontiguousarray(ta_obj, dtype=np.intc)
    cdef const int[:, ::1] tb = np.ascontiguousarray(tb_obj, dtype=np.intc)
    cdef const unsigned char[::1] fa = np.ascontiguousarray(fa_obj, dtype=np.uint8)
    cdef const unsigned char[::1] fb = np.ascontiguousarray(fb_obj, dtype=np.uint8)
    cdef const unsigned char[::1] op = np.ascontiguousarray(op_obj, dtype=np.uint8)
    cdef Py_ssize_t A = ta.shape[1]
    cdef Py_ssize_t nb = tb.shape[0]

    cdef Py_ssize_t cap = 256
    pair_a_arr = np.empty(cap, dtype=np.intc)
    pair_b_arr = np.empty(cap, dtype=np.intc)
    cdef int[::1] pair_a = pair_a_arr
    cdef int[::1] pair_b = pair_b_arr

    cdef dict ids = {}
    cdef Py_ssize_t n = 1, head = 0, sa, sb, idx
    cdef long long code
    pair_a[0] = <int> ia
    pair_b[0] = <int> ib
    ids[<long long> ia * nb + <long long> ib] = 0

    rows = []
    cdef int[::1] row
    while head < n:
        sa = pair_a[head]
        sb = pair_b[head]
        head += 1
        row_arr = np.empty(A, dtype=np.intc)
        row = row_arr
        for a in range(A):
            code = <long long> ta[sa, a] * nb + tb[sb, a]
            val = ids.get(code)
            if val is None:
                idx = n
                ids[code] = idx
                if n == cap:
                    cap *= 2
                    pair_a_arr = np.resize(pair_a_arr, cap)
                    pair_b_arr = np.resize(pair_b_arr, cap)
                    pair_a = pair_a_arr
                    pair_b = pair_b_arr
                pair_a[n] = <int> (code // nb)
                pair_b[n] = <int> (code % nb)
                n += 1
            else:
                idx = <Py_ssize_t> val
            row[a] = <int> idx
        rows.append(row_arr)

    trans = np.vstack(rows).astype(np.int32, copy=False)
    finals_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] finals = finals_arr
    for head in range(n):
        finals[head] = op[fa[pair_a[head]] * 2 + fb[pair_b[head]]]
    return trans, finals_arr


def determinize(choices_obj, finals_obj, init_obj):
    """Subset construction; returns (trans, finals) of the DFA."""
    cdef const int[:, :, ::1] choices = np.ascontiguousarray(choices_obj, dtype=np.intc)
    cdef const unsigned char[::1] nfinals = np.ascontiguousarray(finals_obj, dtype=np.uint8)
    cdef Py_ssize_t S = choices.shape[0]
    cdef Py_ssize_t A = choices.shape[1]
    cdef Py_ssize_t C = choices.shape[2]
    cdef Py_ssize_t i, j, a, m, t, cnt

    init_arr = np.unique(np.asarray(init_obj, dtype=np.intc))
    cdef dict ids = {init_arr.tobytes(): 0}
    subsets = [init_arr]
    trans_rows = []
    final_flags = []

    flag_arr = np.zeros(S, dtype=np.uint8)
    cdef unsigned char[::1] flag = flag_arr
    buf_arr = np.empty(S, dtype=np.intc)
    cdef int[::1] buf = buf_arr
    cdef const int[::1] cur
    cdef int[::1] row
    cdef Py_ssize_t head = 0
    cdef bint isfinal

    while head < len(subsets):
        cur = subsets[head]
        head += 1
        isfinal = False
        for i in range(cur.shape[0]):
            if nfinals[cur[i]]:
                isfinal = True
                break
        final_flags.append(1 if isfinal else 0)
        row_arr = np.empty(A, dtype=np.intc)
        row = row_arr
        for a in range(A):
            cnt = 0
            for i in range(cur.shape[0]):
                m = cur[i]
                for j in range(C):
                    t = choices[m, a, j]
                    if not flag[t]:
                        flag[t] = 1
                        buf[cnt] = <int> t
                        cnt += 1
            # Sorted member list gives a canonical dictionary key.
            _insertion_sort(buf, cnt)
            for i in range(cnt):
                flag[buf[i]] = 0
            key = buf_arr[:cnt].tobytes()
            val = ids.get(key)
            if val is None:
                val = len(subsets)
                ids[key] = val
                subsets.append(buf_arr[:cnt].copy())
            row[a] = <int> val
        trans_rows.append(row_arr)

    trans = np.vstack(trans_rows).astype(np.int32, copy=False)
    return trans, np.asarray(final_flags, dtype=np.uint8)


@cython.boundscheck(False)
@cython.wraparound(False)
cdef inline void _insertion_sort(int[::1] buf, Py_ssize_t cnt) noexcept:
    cdef Py_ssize_t i, j
    cdef int v
    for i in range(1, cnt):
        v = buf[i]
        j = i - 1
        while j >= 0 and buf[j] > v:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = v
