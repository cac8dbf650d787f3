"""Exact simulator of the Hurt-Sada array and its derived sequences.

Row 0 of the array is the identity on the naturals.  Row n is obtained from
row n-1 by removing the unique occurrence of the value n and reinserting it
n columns to the right; the n values jumped over each shift one column left.

Each row is stored as "identity outside a bounded window": a start column
plus the explicit values inside the window.  A step costs O(window), and the
window grows linearly, so reaching row n costs O(n^2) -- ample at the scales
used here.  Every sequence defined on the array (p, s, t, d, d', b, c and the
antidiagonal statistics r, h, h') is read off the simulated rows; nothing is
taken from closed forms.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .errors import ContractError

SEQUENCE_NAMES = ("p", "s", "t", "d", "dp", "b", "c", "r", "h", "hp")


def _advance(start: int, win, m: int):
    """Window for row m from the row m-1 window (start, win)."""
    vals = win.tolist() if isinstance(win, np.ndarray) else list(win)
    size = len(vals)
    if size:
        try:
            pos = start + vals.index(m)
        except ValueError:
            pos = m
    else:
        start = m
        pos = m
    lo = min(start, pos)
    hi = max(start + size, pos + m + 1)
    buf = list(range(lo, start)) + vals + list(range(start + size, hi))
    del buf[pos - lo]
    buf.insert(pos + m - lo, m)
    head = 0
    while head < len(buf) and buf[head] == lo + head:
        head += 1
    tail = len(buf)
    while tail > head and buf[tail - 1] == lo + tail - 1:
        tail -= 1
    return lo + head, buf[head:tail]


def _peek(start: int, win, k: int) -> int:
    """Array entry at column k of a row given by its window."""
    idx = k - start
    if 0 <= idx < len(win):
        return int(win[idx])
    return k


class HurtSada:
    """Incrementally simulated array with cached rows.

    Rows are materialized in order; random access to entry(n, k) triggers
    simulation up to row n.  Cached windows are numpy arrays to keep the
    memory footprint linear in the total window size.
    """

    def __init__(self):
        self._starts = [0]
        self._wins = [np.empty(0, dtype=np.int64)]

    @property
    def rows_cached(self) -> int:
        return len(self._wins)

    def _grow(self, n: int) -> None:
        while len(self._wins) <= n:
            m = len(self._wins)
            start, win = _advance(self._starts[-1], self._wins[-1], m)
            self._starts.append(start)
            self._wins.append(np.asarray(win, dtype=np.int64))

    def window(self, n: int):
        """(start, values) of row n: identity holds outside the window."""
        self._grow(n)
        return self._starts[n], self._wins[n]

    def entry(self, n: int, k: int) -> int:
        """A[n, k]."""
        if n < 0 or k < 0:
            raise ContractError("array indices are non-negative")
        self._grow(n)
        return _peek(self._starts[n], self._wins[n], k)

    def row(self, n: int, width: int) -> list[int]:
        """First `width` entries of row n."""
        self._grow(n)
        start, win = self._starts[n], self._wins[n]
        return [_peek(start, win, k) for k in range(width)]

    def membership(self, x: int, y: int, z: int) -> bool:
        """True iff A[x, y] = z."""
        return self.entry(x, y) == z

    def table(self, rows: int, cols: int) -> np.ndarray:
        """Dense int64 array of A[0..rows-1, 0..cols-1]."""
        out = np.empty((rows, cols), dtype=np.int64)
        base = np.arange(cols, dtype=np.int64)
        for n in range(rows):
            start, win = self.window(n)
            out[n] = base
            if win.size:
                a = max(start, 0)
                b = min(start + win.size, cols)
                if a < b:
                    out[n, a:b] = win[a - start : b - start]
        return out

    # -- sequences read off the rows --------------------------------------

    def p(self, n: int) -> int:
        """Position of n in row n-1; 0 at n = 0 by convention.  A060143"""
        if n == 0:
            return 0
        self._grow(n - 1)
        start, win = self._starts[n - 1], self._wins[n - 1]
        idx = np.flatnonzero(win == n)
        return int(start + idx[0]) if idx.size else n

    def s(self, n: int) -> int:
        """First value jumped over: A[n-1, p(n)+1]; 0 at n = 0.  A380079"""
        if n == 0:
            return 0
        return self.entry(n - 1, self.p(n) + 1)

    def t(self, n: int) -> int:
        """Last value jumped over: A[n-1, p(n)+n]; 0 at n = 0.  A022342"""
        if n == 0:
            return 0
        return self.entry(n - 1, self.p(n) + n)

    def d(self, n: int) -> int:
        """Main diagonal A[n, n].  A379739"""
        return self.entry(n, n)

    def dprime(self, n: int) -> int:
        """Superdiagonal A[n-1, n]; 0 at n = 0 by convention.  A368050"""
        if n == 0:
            return 0
        return self.entry(n - 1, n)

    def b(self, n: int) -> int:
        """Last column of the identity prefix of row n (n >= 1)."""
        if n < 1:
            raise ContractError("b(n) requires n >= 1")
        start, win = self.window(n)
        if not win.size:
            raise ContractError(f"row {n} has no displaced values")
        return start - 1

    def c(self, n: int) -> int:
        """First column from which row n is the identity forever (n >= 1)."""
        if n < 1:
            raise ContractError("c(n) requires n >= 1")
        start, win = self.window(n)
        if not win.size:
            raise ContractError(f"row {n} has no displaced values")
        return start + int(win.size)

    # -- antidiagonals -----------------------------------------------------

    def antidiagonal(self, n: int) -> list[int]:
        """[A[0, n], A[1, n-1], ..., A[n, 0]]."""
        self._grow(n)
        return [self.entry(i, n - i) for i in range(n + 1)]

    def _plateau(self, n: int, hint: int):
        """(r, h, hp) of antidiagonal n >= 2 by scanning from a row hint.

        Antidiagonal entries equal n-i outside one run of consecutive rows
        that all carry the same repeated value.  The scan walks forward from
        `hint` (clamped, re-anchored to row 0 if the identity check fails),
        locates the run, and verifies identity at both boundaries.
        """
        self._grow(n)
        i = min(max(hint, 0), n - 1)
        if self.entry(i, n - i) != n - i:
            i = 0
        prev = self.entry(i, n - i)
        if prev != n - i:
            raise ContractError(f"antidiagonal {n} scan anchor is not identity")
        while i < n:
            cur = self.entry(i + 1, n - i - 1)
            if cur == prev:
                h, r = i, prev
            elif cur < prev - 1:
                h, r = i + 1, cur
            else:
                prev = cur
                i += 1
                continue
            hp = i + 1
            while hp < n and self.entry(hp + 1, n - hp - 1) == r:
                hp += 1
            while h >= 1 and self.entry(h - 1, n - h + 1) == r:
                h -= 1
            if hp <= h:
                raise ContractError(f"antidiagonal {n}: value {r} not repeated")
            if h >= 1 and self.entry(h - 1, n - h + 1) != n - h + 1:
                raise ContractError(f"antidiagonal {n}: head is not identity")
            if hp < n and self.entry(hp + 1, n - hp - 1) != n - hp - 1:
                raise ContractError(f"antidiagonal {n}: tail is not identity")
            return r, h, hp
        raise ContractError(f"antidiagonal {n} has no repeated value")

    def r(self, n: int) -> int:
        """Repeated value of antidiagonal n; r(0) = 0, r(1) = 1.  A026272"""
        if n <= 1:
            return n
        return self._plateau(n, 0)[0]

    def h(self, n: int) -> int:
        """First row where antidiagonal n takes the value r(n); 0 for n <= 1."""
        if n <= 1:
            return 0
        return self._plateau(n, 0)[1]

    def hp(self, n: int) -> int:
        """Last row where antidiagonal n takes the value r(n).  A319433"""
        if n <= 1:
            return 0
        return self._plateau(n, 0)[2]

    def antidiag_sequences(self, count: int):
        """Arrays r[0..count-1], h[...], hp[...] in one incremental sweep."""
        r = np.zeros(count, dtype=np.int64)
        h = np.zeros(count, dtype=np.int64)
        hp = np.zeros(count, dtype=np.int64)
        if count > 1:
            r[1] = 1
        hint = 0
        for n in range(2, count):
            rv, hv, hpv = self._plateau(n, hint)
            r[n], h[n], hp[n] = rv, hv, hpv
            hint = hv - 1
        return r, h, hp


def sweep_sequences(count: int) -> dict[str, np.ndarray]:
    """p, s, t, d, dp, b, c for n in [0, count) in one streaming pass.

    Keeps only two consecutive rows alive, so the horizon can be large
    without caching the whole array.  b and c are reported as 0 at n = 0,
    where the row has no displaced values.
    """
    out = {name: np.zeros(count, dtype=np.int64) for name in ("p", "s", "t", "d", "dp", "b", "c")}
    start, win = 0, []
    for n in range(1, count):
        vals = win
        try:
            pos = start + vals.index(n)
        except ValueError:
            pos = n
        out["p"][n] = pos
        out["s"][n] = _peek(start, vals, pos + 1)
        out["t"][n] = _peek(start, vals, pos + n)
        out["dp"][n] = _peek(start, vals, n)
        start, win = _advance(start, win, n)
        out["d"][n] = _peek(start, win, n)
        out["b"][n] = start - 1
        out["c"][n] = start + len(win)
    return out


def duplicate_values(diagonal: list[int]) -> list[int]:
    """Values occurring at least twice, in increasing order."""
    return sorted(v for v, c in Counter(diagonal).items() if c >= 2)
