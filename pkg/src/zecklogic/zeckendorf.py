"""Codec between natural numbers and Zeckendorf bit strings.

Every natural number is a unique sum of non-adjacent Fibonacci numbers F_i
(i >= 2).  We write that sum as a bit string, most significant digit first:
digit i of a length-t string carries weight F_{t+2-i}.  The canonical word
has no "11" factor and no leading zero; the empty string encodes zero
internally and renders as "0" in external text.
"""

from __future__ import annotations

from .errors import MalformedInputError

_FIBS = [0, 1]


def fib(i: int) -> int:
    """Fibonacci number F_i with F_0 = 0 and F_1 = 1."""
    if i < 0:
        raise MalformedInputError(f"negative Fibonacci index {i}")
    while len(_FIBS) <= i:
        _FIBS.append(_FIBS[-1] + _FIBS[-2])
    return _FIBS[i]


def _check_bits(w: str) -> None:
    for ch in w:
        if ch not in "01":
            raise MalformedInputError(f"non-binary digit {ch!r} in {w!r}")


def encode(n: int) -> str:
    """Canonical Zeckendorf word for n; the empty string encodes zero.

    Greedy largest-Fibonacci-first: after subtracting F_j the remainder is
    below F_{j-1}, so no two adjacent indices are ever used.
    """
    if n < 0:
        raise MalformedInputError(f"cannot encode negative value {n}")
    if n == 0:
        return ""
    top = 2
    while fib(top + 1) <= n:
        top += 1
    digits = []
    rem = n
    for j in range(top, 1, -1):
        f = fib(j)
        if f <= rem:
            digits.append("1")
            rem -= f
        else:
            digits.append("0")
    return "".join(digits)


def decode(w: str) -> int:
    """Weighted Fibonacci sum of a bit string; leading zeros are allowed.

    Canonicity is not required: any 0/1 string decodes to the sum of the
    weights of its one digits.
    """
    _check_bits(w)
    t = len(w)
    total = 0
    for i, ch in enumerate(w):
        if ch == "1":
            total += fib(t + 1 - i)
    return total


def is_canonical(w: str) -> bool:
    """True iff w has no "11" factor and no leading zero (empty allowed)."""
    _check_bits(w)
    if not w:
        return True
    return w[0] == "1" and "11" not in w


def normalize(w: str) -> str:
    """Value-preserving rewrite of any bit string to canonical form.

    Repeatedly replaces the leftmost "011" pattern (with a virtual leading
    zero when the pair sits at the front) by "100"; each rewrite removes one
    1 digit, so the sweep terminates.  Works symbolically, without decoding.
    """
    _check_bits(w)
    digits = [int(ch) for ch in w]
    while True:
        pos = -1
        for i in range(len(digits) - 1):
            if digits[i] == 1 and digits[i + 1] == 1:
                pos = i
                break
        if pos < 0:
            break
        if pos == 0:
            digits.insert(0, 0)
            pos = 1
        digits[pos - 1] = 1
        digits[pos] = 0
        digits[pos + 1] = 0
    k = 0
    while k < len(digits) and digits[k] == 0:
        k += 1
    return "".join(str(d) for d in digits[k:])


def render(w: str) -> str:
    """External text form of a digit string: "0" for the empty word."""
    return w if w else "0"
