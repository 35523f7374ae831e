"""Exact scalars: rationals, lazy base-b digit streams and comparisons between them.

Rationals are plain :class:`fractions.Fraction` objects. Irrational points such as
the base-4 Champernowne constant are :class:`DigitStream` objects: an infinite digit
sequence with a memoized prefix. A ``RealValue`` is either of the two.

Digit streams are assumed to be in canonical form, i.e. they never end in an
infinite tail of ``base - 1`` digits. Under that assumption a stream whose first
``n`` digits give the truncation ``lo`` satisfies ``lo <= value < lo + base**-n``,
which is what makes comparisons sound.
"""
from __future__ import annotations

import itertools
import math
import operator
import re
import threading
from fractions import Fraction
from typing import Callable, Iterator, Union

from .errors import Undecidable

__all__ = [
    "Rational",
    "RealValue",
    "DigitStream",
    "make_rational",
    "champernowne_stream",
    "rational_stream",
    "digits_of_rational",
    "rational_from_digits",
    "offset_add",
    "compare",
    "enclosure",
    "decimal_string",
    "format_rational",
    "parse_number",
    "to_json",
    "DEFAULT_COMPARE_DIGITS",
    "DEFAULT_SCAN_WINDOW",
]

Rational = Fraction

DEFAULT_COMPARE_DIGITS = 2000
DEFAULT_SCAN_WINDOW = 10_000


def make_rational(p: int, q: int) -> Fraction:
    """Reduced fraction ``p/q`` with positive denominator."""
    p, q = operator.index(p), operator.index(q)
    if q == 0:
        raise ZeroDivisionError("zero denominator")
    return Fraction(p, q)


class DigitStream:
    """Lazy base-``base`` digit sequence ``w_0 w_1 ...`` with value ``sum w_i base**-(i+1)``.

    ``source`` is a zero-argument callable returning a fresh iterator of digits; it
    is called once, on first access. The prefix cache is shared between threads and
    guarded by a lock, so concurrent readers see one consistent digit sequence.
    """

    def __init__(self, base: int, source: Callable[[], Iterator[int]], name: str = "stream"):
        base = operator.index(base)
        if base < 2:
            raise ValueError("base must be >= 2")
        self.base = base
        self.name = name
        self._source = source
        self._iter: Iterator[int] | None = None
        self._cache: list[int] = []
        self._lock = threading.Lock()
        # (root stream, rational offset) when built by offset_add
        self.origin: tuple[DigitStream, Fraction] = (self, Fraction(0))

    def __repr__(self):
        return f"DigitStream({self.name!r}, base={self.base})"

    def _extend(self, n):
        with self._lock:
            if self._iter is None:
                self._iter = iter(self._source())
            cache, base = self._cache, self.base
            while len(cache) < n:
                try:
                    d = next(self._iter)
                except StopIteration:
                    raise ValueError(f"digit source of {self.name} ended after {len(cache)} digits")
                if not 0 <= d < base:
                    raise ValueError(f"digit {d} out of range for base {base}")
                cache.append(d)

    def digit(self, i: int) -> int:
        if i >= len(self._cache):
            self._extend(i + 1)
        return self._cache[i]

    def prefix(self, n: int) -> list[int]:
        if n > len(self._cache):
            self._extend(n)
        return self._cache[:n]

    def truncation(self, n: int) -> Fraction:
        """Value of the first ``n`` digits, a lower bound for the stream's value."""
        acc = 0
        for d in self.prefix(n):
            acc = acc * self.base + d
        return Fraction(acc, self.base ** n)


RealValue = Union[Fraction, DigitStream]


def _champernowne_digits(base):
    for k in itertools.count(1):
        numeral = []
        while k:
            k, r = divmod(k, base)
            numeral.append(r)
        yield from reversed(numeral)


_champernowne_cache: dict[int, DigitStream] = {}
_champernowne_lock = threading.Lock()


def champernowne_stream(base: int = 4) -> DigitStream:
    """Concatenated base-``base`` numerals of 1, 2, 3, ...

    One shared instance per base, so repeated requests reuse the digit cache and
    compare as identical.
    """
    base = operator.index(base)
    if base < 2:
        raise ValueError("base must be >= 2")
    with _champernowne_lock:
        if base not in _champernowne_cache:
            _champernowne_cache[base] = DigitStream(
                base, lambda: _champernowne_digits(base), f"champernowne({base})"
            )
        return _champernowne_cache[base]


def digits_of_rational(r, base: int) -> tuple[list[int], list[int]]:
    """Eventually periodic base-``base`` expansion of ``r`` in [0, 1).

    Returns ``(preperiod, period)``, both minimal; terminating expansions get
    period ``[0]``.

    >>> digits_of_rational(Fraction(1, 6), 2)
    ([0], [0, 1])
    """
    r = Fraction(r)
    if not 0 <= r < 1:
        raise ValueError(f"{r} is outside [0, 1)")
    p, q = r.numerator, r.denominator
    seen: dict[int, int] = {}
    digits = []
    while p not in seen:
        seen[p] = len(digits)
        d, p = divmod(p * base, q)
        digits.append(d)
    start = seen[p]
    if p == 0:
        # remainder 0 repeats as the digit 0
        return digits[:start], [0]
    return digits[:start], digits[start:]


def rational_from_digits(preperiod, period, base: int) -> Fraction:
    """Inverse of :func:`digits_of_rational`: sum the preperiod and the geometric tail."""
    head = 0
    for d in preperiod:
        head = head * base + d
    cyc = 0
    for d in period:
        cyc = cyc * base + d
    value = Fraction(head) + Fraction(cyc, base ** len(period) - 1)
    return value / base ** len(preperiod)


def rational_stream(r, base: int) -> DigitStream:
    r = Fraction(r)
    pre, per = digits_of_rational(r, base)
    return DigitStream(
        base,
        lambda: itertools.chain(pre, itertools.cycle(per)),
        f"{format_rational(r)}@{base}",
    )


def _terminating_length(q, base):
    """Smallest k with q | base**k, or None if q has a prime factor not dividing base."""
    g = q
    while g != 1:
        h = math.gcd(g, base)
        if h == 1:
            return None
        g //= h
    k, p = 0, 1
    while p % q:
        p *= base
        k += 1
    return k


def _offset_from_root(root: DigitStream, total: Fraction, window: int) -> DigitStream:
    b = root.base
    k = _terminating_length(total.denominator, b)
    if k is None:
        raise ValueError(f"{total} has no terminating base-{b} expansion")
    k = max(k, 1)
    scale = b ** k
    head = 0
    for d in root.prefix(k):
        head = head * b + d
    new_head = head + int(total * scale)
    if not 0 <= new_head < scale:
        raise ValueError(f"{root.name} + ({format_rational(total)}) falls outside (0, 1)")
    # a zero (or all-(b-1)) head means the value sits on 0 (or 1) unless the tail says otherwise
    if new_head in (0, scale - 1):
        bad = 0 if new_head == 0 else b - 1
        for i in range(k, k + window):
            if root.digit(i) != bad:
                break
        else:
            raise Undecidable(
                f"carry/borrow for {root.name} + ({format_rational(total)}) unresolved within {window} digits"
            )
    head_digits = []
    for _ in range(k):
        new_head, d = divmod(new_head, b)
        head_digits.append(d)
    head_digits.reverse()

    def source():
        yield from head_digits
        for i in itertools.count(k):
            yield root.digit(i)

    sign = "+" if total > 0 else "-"
    out = DigitStream(b, source, f"{root.name}{sign}{format_rational(abs(total))}")
    out.origin = (root, total)
    return out


def offset_add(s: DigitStream, r, window: int = DEFAULT_SCAN_WINDOW) -> DigitStream:
    """Stream for ``value(s) + r`` where ``r`` has a terminating expansion in s's base.

    Offsets accumulate against the stream the chain started from, so
    ``offset_add(offset_add(s, r), -r)`` gives back ``s`` itself.
    """
    r = Fraction(r)
    root, off = s.origin
    total = off + r
    if total == 0:
        return root
    if r == 0:
        return s
    return _offset_from_root(root, total, window)


def enclosure(x: RealValue, n: int) -> tuple[Fraction, Fraction]:
    """Rational ``(lo, hi)`` with ``lo <= x <= hi``; for streams also ``x < hi``."""
    if isinstance(x, DigitStream):
        lo = x.truncation(n)
        return lo, lo + Fraction(1, x.base ** n)
    x = Fraction(x)
    return x, x


def _sign(v):
    return (v > 0) - (v < 0)


def compare(a: RealValue, b: RealValue, max_digits: int = DEFAULT_COMPARE_DIGITS) -> int:
    """Exact three-way comparison: -1, 0 or 1.

    Returns 0 only when equality is provable: both rational, the same stream, or two
    offsets of one root stream with equal offsets. Raises :class:`Undecidable` when
    ``max_digits`` digits do not separate a stream from the other value.
    """
    a_stream, b_stream = isinstance(a, DigitStream), isinstance(b, DigitStream)
    if not a_stream and not b_stream:
        return _sign(Fraction(a) - Fraction(b))
    if a is b:
        return 0
    if a_stream and b_stream and a.origin[0] is b.origin[0]:
        return _sign(a.origin[1] - b.origin[1])
    n = min(16, max_digits)
    while True:
        alo, ahi = enclosure(a, n)
        blo, bhi = enclosure(b, n)
        if ahi < blo or (ahi == blo and a_stream):
            return -1
        if bhi < alo or (bhi == alo and b_stream):
            return 1
        if n >= max_digits:
            raise Undecidable(f"{a!r} and {b!r} agree on {max_digits} digits")
        n = min(2 * n, max_digits)


def decimal_string(x: RealValue, n_digits: int, budget: int = DEFAULT_SCAN_WINDOW) -> str:
    """Truncated (never rounded) decimal expansion with ``n_digits`` fractional digits."""
    scale = 10 ** n_digits
    if isinstance(x, DigitStream):
        m = int(n_digits * math.log(10) / math.log(x.base)) + 8
        while True:
            lo, hi = enclosure(x, min(m, budget))
            k = math.floor(lo * scale)
            if hi * scale <= k + 1:
                break
            if m >= budget:
                raise Undecidable(f"decimal digit {n_digits} of {x.name} not pinned in {budget} digits")
            m *= 2
    else:
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise ValueError(f"{x} is outside [0, 1]")
        k = math.floor(x * scale)
    whole, frac = divmod(k, scale)
    if n_digits == 0:
        return str(whole)
    return f"{whole}.{frac:0{n_digits}d}"


def format_rational(r) -> str:
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


_STREAM_RE = re.compile(r"^\s*(?:champernowne\((\d+)\)|(c))\s*(?:([+-])\s*(\S+))?\s*$")


def parse_number(text: str) -> RealValue:
    """Parse ``p/q``, integers, decimals (exactly), ``champernowne(b)`` and ``champernowne(b)±p/q``.

    The bare symbol ``c`` is shorthand for ``champernowne(4)``.
    """
    m = _STREAM_RE.match(text)
    if m:
        base = int(m.group(1)) if m.group(1) else 4
        s = champernowne_stream(base)
        if m.group(3):
            off = Fraction(m.group(4))
            s = offset_add(s, off if m.group(3) == "+" else -off)
        return s
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse number {text!r}") from exc


def to_json(x: RealValue, prefix: int = 32):
    """JSON-ready form: ``"p/q"`` for rationals, a dict for streams."""
    if isinstance(x, DigitStream):
        return {"base": x.base, "prefix": x.prefix(prefix), "generator": x.name}
    return format_rational(x)
