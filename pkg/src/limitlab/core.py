"""Data substrate: pauses, finite sequences, eventually-periodic texts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

PAUSE = "#"
NO_HYP = "?"

Datum = Union[int, str]
FinSeq = tuple


def is_pause(x) -> bool:
    return x == PAUSE


def check_datum(x) -> Datum:
    if x == PAUSE:
        return PAUSE
    if isinstance(x, bool) or not isinstance(x, int) or x < 0:
        raise ValueError(f"datum must be a natural number or '#', got {x!r}")
    return x


def content(f) -> frozenset:
    """Numbers occurring in a sequence or text, pauses excluded."""
    if isinstance(f, Text):
        return f.content
    return frozenset(x for x in f if x != PAUSE)


def restrict(seq, t: int) -> tuple:
    if t < 0 or t > len(seq):
        raise IndexError(f"restriction length {t} out of range for sequence of length {len(seq)}")
    return tuple(seq[:t])


def is_consistent(f, allowed) -> bool:
    return content(f) <= frozenset(allowed)


@dataclass(frozen=True)
class Text:
    """The infinite sequence ``head + tail + tail + ...``."""

    head: tuple = ()
    tail: tuple = (PAUSE,)

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(check_datum(x) for x in self.head))
        object.__setattr__(self, "tail", tuple(check_datum(x) for x in self.tail))
        if not self.tail:
            raise ValueError("text tail must be nonempty")

    @property
    def content(self) -> frozenset:
        return frozenset(x for x in self.head + self.tail if x != PAUSE)

    def __getitem__(self, i: int) -> Datum:
        if i < 0:
            raise IndexError(i)
        if i < len(self.head):
            return self.head[i]
        return self.tail[(i - len(self.head)) % len(self.tail)]

    def prefix(self, n: int) -> tuple:
        return expand(self, n)

    @property
    def saturation(self) -> int:
        """Length after which every prefix has the full content."""
        return len(self.head) + len(self.tail)

    def __str__(self) -> str:
        return format_text(self)


def expand(text: Text, n: int) -> tuple:
    head, tail = text.head, text.tail
    if n <= len(head):
        return head[:n]
    rest = n - len(head)
    reps, extra = divmod(rest, len(tail))
    return head + tail * reps + tail[:extra]


def _parse_items(part: str) -> tuple:
    part = part.strip()
    if not part:
        return ()
    out = []
    for item in part.split(","):
        item = item.strip()
        if item == PAUSE:
            out.append(PAUSE)
        else:
            out.append(int(item))
    return tuple(out)


def parse_text(literal: str) -> Text:
    """Parse ``head|tail`` (e.g. ``"4,2|#"``); a missing tail means ``#``."""
    if "|" in literal:
        head, tail = literal.split("|", 1)
        tail_items = _parse_items(tail) or (PAUSE,)
    else:
        head, tail_items = literal, (PAUSE,)
    return Text(_parse_items(head), tail_items)


def format_text(text: Text) -> str:
    def fmt(items: Iterable) -> str:
        return ",".join(str(x) for x in items)

    return f"{fmt(text.head)}|{fmt(text.tail)}"
