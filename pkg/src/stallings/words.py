"""Words over a free basis.

A letter is a nonzero int: ``k`` stands for the generator a_k and ``-k`` for
its inverse. A word is a tuple of letters. Reduced words are the elements of
the free group; the empty tuple is the identity.
"""

import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

Word = Tuple[int, ...]

MAX_RANK = 26
IDENTITY = "1"


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class Basis:
    rank: int

    def __post_init__(self):
        if not 1 <= self.rank <= MAX_RANK:
            raise ValueError(f"rank must be between 1 and {MAX_RANK}, got {self.rank}")

    @property
    def letters(self) -> Word:
        """The symmetrized alphabet in canonical order a1 < A1 < a2 < A2 < ..."""
        out = []
        for k in range(1, self.rank + 1):
            out += [k, -k]
        return tuple(out)


def inverse(x: int) -> int:
    return -x


def letter_name(x: int) -> str:
    c = chr(ord("a") + abs(x) - 1)
    return c if x > 0 else c.upper()


_TOKEN = re.compile(r"\s*(?:(a)(\d+)|([A-Za-z])|(1))(\^(-?\d+))?|\s*(\S)")


def parse_word(text: str, basis: Basis) -> Word:
    """Parse compact ("aB") or explicit ("a1 a2^-1") notation. Does not reduce."""
    letters = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        pos = m.end()
        if m.group(7) is not None:
            if m.group(7) == "^":
                raise ParseError(f"malformed exponent in {text!r}")
            raise ParseError(f"unknown letter {m.group(7)!r} in {text!r}")
        if m.group(1):
            k = int(m.group(2))
            if k == 0:
                raise ParseError(f"generator index must be positive in {text!r}")
            unit = [k]
        elif m.group(3):
            c = m.group(3)
            k = ord(c.lower()) - ord("a") + 1
            unit = [k if c.islower() else -k]
        else:
            unit = []
        if unit and abs(unit[0]) > basis.rank:
            raise ParseError(
                f"generator {letter_name(unit[0])!r} out of range for rank {basis.rank}"
            )
        if m.group(5):
            e = int(m.group(6))
            unit = unit * e if e >= 0 else [-x for x in unit] * -e
        letters += unit
    return tuple(letters)


def format_word(w: Sequence[int]) -> str:
    if not w:
        return IDENTITY
    return "".join(letter_name(x) for x in w)


def reduce(w: Sequence[int]) -> Word:
    stack = []
    for x in w:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def invert(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def concat_reduced(u: Sequence[int], v: Sequence[int]) -> Word:
    i = 0
    n = min(len(u), len(v))
    while i < n and u[len(u) - 1 - i] == -v[i]:
        i += 1
    return tuple(u[: len(u) - i]) + tuple(v[i:])


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != -w[-1])


class CyclicDecomposition(NamedTuple):
    shell: Word
    body: Word


def cyclic_reduce(u: Sequence[int]) -> CyclicDecomposition:
    """Split reduced ``u`` as shell . body . shell^-1 with body cyclically reduced."""
    i, j = 0, len(u) - 1
    while i < j and u[i] == -u[j]:
        i += 1
        j -= 1
    return CyclicDecomposition(tuple(u[:i]), tuple(u[i : j + 1]))


def common_prefix(words: Sequence[Sequence[int]]) -> Word:
    if not words:
        return ()
    first = words[0]
    n = min(len(w) for w in words)
    i = 0
    while i < n and all(w[i] == first[i] for w in words):
        i += 1
    return tuple(first[:i])
