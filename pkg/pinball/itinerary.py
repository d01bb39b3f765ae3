"""
Cyclic itinerary words.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Sequence, Tuple

from .exceptions import IllegalItineraryError


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class Itinerary:
    """Cyclic word of 1-based side indices, read from its first letter.

    The stored rotation matters: the first letter is the base side on which
    departure angles and base intervals are measured. Equality is on the
    stored word; compare canonical() forms to identify cyclic words.
    """
    word: Tuple[int, ...]

    def __post_init__(self) -> None:
        word = tuple(int(c) for c in self.word)
        if len(word) < 2:
            raise IllegalItineraryError(f"an itinerary needs at least two letters, got {word}")
        if min(word) < 1:
            raise IllegalItineraryError(f"side indices are 1-based, got {word}")
        for k, letter in enumerate(word):
            if letter == word[(k + 1) % len(word)]:
                raise IllegalItineraryError(
                    f"consecutive letters must differ (position {k + 1} in {word})",
                    context={"word": word, "position": k + 1})
        object.__setattr__(self, "word", word)

    @classmethod
    def parse(cls, text: str) -> "Itinerary":
        """Parse "1,2,1,3" (braces and blanks tolerated)"""
        cleaned = text.strip().strip("{}()[]")
        try:
            letters = [int(part) for part in cleaned.split(",") if part.strip()]
        except ValueError as e:
            raise IllegalItineraryError(f"cannot parse itinerary {text!r}") from e
        return cls(tuple(letters))

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.word)

    def __len__(self) -> int:
        return len(self.word)

    def __iter__(self) -> Iterator[int]:
        return iter(self.word)

    def __getitem__(self, k: int) -> int:
        """Cyclic indexing"""
        return self.word[k % len(self.word)]

    @property
    def period(self) -> int:
        return len(self.word)

    @property
    def parity(self) -> Parity:
        return Parity.EVEN if self.period % 2 == 0 else Parity.ODD

    @property
    def is_even(self) -> bool:
        return self.parity is Parity.EVEN

    @property
    def half_period(self) -> int:
        return self.period // 2

    @property
    def transitions(self) -> List[Tuple[int, int]]:
        """(i_k, i_{k+1}) for k = 0..period-1, cyclically"""
        return [(self.word[k], self[k + 1]) for k in range(self.period)]

    @property
    def is_primitive(self) -> bool:
        """False when the word is a power of a shorter word"""
        p = self.period
        return all(self.word != self.word[k:] + self.word[:k] for k in range(1, p) if p % k == 0)

    @property
    def letter_alternating_sum(self) -> int:
        return sum(c if k % 2 == 0 else -c for k, c in enumerate(self.word))

    def rotated(self, k: int) -> "Itinerary":
        k %= self.period
        return Itinerary(self.word[k:] + self.word[:k])

    def canonical(self) -> "Itinerary":
        """Lexicographically minimal rotation"""
        return Itinerary(min(self.word[k:] + self.word[:k] for k in range(self.period)))

    def canonical_offset(self) -> int:
        """Rotation index at which the canonical form starts"""
        target = self.canonical().word
        return next(k for k in range(self.period) if self.word[k:] + self.word[:k] == target)

    def reversed(self) -> "Itinerary":
        """Word of the reversed cylinder read from the same base side"""
        return Itinerary(self.word[:1] + tuple(reversed(self.word[1:])))

    def check_sides(self, d: int) -> None:
        if max(self.word) > d:
            raise IllegalItineraryError(
                f"itinerary {self} uses side {max(self.word)} but the polygon has {d} sides",
                context={"word": self.word, "sides": d})


def enumerate_words(d: int, period: int) -> Iterator[Itinerary]:
    """Canonical primitive cyclic words of the given period over sides 1..d"""
    if period < 2 or d < 2:
        return

    def extend(prefix: List[int]) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == period:
            if prefix[-1] != prefix[0]:
                yield tuple(prefix)
            return
        for letter in range(1, d + 1):
            # the first letter of a canonical word is its smallest
            if letter != prefix[-1] and letter >= prefix[0]:
                prefix.append(letter)
                yield from extend(prefix)
                prefix.pop()

    for first in range(1, d + 1):
        for word in extend([first]):
            candidate = Itinerary(word)
            if candidate.canonical().word == word and candidate.is_primitive:
                yield candidate


def as_itinerary(value: "Itinerary | Sequence[int] | str") -> Itinerary:
    if isinstance(value, Itinerary):
        return value
    if isinstance(value, str):
        return Itinerary.parse(value)
    return Itinerary(tuple(value))
